"""Length and rank generating functions, the factorisation test, fixed-point-free involutions."""
from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .classify import degrees
from .coxeter import DEFAULT_ELEMENT_BUDGET, INF, CoxeterSystem, enumerate_elements, multiply
from .errors import InfiniteFix, InfiniteGroup, UnsupportedInfinitePair
from .twisted import TwistedSystem


class IntPolynomial:
    """Integer polynomial in t; ``coeffs[k]`` is the coefficient of t^k."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "IntPolynomial":
        return cls([0] * k + [c])

    @classmethod
    def q_integer(cls, n: int) -> "IntPolynomial":
        """1 + t + ... + t^(n-1)."""
        return cls([1] * n)

    @classmethod
    def from_exponents(cls, exps: Iterable[int]) -> "IntPolynomial":
        exps = list(exps)
        c = [0] * (max(exps) + 1 if exps else 0)
        for e in exps:
            c[e] += 1
        return cls(c)

    @classmethod
    def product(cls, factors: Iterable["IntPolynomial"]) -> "IntPolynomial":
        out = cls([1])
        for f in factors:
            out = out * f
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPolynomial([other])
        return isinstance(other, IntPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(x + y for x, y in zip(a, b))

    def __neg__(self):
        return IntPolynomial(-x for x in self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolynomial(x * other for x in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return IntPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __divmod__(self, other):
        """Division by a polynomial whose leading coefficient is +-1."""
        if not other.coeffs or abs(other.coeffs[-1]) != 1:
            raise ValueError("divisor must have leading coefficient +-1")
        rem = list(self.coeffs)
        lead = other.coeffs[-1]
        q = [0] * max(len(rem) - len(other.coeffs) + 1, 0)
        for k in range(len(q) - 1, -1, -1):
            c = rem[k + other.degree] * lead
            q[k] = c
            for j, b in enumerate(other.coeffs):
                rem[k + j] -= c * b
        return IntPolynomial(q), IntPolynomial(rem)

    def __call__(self, t):
        return sum(c * t**k for k, c in enumerate(self.coeffs))

    def is_palindromic(self) -> bool:
        return self.coeffs == self.coeffs[::-1]

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            terms.append(("-" if c < 0 else "+", body))
        if not terms:
            return "0"
        sign, body = terms[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"IntPolynomial({list(self.coeffs)})"

    def to_json(self) -> str:
        return json.dumps(list(self.coeffs))

    @classmethod
    def from_json(cls, text: str) -> "IntPolynomial":
        return cls(json.loads(text))


@dataclass(frozen=True)
class TruncatedSeries:
    """Generating function known only up to ``valid_up_to``; never a finite answer."""

    poly: IntPolynomial
    valid_up_to: int

    def __str__(self):
        return f"{self.poly} + O(t^{self.valid_up_to + 1})  [valid up to degree {self.valid_up_to}]"


# ---------------------------------------------------------------------------


def poincare_W(system: CoxeterSystem, budget: int = DEFAULT_ELEMENT_BUDGET) -> IntPolynomial:
    """Length generating function by enumeration, cross-checked against the degrees."""
    layers = enumerate_elements(system, None, budget)
    poly = IntPolynomial(layers.profile)
    label = system.finite_type
    if label is not None:
        expected = IntPolynomial.product(IntPolynomial.q_integer(d) for d in degrees(label))
        if poly != expected:
            raise AssertionError(f"enumerated Poin(W) disagrees with the degrees of {label}")
    return poly


def poincare_iota(ts: TwistedSystem, max_rank: Optional[int] = None,
                  budget: int = DEFAULT_ELEMENT_BUDGET):
    """Rank generating function of the twisted identities.

    With ``max_rank`` on an infinite group the result is a TruncatedSeries.
    """
    enum = ts.enumerate_twisted_involutions(max_rank, budget)
    poly = IntPolynomial.from_exponents(enum.elements[i].rho for i in enum.iota)
    if enum.complete:
        return poly
    return TruncatedSeries(poly, enum.truncation_rank)


def poincare_fix(ts: TwistedSystem, budget: int = DEFAULT_ELEMENT_BUDGET) -> IntPolynomial:
    """Sum of t^l over Fix(theta), l the word length in the canonical generators w_{s, theta(s)}."""
    system = ts.system
    for s in system.generators:
        t = ts.theta(s)
        if t != s and system.matrix[s, t] == INF:
            raise UnsupportedInfinitePair(f"m(s{s + 1}, s{t + 1}) is infinite")
    gens = ts.fixed_subgroup_generators(require_all_finite=True)
    e = system.identity()
    dist = {e.key: 0}
    queue = deque([e])
    while queue:
        w = queue.popleft()
        for g in gens:
            x = multiply(w, g)
            if x.key not in dist:
                if len(dist) >= budget:
                    raise InfiniteFix(f"Fix(theta) has more than {budget} elements")
                dist[x.key] = dist[w.key] + 1
                queue.append(x)
    if system.is_finite:
        fixed = {w.key for w in ts.fixed_subgroup_elements(budget)}
        if fixed != set(dist):
            raise AssertionError("the canonical generators do not generate Fix(theta)")
    return IntPolynomial.from_exponents(dist.values())


@dataclass
class FactorizationReport:
    poin_W: IntPolynomial
    poin_iota: IntPolynomial
    poin_fix: IntPolynomial
    factors: bool
    residual: IntPolynomial  # Poin(W) - Poin(iota) Poin(Fix)

    def describe(self) -> str:
        lines = [
            f"Poin(W)    = {self.poin_W}",
            f"Poin(iota) = {self.poin_iota}",
            f"Poin(Fix)  = {self.poin_fix}",
        ]
        if self.factors:
            lines.append("Poin(W) = Poin(iota) * Poin(Fix)")
        else:
            lines.append(f"residual Poin(W) - Poin(iota)*Poin(Fix) = {self.residual}")
            if abs(self.poin_iota.coeffs[-1]) == 1:
                q, r = divmod(self.poin_W, self.poin_iota)
                lines.append(f"Poin(W) / Poin(iota): quotient {q}, remainder {r}")
        return "\n".join(lines)


def factors_through(ts: TwistedSystem, budget: int = DEFAULT_ELEMENT_BUDGET) -> FactorizationReport:
    if not ts.system.is_finite:
        raise InfiniteGroup("factorisation is only decided for finite groups")
    pw = poincare_W(ts.system, budget)
    pi = poincare_iota(ts, None, budget)
    pf = poincare_fix(ts, budget)
    residual = pw - pi * pf
    return FactorizationReport(pw, pi, pf, residual == IntPolynomial(), residual)


def commuting_orbits_condition(ts: TwistedSystem) -> bool:
    """m(s, theta(s)) in {1, 2, inf} for every generator."""
    return all(ts.system.matrix[s, ts.theta(s)] in (1, 2, INF) for s in ts.system.generators)


# ---------------------------------------------------------------------------
# fixed-point-free involutions of S_{2n}


def fpf_involutions(n: int) -> list[tuple[int, ...]]:
    """All fixed-point-free involutions of {0, ..., 2n-1} in one-line notation."""

    def pairings(points):
        if not points:
            yield []
            return
        a = points[0]
        for k in range(1, len(points)):
            rest = points[1:k] + points[k + 1:]
            for p in pairings(rest):
                yield [(a, points[k])] + p

    out = []
    for pairing in pairings(list(range(2 * n))):
        perm = [0] * (2 * n)
        for a, b in pairing:
            perm[a], perm[b] = b, a
        out.append(tuple(perm))
    return sorted(out)


def inversions(perm: Sequence[int]) -> int:
    return sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])


def fpf_involution_series(n: int, method: str = "closed") -> IntPolynomial:
    """I(n; t) = sum of t^inv over F(2n) = t^n prod_{i<n} (1 + t^2 + ... + t^(4i))."""
    if method == "enumerate":
        return IntPolynomial.from_exponents(inversions(p) for p in fpf_involutions(n))
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    factors = [IntPolynomial([1 if k % 2 == 0 else 0 for k in range(4 * i + 1)]) for i in range(n)]
    return IntPolynomial.monomial(n) * IntPolynomial.product(factors)


def fpf_weight_identity(n: int, budget: int = DEFAULT_ELEMENT_BUDGET) -> bool:
    """sum over F(2n) of t^((inv - n)/2) equals Poin(iota) for A_{2n-1} flip, and is palindromic."""
    from .presets import resolve_preset

    system, theta = resolve_preset(f"A{2 * n - 1}:flip")
    series = IntPolynomial.from_exponents((inversions(p) - n) // 2 for p in fpf_involutions(n))
    poin = poincare_iota(TwistedSystem(system, theta), None, budget)
    return series == poin and poin.is_palindromic()
