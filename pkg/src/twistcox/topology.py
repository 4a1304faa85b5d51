"""Order complexes of open intervals, reduced integral homology, discrete Morse matchings."""
from __future__ import annotations

import graphlib
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import BudgetExceeded, HypothesisFailed, MatchingError, NotAComplex, NotComparable
from .poset import RankedPoset

DEFAULT_CHAIN_BUDGET = 2 * 10**6


# --------------------------------------------------------------------------
# Order complexes and chain complexes


@dataclass
class OrderComplex:
    """All chains of an open interval, as sorted tuples of poset indices.

    ``simplices[d]`` holds the d-dimensional chains (d + 1 vertices), in
    lexicographic order.  The empty chain is not stored here; it enters
    only through the augmentation of :class:`ChainComplex`.
    """

    vertices: list[int]
    simplices: list[list[tuple]]

    @property
    def dimension(self) -> int:
        return len(self.simplices) - 1

    def cells(self) -> list[tuple]:
        """Face poset elements including the empty cell."""
        return [()] + [c for layer in self.simplices for c in layer]

    def f_vector(self) -> list[int]:
        return [len(layer) for layer in self.simplices]

    def reduced_euler_characteristic(self) -> int:
        return -1 + sum((-1) ** d * n for d, n in enumerate(self.f_vector()))


def open_interval(p: RankedPoset, u: int, v: int) -> list[int]:
    if not p.less(u, v):
        raise NotComparable(f"{p.label(u)} is not strictly below {p.label(v)}")
    return [int(x) for x in np.flatnonzero(p.leq[u, :] & p.leq[:, v]) if x != u and x != v]


def order_complex(p: RankedPoset, u: int, v: int, max_chains: int = DEFAULT_CHAIN_BUDGET) -> OrderComplex:
    verts = open_interval(p, u, v)
    up = {x: [y for y in verts if y > x and p.leq[x, y]] for x in verts}
    simplices: list[list[tuple]] = []
    layer = [(x,) for x in verts]
    total = 0
    while layer:
        total += len(layer)
        if total > max_chains:
            raise BudgetExceeded("order complex chains", max_chains)
        simplices.append(layer)
        layer = [c + (y,) for c in layer for y in up[c[-1]]]
    return OrderComplex(verts, simplices)


@dataclass
class ChainComplex:
    """Reduced simplicial chain complex.

    ``boundaries[d]`` maps C_d to C_{d-1} as a sparse dict
    ``{(row, col): coeff}`` with rows indexing (d-1)-cells; ``boundaries[0]``
    is the augmentation to the single (-1)-cell.
    """

    sizes: list[int]  # sizes[d + 1] = number of d-cells, d >= -1
    boundaries: list[dict]

    @classmethod
    def from_order_complex(cls, oc: OrderComplex) -> "ChainComplex":
        sizes = [1] + oc.f_vector()
        bds = []
        prev_index = {(): 0}
        for layer in oc.simplices:
            bd = {}
            for j, c in enumerate(layer):
                for k in range(len(c)):
                    bd[(prev_index[c[:k] + c[k + 1:]], j)] = (-1) ** k
            bds.append(bd)
            prev_index = {c: j for j, c in enumerate(layer)}
        return cls(sizes, bds)

    def check(self):
        """d∘d = 0 in every degree."""
        for d in range(1, len(self.boundaries)):
            a, b = self.boundaries[d - 1], self.boundaries[d]
            by_row = {}
            for (r, c), x in b.items():
                by_row.setdefault(r, []).append((c, x))
            prod = {}
            for (r, m), x in a.items():
                for c, y in by_row.get(m, ()):
                    prod[(r, c)] = prod.get((r, c), 0) + x * y
            if any(prod.values()):
                raise NotAComplex(f"boundary composite is nonzero in degree {d}")


def smith_normal_form(M) -> list[int]:
    """Invariant factors d1 | d2 | ... of an integer matrix (dense rows or sparse dict).

    Unit pivots are eliminated first on sparse rows; the rest is reduced
    densely with a minimal-absolute-value pivot.  Python integers keep
    everything exact.
    """
    if isinstance(M, dict):
        entries = M
    else:
        entries = {(i, j): int(x) for i, row in enumerate(M) for j, x in enumerate(row) if x}
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, set] = {}
    for (i, j), x in entries.items():
        if x:
            rows.setdefault(i, {})[j] = int(x)
            cols.setdefault(j, set()).add(i)
    units = 0
    changed = True
    while changed:
        changed = False
        for j in sorted(cols, key=lambda c: len(cols[c])):
            if j not in cols:
                continue
            cand = [i for i in cols[j] if abs(rows[i][j]) == 1]
            if not cand:
                continue
            p = min(cand, key=lambda i: (len(rows[i]), i))
            prow = rows.pop(p)
            for c in prow:
                cols[c].discard(p)
            pv = prow[j]
            for i in list(cols[j]):
                f = rows[i][j] * pv  # pv = +-1, so this is rows[i][j] / pv
                r = rows[i]
                for c, x in prow.items():
                    y = r.get(c, 0) - f * x
                    if y:
                        if c not in r:
                            cols[c].add(i)
                        r[c] = y
                    elif c in r:
                        del r[c]
                        cols[c].discard(i)
                if not r:
                    del rows[i]
            for c in list(prow):
                if not cols[c]:
                    del cols[c]
            cols.pop(j, None)
            units += 1
            changed = True
    rest = _dense_snf(rows)
    return [1] * units + rest


def _dense_snf(rows: dict[int, dict[int, int]]) -> list[int]:
    if not rows:
        return []
    cidx = sorted({c for r in rows.values() for c in r})
    cpos = {c: k for k, c in enumerate(cidx)}
    A = [[0] * len(cidx) for _ in rows]
    for k, r in enumerate(rows.values()):
        for c, x in r.items():
            A[k][cpos[c]] = x
    diag = []
    m, n = len(A), len(cidx)
    t = 0
    while t < min(m, n):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        A[t], A[pi] = A[pi], A[t]
        for row in A:
            row[t], row[pj] = row[pj], row[t]
        done = True
        piv = A[t][t]
        for i in range(t + 1, m):
            q = A[i][t] // piv
            if q:
                A[i] = [a - q * b for a, b in zip(A[i], A[t])]
            if A[i][t]:
                done = False
        for j in range(t + 1, n):
            q = A[t][j] // piv
            if q:
                for row in A:
                    row[j] -= q * row[t]
            if A[t][j]:
                done = False
        if not done:
            continue  # a smaller remainder now exists; pivot again
        # divisibility: fold any entry not divisible by the pivot into row t
        bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % piv), None)
        if bad:
            A[t] = [a + b for a, b in zip(A[t], A[bad[0]])]
            continue
        diag.append(abs(piv))
        t += 1
    return diag


@dataclass
class HomologyResult:
    """Reduced integral homology; index 0 of the lists is degree -1."""

    betti: list[int]
    torsion: list[list[int]]

    def degrees(self) -> range:
        return range(-1, len(self.betti) - 1)

    def betti_at(self, d: int) -> int:
        return self.betti[d + 1] if 0 <= d + 1 < len(self.betti) else 0

    def torsion_at(self, d: int) -> list[int]:
        return self.torsion[d + 1] if 0 <= d + 1 < len(self.torsion) else []

    def classify(self) -> str:
        nonzero = [d for d in self.degrees() if self.betti_at(d) or self.torsion_at(d)]
        if not nonzero:
            return "ACYCLIC"
        if len(nonzero) == 1 and self.betti_at(nonzero[0]) == 1 and not self.torsion_at(nonzero[0]):
            return f"SPHERE({nonzero[0]})"
        return "OTHER"

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * self.betti_at(d) for d in self.degrees())

    def shifted_equal(self, other: "HomologyResult", shift: int) -> bool:
        """self in degree i equals other in degree i - shift, for every i."""
        lo = min(-1, -1 + shift)
        hi = max(len(self.betti), len(other.betti) + shift) + 1
        return all(
            self.betti_at(i) == other.betti_at(i - shift) and self.torsion_at(i) == other.torsion_at(i - shift)
            for i in range(lo, hi)
        )

    def lines(self) -> list[str]:
        out = []
        for d in self.degrees():
            text = f"H~{d} = Z^{self.betti_at(d)}"
            for t in self.torsion_at(d):
                text += f" + Z/{t}"
            out.append(text)
        out.append(self.classify())
        return out


def reduced_homology(c: ChainComplex, check: bool = True) -> HomologyResult:
    if check:
        c.check()
    top = len(c.sizes)  # degrees -1 .. top-2
    ranks, factors = [], []
    for bd in c.boundaries:
        inv = smith_normal_form(bd)
        ranks.append(len(inv))
        factors.append([x for x in inv if x > 1])
    # boundaries[k] : C_{k} -> C_{k-1}; rank of the map out of degree d is ranks[d]
    betti, torsion = [], []
    for i in range(top):  # i = d + 1
        d = i - 1
        out_rank = ranks[d] if d >= 0 else 0
        in_rank = ranks[d + 1] if d + 1 < len(ranks) else 0
        betti.append(c.sizes[i] - out_rank - in_rank)
        torsion.append(sorted(factors[d + 1]) if d + 1 < len(factors) else [])
    while len(betti) > 1 and betti[-1] == 0 and not torsion[-1]:
        betti.pop()
        torsion.pop()
    return HomologyResult(betti, torsion)


def interval_homology(p: RankedPoset, u: int, v: int, max_chains: int = DEFAULT_CHAIN_BUDGET) -> HomologyResult:
    return reduced_homology(ChainComplex.from_order_complex(order_complex(p, u, v, max_chains)))


# --------------------------------------------------------------------------
# Discrete Morse matchings


@dataclass
class MorseMatching:
    cells: list[tuple]
    partner: dict = field(repr=False)
    critical: list[tuple] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.critical

    def critical_by_dimension(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for c in self.critical:
            out[len(c) - 1] = out.get(len(c) - 1, 0) + 1
        return out

    def critical_is_filter(self) -> bool:
        """Every cell containing a critical cell is critical."""
        crit = set(self.critical)
        return all(
            c in crit for c in self.cells
            if any(set(z) <= set(c) for z in self.critical)
        )


def verify_acyclic(m: MorseMatching) -> bool:
    """DAG test on the face poset Hasse diagram, matched edges up, others down."""
    cellset = set(m.cells)
    graph: dict[tuple, set] = {c: set() for c in m.cells}
    # TopologicalSorter takes predecessor sets; an edge a -> b adds a to graph[b]
    for c in m.cells:
        for k in range(len(c)):
            f = c[:k] + c[k + 1:]
            if f not in cellset:
                continue
            if m.partner.get(f) == c:
                graph[c].add(f)  # f -> c (up)
            else:
                graph[f].add(c)  # c -> f (down)
    try:
        tuple(graphlib.TopologicalSorter(graph).static_order())
    except graphlib.CycleError:
        return False
    return True


def _validate(cells, partner):
    cellset = set(cells)
    for a, b in partner.items():
        if b not in cellset or partner.get(b) != a or a == b:
            raise MatchingError(f"{a} -> {b} is not a matching on the face poset")
        small, big = (a, b) if len(a) < len(b) else (b, a)
        if len(big) != len(small) + 1 or not set(small) <= set(big):
            raise MatchingError(f"{a} and {b} are not cover-related")


def _build_matching(cells, pick) -> MorseMatching:
    """``pick(c)`` returns the element to toggle in chain c, or None (critical)."""
    partner = {}
    for c in cells:
        x = pick(c)
        if x is None:
            continue
        partner[c] = tuple(sorted(set(c) ^ {x}))
    _validate(cells, partner)
    critical = [c for c in cells if c not in partner]
    return MorseMatching(cells, partner, critical)


class _Ctx:
    """Poset indices plus S-action lookups for Br(iota) inside a TwistedBruhat."""

    def __init__(self, bruhat, u, v, max_chains):
        self.B = bruhat
        self.p = bruhat.poset("iota")
        self.u, self.v = u, v
        self.oc = order_complex(self.p, u, v, max_chains)
        self.inside = set(self.oc.vertices)
        self.cells = self.oc.cells()

    def enum(self, x):
        return self.p.elements[x].payload

    def desc(self, x, s) -> bool:
        return bool(self.B.enum.desc[s, self.enum(x)])

    def act(self, x, s):
        """(enumeration index of x.s, whether x.s = x s)."""
        i = self.enum(x)
        return int(self.B.enum.act[s, i]), bool(self.B.enum.ws_branch[s, i])

    def act_iota(self, x, s):
        """Poset index of x.s when it is a twisted identity, else None."""
        j, _ = self.act(x, s)
        if j < 0 or not self.B.in_iota[j]:
            return None
        return self.p.index(self.B.enum.elements[j].sexpr)


def _collapse_pick(ctx, s, excluded=None):
    def pick(c):
        if excluded is not None and excluded in c:
            return None
        xc = next((x for x in list(c) + [ctx.v] if ctx.desc(x, s)), None)
        if xc is None:
            raise MatchingError("no element of c + {v} has s as a descent")
        y = ctx.act_iota(xc, s)
        if y is None or y not in ctx.inside:
            raise MatchingError(f"x_c.s leaves the open interval for chain {c}")
        return y
    return pick


def morse_matching_collapse(bruhat, u: int, v: int, s: int,
                            max_chains: int = DEFAULT_CHAIN_BUDGET) -> MorseMatching:
    """Complete matching for u.s = u s with s a descent of v (indices in Br(iota))."""
    ctx = _Ctx(bruhat, u, v, max_chains)
    _, ws = ctx.act(u, s)
    if not ctx.desc(v, s) or ctx.desc(u, s) or not ws:
        raise HypothesisFailed("collapse needs s in D_R(v) and u.s = u s > u")
    return _build_matching(ctx.cells, _collapse_pick(ctx, s))


def morse_matching_suspend(bruhat, u: int, v: int, s: int,
                           max_chains: int = DEFAULT_CHAIN_BUDGET) -> MorseMatching:
    """Critical cells are the chains through u.s; everything else matched as in the collapse."""
    ctx = _Ctx(bruhat, u, v, max_chains)
    _, ws = ctx.act(u, s)
    if not ctx.desc(v, s) or ctx.desc(u, s) or ws:
        raise HypothesisFailed("suspension needs s in D_R(v) \\ D_R(u) and u.s = theta(s) u s")
    us = ctx.act_iota(u, s)
    if us == v:
        raise HypothesisFailed("u.s = v: the interval is a cover and (u.s, v) is undefined")
    return _build_matching(ctx.cells, _collapse_pick(ctx, s, excluded=us))


def morse_matching_caseI(bruhat, u: int, v: int, s: int,
                         max_chains: int = DEFAULT_CHAIN_BUDGET) -> MorseMatching:
    """Critical cells are the chains through v.s; x_c is the largest x with x.s = theta(s) x s > x."""
    ctx = _Ctx(bruhat, u, v, max_chains)
    _, ws = ctx.act(u, s)
    if not ctx.desc(v, s) or ctx.desc(u, s) or ws:
        raise HypothesisFailed("case I needs s in D_R(v) \\ D_R(u) and u.s = theta(s) u s")
    vs = ctx.act_iota(v, s)
    if vs is None:
        raise HypothesisFailed("v.s is not a twisted identity")
    if bruhat.is_full(ctx.enum(u), ctx.enum(vs)):
        raise HypothesisFailed("case I needs [u, v.s] not full")

    def rises(x):
        _, wsx = ctx.act(x, s)
        return not ctx.desc(x, s) and not wsx

    def pick(c):
        if vs in c:
            return None
        xc = max((x for x in c if rises(x)), default=u)
        y = ctx.act_iota(xc, s)
        if y is None or y not in ctx.inside:
            raise MatchingError(f"x_c.s leaves the open interval for chain {c}")
        return y

    return _build_matching(ctx.cells, pick)


def morse_inequalities_hold(m: MorseMatching, h: HomologyResult) -> bool:
    """Critical cells of dimension d bound betti_d (the empty cell has dimension -1)."""
    counts = m.critical_by_dimension()
    return all(counts.get(d, 0) >= h.betti_at(d) for d in h.degrees())
