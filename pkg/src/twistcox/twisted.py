"""Twisted involutions and twisted identities of a Coxeter system with a diagram involution.

The monoid action used throughout is::

    w.s = w s          if theta(s) w s == w
    w.s = theta(s) w s otherwise

and the orbit of e under it is the set of twisted involutions.  The rank
rho(w) is the length of a shortest expression e.s1.s2...sk = w; twisted
identities are the twisted involutions with length(w) == 2 rho(w).
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .coxeter import (
    DEFAULT_ELEMENT_BUDGET,
    INF,
    CoxeterSystem,
    GroupElement,
    TwistedAutomorphism,
    bruhat_leq,
    enumerate_elements,
    length,
    longest_element,
    multiply,
    reduced_word,
)
from .errors import (
    BudgetExceeded,
    InfiniteDihedralPair,
    InfiniteGroup,
    KBudget,
    NoPartition,
    NotComparable,
    NotTwistedInvolution,
    SubwordBudget,
    ThetaNotConjugationByW0,
    TruncationTooSmall,
)
from .poset import PosetElement, RankedPoset, index_string, leq_matrix_by_lifting

SUBWORD_MAX = 20


@dataclass(frozen=True)
class TwistedElement:
    element: GroupElement
    rho: int
    ell_theta: int
    sexpr: tuple  # canonical reduced S-expression, 0-based

    @property
    def length(self) -> int:
        return 2 * self.rho - self.ell_theta

    @property
    def is_identity_twisted(self) -> bool:
        return self.ell_theta == 0

    def sexpr_text(self) -> str:
        return index_string(self.sexpr, self.element.system.rank)


class TwistedSystem:
    """A Coxeter system together with an involutive diagram automorphism."""

    def __init__(self, system: CoxeterSystem, theta):
        self.system = system
        self.theta = system.automorphism(theta)
        self._ident = system._identity_key()

    def __repr__(self):
        return f"TwistedSystem({self.system!r}, theta={self.theta.perm})"

    # -- single-element operations ---------------------------------------
    def apply_theta(self, w: GroupElement) -> GroupElement:
        return GroupElement(self.system, self.system.automorphism_image_key(w.key, self.theta), w._length)

    def _act(self, key, s):
        """(payload of w.s, whether the ``w s`` branch was taken)."""
        sysm = self.system
        ws = sysm._right(key, s)
        tws = sysm._left(self.theta(s), ws)
        if tws == key:
            return ws, True
        return tws, False

    def twisted_action(self, w: GroupElement, s: int) -> GroupElement:
        self.system._check_index(s)
        return GroupElement(self.system, self._act(w.key, s)[0])

    def eval_sexpr(self, expr: Iterable[int]) -> GroupElement:
        key = self._ident
        for s in expr:
            self.system._check_index(s)
            key = self._act(key, s)[0]
        return GroupElement(self.system, key)

    def is_twisted_involution(self, w: GroupElement) -> bool:
        return multiply(self.apply_theta(w), w).key == self._ident

    def _require(self, w):
        if not self.is_twisted_involution(w):
            raise NotTwistedInvolution(f"{w!r} is not a twisted involution")

    def canonical_sexpr(self, w: GroupElement) -> tuple:
        """Reduced S-expression from repeatedly stripping the smallest right descent."""
        self._require(w)
        sysm = self.system
        key, out = w.key, []
        while key != self._ident:
            s = next(i for i in sysm.generators if sysm._descent(key, i))
            out.append(s)
            key = self._act(key, s)[0]
        return tuple(reversed(out))

    def rho(self, w: GroupElement) -> int:
        return len(self.canonical_sexpr(w))

    def ell_theta(self, w: GroupElement) -> int:
        return 2 * self.rho(w) - length(w)

    def is_twisted_identity(self, w: GroupElement) -> bool:
        return self.is_twisted_involution(w) and length(w) == 2 * self.rho(w)

    def twisted_element(self, w: GroupElement) -> TwistedElement:
        expr = self.canonical_sexpr(w)
        return TwistedElement(w, len(expr), 2 * len(expr) - length(w), expr)

    def element_from_sexpr(self, expr: Sequence[int]) -> TwistedElement:
        return self.twisted_element(self.eval_sexpr(expr))

    # -- structural predicates ------------------------------------------
    def has_nof(self) -> bool:
        """No odd flip: m(s, theta(s)) even or infinite whenever s != theta(s)."""
        m = self.system.matrix
        for s in self.system.generators:
            t = self.theta(s)
            if t != s and m[s, t] != INF and m[s, t] % 2 == 1:
                return False
        return True

    def nof_violations(self) -> list[tuple[int, int]]:
        m = self.system.matrix
        return [
            (s, self.theta(s)) for s in self.system.generators
            if s < self.theta(s) and m[s, self.theta(s)] != INF and m[s, self.theta(s)] % 2 == 1
        ]

    def fixed_subgroup_generators(self, require_all_finite: bool = False) -> list[GroupElement]:
        """Longest elements w_J for the orbits J = {s, theta(s)} with finite m(s, theta(s))."""
        out, seen = [], set()
        for s in self.system.generators:
            J = tuple(sorted({s, self.theta(s)}))
            if J in seen:
                continue
            seen.add(J)
            if len(J) == 2 and self.system.matrix[J] == INF:
                if require_all_finite:
                    raise InfiniteDihedralPair(f"m(s{J[0] + 1}, s{J[1] + 1}) is infinite")
                continue
            out.append(longest_element(self.system, J))
        return out

    def iota_from_group_element(self, w: GroupElement) -> TwistedElement:
        """theta(w^-1) w, a twisted identity."""
        return self.twisted_element(multiply(self.apply_theta(w.inverse()), w))

    # -- Bruhat order -----------------------------------------------------
    def bruhat_leq_twisted(self, u, v) -> bool:
        """Lifting recursion on the smallest descent of v."""
        u = u if isinstance(u, TwistedElement) else self.twisted_element(u)
        v = v if isinstance(v, TwistedElement) else self.twisted_element(v)
        sysm = self.system
        uk, vk, ru, rv = u.element.key, v.element.key, u.rho, v.rho
        while True:
            if ru > rv:
                return False
            if uk == self._ident:
                return True
            if ru == rv:
                return uk == vk
            s = next(i for i in sysm.generators if sysm._descent(vk, i))
            if sysm._descent(uk, s):
                uk = self._act(uk, s)[0]
                ru -= 1
            vk = self._act(vk, s)[0]
            rv -= 1

    def subword_check_bruteforce(self, u, v_expr: Sequence[int]) -> bool:
        """Does some subsequence of ``v_expr`` evaluate to u?

        Tracks the set of values of all subsequences of each prefix, which
        is the same search as listing the 2^k subsequences.
        """
        if len(v_expr) > SUBWORD_MAX:
            raise SubwordBudget("subword check", SUBWORD_MAX)
        target = u.element.key if isinstance(u, TwistedElement) else u.key
        reachable = {self._ident}
        for s in v_expr:
            reachable |= {self._act(x, s)[0] for x in reachable}
        return target in reachable

    def all_reduced_sexprs(self, w) -> list[tuple]:
        """Every reduced S-expression of a twisted involution (exponential)."""
        w = w.element if isinstance(w, TwistedElement) else w
        self._require(w)
        memo = {}

        def rec(key):
            if key not in memo:
                if key == self._ident:
                    memo[key] = [()]
                else:
                    memo[key] = sorted(
                        expr + (s,)
                        for s in self.system.generators if self.system._descent(key, s)
                        for expr in rec(self._act(key, s)[0])
                    )
            return memo[key]

        return rec(w.key)

    # -- enumeration -----------------------------------------------------
    def enumerate_twisted_involutions(self, max_rank: Optional[int] = None,
                                      budget: int = DEFAULT_ELEMENT_BUDGET) -> "TwistedEnumeration":
        """Breadth-first orbit of e under the S-action, layer by layer in rank."""
        if max_rank is None and not self.system.is_finite:
            raise InfiniteGroup("enumerating ALL twisted involutions needs a finite group")
        sysm = self.system
        gens = list(sysm.generators)
        keys = [self._ident]
        lengths = [0]
        exprs = [()]
        ranks = [0]
        index = {self._ident: 0}
        # per element: list over s of (target key, ws-branch, is-descent)
        moves: list[list] = []
        layer = [0]
        rank = 0
        complete = False
        while True:
            candidates = {}
            for i in layer:
                row = []
                for s in gens:
                    tgt, ws = self._act(keys[i], s)
                    d = sysm._descent(keys[i], s)
                    row.append((tgt, ws, d))
                    if not d and tgt not in candidates:
                        candidates[tgt] = lengths[i] + (1 if ws else 2)
                moves.append(row)
            if not candidates:
                complete = True
                break
            if max_rank is not None and rank >= max_rank:
                break
            if len(keys) + len(candidates) > budget:
                raise BudgetExceeded("twisted involution enumeration", budget)
            new = []
            for key, ell in candidates.items():
                s_min = next(s for s in gens if sysm._descent(key, s))
                parent = index[self._act(key, s_min)[0]]
                new.append((exprs[parent] + (s_min,), key, ell))
            new.sort()
            rank += 1
            layer = []
            for expr, key, ell in new:
                index[key] = len(keys)
                layer.append(len(keys))
                keys.append(key)
                lengths.append(ell)
                exprs.append(expr)
                ranks.append(rank)
        N = len(keys)
        act = np.full((len(gens), N), -1, dtype=np.int64)
        ws_branch = np.zeros((len(gens), N), dtype=bool)
        desc = np.zeros((len(gens), N), dtype=bool)
        for i, row in enumerate(moves):
            for s, (tgt, ws, d) in enumerate(row):
                act[s, i] = index.get(tgt, -1)
                ws_branch[s, i] = ws
                desc[s, i] = d
        elements = [
            TwistedElement(GroupElement(sysm, k, ell), r, 2 * r - ell, e)
            for k, ell, r, e in zip(keys, lengths, ranks, exprs)
        ]
        return TwistedEnumeration(self, elements, act, ws_branch, desc,
                                  None if complete else rank)

    def enumerate_twisted_identities(self, max_rank: Optional[int] = None,
                                     budget: int = DEFAULT_ELEMENT_BUDGET) -> list[TwistedElement]:
        enum = self.enumerate_twisted_involutions(max_rank, budget)
        idents = [enum.elements[i] for i in enum.iota]
        # descending along a descent stays inside iota
        for i in enum.iota:
            for s in self.system.generators:
                if enum.desc[s, i]:
                    assert enum.elements[enum.act[s, i]].ell_theta == 0
        return idents

    def fixed_subgroup_elements(self, budget: int = DEFAULT_ELEMENT_BUDGET) -> list[GroupElement]:
        """Fix(theta) = {w : theta(w) = w}, filtered from a full enumeration of W.

        theta-images are carried along the BFS: theta(w s) = theta(w) theta(s).
        """
        sysm = self.system
        layers = enumerate_elements(sysm, None, budget)
        image = {sysm._identity_key(): sysm._identity_key()}
        out = [sysm.identity()]
        for layer in layers.layers[1:]:
            for w in layer:
                s = next(i for i in sysm.generators if sysm._descent(w.key, i))
                parent = sysm._right(w.key, s)
                img = sysm._right(image[parent], self.theta(s))
                image[w.key] = img
                if img == w.key:
                    out.append(w)
        return out

    def dual_conjugacy_model(self, budget: int = DEFAULT_ELEMENT_BUDGET) -> list[GroupElement]:
        """{w0 u : u twisted identity}, checked to be the conjugacy class of w0.

        Needs theta(x) = w0 x w0.
        """
        sysm = self.system
        if not sysm.is_finite:
            raise InfiniteGroup("w0 exists only in finite groups")
        w0 = longest_element(sysm, sysm.generators)
        for s in sysm.generators:
            if multiply(multiply(w0, sysm.generator(s)), w0) != sysm.generator(self.theta(s)):
                raise ThetaNotConjugationByW0(f"theta(s{s + 1}) != w0 s{s + 1} w0")
        iota = self.enumerate_twisted_identities(budget=budget)
        image = {multiply(w0, u.element).key for u in iota}
        # conjugacy class of w0: closure under x -> s x s
        cls, queue = {w0.key}, deque([w0.key])
        while queue:
            x = queue.popleft()
            for s in sysm.generators:
                y = sysm._left(s, sysm._right(x, s))
                if y not in cls:
                    cls.add(y)
                    queue.append(y)
        if image != cls:
            raise AssertionError("w0 * iota differs from the conjugacy class of w0")
        out = [GroupElement(sysm, k) for k in cls]
        out.sort(key=lambda w: (length(w), reduced_word(w)))
        return out


class TwistedEnumeration:
    """Twisted involutions up to a rank, in (rank, canonical S-expression) order.

    ``act[s, i]`` is the index of element i acted on by s (-1 when that
    lies beyond the truncation), ``ws_branch[s, i]`` records whether the
    action multiplied on the right only, and ``desc[s, i]`` whether s is a
    right descent.
    """

    def __init__(self, ts, elements, act, ws_branch, desc, truncation_rank):
        self.ts = ts
        self.elements: list[TwistedElement] = elements
        self.act = act
        self.ws_branch = ws_branch
        self.desc = desc
        self.truncation_rank = truncation_rank
        self.index = {e.element.key: i for i, e in enumerate(elements)}
        self.iota = [i for i, e in enumerate(elements) if e.ell_theta == 0]

    def __len__(self):
        return len(self.elements)

    @property
    def complete(self) -> bool:
        return self.truncation_rank is None

    @property
    def rank_profile(self) -> list[int]:
        top = max(e.rho for e in self.elements)
        return [sum(1 for e in self.elements if e.rho == r) for r in range(top + 1)]

    def find(self, w) -> int:
        """Index of a group element / TwistedElement / S-expression."""
        if isinstance(w, TwistedElement):
            w = w.element
        elif not isinstance(w, GroupElement):
            w = self.ts.eval_sexpr(w)
        try:
            return self.index[w.key]
        except KeyError:
            if self.complete:
                raise NotTwistedInvolution(f"{w!r} is not a twisted involution") from None
            raise TruncationTooSmall(
                f"{w!r} is not among the twisted involutions of rank <= {self.truncation_rank}"
            ) from None


class TwistedBruhat:
    """Bruhat order on the (possibly truncated) twisted involutions.

    The order matrix is built once by the lifting recursion; the order on
    twisted identities is the induced one.
    """

    def __init__(self, ts: TwistedSystem, max_rank: Optional[int] = None,
                 budget: int = DEFAULT_ELEMENT_BUDGET):
        self.ts = ts
        self.enum = ts.enumerate_twisted_involutions(max_rank, budget)
        self.leq = leq_matrix_by_lifting(self.enum.act, self.enum.desc)
        self.iota = self.enum.iota
        self.in_iota = np.zeros(len(self.enum), dtype=bool)
        self.in_iota[self.iota] = True
        self.rho = np.array([e.rho for e in self.enum.elements], dtype=np.int64)
        self._posets = {}

    @property
    def truncation_rank(self):
        return self.enum.truncation_rank

    def find(self, w) -> int:
        return self.enum.find(w)

    def element(self, i) -> TwistedElement:
        return self.enum.elements[i]

    def interval(self, u: int, v: int, iota_only: bool = True) -> list[int]:
        """Indices of the closed interval [u, v]."""
        mask = self.leq[u, :] & self.leq[:, v]
        if iota_only:
            mask &= self.in_iota
        return [int(i) for i in np.flatnonzero(mask)]

    def is_full(self, u, v) -> bool:
        """No twisted involution outside iota lies in [u, v]."""
        u, v = self._idx(u), self._idx(v)
        if not self.leq[u, v]:
            raise NotComparable("is_full needs u <= v")
        mask = self.leq[u, :] & self.leq[:, v] & ~self.in_iota
        return not mask.any()

    def _idx(self, x) -> int:
        return x if isinstance(x, (int, np.integer)) else self.find(x)

    def poset(self, which: str = "iota") -> RankedPoset:
        """Br(iota) (``"iota"``) or Br(J) (``"inv"``) as a RankedPoset.

        Each PosetElement's payload is the index into the enumeration.
        """
        if which not in self._posets:
            idx = self.iota if which == "iota" else list(range(len(self.enum)))
            rank = self.ts.system.rank
            elements = []
            for i in idx:
                te = self.enum.elements[i]
                elements.append(PosetElement(
                    key=te.sexpr, sexpr=te.sexpr_text(),
                    word=index_string(reduced_word(te.element), rank),
                    rank=te.rho, length=te.length, payload=i,
                ))
            sub = self.leq[np.ix_(idx, idx)]
            self._posets[which] = RankedPoset(elements, sub, self.truncation_rank)
        return self._posets[which]

    def poset_index(self, i: int, which: str = "iota") -> int:
        p = self.poset(which)
        return p.index(self.enum.elements[i].sexpr)

    def enumeration_index(self, j: int, which: str = "iota") -> int:
        return self.poset(which).elements[j].payload

    def inv_covers(self, v: int) -> list[int]:
        """Elements covered by v in Br(J): one rank lower and below v."""
        r = self.rho[v]
        return [int(x) for x in np.flatnonzero(self.leq[:, v] & (self.rho == r - 1))]

    def lemma_cover_violations(self) -> list[tuple[int, list[int]]]:
        """Elements of twisted absolute length 1 covering more than one twisted identity."""
        out = []
        for v, te in enumerate(self.enum.elements):
            if te.ell_theta == 1:
                below = [x for x in self.inv_covers(v) if self.in_iota[x]]
                if len(below) > 1:
                    out.append((v, below))
        return out


def find_commuting_partition(ts: TwistedSystem) -> tuple[list[int], list[int], list[int]]:
    """S = S1 + S2 + S3 with theta(S1) = S2, S3 the fixed points, each part commuting."""
    m = ts.system.matrix
    gens = list(ts.system.generators)
    S3 = [s for s in gens if ts.theta(s) == s]
    orbits = sorted({tuple(sorted((s, ts.theta(s)))) for s in gens if ts.theta(s) != s})

    def commuting(part):
        return all(m[a, b] == 2 for a, b in itertools.combinations(part, 2))

    if not commuting(S3):
        raise NoPartition("the theta-fixed generators do not commute pairwise")
    for choice in itertools.product((0, 1), repeat=len(orbits)):
        S1 = sorted(orb[c] for orb, c in zip(orbits, choice))
        if commuting(S1):
            return S1, sorted(ts.theta(s) for s in S1), S3
    raise NoPartition("no commuting choice of S1")


def coxeter_power_upper_bound(ts: TwistedSystem, u, v, partition=None, k_max: int = 20) -> tuple[int, TwistedElement]:
    """Smallest k <= k_max with c^(2k) >= u, v, where c = w_S1 w_S3 w_S2.

    c^(2k) = theta(c^-k) c^k is a twisted identity; returns (k, c^(2k)).
    """
    if ts.system.is_finite:
        raise NoPartition("the Coxeter-power bound is for infinite groups")
    S1, S2, S3 = partition or find_commuting_partition(ts)
    if sorted(ts.theta(s) for s in S1) != sorted(S2) or any(ts.theta(s) != s for s in S3):
        raise NoPartition("partition is not compatible with theta")
    if sorted(S1 + S2 + S3) != list(ts.system.generators):
        raise NoPartition("partition does not cover S")
    c = coxeter_element(ts.system, S1, S2, S3)
    u = u.element if isinstance(u, TwistedElement) else u
    v = v.element if isinstance(v, TwistedElement) else v
    power = ts.system.identity()
    for k in range(1, k_max + 1):
        power = multiply(multiply(power, c), c)
        if bruhat_leq(u, power) and bruhat_leq(v, power):
            return k, ts.twisted_element(power)
    raise KBudget("Coxeter power search", k_max)


def coxeter_element(system: CoxeterSystem, S1, S2, S3) -> GroupElement:
    return system.element(list(S1) + list(S3) + list(S2))
