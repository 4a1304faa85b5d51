"""Exact arithmetic in Coxeter groups.

Elements of crystallographic systems are integer matrices of the action
on the root lattice (simple-root basis).  Rank-two systems with a label
outside {2, 3, 4, 6, inf} use a dihedral normal form instead: the pair
``(k, a)`` stands for the alternating word of length ``k`` starting with
generator ``a``.

Generator indices are 0-based everywhere in the API; the text syntax
used by the CLI and the exporters is 1-based.
"""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from . import classify
from .errors import (
    BackendMismatch,
    BudgetExceeded,
    InfiniteGroup,
    InfiniteParabolic,
    InvalidAutomorphism,
    MalformedMatrix,
    NonCrystallographic,
)

INF = math.inf
CRYSTALLOGRAPHIC = (2, 3, 4, 6, INF)
DEFAULT_ELEMENT_BUDGET = 10**6

# Cartan companion (a_ij, a_ji) for i < j.
_CARTAN_PAIR = {2: (0, 0), 3: (-1, -1), 4: (-1, -2), 6: (-1, -3), INF: (-2, -2)}


@dataclass(frozen=True)
class CoxeterMatrix:
    """Symmetric Coxeter matrix; ``math.inf`` marks an infinite label."""

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(INF if x == INF else int(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        n = len(rows)
        if n == 0:
            raise MalformedMatrix("Coxeter matrix must have size >= 1")
        for i, row in enumerate(rows):
            if len(row) != n:
                raise MalformedMatrix("Coxeter matrix must be square")
            if row[i] != 1:
                raise MalformedMatrix(f"diagonal entry m({i},{i}) must be 1")
            for j, x in enumerate(row):
                if x != rows[j][i]:
                    raise MalformedMatrix(f"m({i},{j}) != m({j},{i})")
                if i != j and x != INF and x < 2:
                    raise MalformedMatrix(f"off-diagonal m({i},{j}) must be >= 2")

    @classmethod
    def from_file_encoding(cls, rows) -> "CoxeterMatrix":
        """Build from the JSON encoding where ``0`` means infinity."""
        return cls(tuple(tuple(INF if x == 0 else x for x in row) for row in rows))

    def to_file_encoding(self) -> list[list[int]]:
        return [[0 if x == INF else x for x in row] for row in self.entries]

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def crystallographic(self) -> bool:
        n = self.size
        return all(self.entries[i][j] in CRYSTALLOGRAPHIC for i in range(n) for j in range(n) if i != j)


@dataclass(frozen=True)
class TwistedAutomorphism:
    """Involutive permutation of the generators preserving the Coxeter matrix."""

    perm: tuple

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(int(x) for x in self.perm))

    def __call__(self, i: int) -> int:
        return self.perm[i]

    def __len__(self):
        return len(self.perm)

    @classmethod
    def identity(cls, n: int) -> "TwistedAutomorphism":
        return cls(tuple(range(n)))

    @property
    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.perm))


class CoxeterSystem:
    def __init__(self, matrix: CoxeterMatrix, name: Optional[str] = None):
        if not isinstance(matrix, CoxeterMatrix):
            matrix = CoxeterMatrix(matrix)
        self.matrix = matrix
        self.rank = n = matrix.size
        self.name = name
        if n == 2 and matrix[0, 1] not in CRYSTALLOGRAPHIC:
            self.backend = "dihedral"
            self.dihedral_m = int(matrix[0, 1])
            self.cartan = None
            self.generator_matrices = None
        else:
            if not matrix.crystallographic:
                raise NonCrystallographic(
                    "rank >= 3 systems need labels in {2, 3, 4, 6, inf}"
                )
            self.backend = "matrix"
            cartan = [[0] * n for _ in range(n)]
            for i in range(n):
                cartan[i][i] = 2
                for j in range(i + 1, n):
                    cartan[i][j], cartan[j][i] = _CARTAN_PAIR[matrix[i, j]]
            self.cartan = tuple(tuple(r) for r in cartan)
            # nonzero entries of row i, used by right multiplication
            self._row_nz = [[(j, a) for j, a in enumerate(row) if a] for row in self.cartan]
            self.generator_matrices = tuple(self._gen_key(i) for i in range(n))
        self.finite_type = classify.finite_type(matrix.entries)
        self._identity = GroupElement(self, self._identity_key(), 0)

    def __repr__(self):
        return f"CoxeterSystem({self.name or self.matrix.entries!r})"

    def __eq__(self, other):
        return isinstance(other, CoxeterSystem) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    @property
    def is_finite(self) -> bool:
        return self.finite_type is not None

    @property
    def generators(self) -> range:
        return range(self.rank)

    # -- payload arithmetic ------------------------------------------------
    def _identity_key(self):
        if self.backend == "dihedral":
            return (0, 0)
        n = self.rank
        return tuple(1 if r == c else 0 for r in range(n) for c in range(n))

    def _gen_key(self, i):
        if self.backend == "dihedral":
            return (1, i)
        n = self.rank
        rows = [[int(r == c) for c in range(n)] for r in range(n)]
        rows[i] = [int(i == c) - self.cartan[i][c] for c in range(n)]
        return tuple(x for row in rows for x in row)

    def _dihedral_norm(self, k, a):
        if k == 0 or k == self.dihedral_m:
            return (k, 0)
        return (k, a)

    def _right(self, key, i):
        """Payload of ``w * s_i``."""
        if self.backend == "dihedral":
            k, a = key
            m = self.dihedral_m
            if k == 0:
                return (1, i)
            if k == m:
                # w0 ends in every letter; drop i from the word ending in i
                start = i if m % 2 else 1 - i
                return self._dihedral_norm(m - 1, start)
            last = a if k % 2 else 1 - a
            if last == i:
                return self._dihedral_norm(k - 1, a)
            return self._dihedral_norm(k + 1, a)
        n = self.rank
        new = list(key)
        for r in range(n):
            wi = key[r * n + i]
            if wi:
                base = r * n
                for j, aij in self._row_nz[i]:
                    new[base + j] -= wi * aij
        return tuple(new)

    def _left(self, i, key):
        """Payload of ``s_i * w``."""
        if self.backend == "dihedral":
            k, a = key
            m = self.dihedral_m
            if k == 0:
                return (1, i)
            if k == m or a == i:
                return self._dihedral_norm(k - 1, 1 - i)
            return self._dihedral_norm(k + 1, i)
        n = self.rank
        new = list(key)
        for c in range(n):
            new[i * n + c] = key[i * n + c] - sum(aij * key[j * n + c] for j, aij in self._row_nz[i])
        return tuple(new)

    def _descent(self, key, i) -> bool:
        if self.backend == "dihedral":
            k, a = key
            if k == 0:
                return False
            if k == self.dihedral_m:
                return True
            return (a if k % 2 else 1 - a) == i
        n = self.rank
        # column i is w(alpha_i), a root: all coordinates share a sign
        for r in range(n):
            x = key[r * n + i]
            if x:
                return x < 0
        raise AssertionError("zero column in a reflection-representation matrix")

    def _mul(self, k1, k2):
        if self.backend == "dihedral":
            out = k1
            for s in self._dihedral_word(k2):
                out = self._right(out, s)
            return out
        n = self.rank
        return tuple(
            sum(k1[r * n + t] * k2[t * n + c] for t in range(n))
            for r in range(n)
            for c in range(n)
        )

    def _dihedral_word(self, key):
        k, a = key
        return [a if t % 2 == 0 else 1 - a for t in range(k)]

    # -- element constructors ----------------------------------------------
    def identity(self) -> "GroupElement":
        return self._identity

    def generator(self, i: int) -> "GroupElement":
        self._check_index(i)
        return GroupElement(self, self._gen_key(i), 1)

    def element(self, word: Iterable[int]) -> "GroupElement":
        """Evaluate a word in the generators (0-based indices)."""
        key = self._identity_key()
        for s in word:
            self._check_index(s)
            key = self._right(key, s)
        return GroupElement(self, key)

    def _check_index(self, i):
        if not 0 <= i < self.rank:
            raise IndexError(f"generator index {i} out of range for rank {self.rank}")

    def automorphism_image_key(self, key, theta: TwistedAutomorphism):
        """Payload of theta(w)."""
        if theta.is_identity:
            return key
        if self.backend == "dihedral":
            k, a = key
            return self._dihedral_norm(k, 1 - a) if theta(0) == 1 else key
        n = self.rank
        p = theta.perm
        if self._cartan_invariant(theta):
            new = [0] * (n * n)
            for r in range(n):
                for c in range(n):
                    new[p[r] * n + p[c]] = key[r * n + c]
            return tuple(new)
        out = self._identity_key()
        for s in reduced_word(GroupElement(self, key)):
            out = self._right(out, p[s])
        return out

    def _cartan_invariant(self, theta) -> bool:
        cache = self.__dict__.setdefault("_cartan_inv_cache", {})
        if theta.perm not in cache:
            p, n = theta.perm, self.rank
            cache[theta.perm] = all(
                self.cartan[p[i]][p[j]] == self.cartan[i][j] for i in range(n) for j in range(n)
            )
        return cache[theta.perm]

    def check_automorphism(self, theta: Sequence[int]) -> bool:
        p = tuple(theta)
        n = self.rank
        if sorted(p) != list(range(n)):
            return False
        if any(p[p[i]] != i for i in range(n)):
            return False
        return all(self.matrix[p[i], p[j]] == self.matrix[i, j] for i in range(n) for j in range(n))

    def automorphism(self, theta) -> TwistedAutomorphism:
        if not isinstance(theta, TwistedAutomorphism):
            theta = TwistedAutomorphism(tuple(theta))
        if len(theta) != self.rank or not self.check_automorphism(theta.perm):
            raise InvalidAutomorphism(f"{theta.perm} is not an involutive diagram automorphism")
        return theta


class GroupElement:
    """Immutable group element; equality and hashing go through the payload."""

    __slots__ = ("system", "key", "_length")

    def __init__(self, system: CoxeterSystem, key, length: Optional[int] = None):
        self.system = system
        self.key = key
        self._length = length

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.key == other.key and (self.system is other.system or self.system == other.system)

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        word = "".join(str(s + 1) for s in reduced_word(self)) if self.system.rank <= 9 else " ".join(
            str(s + 1) for s in reduced_word(self)
        )
        return f"<{word or 'e'}>"

    def __mul__(self, other):
        return multiply(self, other)

    @property
    def is_identity(self) -> bool:
        return self.key == self.system._identity_key()

    def right(self, s: int) -> "GroupElement":
        """``self * s`` with the length cache carried forward when known."""
        key = self.system._right(self.key, s)
        length = None
        if self._length is not None:
            length = self._length - 1 if self.system._descent(self.key, s) else self._length + 1
        return GroupElement(self.system, key, length)

    def left(self, s: int) -> "GroupElement":
        return GroupElement(self.system, self.system._left(s, self.key))

    def inverse(self) -> "GroupElement":
        out = self.system.identity()
        for s in reversed(reduced_word(self)):
            out = out.right(s)
        return out

    def length(self) -> int:
        return length(self)

    def descents(self) -> list[int]:
        return [s for s in self.system.generators if self.system._descent(self.key, s)]

    def reduced_word(self) -> list[int]:
        return reduced_word(self)


def _same_system(u: GroupElement, v: GroupElement):
    if u.system is not v.system and u.system != v.system:
        raise BackendMismatch("elements belong to different Coxeter systems")


def build_system(matrix, name: Optional[str] = None) -> CoxeterSystem:
    """Construct a Coxeter system from a :class:`CoxeterMatrix` or nested rows."""
    if not isinstance(matrix, CoxeterMatrix):
        matrix = CoxeterMatrix(tuple(tuple(r) for r in matrix))
    return CoxeterSystem(matrix, name=name)


def multiply(w: GroupElement, v: GroupElement) -> GroupElement:
    _same_system(w, v)
    return GroupElement(w.system, w.system._mul(w.key, v.key))


def is_right_descent(w: GroupElement, s: int) -> bool:
    w.system._check_index(s)
    return w.system._descent(w.key, s)


def length(w: GroupElement) -> int:
    """Coxeter length, by stripping right descents down to the identity."""
    if w._length is None:
        sysm = w.system
        if sysm.backend == "dihedral":
            w._length = w.key[0]
        else:
            key, steps = w.key, 0
            ident = sysm._identity_key()
            while key != ident:
                s = next(i for i in sysm.generators if sysm._descent(key, i))
                key = sysm._right(key, s)
                steps += 1
            w._length = steps
    return w._length


def reduced_word(w: GroupElement) -> list[int]:
    """Canonical reduced word: repeatedly strip the smallest right descent."""
    sysm = w.system
    key = w.key
    ident = sysm._identity_key()
    word = []
    while key != ident:
        s = next(i for i in sysm.generators if sysm._descent(key, i))
        word.append(s)
        key = sysm._right(key, s)
    word.reverse()
    if w._length is None:
        w._length = len(word)
    return word


def bruhat_leq(u: GroupElement, v: GroupElement) -> bool:
    """Bruhat comparison by the lifting recursion on the smallest descent of v."""
    _same_system(u, v)
    sysm = u.system
    lu, lv = length(u), length(v)
    uk, vk = u.key, v.key
    ident = sysm._identity_key()
    while True:
        if lu > lv:
            return False
        if uk == ident:
            return True
        if lu == lv:
            return uk == vk
        s = next(i for i in sysm.generators if sysm._descent(vk, i))
        if sysm._descent(uk, s):
            uk = sysm._right(uk, s)
            lu -= 1
        vk = sysm._right(vk, s)
        lv -= 1


def longest_element(system: CoxeterSystem, J: Iterable[int]) -> GroupElement:
    """Longest element of the finite parabolic subgroup W_J, by greedy ascent."""
    J = sorted(set(J))
    if classify.finite_type(system.matrix.entries, J) is None:
        raise InfiniteParabolic(f"W_J is infinite for J={[j + 1 for j in J]}")
    w = system.identity()
    while True:
        up = [s for s in J if not is_right_descent(w, s)]
        if not up:
            return w
        w = w.right(up[0])


class ElementLayers:
    """Result of a breadth-first enumeration, grouped by Coxeter length."""

    def __init__(self, system, layers, complete):
        self.system = system
        self.layers: list[list[GroupElement]] = layers
        self.complete = complete
        self._index = None

    def __iter__(self):
        return itertools.chain.from_iterable(self.layers)

    def __len__(self):
        return sum(len(layer) for layer in self.layers)

    def __contains__(self, w):
        return w.key in self.index

    @property
    def profile(self) -> list[int]:
        return [len(layer) for layer in self.layers]

    @property
    def elements(self) -> list[GroupElement]:
        return list(self)

    @property
    def index(self) -> dict:
        if self._index is None:
            self._index = {w.key: i for i, w in enumerate(self)}
        return self._index

    def action_tables(self):
        """(act, desc) arrays: ``act[s, i]`` indexes element i times s, -1 if not enumerated."""
        import numpy as np

        elems = self.elements
        n = self.system.rank
        act = np.full((n, len(elems)), -1, dtype=np.int64)
        desc = np.zeros((n, len(elems)), dtype=bool)
        idx = self.index
        for i, w in enumerate(elems):
            for s in range(n):
                desc[s, i] = self.system._descent(w.key, s)
                act[s, i] = idx.get(self.system._right(w.key, s), -1)
        return act, desc


def enumerate_elements(system: CoxeterSystem, max_length: Optional[int] = None,
                       budget: int = DEFAULT_ELEMENT_BUDGET) -> ElementLayers:
    """Breadth-first closure of {e} under right multiplication.

    ``max_length=None`` means ALL and needs a recognised finite type.
    Layers are sorted by payload so the output is deterministic.
    """
    if max_length is None and not system.is_finite:
        raise InfiniteGroup("enumerating ALL elements needs a finite Coxeter group")
    e = system.identity()
    layers = [[e]]
    seen = {e.key}
    count = 1
    ell = 0
    while max_length is None or ell < max_length:
        nxt = {}
        for w in layers[-1]:
            for s in system.generators:
                if system._descent(w.key, s):
                    continue
                key = system._right(w.key, s)
                if key not in seen and key not in nxt:
                    nxt[key] = GroupElement(system, key, ell + 1)
        if not nxt:
            return ElementLayers(system, layers, True)
        count += len(nxt)
        if count > budget:
            raise BudgetExceeded("element enumeration", budget)
        seen.update(nxt)
        layers.append([nxt[k] for k in sorted(nxt)])
        ell += 1
    return ElementLayers(system, layers, False)


def generator_conjugacy_classes(system: CoxeterSystem) -> list[list[int]]:
    """Partition of S into conjugacy classes: components of the odd-label graph."""
    n = system.rank
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            m = system.matrix[i, j]
            if m != INF and m % 2 == 1:
                parent[find(i)] = find(j)
    classes: dict[int, list[int]] = {}
    for i in range(n):
        classes.setdefault(find(i), []).append(i)
    return sorted(classes.values())


def reflections(system: CoxeterSystem, budget: int = DEFAULT_ELEMENT_BUDGET) -> set:
    """The reflection set T = {w s w^-1} of a finite group, as payloads."""
    if not system.is_finite:
        raise InfiniteGroup("reflection set of an infinite group is infinite")
    out = set()
    for w in enumerate_elements(system, budget=budget):
        winv = w.inverse()
        for s in system.generators:
            out.add(multiply(w.right(s), winv).key)
    return out


def absolute_length(w: GroupElement, budget: int = DEFAULT_ELEMENT_BUDGET) -> int:
    """Distance from e to w in the Cayley graph on the reflections."""
    system = w.system
    if not system.is_finite:
        raise InfiniteGroup("absolute length is computed only for finite groups")
    T = sorted(reflections(system, budget))
    start = system._identity_key()
    if w.key == start:
        return 0
    dist = {start: 0}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for t in T:
            y = system._mul(x, t)
            if y not in dist:
                dist[y] = dist[x] + 1
                if y == w.key:
                    return dist[y]
                queue.append(y)
    raise AssertionError("element not reached by reflection BFS")


def square_with_swap(inner: CoxeterSystem) -> tuple[CoxeterSystem, TwistedAutomorphism]:
    """W x W with the automorphism swapping the two factors."""
    n = inner.rank
    rows = [[2] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            rows[i][j] = inner.matrix[i, j]
            rows[n + i][n + j] = inner.matrix[i, j]
    name = f"square({inner.name})" if inner.name else None
    system = build_system(rows, name=name)
    theta = TwistedAutomorphism(tuple(list(range(n, 2 * n)) + list(range(n))))
    return system, theta


def all_reduced_words(w: GroupElement) -> list[tuple[int, ...]]:
    """Every reduced word of w (exponential; for small oracles)."""
    memo: dict = {}

    def rec(key):
        if key in memo:
            return memo[key]
        if key == w.system._identity_key():
            memo[key] = [()]
            return memo[key]
        out = []
        for s in w.system.generators:
            if w.system._descent(key, s):
                for word in rec(w.system._right(key, s)):
                    out.append(word + (s,))
        memo[key] = sorted(out)
        return memo[key]

    return rec(w.key)


def subword_leq_bruteforce(u: GroupElement, v: GroupElement) -> bool:
    """Bruhat order straight from the subword definition, over all reduced words of v."""
    _same_system(u, v)
    system = u.system
    for word in all_reduced_words(v):
        reachable = {system._identity_key()}
        for s in word:
            reachable |= {system._right(x, s) for x in reachable}
        if u.key not in reachable:
            return False
    return True
