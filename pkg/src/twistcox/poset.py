"""Finite ranked posets: covers, gradedness, Moebius function, export."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import InconsistentRanks, NotComparable


@dataclass(frozen=True)
class PosetElement:
    """Labels carried by a poset element.

    ``key`` is the canonical index sequence (0-based) that fixes the
    element order; ``sexpr`` and ``word`` are the 1-based text forms.
    """

    key: tuple
    sexpr: str
    word: str
    rank: int
    length: int
    payload: object = field(default=None, compare=False, repr=False)


def index_string(seq: Sequence[int], rank: int) -> str:
    """1-based index text: digits when there are at most 9 generators."""
    if rank <= 9:
        return "".join(str(s + 1) for s in seq)
    return " ".join(str(s + 1) for s in seq)


def parse_index_string(text: str, rank: int) -> list[int]:
    text = text.strip()
    if text in ("", "e"):
        return []
    parts = text.split() if (" " in text or rank > 9) else list(text)
    out = [int(p) - 1 for p in parts]
    if any(not 0 <= s < rank for s in out):
        raise ValueError(f"index out of range in {text!r}")
    return out


def leq_matrix_by_lifting(act: np.ndarray, desc: np.ndarray) -> np.ndarray:
    """Bruhat-type order from the lifting recursion, for all pairs at once.

    ``act[s, x]`` is the index of ``x`` acted on by generator ``s`` and
    ``desc[s, x]`` says whether ``s`` is a descent of ``x``.  Indices must
    be a linear extension by rank with the minimum at 0.  For a descent
    ``s`` of ``v``: ``x <= v`` iff ``x.s <= v.s`` when ``s`` is a descent of
    ``x``, and ``x <= v.s`` otherwise.  Returns ``leq[x, v]``.
    """
    n_gens, N = desc.shape
    down = np.zeros((N, N), dtype=bool)
    down[0, 0] = True
    safe = np.where(desc, act, 0)
    first_desc = np.argmax(desc, axis=0)
    for v in range(1, N):
        s = first_desc[v]
        if not desc[s, v]:
            raise ValueError(f"element {v} has no descent but is not the minimum")
        row = down[act[s, v]]
        down[v] = np.where(desc[s], row[safe[s]], row)
    return down.T.copy()


class RankedPoset:
    """Finite poset with a rank function, stored as a dense order matrix.

    Elements are kept sorted by ``(rank, key)``; that order is a linear
    extension and is also the id order used by the exporters.
    """

    def __init__(self, elements: Sequence[PosetElement], leq: np.ndarray,
                 truncation_rank: Optional[int] = None, check: bool = True):
        order = sorted(range(len(elements)), key=lambda i: (elements[i].rank, elements[i].key))
        self.elements = [elements[i] for i in order]
        leq = np.asarray(leq, dtype=bool)[np.ix_(order, order)]
        self.leq = leq
        self.rank = np.array([e.rank for e in self.elements], dtype=np.int64)
        self.truncation_rank = truncation_rank
        N = len(self.elements)
        strict = leq & ~np.eye(N, dtype=bool)
        if check:
            bad = np.argwhere(strict & (self.rank[:, None] >= self.rank[None, :]))
            if len(bad):
                i, j = bad[0]
                raise InconsistentRanks(
                    f"{self.elements[i].sexpr or 'e'} < {self.elements[j].sexpr or 'e'} but ranks "
                    f"{self.rank[i]} >= {self.rank[j]}"
                )
        s = strict.astype(np.float32)
        self.cover = strict & ~((s @ s) > 0)
        self.covers = [tuple(int(x) for x in p) for p in np.argwhere(self.cover)]
        self.covers.sort(key=lambda p: (p[1], p[0]))
        self._lower = [[] for _ in range(N)]
        self._upper = [[] for _ in range(N)]
        for a, b in self.covers:
            self._lower[b].append(a)
            self._upper[a].append(b)
        self._index = {e.key: i for i, e in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def index(self, key) -> int:
        return self._index[tuple(key)]

    def lower_covers(self, i) -> list[int]:
        return self._lower[i]

    def upper_covers(self, i) -> list[int]:
        return self._upper[i]

    def less(self, i, j) -> bool:
        return i != j and bool(self.leq[i, j])

    @property
    def minimum(self) -> int:
        mins = [i for i in range(len(self)) if self.leq[i].all()]
        if len(mins) != 1:
            raise ValueError("poset has no unique minimum")
        return mins[0]

    def label(self, i) -> str:
        return self.elements[i].sexpr or "e"

    def is_partial_order(self, sample: int = 200, seed: int = 0) -> bool:
        """Reflexive, antisymmetric, transitive: exhaustive up to ``sample`` elements."""
        L = self.leq
        N = len(self)
        if not L.diagonal().all():
            return False
        if (L & L.T & ~np.eye(N, dtype=bool)).any():
            return False
        if N <= sample:
            f = L.astype(np.float32)
            return not (((f @ f) > 0) & ~L).any()
        rng = random.Random(seed)
        for _ in range(sample * sample):
            a, b, c = rng.randrange(N), rng.randrange(N), rng.randrange(N)
            if L[a, b] and L[b, c] and not L[a, c]:
                return False
        return True


def build_poset(elements: Sequence[PosetElement],
                leq: Union[np.ndarray, Callable[[int, int], bool]],
                truncation_rank: Optional[int] = None) -> RankedPoset:
    """Poset from labelled elements and either an order matrix or an oracle."""
    if callable(leq):
        N = len(elements)
        leq = np.array([[bool(leq(i, j)) for j in range(N)] for i in range(N)], dtype=bool)
    return RankedPoset(elements, leq, truncation_rank)


@dataclass
class GradednessReport:
    graded: bool
    witness: Optional[tuple[list[int], list[int]]] = None

    def describe(self, p: RankedPoset) -> str:
        if self.graded:
            return "graded"
        a, b = self.witness
        fmt = lambda c: " < ".join(p.label(i) for i in c)
        return f"not graded: {fmt(a)} (length {len(a) - 1}) vs {fmt(b)} (length {len(b) - 1})"


def check_graded(p: RankedPoset) -> GradednessReport:
    """Graded iff all saturated chains from the minimum to each x have one length.

    With a minimum, this is equivalent to every interval having maximal
    chains of a single length.  The witness is the first offending element
    in id order, with its shortest and longest saturated chains.
    """
    bottom = p.minimum
    lengths: list[set[int]] = [set() for _ in range(len(p))]
    lengths[bottom] = {0}
    for x in range(len(p)):
        for y in p.lower_covers(x):
            lengths[x].update(l + 1 for l in lengths[y])
    for x in range(len(p)):
        if len(lengths[x]) > 1:
            lo, hi = min(lengths[x]), max(lengths[x])
            return GradednessReport(False, (_chain_of_length(p, lengths, x, lo),
                                            _chain_of_length(p, lengths, x, hi)))
    return GradednessReport(True)


def _chain_of_length(p, lengths, top, k) -> list[int]:
    chain = [top]
    x = top
    while k > 0:
        x = next(y for y in p.lower_covers(x) if (k - 1) in lengths[y])
        chain.append(x)
        k -= 1
    return chain[::-1]


def mobius(p: RankedPoset, u: int, v: int) -> int:
    """mu(u, v) by the defining recursion (memoised per call)."""
    if not p.leq[u, v]:
        raise NotComparable(f"{p.label(u)} is not below {p.label(v)}")
    between = [w for w in range(len(p)) if p.leq[u, w] and p.leq[w, v]]

    @lru_cache(maxsize=None)
    def mu(w):
        if w == u:
            return 1
        return -sum(mu(x) for x in between if x != w and p.leq[x, w])

    return mu(v)


def mobius_matrix(p: RankedPoset) -> np.ndarray:
    """All Moebius values at once as the inverse of the zeta matrix.

    The float inverse is rounded and then certified exactly: entries are
    small integers, so the float product zeta @ mu is exact and must be I.
    """
    from scipy.linalg import solve_triangular

    N = len(p)
    zeta = p.leq.astype(np.float64)
    mu = np.rint(solve_triangular(zeta, np.eye(N), lower=False, unit_diagonal=True))
    if np.abs(mu).max() > 2**20 or not np.array_equal(zeta @ mu, np.eye(N)):
        raise ArithmeticError("Moebius inversion could not be certified exactly")
    return mu.astype(np.int64)


def maximal_elements(p: RankedPoset) -> list[int]:
    return [i for i in range(len(p)) if not p.upper_covers(i)]


@dataclass
class DirectednessReport:
    """Pairs with a common upper bound inside the poset, and the rest.

    When the poset is a rank truncation the rest are only "unknown":
    a bound may exist above the truncation rank.
    """

    bounded: int
    missing: list[tuple[int, int]]
    complete: bool
    matrix: np.ndarray = field(repr=False)

    @property
    def unknown(self) -> int:
        return 0 if self.complete else len(self.missing)

    @property
    def unbounded(self) -> int:
        return len(self.missing) if self.complete else 0

    def status(self, i: int, j: int) -> str:
        if self.matrix[i, j]:
            return "bounded"
        return "unbounded" if self.complete else "unknown"


def directedness_within(p: RankedPoset) -> DirectednessReport:
    up = p.leq.astype(np.float32)
    has_bound = (up @ up.T) > 0
    iu = np.triu_indices(len(p), 1)
    ok = has_bound[iu]
    missing = [(int(a), int(b)) for a, b in zip(iu[0][~ok], iu[1][~ok])]
    return DirectednessReport(int(ok.sum()), missing, p.truncation_rank is None, has_bound)


def export_dot(p: RankedPoset, name: str = "poset") -> str:
    lines = [f"digraph {json.dumps(name)} {{", "  rankdir=BT;", "  node [shape=plaintext];"]
    for r in sorted(set(int(x) for x in p.rank)):
        ids = [i for i in range(len(p)) if p.rank[i] == r]
        nodes = " ".join(f"n{i} [label={json.dumps(p.label(i))}];" for i in ids)
        lines.append(f"  {{ rank=same; {nodes} }}")
    for a, b in p.covers:
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_json(p: RankedPoset) -> str:
    data = {
        "elements": [
            {"id": i, "sexpr": e.sexpr, "word": e.word, "rank": e.rank, "length": e.length}
            for i, e in enumerate(p.elements)
        ],
        "covers": [[a, b] for a, b in p.covers],
    }
    if p.truncation_rank is not None:
        data["truncation_rank"] = p.truncation_rank
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def poset_from_json(text: str) -> RankedPoset:
    """Rebuild a poset from :func:`export_json` output (order = closure of covers)."""
    data = json.loads(text)
    elems = data["elements"]
    N = len(elems)
    # the key only has to reproduce the exported id order within a rank
    elements = [
        PosetElement(key=(e["id"],), sexpr=e["sexpr"], word=e["word"], rank=e["rank"], length=e["length"])
        for e in elems
    ]
    leq = np.eye(N, dtype=bool)
    for a, b in data["covers"]:
        leq[a, b] = True
    # transitive closure by repeated squaring
    f = leq.astype(np.float32)
    while True:
        nxt = (f @ f) > 0
        if np.array_equal(nxt, f > 0):
            break
        f = nxt.astype(np.float32)
    return RankedPoset(elements, f > 0, data.get("truncation_rank"))
