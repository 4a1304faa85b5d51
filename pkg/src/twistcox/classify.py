"""Recognition of finite Coxeter types from a Coxeter matrix.

Each connected component of the Coxeter graph is matched against the
classification of connected positive-definite diagrams (A, B, D, E, F,
H, I2).  Anything else is treated as infinite.
"""
from __future__ import annotations

import math
from typing import Optional, Sequence

INF = math.inf


def components(m: Sequence[Sequence[float]], nodes: Optional[Sequence[int]] = None) -> list[list[int]]:
    """Connected components of the Coxeter graph (edges where m >= 3)."""
    nodes = list(range(len(m))) if nodes is None else sorted(nodes)
    allowed = set(nodes)
    seen: set[int] = set()
    comps = []
    for start in nodes:
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in allowed:
                if j not in seen and m[i][j] != 2:
                    seen.add(j)
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def _classify_connected(m, comp: list[int]) -> Optional[str]:
    n = len(comp)
    if n == 1:
        return "A1"
    if n == 2:
        label = m[comp[0]][comp[1]]
        if label == INF:
            return None
        return {3: "A2", 4: "B2", 6: "G2"}.get(int(label), f"I2({int(label)})")
    edges = {}
    for a in range(n):
        for b in range(a + 1, n):
            label = m[comp[a]][comp[b]]
            if label != 2:
                edges[(a, b)] = label
    if len(edges) != n - 1:  # connected, so this means a cycle
        return None
    if any(label == INF or label > 5 for label in edges.values()):
        return None
    heavy = [e for e, label in edges.items() if label != 3]
    degree = [0] * n
    for a, b in edges:
        degree[a] += 1
        degree[b] += 1
    if max(degree) > 3:
        return None
    branch = [i for i in range(n) if degree[i] == 3]

    if not heavy:
        if not branch:
            return f"A{n}"
        if len(branch) > 1:
            return None
        arms = sorted(_arm_lengths(edges, n, branch[0]))
        if arms[0] == 1 and arms[1] == 1:
            return f"D{n}"
        if arms[:2] == [1, 2] and arms[2] in (2, 3, 4):
            return f"E{n}"
        return None

    if len(heavy) > 1 or branch:
        return None
    (a, b), label = heavy[0], edges[heavy[0]]
    # path graph: locate the heavy edge relative to the ends
    ends = [i for i in range(n) if degree[i] == 1]
    at_end = a in ends or b in ends
    if label == 4:
        if at_end:
            return f"B{n}"
        if n == 4:
            return "F4"
        return None
    if label == 5 and at_end and n in (3, 4):
        return f"H{n}"
    return None


def _arm_lengths(edges, n, center) -> list[int]:
    adj: dict[int, list[int]] = {i: [] for i in range(n)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    arms = []
    for nb in adj[center]:
        length, prev, cur = 1, center, nb
        while True:
            nxt = [x for x in adj[cur] if x != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    return arms


def finite_type(m, nodes: Optional[Sequence[int]] = None) -> Optional[str]:
    """Type label such as ``"A2xA2"`` if W_J is finite, else ``None``.

    ``nodes`` restricts to a standard parabolic subgroup; the empty set
    gives the trivial group, labelled ``""``.
    """
    if nodes is not None and len(nodes) == 0:
        return ""
    labels = []
    for comp in components(m, nodes):
        label = _classify_connected(m, comp)
        if label is None:
            return None
        labels.append(label)
    return "x".join(labels)


_EXCEPTIONAL_DEGREES = {
    "E6": (2, 5, 6, 8, 9, 12),
    "E7": (2, 6, 8, 10, 12, 14, 18),
    "E8": (2, 8, 12, 14, 18, 20, 24, 30),
    "F4": (2, 6, 8, 12),
    "G2": (2, 6),
    "H3": (2, 6, 10),
    "H4": (2, 12, 20, 30),
}


def degrees(label: str) -> list[int]:
    """Degrees of the basic invariants for a (possibly reducible) finite type."""
    out: list[int] = []
    for part in filter(None, label.split("x")):
        if part in _EXCEPTIONAL_DEGREES:
            out.extend(_EXCEPTIONAL_DEGREES[part])
        elif part.startswith("I2("):
            out.extend([2, int(part[3:-1])])
        else:
            kind, n = part[0], int(part[1:])
            if kind == "A":
                out.extend(range(2, n + 2))
            elif kind == "B":
                out.extend(range(2, 2 * n + 1, 2))
            elif kind == "D":
                out.extend(list(range(2, 2 * n - 1, 2)) + [n])
            else:
                raise ValueError(f"unknown type {part!r}")
    return out


def group_order(label: str) -> int:
    return math.prod(degrees(label))
