"""Named Coxeter systems, their canonical diagram automorphisms, and group files.

A group source is either a preset name, optionally suffixed with ``:theta``
(``A5:flip``, ``D4:swap``, ``E6:id``), or a path to a JSON group file
``{"size": n, "m": [[...]], "theta": [...]}`` with infinity encoded as 0
and ``theta`` a 0-based image array.
"""
from __future__ import annotations

import json
import os
import re
from typing import Optional

from .coxeter import INF, CoxeterMatrix, CoxeterSystem, TwistedAutomorphism, build_system, square_with_swap
from .errors import InvalidAutomorphism, UnknownPreset


def _path_matrix(n, labels=None):
    rows = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
    for i in range(n - 1):
        label = 3 if labels is None else labels[i]
        rows[i][i + 1] = rows[i + 1][i] = label
    return rows


def _set(rows, i, j, label):
    rows[i][j] = rows[j][i] = label


def coxeter_rows(name: str) -> tuple[list[list], Optional[tuple[int, ...]]]:
    """Coxeter matrix rows and canonical non-trivial automorphism (or None)."""
    m = re.fullmatch(r"([ABD])(\d+)", name)
    if m:
        kind, n = m.group(1), int(m.group(2))
        if kind == "A":
            if n < 1:
                raise UnknownPreset(name)
            return _path_matrix(n), tuple(n - 1 - i for i in range(n))
        if kind == "B":
            if n < 2:
                raise UnknownPreset(name)
            return _path_matrix(n, [3] * (n - 2) + [4]), None
        if n < 4:
            raise UnknownPreset("D<n> needs n >= 4")
        # s1 and s2 both attach to s3, then the path s3 - s4 - ... - sn
        rows = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
        _set(rows, 0, 2, 3)
        _set(rows, 1, 2, 3)
        for i in range(2, n - 1):
            _set(rows, i, i + 1, 3)
        return rows, (1, 0) + tuple(range(2, n))
    if name == "E6":
        rows = [[1 if i == j else 2 for j in range(6)] for i in range(6)]
        for a, b in [(0, 2), (2, 3), (3, 4), (4, 5), (1, 3)]:
            _set(rows, a, b, 3)
        return rows, (5, 1, 4, 3, 2, 0)
    if name == "F4":
        return _path_matrix(4, [3, 4, 3]), (3, 2, 1, 0)
    m = re.fullmatch(r"I2\((\d+|inf)\)", name)
    if m:
        label = INF if m.group(1) == "inf" else int(m.group(1))
        if label != INF and label < 2:
            raise UnknownPreset(name)
        return [[1, label], [label, 1]], (1, 0)
    if name in ("affineA2", "~A2"):
        return [[1, 3, 3], [3, 1, 3], [3, 3, 1]], (0, 2, 1)
    raise UnknownPreset(f"unknown preset {name!r}")


def _resolve(spec: str):
    name, _, theta_name = spec.partition(":")
    name = name.strip()
    sq = re.fullmatch(r"square\((.+)\)", name)
    if sq:
        inner, _, _ = _resolve(sq.group(1))
        system, canonical = square_with_swap(inner)
        system.name = name
        default = canonical
    else:
        rows, perm = coxeter_rows(name)
        system = build_system(rows, name=name)
        canonical = TwistedAutomorphism(perm) if perm is not None else None
        default = canonical if name in ("affineA2", "~A2") else None
    if theta_name:
        theta = parse_theta(theta_name, system, canonical)
    else:
        theta = default or TwistedAutomorphism.identity(system.rank)
    return system, system.automorphism(theta), canonical


def resolve_preset(spec: str) -> tuple[CoxeterSystem, TwistedAutomorphism]:
    """Resolve ``name[:theta]`` to a system and automorphism.

    Without a suffix, ``affineA2`` and ``square(...)`` get their
    non-trivial automorphism and every other preset gets the identity.
    """
    system, theta, _ = _resolve(spec)
    return system, theta


def parse_theta(text: str, system: CoxeterSystem, canonical: Optional[TwistedAutomorphism] = None) -> TwistedAutomorphism:
    """``id``, ``flip``/``swap`` (the preset's canonical automorphism) or a 0-based image list."""
    text = text.strip()
    if text in ("id", "identity"):
        return TwistedAutomorphism.identity(system.rank)
    if text in ("flip", "swap"):
        if canonical is None:
            raise InvalidAutomorphism(f"{system.name} has no canonical non-trivial automorphism")
        return canonical
    try:
        perm = tuple(int(x) for x in re.split(r"[,\s]+", text.strip("[]() ")) if x)
    except ValueError:
        raise InvalidAutomorphism(f"cannot parse theta {text!r}") from None
    return system.automorphism(perm)


def load_group_file(path: str) -> tuple[CoxeterSystem, TwistedAutomorphism]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return group_from_dict(data, name=os.path.basename(path))


def group_from_dict(data: dict, name: Optional[str] = None) -> tuple[CoxeterSystem, TwistedAutomorphism]:
    matrix = CoxeterMatrix.from_file_encoding(data["m"])
    if "size" in data and data["size"] != matrix.size:
        raise ValueError(f"size {data['size']} does not match the {matrix.size}x{matrix.size} matrix")
    system = build_system(matrix, name=name)
    theta = data.get("theta") or list(range(matrix.size))
    return system, system.automorphism(theta)


def group_to_dict(system: CoxeterSystem, theta: TwistedAutomorphism) -> dict:
    return {"size": system.rank, "m": system.matrix.to_file_encoding(), "theta": list(theta.perm)}


def resolve_group(source: str, theta_override: Optional[str] = None) -> tuple[CoxeterSystem, TwistedAutomorphism]:
    """Preset name or group-file path, with an optional theta override."""
    if os.path.isfile(source):
        system, theta = load_group_file(source)
        canonical = None
    else:
        system, theta, canonical = _resolve(source)
    if theta_override:
        theta = system.automorphism(parse_theta(theta_override, system, canonical))
    return system, theta
