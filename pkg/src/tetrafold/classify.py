"""Enumeration of parameter pairs sharing a common band length.

Coprime pairs (a, b) and (a', b') with equal S = 4(a^2 + ab + b^2) unfold
to single bands of the same length, so one planar strip folds into both
shapes.  `enumerate_common` lists every such coincidence up to a bound.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

from .lattice import s_triangles


def s_value(a: int, b: int) -> int:
    """S(a, b) = 4(a^2 + ab + b^2), the face count of deltahedron (a, b)."""
    if a < 0 or b < 0 or (a == 0 and b == 0):
        raise ValueError(f"invalid parameters ({a}, {b}): need a, b >= 0, not both 0")
    return s_triangles(a, b)


@dataclass(frozen=True)
class SValueGroup:
    """Pairs sharing one S value, normalized to 0 < a <= b, sorted by a."""

    s: int
    members: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.members)


def enumerate_common(s_max: int, include_non_coprime: bool = False) -> list[SValueGroup]:
    """All groups of >= 2 pairs with equal S <= s_max.

    Pairs are normalized to 0 < a <= b and, unless `include_non_coprime`
    is set, restricted to gcd(a, b) = 1 so that each member is a single
    band.  Groups come back sorted by S, members sorted by a.
    """
    if s_max < 4:
        raise ValueError("s_max must be at least 4")
    by_s: dict[int, list[tuple[int, int]]] = {}
    a = 1
    while s_triangles(a, a) <= s_max:
        b = a
        while True:
            s = s_triangles(a, b)
            if s > s_max:
                break
            if include_non_coprime or math.gcd(a, b) == 1:
                by_s.setdefault(s, []).append((a, b))
            b += 1
        a += 1
    return [
        SValueGroup(s, tuple(sorted(members)))
        for s, members in sorted(by_s.items())
        if len(members) >= 2
    ]


def groups_to_json_dict(groups: list[SValueGroup]) -> list[dict]:
    return [
        {"s": g.s, "s_over_4": g.s // 4, "members": [list(m) for m in g.members]}
        for g in groups
    ]


def groups_to_csv(groups: list[SValueGroup]) -> str:
    """CSV with one row per group: s, s/4, member list."""
    buf = io.StringIO()
    buf.write("s,s_over_4,members\n")
    for g in groups:
        members = " ".join(f"({a},{b})" for a, b in g.members)
        buf.write(f"{g.s},{g.s // 4},{members}\n")
    return buf.getvalue()
