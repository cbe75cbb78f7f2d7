"""Exact integer arithmetic on the unit triangular grid.

The grid basis is e_x = (1, 0) and e_y = (1/2, sqrt(3)/2), at 60 degrees.
A point is an integer pair (p, q) meaning p*e_x + q*e_y.  A unit triangle
is identified by its lower-left anchor point and an up/down orientation.

For a parameter pair (a, b) the plane is tiled by copies of the unfolded
surface of a regular tetrahedron whose edge is the grid vector (a, b).
The tiling group consists of the translations generated by
u = (2a, 2b), v = (-2b, 2a + 2b) and the half-turns about every point of
the coarse lattice spanned by w1 = (a, b) and w2 = (-b, a + b); those
points are the images of the four tetrahedron corners.  Two unit triangles
represent the same surface triangle exactly when they lie in the same
orbit of this group; `canonical_triangle` picks one deterministic
representative per orbit.

Everything here is exact: no floating point enters any group computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class GridCoord:
    """Integer coordinates (p, q) in the 60-degree grid basis."""

    p: int
    q: int

    def __add__(self, other: "GridCoord") -> "GridCoord":
        return GridCoord(self.p + other.p, self.q + other.q)

    def __sub__(self, other: "GridCoord") -> "GridCoord":
        return GridCoord(self.p - other.p, self.q - other.q)

    def __neg__(self) -> "GridCoord":
        return GridCoord(-self.p, -self.q)

    def key(self) -> tuple[int, int]:
        """Sort key (q, p) used for canonical representatives."""
        return (self.q, self.p)


class Orient(IntEnum):
    UP = 0
    DOWN = 1


@dataclass(frozen=True)
class LatticeTriangle:
    """Unit grid triangle: anchor (p, q) plus orientation.

    The up triangle at (p, q) has corners (p, q), (p+1, q), (p, q+1); the
    down triangle has corners (p+1, q), (p+1, q+1), (p, q+1).  Corner
    order is counterclockwise in the Euclidean picture.
    """

    anchor: GridCoord
    orient: Orient

    def corners(self) -> tuple[GridCoord, GridCoord, GridCoord]:
        p, q = self.anchor.p, self.anchor.q
        if self.orient == Orient.UP:
            return (GridCoord(p, q), GridCoord(p + 1, q), GridCoord(p, q + 1))
        return (GridCoord(p + 1, q), GridCoord(p + 1, q + 1), GridCoord(p, q + 1))

    def key(self) -> tuple[int, int, int]:
        return (self.anchor.q, self.anchor.p, int(self.orient))


def to_euclid(c: GridCoord) -> tuple[float, float]:
    """Euclidean image (p + q/2, q*sqrt(3)/2) of a grid point."""
    return (c.p + c.q / 2.0, c.q * (SQRT3 / 2.0))


@dataclass(frozen=True)
class Isometry:
    """Orientation-preserving lattice isometry x -> sign*x + shift.

    sign +1 is a translation by `shift`; sign -1 is the half-turn about
    shift/2, so half-turn centers at half-integer points are represented
    exactly (the shift holds the doubled center).
    """

    sign: int
    shift: GridCoord

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @property
    def kind(self) -> str:
        return "translation" if self.sign == 1 else "half_turn"

    @property
    def translation(self) -> GridCoord:
        if self.sign != 1:
            raise ValueError("not a translation")
        return self.shift

    @property
    def center_doubled(self) -> GridCoord:
        """Doubled rotation center of a half-turn (exact integers)."""
        if self.sign != -1:
            raise ValueError("not a half-turn")
        return self.shift

    def apply(self, z: GridCoord) -> GridCoord:
        return GridCoord(self.sign * z.p + self.shift.p, self.sign * z.q + self.shift.q)

    def apply_triangle(self, t: LatticeTriangle) -> LatticeTriangle:
        if self.sign == 1:
            return LatticeTriangle(t.anchor + self.shift, t.orient)
        # a half-turn maps the up triangle at z to the down triangle at
        # shift - z - (1, 1), and vice versa
        anchor = GridCoord(self.shift.p - t.anchor.p - 1, self.shift.q - t.anchor.q - 1)
        return LatticeTriangle(anchor, Orient(1 - int(t.orient)))

    def compose(self, other: "Isometry") -> "Isometry":
        """Return self applied after other (self o other)."""
        shift = GridCoord(
            self.sign * other.shift.p + self.shift.p,
            self.sign * other.shift.q + self.shift.q,
        )
        return Isometry(self.sign * other.sign, shift)

    def inverse(self) -> "Isometry":
        if self.sign == 1:
            return Isometry(1, -self.shift)
        return Isometry(-1, self.shift)


IDENTITY = Isometry(1, GridCoord(0, 0))


def s_triangles(a: int, b: int) -> int:
    """Triangle count S(a, b) = 4(a^2 + ab + b^2) of the folded surface."""
    return 4 * (a * a + a * b + b * b)


class TilingGroup:
    """Isometry group tiling the plane by copies of the unfolded tetrahedron.

    Use `tiling_group(a, b)` to construct; arithmetic is exact throughout.
    """

    def __init__(self, a: int, b: int):
        if a < 0 or b < 0 or (a == 0 and b == 0):
            raise ValueError(f"invalid parameters ({a}, {b}): need a, b >= 0, not both 0")
        self.a = a
        self.b = b
        self.s = s_triangles(a, b)
        self.u = GridCoord(2 * a, 2 * b)
        self.v = GridCoord(-2 * b, 2 * a + 2 * b)
        self.w1 = GridCoord(a, b)
        self.w2 = GridCoord(-b, a + b)
        # tetrahedron corner classes: images of the four source vertices,
        # which are also the (grid-point) half-turn centers of the group
        self.half_turn_centers = [
            GridCoord(0, 0),
            self.w1,
            self.w2,
            self.w1 + self.w2,
        ]

    def __repr__(self) -> str:
        return f"TilingGroup(a={self.a}, b={self.b})"

    @property
    def det(self) -> int:
        """Determinant of [u; v] in the grid basis; equals S(a, b)."""
        return self.u.p * self.v.q - self.u.q * self.v.p

    def _frac_numerators(self, z: GridCoord) -> tuple[int, int]:
        # coordinates of z in the (u, v) basis are (alpha, beta)/s
        alpha = (2 * self.a + 2 * self.b) * z.p + 2 * self.b * z.q
        beta = -2 * self.b * z.p + 2 * self.a * z.q
        return alpha, beta

    def contains_translation(self, z: GridCoord) -> bool:
        """True iff z lies in the translation lattice spanned by u, v."""
        alpha, beta = self._frac_numerators(z)
        return alpha % self.s == 0 and beta % self.s == 0

    def reduce_point(self, z: GridCoord) -> tuple[GridCoord, Isometry]:
        """Translate z into the fundamental cell {xu + yv : 0 <= x, y < 1}.

        Returns the reduced point and the translation that achieves it.
        """
        alpha, beta = self._frac_numerators(z)
        ma, mb = alpha // self.s, beta // self.s
        shift = GridCoord(
            -ma * self.u.p - mb * self.v.p,
            -ma * self.u.q - mb * self.v.q,
        )
        return z + shift, Isometry(1, shift)

    def canonicalize_point(self, z: GridCoord) -> tuple[GridCoord, Isometry]:
        """Orbit representative of a grid point under the full group."""
        r1, iso1 = self.reduce_point(z)
        r2, red2 = self.reduce_point(-z)
        if r1.key() <= r2.key():
            return r1, iso1
        # half-turn x -> tau - x with tau = r2 + z in the translation lattice
        return r2, Isometry(-1, r2 + z)

    def canonicalize(self, t: LatticeTriangle) -> tuple[LatticeTriangle, Isometry]:
        """Orbit representative of a triangle, with the mapping isometry."""
        r1, iso1 = self.reduce_point(t.anchor)
        c1 = LatticeTriangle(r1, t.orient)
        flipped = GridCoord(-t.anchor.p - 1, -t.anchor.q - 1)
        r2, _ = self.reduce_point(flipped)
        c2 = LatticeTriangle(r2, Orient(1 - int(t.orient)))
        if c1.key() <= c2.key():
            return c1, iso1
        tau = GridCoord(r2.p + t.anchor.p + 1, r2.q + t.anchor.q + 1)
        return c2, Isometry(-1, tau)

    def cell_anchors(self) -> list[GridCoord]:
        """The S grid points inside the fundamental translation cell."""
        xs = [0, self.u.p, self.v.p, self.u.p + self.v.p]
        ys = [0, self.u.q, self.v.q, self.u.q + self.v.q]
        out = []
        for p in range(min(xs) - 1, max(xs) + 2):
            for q in range(min(ys) - 1, max(ys) + 2):
                alpha, beta = self._frac_numerators(GridCoord(p, q))
                if 0 <= alpha < self.s and 0 <= beta < self.s:
                    out.append(GridCoord(p, q))
        if len(out) != self.s:
            raise RuntimeError(f"cell enumeration found {len(out)} anchors, expected {self.s}")
        return out

    def cell_triangles(self) -> list[LatticeTriangle]:
        """All 2S unit triangles anchored in the fundamental cell."""
        tris = []
        for z in self.cell_anchors():
            tris.append(LatticeTriangle(z, Orient.UP))
            tris.append(LatticeTriangle(z, Orient.DOWN))
        return tris

    def is_corner_point(self, z: GridCoord) -> bool:
        """True iff z is an image of a source-tetrahedron corner."""
        n = self.a * self.a + self.a * self.b + self.b * self.b
        m_num = (self.a + self.b) * z.p + self.b * z.q
        n_num = -self.b * z.p + self.a * z.q
        return m_num % n == 0 and n_num % n == 0


def tiling_group(a: int, b: int) -> TilingGroup:
    """Tiling group of the (a, b) unfolding; rejects (0, 0) and negatives."""
    return TilingGroup(a, b)


def canonical_triangle(t: LatticeTriangle, g: TilingGroup) -> LatticeTriangle:
    """Deterministic orbit representative of t under the tiling group.

    Two triangles map to the same face of the folded surface iff their
    representatives are equal.  The representative is the lexicographic
    minimum of (anchor.q, anchor.p, orient) over the orbit members whose
    anchor lies in the fundamental translation cell.
    """
    return g.canonicalize(t)[0]
