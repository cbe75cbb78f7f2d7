"""Geodesic band decomposition and straight-strip unfolding.

A straight strip of unit triangles in the tiling plane descends to a
closed band of faces on the folded surface: half-turn images never share
a strip row (their rotation center would have to be a grid point at a
non-integer height), so the walk closes on the first translational
repeat.  The surface splits into gcd(a, b) such bands of S/gcd faces
each, along any of the three lattice strip directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .lattice import GridCoord, LatticeTriangle, Orient, to_euclid
from .mesh import DeltaMesh, MeshError

#: strips run along e_x (0), e_y (1) or e_y - e_x (2)
DIRECTIONS = (0, 1, 2)


def band_count(a: int, b: int) -> int:
    """Number of geodesic bands: gcd(a, b), with gcd(n, 0) = n."""
    if a < 0 or b < 0 or (a == 0 and b == 0):
        raise ValueError(f"invalid parameters ({a}, {b}): need a, b >= 0, not both 0")
    return math.gcd(a, b)


@dataclass(frozen=True)
class GeodesicBand:
    """Cyclic face sequence of one geodesic band (one strip row wide)."""

    faces: tuple[int, ...]
    direction: int
    strip: tuple[LatticeTriangle, ...]  # walked plane triangles, in order

    width_rows = 1

    def __len__(self) -> int:
        return len(self.faces)


@dataclass(frozen=True)
class PlanarStrip:
    """Straight planar unfolding of a band: one horizontal triangle row.

    `closure` is the translation (x, 0) identifying the strip end with
    its start; the strip holds 2x alternating up/down triangles.
    """

    triangles: tuple[tuple[GridCoord, GridCoord, GridCoord], ...]
    closure: tuple[int, int]
    face_ids: tuple[int, ...]


def _step(t: LatticeTriangle, direction: int) -> LatticeTriangle:
    """Next triangle of the strip through t in the given direction."""
    p, q = t.anchor.p, t.anchor.q
    if t.orient == Orient.UP:
        if direction == 0:
            return LatticeTriangle(GridCoord(p, q), Orient.DOWN)
        if direction == 1:
            return LatticeTriangle(GridCoord(p, q), Orient.DOWN)
        return LatticeTriangle(GridCoord(p - 1, q), Orient.DOWN)
    if direction == 0:
        return LatticeTriangle(GridCoord(p + 1, q), Orient.UP)
    return LatticeTriangle(GridCoord(p, q + 1), Orient.UP)


def strip_walk(m: DeltaMesh, start: LatticeTriangle, direction: int,
               count: int) -> list[LatticeTriangle]:
    """Walk `count` strip triangles from `start` (no canonicalization)."""
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    out = [start]
    for _ in range(count - 1):
        out.append(_step(out[-1], direction))
    return out


def trace_bands(m: DeltaMesh, direction: int = 0) -> list[GeodesicBand]:
    """Decompose the mesh into its geodesic bands.

    Each band starts at the smallest face id not yet covered and follows
    its strip until the first repeated face, which is always the start.
    Returns gcd(a, b) disjoint bands covering all faces; anything else
    indicates a quotient bug and raises MeshError.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    g = m.group
    face_index = {t: i for i, t in enumerate(m.face_reps)}
    expected_bands = band_count(m.a, m.b)
    expected_len = g.s // expected_bands

    covered = [False] * len(m.face_reps)
    bands = []
    for start_face in range(len(m.face_reps)):
        if covered[start_face]:
            continue
        tri = m.face_reps[start_face]
        strip = [tri]
        faces = [start_face]
        covered[start_face] = True
        while True:
            tri = _step(tri, direction)
            fid = face_index[g.canonicalize(tri)[0]]
            if fid == start_face:
                break
            if covered[fid]:
                raise MeshError(
                    f"band through face {start_face} hit covered face {fid} "
                    "before closing"
                )
            covered[fid] = True
            strip.append(tri)
            faces.append(fid)
        if len(faces) != expected_len:
            raise MeshError(
                f"band of length {len(faces)}, expected {expected_len}"
            )
        bands.append(GeodesicBand(tuple(faces), direction, tuple(strip)))
    if len(bands) != expected_bands:
        raise MeshError(f"traced {len(bands)} bands, expected {expected_bands}")
    return bands


def no_half_turn_in_band(band: GeodesicBand, m: DeltaMesh) -> bool:
    """True iff no two strip triangles are half-turn images of each other.

    Triangles t, t' are related by a half-turn of the tiling group exactly
    when their orientations differ and anchor + anchor' + (1, 1) lies in
    the translation lattice.  Always true for traced bands.
    """
    g = m.group
    ups = [t.anchor for t in band.strip if t.orient == Orient.UP]
    downs = [t.anchor for t in band.strip if t.orient == Orient.DOWN]
    for zu in ups:
        for zd in downs:
            if g.contains_translation(GridCoord(zu.p + zd.p + 1, zu.q + zd.q + 1)):
                return False
    return True


def strip_duplicate_faces(strip: list[LatticeTriangle], m: DeltaMesh) -> list[int]:
    """Face ids hit more than once by a strip (empty for a valid band)."""
    g = m.group
    face_index = {t: i for i, t in enumerate(m.face_reps)}
    seen: dict[int, int] = {}
    dups = []
    for t in strip:
        fid = face_index[g.canonicalize(t)[0]]
        seen[fid] = seen.get(fid, 0) + 1
        if seen[fid] == 2:
            dups.append(fid)
    return dups


def unfold_band(band: GeodesicBand) -> PlanarStrip:
    """Straight planar strip of the band: 2x triangles, closure (x, 0)."""
    n = len(band.faces)
    if n % 2 != 0:
        raise ValueError("band length must be even")
    tris = []
    for i in range(n):
        p = i // 2
        orient = Orient.UP if i % 2 == 0 else Orient.DOWN
        tris.append(LatticeTriangle(GridCoord(p, 0), orient).corners())
    return PlanarStrip(tuple(tris), (n // 2, 0), tuple(band.faces))


def strip_svg(strip: PlanarStrip, scale_mm: float = 10.0) -> str:
    """SVG rendering of a planar strip at `scale_mm` per unit edge.

    Fold lines are solid strokes, the outline is heavier, and the closure
    edge (strip end identified with its start) is dashed.
    """
    s = scale_mm
    xs, ys = [], []
    for tri in strip.triangles:
        for c in tri:
            x, y = to_euclid(c)
            xs.append(x * s)
            ys.append(y * s)
    pad = 0.2 * s
    minx, maxx = min(xs) - pad, max(xs) + pad
    miny, maxy = min(ys) - pad, max(ys) + pad
    w, h = maxx - minx, maxy - miny

    def pt(c: GridCoord) -> str:
        x, y = to_euclid(c)
        # flip y so the strip reads left-to-right, bottom row down
        return f"{x * s - minx:.3f},{maxy - y * s:.3f}"

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.3f}mm" '
        f'height="{h:.3f}mm" viewBox="0 0 {w:.3f} {h:.3f}">',
        '<g fill="#f5f5f5" stroke="#333" stroke-width="0.25">',
    ]
    for tri in strip.triangles:
        lines.append(f'<polygon points="{pt(tri[0])} {pt(tri[1])} {pt(tri[2])}"/>')
    lines.append("</g>")
    x_close = strip.closure[0]
    c0, c1 = GridCoord(x_close, 0), GridCoord(x_close, 1)
    lines.append(
        f'<line x1="{pt(c0).split(",")[0]}" y1="{pt(c0).split(",")[1]}" '
        f'x2="{pt(c1).split(",")[0]}" y2="{pt(c1).split(",")[1]}" '
        'stroke="#c00" stroke-width="0.5" stroke-dasharray="1.5,1.5"/>'
    )
    lines.append("</svg>")
    return "\n".join(lines)


def bands_to_json_dict(bands: list[GeodesicBand], m: DeltaMesh) -> dict:
    """JSON document describing a band decomposition."""
    return {
        "a": m.a,
        "b": m.b,
        "band_count": len(bands),
        "band_length": len(bands[0]) if bands else 0,
        "direction": bands[0].direction if bands else 0,
        "bands": [list(band.faces) for band in bands],
    }
