from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tetrafold.lattice import (
    GridCoord,
    Isometry,
    LatticeTriangle,
    Orient,
    canonical_triangle,
    s_triangles,
    tiling_group,
    to_euclid,
)


def test_to_euclid_origin():
    assert to_euclid(GridCoord(0, 0)) == (0.0, 0.0)


def test_to_euclid_unit_x():
    assert to_euclid(GridCoord(1, 0)) == (1.0, 0.0)


def test_to_euclid_sixty_degree_basis():
    # (0, 2) -> 2 * (1/2, sqrt(3)/2) = (1, sqrt(3))
    x, y = to_euclid(GridCoord(0, 2))
    assert x == pytest.approx(1.0, abs=1e-15)
    assert y == pytest.approx(math.sqrt(3.0), abs=1e-15)


def test_tiling_group_2_1():
    g = tiling_group(2, 1)
    assert (g.u.p, g.u.q) == (4, 2)
    assert (g.v.p, g.v.q) == (-2, 6)
    assert g.det == 28 == 4 * 7


def test_tiling_group_unit():
    g = tiling_group(1, 0)
    assert (g.u.p, g.u.q) == (2, 0)
    assert (g.v.p, g.v.q) == (0, 2)
    assert g.det == 4


def test_tiling_group_1_1():
    g = tiling_group(1, 1)
    assert (g.u.p, g.u.q) == (2, 2)
    assert (g.v.p, g.v.q) == (-2, 4)
    assert g.det == 12


@pytest.mark.parametrize("a,b", [(0, 0), (-1, 2), (3, -1)])
def test_tiling_group_rejects_bad_pairs(a, b):
    with pytest.raises(ValueError):
        tiling_group(a, b)


def test_determinant_formula_exact():
    for a in range(0, 101):
        for b in range(0, 101):
            if a == 0 and b == 0:
                continue
            assert tiling_group(a, b).det == 4 * (a * a + a * b + b * b)


triangles = st.builds(
    LatticeTriangle,
    st.builds(GridCoord, st.integers(-30, 30), st.integers(-30, 30)),
    st.sampled_from([Orient.UP, Orient.DOWN]),
)
pairs = st.tuples(st.integers(0, 5), st.integers(0, 5)).filter(lambda ab: ab != (0, 0))


@given(pairs, triangles)
def test_canonical_idempotent(ab, t):
    g = tiling_group(*ab)
    c = canonical_triangle(t, g)
    assert canonical_triangle(c, g) == c


@given(pairs, triangles, st.integers(-3, 3), st.integers(-3, 3))
def test_canonical_translation_invariant(ab, t, m, n):
    g = tiling_group(*ab)
    shift = GridCoord(m * g.u.p + n * g.v.p, m * g.u.q + n * g.v.q)
    moved = LatticeTriangle(t.anchor + shift, t.orient)
    assert canonical_triangle(moved, g) == canonical_triangle(t, g)


@given(
    pairs,
    triangles,
    st.lists(st.tuples(st.integers(0, 1), st.integers(-2, 2), st.integers(-2, 2)),
             max_size=5),
)
def test_canonical_constant_on_orbits(ab, t, word):
    """Applying any sequence of group generators never changes the canonical."""
    g = tiling_group(*ab)
    expect = canonical_triangle(t, g)
    for kind, m, n in word:
        if kind == 0:
            iso = Isometry(1, GridCoord(m * g.u.p + n * g.v.p, m * g.u.q + n * g.v.q))
        else:
            # half-turn about the corner-lattice point m*w1 + n*w2
            center = GridCoord(m * g.w1.p + n * g.w2.p, m * g.w1.q + n * g.w2.q)
            iso = Isometry(-1, center + center)
        t = iso.apply_triangle(t)
        assert canonical_triangle(t, g) == expect


@given(
    st.integers(1, 2).map(lambda s: 1 if s == 1 else -1),
    st.builds(GridCoord, st.integers(-9, 9), st.integers(-9, 9)),
    st.integers(1, 2).map(lambda s: 1 if s == 1 else -1),
    st.builds(GridCoord, st.integers(-9, 9), st.integers(-9, 9)),
    st.builds(GridCoord, st.integers(-20, 20), st.integers(-20, 20)),
)
def test_isometry_composition(s1, t1, s2, t2, z):
    i1, i2 = Isometry(s1, t1), Isometry(s2, t2)
    assert i1.compose(i2).apply(z) == i1.apply(i2.apply(z))
    assert i1.compose(i1.inverse()).apply(z) == z


def test_isometry_triangle_action_matches_point_action():
    iso = Isometry(-1, GridCoord(4, 2))
    t = LatticeTriangle(GridCoord(1, 3), Orient.UP)
    image = iso.apply_triangle(t)
    assert {iso.apply(c) for c in t.corners()} == set(image.corners())


def test_canonicalize_returns_group_elements():
    g = tiling_group(3, 2)
    for t in [LatticeTriangle(GridCoord(7, -5), Orient.UP),
              LatticeTriangle(GridCoord(-11, 4), Orient.DOWN)]:
        rep, iso = g.canonicalize(t)
        assert iso.apply_triangle(t) == rep
        # translations lie in the u,v lattice; half-turn centers in the
        # corner lattice (doubled shift in the u,v lattice)
        assert g.contains_translation(iso.shift)


def test_orbit_count_equals_s():
    for a in range(0, 9):
        for b in range(0, 9):
            if a == 0 and b == 0:
                continue
            g = tiling_group(a, b)
            tris = g.cell_triangles()
            assert len(tris) == 2 * g.s
            assert len({canonical_triangle(t, g) for t in tris}) == g.s


def test_window_orbit_partition_2_1():
    """Any 56-triangle window of the (2,1) tiling has exactly 28 classes."""
    g = tiling_group(2, 1)
    assert g.s == 28
    for offset in [GridCoord(0, 0), GridCoord(5, -3), GridCoord(-17, 11)]:
        window = [
            LatticeTriangle(t.anchor + offset, t.orient) for t in g.cell_triangles()
        ]
        assert len(window) == 56
        assert len({canonical_triangle(t, g) for t in window}) == 28


def test_half_turn_centers_are_corner_images():
    g = tiling_group(3, 1)
    assert len(g.half_turn_centers) == 4
    for c in g.half_turn_centers:
        assert g.is_corner_point(c)
        # the half-turn about c maps the corner lattice to itself
        iso = Isometry(-1, c + c)
        assert g.is_corner_point(iso.apply(g.w1))


def test_s_triangles_values():
    assert s_triangles(1, 0) == 4
    assert s_triangles(2, 1) == 28
    assert s_triangles(5, 6) == 364
