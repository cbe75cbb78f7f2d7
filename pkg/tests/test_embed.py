from __future__ import annotations

import math

import numpy as np
import pytest

from tetrafold.embed import (
    ConvergenceError,
    Embedding,
    RelaxConfig,
    all_popped,
    compute_metrics,
    corner_vertex_ids,
    edge_residual,
    gauge_fix,
    geodesic_positions,
    initial_guess,
    relative_volume,
    relax,
    relax_max_volume,
    solid_angle,
    volume,
    write_obj,
)

TETRA_VOLUME = 1.0 / (6.0 * math.sqrt(2.0))
# closed-form anchors: five unit tetrahedra; icosahedron plus four tetrahedra
REL_1_1 = 5.0 / (3.0 * math.sqrt(3.0))
VOL_2_1 = (5.0 / 12.0) * (3.0 + math.sqrt(5.0)) + 4.0 * TETRA_VOLUME
REL_2_1 = VOL_2_1 / (7.0 ** 1.5 * TETRA_VOLUME)
TETRA_CORNER_ANGLE = 3.0 * math.acos(1.0 / 3.0) - math.pi


@pytest.fixture(scope="session")
def embed_1_1(mesh):
    m = mesh(1, 1)
    return m, relax_max_volume(m, RelaxConfig(restarts=5))


@pytest.fixture(scope="session")
def embed_2_1(mesh):
    m = mesh(2, 1)
    return m, relax_max_volume(m, RelaxConfig(restarts=5))


@pytest.fixture(scope="session")
def embed_2_2(mesh):
    m = mesh(2, 2)
    return m, relax_max_volume(m, RelaxConfig(restarts=10))


@pytest.fixture(scope="session")
def dimpled_2_2(mesh):
    # inward pressure settles into a dented branch
    m = mesh(2, 2)
    cfg = RelaxConfig(inflation_pressure=(-0.05, 0.999))
    emb = relax(m, initial_guess(m, cfg), cfg)
    assert emb.converged
    return m, emb


def test_geodesic_positions_tetrahedron(mesh):
    m = mesh(1, 0)
    pos = geodesic_positions(m)
    d = [np.linalg.norm(pos[i] - pos[j]) for i in range(4) for j in range(i + 1, 4)]
    assert np.allclose(d, 1.0, atol=1e-14)


def test_geodesic_positions_1_1(mesh):
    # four corner points plus four face-grid midpoints, all edges that do
    # not cross a fold are exactly unit
    m = mesh(1, 1)
    pos = geodesic_positions(m)
    corners = corner_vertex_ids(m)
    assert len(corners) == 4
    others = [v for v in range(8) if v not in corners]
    cpos = pos[corners]
    edge = math.sqrt(3.0)
    cd = sorted(np.linalg.norm(cpos[i] - cpos[j]) for i in range(4) for j in range(i + 1, 4))
    assert np.allclose(cd, edge, atol=1e-12)
    # a face centroid is at distance edge/sqrt(3) = 1 from its three corners
    for v in others:
        dists = sorted(np.linalg.norm(pos[v] - c) for c in cpos)
        assert np.allclose(dists[:3], 1.0, atol=1e-12)


def test_initial_guess_unit_case_exact(mesh):
    m = mesh(1, 0)
    p = initial_guess(m, RelaxConfig(seed=123))
    assert np.array_equal(p, geodesic_positions(m))  # corners never move


def test_initial_guess_deterministic(mesh):
    m = mesh(2, 2)
    cfg = RelaxConfig(seed=7)
    assert np.array_equal(initial_guess(m, cfg), initial_guess(m, cfg))
    other = initial_guess(m, RelaxConfig(seed=8))
    assert not np.array_equal(initial_guess(m, cfg), other)


def test_initial_guess_perturbs_outward_within_bound(mesh):
    m = mesh(2, 2)
    p0 = geodesic_positions(m)
    p = initial_guess(m, RelaxConfig(seed=3))
    shift = np.linalg.norm(p - p0, axis=1)
    assert shift.max() <= 0.1 + 1e-12
    assert shift.max() > 0.0
    for v in corner_vertex_ids(m):
        assert shift[v] == 0.0


def test_relax_tetrahedron_exact_start(mesh):
    m = mesh(1, 0)
    cfg = RelaxConfig()
    start = initial_guess(m, cfg)
    emb = relax(m, start, cfg)
    assert emb.converged
    assert emb.residual < 1e-12
    assert np.allclose(emb.positions, start, atol=1e-12)  # nothing to do


def test_relax_1_1_five_tetrahedra(embed_1_1):
    m, emb = embed_1_1
    assert emb.converged and emb.residual <= 1e-9
    assert volume(emb, m) == pytest.approx(5.0 * TETRA_VOLUME, abs=1e-6)
    assert relative_volume(emb, m) == pytest.approx(REL_1_1, abs=1e-4)
    assert relative_volume(emb, m) == pytest.approx(0.96225, abs=1e-4)


def test_relax_2_1_icosahedron_with_caps(embed_2_1):
    m, emb = embed_2_1
    assert emb.converged
    assert volume(emb, m) == pytest.approx(VOL_2_1, abs=1e-6)
    assert relative_volume(emb, m) == pytest.approx(REL_2_1, abs=1e-6)
    assert relative_volume(emb, m) == pytest.approx(1.21555, abs=1e-3)


def test_relax_2_2_table_value(embed_2_2):
    m, emb = embed_2_2
    assert emb.converged
    assert relative_volume(emb, m) == pytest.approx(1.29799, abs=2e-3)
    assert len(emb.attempts) == 10
    assert any(r.converged for r in emb.attempts)


def test_volume_unit_tetrahedron(mesh):
    m = mesh(1, 0)
    emb = Embedding(geodesic_positions(m), 0.0, True, 0)
    assert volume(emb, m) == pytest.approx(TETRA_VOLUME, abs=1e-14)
    assert relative_volume(emb, m) == pytest.approx(1.0, abs=1e-14)


def test_volume_negates_under_mirror(mesh):
    from tetrafold.mesh import mirror_mesh

    m = mesh(1, 0)
    emb = Embedding(geodesic_positions(m), 0.0, True, 0)
    assert volume(emb, mirror_mesh(m)) == pytest.approx(-TETRA_VOLUME, abs=1e-14)


def test_solid_angle_tetrahedron_corner(mesh):
    m = mesh(1, 0)
    emb = Embedding(geodesic_positions(m), 0.0, True, 0)
    for v in range(4):
        assert solid_angle(emb, m, v) == pytest.approx(TETRA_CORNER_ANGLE, abs=1e-12)


def test_solid_angle_flat_vertex(mesh):
    # the flat (3,0) start has face-interior vertices surrounded by six
    # coplanar triangles: exactly a hemisphere
    m = mesh(3, 0)
    emb = Embedding(geodesic_positions(m), 0.0, True, 0)
    deg = m.vertex_degrees()
    corners = set(corner_vertex_ids(m))
    flat = [v for v in range(m.vertex_total) if deg[v] == 6]
    assert flat
    seen_flat = 0
    for v in flat:
        ang = solid_angle(emb, m, v)
        if abs(ang - 2.0 * math.pi) < 1e-9:
            seen_flat += 1
        else:
            # vertices on the fold edges: twice the tetrahedron dihedral
            assert ang == pytest.approx(2.0 * math.acos(1.0 / 3.0), abs=1e-9)
        assert v not in corners
    assert seen_flat == 4  # one interior point per source face


def test_solid_angle_orientation_complement(mesh, embed_2_2):
    from tetrafold.mesh import mirror_mesh

    m, emb = embed_2_2
    rev = mirror_mesh(m)  # same vertex ids, reversed orientation
    for v in [0, 5, 13]:
        a = solid_angle(emb, m, v)
        b = solid_angle(emb, rev, v)
        assert a + b == pytest.approx(4.0 * math.pi, abs=1e-9)


def test_dimpled_apex_is_complement_of_popped(mesh, embed_1_1):
    """Both stable states of a cap: popped apex and its mirrored dimple."""
    m, emb = embed_1_1
    deg = m.vertex_degrees()
    apexes = [v for v in range(m.vertex_total) if deg[v] == 3]
    popped = {round(solid_angle(emb, m, v), 6) for v in apexes}
    assert len(popped) == 1
    omega = popped.pop()
    assert 0 < omega < 2 * math.pi
    # reflecting one apex through its base plane keeps every edge length,
    # so the dimpled twin is another unit-edge state; confirm it is a
    # stable equilibrium by nudging and relaxing back
    v = apexes[0]
    base = emb.positions[m.vertex_cycle(v)]
    n = np.cross(base[1] - base[0], base[2] - base[0])
    n /= np.linalg.norm(n)
    start = emb.positions.copy()
    start[v] -= 2.0 * np.dot(start[v] - base[0], n) * n
    rng = np.random.default_rng(3)
    start += 1e-3 * rng.normal(size=start.shape)
    cfg = RelaxConfig(inflation_pressure=(0.0, 0.999))
    dent = relax(m, start, cfg)
    assert dent.converged
    assert solid_angle(dent, m, v) == pytest.approx(4.0 * math.pi - omega, abs=1e-6)
    assert volume(dent, m) < volume(emb, m)


def test_all_popped_max_states(embed_1_1, embed_2_1):
    for m, emb in (embed_1_1, embed_2_1):
        assert all_popped(emb, m)


def test_dimpled_2_2_not_popped(dimpled_2_2, embed_2_2):
    m, dent = dimpled_2_2
    assert not all_popped(dent, m)
    assert volume(dent, m) < volume(embed_2_2[1], m)


def test_metrics_fields(embed_2_2):
    m, emb = embed_2_2
    met = compute_metrics(emb, m)
    assert met.all_popped
    assert 0 < met.min_solid_angle <= met.max_solid_angle < 2 * math.pi
    assert met.relative_volume == pytest.approx(1.29799, abs=2e-3)
    assert met.volume == pytest.approx(met.relative_volume * 12 ** 1.5 * TETRA_VOLUME, rel=1e-12)


def test_rigid_motion_invariance(embed_2_1):
    m, emb = embed_2_1
    rng = np.random.default_rng(11)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    moved = Embedding(emb.positions @ q.T + np.array([2.5, -1.0, 0.25]), emb.residual,
                      True, emb.iterations)
    assert abs(volume(moved, m) - volume(emb, m)) < 1e-12
    assert abs(edge_residual(m, moved.positions) - edge_residual(m, emb.positions)) < 1e-12
    for v in [0, 3, 9]:
        assert abs(solid_angle(moved, m, v) - solid_angle(emb, m, v)) < 1e-9


def test_gauss_bonnet_on_converged(embed_1_1, embed_2_1):
    for m, emb in (embed_1_1, embed_2_1):
        pos = emb.positions
        defect = 2.0 * math.pi * m.vertex_total
        for tri in m.faces:
            p = pos[tri]
            for i in range(3):
                u = p[(i + 1) % 3] - p[i]
                w = p[(i + 2) % 3] - p[i]
                cosang = np.dot(u, w) / (np.linalg.norm(u) * np.linalg.norm(w))
                defect -= math.acos(np.clip(cosang, -1.0, 1.0))
        assert defect == pytest.approx(4.0 * math.pi, abs=1e-6)


def test_relax_determinism(mesh):
    m = mesh(1, 1)
    cfg = RelaxConfig(seed=5)
    e1 = relax(m, initial_guess(m, cfg), cfg)
    e2 = relax(m, initial_guess(m, cfg), cfg)
    assert np.array_equal(e1.positions, e2.positions)
    assert e1.residual == e2.residual and e1.iterations == e2.iterations


def test_relax_max_volume_deterministic(mesh):
    m = mesh(1, 1)
    cfg = RelaxConfig(restarts=3, seed=1)
    e1 = relax_max_volume(m, cfg)
    e2 = relax_max_volume(m, cfg)
    assert np.array_equal(e1.positions, e2.positions)
    assert e1.attempts == e2.attempts


def test_nonconvergence_reports_residual(mesh):
    m = mesh(2, 2)
    cfg = RelaxConfig(max_iterations=40, restarts=2)
    with pytest.raises(ConvergenceError) as err:
        relax_max_volume(m, cfg)
    assert math.isfinite(err.value.best_residual)
    assert err.value.best_residual > 1e-9


def test_relax_nonconverged_returns_best_state(mesh):
    m = mesh(2, 2)
    cfg = RelaxConfig(max_iterations=40)
    emb = relax(m, initial_guess(m, cfg), cfg)
    assert not emb.converged
    assert emb.residual == pytest.approx(edge_residual(m, emb.positions), abs=1e-15)


def test_gauge_fix_properties(embed_2_1):
    m, emb = embed_2_1
    g = gauge_fix(emb.positions)
    assert np.allclose(g.mean(axis=0), 0.0, atol=1e-12)
    cov = g.T @ g
    off = cov - np.diag(np.diag(cov))
    assert np.allclose(off, 0.0, atol=1e-9)
    d = np.linalg.norm(emb.positions[0] - emb.positions[1])
    assert np.linalg.norm(g[0] - g[1]) == pytest.approx(d, abs=1e-12)  # rigid


def test_write_obj_runs_and_is_deterministic(embed_1_1):
    m, emb = embed_1_1
    text1 = write_obj(emb, m)
    text2 = write_obj(emb, m)
    assert text1 == text2
    lines = text1.strip().split("\n")
    assert sum(1 for ln in lines if ln.startswith("v ")) == m.vertex_total
    assert sum(1 for ln in lines if ln.startswith("f ")) == m.face_total


def test_config_validation():
    with pytest.raises(ValueError):
        RelaxConfig(tolerance=0.0)
    with pytest.raises(ValueError):
        RelaxConfig(max_iterations=0)
    with pytest.raises(ValueError):
        RelaxConfig(inflation_pressure=(0.2, 1.5))
    with pytest.raises(ValueError):
        RelaxConfig(restarts=0)
