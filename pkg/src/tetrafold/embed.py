"""Numerical embedding of deltahedra with unit edge lengths.

The mesh vertices start at their geodesic positions on the source
regular tetrahedron (an exact isometric placement, flat across the fold
lines) and are driven to a unit-edge state by dynamic relaxation:
explicit integration of per-edge restoring forces with kinetic damping,
plus a decaying inflation pressure along area-weighted vertex normals
that pushes the surface off the flat branch.  Volumes, solid angles and
the relative-volume table are computed from converged states.

Relative volume normalizes by the regular tetrahedron of equal surface
area: the denominator is (S/4)^(3/2) * V_T with V_T = 1/(6*sqrt(2)).
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp

from .lattice import GridCoord, Orient, TilingGroup
from .mesh import DeltaMesh

TETRA_VOLUME = 1.0 / (6.0 * math.sqrt(2.0))

#: residual beyond which an attempt is declared diverged and abandoned
DIVERGENCE_LIMIT = 1e4


class ConvergenceError(Exception):
    """No relaxation attempt converged; carries the best residual seen."""

    def __init__(self, message: str, best_residual: float):
        super().__init__(message)
        self.best_residual = best_residual


@dataclass(frozen=True)
class RelaxConfig:
    """Solver parameters; identical config and seed give identical output."""

    tolerance: float = 1e-9
    max_iterations: int = 200_000
    time_step: float = 0.05
    damping: bool = True
    inflation_pressure: tuple[float, float] = (0.2, 0.999)  # (initial, decay)
    restarts: int = 8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations <= 0:
            raise ValueError("max_iterations must be positive")
        if self.time_step <= 0:
            raise ValueError("time_step must be positive")
        if not 0 < self.inflation_pressure[1] <= 1:
            raise ValueError("pressure decay must lie in (0, 1]")
        if self.restarts <= 0:
            raise ValueError("restarts must be positive")


@dataclass(frozen=True)
class AttemptRecord:
    """Outcome of one seeded relaxation attempt."""

    seed: int
    pressure: float
    converged: bool
    residual: float
    iterations: int
    volume: float


@dataclass
class Embedding:
    """3D vertex positions with the achieved unit-edge residual."""

    positions: np.ndarray
    residual: float
    converged: bool
    iterations: int
    attempts: tuple[AttemptRecord, ...] = ()


@dataclass(frozen=True)
class Metrics:
    volume: float
    relative_volume: float
    min_solid_angle: float
    max_solid_angle: float
    all_popped: bool


def _tetra_vertices(edge: float) -> np.ndarray:
    # corner order chosen so the lattice orientation folds to outward
    # normals (positive signed volume)
    base = np.array(
        [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
    )
    return base * (edge / (2.0 * math.sqrt(2.0)))


def _cross2(o: tuple[int, int], u: tuple[int, int], v: tuple[int, int]) -> int:
    return (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0])


def geodesic_positions(m: DeltaMesh) -> np.ndarray:
    """Exact vertex positions on the source tetrahedron surface.

    Each canonical vertex point is moved into the unfolding triangle
    conv(0, u, v) by the half-turn about w1 + w2 if necessary, located in
    one of the four net faces by integer barycentric coordinates, and
    mapped onto the matching 3D tetrahedron face.
    """
    g = m.group
    w1 = (g.w1.p, g.w1.q)
    w2 = (g.w2.p, g.w2.q)
    w3 = (w1[0] + w2[0], w1[1] + w2[1])
    u = (g.u.p, g.u.q)
    v = (g.v.p, g.v.q)
    corners3d = _tetra_vertices(math.sqrt(g.s / 4.0))
    # net faces as grid triangles with the 3D corner each maps to
    net = [
        (((0, 0), w1, w2), (0, 1, 2)),
        ((w1, w2, w3), (1, 2, 3)),
        ((w1, u, w3), (1, 0, 3)),
        ((w2, w3, v), (2, 3, 0)),
    ]
    pos = np.zeros((m.vertex_total, 3))
    for idx, rep in enumerate(m.vertex_reps):
        z = (rep.p, rep.q)
        if not (
            _cross2((0, 0), u, z) >= 0
            and _cross2(u, v, z) >= 0
            and _cross2(v, (0, 0), z) >= 0
        ):
            z = (u[0] + v[0] - z[0], u[1] + v[1] - z[1])
        for (t0, t1, t2), cls in net:
            d = _cross2(t0, t1, t2)
            b0 = _cross2(t1, t2, z)
            b1 = _cross2(t2, t0, z)
            b2 = _cross2(t0, t1, z)
            if b0 * d >= 0 and b1 * d >= 0 and b2 * d >= 0:
                w = np.array([b0, b1, b2], dtype=float) / d
                pos[idx] = w @ corners3d[list(cls)]
                break
        else:
            raise RuntimeError(f"vertex {rep} not inside the unfolding net")
    return pos


def _vertex_normals(pos: np.ndarray, faces: np.ndarray) -> np.ndarray:
    """Area-weighted vertex normals (sum of incident face area vectors)."""
    fn = np.cross(pos[faces[:, 1]] - pos[faces[:, 0]],
                  pos[faces[:, 2]] - pos[faces[:, 0]]) / 2.0
    out = np.zeros_like(pos)
    np.add.at(out, faces[:, 0], fn)
    np.add.at(out, faces[:, 1], fn)
    np.add.at(out, faces[:, 2], fn)
    return out


def corner_vertex_ids(m: DeltaMesh) -> list[int]:
    """Ids of the four vertices that are source-tetrahedron corners."""
    return [i for i, z in enumerate(m.vertex_reps) if m.group.is_corner_point(z)]


def initial_guess(m: DeltaMesh, cfg: RelaxConfig) -> np.ndarray:
    """Geodesic positions plus a seeded outward normal perturbation.

    Non-corner vertices move outward along their (normalized)
    area-weighted normals by uniform random amounts in [0, 0.1]; the four
    corner vertices stay fixed, so (n, 0) starts exactly on the solution.
    """
    pos = geodesic_positions(m)
    rng = np.random.default_rng(cfg.seed)
    mags = rng.uniform(0.0, 0.1, m.vertex_total)
    mags[corner_vertex_ids(m)] = 0.0
    normals = _vertex_normals(pos, m.faces)
    norms = np.linalg.norm(normals, axis=1, keepdims=True)
    unit = normals / np.maximum(norms, 1e-30)
    return pos + mags[:, None] * unit


def edge_residual(m: DeltaMesh, positions: np.ndarray) -> float:
    """Max |edge length - 1| over all edges."""
    e = m.edges()
    lens = np.linalg.norm(positions[e[:, 1]] - positions[e[:, 0]], axis=1)
    return float(np.max(np.abs(lens - 1.0)))


def relax(m: DeltaMesh, p0: np.ndarray, cfg: RelaxConfig) -> Embedding:
    """Dynamically relax starting positions to unit edge lengths.

    Explicit time stepping (unit vertex mass, unit edge stiffness):
    each edge applies a restoring force (1 - length) along itself, the
    inflation pressure acts along area-weighted vertex normals and
    decays geometrically per step, and all velocities are zeroed
    whenever the kinetic energy drops.  Stops at residual <= tolerance
    or max_iterations; a non-converged result reports the best state
    reached, which is meaningful data for shapes whose embedding is not
    established.
    """
    edges = m.edges()
    e0, e1 = edges[:, 0], edges[:, 1]
    n_v, n_e = m.vertex_total, len(edges)
    faces = m.faces
    incidence = sp.csr_matrix(
        (
            np.concatenate([np.ones(n_e), -np.ones(n_e)]),
            (np.concatenate([e1, e0]), np.tile(np.arange(n_e), 2)),
        ),
        shape=(n_v, n_e),
    )
    face_scatter = sp.csr_matrix(
        (
            np.ones(3 * len(faces)),
            (faces.T.ravel(), np.tile(np.arange(len(faces)), 3)),
        ),
        shape=(n_v, len(faces)),
    )

    pos = np.array(p0, dtype=float)
    vel = np.zeros_like(pos)
    dt = cfg.time_step
    pressure, decay = cfg.inflation_pressure
    ke_prev = 0.0
    best_residual = math.inf
    best = pos.copy()
    iterations = 0

    for it in range(cfg.max_iterations):
        iterations = it + 1
        d = pos[e1] - pos[e0]
        lens = np.sqrt(np.einsum("ij,ij->i", d, d))
        residual = float(np.max(np.abs(lens - 1.0)))
        if not math.isfinite(residual) or residual > DIVERGENCE_LIMIT:
            return Embedding(best, best_residual, False, iterations)
        if residual < best_residual:
            best_residual = residual
            best = pos.copy()
        if residual <= cfg.tolerance:
            return Embedding(best, best_residual, True, iterations)

        force = incidence @ (((1.0 - lens) / lens)[:, None] * d)
        if abs(pressure) > 1e-12:
            fn = np.cross(pos[faces[:, 1]] - pos[faces[:, 0]],
                          pos[faces[:, 2]] - pos[faces[:, 0]]) / 2.0
            force += pressure * (face_scatter @ fn)
            pressure *= decay
        vel += dt * force
        pos += dt * vel
        if cfg.damping:
            ke = 0.5 * float(np.einsum("ij,ij->", vel, vel))
            if ke < ke_prev:
                vel[:] = 0.0
                ke_prev = 0.0
            else:
                ke_prev = ke

    return Embedding(best, best_residual, best_residual <= cfg.tolerance, iterations)


def relax_max_volume(m: DeltaMesh, cfg: RelaxConfig) -> Embedding:
    """Best converged embedding over `cfg.restarts` seeded attempts.

    Attempt i uses seed + i and pressure scaled by 2^(-i/2): large
    shapes go unstable under the full default pressure (total inflation
    force grows with enclosed size), so the ladder spans stable values
    while attempt 0 keeps the configured pressure.  Returns the converged
    attempt of largest volume (ties to the lower seed) with all attempt
    records attached; raises ConvergenceError if none converged.
    """
    p_init, decay = cfg.inflation_pressure
    records: list[AttemptRecord] = []
    best: Embedding | None = None
    best_volume = -math.inf
    for i in range(cfg.restarts):
        attempt_cfg = replace(
            cfg,
            seed=cfg.seed + i,
            inflation_pressure=(p_init * 2.0 ** (-i / 2.0), decay),
        )
        emb = relax(m, initial_guess(m, attempt_cfg), attempt_cfg)
        vol = volume(emb, m)
        records.append(
            AttemptRecord(
                seed=attempt_cfg.seed,
                pressure=attempt_cfg.inflation_pressure[0],
                converged=emb.converged,
                residual=emb.residual,
                iterations=emb.iterations,
                volume=vol,
            )
        )
        if emb.converged and vol > best_volume:
            best = emb
            best_volume = vol
    if best is None:
        raise ConvergenceError(
            f"no attempt converged for ({m.a}, {m.b})",
            best_residual=min(r.residual for r in records),
        )
    best.attempts = tuple(records)
    return best


def volume(e: Embedding, m: DeltaMesh) -> float:
    """Signed volume by the divergence theorem; positive when outward."""
    pos = e.positions
    p0 = pos[m.faces[:, 0]]
    p1 = pos[m.faces[:, 1]]
    p2 = pos[m.faces[:, 2]]
    return float(np.einsum("ij,ij->", p0, np.cross(p1, p2))) / 6.0


def relative_volume(e: Embedding, m: DeltaMesh) -> float:
    """Volume relative to the equal-surface-area regular tetrahedron."""
    return volume(e, m) / ((m.group.s / 4.0) ** 1.5 * TETRA_VOLUME)


def solid_angle(e: Embedding, m: DeltaMesh, v: int) -> float:
    """Interior solid angle of the polyhedral cone at vertex v.

    Spherical excess of the polygon cut on a unit sphere at v by the
    incident faces: the sum of the interior dihedral angles along the
    incident edges minus (n - 2)*pi.  Lies in (0, 4*pi); a dimpled
    (inverted) vertex gives the 4*pi complement of its popped twin.
    """
    pos = e.positions
    nbrs = m.vertex_cycle(v)
    n = len(nbrs)
    total = 0.0
    for i in range(n):
        d = pos[nbrs[i]] - pos[v]
        d = d / np.linalg.norm(d)
        a = pos[nbrs[i - 1]] - pos[v]
        b = pos[nbrs[(i + 1) % n]] - pos[v]
        a_perp = a - np.dot(a, d) * d
        b_perp = b - np.dot(b, d) * d
        na, nb = np.linalg.norm(a_perp), np.linalg.norm(b_perp)
        if na < 1e-12 or nb < 1e-12:
            raise ValueError(f"degenerate cone at vertex {v}: collinear edges")
        a_perp /= na
        b_perp /= nb
        dihedral = math.atan2(float(np.dot(np.cross(a_perp, b_perp), d)),
                              float(np.dot(a_perp, b_perp)))
        total += dihedral % (2.0 * math.pi)
    return total - (n - 2) * math.pi


def all_popped(e: Embedding, m: DeltaMesh) -> bool:
    """True iff every vertex solid angle lies strictly in (0, 2*pi)."""
    two_pi = 2.0 * math.pi
    return all(0.0 < solid_angle(e, m, v) < two_pi for v in range(m.vertex_total))


def compute_metrics(e: Embedding, m: DeltaMesh) -> Metrics:
    angles = [solid_angle(e, m, v) for v in range(m.vertex_total)]
    two_pi = 2.0 * math.pi
    return Metrics(
        volume=volume(e, m),
        relative_volume=relative_volume(e, m),
        min_solid_angle=min(angles),
        max_solid_angle=max(angles),
        all_popped=all(0.0 < a < two_pi for a in angles),
    )


def gauge_fix(positions: np.ndarray) -> np.ndarray:
    """Center on the vertex centroid and align principal axes.

    Axes are ordered by descending spread with deterministic sign fixing
    and a proper (det +1) rotation, so repeated runs export comparable
    geometry without mirroring it.
    """
    pos = positions - positions.mean(axis=0)
    cov = pos.T @ pos
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    axes = eigvecs[:, order]
    for k in range(3):
        col = axes[:, k]
        lead = np.argmax(np.abs(col))
        if col[lead] < 0:
            axes[:, k] = -col
    if np.linalg.det(axes) < 0:
        axes[:, 2] = -axes[:, 2]
    return pos @ axes


def write_obj(e: Embedding, m: DeltaMesh, gauge: bool = True) -> str:
    """Wavefront OBJ text for the embedded mesh (outward orientation)."""
    pos = gauge_fix(e.positions) if gauge else e.positions
    lines = [f"# deltahedron ({m.a},{m.b}); {m.vertex_total} vertices, "
             f"{m.face_total} faces"]
    for x, y, z in pos:
        lines.append(f"v {x:.9f} {y:.9f} {z:.9f}")
    for f0, f1, f2 in m.faces:
        lines.append(f"f {f0 + 1} {f1 + 1} {f2 + 1}")
    return "\n".join(lines) + "\n"


def embedding_report(m: DeltaMesh, e: Embedding, cfg: RelaxConfig) -> dict:
    """JSON-ready report of one embedding run."""
    metrics = compute_metrics(e, m)
    return {
        "a": m.a,
        "b": m.b,
        "counts": {
            "faces": m.face_total,
            "edges": m.edge_total,
            "vertices": m.vertex_total,
        },
        "config": {
            "tolerance": cfg.tolerance,
            "max_iterations": cfg.max_iterations,
            "time_step": cfg.time_step,
            "damping": cfg.damping,
            "inflation_pressure": list(cfg.inflation_pressure),
            "restarts": cfg.restarts,
            "seed": cfg.seed,
        },
        "converged": e.converged,
        "residual": e.residual,
        "iterations": e.iterations,
        "metrics": {
            "volume": metrics.volume,
            "relative_volume": metrics.relative_volume,
            "min_solid_angle": metrics.min_solid_angle,
            "max_solid_angle": metrics.max_solid_angle,
            "all_popped": metrics.all_popped,
        },
        "solid_angles": [solid_angle(e, m, v) for v in range(m.vertex_total)],
        "attempts": [
            {
                "seed": r.seed,
                "pressure": r.pressure,
                "converged": r.converged,
                "residual": r.residual,
                "iterations": r.iterations,
                "volume": r.volume,
            }
            for r in e.attempts
        ],
    }


@dataclass(frozen=True)
class TableCell:
    a: int
    b: int
    converged: bool
    relative_volume: float
    residual: float


@dataclass
class VolumeTable:
    """Upper-triangular table of relative volumes for 1 <= a <= b."""

    a_max: int
    b_max: int
    cells: dict[tuple[int, int], TableCell]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("a\\b," + ",".join(str(b) for b in range(1, self.b_max + 1)) + "\n")
        for a in range(1, self.a_max + 1):
            row = [str(a)]
            for b in range(1, self.b_max + 1):
                cell = self.cells.get((a, b))
                if cell is None:
                    row.append("")
                elif cell.converged:
                    row.append(f"{cell.relative_volume:.6f}")
                else:
                    row.append(f"NC({cell.residual:.2e})")
            buf.write(",".join(row) + "\n")
        return buf.getvalue()


def _table_cell(args: tuple[int, int, RelaxConfig]) -> TableCell:
    a, b, cfg = args
    from .mesh import build_mesh  # local import keeps workers lightweight

    m = build_mesh(a, b)
    try:
        emb = relax_max_volume(m, cfg)
        return TableCell(a, b, True, relative_volume(emb, m), emb.residual)
    except ConvergenceError as err:
        return TableCell(a, b, False, math.nan, err.best_residual)


def volume_table(a_max: int, b_max: int, cfg: RelaxConfig, jobs: int = 1) -> VolumeTable:
    """Relative volumes for all cells 1 <= a <= b (a <= a_max, b <= b_max).

    Each cell runs `relax_max_volume` independently with the same base
    config, so results do not depend on `jobs`; non-converged cells are
    recorded rather than raised.
    """
    if a_max < 1 or b_max < 1:
        raise ValueError("a_max and b_max must be at least 1")
    work = [(a, b, cfg) for a in range(1, a_max + 1) for b in range(a, b_max + 1)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_table_cell, work))
    else:
        results = [_table_cell(w) for w in work]
    return VolumeTable(a_max, b_max, {(c.a, c.b): c for c in results})
