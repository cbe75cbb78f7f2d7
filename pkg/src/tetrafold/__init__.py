"""Geodesic foldings of the regular tetrahedron.

Folding the surface of a regular tetrahedron along a unit triangular
grid yields a family of deltahedra indexed by nonnegative integers
(a, b).  This package builds those surfaces combinatorially, decomposes
them into geodesic bands, enumerates parameter pairs whose bands
coincide, and embeds the meshes in 3-space with unit edge lengths.
"""

from .lattice import (
    GridCoord,
    Isometry,
    LatticeTriangle,
    Orient,
    TilingGroup,
    canonical_triangle,
    tiling_group,
    to_euclid,
)
from .mesh import DeltaMesh, MeshError, build_mesh, face_count, map_isomorphic, mirror_mesh
from .bands import (
    GeodesicBand,
    PlanarStrip,
    band_count,
    no_half_turn_in_band,
    strip_svg,
    trace_bands,
    unfold_band,
)
from .classify import SValueGroup, enumerate_common, s_value
from .embed import (
    ConvergenceError,
    Embedding,
    Metrics,
    RelaxConfig,
    VolumeTable,
    all_popped,
    compute_metrics,
    edge_residual,
    geodesic_positions,
    initial_guess,
    relative_volume,
    relax,
    relax_max_volume,
    solid_angle,
    volume,
    volume_table,
    write_obj,
)

__version__ = "0.1.0"

__all__ = [
    "GridCoord", "Isometry", "LatticeTriangle", "Orient", "TilingGroup",
    "canonical_triangle", "tiling_group", "to_euclid",
    "DeltaMesh", "MeshError", "build_mesh", "face_count", "map_isomorphic",
    "mirror_mesh",
    "GeodesicBand", "PlanarStrip", "band_count", "no_half_turn_in_band",
    "strip_svg", "trace_bands", "unfold_band",
    "SValueGroup", "enumerate_common", "s_value",
    "ConvergenceError", "Embedding", "Metrics", "RelaxConfig", "VolumeTable",
    "all_popped", "compute_metrics", "edge_residual", "geodesic_positions",
    "initial_guess", "relative_volume", "relax", "relax_max_volume",
    "solid_angle", "volume", "volume_table", "write_obj",
]
