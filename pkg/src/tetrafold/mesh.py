"""Combinatorial deltahedron meshes built as lattice quotients.

`build_mesh(a, b)` folds the plane's unit triangles through the tiling
group of the (a, b) unfolding: faces are triangle orbits, vertices are
grid-point orbits, and adjacency is lattice adjacency pushed through the
quotient.  The result is a closed oriented triangulated surface with
F = 4(a^2 + ab + b^2) faces stored in a half-edge structure.

Half-edge convention: face f with vertex triple (v0, v1, v2) owns the
directed edges h = 3f + i running from corner i to corner i+1 (mod 3).
`twin[h]` is the oppositely directed edge of the neighbouring face.
Up triangles of the lattice become counterclockwise faces, so a proper
embedding with outward normals has positive signed volume.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .lattice import (
    GridCoord,
    Isometry,
    LatticeTriangle,
    Orient,
    TilingGroup,
    s_triangles,
    tiling_group,
)


class MeshError(Exception):
    """Raised when mesh construction produces an inconsistent surface."""


def face_count(a: int, b: int) -> int:
    """Number of faces of deltahedron (a, b): 4(a^2 + ab + b^2)."""
    if a < 0 or b < 0 or (a == 0 and b == 0):
        raise ValueError(f"invalid parameters ({a}, {b}): need a, b >= 0, not both 0")
    return s_triangles(a, b)


def _lattice_neighbors(t: LatticeTriangle) -> list[LatticeTriangle]:
    """Neighbours across the three edges, ordered by local edge index.

    Edge i of a face runs from corner i to corner i+1 (see corners()).
    """
    p, q = t.anchor.p, t.anchor.q
    if t.orient == Orient.UP:
        return [
            LatticeTriangle(GridCoord(p, q - 1), Orient.DOWN),  # bottom
            LatticeTriangle(GridCoord(p, q), Orient.DOWN),      # hypotenuse
            LatticeTriangle(GridCoord(p - 1, q), Orient.DOWN),  # left
        ]
    return [
        LatticeTriangle(GridCoord(p + 1, q), Orient.UP),        # right
        LatticeTriangle(GridCoord(p, q + 1), Orient.UP),        # top
        LatticeTriangle(GridCoord(p, q), Orient.UP),            # hypotenuse
    ]


@dataclass(eq=False)
class DeltaMesh:
    """Closed oriented triangulated surface of deltahedron (a, b).

    Treat instances as immutable; construction validates manifoldness.
    """

    a: int
    b: int
    faces: np.ndarray          # (F, 3) vertex ids, counterclockwise
    twin: np.ndarray           # (3F,) half-edge twins
    face_reps: list[LatticeTriangle]
    vertex_reps: list[GridCoord]
    group: TilingGroup
    _cycles: dict = field(default_factory=dict, repr=False)

    @property
    def face_total(self) -> int:
        return len(self.faces)

    @property
    def edge_total(self) -> int:
        return 3 * len(self.faces) // 2

    @property
    def vertex_total(self) -> int:
        return len(self.vertex_reps)

    def edges(self) -> np.ndarray:
        """(E, 2) array of undirected edges as vertex-id pairs."""
        h = np.arange(3 * len(self.faces))
        keep = h < self.twin[h]
        f, i = h[keep] // 3, h[keep] % 3
        src = self.faces[f, i]
        dst = self.faces[f, (i + 1) % 3]
        return np.stack([src, dst], axis=1)

    def half_edge_vertices(self, h: int) -> tuple[int, int]:
        f, i = h // 3, h % 3
        return int(self.faces[f, i]), int(self.faces[f, (i + 1) % 3])

    def vertex_degrees(self) -> np.ndarray:
        deg = np.zeros(self.vertex_total, dtype=np.int64)
        np.add.at(deg, self.faces.ravel(), 1)
        return deg

    def vertex_cycle(self, v: int) -> list[int]:
        """Neighbour vertex ids around v, ordered by face orientation."""
        if not self._cycles:
            self._build_cycles()
        return self._cycles[v][0]

    def vertex_faces(self, v: int) -> list[int]:
        """Incident face ids around v, in the same cyclic order."""
        if not self._cycles:
            self._build_cycles()
        return self._cycles[v][1]

    def _build_cycles(self) -> None:
        out: dict[int, int] = {}
        for h in range(3 * len(self.faces)):
            src = self.faces[h // 3, h % 3]
            out.setdefault(int(src), h)
        for v in range(self.vertex_total):
            h0 = out[v]
            nbrs, fcs = [], []
            h = h0
            while True:
                f, i = h // 3, h % 3
                nbrs.append(int(self.faces[f, (i + 1) % 3]))
                fcs.append(f)
                h = int(self.twin[3 * f + (i + 2) % 3])
                if h == h0:
                    break
                if len(nbrs) > 3 * len(self.faces):
                    raise MeshError(f"vertex {v} has a non-closing umbrella")
            self._cycles[v] = (nbrs, fcs)

    def validate(self) -> None:
        """Check closed-manifold structure; raises MeshError on failure."""
        f_total = len(self.faces)
        if self.twin.shape != (3 * f_total,):
            raise MeshError("twin array has wrong shape")
        h = np.arange(3 * f_total)
        if np.any(self.twin[self.twin] != h):
            raise MeshError("twin is not an involution")
        if np.any(self.twin == h):
            raise MeshError("half-edge paired with itself")
        # twins must run between the same vertices, oppositely directed
        f, i = h // 3, h % 3
        src, dst = self.faces[f, i], self.faces[f, (i + 1) % 3]
        tf, ti = self.twin // 3, self.twin % 3
        tsrc, tdst = self.faces[tf, ti], self.faces[tf, (ti + 1) % 3]
        if np.any(src != tdst) or np.any(dst != tsrc):
            raise MeshError("twin half-edges do not reverse their endpoints")
        if np.any(src == dst):
            raise MeshError("degenerate half-edge (loop)")
        expected_v = f_total // 2 + 2
        if self.vertex_total != expected_v:
            raise MeshError(
                f"vertex count {self.vertex_total} != F/2 + 2 = {expected_v}"
            )
        # each vertex umbrella must be a single cycle covering its corners
        self._cycles.clear()
        self._build_cycles()
        deg = self.vertex_degrees()
        for v in range(self.vertex_total):
            if len(self._cycles[v][0]) != deg[v]:
                raise MeshError(f"vertex {v} umbrella does not cover all corners")
        if deg.min() < 3:
            raise MeshError("vertex of degree < 3")

    def to_json_dict(self) -> dict:
        """JSON document: parameters, counts, faces, lattice anchors."""
        return {
            "a": self.a,
            "b": self.b,
            "counts": {
                "faces": self.face_total,
                "edges": self.edge_total,
                "vertices": self.vertex_total,
            },
            "faces": self.faces.tolist(),
            "face_anchors": [
                [t.anchor.p, t.anchor.q, "up" if t.orient == Orient.UP else "down"]
                for t in self.face_reps
            ],
            "vertex_anchors": [[z.p, z.q] for z in self.vertex_reps],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)


def build_mesh(a: int, b: int) -> DeltaMesh:
    """Build the combinatorial deltahedron (a, b) by lattice quotient."""
    face_count(a, b)  # validates the pair
    g = tiling_group(a, b)
    canon = {g.canonicalize(t)[0] for t in g.cell_triangles()}
    if len(canon) != g.s:
        raise MeshError(f"quotient produced {len(canon)} faces, expected {g.s}")
    face_reps = sorted(canon, key=LatticeTriangle.key)
    face_index = {t: i for i, t in enumerate(face_reps)}

    vertex_set = {g.canonicalize_point(c)[0] for t in face_reps for c in t.corners()}
    vertex_reps = sorted(vertex_set, key=GridCoord.key)
    vertex_index = {z: i for i, z in enumerate(vertex_reps)}

    faces = np.array(
        [[vertex_index[g.canonicalize_point(c)[0]] for c in t.corners()] for t in face_reps],
        dtype=np.int32,
    )

    twin = np.full(3 * len(face_reps), -1, dtype=np.int32)
    for f, t in enumerate(face_reps):
        corners = t.corners()
        for i, nbr in enumerate(_lattice_neighbors(t)):
            rep, iso = g.canonicalize(nbr)
            nf = face_index.get(rep)
            if nf is None:
                raise MeshError(f"neighbour of face {f} missing from quotient")
            # the isometry carries the shared edge into the stored
            # neighbour; find which of its sides that is
            shared_a = iso.apply(corners[i])
            shared_b = iso.apply(corners[(i + 1) % 3])
            nbr_corners = rep.corners()
            for j in range(3):
                if nbr_corners[j] == shared_b and nbr_corners[(j + 1) % 3] == shared_a:
                    twin[3 * f + i] = 3 * nf + j
                    break
            else:
                raise MeshError(f"shared edge of faces {f}, {nf} not found")

    mesh = DeltaMesh(a=a, b=b, faces=faces, twin=twin, face_reps=face_reps,
                     vertex_reps=vertex_reps, group=g)
    mesh.validate()
    return mesh


def mirror_mesh(m: DeltaMesh) -> DeltaMesh:
    """Orientation-reversed copy; combinatorially the (b, a) deltahedron.

    Vertex ids are preserved; each face triple (v0, v1, v2) becomes
    (v0, v2, v1) and the half-edge structure is rebuilt to match.
    """
    faces = m.faces[:, [0, 2, 1]].copy()
    # new half-edge i of a face is the reverse of old half-edge r(i),
    # with r = (0 2 1) within the face; twins transport along r
    f = np.arange(3 * len(faces)) // 3
    i = np.arange(3 * len(faces)) % 3
    rmap = 3 * f + np.where(i == 0, 2, np.where(i == 2, 0, 1))
    twin = np.empty_like(m.twin)
    twin[rmap] = rmap[m.twin]

    g = tiling_group(m.b, m.a)
    swap = lambda z: GridCoord(z.q, z.p)  # noqa: E731 - reflection p <-> q
    face_reps = [
        g.canonicalize(LatticeTriangle(swap(t.anchor), t.orient))[0] for t in m.face_reps
    ]
    vertex_reps = [g.canonicalize_point(swap(z))[0] for z in m.vertex_reps]
    mesh = DeltaMesh(a=m.b, b=m.a, faces=faces, twin=twin.astype(np.int32),
                     face_reps=face_reps, vertex_reps=vertex_reps, group=g)
    mesh.validate()
    return mesh


def map_isomorphic(m1: DeltaMesh, m2: DeltaMesh) -> bool:
    """Oriented combinatorial-map isomorphism test.

    Propagates a half-edge correspondence through `next` and `twin` from
    every possible anchoring; succeeds iff some anchoring extends to a
    full bijection.  Implies graph isomorphism of the 1-skeletons.
    """
    if len(m1.faces) != len(m2.faces) or m1.vertex_total != m2.vertex_total:
        return False
    d1 = np.sort(m1.vertex_degrees())
    d2 = np.sort(m2.vertex_degrees())
    if np.any(d1 != d2):
        return False
    n = 3 * len(m1.faces)
    deg1, deg2 = m1.vertex_degrees(), m2.vertex_degrees()

    def src_vertex(m, h):
        return int(m.faces[h // 3, h % 3])

    def nxt(h):
        return 3 * (h // 3) + (h % 3 + 1) % 3

    for h2_start in range(n):
        if deg2[src_vertex(m2, h2_start)] != deg1[src_vertex(m1, 0)]:
            continue
        corr = np.full(n, -1, dtype=np.int64)
        corr[0] = h2_start
        stack = [0]
        ok = True
        while stack and ok:
            h1 = stack.pop()
            h2 = corr[h1]
            if deg1[src_vertex(m1, h1)] != deg2[src_vertex(m2, h2)]:
                ok = False
                break
            for a1, a2 in ((nxt(h1), nxt(h2)), (int(m1.twin[h1]), int(m2.twin[h2]))):
                if corr[a1] == -1:
                    corr[a1] = a2
                    stack.append(a1)
                elif corr[a1] != a2:
                    ok = False
                    break
        if ok and np.all(corr >= 0) and len(set(corr.tolist())) == n:
            return True
    return False
