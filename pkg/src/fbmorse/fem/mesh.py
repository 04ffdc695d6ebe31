"""Triangle meshes for the n = 2 models.

Curved models (equator, caps) use a geodesic hemisphere embedded in R^3.
Tori are intrinsically flat, so they use an isometric rectangular chart with
the periodic direction identified through ``periodic_pairs``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import DegenerateCell

AREA_MIN = 1e-14


class MetricMode(str, Enum):
    EMBEDDED = "Embedded"
    FLAT_CHART = "FlatChart"


@dataclass
class Mesh:
    """Vertices, triangles and boundary data.

    ``periodic_pairs[i] = (slave, master)`` identifies two vertices; the
    slave's degree of freedom is merged into the master's at assembly.
    """

    vertices: np.ndarray
    cells: np.ndarray
    boundary_vertices: np.ndarray
    metric_mode: MetricMode
    periodic_pairs: np.ndarray = field(default_factory=lambda: np.empty((0, 2), dtype=np.int64))
    period: Optional[float] = None

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=float)
        self.cells = np.ascontiguousarray(self.cells, dtype=np.int64)
        self.boundary_vertices = np.unique(np.asarray(self.boundary_vertices, dtype=np.int64))
        self.periodic_pairs = np.asarray(self.periodic_pairs, dtype=np.int64).reshape(-1, 2)
        self.metric_mode = MetricMode(self.metric_mode)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def dof_map(self) -> np.ndarray:
        """Vertex -> degree-of-freedom index after merging periodic slaves."""
        target = np.arange(self.num_vertices)
        if len(self.periodic_pairs):
            target[self.periodic_pairs[:, 0]] = self.periodic_pairs[:, 1]
            # chains (corner vertices) resolve in at most a couple of passes
            for _ in range(3):
                target = target[target]
        _, dof = np.unique(target, return_inverse=True)
        return dof.astype(np.int64)

    @property
    def num_dofs(self) -> int:
        return int(self.dof_map().max()) + 1

    def cell_areas(self) -> np.ndarray:
        p = self.vertices[self.cells]
        e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        g11 = np.einsum("ij,ij->i", e1, e1)
        g22 = np.einsum("ij,ij->i", e2, e2)
        g12 = np.einsum("ij,ij->i", e1, e2)
        return 0.5 * np.sqrt(np.maximum(g11 * g22 - g12 * g12, 0.0))

    def area(self) -> float:
        return float(math.fsum(self.cell_areas()))

    def max_edge(self) -> float:
        p = self.vertices[self.cells]
        return float(max(np.linalg.norm(p[:, i] - p[:, (i + 1) % 3], axis=1).max() for i in range(3)))

    def validate(self):
        """Raise :class:`DegenerateCell` for tiny cells; check periodic/boundary consistency."""
        areas = self.cell_areas()
        bad = np.flatnonzero(~(areas > AREA_MIN))
        if bad.size:
            raise DegenerateCell(f"cell {int(bad[0])} has area {areas[bad[0]]:.3e} <= {AREA_MIN:g}")
        if len(self.periodic_pairs):
            s, t = self.periodic_pairs[:, 0], self.periodic_pairs[:, 1]
            if np.intersect1d(s, t).size:
                raise ValueError("periodic identification must map slaves to masters only")
            on_b = np.isin(np.arange(self.num_vertices), self.boundary_vertices)
            if np.any(on_b[s] != on_b[t]):
                raise ValueError("periodic identification must preserve the boundary set")
        return self

    # -- OFF --------------------------------------------------------------

    def to_off(self, path=None) -> str:
        lines = ["OFF", f"# metric_mode {self.metric_mode.value}"]
        if self.period is not None:
            lines.append(f"# periodic x {float(self.period)!r}")
        lines.append("# boundary " + " ".join(str(int(i)) for i in self.boundary_vertices))
        lines.append(f"{self.num_vertices} {len(self.cells)} 0")
        for v in self.vertices:
            xyz = list(v) + [0.0] * (3 - len(v))
            lines.append(" ".join(repr(float(c)) for c in xyz))
        for c in self.cells:
            lines.append(f"3 {c[0]} {c[1]} {c[2]}")
        text = "\n".join(lines) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_off(cls, source) -> "Mesh":
        """Read a mesh written by :meth:`to_off` (or a plain OFF triangle mesh)."""
        text = Path(source).read_text() if not str(source).lstrip().startswith("OFF") else str(source)
        mode, period, boundary = MetricMode.EMBEDDED, None, None
        body = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                tok = line[1:].split()
                if tok[:1] == ["metric_mode"]:
                    mode = MetricMode(tok[1])
                elif tok[:2] == ["periodic", "x"]:
                    period = float(tok[2])
                elif tok[:1] == ["boundary"]:
                    boundary = [int(t) for t in tok[1:]]
                continue
            body.append(line)
        if not body or body[0] != "OFF":
            raise ValueError("not an OFF file")
        nv, nf = (int(t) for t in body[1].split()[:2])
        verts = np.array([[float(t) for t in body[2 + i].split()[:3]] for i in range(nv)])
        cells = np.array([[int(t) for t in body[2 + nv + i].split()[1:4]] for i in range(nf)], dtype=np.int64)
        if mode is MetricMode.FLAT_CHART:
            verts = verts[:, :2]
        pairs = np.empty((0, 2), dtype=np.int64)
        if period is not None:
            pairs = _periodic_pairs(verts, period)
        if boundary is None:
            boundary = _guess_boundary(verts, mode)
        return cls(verts, cells, boundary, mode, pairs, period)


def _periodic_pairs(verts, period, tol=1e-9):
    x0 = np.flatnonzero(np.abs(verts[:, 0]) < tol)
    x1 = np.flatnonzero(np.abs(verts[:, 0] - period) < tol)
    by_y = {round(float(verts[i, 1]) / tol): i for i in x0}
    pairs = []
    for j in x1:
        i = by_y.get(round(float(verts[j, 1]) / tol))
        if i is None:
            raise ValueError(f"vertex {j} on the periodic edge has no partner")
        pairs.append((j, i))
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)


def _guess_boundary(verts, mode):
    if mode is MetricMode.FLAT_CHART:
        y = verts[:, 1]
        return np.flatnonzero((np.abs(y - y.min()) < 1e-12) | (np.abs(y - y.max()) < 1e-12))
    return np.flatnonzero(np.abs(verts[:, 2]) < 1e-12)


def _subdivide(verts, cells):
    """Midpoint subdivision: every triangle becomes four."""
    edges = np.concatenate([cells[:, [0, 1]], cells[:, [1, 2]], cells[:, [2, 0]]])
    edges.sort(axis=1)
    uniq, inv = np.unique(edges, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    mids = 0.5 * (verts[uniq[:, 0]] + verts[uniq[:, 1]])
    nf = len(cells)
    m01, m12, m20 = (len(verts) + inv[i * nf:(i + 1) * nf] for i in range(3))
    a, b, c = cells[:, 0], cells[:, 1], cells[:, 2]
    new = np.concatenate([
        np.stack([a, m01, m20], axis=1),
        np.stack([m01, b, m12], axis=1),
        np.stack([m20, m12, c], axis=1),
        np.stack([m01, m12, m20], axis=1),
    ])
    return np.concatenate([verts, mids]), new


def mesh_hemisphere(refine: int, radius: float = 1.0) -> Mesh:
    """Geodesic triangulation of the upper hemisphere of radius ``radius``.

    The four upper faces of the octahedron are subdivided ``refine`` times
    and projected back to the sphere; the boundary is the polygonal equator.
    """
    if not isinstance(refine, (int, np.integer)) or not 0 <= refine <= 8:
        raise ValueError(f"refine must be an integer in 0..8, got {refine!r}")
    verts = np.array([[1.0, 0, 0], [0, 1.0, 0], [-1.0, 0, 0], [0, -1.0, 0], [0, 0, 1.0]])
    cells = np.array([[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]], dtype=np.int64)
    for _ in range(refine):
        verts, cells = _subdivide(verts, cells)
        verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    boundary = np.flatnonzero(verts[:, 2] == 0.0)
    return Mesh(radius * verts, cells, boundary, MetricMode.EMBEDDED).validate()


def mesh_flat_half_torus(r1: float, r2: float, nx: int, ny: int) -> Mesh:
    """Chart of ``S^1(r1) x S^1_+(r2)``: ``[0, 2π r1]`` periodic times ``[0, π r2]``.

    Vertices on ``x = 2π r1`` are identified with those on ``x = 0``; the
    two ends ``y = 0`` and ``y = π r2`` are the (Neumann) boundary.
    """
    if nx < 4 or ny < 4:
        raise ValueError("nx and ny must be >= 4")
    if not (r1 > 0 and r2 > 0):
        raise ValueError("radii must be positive")
    lx, ly = 2 * math.pi * r1, math.pi * r2
    xs = np.linspace(0.0, lx, nx + 1)
    ys = np.linspace(0.0, ly, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    verts = np.stack([X.ravel(), Y.ravel()], axis=1)
    idx = np.arange((nx + 1) * (ny + 1)).reshape(nx + 1, ny + 1)
    v00, v10 = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel()
    v01, v11 = idx[:-1, 1:].ravel(), idx[1:, 1:].ravel()
    cells = np.concatenate([np.stack([v00, v10, v11], 1), np.stack([v00, v11, v01], 1)])
    boundary = np.concatenate([idx[:, 0], idx[:, -1]])
    pairs = np.stack([idx[-1, :], idx[0, :]], axis=1)
    return Mesh(verts, cells, boundary, MetricMode.FLAT_CHART, pairs, float(lx)).validate()
