"""P1 stiffness and mass assembly.

Local matrices come from the Gram matrix of each triangle's edge vectors, so
the same kernel serves 2D chart and 3D embedded vertices:

    K_loc = area · B G⁻¹ Bᵀ,   M_loc = area/12 · [[2,1,1],[1,2,1],[1,1,2]],

with ``B`` the reference gradients of the barycentric coordinates.
"""

from __future__ import annotations

import numpy as np
import scipy.io
import scipy.sparse as sp

from .._accel import HAVE_NUMBA, njit
from ..errors import DegenerateCell
from .mesh import AREA_MIN, Mesh

_B = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
_MREF = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0


@njit(cache=True)
def _local_loop(verts, cells):
    nc = cells.shape[0]
    dim = verts.shape[1]
    kval = np.empty((nc, 3, 3))
    mval = np.empty((nc, 3, 3))
    area = np.empty(nc)
    B = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
    for c in range(nc):
        a, b, d = cells[c, 0], cells[c, 1], cells[c, 2]
        g11 = 0.0
        g12 = 0.0
        g22 = 0.0
        for t in range(dim):
            e1 = verts[b, t] - verts[a, t]
            e2 = verts[d, t] - verts[a, t]
            g11 += e1 * e1
            g12 += e1 * e2
            g22 += e2 * e2
        det = g11 * g22 - g12 * g12
        if det < 0.0:
            det = 0.0
        ar = 0.5 * np.sqrt(det)
        area[c] = ar
        if ar <= 1e-14:
            continue
        i11 = g22 / det
        i12 = -g12 / det
        i22 = g11 / det
        for i in range(3):
            for j in range(3):
                kval[c, i, j] = ar * (B[i, 0] * (i11 * B[j, 0] + i12 * B[j, 1])
                                      + B[i, 1] * (i12 * B[j, 0] + i22 * B[j, 1]))
                mval[c, i, j] = ar * (2.0 if i == j else 1.0) / 12.0
    return kval, mval, area


def _local_numpy(verts, cells):
    p = verts[cells]
    e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    g11 = np.einsum("ij,ij->i", e1, e1)
    g22 = np.einsum("ij,ij->i", e2, e2)
    g12 = np.einsum("ij,ij->i", e1, e2)
    det = np.maximum(g11 * g22 - g12 * g12, 0.0)
    area = 0.5 * np.sqrt(det)
    safe = np.where(area > AREA_MIN, det, 1.0)
    ginv = np.empty((len(cells), 2, 2))
    ginv[:, 0, 0] = g22 / safe
    ginv[:, 0, 1] = ginv[:, 1, 0] = -g12 / safe
    ginv[:, 1, 1] = g11 / safe
    kval = area[:, None, None] * np.einsum("ia,cab,jb->cij", _B, ginv, _B)
    mval = area[:, None, None] * _MREF[None, :, :]
    return kval, mval, area


def local_matrices(mesh: Mesh, use_numba: bool | None = None):
    """Per-cell ``(K_loc, M_loc, area)`` arrays of shapes ``(C,3,3)``, ``(C,3,3)``, ``(C,)``."""
    if use_numba is None:
        use_numba = HAVE_NUMBA
    fn = _local_loop if use_numba else _local_numpy
    return fn(mesh.vertices, mesh.cells)


def assemble(mesh: Mesh, potential: float = 0.0, use_numba: bool | None = None):
    """Global ``(K, M)`` in CSR form with ``K = K₀ - potential · M``.

    ``K₀`` is the P1 Dirichlet-energy matrix, so ``fᵀ K f`` discretizes the
    Jacobi form ``∫|∇f|² - potential f²``.  Neumann conditions are natural.
    Periodic slaves are merged into their masters after the local matrices
    are formed.
    """
    if not np.isfinite(potential):
        raise ValueError("potential must be finite")
    kval, mval, area = local_matrices(mesh, use_numba)
    bad = np.flatnonzero(~(area > AREA_MIN))
    if bad.size:
        raise DegenerateCell(f"cell {int(bad[0])} has area {area[bad[0]]:.3e} <= {AREA_MIN:g}")
    dof = mesh.dof_map()
    n = int(dof.max()) + 1
    cd = dof[mesh.cells]
    rows = np.repeat(cd, 3, axis=1).ravel()
    cols = np.tile(cd, (1, 3)).ravel()
    K0 = sp.csr_matrix((kval.ravel(), (rows, cols)), shape=(n, n))
    M = sp.csr_matrix((mval.ravel(), (rows, cols)), shape=(n, n))
    K0.sum_duplicates()
    M.sum_duplicates()
    # exact symmetry (the local matrices are symmetric up to rounding)
    K0 = ((K0 + K0.T) * 0.5).tocsr()
    M = ((M + M.T) * 0.5).tocsr()
    K = (K0 - potential * M).tocsr() if potential else K0
    return K, M


def dump_matrix_market(path, matrix, comment: str = ""):
    """Write a sparse matrix in Matrix Market coordinate format."""
    scipy.io.mmwrite(str(path), sp.coo_matrix(matrix), comment=comment, symmetry="general")
