"""Lowest eigenpairs of ``K v = λ M v``.

Small problems are reduced with a Cholesky factor of ``M`` and solved
densely.  Large ones use ARPACK in shift-invert mode with a shift below the
spectrum, so every shifted system is positive definite.  The optional
constraint ``cᵀ v = 0`` (mean-zero variations) is handled by an explicit
null-space basis in the dense path and by a bordered saddle-point solve
inside the shift-invert operator in the sparse path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import ConvergenceFailure, MassNotSPD

DENSE_MAX = 6000
RESIDUAL_TOL = 1e-8


@dataclass
class EigenResult:
    """Ascending eigenvalues with solver diagnostics.

    ``num_negative`` and ``lambda1`` are filled by the solver as a plain sign
    count; :func:`fbmorse.fem.oracle.fem_index` replaces the count with its
    gap-aware version.
    """

    eigenvalues: np.ndarray
    num_negative: int
    lambda1: float
    dof: int
    residual_norms: np.ndarray
    method: str = "dense"
    vectors: Optional[np.ndarray] = field(default=None, repr=False)
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "num_negative": int(self.num_negative),
            "lambda1": float(self.lambda1),
            "dof": int(self.dof),
            "residual_norms": [float(v) for v in self.residual_norms],
            "method": self.method,
            **self.extras,
        }


def _check_symmetric(A, name):
    diff = abs(A - A.T) if sp.issparse(A) else np.abs(A - A.T)
    big = diff.max() if diff.size else 0.0
    scale = abs(A).max() if A.size else 1.0
    if big > 1e-12 * max(scale, 1e-300):
        raise ValueError(f"{name} is not symmetric (max asymmetry {big:.3e})")


def _residuals(K, M, lam, V):
    R = K @ V - (M @ V) * lam[None, :]
    MV = M @ V
    return np.linalg.norm(R, axis=0) / np.linalg.norm(MV, axis=0)


def _dense_cholesky(M):
    try:
        return la.cholesky(M, lower=True)
    except la.LinAlgError:
        raise MassNotSPD("mass matrix is not positive definite (Cholesky failed)") from None


def _solve_dense(K, M, count, Z=None):
    Kd = K.toarray() if sp.issparse(K) else np.asarray(K, dtype=float)
    Md = M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)
    if Z is not None:
        # Z is sparse: two sparse-dense products per matrix
        Kd = np.asarray(Z.T @ np.asarray(Z.T @ Kd).T)
        Md = np.asarray(Z.T @ np.asarray(Z.T @ Md).T)
    L = _dense_cholesky(Md)
    # A = L^{-1} K L^{-T}, symmetrized against rounding
    X = la.solve_triangular(L, Kd, lower=True)
    A = la.solve_triangular(L, X.T, lower=True)
    A = 0.5 * (A + A.T)
    count = min(count, A.shape[0])
    w, Y = la.eigh(A, subset_by_index=[0, count - 1])
    V = la.solve_triangular(L, Y, lower=True, trans="T")
    return w, V


def _check_mass_sparse(M):
    d = M.diagonal()
    if np.any(d <= 0):
        raise MassNotSPD("mass matrix has a nonpositive diagonal entry")
    try:
        lu = spla.splu(M.tocsc(), permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                       options={"SymmetricMode": True})
    except RuntimeError:
        raise MassNotSPD("mass matrix is singular") from None
    # symmetric pivoting: the pivots of U are those of LDLᵀ, all positive iff SPD
    if np.any(lu.U.diagonal() <= 0):
        raise MassNotSPD("mass matrix is not positive definite (nonpositive pivot)")


def _start_vector(n, seed, c=None):
    v0 = np.random.default_rng(seed).standard_normal(n)
    if c is not None:
        v0 -= c * (c @ v0) / (c @ c)
    return v0


def _solve_sparse(K, M, count, sigma, seed, c=None, maxiter=None):
    n = K.shape[0]
    _check_mass_sparse(M)
    A = (K - sigma * M).tocsc()
    if c is None:
        lu = spla.splu(A)
        op = spla.LinearOperator((n, n), matvec=lu.solve, dtype=float)
    else:
        # bordered system [A c; cᵀ 0][x; μ] = [b; 0] keeps iterates in {cᵀx = 0}
        col = sp.csc_matrix(c.reshape(-1, 1))
        big = sp.bmat([[A, col], [col.T, None]], format="csc")
        lu = spla.splu(big)

        def solve(b):
            return lu.solve(np.append(b, 0.0))[:n]

        op = spla.LinearOperator((n, n), matvec=solve, dtype=float)
    v0 = _start_vector(n, seed, c)
    try:
        w, V = spla.eigsh(K, k=count, M=M, sigma=sigma, which="LM", OPinv=op, v0=v0,
                          maxiter=maxiter or 20 * n, tol=0.0)
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceFailure(
            f"ARPACK did not converge ({len(exc.eigenvalues)} of {count} eigenpairs)",
            {"converged": len(exc.eigenvalues), "requested": count, "sigma": sigma, "dof": n},
        ) from None
    order = np.argsort(w)
    return w[order], V[:, order]


def _nullspace_basis(c):
    """Sparse ``Z`` with ``cᵀ Z = 0``: identity on all but the last dof."""
    n = len(c)
    z = -c[:-1] / c[-1]
    top = sp.identity(n - 1, format="csr")
    return sp.vstack([top, sp.csr_matrix(z.reshape(1, -1))], format="csr")


def solve_lowest(K, M, count: int, seed: int = 0, sigma: Optional[float] = None,
                 dense_max: int = DENSE_MAX, constraint: Optional[np.ndarray] = None,
                 residual_tol: float = RESIDUAL_TOL) -> EigenResult:
    """The ``count`` smallest eigenpairs of ``K v = λ M v``.

    Parameters
    ----------
    K, M : symmetric matrices (dense or sparse); ``M`` positive definite.
    count : number of eigenpairs.
    seed : start-vector seed for the iterative path.
    sigma : shift for shift-invert; must lie below the spectrum.  The default
        ``-1 - 4‖K‖∞ / min_i Σ_j M_ij`` is a valid lower bound for P1 mass
        matrices (each local mass matrix dominates a quarter of its lumped
        form) but far from the spectrum; pass a sharper one when known.
    constraint : optional vector ``c``; restricts to ``cᵀ v = 0``.

    Raises
    ------
    MassNotSPD, ConvergenceFailure
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    _check_symmetric(K, "K")
    _check_symmetric(M, "M")
    n = K.shape[0]
    c = None if constraint is None else np.asarray(constraint, dtype=float)
    if n <= dense_max:
        if c is None:
            w, V = _solve_dense(K, M, count)
        else:
            Z = _nullspace_basis(c)
            w, W = _solve_dense(K, M, count, Z)
            V = np.asarray(Z @ W)
        method = "dense"
    else:
        if sigma is None:
            lumped = np.asarray(M.sum(axis=1)).ravel()
            sigma = -1.0 - 4.0 * float(abs(K).sum(axis=1).max()) / float(lumped.min())
        w, V = _solve_sparse(K, M, min(count, n - 2), sigma, seed, c)
        method = "shift-invert"
    res = _residuals(K, M, w, V) if c is None else _constrained_residuals(K, M, w, V, c)
    if np.any(res > residual_tol):
        raise ConvergenceFailure(
            f"eigenpair residual {res.max():.3e} exceeds {residual_tol:g}",
            {"residual_norms": res.tolist(), "method": method},
        )
    return EigenResult(
        eigenvalues=w,
        num_negative=int(np.count_nonzero(w < 0)),
        lambda1=float(w[0]),
        dof=n,
        residual_norms=res,
        method=method,
        vectors=V,
        extras={"sigma": sigma} if method != "dense" else {},
    )


def _constrained_residuals(K, M, lam, V, c):
    """Residual of the constrained problem: ``Kv - λMv`` minus its component along ``c``."""
    R = K @ V - (M @ V) * lam[None, :]
    # the Lagrange multiplier is the least-squares coefficient of c
    R = R - np.outer(c, (c @ R) / (c @ c))
    return np.linalg.norm(R, axis=0) / np.linalg.norm(M @ V, axis=0)
