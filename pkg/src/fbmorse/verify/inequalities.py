"""Pointwise algebraic inequalities: the cubic-sum bound for traceless tuples
and the refined Kato inequality for traceless Codazzi tensors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .._accel import HAVE_NUMBA, njit
from ..errors import NotTraceless
from ..reports import IdentityReport

TRACELESS_TOL = 1e-12


def alencar_coefficient(n: int) -> float:
    return (n - 2) / math.sqrt(n * (n - 1))


def alencar_inequality(a: Sequence[float]) -> IdentityReport:
    """Check ``|Σa³| <= (n-2)/√(n(n-1)) (Σa²)^{3/2}`` for one tuple with ``Σa = 0``.

    Equality holds when ``n-1`` entries coincide; ``details["equality"]``
    flags it.  Raises :class:`NotTraceless` if the mean is not zero.
    """
    a = np.asarray(a, dtype=float)
    n = a.size
    if n < 2:
        raise NotTraceless("need at least two entries")
    scale = max(1.0, float(np.abs(a).sum()))
    if abs(math.fsum(a)) > TRACELESS_TOL * scale:
        raise NotTraceless(f"entries sum to {math.fsum(a)!r}, not 0")
    lhs = abs(math.fsum(a**3))
    rhs = alencar_coefficient(n) * math.fsum(a**2) ** 1.5
    # rounding in the cubes scales with Σ|a|³, which can exceed rhs (rhs = 0 at n = 2)
    tol = 1e-12 * max(1.0, rhs, math.fsum(np.abs(a) ** 3))
    return IdentityReport(
        name=f"alencar[n={n}]",
        samples=1,
        max_residual=max(0.0, lhs - rhs),
        tolerance=tol,
        notes="violation = max(0, lhs - rhs)",
        details={"lhs": lhs, "rhs": rhs, "slack": rhs - lhs, "equality": abs(rhs - lhs) <= tol},
    )


@njit(cache=True)
def _alencar_batch_loop(a, coef):
    m, n = a.shape
    lhs = np.empty(m)
    rhs = np.empty(m)
    for i in range(m):
        s2 = 0.0
        s3 = 0.0
        for j in range(n):
            v = a[i, j]
            s2 += v * v
            s3 += v * v * v
        lhs[i] = abs(s3)
        rhs[i] = coef * s2 * math.sqrt(s2)
    return lhs, rhs


def _alencar_batch_numpy(a, coef):
    s2 = np.einsum("ij,ij->i", a, a)
    lhs = np.abs(np.einsum("ij,ij,ij->i", a, a, a))
    return lhs, coef * s2 * np.sqrt(s2)


def alencar_batch(a: np.ndarray, use_numba: bool | None = None):
    """Both sides of the cubic-sum inequality for each row of ``a`` (rows traceless)."""
    a = np.ascontiguousarray(a, dtype=float)
    coef = alencar_coefficient(a.shape[1])
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba:
        return _alencar_batch_loop(a, coef)
    return _alencar_batch_numpy(a, coef)


def alencar_random_check(n: int, samples: int = 100_000, seed: int = 42,
                         use_numba: bool | None = None) -> IdentityReport:
    """Random mean-centered Gaussian tuples plus the equality witness.

    The witness ``(n-1, -1, ..., -1)`` must attain equality to ``1e-12``
    (relative).  Violations are counted with a ``1e-12`` relative slack.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((samples, n))
    a -= a.mean(axis=1, keepdims=True)
    lhs, rhs = alencar_batch(a, use_numba)
    excess = (lhs - rhs) / np.maximum(1.0, rhs)
    violations = int(np.count_nonzero(excess > 1e-12))
    w = -np.ones(n)
    w[0] = n - 1
    wl, wr = alencar_batch(w[None, :], use_numba)
    witness_gap = float(abs(wl[0] - wr[0]) / max(1.0, wr[0]))
    worst = max(float(excess.max(initial=0.0)), witness_gap)
    return IdentityReport(
        name=f"alencar_random[n={n}]",
        samples=samples,
        max_residual=max(worst, 0.0),
        tolerance=1e-12,
        seed=seed,
        notes="relative excess over random traceless tuples; equality witness gap",
        details={"violations": violations, "witness_gap": witness_gap,
                 "max_ratio": float(np.max(lhs / np.where(rhs > 0, rhs, np.inf), initial=0.0)),
                 "backend": "numba" if (HAVE_NUMBA if use_numba is None else use_numba) else "numpy"},
    )


# ---------------------------------------------------------------------------
# Kato-type inequality on the flat chart


@dataclass(frozen=True)
class Mode:
    """One term ``amp · F(p·x') · G(q·y)`` of ``u`` on ``T^{n-1} × [0, π]``.

    ``F`` is ``cos`` or ``sin``; ``G`` is ``cos``, ``sin``, ``cosh`` or
    ``sinh``.  ``u`` is harmonic exactly when every ``G`` is hyperbolic with
    ``q = |p|``.
    """

    p: tuple[int, ...]
    q: float
    trig: str = "cos"
    profile: str = "cosh"
    amp: float = 1.0


# derivative cycles: d/dt of (cos, sin) and (cosh, sinh)
_CYCLE = {
    "cos": [(np.cos, 1.0), (np.sin, -1.0), (np.cos, -1.0), (np.sin, 1.0)],
    "sin": [(np.sin, 1.0), (np.cos, 1.0), (np.sin, -1.0), (np.cos, -1.0)],
    "cosh": [(np.cosh, 1.0), (np.sinh, 1.0)],
    "sinh": [(np.sinh, 1.0), (np.cosh, 1.0)],
}


def _deriv(fn: str, order: int, freq: float, t):
    f, sgn = _CYCLE[fn][order % len(_CYCLE[fn])]
    return sgn * freq**order * f(freq * t)


def mode_derivative(modes: Sequence[Mode], alpha: tuple[int, ...], pts: np.ndarray) -> np.ndarray:
    """Exact mixed partial ``∂^alpha u`` at points ``(P, n)`` (last axis is ``y``)."""
    out = np.zeros(len(pts))
    xs, y = pts[:, :-1], pts[:, -1]
    ax, ay = alpha[:-1], alpha[-1]
    for md in modes:
        p = np.asarray(md.p, dtype=float)
        coef = md.amp * float(np.prod(p ** np.asarray(ax)))
        if coef == 0.0 and any(ax):
            continue
        phase = xs @ p
        out += coef * _deriv(md.trig, sum(ax), 1.0, phase) * _deriv(md.profile, ay, md.q, y)
    return out


def random_harmonic_modes(n: int, rng: np.random.Generator, max_degree: int = 3, terms: int = 4):
    """Harmonic ``u``: separable modes with ``G`` hyperbolic and ``q = |p|``."""
    modes = []
    for _ in range(terms):
        while True:
            p = tuple(int(v) for v in rng.integers(-max_degree, max_degree + 1, size=n - 1))
            if any(p) and sum(abs(v) for v in p) <= max_degree:
                break
        modes.append(Mode(p, float(np.linalg.norm(p)), str(rng.choice(["cos", "sin"])),
                          str(rng.choice(["cosh", "sinh"])), float(rng.standard_normal())))
    return modes


def kato_inequality_check(modes: Sequence[Mode], n: int, grid: int = 12,
                          tolerance: float = 1e-10) -> IdentityReport:
    """Pointwise ``|∇|T|²|² <= (4n/(n+2)) |T|² |∇T|²`` for ``T = Hess u - (Δu/n) I``.

    Derivatives are exact.  ``T`` is traceless by construction; it is also
    Codazzi (``∇T`` totally symmetric) only when ``Δu`` is constant, and the
    inequality needs that.  ``details["codazzi_defect"]`` reports
    ``max |∂_k T_ij - ∂_i T_kj|`` (relative to ``max |∂T|``) so non-harmonic inputs are visible.

    Residual is the largest relative excess ``(lhs - rhs) / max(rhs, tiny)``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    axes = [np.linspace(0.0, 2 * np.pi, grid, endpoint=False)] * (n - 1) + [np.linspace(0.0, np.pi, grid)]
    pts = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=-1)

    def D(*idx):
        alpha = [0] * n
        for i in idx:
            alpha[i] += 1
        return mode_derivative(modes, tuple(alpha), pts)

    hess = np.empty((len(pts), n, n))
    third = np.empty((len(pts), n, n, n))
    for i, j in product(range(n), repeat=2):
        hess[:, i, j] = D(i, j)
        for k in range(n):
            third[:, k, i, j] = D(k, i, j)
    eye = np.eye(n)
    lap = np.trace(hess, axis1=1, axis2=2)
    grad_lap = np.einsum("pkii->pk", third)
    T = hess - lap[:, None, None] * eye / n
    dT = third - grad_lap[:, :, None, None] * eye / n  # dT[p, k, i, j] = ∂_k T_ij

    T2 = np.einsum("pij,pij->p", T, T)
    grad_T2 = 2.0 * np.einsum("pij,pkij->pk", T, dT)
    lhs = np.einsum("pk,pk->p", grad_T2, grad_T2)
    dT2 = np.einsum("pkij,pkij->p", dT, dT)
    rhs = 4.0 * n / (n + 2) * T2 * dT2
    tiny = 1e-300
    scale = np.maximum(rhs, np.max(rhs, initial=0.0) * 1e-12 + tiny)
    excess = (lhs - rhs) / scale
    ratio = np.where(T2 * dT2 > 0, lhs / np.maximum(T2 * dT2, tiny), 0.0)
    codazzi = float(np.max(np.abs(dT - np.swapaxes(dT, 1, 2)), initial=0.0))
    codazzi /= max(1.0, float(np.max(np.abs(dT), initial=0.0)))
    return IdentityReport(
        name=f"kato[n={n}]",
        samples=len(pts),
        max_residual=max(0.0, float(np.max(excess, initial=0.0))),
        tolerance=tolerance,
        notes="exact derivatives on a periodic x interval grid; ratio = |grad|T|^2|^2 / (|T|^2 |grad T|^2)",
        details={"max_ratio": float(np.max(ratio, initial=0.0)), "constant": 4.0 * n / (n + 2),
                 "codazzi_defect": codazzi, "modes": len(modes)},
    )


def kato_random_check(n: int, fields: int = 100, seed: int = 42, grid: int = 8) -> IdentityReport:
    """Random harmonic-Hessian fields; aggregates :func:`kato_inequality_check`."""
    rng = np.random.default_rng(seed)
    worst, ratio, codazzi, pts = 0.0, 0.0, 0.0, 0
    for _ in range(fields):
        rep = kato_inequality_check(random_harmonic_modes(n, rng), n, grid)
        worst = max(worst, rep.max_residual)
        ratio = max(ratio, rep.details["max_ratio"])
        codazzi = max(codazzi, rep.details["codazzi_defect"])
        pts += rep.samples
    return IdentityReport(
        name=f"kato_random[n={n}]",
        samples=pts,
        max_residual=worst,
        tolerance=1e-10,
        seed=seed,
        notes=f"{fields} random harmonic u; T = Hess u is traceless and Codazzi",
        details={"fields": fields, "max_ratio": ratio, "constant": 4.0 * n / (n + 2),
                 "codazzi_defect": codazzi},
    )
