"""FEM adjudication of the closed-form index counts (n = 2 models only)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import GapTooSmall, InvalidDimension
from ..models import Kind, ModelHypersurface, geometric_data
from ..spectra import jacobi_spectrum, strong_index, weak_index
from .assemble import assemble
from .eigen import EigenResult, solve_lowest
from .mesh import Mesh, mesh_flat_half_torus, mesh_hemisphere

EPS_FLOOR = 1e-3
GAP_FACTOR = 3.0
MAX_REFINE = 8


def _check(m: ModelHypersurface, refine: int):
    if m.n != 2:
        raise InvalidDimension(f"the FEM oracle handles n = 2 only, got n = {m.n}")
    if not isinstance(refine, (int, np.integer)) or not 0 <= refine <= MAX_REFINE:
        raise ValueError(f"refine must be an integer in 0..{MAX_REFINE}, got {refine!r}")


def torus_grid(refine: int) -> tuple[int, int]:
    """``(nx, ny)`` for the flat chart; refine 5 gives 128 x 64."""
    return 2 ** (refine + 2), 2 ** (refine + 1)


def mesh_for(m: ModelHypersurface, refine: int) -> Mesh:
    """Hemisphere of the right radius, or the flat chart of the torus."""
    _check(m, refine)
    if m.kind is Kind.EQUATOR:
        return mesh_hemisphere(refine)
    if m.kind is Kind.UMBILICAL_CAP:
        return mesh_hemisphere(refine, m.r)
    full, half = (f for f in sorted(m.factors(), key=lambda f: f.halved))
    nx, ny = torus_grid(refine)
    return mesh_flat_half_torus(full.radius, half.radius, nx, ny)


def _solve(mesh: Mesh, potential: float, count: int, seed: int, weak: bool):
    K, M = assemble(mesh, potential)
    c = np.asarray(M @ np.ones(K.shape[0])).ravel() if weak else None
    count = min(count, K.shape[0] - 2)
    return solve_lowest(K, M, count, seed=seed, sigma=-potential - 1.0, constraint=c)


def _solve_until_positive(mesh, potential, seed, weak, count=8):
    """Grow the eigenpair count until the largest one computed is clearly positive."""
    while True:
        res = _solve(mesh, potential, count, seed, weak)
        if res.eigenvalues[-1] > GAP_FACTOR * EPS_FLOOR or len(res.eigenvalues) >= res.dof - 2:
            return res
        count *= 2


def _classify(values, eps, what):
    near = [float(v) for v in values if eps < abs(v) < GAP_FACTOR * eps]
    if near:
        raise GapTooSmall(
            f"{what}: eigenvalue {near[0]:.3e} lies within {GAP_FACTOR:g}x the zero gap {eps:.3e}; refine",
            eigenvalue=near[0], eps_gap=eps,
        )
    return int(np.count_nonzero(np.asarray(values) < -eps))


def fem_index(m: ModelHypersurface, refine: int = 5, seed: int = 0) -> EigenResult:
    """Strong and weak Morse index from P1 finite elements.

    The discretization error near zero is estimated from the next coarser
    mesh, ``err = max |λ_h - λ_2h|`` over eigenvalues with ``|λ_h| < 1``, and
    ``ε_gap = max(1e-3, err)``.  An eigenvalue counts as negative only below
    ``-ε_gap``; one in ``(ε_gap, 3ε_gap)`` in absolute value raises
    :class:`GapTooSmall`.  The weak count solves the problem restricted to
    ``∫f = 0`` (mass-weighted constraint), not by deleting an eigenvalue.
    """
    _check(m, refine)
    if refine < 1:
        raise ValueError("fem_index needs refine >= 1 (the error estimate uses refine - 1)")
    potential = geometric_data(m).potential
    fine_mesh = mesh_for(m, refine)
    fine = _solve_until_positive(fine_mesh, potential, seed, weak=False)
    coarse = _solve(mesh_for(m, refine - 1), potential, len(fine.eigenvalues), seed, weak=False)
    k = min(len(fine.eigenvalues), len(coarse.eigenvalues))
    diffs = np.abs(fine.eigenvalues[:k] - coarse.eigenvalues[:k])
    small = np.abs(fine.eigenvalues[:k]) < 1.0
    err = float(diffs[small].max()) if small.any() else 0.0
    eps = max(EPS_FLOOR, err)

    strong = _classify(fine.eigenvalues, eps, "strong")
    weak_res = _solve_until_positive(fine_mesh, potential, seed, weak=True,
                                     count=max(4, len(fine.eigenvalues)))
    weak = _classify(weak_res.eigenvalues, eps, "weak")

    fine.num_negative = strong
    fine.extras.update({
        "weak_negative": weak,
        "weak_eigenvalues": [float(v) for v in weak_res.eigenvalues],
        "eps_gap": eps,
        "err_est": err,
        "coarse_eigenvalues": [float(v) for v in coarse.eigenvalues],
        "refine": int(refine),
        "mesh": {"vertices": fine_mesh.num_vertices, "cells": int(len(fine_mesh.cells)),
                 "metric_mode": fine_mesh.metric_mode.value, "h": fine_mesh.max_edge()},
        "potential": potential,
        "seed": seed,
    })
    return fine


def compare_with_engine(m: ModelHypersurface, res: EigenResult) -> dict:
    """Per-eigenvalue errors against the closed-form spectrum plus index agreement."""
    exact = jacobi_spectrum(m, count=len(res.eigenvalues)).eigenvalues(len(res.eigenvalues))
    rows = []
    for i, (h, e) in enumerate(zip(res.eigenvalues, exact)):
        rel = abs(h - e) / abs(e) if e != 0 else None
        rows.append({"index": i + 1, "fem": float(h), "exact": float(e),
                     "abs_error": float(abs(h - e)), "rel_error": rel})
    s, w = strong_index(m), weak_index(m)
    return {
        "eigenvalues": rows,
        "engine_strong": s.strong_index,
        "engine_weak": s.weak_index,
        "fem_strong": int(res.num_negative),
        "fem_weak": int(res.extras.get("weak_negative", -1)),
        "strong_agree": s.strong_index == res.num_negative,
        "weak_agree": s.weak_index == res.extras.get("weak_negative"),
        "paper_claim_strong": s.paper_claim,
        "paper_claim_strong_relation": s.paper_claim_relation,
        "paper_discrepancy_strong": s.discrepancy_flag,
        "paper_claim_weak": w.paper_claim,
        "paper_claim_weak_relation": w.paper_claim_relation if w.paper_claim is not None else None,
        "paper_discrepancy_weak": w.discrepancy_flag,
        "notes": s.notes,
    }


@dataclass(frozen=True)
class ConvergenceRow:
    refine: int
    h: float
    dof: int
    lambda1: float
    lambda1_error: float
    lambda2: float
    lambda2_error: float
    order: float  # observed order of the lambda2 error against h; nan on the first row


def convergence_study(m: ModelHypersurface, refinements, seed: int = 0) -> list[ConvergenceRow]:
    """Errors of the two lowest distinct Jacobi eigenvalues across refinements.

    ``λ₁`` belongs to the constant mode, which P1 reproduces exactly (its
    error is rounding); the observed order is computed on ``λ₂``, the first
    nonconstant mode.
    """
    refinements = list(refinements)
    if not refinements:
        raise ValueError("need at least one refinement level")
    potential = geometric_data(m).potential
    exact = jacobi_spectrum(m, count=2).lines
    e1, e2 = exact[0].value, exact[1].value
    rows = []
    prev = None
    for ref in refinements:
        mesh = mesh_for(m, ref)
        res = _solve(mesh, potential, 4, seed, weak=False)
        lam = res.eigenvalues
        err1, err2 = abs(lam[0] - e1), abs(lam[1] - e2)
        h = mesh.max_edge()
        order = math.nan
        if prev is not None and err2 > 0 and prev[1] > 0:
            order = math.log(prev[1] / err2) / math.log(prev[0] / h)
        rows.append(ConvergenceRow(ref, h, res.dof, float(lam[0]), float(err1), float(lam[1]), float(err2), order))
        prev = (h, err2)
    return rows


def flat_torus_modes(r1: float, r2: float, nx: int, ny: int, count: int = 12, seed: int = 0):
    """Lowest Laplace eigenvalues of the flat half-torus chart and the exact mode values.

    Exact values are ``p²/r1² + q²/r2²`` with ``p ∈ Z`` (periodic factor) and
    ``q >= 0`` (Neumann half circle).
    """
    mesh = mesh_flat_half_torus(r1, r2, nx, ny)
    K, M = assemble(mesh, 0.0)
    res = solve_lowest(K, M, count, seed=seed, sigma=-1.0)
    pmax = int(math.ceil(r1 * math.sqrt(res.eigenvalues[-1] * 2 + 1))) + 2
    qmax = int(math.ceil(r2 * math.sqrt(res.eigenvalues[-1] * 2 + 1))) + 2
    exact = sorted(p * p / r1**2 + q * q / r2**2 for p in range(-pmax, pmax + 1) for q in range(qmax + 1))
    return res.eigenvalues, np.array(exact[:count])
