"""Algebraic eigenvalue bounds: the 2x2 characteristic polynomial, P_H / α_H,
the first-eigenvalue bounds for minimal and CMC models, and the |A|² dichotomy."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateInput, NotApplicable
from ..models import Kind, ModelHypersurface, geometric_data
from ..reports import BoundReport, IdentityReport
from ..spectra import jacobi_spectrum


@dataclass(frozen=True)
class CharPolyResult:
    """Roots of ``λ² - (|A|² + n)λ + n|A|² - H²`` and their eigenvector data.

    The polynomial is the characteristic polynomial of
    ``[[|A|², H], [H, n]]``, the action of ``J`` on ``span{<x,a>, <nu,a>}``.
    ``gamma_*`` is the coefficient ``γ`` with ``(1, γ)`` an eigenvector,
    i.e. ``γ = (λ - |A|²)/H``; it is ``inf`` for the eigenvector ``(0, 1)``.
    ``paper_gamma_*`` keeps the displayed formula ``(n - λ + H)/(|A|² - λ + H)``
    for comparison.
    """

    lambda_minus: float
    lambda_plus: float
    gamma_minus: float
    gamma_plus: float
    discriminant: float
    paper_gamma_minus: float
    paper_gamma_plus: float
    eigen_residual: float

    def to_dict(self) -> dict:
        def f(v):
            return v if math.isfinite(v) else repr(v)

        return {k: f(getattr(self, k)) for k in self.__dataclass_fields__}


def _ratio(num, den):
    if den == 0.0:
        return math.inf if num != 0.0 else math.nan
    return num / den


def char_poly(n: int, normA2: float, H: float) -> CharPolyResult:
    """Roots of the Jacobi characteristic polynomial without cancellation.

    Raises :class:`DegenerateInput` for the repeated root ``|A|² = n, H = 0``
    and for inadmissible invariants ``|A|² < H²/n``.
    """
    n = float(n)
    if normA2 < H * H / n * (1.0 - 1e-12):
        raise DegenerateInput(f"|A|^2 = {normA2} < H^2/n = {H * H / n}: not attained by any hypersurface")
    disc = (normA2 - n) ** 2 + 4.0 * H * H
    if disc == 0.0:
        raise DegenerateInput("|A|^2 = n and H = 0: repeated root, eigenvector coefficient undefined")
    tr = normA2 + n
    det = n * normA2 - H * H
    sq = math.sqrt(disc)
    # tr >= 0, so tr + sq has no cancellation; the other root comes from the product
    lam_p = 0.5 * (tr + sq)
    lam_m = det / lam_p
    if H == 0.0:
        # the matrix is diagonal: (1, 0) belongs to |A|², (0, 1) to n
        g = {normA2: 0.0, n: math.inf}
        gam_m = g[lam_m] if lam_m in g else (0.0 if abs(lam_m - normA2) < abs(lam_m - n) else math.inf)
        gam_p = math.inf if gam_m == 0.0 else 0.0
    else:
        # γ± = (λ± - |A|²)/H = (±sq - d)/(2H) with d = |A|² - n; the
        # cancelling sum is rewritten with (sq - |d|)(sq + |d|) = 4H²
        d = normA2 - n
        if d > 0:
            gam_p, gam_m = 2.0 * H / (sq + d), -(sq + d) / (2.0 * H)
        else:
            gam_p, gam_m = (sq - d) / (2.0 * H), -2.0 * H / (sq - d)

    def displayed(lam):
        return _ratio(n - lam + H, normA2 - lam + H)

    mat = np.array([[normA2, H], [H, n]])
    res = 0.0
    for lam, gam in ((lam_m, gam_m), (lam_p, gam_p)):
        v = np.array([0.0, 1.0]) if math.isinf(gam) else np.array([1.0, gam])
        v /= np.linalg.norm(v)
        res = max(res, float(np.linalg.norm(mat @ v - lam * v)) / max(1.0, abs(lam_p)))
    return CharPolyResult(lam_m, lam_p, gam_m, gam_p, disc, displayed(lam_m), displayed(lam_p), res)


# ---------------------------------------------------------------------------
# P_H and its positive root


def _linear_coefficient(n: int, H: float, variant: str) -> float:
    if variant == "proof":
        return (n - 2) * H / math.sqrt(n * (n - 1))
    if variant == "statement":
        return (n - 2) * H / math.sqrt(n - 1)
    raise ValueError(f"variant must be 'proof' or 'statement', got {variant!r}")


def p_H(n: int, H: float, x, variant: str = "proof"):
    """``P_H(x) = x² + ((n-2)H/√(n(n-1)))x - n(1 + H²/n²)``.

    ``variant="statement"`` swaps in the ``√(n-1)`` denominator of the
    alternative reading.
    """
    b = _linear_coefficient(n, H, variant)
    c = n * (1.0 + H * H / (n * n))
    return x * x + b * x - c


def alpha_H(n: int, H: float, variant: str = "proof") -> float:
    """Unique positive root of :func:`p_H` (the constant term is negative)."""
    b = _linear_coefficient(n, H, variant)
    c = n * (1.0 + H * H / (n * n))
    sq = math.sqrt(b * b + 4.0 * c)
    return 2.0 * c / (b + sq) if b >= 0 else 0.5 * (sq - b)


# ---------------------------------------------------------------------------
# First-eigenvalue bounds


def _lambda1(m: ModelHypersurface) -> float:
    return jacobi_spectrum(m, count=1).lines[0].value


def _is_minimal(m: ModelHypersurface) -> bool:
    gd = geometric_data(m)
    return abs(gd.H) <= 1e-12 * max(1.0, math.sqrt(gd.normA2))


def lambda1_bound_minimal(m: ModelHypersurface) -> BoundReport:
    """``λ₁ <= -2n`` for minimal models that are not totally geodesic.

    The equator is reported under the totally geodesic alternative with
    ``λ₁ = -n`` as the "bound"; non-minimal models raise ``NotApplicable``.
    """
    if not _is_minimal(m):
        raise NotApplicable(f"{m.label()} is not minimal")
    n = m.n
    lam1 = _lambda1(m)
    gd = geometric_data(m)
    if gd.normA2 == 0.0:
        return BoundReport(
            name="lambda1_minimal", lambda1=lam1, bound=-float(n), family_params=m.to_dict(),
            case="(ii) totally geodesic: lambda1 = -n",
            notes="the -2n bound does not apply to the equator (-n > -2n)",
            details={"minus_2n_slack": -2.0 * n - lam1},
        )
    return BoundReport(
        name="lambda1_minimal", lambda1=lam1, bound=-2.0 * n, family_params=m.to_dict(),
        case="(i) lambda1 <= -2n", details={"normA2": gd.normA2},
    )


def lambda1_bound_cmc(m: ModelHypersurface, reading: str = "H2") -> BoundReport:
    """First-eigenvalue bound for CMC models.

    Umbilical caps: ``λ₁ = -n(1 + H²/n²)`` (reported as the bound).
    Non-umbilical with ``H > 0``:
    ``λ₁ <= -2n(1 + H²/n²) + H(n-2)/√(n(n-1)) · |Å|``; the integral ratio
    ``∫|Å|³/∫|Å|²`` is ``|Å|`` because ``|Å|`` is constant on every model.
    ``reading="H"`` uses ``1 + H/n²`` in the curvature term instead.

    The slack equals ``P_H(|Å|)`` (for the default reading), so equality
    holds exactly where ``|Å| = α_H``.
    """
    if reading not in ("H2", "H"):
        raise ValueError("reading must be 'H2' or 'H'")
    gd = geometric_data(m)
    n, H = m.n, gd.H
    curv = 1.0 + (H * H if reading == "H2" else H) / (n * n)
    lam1 = _lambda1(m)
    if m.kind in (Kind.UMBILICAL_CAP, Kind.EQUATOR):
        return BoundReport(
            name="lambda1_cmc", lambda1=lam1, bound=-n * curv, family_params=m.to_dict(),
            case="(i) umbilical: lambda1 = -n(1 + H^2/n^2)",
            details={"H": H, "reading": reading},
        )
    if not H > 0:
        raise NotApplicable(
            f"{m.label()} has H = {H:.6g} <= 0 in the orientation with the "
            "multiplicity-k curvature positive; the bound needs H > 0"
        )
    a0 = gd.normA0
    bound = -2.0 * n * curv + H * (n - 2) / math.sqrt(n * (n - 1)) * a0
    return BoundReport(
        name="lambda1_cmc", lambda1=lam1, bound=bound, family_params=m.to_dict(),
        case="(ii) non-umbilical",
        details={"H": H, "normA0": a0, "alpha_H": alpha_H(n, H), "P_H_at_normA0": p_H(n, H, a0),
                 "reading": reading},
    )


def dichotomy_scan(n: int) -> IdentityReport:
    """Minimal catalog members never have ``0 < |A|² < n``.

    Covers the equator, every half Clifford torus and the H-torus family at
    its minimal radius ``√(k/n)``.  The residual is the distance of each
    attained ``|A|²`` from ``{0, n}``.
    """
    if not isinstance(n, int) or n < 2:
        raise ValueError("n must be an integer >= 2")
    models = [ModelHypersurface.equator(n)]
    for k in range(1, n):
        models.append(ModelHypersurface.clifford(n, k))
        models.append(ModelHypersurface.htorus(n, k, math.sqrt(k / n)))
    attained = []
    worst = 0.0
    for m in models:
        A2 = geometric_data(m).normA2
        attained.append(A2)
        worst = max(worst, min(abs(A2), abs(A2 - n)) / n)
    distinct = sorted({round(v, 9) for v in attained})
    return IdentityReport(
        name=f"dichotomy[n={n}]",
        samples=len(models),
        max_residual=worst,
        tolerance=1e-12,
        notes="relative distance of |A|^2 from {0, n} over minimal models",
        details={"attained": distinct},
    )


# ---------------------------------------------------------------------------
# Family scans


@dataclass(frozen=True)
class CmcScanRow:
    n: int
    k: int
    r: float
    H: float
    normA0: float
    slack: float
    p_H: float
    equality: bool


def cmc_family_scan(nmax: int = 6, step: float = 0.01) -> list[CmcScanRow]:
    """The CMC bound on every H-torus with ``H > 0`` on an ``r``-grid, ``n <= nmax``."""
    rows = []
    count = int(round(1.0 / step))
    for n in range(2, nmax + 1):
        for k in range(1, n):
            for i in range(1, count):
                r = round(i * step, 12)
                m = ModelHypersurface.htorus(n, k, r)
                gd = geometric_data(m)
                if not gd.H > 0:
                    continue
                rep = lambda1_bound_cmc(m)
                rows.append(CmcScanRow(n, k, r, gd.H, gd.normA0, rep.slack,
                                       p_H(n, gd.H, gd.normA0), rep.equality))
    return rows


def cmc_scan_report(nmax: int = 6, step: float = 0.01) -> IdentityReport:
    """Slack never negative; equality exactly on ``k = n-1``; ``P_H(|Å|)`` separates them."""
    rows = cmc_family_scan(nmax, step)
    on = [row for row in rows if row.k == row.n - 1]
    off = [row for row in rows if row.k != row.n - 1]
    min_slack = min(row.slack for row in rows)
    eq_mismatch = sum(row.equality != (row.k == row.n - 1) for row in rows)
    max_p_on = max(abs(row.p_H) for row in on)
    min_p_off = min((abs(row.p_H) for row in off), default=math.inf)
    # residual: the worst of the negative slack, P_H on the family, and a bad separation
    residual = max(0.0, -min_slack, max_p_on, float(eq_mismatch), 0.0 if min_p_off > 1e-3 else 1.0)
    return IdentityReport(
        name=f"cmc_bound_scan[n<={nmax}, step={step:g}]",
        samples=len(rows),
        max_residual=residual,
        tolerance=1e-9,
        notes="H-tori with H > 0 (multiplicity-k curvature positive); slack = P_H(|A0|)",
        details={"min_slack": min_slack, "equality_mismatches": eq_mismatch,
                 "max_abs_P_H_on_family": max_p_on, "min_abs_P_H_off_family": min_p_off,
                 "equality_points": len(on)},
    )


def alpha_grid_report(ns=range(2, 7), Hs=None) -> IdentityReport:
    """``P_H(α_H) = 0`` on an ``(n, H)`` grid and ``α_H(n, 0) = √n``."""
    if Hs is None:
        Hs = np.linspace(0.0, 10.0, 20)
    worst_root = 0.0
    worst_zero = 0.0
    pts = 0
    for n in ns:
        worst_zero = max(worst_zero, abs(alpha_H(n, 0.0) - math.sqrt(n)))
        for H in Hs:
            worst_root = max(worst_root, abs(p_H(n, float(H), alpha_H(n, float(H)))))
            pts += 1
    return IdentityReport(
        name="alpha_H_roots",
        samples=pts,
        max_residual=worst_root,
        tolerance=1e-12,
        notes="|P_H(alpha_H)| on the grid; the H = 0 root against sqrt(n) in details",
        details={"max_abs_P_at_root": worst_root, "max_alpha0_error": worst_zero},
    )


def char_poly_random_report(samples: int = 10_000, seed: int = 42) -> IdentityReport:
    """Vieta relations and eigenvector residuals on random admissible invariants."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    worst_vec = 0.0
    skipped = 0
    for _ in range(samples):
        n = int(rng.integers(2, 9))
        H = float(rng.uniform(-5, 5))
        A2 = H * H / n + float(rng.exponential(3.0))
        try:
            res = char_poly(n, A2, H)
        except DegenerateInput:
            skipped += 1
            continue
        scale = max(1.0, abs(A2 + n), abs(n * A2 - H * H))
        worst = max(worst,
                    abs(res.lambda_minus + res.lambda_plus - (A2 + n)) / scale,
                    abs(res.lambda_minus * res.lambda_plus - (n * A2 - H * H)) / scale)
        worst_vec = max(worst_vec, res.eigen_residual)
    return IdentityReport(
        name="char_poly_random",
        samples=samples,
        max_residual=max(worst, worst_vec),
        tolerance=1e-12,
        seed=seed,
        notes="relative Vieta residuals and 2x2 eigenvector residuals",
        details={"vieta": worst, "eigenvector": worst_vec, "skipped_degenerate": skipped},
    )
