"""Named verification suites, as run by ``fbmorse verify``."""

from __future__ import annotations

from ..errors import NotApplicable
from ..models import ModelHypersurface, free_boundary_check
from . import bounds, identities, inequalities


def identity_catalog(nmax: int = 4) -> list[ModelHypersurface]:
    """Representative catalog members with ``n <= nmax`` for the identity checks."""
    out = []
    for n in range(2, nmax + 1):
        out.append(ModelHypersurface.equator(n))
        out.extend(ModelHypersurface.cap(n, r) for r in (0.3, 0.5, 0.8))
        for k in range(1, n):
            for half in ("First", "Second"):
                out.append(ModelHypersurface.clifford(n, k, half))
                out.extend(ModelHypersurface.htorus(n, k, r, half) for r in (0.3, 0.6, 0.9))
    return out


def _identities(seed, samples, **_):
    reps = []
    for m in identity_catalog():
        reps.append(identities.check_position_identities(m, samples, 10, seed))
        reps.append(identities.check_boundary_identities(m, samples, seed))
        reps.append(free_boundary_check(m, samples, seed))
        reps.append(identities.simons_residual(m))
    return reps


def _bounds(seed, samples, family=None, n=None, k=None, **_):
    reps = []
    ns = [n] if n else list(range(2, 7))
    if family in (None, "minimal"):
        for nn in ns:
            reps.append(bounds.lambda1_bound_minimal(ModelHypersurface.equator(nn)))
            for kk in range(1, nn):
                if k is None or kk == k:
                    reps.append(bounds.lambda1_bound_minimal(ModelHypersurface.clifford(nn, kk)))
            reps.append(bounds.dichotomy_scan(nn))
    if family in (None, "cap"):
        for nn in ns:
            reps.extend(bounds.lambda1_bound_cmc(ModelHypersurface.cap(nn, r)) for r in (0.3, 0.5, 0.8))
    if family in (None, "htorus"):
        for nn in ns:
            for kk in range(1, nn):
                if k is not None and kk != k:
                    continue
                for i in range(1, 20):
                    m = ModelHypersurface.htorus(nn, kk, round(i * 0.05, 12))
                    try:
                        reps.append(bounds.lambda1_bound_cmc(m))
                    except NotApplicable:
                        pass
    if family is None:
        reps.append(bounds.cmc_scan_report())
        reps.append(bounds.alpha_grid_report())
        reps.append(bounds.char_poly_random_report(seed=seed))
    return reps


def _alencar(seed, samples, n=None, **_):
    ns = [n] if n else list(range(2, 9))
    return [inequalities.alencar_random_check(nn, samples, seed) for nn in ns]


def _kato(seed, samples, n=None, **_):
    ns = [n] if n else [2, 3]
    return [inequalities.kato_random_check(nn, fields=min(samples, 100), seed=seed) for nn in ns]


SUITES = {
    "identities": (_identities, 100),
    "bounds": (_bounds, 0),
    "alencar": (_alencar, 100_000),
    "kato": (_kato, 100),
}


def run_suites(names=None, seed: int = 42, samples=None, **options) -> list:
    """Run the named suites (all by default) in a fixed order."""
    names = list(SUITES) if not names or names == ["all"] else list(names)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s): {unknown}; choose from {sorted(SUITES)}")
    out = []
    for name in names:
        fn, default = SUITES[name]
        out.extend(fn(seed=seed, samples=samples or default, **options))
    return out


def all_passed(reports) -> bool:
    return all(r.passed for r in reports)
