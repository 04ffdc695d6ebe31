import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbmorse import DegenerateInput, ModelHypersurface, NotApplicable, NotTraceless, geometric_data
from fbmorse.verify import SUITES, run_suites
from fbmorse.verify.bounds import (
    alpha_H,
    alpha_grid_report,
    char_poly,
    cmc_family_scan,
    cmc_scan_report,
    dichotomy_scan,
    lambda1_bound_cmc,
    lambda1_bound_minimal,
    p_H,
)
from fbmorse.verify.identities import (
    check_boundary_identities,
    check_position_identities,
    laplacian,
    richardson,
    simons_residual,
)
from fbmorse.verify.inequalities import (
    Mode,
    alencar_batch,
    alencar_inequality,
    alencar_random_check,
    kato_inequality_check,
    kato_random_check,
    random_harmonic_modes,
)
from fbmorse.verify.suite import identity_catalog

M = ModelHypersurface


# -- finite differences --------------------------------------------------


def test_richardson_removes_even_terms():
    # f(h) = 1 + h^2 + h^4 sampled at h, h/2, h/4
    vals = [1 + h**2 + h**4 for h in (0.1, 0.05, 0.025)]
    assert abs(richardson(vals) - 1.0) < 1e-14


def test_laplacian_of_height_on_equator():
    # on the unit sphere the last coordinate is a degree-1 harmonic: Δ = -n
    m = M.equator(2)
    rng = np.random.default_rng(0)
    from fbmorse.models import sample_interior, _embed_array

    u = sample_interior(m, 5, rng)

    def F(v):
        return _embed_array(m, v)[0]

    lap = laplacian(m, F, u, 1e-3)
    x = F(u)
    assert np.allclose(lap, -2 * x, atol=1e-5)


@pytest.mark.parametrize(
    "m",
    [M.equator(3), M.cap(2, 0.5), M.clifford(3, 1, "First"), M.htorus(2, 1, 0.6), M.htorus(4, 2, 0.3)],
    ids=lambda m: m.label(),
)
def test_position_identities(m):
    rep = check_position_identities(m, points=20, directions=4)
    assert rep.passed, rep.details


@pytest.mark.parametrize(
    "m", [M.cap(3, 0.8), M.clifford(2, 1), M.htorus(3, 2, 0.6, "First")], ids=lambda m: m.label()
)
def test_boundary_identities_and_sign(m):
    rep = check_boundary_identities(m, points=20)
    assert rep.passed, rep.details
    # the opposite sign for the normal's conormal derivative is visibly wrong
    assert rep.details["conormal_nu_opposite_sign"] > 1e-2


@pytest.mark.parametrize("m", identity_catalog(), ids=lambda m: m.label())
def test_simons(m):
    assert simons_residual(m).passed


# -- characteristic polynomial -------------------------------------------


def test_char_poly_clifford():
    res = char_poly(2, 3.0, 1.0)
    assert res.lambda_minus + res.lambda_plus == pytest.approx(5.0)
    assert res.lambda_minus * res.lambda_plus == pytest.approx(5.0)
    assert res.eigen_residual < 1e-14


@settings(max_examples=200, deadline=None)
@given(n=st.integers(2, 8), H=st.floats(-5, 5), extra=st.floats(1e-3, 20))
def test_char_poly_eigenvectors(n, H, extra):
    A2 = H * H / n + extra
    try:
        res = char_poly(n, A2, H)
    except DegenerateInput:
        return
    mat = np.array([[A2, H], [H, n]])
    for lam, g in ((res.lambda_minus, res.gamma_minus), (res.lambda_plus, res.gamma_plus)):
        v = np.array([0.0, 1.0]) if math.isinf(g) else np.array([1.0, g])
        v /= np.abs(v).max()  # gamma can be ~1/H; avoid squaring it
        assert np.allclose(mat @ v, lam * v, atol=1e-9 * max(1.0, abs(lam)))


def test_displayed_gamma_is_swapped():
    # the displayed formula gives the coefficient of the other root
    res = char_poly(3, 4.0, 1.5)
    assert res.paper_gamma_minus == pytest.approx(res.gamma_plus, rel=1e-12)
    assert res.paper_gamma_plus == pytest.approx(res.gamma_minus, rel=1e-12)


def test_char_poly_degenerate():
    with pytest.raises(DegenerateInput):
        char_poly(3, 3.0, 0.0)
    with pytest.raises(DegenerateInput):
        char_poly(3, 0.1, 3.0)


# -- P_H and alpha_H ------------------------------------------------------


def test_alpha_grid():
    rep = alpha_grid_report()
    assert rep.passed
    assert rep.details["max_alpha0_error"] <= 1e-14


@settings(max_examples=200, deadline=None)
@given(n=st.integers(2, 10), H=st.floats(0, 100))
def test_alpha_is_positive_root(n, H):
    a = alpha_H(n, H)
    assert a > 0
    scale = max(1.0, a * a)
    assert abs(p_H(n, H, a)) <= 1e-12 * scale
    assert p_H(n, H, 0.0) < 0


def test_alpha_not_monotone_in_H():
    vals = [alpha_H(3, H) for H in (0.0, 0.5, 1.0, 2.0, 4.0, 8.0)]
    assert vals[1] < vals[0] and vals[2] < vals[1]
    assert vals[4] > vals[3] > vals[2]
    # single dip: decreasing then increasing on a fine grid
    grid = np.linspace(0, 10, 2001)
    d = np.diff([alpha_H(3, float(H)) for H in grid])
    sign_changes = np.count_nonzero(np.diff(np.sign(d)) != 0)
    assert sign_changes == 1


def test_statement_variant_differs():
    assert alpha_H(4, 1.0, "statement") != alpha_H(4, 1.0)
    with pytest.raises(ValueError):
        p_H(3, 1.0, 1.0, "other")


# -- first-eigenvalue bounds ---------------------------------------------


@pytest.mark.parametrize("n", range(2, 7))
def test_minimal_bound(n):
    eq = lambda1_bound_minimal(M.equator(n))
    assert eq.lambda1 == -n and eq.case.startswith("(ii)")
    for k in range(1, n):
        rep = lambda1_bound_minimal(M.clifford(n, k))
        assert rep.lambda1 == -2 * n
        assert abs(rep.slack) < 1e-12 and rep.equality and rep.passed
    with pytest.raises(NotApplicable):
        lambda1_bound_minimal(M.cap(n, 0.5))


@pytest.mark.parametrize("n", range(2, 7))
def test_dichotomy(n):
    assert dichotomy_scan(n).passed


@pytest.mark.parametrize("n,r", [(2, 0.3), (3, 0.5), (4, 0.8)])
def test_cap_bound_is_attained(n, r):
    rep = lambda1_bound_cmc(M.cap(n, r))
    H = geometric_data(M.cap(n, r)).H
    assert rep.lambda1 == pytest.approx(-n * (1 + H * H / n**2), rel=1e-12)
    assert rep.equality


def test_cmc_bound_strict_and_equality():
    strict = lambda1_bound_cmc(M.htorus(3, 1, 0.5))
    assert strict.slack > 0.5 and not strict.equality
    assert strict.slack == pytest.approx(strict.details["P_H_at_normA0"], abs=1e-12)
    eq = lambda1_bound_cmc(M.htorus(3, 2, 0.5))
    assert eq.equality
    with pytest.raises(NotApplicable):
        lambda1_bound_cmc(M.htorus(3, 1, 0.6))  # H < 0 in this orientation


def test_cmc_scan():
    rep = cmc_scan_report()
    assert rep.passed, rep.details
    rows = cmc_family_scan(4, 0.05)
    assert {row.k == row.n - 1 for row in rows if row.equality} == {True}


# -- cubic-sum inequality ------------------------------------------------


@pytest.mark.parametrize("n", range(2, 9))
def test_alencar_equality_witness(n):
    w = [n - 1.0] + [-1.0] * (n - 1)
    rep = alencar_inequality(w)
    assert rep.passed and rep.details["equality"]


def test_alencar_rejects_non_traceless():
    with pytest.raises(NotTraceless):
        alencar_inequality([1.0, 1.0, 1.0])


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=10))
def test_alencar_property(xs):
    a = np.array(xs) - np.mean(xs)
    a[-1] = -math.fsum(a[:-1])
    try:
        rep = alencar_inequality(a)
    except NotTraceless:
        return
    assert rep.passed


@pytest.mark.parametrize("n", range(2, 9))
def test_alencar_random(n):
    rep = alencar_random_check(n, samples=20_000, seed=n)
    assert rep.passed and rep.details["violations"] == 0


def test_alencar_backends_agree():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((1000, 5))
    a -= a.mean(axis=1, keepdims=True)
    l1, r1 = alencar_batch(a, use_numba=True)
    l2, r2 = alencar_batch(a, use_numba=False)
    assert np.allclose(l1, l2, rtol=1e-13) and np.allclose(r1, r2, rtol=1e-13)


# -- Kato-type inequality ------------------------------------------------


def test_kato_harmonic_n2_is_equality():
    modes = [Mode((1,), 1.0, "cos", "cosh"), Mode((2,), 2.0, "sin", "sinh", 0.3)]
    rep = kato_inequality_check(modes, 2)
    assert rep.passed
    assert rep.details["max_ratio"] == pytest.approx(2.0, rel=1e-9)
    assert rep.details["codazzi_defect"] < 1e-12


def test_kato_needs_codazzi():
    # u = cos x: Hess u is traceless-adjusted but not Codazzi, and the bound fails
    rep = kato_inequality_check([Mode((1,), 0.0, "cos", "cos")], 2)
    assert not rep.passed
    assert rep.details["codazzi_defect"] > 0.1
    assert rep.details["max_ratio"] == pytest.approx(4.0, rel=1e-9)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_kato_random(n):
    rep = kato_random_check(n, fields=15, seed=7, grid=6)
    assert rep.passed and rep.details["codazzi_defect"] < 1e-10


def test_random_modes_are_harmonic():
    rng = np.random.default_rng(1)
    for md in random_harmonic_modes(4, rng):
        assert md.q == pytest.approx(np.linalg.norm(md.p))
        assert md.profile in ("cosh", "sinh")


# -- suites ------------------------------------------------------------


def test_suite_registry():
    assert set(SUITES) == {"identities", "bounds", "alencar", "kato"}
    with pytest.raises(ValueError):
        run_suites(["nope"])


def test_bounds_suite_htorus_n3():
    reps = run_suites(["bounds"], family="htorus", n=3)
    assert all(r.passed for r in reps)
    assert {r.family_params["k"] for r in reps if r.equality} == {2}
