import csv
import io
import itertools
import math
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbmorse import InvalidDimension, ModelHypersurface, geometric_data, jacobi_spectrum, strong_index, weak_index
from fbmorse.spectra import (
    SpectralLine,
    Spectrum,
    empirical_window,
    harmonic_dim,
    hemisphere_laplace_spectrum,
    index_scan,
    jacobi_spectrum_degrees,
    neumann_multiplicity,
    product_spectrum,
    radius_window,
    sphere_laplace_spectrum,
)

M = ModelHypersurface


# -- oracle: harmonic polynomials as the kernel of the Euclidean Laplacian --


def _monomials(nvars, degree, even_last=False):
    out = []
    for c in itertools.combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in c:
            e[i] += 1
        if even_last and e[-1] % 2:
            continue
        out.append(tuple(e))
    return out


@lru_cache(maxsize=None)
def kernel_dim(m, l, even_last=False):
    """dim of degree-l harmonic polynomials on R^{m+1} (optionally even in the last variable)."""
    src = _monomials(m + 1, l, even_last)
    if l < 2:
        return len(src)
    dst = {e: i for i, e in enumerate(_monomials(m + 1, l - 2, even_last))}
    L = np.zeros((len(dst), len(src)))
    for j, e in enumerate(src):
        for i in range(m + 1):
            if e[i] >= 2:
                f = list(e)
                f[i] -= 2
                L[dst[tuple(f)], j] += e[i] * (e[i] - 1)
    return len(src) - np.linalg.matrix_rank(L)


@pytest.mark.parametrize("m", range(1, 6))
@pytest.mark.parametrize("l", range(0, 6))
def test_harmonic_dim_against_polynomial_kernel(m, l):
    assert harmonic_dim(m, l) == kernel_dim(m, l)


@pytest.mark.parametrize("m", range(1, 6))
@pytest.mark.parametrize("l", range(0, 6))
def test_neumann_multiplicity_against_even_harmonics(m, l):
    # Neumann eigenfunctions of the half sphere are the harmonics even in x_{m+1}
    assert neumann_multiplicity(m, l) == kernel_dim(m, l, even_last=True)


def test_known_multiplicities():
    assert [harmonic_dim(2, l) for l in range(4)] == [1, 3, 5, 7]
    assert [neumann_multiplicity(2, l) for l in range(4)] == [1, 2, 3, 4]
    assert neumann_multiplicity(3, 2) == 6
    assert [harmonic_dim(1, l) for l in range(4)] == [1, 2, 2, 2]
    assert [neumann_multiplicity(1, l) for l in range(4)] == [1, 1, 1, 1]


def test_invalid_factor_arguments():
    with pytest.raises(InvalidDimension):
        sphere_laplace_spectrum(0, 1.0, 3)
    with pytest.raises(InvalidDimension):
        hemisphere_laplace_spectrum(2, -1.0, 3)
    with pytest.raises(InvalidDimension):
        sphere_laplace_spectrum(2, 1.0, -1)


def test_sphere_and_hemisphere_spectra():
    s = sphere_laplace_spectrum(2, 1.0, 3)
    assert s.as_dict() == {0.0: 1, 2.0: 3, 6.0: 5, 12.0: 7}
    h = hemisphere_laplace_spectrum(2, 1.0, 3)
    assert h.as_dict() == {0.0: 1, 2.0: 2, 6.0: 3, 12.0: 4}
    assert h.exact_below == 20.0
    s = sphere_laplace_spectrum(2, 0.5, 1)
    assert s.as_dict() == {0.0: 1, 8.0: 3}


def test_product_merges_equal_sums():
    a = Spectrum.from_lines([SpectralLine(0.0, 1, ((0,),)), SpectralLine(1.0, 2, ((1,),))], 4.0)
    b = Spectrum.from_lines([SpectralLine(0.0, 1, ((0,),)), SpectralLine(1.0, 1, ((1,),))], 3.0)
    p = product_spectrum(a, b)
    assert p.as_dict() == {0.0: 1, 1.0: 3, 2.0: 2}
    assert p.exact_below == 3.0


def test_spectrum_queries():
    s = jacobi_spectrum(M.equator(3))
    assert s.eigenvalues(2) == [-3.0, 0.0]
    with pytest.raises(ValueError):
        s.count_below(s.exact_below + 1)
    with pytest.raises(ValueError):
        s.eigenvalues(10_000)


def test_csv_round_trips_values():
    s = jacobi_spectrum(M.htorus(3, 1, 0.37), count=20)
    rows = list(csv.DictReader(io.StringIO(s.to_csv())))
    assert [float(r["value"]) for r in rows] == [ln.value for ln in s.lines]
    assert [int(r["multiplicity"]) for r in rows] == [ln.multiplicity for ln in s.lines]


# -- closed-form index results -------------------------------------------


@pytest.mark.parametrize("n", range(2, 7))
def test_equator(n):
    m = M.equator(n)
    s = jacobi_spectrum(m)
    assert s.lines[0].value == -n and s.lines[0].multiplicity == 1
    assert s.lines[1].value == 0.0 and s.lines[1].multiplicity == n
    rep = strong_index(m)
    assert rep.strong_index == 1 and not rep.discrepancy_flag


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("r", [0.3, 0.5, 0.8])
def test_caps_weakly_stable(n, r):
    m = M.cap(n, r)
    w = weak_index(m)
    assert w.weak_index == 0 and w.strong_index == 1
    assert abs(w.lambda1 + n / r**2) <= 1e-12 * n / r**2
    assert abs(w.lambda1_weak) <= 1e-12
    assert not w.discrepancy_flag


def test_clifford_n2_low_lines():
    s = jacobi_spectrum(M.clifford(2, 1), threshold=0.5)
    assert s.as_dict() == {-4.0: 1, -2.0: 3, 0.0: 2}


def flat_torus_oracle(r1, r2, c, pmax=40):
    """Jacobi eigenvalues on S^1(r1) x S^1_+(r2) by direct (p, q) enumeration."""
    vals = []
    for p in range(-pmax, pmax + 1):
        for q in range(0, pmax + 1):
            vals.append(p * p / r1**2 + q * q / r2**2 - c)
    return sorted(vals)


def test_clifford_n2_matches_mode_enumeration():
    m = M.clifford(2, 1)
    c = geometric_data(m).potential
    exact = flat_torus_oracle(1 / math.sqrt(2), 1 / math.sqrt(2), c)[:30]
    got = jacobi_spectrum(m, count=30).eigenvalues(30)
    assert np.allclose(got, exact, atol=1e-12)


@pytest.mark.parametrize("n", range(2, 7))
def test_clifford_index(n):
    for k in range(1, n):
        s = strong_index(M.clifford(n, k))
        assert s.strong_index == n + 2
        assert s.weak_index == n + 1
        assert s.lambda1 == -2 * n
        assert s.paper_claim == n + 1 and s.discrepancy_flag


def brute_index(n, k, r, half):
    """Strong index of the half H-torus by enumerating products of factor harmonics."""
    a, b = r * r, 1 - r * r
    c = k / a + (n - k) / b
    count = 0
    for l1 in itertools.takewhile(lambda l: l * (l + k - 1) / a < c, itertools.count()):
        e1 = l1 * (l1 + k - 1) / a
        for l2 in itertools.takewhile(lambda l: e1 + l * (l + n - k - 1) / b < c, itertools.count()):
            count += kernel_dim(k, l1, half == "First") * kernel_dim(n - k, l2, half == "Second")
    return count


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 4), data=st.data())
def test_htorus_index_matches_brute_force(n, data):
    k = data.draw(st.integers(1, n - 1))
    r = data.draw(st.floats(0.35, 0.93))
    half = data.draw(st.sampled_from(["First", "Second"]))
    m = M.htorus(n, k, r, half)
    # stay clear of radii where a mode crosses zero and the count hinges on rounding
    near = [ln.value for ln in jacobi_spectrum(m, threshold=1.0).lines if 0 < abs(ln.value) < 1e-6]
    if near:
        return
    s = strong_index(m)
    assert s.strong_index == brute_index(n, k, r, half)
    assert s.weak_index == max(0, s.strong_index - 1)


@pytest.mark.parametrize("n,k", [(2, 1), (3, 1), (3, 2), (4, 2), (4, 3)])
def test_radius_window_scan(n, k):
    lo, hi = radius_window(n, k)
    radii = [round(0.2 + i * 1e-3, 12) for i in range(781)]
    rows = index_scan(n, k, radii)
    win = empirical_window(rows, n + 1)
    assert abs(win[0] - lo) <= 1e-3 and abs(win[1] - hi) <= 1e-3


def test_window_same_for_both_halvings():
    radii = [round(0.2 + i * 1e-3, 12) for i in range(781)]
    a = empirical_window(index_scan(3, 1, radii, "First"), 4)
    b = empirical_window(index_scan(3, 1, radii, "Second"), 4)
    assert a == b


def test_empirical_window_rejects_gaps():
    rows = index_scan(2, 1, [0.3, 0.6, 0.3, 0.6])
    with pytest.raises(ValueError):
        empirical_window(rows, 3)
    assert empirical_window(rows, 99) is None


def test_radius_window_validation():
    with pytest.raises(InvalidDimension):
        radius_window(3, 3)


@pytest.mark.parametrize(
    "m", [M.equator(3), M.cap(2, 0.4), M.clifford(3, 1), M.htorus(4, 2, 0.55, "First")], ids=lambda m: m.label()
)
def test_degree_cutoff_agrees_with_threshold(m):
    a = jacobi_spectrum_degrees(m, 4)
    b = jacobi_spectrum(m, threshold=a.exact_below)
    below = [ln for ln in b.lines if ln.value < a.exact_below]
    assert [(ln.value, ln.multiplicity) for ln in a.lines] == [(ln.value, ln.multiplicity) for ln in below]


def test_report_serializes():
    d = strong_index(M.clifford(2, 1)).to_dict()
    assert d["strong_index"] == 4 and d["paper_claim"] == 3 and d["discrepancy_flag"]
