"""Exact Laplace and Jacobi spectra of the catalog models, and Morse-index counts.

Every catalog model has a constant Jacobi potential ``c`` and a Laplacian
whose spectrum is known factor by factor, so the Jacobi spectrum is the
Laplace spectrum shifted by ``-c`` and index counting is a finite
enumeration.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Optional, Sequence

from .errors import InvalidDimension, InvalidModel
from .models import Kind, ModelHypersurface, geometric_data

MERGE_TOL = 1e-12


def harmonic_dim(m: int, l: int) -> int:
    """Dimension of degree-``l`` spherical harmonics on ``S^m``."""
    if m < 0 or l < 0:
        raise InvalidDimension(f"need m >= 0, l >= 0 (got m={m}, l={l})")
    if m == 0:
        return 1 if l <= 1 else 0
    lower = comb(m + l - 2, m) if l >= 2 else 0
    return comb(m + l, m) - lower


def neumann_multiplicity(m: int, l: int) -> int:
    """Multiplicity of ``l(l+m-1)`` in the Neumann spectrum of the half-sphere ``S^m_+``.

    These are the degree-``l`` harmonics that are even under the reflection
    fixing the boundary; they restrict to harmonics on ``S^{m-1}`` of degrees
    ``l, l-2, ...``.
    """
    if m < 1 or l < 0:
        raise InvalidDimension(f"need m >= 1, l >= 0 (got m={m}, l={l})")
    return sum(harmonic_dim(m - 1, j) for j in range(l % 2, l + 1, 2))


def _same(a: float, b: float) -> bool:
    return abs(a - b) <= MERGE_TOL * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class SpectralLine:
    """An eigenvalue with its multiplicity and the mode labels that produce it."""

    value: float
    multiplicity: int
    labels: tuple[tuple[int, ...], ...]

    @property
    def label(self) -> tuple[int, ...]:
        return self.labels[0]

    def shifted(self, by: float) -> "SpectralLine":
        return SpectralLine(self.value + by, self.multiplicity, self.labels)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "multiplicity": self.multiplicity,
            "labels": [list(lab) for lab in self.labels],
        }


@dataclass(frozen=True)
class Spectrum:
    """Sorted spectral lines; every eigenvalue below ``exact_below`` is present
    with its exact multiplicity."""

    lines: tuple[SpectralLine, ...]
    exact_below: float

    @classmethod
    def from_lines(cls, lines: Iterable[SpectralLine], exact_below: float) -> "Spectrum":
        """Sort and merge lines whose values agree to ``MERGE_TOL``."""
        merged: list[SpectralLine] = []
        for line in sorted(lines, key=lambda ln: (ln.value, ln.labels)):
            if line.multiplicity <= 0:
                continue
            if merged and _same(merged[-1].value, line.value):
                prev = merged[-1]
                merged[-1] = SpectralLine(
                    prev.value, prev.multiplicity + line.multiplicity, prev.labels + line.labels
                )
            else:
                merged.append(line)
        return cls(tuple(merged), float(exact_below))

    def __iter__(self):
        return iter(self.lines)

    def __len__(self):
        return len(self.lines)

    def as_dict(self) -> dict[float, int]:
        """``{value: multiplicity}``, handy in tests and summaries."""
        return {ln.value: ln.multiplicity for ln in self.lines}

    def exact_lines(self) -> list[SpectralLine]:
        return [ln for ln in self.lines if ln.value < self.exact_below]

    def eigenvalues(self, count: Optional[int] = None) -> list[float]:
        """Eigenvalues repeated by multiplicity, ascending (certified ones only)."""
        out: list[float] = []
        for ln in self.exact_lines():
            out.extend([ln.value] * ln.multiplicity)
            if count is not None and len(out) >= count:
                return out[:count]
        if count is not None and len(out) < count:
            raise ValueError(f"only {len(out)} certified eigenvalues below {self.exact_below}")
        return out

    def count_below(self, threshold: float) -> int:
        if threshold > self.exact_below:
            raise ValueError("threshold above the exactness certificate")
        return sum(ln.multiplicity for ln in self.lines if ln.value < threshold)

    def shifted(self, by: float) -> "Spectrum":
        return Spectrum(tuple(ln.shifted(by) for ln in self.lines), self.exact_below + by)

    def truncated(self) -> "Spectrum":
        return Spectrum(tuple(self.exact_lines()), self.exact_below)

    def to_dict(self) -> dict:
        return {"exact_below": self.exact_below, "lines": [ln.to_dict() for ln in self.lines]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["value", "multiplicity", "label", "exact_below"])
        for ln in self.lines:
            lab = ";".join("(" + ",".join(str(i) for i in lab) + ")" for lab in ln.labels)
            w.writerow([f"{ln.value:.17g}", ln.multiplicity, lab, f"{self.exact_below:.17g}"])
        return buf.getvalue()


# ---------------------------------------------------------------------------
# Factor spectra


def _check_factor(m, lmax, radius=None, inv_r2=None):
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise InvalidDimension(f"sphere dimension must be an integer >= 1, got {m!r}")
    if not isinstance(lmax, int) or lmax < 0:
        raise InvalidDimension(f"lmax must be an integer >= 0, got {lmax!r}")
    if radius is not None and not radius > 0:
        raise InvalidDimension(f"radius must be positive, got {radius!r}")
    if inv_r2 is not None and not inv_r2 > 0:
        raise InvalidDimension(f"1/radius^2 must be positive, got {inv_r2!r}")


def _factor_spectrum(m: int, inv_r2: float, lmax: int, halved: bool) -> Spectrum:
    lines = []
    for l in range(lmax + 1):
        mult = neumann_multiplicity(m, l) if halved else harmonic_dim(m, l)
        lines.append(SpectralLine(l * (l + m - 1) * inv_r2, mult, ((l,),)))
    return Spectrum.from_lines(lines, (lmax + 1) * (lmax + m) * inv_r2)


def sphere_laplace_spectrum(m: int, radius: float, lmax: int) -> Spectrum:
    """Spectrum of ``-Δ`` on the round sphere ``S^m(radius)`` up to degree ``lmax``."""
    _check_factor(m, lmax, radius=radius)
    return _factor_spectrum(m, 1.0 / (radius * radius), lmax, halved=False)


def hemisphere_laplace_spectrum(m: int, radius: float, lmax: int) -> Spectrum:
    """Neumann spectrum of ``-Δ`` on the half-sphere ``S^m_+(radius)`` up to degree ``lmax``."""
    _check_factor(m, lmax, radius=radius)
    return _factor_spectrum(m, 1.0 / (radius * radius), lmax, halved=True)


def product_spectrum(a: Spectrum, b: Spectrum) -> Spectrum:
    """Spectrum of a Riemannian product: sums of eigenvalues, products of multiplicities.

    Both factor spectra are nonnegative, so a sum below
    ``min(a.exact_below, b.exact_below)`` can only come from certified lines.
    """
    lines = [
        SpectralLine(la.value + lb.value, la.multiplicity * lb.multiplicity,
                     tuple(x + y for x in la.labels for y in lb.labels))
        for la in a.lines
        for lb in b.lines
    ]
    return Spectrum.from_lines(lines, min(a.exact_below, b.exact_below))


# ---------------------------------------------------------------------------
# Model spectra


def _factor_data(m: ModelHypersurface) -> list[tuple[int, float, bool]]:
    """``(dim, 1/radius^2, halved)`` per factor, using exact rationals where known."""
    if m.kind is Kind.EQUATOR:
        return [(m.n, 1.0, True)]
    if m.kind is Kind.UMBILICAL_CAP:
        return [(m.n, 1.0 / (m.r * m.r), True)]
    n, k = m.n, m.k
    if m.kind is Kind.MINIMAL_CLIFFORD_HALF:
        inv = (n / k, n / (n - k))
    else:
        inv = (1.0 / (m.r * m.r), 1.0 / (1.0 - m.r * m.r))
    first_halved = m.halved_factor.value == "First"
    return [(k, inv[0], first_halved), (n - k, inv[1], not first_halved)]


def _lmax_for(dim: int, inv_r2: float, bound: float) -> int:
    """Smallest ``lmax >= 1`` whose certificate ``(lmax+1)(lmax+dim)/r^2`` exceeds ``bound``."""
    l = 1
    while (l + 1) * (l + dim) * inv_r2 <= bound:
        l += 1
    return l


def laplace_spectrum(m: ModelHypersurface, laplace_threshold: float) -> Spectrum:
    """Laplace (Neumann) spectrum of the model, certified at least below ``laplace_threshold``."""
    parts = [
        _factor_spectrum(dim, inv, _lmax_for(dim, inv, laplace_threshold), halved)
        for dim, inv, halved in _factor_data(m)
    ]
    spec = parts[0]
    for p in parts[1:]:
        spec = product_spectrum(spec, p)
    return spec


def jacobi_spectrum(m: ModelHypersurface, threshold: Optional[float] = None,
                    count: Optional[int] = None) -> Spectrum:
    """Jacobi spectrum ``mu - c`` of the Neumann problem, certified lines only.

    Parameters
    ----------
    m : ModelHypersurface
    threshold : float, optional
        Every Jacobi eigenvalue below this value is returned.  Defaults to the
        potential, which covers all negative and zero modes.
    count : int, optional
        Alternatively, return at least this many eigenvalues (with multiplicity).
    """
    if not isinstance(m, ModelHypersurface):
        raise InvalidModel(f"expected a ModelHypersurface, got {type(m).__name__}")
    c = geometric_data(m).potential
    if count is not None:
        if count < 1:
            raise ValueError("count must be >= 1")
        t = c if threshold is None else threshold
        while True:
            spec = laplace_spectrum(m, t + c).shifted(-c).truncated()
            if sum(ln.multiplicity for ln in spec.lines) >= count:
                return spec
            t = 2 * t + c + 1
    t = c if threshold is None else float(threshold)
    return laplace_spectrum(m, t + c).shifted(-c).truncated()


def jacobi_spectrum_degrees(m: ModelHypersurface, lmax: int) -> Spectrum:
    """Jacobi spectrum from factor harmonics of degree ``<= lmax``, certified lines only."""
    if not isinstance(m, ModelHypersurface):
        raise InvalidModel(f"expected a ModelHypersurface, got {type(m).__name__}")
    if not isinstance(lmax, int) or isinstance(lmax, bool) or lmax < 0:
        raise InvalidDimension(f"lmax must be an integer >= 0, got {lmax!r}")
    parts = [_factor_spectrum(dim, inv, lmax, halved) for dim, inv, halved in _factor_data(m)]
    spec = parts[0]
    for p in parts[1:]:
        spec = product_spectrum(spec, p)
    return spec.shifted(-geometric_data(m).potential).truncated()


# ---------------------------------------------------------------------------
# Index counting


@dataclass
class IndexReport:
    """Strong/weak Morse index of a model with the claimed value alongside.

    ``paper_claim_relation`` is ``"=="``, ``">="`` or ``">"`` and is read as
    ``<engine value> <relation> paper_claim``.
    """

    model: ModelHypersurface
    strong_index: int
    weak_index: int
    lambda1: float
    lambda1_weak: float
    negative_lines: list[SpectralLine]
    paper_claim: Optional[int] = None
    paper_claim_kind: Optional[str] = None
    paper_claim_relation: str = "=="
    paper_claim_source: str = ""
    discrepancy_flag: bool = False
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "strong_index": self.strong_index,
            "weak_index": self.weak_index,
            "lambda1": self.lambda1,
            "lambda1_weak": self.lambda1_weak,
            "negative_lines": [ln.to_dict() for ln in self.negative_lines],
            "paper_claim": self.paper_claim,
            "paper_claim_kind": self.paper_claim_kind,
            "paper_claim_relation": self.paper_claim_relation,
            "paper_claim_source": self.paper_claim_source,
            "discrepancy_flag": self.discrepancy_flag,
            "notes": list(self.notes),
        }


def _negative(value: float, scale: float) -> bool:
    # zero modes are exact zeros up to rounding of the closed forms
    return value < -MERGE_TOL * max(1.0, abs(scale))


def _index_core(m: ModelHypersurface):
    c = geometric_data(m).potential
    # negative modes have Laplace value < c; lmax_for(c) certifies beyond it,
    # and also keeps every degree-1 line so the second eigenvalue is present
    spec = laplace_spectrum(m, c).shifted(-c).truncated()
    neg = [ln for ln in spec.lines if _negative(ln.value, c)]
    strong = sum(ln.multiplicity for ln in neg)
    evs = spec.eigenvalues()
    lam1 = evs[0]
    lam1_weak = evs[1]
    # constant potential: the lowest mode is the constant, simple, and every
    # other Neumann eigenfunction is L2-orthogonal to constants
    weak = max(0, strong - 1)
    return strong, weak, lam1, lam1_weak, neg


def in_radius_window(m: ModelHypersurface) -> bool:
    lo, hi = radius_window(m.n, m.k)
    return lo <= m.r <= hi


def _claim(m: ModelHypersurface, which: str):
    """(claim, relation, source) for the claimed index, or None."""
    n = m.n
    if which == "strong":
        if m.kind is Kind.EQUATOR:
            return 1, "==", "claimed equator index"
        if m.kind is Kind.MINIMAL_CLIFFORD_HALF:
            return n + 1, "==", "claimed half Clifford index"
        if m.kind is Kind.UMBILICAL_CAP:
            return 1, "==", "claimed umbilical cap index"
        return n + 1, ">=", "claimed lower bound for half H-tori"
    if m.kind is Kind.UMBILICAL_CAP:
        return 0, "==", "claimed weak stability of caps"
    if m.kind is Kind.HTORUS_HALF:
        if in_radius_window(m):
            return n + 1, "==", "claimed weak index, inside radius window"
        return n + 1, ">", "claimed weak index, outside radius window"
    return None


_RELATIONS = {
    "==": lambda a, b: a == b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
}


def _report(m: ModelHypersurface, which: str) -> IndexReport:
    strong, weak, lam1, lam1w, neg = _index_core(m)
    rep = IndexReport(m, strong, weak, lam1, lam1w, neg)
    claim = _claim(m, which)
    if claim is not None:
        value, rel, source = claim
        rep.paper_claim, rep.paper_claim_relation, rep.paper_claim_source = value, rel, source
        rep.paper_claim_kind = which
        ours = strong if which == "strong" else weak
        rep.discrepancy_flag = not _RELATIONS[rel](ours, value)
        if rep.discrepancy_flag:
            rep.notes.append(
                f"exhaustive mode count gives {which} index {ours}; claimed value is {rel} {value}"
            )
    if m.kind is Kind.MINIMAL_CLIFFORD_HALF:
        rep.notes.append(
            "degree-1 modes of the full factor have multiplicity dim+1 "
            "(k+1 or n-k+1), which gives n+2 negative modes in total"
        )
    rep.notes.append("half-sphere multiplicities use reflection-even harmonic counts")
    return rep


def strong_index(m: ModelHypersurface) -> IndexReport:
    """Number of negative Jacobi eigenvalues (with multiplicity), exact."""
    return _report(m, "strong")


def weak_index(m: ModelHypersurface) -> IndexReport:
    """Index on mean-zero variations; the attached claim is the weak one."""
    return _report(m, "weak")


def radius_window(n: int, k: int) -> tuple[float, float]:
    """Radii of ``S^k(r)`` for which the half H-torus has weak index exactly ``n+1``.

    Below ``sqrt(k/(n+2))`` the degree-2 modes of the ``S^{n-k}`` factor turn
    negative, above ``sqrt((k+2)/(n+2))`` those of the ``S^k`` factor do.
    """
    if not (isinstance(n, int) and isinstance(k, int)) or n < 2 or not 1 <= k <= n - 1:
        raise InvalidDimension(f"need integers n >= 2 and 1 <= k <= n-1, got n={n}, k={k}")
    return math.sqrt(k / (n + 2)), math.sqrt((k + 2) / (n + 2))


# ---------------------------------------------------------------------------
# Radius scans


@dataclass(frozen=True)
class ScanRow:
    r: float
    strong: int
    weak: int
    lambda1: float
    lambda1_weak: float


def index_scan(n: int, k: int, radii: Sequence[float], halved_factor: str = "Second") -> list[ScanRow]:
    """Strong/weak index of ``HTorusHalf(n, k, r)`` for each radius, in input order."""
    rows = []
    for r in radii:
        m = ModelHypersurface.htorus(n, k, float(r), halved_factor)
        strong, weak, lam1, lam1w, _ = _index_core(m)
        rows.append(ScanRow(float(r), strong, weak, lam1, lam1w))
    return rows


def empirical_window(rows: Sequence[ScanRow], target: int) -> Optional[tuple[float, float]]:
    """Smallest and largest scanned radius with ``weak == target``.

    Raises ``ValueError`` if the matching radii are not one contiguous run.
    """
    hits = [i for i, row in enumerate(rows) if row.weak == target]
    if not hits:
        return None
    if hits[-1] - hits[0] + 1 != len(hits):
        raise ValueError("weak index equals the target on a non-contiguous set of radii")
    return rows[hits[0]].r, rows[hits[-1]].r
