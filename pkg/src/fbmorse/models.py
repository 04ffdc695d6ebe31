"""Catalog of model free-boundary hypersurfaces of the upper hemisphere.

Four families live here: the totally geodesic equator, umbilical caps, half
of a minimal Clifford torus and half of an H-torus.  Everything is closed
form.  Each model also carries an explicit chart (products of hyperspherical
coordinate patches), which the finite-difference identity checks use.

Conventions
-----------
* ``H`` is the trace of the shape operator (unnormalized).
* The cap and equator are oriented so that ``H >= 0``.  The tori are oriented
  so that the curvature of the ``k``-dimensional factor is positive, which
  makes ``H`` negative once ``r > sqrt(k/n)``.
* Coordinates of ``R^{n+2}`` are zero based, so the half-space is
  ``x[n+1] >= 0``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidModel, OutOfChart
from .reports import IdentityReport


class Kind(str, Enum):
    EQUATOR = "Equator"
    UMBILICAL_CAP = "UmbilicalCap"
    MINIMAL_CLIFFORD_HALF = "MinimalCliffordHalf"
    HTORUS_HALF = "HTorusHalf"


class HalvedFactor(str, Enum):
    FIRST = "First"
    SECOND = "Second"


TORUS_KINDS = (Kind.MINIMAL_CLIFFORD_HALF, Kind.HTORUS_HALF)


def _as_int(value, name):
    if isinstance(value, bool):
        raise InvalidModel(f"{name} must be an integer, got {value!r}")
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, float) and value.is_integer():
        return int(value)
    raise InvalidModel(f"{name} must be an integer, got {value!r}")


@dataclass(frozen=True)
class ModelHypersurface:
    """One model hypersurface.

    Use the named constructors (:meth:`equator`, :meth:`cap`,
    :meth:`clifford`, :meth:`htorus`) or :meth:`from_dict`; the raw
    constructor validates too.
    """

    kind: Kind
    n: int
    k: Optional[int] = None
    r: Optional[float] = None
    halved_factor: Optional[HalvedFactor] = None

    def __post_init__(self):
        try:
            kind = Kind(self.kind)
        except ValueError:
            raise InvalidModel(f"unknown model kind {self.kind!r}") from None
        n = _as_int(self.n, "n")
        if n < 2:
            raise InvalidModel(f"n must be >= 2, got {n}")
        k, r, half = self.k, self.r, self.halved_factor

        if kind in TORUS_KINDS:
            if k is None:
                raise InvalidModel(f"{kind.value} needs k")
            k = _as_int(k, "k")
            if not 1 <= k <= n - 1:
                raise InvalidModel(f"k must satisfy 1 <= k <= n-1, got k={k}, n={n}")
            try:
                half = HalvedFactor(half) if half is not None else HalvedFactor.SECOND
            except ValueError:
                raise InvalidModel(f"halved_factor must be First or Second, got {half!r}") from None
            if kind is Kind.MINIMAL_CLIFFORD_HALF:
                if r is not None:
                    raise InvalidModel("MinimalCliffordHalf radii are derived; do not pass r")
            else:
                if r is None:
                    raise InvalidModel("HTorusHalf needs r")
                r = float(r)
                if not (0.0 < r < 1.0):
                    raise InvalidModel(f"HTorusHalf radius must lie in (0, 1), got {r}")
        else:
            if k is not None:
                raise InvalidModel(f"{kind.value} takes no k")
            if half is not None:
                raise InvalidModel(f"{kind.value} takes no halved_factor")
            if kind is Kind.EQUATOR:
                if r is not None and float(r) != 1.0:
                    raise InvalidModel("Equator takes no r (it is the r = 1 cap)")
                r = None
            else:
                if r is None:
                    raise InvalidModel("UmbilicalCap needs r")
                r = float(r)
                if not (0.0 < r <= 1.0) or math.isnan(r):
                    raise InvalidModel(f"UmbilicalCap radius must lie in (0, 1], got {r}")
                if r == 1.0:
                    kind, r = Kind.EQUATOR, None

        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "halved_factor", half)

    # -- constructors -----------------------------------------------------

    @classmethod
    def equator(cls, n):
        return cls(Kind.EQUATOR, n)

    @classmethod
    def cap(cls, n, r):
        return cls(Kind.UMBILICAL_CAP, n, r=r)

    @classmethod
    def clifford(cls, n, k, halved_factor="Second"):
        return cls(Kind.MINIMAL_CLIFFORD_HALF, n, k=k, halved_factor=halved_factor)

    @classmethod
    def htorus(cls, n, k, r, halved_factor="Second"):
        return cls(Kind.HTORUS_HALF, n, k=k, r=r, halved_factor=halved_factor)

    # -- derived quantities ----------------------------------------------

    @property
    def is_torus(self) -> bool:
        return self.kind in TORUS_KINDS

    def factor_radii(self) -> tuple[float, float]:
        """Radii ``(r1, r2)`` of the two product factors (tori only)."""
        if self.kind is Kind.MINIMAL_CLIFFORD_HALF:
            return math.sqrt(self.k / self.n), math.sqrt((self.n - self.k) / self.n)
        if self.kind is Kind.HTORUS_HALF:
            return self.r, math.sqrt(1.0 - self.r * self.r)
        raise InvalidModel(f"{self.kind.value} is not a product of spheres")

    def factors(self) -> list["Factor"]:
        """Sphere factors in chart order; exactly one of them is halved."""
        if self.kind is Kind.EQUATOR:
            return [Factor(self.n, 1.0, True, 0)]
        if self.kind is Kind.UMBILICAL_CAP:
            return [Factor(self.n, self.r, True, 0)]
        r1, r2 = self.factor_radii()
        first_halved = self.halved_factor is HalvedFactor.FIRST
        return [
            Factor(self.k, r1, first_halved, 0),
            Factor(self.n - self.k, r2, not first_halved, self.k),
        ]

    def label(self) -> str:
        parts = [f"n={self.n}"]
        if self.k is not None:
            parts.append(f"k={self.k}")
        if self.r is not None:
            parts.append(f"r={self.r:g}")
        if self.halved_factor is not None:
            parts.append(f"half={self.halved_factor.value}")
        return f"{self.kind.value}({', '.join(parts)})"

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "n": self.n}
        if self.k is not None:
            d["k"] = self.k
        if self.r is not None:
            d["r"] = self.r
        if self.halved_factor is not None:
            d["halved_factor"] = self.halved_factor.value
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d) -> "ModelHypersurface":
        if not isinstance(d, dict):
            raise InvalidModel(f"model descriptor must be a JSON object, got {type(d).__name__}")
        unknown = set(d) - {"kind", "n", "k", "r", "halved_factor"}
        if unknown:
            raise InvalidModel(f"unknown model fields: {sorted(unknown)}")
        if "kind" not in d or "n" not in d:
            raise InvalidModel("model descriptor needs 'kind' and 'n'")
        return cls(d["kind"], d["n"], d.get("k"), d.get("r"), d.get("halved_factor"))

    @classmethod
    def from_json(cls, text: str) -> "ModelHypersurface":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidModel(f"malformed model JSON: {exc}") from None
        return cls.from_dict(d)


# ---------------------------------------------------------------------------
# Scalar invariants


@dataclass(frozen=True)
class GeometricData:
    n: int
    H: float
    normA2: float
    normA0_2: float
    principal_curvatures: tuple[tuple[float, int], ...]
    potential: float

    def potential_traceless(self) -> float:
        """``|Å|² + n(1 + H²/n²)``, the second form of the Jacobi potential."""
        return self.normA0_2 + self.n * (1.0 + self.H**2 / self.n**2)

    def traceless_curvatures(self) -> tuple[tuple[float, int], ...]:
        return tuple((kap - self.H / self.n, mult) for kap, mult in self.principal_curvatures)

    def trace_A0_cubed(self) -> float:
        return math.fsum(mult * a**3 for a, mult in self.traceless_curvatures())

    @property
    def normA0(self) -> float:
        return math.sqrt(max(self.normA0_2, 0.0))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "H": self.H,
            "normA2": self.normA2,
            "normA0_2": self.normA0_2,
            "principal_curvatures": [[v, m] for v, m in self.principal_curvatures],
            "potential": self.potential,
        }


def _from_curvatures(n, curv) -> GeometricData:
    H = math.fsum(m * v for v, m in curv)
    A2 = math.fsum(m * v * v for v, m in curv)
    # |Å|² from the traceless eigenvalues: no cancellation when the model is umbilical
    A02 = math.fsum(m * (v - H / n) ** 2 for v, m in curv)
    return GeometricData(n, H, A2, A02, tuple(curv), A2 + n)


def geometric_data(m: ModelHypersurface) -> GeometricData:
    """Closed-form invariants of a model."""
    n = m.n
    if m.kind is Kind.EQUATOR:
        return GeometricData(n, 0.0, 0.0, 0.0, ((0.0, n),), float(n))
    if m.kind is Kind.UMBILICAL_CAP:
        r = m.r
        s = math.sqrt(1.0 - r * r)
        kap = s / r
        return GeometricData(n, n * kap, n * kap * kap, 0.0, ((kap, n),), n / (r * r))
    k = m.k
    if m.kind is Kind.MINIMAL_CLIFFORD_HALF:
        curv = ((math.sqrt((n - k) / k), k), (-math.sqrt(k / (n - k)), n - k))
        # exact values; summing the curvatures would only add rounding
        return GeometricData(n, 0.0, float(n), float(n), curv, 2.0 * n)
    r = m.r
    s = math.sqrt(1.0 - r * r)
    curv = ((s / r, k), (-r / s, n - k))
    gd = _from_curvatures(n, curv)
    return GeometricData(n, gd.H, gd.normA2, gd.normA0_2, curv, k / (r * r) + (n - k) / (s * s))


# ---------------------------------------------------------------------------
# Charts


@dataclass(frozen=True)
class Factor:
    """Round sphere ``S^dim(radius)`` occupying chart slots ``offset .. offset+dim``.

    Coordinates are hyperspherical ``(theta_1, ..., theta_{dim-1}, phi)`` with
    point ``radius * (sin(theta_1) * w, cos(theta_1))`` where ``w`` is the
    point of ``S^{dim-1}`` in the remaining angles, and ``(sin phi, cos phi)``
    on ``S^1``.  The halved factor keeps its last ambient coordinate
    nonnegative, i.e. ``theta_1 <= pi/2`` (or ``|phi| <= pi/2`` on a circle).
    """

    dim: int
    radius: float
    halved: bool
    offset: int

    @property
    def slots(self) -> slice:
        return slice(self.offset, self.offset + self.dim)


def _as_real(a) -> np.ndarray:
    """Float array, keeping extended precision when the caller passes it."""
    a = np.asarray(a)
    return a if np.issubdtype(a.dtype, np.floating) else a.astype(float)


def unit_sphere_point(ang: np.ndarray) -> np.ndarray:
    """Hyperspherical angles ``(..., m)`` -> points ``(..., m + 1)`` on ``S^m``."""
    ang = _as_real(ang)
    m = ang.shape[-1]
    if m == 1:
        phi = ang[..., 0]
        return np.stack([np.sin(phi), np.cos(phi)], axis=-1)
    th = ang[..., 0]
    rest = unit_sphere_point(ang[..., 1:])
    return np.concatenate([np.sin(th)[..., None] * rest, np.cos(th)[..., None]], axis=-1)


def unit_sphere_metric(ang: np.ndarray) -> np.ndarray:
    """Diagonal of the round metric in hyperspherical angles, shape ``(..., m)``."""
    ang = _as_real(ang)
    m = ang.shape[-1]
    s2 = np.sin(ang[..., :-1]) ** 2
    g = np.ones(ang.shape, dtype=ang.dtype)
    if m > 1:
        g[..., 1:] = np.cumprod(s2, axis=-1)
    return g


def chart_metric(m: ModelHypersurface, u) -> np.ndarray:
    """Diagonal metric coefficients ``g_ii`` at chart points ``u`` of shape ``(..., n)``."""
    u = _as_real(u)
    g = np.empty(u.shape, dtype=u.dtype)
    for f in m.factors():
        g[..., f.slots] = f.radius**2 * unit_sphere_metric(u[..., f.slots])
    return g


def _embed_array(m: ModelHypersurface, u):
    """Position and unit normal in ``R^{n+2}`` at chart points (no domain check)."""
    u = _as_real(u)
    if m.kind is Kind.EQUATOR:
        y = unit_sphere_point(u)
        zero = np.zeros(y.shape[:-1] + (1,))
        x = np.concatenate([y[..., :-1], zero, y[..., -1:]], axis=-1)
        nu = np.zeros_like(x)
        nu[..., m.n] = 1.0
        return x, nu
    if m.kind is Kind.UMBILICAL_CAP:
        r = m.r
        s = math.sqrt(1.0 - r * r)
        y = unit_sphere_point(u)
        col = np.ones(y.shape[:-1] + (1,))
        x = np.concatenate([r * y[..., :-1], s * col, r * y[..., -1:]], axis=-1)
        nu = np.concatenate([-s * y[..., :-1], r * col, -s * y[..., -1:]], axis=-1)
        return x, nu
    f1, f2 = m.factors()
    r1, r2 = f1.radius, f2.radius
    w1 = unit_sphere_point(u[..., f1.slots])
    w2 = unit_sphere_point(u[..., f2.slots])
    if m.halved_factor is HalvedFactor.SECOND:
        x = np.concatenate([r1 * w1, r2 * w2], axis=-1)
        nu = np.concatenate([-r2 * w1, r1 * w2], axis=-1)
    else:
        x = np.concatenate([r2 * w2, r1 * w1], axis=-1)
        nu = np.concatenate([r1 * w2, -r2 * w1], axis=-1)
    return x, nu


_CHART_TOL = 1e-12


def chart_bounds(m: ModelHypersurface) -> list[tuple[float, float]]:
    """Closed coordinate ranges of the chart, slot by slot."""
    bounds = []
    for f in m.factors():
        for j in range(f.dim):
            last = j == f.dim - 1
            if f.halved and j == 0:
                bounds.append((-math.pi / 2, math.pi / 2) if last else (0.0, math.pi / 2))
            else:
                bounds.append((-math.pi, math.pi) if last else (0.0, math.pi))
    return bounds


def embed(m: ModelHypersurface, chart_point: Sequence[float]):
    """Point ``x`` and unit normal ``nu`` of the model at one chart point.

    Raises :class:`OutOfChart` if the point leaves the (halved) parameter domain.
    """
    u = np.asarray(chart_point, dtype=float)
    if u.shape != (m.n,):
        raise OutOfChart(f"chart point must have {m.n} coordinates, got shape {u.shape}")
    for i, (lo, hi) in enumerate(chart_bounds(m)):
        if not (lo - _CHART_TOL <= u[i] <= hi + _CHART_TOL):
            raise OutOfChart(f"chart coordinate {i} = {u[i]!r} outside [{lo:.6g}, {hi:.6g}]")
    return _embed_array(m, u)


def boundary_slot(m: ModelHypersurface) -> int:
    """Chart slot whose level set ``pi/2`` (or ``+-pi/2``) is the boundary."""
    for f in m.factors():
        if f.halved:
            return f.offset
    raise AssertionError("every catalog model has a halved factor")


def sample_interior(m: ModelHypersurface, count: int, rng: np.random.Generator, margin=0.35):
    """Random chart points kept ``margin`` away from coordinate singularities."""
    u = np.empty((count, m.n))
    for f in m.factors():
        for j in range(f.dim):
            i = f.offset + j
            last = j == f.dim - 1
            if f.halved and j == 0:
                lo, hi = (-math.pi / 2 + margin, math.pi / 2 - margin) if last else (margin, math.pi / 2 - margin / 2)
            elif last:
                lo, hi = -math.pi, math.pi
            else:
                lo, hi = margin, math.pi - margin
            u[:, i] = rng.uniform(lo, hi, size=count)
    return u


def sample_boundary(m: ModelHypersurface, count: int, rng: np.random.Generator, margin=0.35):
    """Random boundary chart points and the chart sign of the outward direction."""
    u = sample_interior(m, count, rng, margin)
    b = boundary_slot(m)
    f = next(f for f in m.factors() if f.halved)
    if f.dim == 1:
        sign = rng.choice([-1.0, 1.0], size=count)
        u[:, b] = sign * math.pi / 2
    else:
        sign = np.ones(count)
        u[:, b] = math.pi / 2
    return u, sign


def chart_tangents(m: ModelHypersurface, u, h=1e-3):
    """Coordinate tangent vectors ``dx/du_i``, shape ``(..., n, n+2)``.

    Central differences with one Richardson step, so the error is O(h^4).
    """
    u = np.asarray(u, dtype=float)
    out = np.empty(u.shape + (m.n + 2,))
    for i in range(m.n):
        e = np.zeros(m.n)
        e[i] = 1.0

        def d(step):
            xp, _ = _embed_array(m, u + step * e)
            xm, _ = _embed_array(m, u - step * e)
            return (xp - xm) / (2 * step)

        out[..., i, :] = (4 * d(h / 2) - d(h)) / 3
    return out


def numeric_conormal(m: ModelHypersurface, u, outward_sign):
    """Outward unit conormal at boundary chart points, built from chart tangents."""
    T = chart_tangents(m, u)
    b = boundary_slot(m)
    others = [i for i in range(m.n) if i != b]
    eta = np.array(T[..., b, :])
    if others:
        # project out the boundary-tangent directions (orthonormalized first)
        Q, _ = np.linalg.qr(np.swapaxes(T[..., others, :], -1, -2))
        eta = eta - np.einsum("...ij,...j->...i", Q, np.einsum("...ji,...j->...i", Q, eta))
    eta = eta / np.linalg.norm(eta, axis=-1, keepdims=True)
    return eta * np.asarray(outward_sign, dtype=float)[..., None]


def free_boundary_check(m: ModelHypersurface, samples: int, seed: int, tolerance=1e-10) -> IdentityReport:
    """Check that the model meets the boundary sphere orthogonally.

    At random boundary points the numeric outward conormal must equal
    ``-e_{n+2}``; ``nu`` must be tangent to the boundary sphere and the point
    must lie on it.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    u, sign = sample_boundary(m, samples, rng)
    x, nu = _embed_array(m, u)
    eta = numeric_conormal(m, u, sign)
    target = np.zeros(m.n + 2)
    target[-1] = -1.0
    dev_eta = np.max(np.linalg.norm(eta - target, axis=-1))
    dev_nu = np.max(np.abs(nu[:, -1]))
    dev_x = np.max(np.abs(x[:, -1]))
    dev_orth = np.max(np.abs(np.einsum("ij,ij->i", eta, nu)))
    worst = float(max(dev_eta, dev_nu, dev_x, dev_orth))
    return IdentityReport(
        name=f"free_boundary[{m.label()}]",
        samples=samples,
        max_residual=worst,
        tolerance=tolerance,
        seed=seed,
        notes="outward conormal vs -e_{n+2}; nu tangent to the boundary sphere",
        details={
            "conormal_deviation": float(dev_eta),
            "normal_last_component": float(dev_nu),
            "boundary_height": float(dev_x),
            "conormal_dot_normal": float(dev_orth),
        },
    )
