r"""Special functions used throughout the package.

Everything that can overflow is carried in log scale. The public scalar
routines return :class:`SpecialValue`, i.e. ``value * exp(log_scale)``,
together with the evaluation regime so that callers (and tests) can see
which branch produced a number.

The modified Bessel function of the first kind is evaluated through

* its power series (all terms positive, summed relative to the leading term),
* the Debye uniform asymptotic expansion for large order
  (https://dlmf.nist.gov/10.41#ii),
* Hankel's large-argument expansion for small order and huge argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.polynomial import Polynomial
from scipy import special

from .errors import DomainError, PoleError

Regime = Literal["series", "continued-fraction", "asymptotic", "closed-form"]

#: Absolute distance to a non-positive integer below which Gamma arguments are rejected.
POLE_TOLERANCE = 1e-9

# Bessel regime thresholds; see bessel_i_regime.
_SERIES_Z_MIN = 10.0
_SERIES_Z_MAX = 500.0
_DEBYE_NU_MIN = 25.0
_DEBYE_TERMS = 14
_HANKEL_TERMS = 40


@dataclass(frozen=True)
class SpecialValue:
    """A special-function value stored as ``value * exp(log_scale)``."""

    value: float
    log_scale: float
    regime: Regime

    def __post_init__(self) -> None:
        if not (math.isfinite(self.value) and math.isfinite(self.log_scale)):
            raise DomainError(f"non-finite special value {self.value!r}, {self.log_scale!r}")

    @property
    def sign(self) -> float:
        return math.copysign(1.0, self.value) if self.value != 0.0 else 0.0

    @property
    def log_abs(self) -> float:
        """``log|value * exp(log_scale)|``; ``-inf`` for an exact zero."""
        if self.value == 0.0:
            return -math.inf
        return math.log(abs(self.value)) + self.log_scale

    def __float__(self) -> float:
        if self.value == 0.0:
            return 0.0
        return self.sign * math.exp(self.log_abs)


# ---------------------------------------------------------------------------
# Gamma function
# ---------------------------------------------------------------------------


def log_gamma(x):
    r"""Natural log of :math:`\Gamma(x)` for ``x > 0`` (scalar or array)."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    out = special.gammaln(arr)
    return float(out) if np.ndim(out) == 0 else out


def _check_pole(x: float) -> None:
    if x <= POLE_TOLERANCE and abs(x - round(x)) <= POLE_TOLERANCE:
        raise PoleError(f"Gamma pole at x={x!r} (tolerance {POLE_TOLERANCE})")


def gamma_signed(x: float) -> SpecialValue:
    r"""Sign and log-magnitude of :math:`\Gamma(x)` for any non-pole real ``x``.

    Negative arguments go through the reflection formula
    :math:`\Gamma(x) = \pi / (\sin(\pi x)\,\Gamma(1-x))`.
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma_signed requires a finite argument, got {x!r}")
    _check_pole(x)
    if x > 0:
        return SpecialValue(1.0, math.lgamma(x), "closed-form")
    sin_pix = math.sin(math.pi * x)
    log_mag = math.log(math.pi) - math.log(abs(sin_pix)) - math.lgamma(1.0 - x)
    return SpecialValue(math.copysign(1.0, sin_pix), log_mag, "closed-form")


def gamma_ratio_signed(num: list[float], den: list[float]) -> SpecialValue:
    r"""Signed :math:`\prod_i \Gamma(num_i) / \prod_j \Gamma(den_j)` evaluated in log space."""
    sign = 1.0
    log_mag = 0.0
    for arg in num:
        g = gamma_signed(arg)
        sign *= g.sign
        log_mag += g.log_scale
    for arg in den:
        g = gamma_signed(arg)
        sign *= g.sign
        log_mag -= g.log_scale
    return SpecialValue(sign, log_mag, "closed-form")


def gamma_quotient(z: float, a: float, b: float) -> float:
    r""":math:`\Gamma(z+a)/\Gamma(z+b)` via a difference of log-gammas.

    For large ``z`` this behaves like :math:`z^{a-b}`.
    """
    if z <= 0:
        raise DomainError(f"gamma_quotient requires z > 0, got {z!r}")
    if z + a <= 0 or z + b <= 0:
        _check_pole(z + a)
        _check_pole(z + b)
        raise DomainError(f"gamma_quotient requires z+a > 0 and z+b > 0 (z={z}, a={a}, b={b})")
    return math.exp(math.lgamma(z + a) - math.lgamma(z + b))


# ---------------------------------------------------------------------------
# Incomplete gamma functions
# ---------------------------------------------------------------------------


def _lower_series_log(a: float, z: float, tol: float = 1e-16, max_iter: int = 100_000) -> float:
    # gamma(a, z) = z^a e^{-z} sum_n z^n / (a (a+1) ... (a+n))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(max_iter):
        ap += 1.0
        term *= z / ap
        total += term
        if term < total * tol:
            break
    else:  # pragma: no cover - a > 0 and z < a+1 converge quickly
        raise DomainError(f"incomplete gamma series did not converge (a={a}, z={z})")
    return a * math.log(z) - z + math.log(total)


def _upper_cf_log(a: float, z: float, tol: float = 1e-16, max_iter: int = 100_000) -> float:
    # Modified Lentz evaluation of Gamma(a, z) = e^{-z} z^a / (z+1-a- 1(1-a)/(z+3-a- ...)).
    tiny = 1e-300
    b = z + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, max_iter + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            break
    else:  # pragma: no cover
        raise DomainError(f"incomplete gamma continued fraction did not converge (a={a}, z={z})")
    return a * math.log(z) - z + math.log(h)


def _log_complement(log_total: float, log_part: float) -> float:
    # log(exp(log_total) - exp(log_part)) for log_part <= log_total
    ratio = math.exp(log_part - log_total)
    if ratio >= 1.0:
        return -math.inf
    return log_total + math.log1p(-ratio)


def _incomplete_gamma(a: float, z: float) -> tuple[float, float, Regime]:
    if not a > 0:
        raise DomainError(f"incomplete gamma requires a > 0, got {a!r}")
    if not z >= 0:
        raise DomainError(f"incomplete gamma requires z >= 0, got {z!r}")
    lg = math.lgamma(a)
    if z == 0.0:
        return -math.inf, lg, "series"
    if z < a + 1.0:
        log_lower = _lower_series_log(a, z)
        return log_lower, _log_complement(lg, log_lower), "series"
    log_upper = _upper_cf_log(a, z)
    return _log_complement(lg, log_upper), log_upper, "continued-fraction"


def _as_special(log_value: float, regime: Regime) -> SpecialValue:
    if log_value == -math.inf:
        return SpecialValue(0.0, 0.0, regime)
    return SpecialValue(1.0, log_value, regime)


def incomplete_gamma_lower(a: float, z: float) -> SpecialValue:
    r"""Lower incomplete gamma :math:`\gamma(a,z)=\int_0^z x^{a-1}e^{-x}\,dx`.

    Series for ``z < a + 1`` and a continued fraction for the complement
    otherwise.
    """
    log_lower, _, regime = _incomplete_gamma(float(a), float(z))
    return _as_special(log_lower, regime)


def incomplete_gamma_upper(a: float, z: float) -> SpecialValue:
    r"""Upper incomplete gamma :math:`\Gamma(a,z)=\int_z^\infty x^{a-1}e^{-x}\,dx`."""
    _, log_upper, regime = _incomplete_gamma(float(a), float(z))
    return _as_special(log_upper, regime)


def incomplete_gamma_asymptotic(a: float, z: float) -> SpecialValue:
    r"""Leading large-``a`` behaviour :math:`z^a e^{-z}/|a-z|` at fixed ratio ``z/a != 1``.

    Approximates :math:`\gamma(a,z)` when ``z < a`` and :math:`\Gamma(a,z)` when ``z > a``.
    """
    if not (a > 0 and z > 0) or a == z:
        raise DomainError(f"asymptotic form needs a, z > 0 and z != a (a={a}, z={z})")
    return SpecialValue(1.0, a * math.log(z) - z - math.log(abs(a - z)), "asymptotic")


# ---------------------------------------------------------------------------
# Modified Bessel function of the first kind
# ---------------------------------------------------------------------------


def _debye_polynomials(k_max: int) -> list[Polynomial]:
    # u_{k+1}(p) = p^2 (1 - p^2) u_k'(p) / 2 + (1/8) int_0^p (1 - 5 t^2) u_k(t) dt
    polys = [Polynomial([1.0])]
    half_p2_1mp2 = Polynomial([0.0, 0.0, 0.5, 0.0, -0.5])
    one_m5t2 = Polynomial([1.0, 0.0, -5.0])
    for _ in range(k_max):
        uk = polys[-1]
        integrand = (one_m5t2 * uk).integ()
        nxt = half_p2_1mp2 * uk.deriv() + integrand / 8.0
        polys.append(nxt)
    return polys


_DEBYE_U = _debye_polynomials(_DEBYE_TERMS)


def _log_bessel_series(nu: float, z: np.ndarray) -> np.ndarray:
    # I_nu(z) = (z/2)^nu / Gamma(nu+1) * sum_k (z^2/4)^k / (k! (nu+1)_k)
    q = 0.25 * z * z
    term = np.ones_like(z)
    total = np.ones_like(z)
    k = 0
    active = np.ones(z.shape, dtype=bool)
    while np.any(active):
        k += 1
        term = term * q / (k * (k + nu))
        total = total + term
        active = term > total * 1e-17
        if k > 100_000:  # pragma: no cover
            raise DomainError("Bessel series failed to converge")
    return nu * (np.log(z) - math.log(2.0)) - special.gammaln(nu + 1.0) + np.log(total) - z


def _log_bessel_debye(nu: float, z: np.ndarray) -> np.ndarray:
    x = z / nu
    root = np.sqrt(1.0 + x * x)
    p = 1.0 / root
    eta = root + np.log(x / (1.0 + root))
    total = np.zeros_like(z)
    inv_nu = 1.0
    for uk in _DEBYE_U:
        total = total + uk(p) * inv_nu
        inv_nu /= nu
    # nu * eta - z with root - x = 1 / (root + x) to avoid cancellation
    scaled_eta = 1.0 / (root + x) + np.log(x / (1.0 + root))
    return nu * scaled_eta - 0.5 * np.log(2.0 * np.pi * nu) - 0.5 * np.log(root) + np.log(total)


def _log_bessel_hankel(nu: float, z: np.ndarray) -> np.ndarray:
    # I_nu(z) ~ e^z / sqrt(2 pi z) * sum_k (-1)^k a_k(nu) / z^k
    mu = 4.0 * nu * nu
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(1, _HANKEL_TERMS + 1):
        nxt = -term * (mu - (2 * k - 1) ** 2) / (8.0 * k * z)
        if np.all(np.abs(nxt) >= np.abs(term)):
            break
        term = np.where(np.abs(nxt) < np.abs(term), nxt, 0.0)
        total = total + term
    return -0.5 * np.log(2.0 * np.pi * z) + np.log(total)


def bessel_i_regime(nu: float, z):
    """Regime labels chosen by :func:`log_bessel_i` for order ``nu`` at ``z``."""
    z = np.asarray(z, dtype=float)
    series = z < max(_SERIES_Z_MIN, 0.5 * nu)
    if nu >= _DEBYE_NU_MIN:
        return np.where(series, "series", "asymptotic")
    series = series | (z <= max(_SERIES_Z_MAX, nu * nu))
    return np.where(series, "series", "asymptotic")


def log_bessel_i_scaled(nu: float, z):
    r"""Natural log of :math:`e^{-z} I_\nu(z)` for ``nu > -1/2`` and ``z >= 0``.

    Vectorised over ``z``. The series is used below ``max(10, nu/2)``;
    above it the Debye expansion for ``nu >= 25`` and, for small orders,
    the series up to ``max(500, nu^2)`` followed by Hankel's expansion.
    """
    nu = float(nu)
    if not nu > -0.5:
        raise DomainError(f"bessel order must exceed -1/2, got {nu!r}")
    zarr = np.asarray(z, dtype=float)
    if np.any(~(zarr >= 0)):
        raise DomainError("bessel argument must be non-negative")
    flat = np.atleast_1d(zarr).astype(float).ravel()
    out = np.empty_like(flat)
    zero = flat == 0.0
    out[zero] = 0.0 if nu == 0.0 else -np.inf
    regime = bessel_i_regime(nu, flat)
    ser = (regime == "series") & ~zero
    asy = (regime == "asymptotic") & ~zero
    if np.any(ser):
        out[ser] = _log_bessel_series(nu, flat[ser])
    if np.any(asy):
        if nu >= _DEBYE_NU_MIN:
            out[asy] = _log_bessel_debye(nu, flat[asy])
        else:
            out[asy] = _log_bessel_hankel(nu, flat[asy])
    out = out.reshape(np.shape(zarr))
    return float(out) if out.ndim == 0 else out


def log_bessel_i(nu: float, z):
    r"""Natural log of :math:`I_\nu(z)`; see :func:`log_bessel_i_scaled`."""
    zarr = np.asarray(z, dtype=float)
    out = log_bessel_i_scaled(nu, zarr) + zarr
    return float(out) if np.ndim(out) == 0 else out


def bessel_i_scaled(nu: float, z):
    r"""Exponentially scaled :math:`e^{-z} I_\nu(z)` (scalar or array)."""
    out = np.exp(log_bessel_i_scaled(nu, np.asarray(z, dtype=float)))
    return float(out) if np.ndim(out) == 0 else out


def bessel_i_value(nu: float, z: float) -> SpecialValue:
    """Scalar :math:`I_\\nu(z)` as a :class:`SpecialValue` with its regime."""
    log_i = log_bessel_i(nu, z)
    regime = str(bessel_i_regime(nu, z))
    if log_i == -math.inf:
        return SpecialValue(0.0, 0.0, regime)  # type: ignore[arg-type]
    return SpecialValue(1.0, log_i, regime)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


def log_sphere_area(n: int) -> float:
    r"""Log of the area of the unit sphere :math:`S^{n-1}\subset\mathbb{R}^n`."""
    if n < 1:
        raise DomainError(f"sphere_area requires N >= 1, got {n!r}")
    return math.log(2.0) + 0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n)


def sphere_area(n: int) -> float:
    r""":math:`|S^{n-1}| = 2\pi^{n/2}/\Gamma(n/2)`."""
    return math.exp(log_sphere_area(n))


def sphere_integral_of_exp(n: int, c, *, scaled: bool = False):
    r"""Log of :math:`\int_{S^{n-1}} e^{c\,\sigma_1}\,d\sigma = (2\pi)^{n/2} c^{1-n/2} I_{n/2-1}(c)`.

    Vectorised over ``c >= 0``. With ``scaled=True`` the log of
    :math:`e^{-c}` times the integral is returned, which stays bounded.
    """
    c = np.asarray(c, dtype=float)
    if np.any(c < 0):
        raise DomainError("sphere_integral_of_exp requires c >= 0")
    if n == 1:
        out = np.log1p(np.exp(-2.0 * c)) + (0.0 if scaled else c)
    else:
        safe = np.where(c > 0, c, 1.0)
        body = (
            0.5 * n * math.log(2.0 * math.pi)
            + (1.0 - 0.5 * n) * np.log(safe)
            + log_bessel_i_scaled(0.5 * n - 1.0, safe)
        )
        if not scaled:
            body = body + safe
        out = np.where(c > 0, body, log_sphere_area(n))
    return float(out) if out.ndim == 0 else out


def rotation_reduced_integral(n: int, g, *, exponent: float | None = None, order: int = 200) -> float:
    r""":math:`|S^{n-2}|\int_{-1}^{1} g(t)\,(1-t^2)^{\kappa}\,dt` for ``n >= 2``.

    With the default :math:`\kappa = (n-3)/2` this equals
    :math:`\int_{S^{n-1}} g(a\cdot\sigma)\,d\sigma` for any unit vector ``a``.
    Passing another ``exponent`` evaluates the same expression with that
    power, which is how the tests compare alternative forms.
    """
    if n < 2:
        raise DomainError(f"rotation_reduced_integral requires n >= 2, got {n!r}")
    kappa = 0.5 * (n - 3) if exponent is None else float(exponent)
    if kappa <= -1:
        raise DomainError("weight (1-t^2)^kappa is not integrable for kappa <= -1")
    # Gauss-Jacobi absorbs the endpoint behaviour of the weight exactly.
    t, w = special.roots_jacobi(order, kappa, kappa)
    return float(sphere_area(n - 1) * np.dot(w, g(t)))
