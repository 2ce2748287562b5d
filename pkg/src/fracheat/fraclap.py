r"""The fractional Laplacian :math:`(-\Delta)^s` by three independent routes, and its inverse.

* :func:`fraclap_fourier`: FFT multiplier :math:`|\xi|^{2s}` on a periodic box.
* :func:`fraclap_subordination`: the heat-semigroup integral
  :math:`\frac{1}{\Gamma(-s)}\int_0^\infty (e^{\tau\Delta}f - f)\,\tau^{-1-s}d\tau`.
* :func:`fraclap_pv`: the hypersingular integral
  :math:`c_{n,s}\,\mathrm{P.V.}\!\int (f(x)-f(y))|x-y|^{-n-2s}dy`.

All three are normalised so that :math:`\cos(kx)\mapsto |k|^{2s}\cos(kx)`.
:func:`riesz_potential` evaluates :math:`(-\Delta)^{-s}` by the same semigroup.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np
from scipy import special
from scipy.stats import special_ortho_group

from .errors import AliasingError, DomainError
from .quadrature import _leggauss
from .semigroup import (
    balakrishnan,
    heat_apply_many,
    log_window_integral,
    space_far_tail,
)
from .specfun import sphere_area
from .testfn import (
    PeriodicGrid,
    SampledField,
    SpaceFunction,
    SpaceTimeFunction,
    _fd_laplacian,
    as_points,
    sample_space,
)

FracLapMethod = Literal["fourier", "subordination", "pv_integral"]

#: Largest boundary value or spectral tail (relative to the peak) accepted by the FFT path.
TRUNCATION_TOL = 1e-10
#: Default periodic box for the spectral path in 1-D: half-width 16, 2^12 points.
DEFAULT_HALF_WIDTH = 16.0
DEFAULT_POINTS = 4096


@dataclass(frozen=True)
class FracLapResult:
    """Value(s) of a fractional Laplacian with the method used and an error estimate."""

    value: np.ndarray | float
    method: FracLapMethod
    error_estimate: np.ndarray | float

    def __post_init__(self) -> None:
        if np.any(np.asarray(self.error_estimate) < 0):
            raise ValueError("error estimates are non-negative")
        if not np.all(np.isfinite(self.value)):
            raise DomainError("fractional Laplacian value is not finite")


def _squeeze(a):
    a = np.asarray(a, dtype=float)
    return float(a) if a.ndim == 0 else a


def pv_constant(n: int, s: float) -> float:
    r""":math:`c_{n,s} = 4^s\Gamma(n/2+s)/(\pi^{n/2}|\Gamma(-s)|)`."""
    return 4.0**s * special.gamma(0.5 * n + s) / (math.pi ** (0.5 * n) * abs(special.gamma(-s)))


def _laplacian_at(f: SpaceFunction, x: np.ndarray) -> np.ndarray:
    if f.laplacian is not None:
        return f.laplacian(x)
    return _fd_laplacian(f.fn, x, 1e-3 * f.length_scale)


def _check_order(s: float, upper: float = 1.0, closed: bool = False) -> None:
    ok = 0.0 < s <= upper if closed else 0.0 < s < upper
    if not ok:
        raise DomainError(f"order s={s!r} outside {'(0, %g]' % upper if closed else '(0, %g)' % upper}")


# ---------------------------------------------------------------------------
# Spectral path
# ---------------------------------------------------------------------------


def _check_decay(values: np.ndarray, tol: float) -> None:
    peak = float(np.max(np.abs(values)))
    if peak == 0.0:
        return
    for axis in range(values.ndim):
        edge = np.take(values, [0, -1], axis=axis)
        if float(np.max(np.abs(edge))) > tol * peak:
            raise AliasingError(f"field does not decay at the boundary of axis {axis}")
    spec = np.abs(np.fft.fftn(values))
    freqs = np.meshgrid(*[np.abs(np.fft.fftfreq(m)) for m in values.shape], indexing="ij")
    high = np.zeros(values.shape, dtype=bool)
    for fr in freqs:
        high |= fr > 0.4
    if float(spec[high].sum()) > tol * float(spec.sum()):
        raise AliasingError("spectral tail mass exceeds the truncation tolerance")


def _moments_1d(field: SampledField) -> tuple[float, float, float]:
    x = field.axes[0]
    h = field.grid.spacing[0]
    v = field.values
    return float(v.sum() * h), float((x * v).sum() * h), float((x * x * v).sum() * h)


def image_correction(x, grid: PeriodicGrid, moments, s: float) -> np.ndarray:
    r"""Far-field contribution of the periodic images to the FFT result at ``x``.

    A localised datum with moments :math:`M_j` produces
    :math:`(-\Delta)^s f(y) \approx -c_{n,s}\int f(z)|y-z|^{-n-2s}dz` far away.
    In 1-D the image sum keeps three moments and is summed with Hurwitz zeta
    functions; in higher dimension only the mass term is kept and summed
    over a cube of images.
    """
    n = grid.dim
    x = as_points(x, n)
    c = pv_constant(n, s)
    if n == 1:
        m0, m1, m2 = moments
        period = 2.0 * grid.half_widths[0]
        a = 1.0 + 2.0 * s
        q = x[..., 0] / period
        out = np.zeros(q.shape)
        for b, coef, odd in ((a, m0, False), (a + 1, a * m1, True), (a + 2, 0.5 * a * (a + 1) * m2, False)):
            right = special.zeta(b, 1.0 + q)
            left = special.zeta(b, 1.0 - q)
            out += coef * period ** (-b) * ((right - left) if odd else (right + left))
        return -c * out
    m0 = moments[0]
    K = 4
    rng = np.arange(-K, K + 1)
    lattice = np.stack(np.meshgrid(*([rng] * n), indexing="ij"), axis=-1).reshape(-1, n)
    lattice = lattice[np.any(lattice != 0, axis=1)] * (2.0 * np.asarray(grid.half_widths))
    dist = np.sqrt(np.sum((x[..., None, :] + lattice) ** 2, axis=-1))
    return -c * m0 * np.sum(dist ** (-n - 2.0 * s), axis=-1)


def fraclap_fourier(
    field: SampledField,
    s: float,
    *,
    require_decay: bool = True,
    correct_images: bool | None = None,
    truncation_tol: float = TRUNCATION_TOL,
) -> SampledField:
    r"""Apply the multiplier :math:`|\xi|^{2s}` to a periodic sampled field.

    Localised data (``require_decay=True``) must be below ``truncation_tol``
    at the box boundary; the slowly decaying far field of the result is then
    corrected for the periodic images (``correct_images`` defaults to on
    for localised data). Periodic data such as commensurate cosines are
    transformed as is.
    """
    _check_order(s, 1.0, closed=True)
    grid = field.grid
    if not isinstance(grid, PeriodicGrid):
        raise DomainError("fraclap_fourier needs a field on a PeriodicGrid")
    if require_decay:
        _check_decay(field.values, truncation_tol)
    mult = np.sqrt(sum(np.meshgrid(*[k * k for k in grid.frequencies()], indexing="ij"))) ** (2.0 * s)
    out = np.fft.ifftn(np.fft.fftn(field.values) * mult)
    scale = max(float(np.max(np.abs(out))), 1e-300)
    if float(np.max(np.abs(out.imag))) > 1e-10 * max(scale, 1.0):
        raise AliasingError("spectral result has a non-negligible imaginary part")
    values = out.real
    if correct_images is None:
        correct_images = require_decay and s < 1.0
    if correct_images:
        moments = _moments_1d(field) if grid.dim == 1 else (float(field.values.sum() * np.prod(grid.spacing)),)
        values = values - image_correction(grid.mesh(), grid, moments, s)
    return replace(field, values=values)


def default_grid(f: SpaceFunction, points: int | None = None) -> PeriodicGrid:
    """Box wide enough for the effective support of ``f`` with resolution tied to its scale."""
    L = max(DEFAULT_HALF_WIDTH, 1.25 * f.support_radius)
    m = points or max(DEFAULT_POINTS, int(2 ** math.ceil(math.log2(2 * L * 16 / f.length_scale))))
    return PeriodicGrid.cube(f.n, L, m)


def _trig_interpolate(coef: np.ndarray, grid: PeriodicGrid, x: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant with FFT coefficients ``coef`` at ``x`` (1-D)."""
    k = grid.frequencies()[0]
    x0 = grid.axes()[0][0]
    m = grid.points[0]
    ph = np.exp(1j * (x[..., 0, None] - x0) * k)
    return (ph @ coef).real / m


def fraclap_fourier_at(f: SpaceFunction, s: float, x, *, grid: PeriodicGrid | None = None) -> FracLapResult:
    """Spectral fractional Laplacian of a 1-D function evaluated at arbitrary points.

    The error estimate compares against the same box at half resolution.
    """
    if f.n != 1:
        raise DomainError("fraclap_fourier_at is one-dimensional; use fraclap_fourier on a grid")
    _check_order(s, 1.0, closed=True)
    x = as_points(x, 1)
    grid = grid or default_grid(f)
    vals = []
    decays = f.decays
    for m in (grid.points[0], grid.points[0] // 2):
        g = PeriodicGrid(grid.half_widths, (m,))
        field = sample_space(f, g)
        if decays and not vals:
            _check_decay(field.values, TRUNCATION_TOL)
        k = g.frequencies()[0]
        coef = np.fft.fft(field.values) * np.abs(k) ** (2.0 * s)
        v = _trig_interpolate(coef, g, x)
        if decays and s < 1.0:
            v = v - image_correction(x, g, _moments_1d(field), s)
        vals.append(v)
    return FracLapResult(_squeeze(vals[0]), "fourier", _squeeze(np.abs(vals[0] - vals[1])))


# ---------------------------------------------------------------------------
# Subordination path
# ---------------------------------------------------------------------------


def fraclap_subordination(f: SpaceFunction, s: float, x, **kw) -> FracLapResult:
    r""":math:`\frac{1}{\Gamma(-s)}\int_0^\infty (e^{\tau\Delta}f(x) - f(x))\,\tau^{-1-s}\,d\tau`.

    Since :math:`\Gamma(-s)<0` and :math:`e^{\tau\Delta}f - f` is negative at
    maxima, the result is positive there, matching :math:`|\xi|^{2s}`.
    """
    _check_order(s)
    x = as_points(x, f.n)
    fx = f.fn(x)

    def diff(taus):
        return heat_apply_many(f, taus, x) - fx

    res = balakrishnan(
        diff,
        s,
        generator=_laplacian_at(f, x),
        scale=f.length_scale,
        far_tail=space_far_tail(f, s),
        current=fx,
        **kw,
    )
    return FracLapResult(_squeeze(res.value), "subordination", _squeeze(res.error_estimate))


# ---------------------------------------------------------------------------
# Principal-value path
# ---------------------------------------------------------------------------


def _sphere_rule(n: int, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Directions and weights integrating exactly over the whole unit sphere."""
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if n == 2:
        m = 2 * resolution
        th = 2.0 * np.pi * np.arange(m) / m
        return np.stack([np.cos(th), np.sin(th)], axis=-1), np.full(m, 2.0 * np.pi / m)
    if n == 3:
        c, wc = _leggauss(resolution)
        m = 2 * resolution
        ph = 2.0 * np.pi * np.arange(m) / m
        C, P = np.meshgrid(c, ph, indexing="ij")
        S = np.sqrt(1.0 - C * C)
        dirs = np.stack([C.ravel(), (S * np.cos(P)).ravel(), (S * np.sin(P)).ravel()], axis=-1)
        return dirs, np.repeat(wc, m) * (2.0 * np.pi / m)
    raise DomainError("direct singular-integral quadrature is limited to n <= 3")


def fraclap_pv(f: SpaceFunction, s: float, x, *, angular_resolution: int | None = None, order: int = 24) -> FracLapResult:
    r""":math:`c_{n,s}\int_0^\infty \rho^{-1-2s}\,\tfrac12\int_{S^{n-1}}(2f(x)-f(x+\rho\omega)-f(x-\rho\omega))\,d\omega\,d\rho`.

    The symmetric second difference removes the principal value. Below
    :math:`\rho_0 = 10^{-3}\ell` (``ell`` the length scale) a two-term
    Taylor model is integrated exactly; past the support the analytic tail
    :math:`f(x)|S^{n-1}|Z^{-2s}/(2s)` closes the integral. Data that do not
    decay are integrated out to :math:`10^4\ell` and closed with their mean
    value, which is exact for constants and only approximate for
    oscillating data.
    """
    _check_order(s)
    n = f.n
    x = as_points(x, n)
    ell = f.length_scale
    fx = f.fn(x)
    if f.decays:
        Z = np.max(np.sqrt(np.sum(x * x, axis=-1)), initial=0.0) + f.support_radius
        far_value = 0.0
    else:
        Z = 1e4 * ell
        far_value = f.mean_value if f.mean_value is not None else 0.0
    res = angular_resolution or int(min(256, max(32, 8 * Z / ell)))
    dirs, wdir = _sphere_rule(n, res)
    area = sphere_area(n)

    def inner(rhos):
        # Shape (len(rhos),) + batch.
        out = []
        for r in np.atleast_1d(rhos):
            plus = f.fn(x[..., None, :] + r * dirs)
            minus = f.fn(x[..., None, :] - r * dirs)
            out.append(area * fx - 0.5 * ((plus + minus) @ wdir))
        return np.stack(out)

    rho0 = 1e-3 * ell
    body = log_window_integral(inner, -1.0 - 2.0 * s, rho0, Z, order=order, panels_per_decade=3.0)
    lap = _laplacian_at(f, x)
    lead = -area * lap / (2.0 * n)
    i0 = inner(np.array([rho0]))[0]
    near = lead * rho0 ** (2 - 2 * s) / (2 - 2 * s) + (i0 - lead * rho0**2) * rho0 ** (-2 * s) / (4 - 2 * s)
    tail = area * (fx - far_value) * Z ** (-2.0 * s) / (2.0 * s)
    c = pv_constant(n, s)
    value = c * (body.value + near + tail)
    err = c * (body.error + np.abs(i0 - lead * rho0**2) * rho0 ** (-2 * s) * 1e-3)
    return FracLapResult(_squeeze(value), "pv_integral", _squeeze(err))


def fraclap(f: SpaceFunction, s: float, x, method: FracLapMethod = "subordination") -> FracLapResult:
    """Dispatch to one of the three definitions."""
    if method == "fourier":
        return fraclap_fourier_at(f, s, x)
    if method == "subordination":
        return fraclap_subordination(f, s, x)
    if method == "pv_integral":
        return fraclap_pv(f, s, x)
    raise DomainError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Riesz potential
# ---------------------------------------------------------------------------


class DivergenceWarning(RuntimeWarning):
    """The semigroup integral of a Riesz potential does not converge."""


def riesz_potential(f: SpaceFunction, s: float, x, *, moment_tol: float = 1e-10) -> FracLapResult:
    r""":math:`(-\Delta)^{-s}f(x) = \frac{1}{\Gamma(s)}\int_0^\infty e^{\tau\Delta}f(x)\,\tau^{s-1}d\tau`, ``0 < s < n/2``.

    Needs :math:`\hat f(0) = 0` in general; a non-vanishing mass (or mean) is
    reported with a :class:`DivergenceWarning`. When the mass is known its
    leading tail is still integrated exactly, which converges for
    :math:`s < n/2`.
    """
    n = f.n
    if not 0.0 < s < 0.5 * n:
        raise DomainError(f"Riesz order s={s!r} outside (0, {0.5 * n:g})")
    x = as_points(x, n)
    ell = f.length_scale
    if f.mass is not None and abs(f.mass) > moment_tol * max(f.sup_bound, 1.0) * ell**n:
        warnings.warn(f"{f.name}: non-zero mass {f.mass:.3g}; the Riesz integral converges only for s < n/2", DivergenceWarning, stacklevel=2)
    if f.mean_value:
        warnings.warn(f"{f.name}: non-zero mean; the Riesz integral diverges", DivergenceWarning, stacklevel=2)
    fx = f.fn(x)
    tau_min, tau_max = 1e-8 * ell**2, 1e8 * ell**2
    body = log_window_integral(lambda taus: heat_apply_many(f, taus, x), s - 1.0, tau_min, tau_max)
    near = fx * tau_min**s / s + _laplacian_at(f, x) * tau_min ** (1.0 + s) / (1.0 + s)
    tail = 0.0
    if f.mass:
        tail = f.mass * (4.0 * math.pi) ** (-0.5 * n) * tau_max ** (s - 0.5 * n) / (0.5 * n - s)
    last = heat_apply_many(f, np.array([tau_max]), x)[0]
    err = body.error + np.abs(last) * tau_max**s
    g = special.gamma(s)
    return FracLapResult(_squeeze((body.value + near + tail) / g), "subordination", _squeeze(err / g))


# ---------------------------------------------------------------------------
# Radial symmetry of the lifted data
# ---------------------------------------------------------------------------


def lifted_space_function(u: SpaceTimeFunction, N: int) -> SpaceFunction:
    r""":math:`f(x, y) = u(x, |y|^2/2N)` on :math:`\mathbb{R}^{d+N}`."""
    d = u.d

    def fn(z):
        y2 = np.sum(z[..., d:] ** 2, axis=-1)
        return u.eval(z[..., :d], y2 / (2.0 * N))

    if u.separable:
        ell = u.space.length_scale
        t_hi = u.time.support[1]
        rx = u.space.support_radius
    else:
        ell, t_hi, rx = 1.0, 50.0, 10.0
    ry = math.sqrt(2.0 * N * t_hi) if math.isfinite(t_hi) else math.inf
    radius = math.hypot(rx, ry)
    if u.separable and u.time.constant:
        radius = math.inf
    mean = None
    if u.separable and u.time.constant and u.space.mean_value is not None:
        mean = u.space.mean_value * u.time.fn(0.0)
    return SpaceFunction(
        fn=fn,
        n=d + N,
        sup_bound=u.sup_bound,
        length_scale=ell,
        support_radius=radius,
        decay_class="schwartz" if math.isfinite(radius) else "bounded",
        name=f"lift{N}({u.name})",
        mean_value=mean if not math.isfinite(radius) else None,
    )


@dataclass(frozen=True)
class RadialityReport:
    max_deviation: float
    max_norm_defect: float
    values: np.ndarray


def random_rotations(N: int, count: int, seed: int = 0) -> np.ndarray:
    """``count`` Haar-random rotations of :math:`\\mathbb{R}^N`."""
    return np.asarray(special_ortho_group.rvs(N, size=count, random_state=seed)).reshape(count, N, N)


def radiality_check(
    u: SpaceTimeFunction,
    s: float,
    N: int,
    *,
    rotations: int = 10,
    probes=((0.0, 1.0), (0.5, 4.0)),
    seed: int = 0,
    angular_resolution: int | None = None,
) -> RadialityReport:
    """Compare the singular-integral fractional Laplacian of the lifted data at ``y`` and rotated ``y``."""
    if N < 2:
        raise DomainError("radiality check needs N >= 2")
    if N + u.d > 3:
        raise DomainError("direct singular-integral quadrature is limited to N + d <= 3")
    f = lifted_space_function(u, N)
    if not f.decays:
        f = replace(f, support_radius=math.inf, mean_value=f.mean_value if f.mean_value is not None else 0.0)
    rots = random_rotations(N, rotations, seed)
    pts = []
    defects = []
    for xv, tv in probes:
        y = np.zeros(N)
        y[0] = math.sqrt(2.0 * N * tv)
        base = np.concatenate([np.full(u.d, xv), y])
        pts.append(base)
        for R in rots:
            ry = R @ y
            defects.append(abs(np.linalg.norm(ry) - np.linalg.norm(y)))
            pts.append(np.concatenate([np.full(u.d, xv), ry]))
    pts = np.array(pts)
    vals = np.asarray(fraclap_pv(f, s, pts, angular_resolution=angular_resolution).value)
    vals = vals.reshape(len(probes), rotations + 1)
    dev = float(np.max(np.abs(vals - vals[:, :1])))
    return RadialityReport(dev, float(max(defects, default=0.0)), vals)
