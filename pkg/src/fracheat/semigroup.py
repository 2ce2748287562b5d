r"""Heat and backward-heat semigroups, and the subordination integrals built on them.

The heat flow :math:`e^{\tau\Delta}f(x) = (4\pi\tau)^{-n/2}\int e^{-|x-\bar x|^2/4\tau} f(\bar x)\,d\bar x`
is computed

* in closed form when the function provides one,
* by Gauss--Hermite quadrature in the rescaled variable
  :math:`\bar x = x + 2\sqrt{\tau}z` when the kernel is narrower than ``f``,
* otherwise by Gauss--Legendre panels on the intersection of the kernel
  window with the support of ``f`` (through the radial formula for radial
  ``f``, which reduces any dimension to one integral).

The backward semigroup advances time and smooths in space:
:math:`V(x,t,\tau) = e^{\tau\Delta_x}[u(\cdot,t+\tau)](x)`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Literal

import numpy as np
from scipy import special

from .errors import DomainError, QuadratureBudgetError
from .quadrature import _hermgauss, _leggauss, gauss_legendre
from .specfun import sphere_integral_of_exp
from .testfn import PeriodicGrid, SampledField, SpaceFunction, SpaceTimeFunction, as_points

Method = Literal["closed_form", "gauss_hermite_convolution", "spectral", "windowed"]

#: Absolute tolerance for convolutions without a closed form.
QUADRATURE_TOL = 1e-9
# exp(-_WINDOW^2) is below double precision: kernel window half-width in units of 2*sqrt(tau).
_WINDOW = 6.5
_MAX_REFINE = 5


# ---------------------------------------------------------------------------
# Heat flow of a space function
# ---------------------------------------------------------------------------


def _heat_hermite(f: SpaceFunction, tau: float, x: np.ndarray, order: int) -> np.ndarray:
    z, w = _hermgauss(order)
    n = f.n
    shift = 2.0 * math.sqrt(tau) * z
    if n == 1:
        vals = f.fn(x[..., None, :] + shift[:, None])
        return vals @ w / math.sqrt(math.pi)
    grids = np.meshgrid(*([shift] * n), indexing="ij")
    offs = np.stack([g.ravel() for g in grids], axis=-1)
    ww = np.prod(np.stack(np.meshgrid(*([w] * n), indexing="ij"), axis=-1).reshape(-1, n), axis=-1)
    vals = f.fn(x[..., None, :] + offs)
    return vals @ ww / math.pi ** (0.5 * n)


def _window_panels(width: float, tau: float, scale: float) -> int:
    step = 0.5 * min(2.0 * math.sqrt(tau), scale)
    return int(min(256, max(2, math.ceil(width / step))))


def _heat_radial(f: SpaceFunction, tau: float, x: np.ndarray, order: int, panels_scale: float) -> np.ndarray:
    n = f.n
    rho = np.sqrt(np.sum(x * x, axis=-1))
    R = f.support_radius
    W = _WINDOW * 2.0 * math.sqrt(tau)
    lo = np.clip(rho - W, 0.0, R)
    hi = np.clip(rho + W, 0.0, R)
    width = float(np.max(hi - lo)) if hi.size else 0.0
    panels = max(1, int(panels_scale * _window_panels(width, tau, f.length_scale)))
    ref = gauss_legendre(0.0, 1.0, order, panels)
    r = lo[..., None] + (hi - lo)[..., None] * ref.nodes
    wts = (hi - lo)[..., None] * ref.weights
    c = rho[..., None] * r / (2.0 * tau)
    log_k = -((rho[..., None] - r) ** 2) / (4.0 * tau) + sphere_integral_of_exp(n, c, scaled=True)
    log_k = log_k - 0.5 * n * math.log(4.0 * math.pi * tau)
    with np.errstate(divide="ignore"):
        radial_w = r ** (n - 1) if n > 1 else np.ones_like(r)
    vals = f.profile(r) * radial_w * np.exp(log_k)
    return np.sum(vals * wts, axis=-1)


def _heat_window_1d(f: SpaceFunction, tau: float, x: np.ndarray, order: int, panels_scale: float) -> np.ndarray:
    x1 = x[..., 0]
    R = f.support_radius
    W = _WINDOW * 2.0 * math.sqrt(tau)
    lo = np.clip(x1 - W, -R, R)
    hi = np.clip(x1 + W, -R, R)
    width = float(np.max(hi - lo)) if hi.size else 0.0
    panels = max(1, int(panels_scale * _window_panels(width, tau, f.length_scale)))
    ref = gauss_legendre(0.0, 1.0, order, panels)
    xb = lo[..., None] + (hi - lo)[..., None] * ref.nodes
    wts = (hi - lo)[..., None] * ref.weights
    kern = np.exp(-((x1[..., None] - xb) ** 2) / (4.0 * tau)) / math.sqrt(4.0 * math.pi * tau)
    return np.sum(f.fn(xb[..., None]) * kern * wts, axis=-1)


def heat_apply(
    f: SpaceFunction,
    tau: float,
    x,
    *,
    method: Method | None = None,
    tol: float = QUADRATURE_TOL,
    order: int = 64,
    return_error: bool = False,
):
    r""":math:`e^{\tau\Delta}f(x)` at the points ``x`` (trailing axis ``f.n``).

    ``method=None`` picks the closed form when available, Gauss--Hermite
    when the kernel is narrower than ``f`` and windowed Legendre panels
    otherwise. Quadratures are refined until two successive estimates agree
    to ``tol``; :class:`QuadratureBudgetError` is raised if they never do.
    """
    tau = float(tau)
    if not tau > 0:
        raise DomainError(f"heat_apply requires tau > 0, got {tau!r}")
    x = as_points(x, f.n)
    if method is None:
        if f.heat is not None:
            method = "closed_form"
        elif f.decays and 2.0 * math.sqrt(tau) > 0.25 * f.length_scale:
            method = "windowed"
        elif f.decay_class == "schwartz":
            method = "gauss_hermite_convolution"
        else:
            method = "windowed"
    if method == "closed_form":
        if f.heat is None:
            raise DomainError(f"{f.name} has no closed-form heat flow")
        out = np.asarray(f.heat(x, tau), dtype=float)
        return (out, np.zeros_like(out)) if return_error else out
    if method == "gauss_hermite_convolution":
        if f.n > 2:
            raise DomainError("tensor Gauss-Hermite is limited to n <= 2")
        prev = _heat_hermite(f, tau, x, order)
        for _ in range(_MAX_REFINE):
            order *= 2
            cur = _heat_hermite(f, tau, x, order)
            err = float(np.max(np.abs(cur - prev), initial=0.0))
            if err <= tol:
                return (cur, np.full(cur.shape, err)) if return_error else cur
            prev = cur
        raise QuadratureBudgetError(f"Gauss-Hermite heat flow did not reach {tol:g} (last change {err:.3g})")
    if method == "windowed":
        if not f.decays:
            raise DomainError("windowed heat quadrature needs a decaying function")
        if f.profile is not None:
            rule = _heat_radial
        elif f.n == 1:
            rule = _heat_window_1d
        else:
            raise DomainError("windowed heat quadrature needs a radial profile when n > 1")
        scale = 1.0
        prev = rule(f, tau, x, 20, scale)
        for _ in range(_MAX_REFINE):
            cur = rule(f, tau, x, 32, scale)
            err = float(np.max(np.abs(cur - prev), initial=0.0))
            if err <= tol:
                return (cur, np.full(cur.shape, err)) if return_error else cur
            scale *= 2.0
            prev = rule(f, tau, x, 20, scale)
        raise QuadratureBudgetError(f"windowed heat flow did not reach {tol:g} (last change {err:.3g})")
    raise DomainError(f"unknown heat method {method!r}")


def heat_apply_many(f: SpaceFunction, taus, x, **kw) -> np.ndarray:
    """Heat flow for each ``tau`` in ``taus``; result has shape ``taus.shape + batch``."""
    taus = np.asarray(taus, dtype=float)
    x = as_points(x, f.n)
    if f.heat is not None and kw.get("method") in (None, "closed_form"):
        t = taus.reshape(taus.shape + (1,) * (x.ndim - 1))
        return np.broadcast_to(f.heat(x, t), taus.shape + x.shape[:-1]).astype(float)
    return np.stack([heat_apply(f, tau, x, **kw) for tau in taus.ravel()]).reshape(taus.shape + x.shape[:-1])


def heat_flowed(f: SpaceFunction, tau: float) -> SpaceFunction:
    r"""The function :math:`e^{\tau\Delta}f` as a :class:`SpaceFunction` (for composing flows)."""
    tau = float(tau)
    heat = None
    if f.heat is not None:
        def heat(x, s):
            return f.heat(x, tau + np.asarray(s))
    profile = None
    if f.profile is not None:
        def profile(r):
            r = np.asarray(r, dtype=float)
            pts = np.zeros(r.shape + (f.n,))
            pts[..., 0] = r
            return heat_apply(f, tau, pts)
    spread = _WINDOW * 2.0 * math.sqrt(tau)
    return replace(
        f,
        fn=lambda x: heat_apply(f, tau, x),
        name=f"heat({f.name},{tau:g})",
        length_scale=math.sqrt(f.length_scale**2 + 2.0 * tau),
        support_radius=f.support_radius + spread,
        decay_class="schwartz" if f.decays else f.decay_class,
        profile=profile,
        heat=heat,
        laplacian=None,
    )


@dataclass(frozen=True)
class SemigroupEvaluator:
    """Applies the heat semigroup to space functions or to periodic sampled fields."""

    dim: int
    method: Method | None = None

    def apply(self, f, tau: float):
        if isinstance(f, SampledField):
            return heat_spectral(f, tau)
        if f.n != self.dim:
            raise DomainError(f"function dimension {f.n} does not match evaluator dimension {self.dim}")
        if self.method in (None, "closed_form") or f.heat is not None:
            return heat_flowed(f, tau)
        g = heat_flowed(f, tau)
        return replace(g, fn=lambda x: heat_apply(f, tau, x, method=self.method))


def heat_spectral(field: SampledField, tau: float) -> SampledField:
    """Heat flow of a periodic sampled field through the FFT multiplier ``exp(-tau |xi|^2)``."""
    if not isinstance(field.grid, PeriodicGrid):
        raise DomainError("spectral heat flow needs a periodic grid")
    xi2 = sum(np.meshgrid(*[k * k for k in field.grid.frequencies()], indexing="ij"))
    out = np.fft.ifftn(np.fft.fftn(field.values) * np.exp(-tau * xi2)).real
    return replace(field, values=out)


# ---------------------------------------------------------------------------
# Backward heat semigroup
# ---------------------------------------------------------------------------


def backward_heat_apply(u: SpaceTimeFunction, tau, x, t, **kw) -> np.ndarray:
    r""":math:`V(x,t,\tau) = e^{\tau\Delta_x}[u(\cdot, t+\tau)](x)`.

    ``tau`` and ``t`` broadcast against the batch shape of ``x``.
    """
    x = as_points(x, u.d)
    tau = np.asarray(tau, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(tau <= 0):
        raise DomainError("backward_heat_apply requires tau > 0")
    shape = np.broadcast_shapes(x.shape[:-1], tau.shape, t.shape)
    if u.closed_form_heat is not None and kw.get("method") in (None, "closed_form"):
        return np.broadcast_to(u.closed_form_heat(x, t, tau), shape).astype(float)
    xb = np.broadcast_to(x, shape + (u.d,))
    tb = np.broadcast_to(t, shape)
    taub = np.broadcast_to(tau, shape)
    out = np.empty(shape)
    if u.separable:
        for tv in np.unique(taub):
            sel = taub == tv
            out[sel] = heat_apply(u.space, tv, xb[sel], **kw) * u.time.fn(tb[sel] + tv)
        return out
    for idx in np.ndindex(shape):
        tv, sv = float(taub[idx]), float(tb[idx])
        slice_fn = _slice_as_space_function(u, sv + tv)
        out[idx] = heat_apply(slice_fn, tv, xb[idx], **kw)
    return out


def _slice_as_space_function(u: SpaceTimeFunction, t: float) -> SpaceFunction:
    radius = u.support_radius if u.support_radius is not None else math.inf
    return SpaceFunction(
        fn=lambda x: u.eval(x, np.full(x.shape[:-1], t)),
        n=u.d,
        sup_bound=u.sup_bound,
        length_scale=1.0,
        support_radius=radius,
        decay_class="compact_support" if u.decay_class == "compact_support" else "schwartz",
        name=f"{u.name}(.,{t:g})",
    )


# ---------------------------------------------------------------------------
# Integrals against powers of tau
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerIntegral:
    """Value and error estimate of an integral over the log-spaced tau window."""

    value: np.ndarray
    error: np.ndarray


def log_window_integral(
    fn: Callable[[np.ndarray], np.ndarray],
    power: float,
    lower: float,
    upper: float,
    *,
    order: int = 24,
    panels_per_decade: float = 2.0,
) -> PowerIntegral:
    r""":math:`\int_{lower}^{upper} F(\tau)\,\tau^{power}\,d\tau` with ``F`` vectorised over tau.

    ``fn`` receives a 1-D array of tau values and returns an array whose
    leading axis runs over them. The error estimate is the difference to a
    rule of half the order on the same panels.
    """
    s0, s1 = math.log(lower), math.log(upper)
    panels = max(1, math.ceil((s1 - s0) / math.log(10.0) * panels_per_decade))
    edges = np.linspace(s0, s1, panels + 1)
    results = []
    for q in (order, max(4, order // 2)):
        z, w = _leggauss(q)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        sig = (mid[:, None] + half[:, None] * z).ravel()
        wts = (half[:, None] * w).ravel() * np.exp(sig * (power + 1.0))
        vals = np.asarray(fn(np.exp(sig)), dtype=float)
        results.append(np.tensordot(wts, vals, axes=(0, 0)))
    return PowerIntegral(results[0], np.abs(results[0] - results[1]))


@dataclass(frozen=True)
class SubordinationResult:
    value: np.ndarray
    error_estimate: np.ndarray
    tail_bound: float = 0.0


def balakrishnan(
    difference: Callable[[np.ndarray], np.ndarray],
    s: float,
    *,
    generator: np.ndarray,
    scale: float,
    far_tail: Callable[[float], np.ndarray] | np.ndarray | float = 0.0,
    current=0.0,
    tau_min: float | None = None,
    tau_max: float | None = None,
    order: int = 24,
    panels_per_decade: float = 2.0,
    tol: float | None = None,
) -> SubordinationResult:
    r""":math:`\frac{1}{\Gamma(-s)}\int_0^\infty (S_\tau f - f)\,\tau^{-1-s}\,d\tau` for a semigroup ``S``.

    ``difference(taus)`` returns :math:`S_\tau f - f` stacked over ``taus``;
    ``generator`` is :math:`\lim_{\tau\to0}(S_\tau f - f)/\tau`; ``current``
    is ``f`` at the evaluation points. Beyond ``tau_max`` the semigroup part
    contributes ``far_tail`` (the value of
    :math:`\int_{\tau_{max}}^\infty S_\tau f\,\tau^{-1-s}d\tau`, or a callable
    of ``tau_max`` returning it) and ``-f`` contributes analytically.
    Below ``tau_min`` a two-term Taylor model is integrated exactly, its
    quadratic coefficient fitted from ``difference(tau_min)``.
    With ``tol`` set, the panel density doubles until the body error
    estimate is below ``tol`` (absolute, before the Gamma factor).
    """
    if not 0.0 < s < 1.0:
        raise DomainError(f"subordination order must lie in (0, 1), got {s!r}")
    tau_min = 1e-6 * scale**2 if tau_min is None else tau_min
    tau_max = 1e8 * scale**2 if tau_max is None else tau_max
    body = log_window_integral(difference, -1.0 - s, tau_min, tau_max, order=order, panels_per_decade=panels_per_decade)
    refinements = 0
    while tol is not None and float(np.max(body.error)) > tol and refinements < _MAX_REFINE:
        panels_per_decade *= 2.0
        refinements += 1
        body = log_window_integral(difference, -1.0 - s, tau_min, tau_max, order=order, panels_per_decade=panels_per_decade)
    gen = np.asarray(generator, dtype=float)
    d_min = np.asarray(difference(np.array([tau_min])), dtype=float)[0]
    lin = gen * tau_min ** (1.0 - s) / (1.0 - s)
    quad = (d_min - gen * tau_min) * tau_min ** (-s) / (2.0 - s)
    tail = far_tail(tau_max) if callable(far_tail) else np.asarray(far_tail, dtype=float)
    cur = np.asarray(current, dtype=float)
    total = body.value + lin + quad + tail - cur * tau_max ** (-s) / s
    err = body.error + np.abs(quad) * min(1.0, tau_min / scale**2) + 1e-16 * tau_min ** (-s) * np.abs(cur)
    g = special.gamma(-s)
    return SubordinationResult(total / g, err / abs(g))


def mass_far_tail(mass: float, n: int, s: float) -> Callable[[float], float]:
    r"""Tail :math:`\int_{T}^\infty M(4\pi\tau)^{-n/2}\tau^{-1-s}d\tau` of an integrable datum's heat flow."""
    def tail(T: float) -> float:
        return mass * (4.0 * math.pi) ** (-0.5 * n) * T ** (-0.5 * n - s) / (0.5 * n + s)
    return tail


def space_far_tail(f: SpaceFunction, s: float) -> Callable[[float], float]:
    """Leading-order tail of the heat flow of ``f`` against ``tau^(-1-s)``."""
    if f.mean_value is not None:
        m = f.mean_value
        return lambda T: m * T ** (-s) / s
    if f.mass is not None:
        return mass_far_tail(f.mass, f.n, s)
    return lambda T: 0.0


# ---------------------------------------------------------------------------
# PDE residuals of the backward semigroup (d = 1)
# ---------------------------------------------------------------------------


def backward_heat_residual(u: SpaceTimeFunction, probes, *, h: float = 1e-3) -> float:
    r"""Largest :math:`|V_\tau - V_{xx} - V_t|` of :func:`backward_heat_apply` over probes ``(x, t, tau)``."""
    if u.d != 1:
        raise DomainError("backward_heat_residual is implemented for d = 1")

    def V(x, t, tau):
        return float(backward_heat_apply(u, tau, x, t))

    worst = 0.0
    for x, t, tau in probes:
        hx, ht, hs = h * max(1.0, abs(x)), h * max(1.0, t), h * max(1.0, tau)
        v0 = V(x, t, tau)
        d_tau = (V(x, t, tau + hs) - V(x, t, tau - hs)) / (2 * hs)
        d_xx = (V(x + hx, t, tau) - 2 * v0 + V(x - hx, t, tau)) / hx**2
        d_t = (V(x, t + ht, tau) - V(x, t - ht, tau)) / (2 * ht)
        worst = max(worst, abs(d_tau - d_xx - d_t))
    return worst


def characteristics_residual(u: SpaceTimeFunction, C: float, probes, *, h: float = 1e-3) -> float:
    r"""Largest :math:`|h_\tau - h_{xx}|` for :math:`h(x,\tau) = V(x, C-\tau, \tau)` over probes ``(x, tau)``.

    Along ``t + tau = C`` the backward semigroup is a plain heat flow.
    """
    if u.d != 1:
        raise DomainError("characteristics_residual is implemented for d = 1")

    def H(x, tau):
        return float(backward_heat_apply(u, tau, x, C - tau))

    worst = 0.0
    for x, tau in probes:
        if not 0.0 < tau < C:
            raise DomainError("characteristic probes need 0 < tau < C")
        hx, hs = h * max(1.0, abs(x)), h * max(1.0, tau)
        h0 = H(x, tau)
        d_tau = (H(x, tau + hs) - H(x, tau - hs)) / (2 * hs)
        d_xx = (H(x + hx, tau) - 2 * h0 + H(x - hx, tau)) / hx**2
        worst = max(worst, abs(d_tau - d_xx))
    return worst
