r"""Constants and weighted norms of the space-time Carleman inequalities.

Two inequalities are checked numerically for :math:`L = (-\Delta_x-\partial_t)^s`:

* the :math:`L^2` form
  :math:`\iint |u|^2 w_\eta \le C\,\iint |Lu|^2 w_\eta\, t^{2s}`,
* the :math:`L^p` form
  :math:`(b/p)^p \iint |u|^p w_\eta \le \iint |Lu|^p w_\eta\, t^{sp}`,

with :math:`w_\eta(x,t) = e^{-|x|^2/4t}\,t^{(2\eta-d-2)/2}`. The constants
come from weighted Hardy-Rellich inequalities on :math:`\mathbb{R}^{N+d}`
and a limit ``N -> infinity``; the pre-limit versions are exposed too.

Weighted integrals use ``t = e^sigma`` and, for each ``t``, the radial
variable :math:`\rho = \sqrt{4t}\,\xi` so that the Gaussian weight becomes
:math:`e^{-\xi^2}`. Test data must be radial in ``x``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Literal, Sequence

import numpy as np
from scipy import special
from scipy.interpolate import CubicSpline

from .errors import DomainError, NonIntegrableWeightError, PoleError
from .fracbackheat import fbh_fourier_at, fbh_subordination
from .params import FracParams, near_integer
from .quadrature import _leggauss
from .semigroup import balakrishnan, heat_apply
from .specfun import gamma_ratio_signed, log_gamma, sphere_area
from .testfn import SpaceTimeFunction, resolve, validate_hypotheses

Variant = Literal["thm1_L2", "thm2_Lp"]
ConstantId = Literal["thm1", "thm2_paper", "thm2_derived"]

#: Slack allowed in the pre-limit ordering of the L2 constants.
PRELIMIT_SLACK = 0.05
PRELIMIT_NS = (100, 1000, 10000)
#: Quadrature error budget for a battery cell.
QUAD_ERROR_MAX = 1e-4
#: Target of the tau quadrature for operator samples, relative to sup|u|.
OPERATOR_TOL = 1e-6


# ---------------------------------------------------------------------------
# Integer searches
# ---------------------------------------------------------------------------


def j0_smallest(N: int, d: int, s: float, eta: float) -> int:
    """Smallest ``j >= 0`` with ``(n - 2 eta)(n - 4s - 2 eta) <= (n + 2j)^2``, ``n = N + d``; 0 when ``n = 1``."""
    n = N + d
    if n == 1:
        return 0
    lhs = (n - 2.0 * eta) * (n - 4.0 * s - 2.0 * eta)
    j = 0
    while lhs > (n + 2.0 * j) ** 2:
        j += 1
    return j


def j1_smallest(s: float, eta: float) -> int:
    """Smallest ``j >= 0`` with ``j + s + eta >= 0`` and ``eta (2s + eta) <= j^2``."""
    j = 0
    while j + s + eta < 0 or eta * (2.0 * s + eta) > j * j:
        j += 1
    return j


# ---------------------------------------------------------------------------
# Constants
# ---------------------------------------------------------------------------


def _log_sq_quotient(num: Sequence[float], den: Sequence[float]) -> float:
    """Log of the squared Gamma quotient; poles raise :class:`PoleError`."""
    return 2.0 * gamma_ratio_signed(list(num), list(den)).log_scale


def _eilertsen_terms(n: int, s: float, eta: float, j: int) -> tuple[list[float], list[float]]:
    return (
        [0.5 * (eta + j), 0.5 * (n - 2 * s - eta + j)],
        [0.5 * (2 * s + eta + j), 0.5 * (n - eta + j)],
    )


def _check_eilertsen(n: int, s: float, eta: float) -> None:
    if s < 0:
        raise DomainError("order s must be non-negative")
    if near_integer(-eta) and -eta >= -0.5:
        raise PoleError(f"-eta={-eta:g} is a non-negative integer")
    if near_integer(2 * s + eta - n) and 2 * s + eta - n <= 0.5:
        raise PoleError(f"2s+eta-n={2 * s + eta - n:g} is a non-positive integer")


def log_constant_eilertsen(n: int, s: float, eta: float) -> float:
    _check_eilertsen(n, s, eta)
    j0 = j0_smallest(n - 1, 1, s, eta) if n >= 2 else 0
    logs = [_log_sq_quotient(*_eilertsen_terms(n, s, eta, j)) for j in (j0, j0 + 1)]
    return -4.0 * s * math.log(2.0) + max(logs)


def constant_eilertsen(n: int, s: float, eta: float) -> float:
    r"""Best :math:`L^2` constant of the power-weighted inequality on :math:`\mathbb{R}^n`."""
    return math.exp(log_constant_eilertsen(n, s, eta))


def constant_prelimit(N: int, d: int, s: float, eta: float) -> float:
    r""":math:`(2N)^{2s} C_{N+d}`, the constant before letting ``N`` grow."""
    return math.exp(2.0 * s * math.log(2.0 * N) + log_constant_eilertsen(N + d, s, eta))


def constant_thm1(s: float, eta: float) -> float:
    r""":math:`\max_{0\le j\le j_1+1} (\Gamma((\eta+j)/2)/\Gamma((2s+\eta+j)/2))^2`."""
    if near_integer(2 * s + eta):
        raise PoleError(f"2s+eta={2 * s + eta:g} is an integer")
    j1 = j1_smallest(s, eta)
    return math.exp(max(_log_sq_quotient([0.5 * (eta + j)], [0.5 * (2 * s + eta + j)]) for j in range(j1 + 2)))


@dataclass(frozen=True)
class PrelimitCheck:
    N: int
    prelimit: float
    limit: float
    ok: bool


def prelimit_ordering(d: int, s: float, eta: float, Ns: Sequence[int] = PRELIMIT_NS) -> list[PrelimitCheck]:
    """``(2N)^{2s} C_{N+d} <= (1 + slack) * constant_thm1`` for each ``N``."""
    limit = constant_thm1(s, eta)
    out = []
    for N in Ns:
        pre = constant_prelimit(N, d, s, eta)
        out.append(PrelimitCheck(N, pre, limit, pre <= (1.0 + PRELIMIT_SLACK) * limit))
    return out


def constant_denitti(n: int, s: float, theta: float, p: float = 2.0) -> float:
    r""":math:`2^{2s}\Gamma(\frac{n-\theta}{2})\Gamma(\frac{2s+\theta}{2})/(\Gamma(\frac{n-\theta-2s}{2})\Gamma(\frac\theta2))`, signed.

    The constant itself does not depend on ``p``; ``p`` is validated only.
    """
    if not 1.0 < p < math.inf:
        raise DomainError(f"p={p!r} outside (1, inf)")
    if not theta > -2.0 * s:
        raise DomainError(f"theta={theta!r} must exceed -2s")
    v = gamma_ratio_signed([0.5 * (n - theta), 0.5 * (2 * s + theta)], [0.5 * (n - theta - 2 * s), 0.5 * theta])
    return float(v) * 2.0 ** (2 * s)


def constant_thm2_paper(d: int, eta: float, s: float) -> float:
    r""":math:`\Gamma(-\eta-s)/\Gamma(\eta-d/2)`, signed."""
    return float(gamma_ratio_signed([-eta - s], [eta - 0.5 * d]))


@dataclass(frozen=True)
class DerivedConstant:
    """Numerical limit of the rescaled pre-limit constant and the closed form it should match."""

    value: float
    closed_form: float
    samples: tuple[tuple[int, float], ...]

    @property
    def relative_gap(self) -> float:
        return abs(self.value - self.closed_form) / abs(self.closed_form)


def _denitti_rescaled(N: int, d: int, eta: float, s: float) -> float:
    # (2N)^{-s} b_{N+d} with theta = N+d-2eta-2s, assembled in log space
    n = N + d
    theta = n - 2 * eta - 2 * s
    v = gamma_ratio_signed([0.5 * (n - theta), 0.5 * (2 * s + theta)], [0.5 * (n - theta - 2 * s), 0.5 * theta])
    return v.sign * math.exp(v.log_scale + 2 * s * math.log(2.0) - s * math.log(2.0 * N))


def constant_thm2_derived(d: int, eta: float, s: float, Ns: Sequence[int] = PRELIMIT_NS) -> DerivedConstant:
    r"""``lim (2N)^{-s} b_{N+d}`` by Richardson extrapolation over ``Ns`` (geometric, ratio 10).

    The closed form of the limit is :math:`\Gamma(\eta+s)/\Gamma(\eta)`.
    """
    Ns = list(Ns)
    vals = [_denitti_rescaled(N, d, eta, s) for N in Ns]
    table = list(vals)
    ratio = Ns[1] / Ns[0]
    order = 1
    while len(table) > 1:
        f = ratio**order
        table = [(f * b - a) / (f - 1.0) for a, b in zip(table, table[1:])]
        order += 1
    closed = float(gamma_ratio_signed([eta + s], [eta]))
    return DerivedConstant(table[0], closed, tuple(zip(Ns, vals)))


# ---------------------------------------------------------------------------
# Weighted space-time integrals
# ---------------------------------------------------------------------------


def weight_exponents(d: int, eta: float, s: float, p: float) -> tuple[float, float]:
    """Powers of ``t`` in the left and right weights."""
    left = (2.0 * eta - d - 2.0) / 2.0
    return left, s * p + left


@dataclass(frozen=True)
class WeightedNodes:
    r"""Nodes ``(rho, t)`` with base weights for :math:`\iint F(|x|,t)\,e^{-|x|^2/4t}\,dx\,dt`.

    The power of ``t`` is applied later. ``half`` holds the same
    construction at three quarters of the order for the error estimate. Below ``t_min`` the
    integrand is replaced by its value at the origin.
    """

    d: int
    rho: np.ndarray
    t: np.ndarray
    weight: np.ndarray
    t_min: float
    t_max: float
    half: WeightedNodes | None = None


def _legendre_panels(lo: float, hi: float, panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    z, w = _leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + half[:, None] * z).ravel(), (half[:, None] * w).ravel()


def weighted_nodes(
    d: int,
    t_max: float,
    space_radius: float,
    *,
    t_min: float = 1e-12,
    sigma_order: int = 16,
    xi_order: int = 32,
    xi_max: float = 6.5,
    _half: bool = True,
) -> WeightedNodes:
    """Tensor nodes in ``(log t, xi)`` with the ``xi`` range split where ``rho`` reaches ``space_radius``."""
    panels = max(1, math.ceil(math.log(t_max / t_min)))
    sig, wsig = _legendre_panels(math.log(t_min), math.log(t_max), panels, sigma_order)
    t = np.exp(sig)
    area = sphere_area(d) if d > 1 else 2.0
    rhos, ts, ws = [], [], []
    z, w = _leggauss(xi_order)
    for tv, wv in zip(t, wsig):
        scale = math.sqrt(4.0 * tv)
        cut = min(xi_max, space_radius / scale)
        for lo, hi in ((0.0, cut), (cut, xi_max)):
            if hi <= lo:
                continue
            xi = 0.5 * (hi - lo) * z + 0.5 * (hi + lo)
            wx = 0.5 * (hi - lo) * w * np.exp(-xi * xi) * xi ** (d - 1)
            rhos.append(scale * xi)
            ts.append(np.full(xi.shape, tv))
            ws.append(wx * area * scale**d * wv * tv)
    nodes = WeightedNodes(d, np.concatenate(rhos), np.concatenate(ts), np.concatenate(ws), t_min, t_max)
    if _half:
        half = weighted_nodes(
            d, t_max, space_radius, t_min=t_min, sigma_order=3 * sigma_order // 4, xi_order=3 * xi_order // 4, xi_max=xi_max, _half=False
        )
        nodes = replace(nodes, half=half)
    return nodes


def nodes_for(u: SpaceTimeFunction, **kw) -> WeightedNodes:
    """Node set sized to the time support and space extent of ``u``."""
    if u.time is None or not math.isfinite(u.time.support[1]):
        raise NonIntegrableWeightError(f"{u.name}: time factor has no finite support, the t -> inf tail is not controlled")
    t_max = u.time.support[1] + max(1.0, u.time.length_scale)
    radius = u.space.support_radius if u.space is not None else 10.0
    return weighted_nodes(u.d, t_max, radius, **kw)


@dataclass(frozen=True)
class NodeValues:
    """A function sampled on a node set, its half-order companion and its value at the origin."""

    nodes: WeightedNodes
    values: np.ndarray
    half_values: np.ndarray
    origin: float
    sup: float
    errors: np.ndarray | None = None


@dataclass(frozen=True)
class WeightedIntegral:
    value: float
    error: float


def weighted_integral(samples: NodeValues, power: float, p: float) -> WeightedIntegral:
    r""":math:`\iint |F|^p\,e^{-|x|^2/4t}\,t^{power}\,dx\,dt` from node samples."""
    nodes = samples.nodes
    d = nodes.d
    expo = power + 0.5 * d + 1.0
    tiny = 1e-14 * max(samples.sup, 1e-300)
    if expo <= 0 and abs(samples.origin) > tiny:
        raise NonIntegrableWeightError(f"weight t^{power:g} is not integrable at t = 0 for data with F(0,0) != 0")
    full = float(np.sum(nodes.weight * nodes.t**power * np.abs(samples.values) ** p))
    half = float(np.sum(nodes.half.weight * nodes.half.t**power * np.abs(samples.half_values) ** p))
    near = 0.0
    if abs(samples.origin) > 0:
        near = (4 * math.pi) ** (0.5 * d) * abs(samples.origin) ** p * nodes.t_min**expo / expo
    sampling = 0.0
    if samples.errors is not None:
        weights = nodes.weight * nodes.t**power * np.abs(samples.values) ** (p - 1.0)
        sampling = p * float(np.sum(weights * samples.errors))
    return WeightedIntegral(full + near, abs(full - half) + near + sampling)


def _radial_points(rho: np.ndarray, d: int) -> np.ndarray:
    x = np.zeros(rho.shape + (d,))
    x[..., 0] = rho
    return x


def _require_radial(u: SpaceTimeFunction) -> None:
    if not u.separable or u.space.profile is None:
        raise DomainError(f"{u.name}: weighted norms need separable data with a radial space factor")


def sample_function(u: SpaceTimeFunction, nodes: WeightedNodes) -> NodeValues:
    _require_radial(u)

    def ev(n: WeightedNodes) -> np.ndarray:
        return u.eval(_radial_points(n.rho, u.d), n.t)

    origin = float(u.eval(np.zeros((u.d,)), np.asarray(nodes.t_min)))
    return NodeValues(nodes, ev(nodes), ev(nodes.half), origin, u.sup_bound)


def weighted_lhs(u: SpaceTimeFunction, d: int, eta: float, p: float, *, nodes: WeightedNodes | None = None) -> WeightedIntegral:
    r""":math:`\iint |u|^p e^{-|x|^2/4t} t^{(2\eta-d-2)/2}\,dt\,dx`."""
    if u.d != d:
        raise DomainError(f"u lives in d={u.d}, got d={d}")
    nodes = nodes or nodes_for(u)
    return weighted_integral(sample_function(u, nodes), weight_exponents(d, eta, 0.0, p)[0], p)


def weighted_rhs(Lu: NodeValues, d: int, eta: float, s: float, p: float) -> WeightedIntegral:
    r""":math:`\iint |Lu|^p e^{-|x|^2/4t} t^{sp+(2\eta-d-2)/2}\,dt\,dx` from operator samples."""
    if Lu.nodes.d != d:
        raise DomainError(f"samples live in d={Lu.nodes.d}, got d={d}")
    return weighted_integral(Lu, weight_exponents(d, eta, s, p)[1], p)


# ---------------------------------------------------------------------------
# Operator samples
# ---------------------------------------------------------------------------


class HeatTables:
    r"""Radial heat flows of one space factor on all of ``[0, rho_max]``, memoised by ``tau``.

    Closed forms are used when the factor has one. Otherwise, for compactly
    supported radial data in ``d <= 2``, the profile's radial transform
    (cosine transform for ``d = 1``, Hankel transform of order 0 for
    ``d = 2``) is computed once and every batch of ``tau`` becomes a matrix
    product onto a uniform ``rho`` grid, interpolated by cubic splines.
    Below ``tau = length_scale^2`` the increment :math:`e^{	au\Delta}w - w`
    is tabulated through ``expm1`` so that its interpolation error scales
    with ``tau``; above it the smooth flow itself is tabulated and ``w`` is
    subtracted exactly.
    """

    _FINE_STEP = 0.005
    _COARSE_STEP = 0.02
    _BATCH = 256

    def __init__(self, u: SpaceTimeFunction, rho_max: float):
        self.u = u
        self.rho_max = rho_max
        self._tables: dict[float, CubicSpline] = {}
        w = u.space
        self.closed = w.heat is not None
        if not self.closed and (w.profile is None or not w.decays or u.d > 2):
            raise DomainError(f"{w.name}: tabulated heat flow needs a compact radial profile in d <= 2")
        if not self.closed:
            self._setup()

    def _transform(self, k: np.ndarray) -> np.ndarray:
        w = self.u.space
        R = w.support_radius
        panels = max(64, int(math.ceil(float(np.max(k, initial=1.0)) * R / 4.0)))
        r, wr = _legendre_panels(0.0, R, panels, 32)
        prof = w.profile(r) * wr
        out = np.empty(k.shape)
        for i in range(0, k.size, 512):
            kk = k[i : i + 512, None]
            if self.u.d == 1:
                out[i : i + 512] = (2.0 / math.pi) * (np.cos(kk * r) @ prof)
            else:
                out[i : i + 512] = (special.j0(kk * r) @ (prof * r)) * k[i : i + 512]
        return out

    def _basis(self, k: np.ndarray, rho: np.ndarray) -> np.ndarray:
        arg = np.multiply.outer(k, rho)
        return np.cos(arg) if self.u.d == 1 else special.j0(arg)

    def _setup(self) -> None:
        w = self.u.space
        self.tau_switch = w.length_scale**2
        peak = float(np.max(np.abs(self._transform(np.linspace(0.0, 10.0, 101)))))
        probe = np.arange(10.0, 1001.0, 10.0)
        c = np.abs(self._transform(probe))
        small = np.nonzero(c <= 1e-13 * peak)[0]
        self.k_max = float(probe[small[0]]) if small.size else float(probe[-1])
        self.top_fine = min(self.rho_max, w.support_radius + 12.0 * math.sqrt(self.tau_switch))
        self.grid_fine = np.linspace(0.0, self.top_fine, int(math.ceil(self.top_fine / self._FINE_STEP)) + 1)
        per_unit = max(16, int(math.ceil(self.top_fine)) * 2)
        self.k_fine, wk = _legendre_panels(0.0, self.k_max, int(math.ceil(self.k_max)), per_unit)
        self.c_fine = self._transform(self.k_fine) * wk
        self.basis_fine = self._basis(self.k_fine, self.grid_fine)
        k_low = math.sqrt(40.0 / self.tau_switch)
        per_unit = max(16, int(math.ceil(self.rho_max)) * 2)
        self.k_coarse, wk = _legendre_panels(0.0, k_low, int(math.ceil(k_low)), per_unit)
        self.c_coarse = self._transform(self.k_coarse) * wk
        n_coarse = int(math.ceil(self.rho_max / self._COARSE_STEP)) + 1
        self.grid_coarse = np.linspace(0.0, self.rho_max, max(n_coarse, 64))
        self.basis_coarse = self._basis(self.k_coarse, self.grid_coarse)

    def prepare(self, taus) -> None:
        """Build the missing tables for ``taus`` in batches."""
        if self.closed:
            return
        missing = sorted({float(t) for t in np.ravel(taus)} - self._tables.keys())
        small = [t for t in missing if t < self.tau_switch]
        large = [t for t in missing if t >= self.tau_switch]
        for group, k, c, basis, grid, fn in (
            (small, self.k_fine, self.c_fine, self.basis_fine, self.grid_fine, np.expm1),
            (large, self.k_coarse, self.c_coarse, self.basis_coarse, self.grid_coarse, np.exp),
        ):
            sym = np.concatenate([-grid[:0:-1], grid])
            for i in range(0, len(group), self._BATCH):
                batch = np.array(group[i : i + self._BATCH])
                vals = (fn(-np.multiply.outer(batch, k * k)) * c) @ basis
                for tau, row in zip(batch, vals):
                    self._tables[float(tau)] = CubicSpline(sym, np.concatenate([row[:0:-1], row]))

    def increment(self, tau: float, rho: np.ndarray) -> np.ndarray:
        r""":math:`e^{\tau\Delta}w - w` at radii ``rho``."""
        w = self.u.space
        x = _radial_points(rho, self.u.d)
        if self.closed:
            return w.heat(x, tau) - w.fn(x)
        if tau not in self._tables:
            self.prepare([tau])
        spline = self._tables[tau]
        if tau < self.tau_switch:
            # past ``top_fine`` the flow is below e^{-36} of the data
            inside = rho <= self.top_fine
            return np.where(inside, spline(np.minimum(rho, self.top_fine)), -w.fn(x))
        return spline(np.minimum(rho, self.rho_max)) - w.fn(x)


@dataclass(frozen=True)
class OperatorValues:
    value: np.ndarray
    error: np.ndarray


def backward_operator_at(
    u: SpaceTimeFunction,
    s: float,
    rho: np.ndarray,
    t: np.ndarray,
    *,
    tol: float | None = None,
    chunk: int = 8192,
    tables: HeatTables | None = None,
) -> OperatorValues:
    r""":math:`(-\Delta-\partial_t)^s u` at radial points by subordination with tabulated heat flows.

    ``tol`` is the absolute target of the tau quadrature, by default
    ``OPERATOR_TOL`` times the sup bound of ``u``.
    """
    _require_radial(u)
    rho = np.asarray(rho, dtype=float)
    t = np.asarray(t, dtype=float)
    flat_r, flat_t = rho.ravel(), t.ravel()
    if tables is None:
        tables = HeatTables(u, float(flat_r.max()) if flat_r.size else 0.0)
    elif flat_r.size and flat_r.max() > tables.rho_max:
        raise DomainError("radius beyond the tabulated range")
    tol = OPERATOR_TOL * u.sup_bound if tol is None else tol
    scale = min(u.space.length_scale, math.sqrt(u.time.length_scale))
    res = np.empty(flat_r.shape)
    err = np.empty(flat_r.shape)
    for start in range(0, flat_r.size, chunk):
        r = flat_r[start : start + chunk]
        tt = flat_t[start : start + chunk]
        x = _radial_points(r, u.d)
        ux = u.eval(x, tt)
        wr, gt = u.space.fn(x), u.time.fn(tt)
        lap, ut, _ = u.generator_terms(x, tt)

        def diff(taus, r=r, tt=tt, wr=wr, gt=gt):
            tables.prepare(taus)
            out = np.empty((len(taus), r.size))
            for i, tau in enumerate(taus):
                g = u.time.fn(tt + tau)
                out[i] = tables.increment(float(tau), r) * g + wr * (g - gt)
            return out

        val = balakrishnan(diff, s, generator=lap + ut, scale=scale, current=ux, tol=tol)
        res[start : start + chunk] = val.value
        err[start : start + chunk] = val.error_estimate
    return OperatorValues(res.reshape(rho.shape), err.reshape(rho.shape))


def sample_operator(u: SpaceTimeFunction, s: float, nodes: WeightedNodes, *, tables: HeatTables | None = None) -> NodeValues:
    """``Lu`` on a node set, its companion and at the origin, with per-node error estimates."""
    if tables is None:
        tables = HeatTables(u, float(max(nodes.rho.max(), nodes.half.rho.max())))
    full = backward_operator_at(u, s, nodes.rho, nodes.t, tables=tables)
    half = backward_operator_at(u, s, nodes.half.rho, nodes.half.t, tables=tables)
    origin = backward_operator_at(u, s, np.zeros(1), np.full(1, nodes.t_min), tables=tables)
    return NodeValues(
        nodes, full.value, half.value, float(origin.value[0]), float(np.max(np.abs(full.value))), full.error
    )


@dataclass(frozen=True)
class CrossCheck:
    probes: tuple[tuple[float, float], ...]
    tabulated: np.ndarray
    subordination: np.ndarray
    fourier: np.ndarray | None
    max_relative: float


def operator_crosscheck(u: SpaceTimeFunction, s: float, probes: Sequence[tuple[float, float]]) -> CrossCheck:
    """Compare the tabulated operator with :func:`fbh_subordination` and, in ``d = 1``, :func:`fbh_fourier_at`."""
    rho = np.array([p[0] for p in probes], dtype=float)
    t = np.array([p[1] for p in probes], dtype=float)
    tab = backward_operator_at(u, s, rho, t).value
    x = _radial_points(rho, u.d)
    sub = np.atleast_1d(fbh_subordination(u, s, x, t).value)
    four = np.atleast_1d(fbh_fourier_at(u, s, x, t).value) if u.d == 1 else None
    scale = max(float(np.max(np.abs(sub))), 1e-300)
    rel = np.abs(tab - sub) / np.maximum(np.abs(sub), 1e-3 * scale)
    if four is not None:
        rel = np.maximum(rel, np.abs(four - sub) / np.maximum(np.abs(sub), 1e-3 * scale))
    return CrossCheck(tuple(map(tuple, probes)), tab, sub, four, float(np.max(rel)))


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CarlemanReport:
    """One side-by-side evaluation of an inequality; ``ratio <= 1`` means it holds numerically."""

    variant: Variant
    fn_id: str
    params: FracParams
    lhs: float
    rhs: float
    constant_id: ConstantId
    constant: float
    ratio: float
    quadrature_error: float
    constant_sign: float = 1.0
    experimental: bool = False
    alternatives: tuple[CarlemanReport, ...] = ()

    COLUMNS = ("variant", "fn_id", "d", "s", "eta", "p", "lhs", "rhs", "constant_id", "constant", "ratio", "quad_err")

    @property
    def passed(self) -> bool:
        return self.ratio <= 1.0 + self.quadrature_error

    def rows(self) -> list[dict]:
        out = [
            {
                "variant": self.variant,
                "fn_id": self.fn_id,
                "d": self.params.d,
                "s": self.params.s,
                "eta": self.params.eta,
                "p": self.params.p,
                "lhs": self.lhs,
                "rhs": self.rhs,
                "constant_id": self.constant_id,
                "constant": self.constant,
                "ratio": self.ratio,
                "quad_err": self.quadrature_error,
            }
        ]
        for alt in self.alternatives:
            out.extend(alt.rows())
        return out


@dataclass
class OperatorCache:
    """Node sets and operator samples keyed by ``(fn_id, d)`` and ``(fn_id, d, s)``."""

    nodes: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)

    def get(self, u: SpaceTimeFunction, s: float) -> tuple[NodeValues, NodeValues]:
        key = (u.name, u.d)
        if key not in self.nodes:
            nodes = nodes_for(u)
            self.nodes[key] = nodes
            self.functions[key] = sample_function(u, nodes)
            self.tables[key] = HeatTables(u, float(max(nodes.rho.max(), nodes.half.rho.max())))
        skey = key + (float(s),)
        if skey not in self.samples:
            self.samples[skey] = sample_operator(u, s, self.nodes[key], tables=self.tables[key])
        return self.functions[key], self.samples[skey]


def _ratio(lhs: WeightedIntegral, rhs: WeightedIntegral, factor: float) -> tuple[float, float]:
    if lhs.value == 0.0:
        return 0.0, 0.0
    if rhs.value == 0.0:
        return math.inf, 0.0
    ratio = factor * lhs.value / rhs.value
    err = ratio * (lhs.error / lhs.value + rhs.error / rhs.value)
    return ratio, err


def verify_carleman(
    u: SpaceTimeFunction,
    params: FracParams,
    variant: Variant,
    *,
    cache: OperatorCache | None = None,
    fn_id: str | None = None,
    validate: bool = True,
) -> CarlemanReport:
    """Evaluate both sides of the chosen inequality for ``u``.

    For the ``L^p`` form the primary report uses the constant obtained by
    letting ``N`` grow in the pre-limit constant; the report for the
    closed-form constant with negative-argument Gammas is attached as an
    alternative. Constants enter through their absolute values and their
    signs are reported.
    """
    theorem = "thm1" if variant == "thm1_L2" else "thm2"
    if validate:
        report = validate_hypotheses(u, params, theorem)
        if not report.passed:
            raise DomainError(f"{u.name}: hypotheses fail: {report.failures}")
    fn_id = fn_id or u.name
    cache = cache or OperatorCache()
    d, s, eta = params.d, params.s, params.eta
    p = 2.0 if variant == "thm1_L2" else params.p
    fvals, lu = cache.get(u, s)
    left_power, right_power = weight_exponents(d, eta, s, p)
    lhs = weighted_integral(fvals, left_power, p)
    rhs = weighted_integral(lu, right_power, p)
    experimental = eta < 0
    if variant == "thm1_L2":
        C = constant_thm1(s, eta)
        ratio, err = _ratio(lhs, rhs, 1.0 / C)
        return CarlemanReport(variant, fn_id, params, lhs.value, rhs.value, "thm1", C, ratio, err, 1.0, experimental)

    def lp_report(cid: ConstantId, b: float) -> CarlemanReport:
        factor = (abs(b) / p) ** p
        ratio, err = _ratio(lhs, rhs, factor)
        return CarlemanReport(
            variant, fn_id, params, lhs.value, rhs.value, cid, 1.0 / factor, ratio, err, math.copysign(1.0, b), experimental
        )

    derived = lp_report("thm2_derived", constant_thm2_derived(d, eta, s).value)
    try:
        paper = lp_report("thm2_paper", constant_thm2_paper(d, eta, s))
        alts: tuple[CarlemanReport, ...] = (paper,)
    except PoleError:
        alts = ()
    return replace(derived, alternatives=alts)


# ---------------------------------------------------------------------------
# Batteries
# ---------------------------------------------------------------------------

THM1_S = (0.25, 0.5, 0.75)
THM1_ETA = (0.3, 0.6, 0.9, 1.3, 1.7, 2.2)
THM2_ETA = {1: (-0.3, -0.15, 0.1, 0.2, 0.3, 0.4), 2: (-0.3, 0.1, 0.3, 0.5, 0.7, 0.9)}
THM2_P = (1.5, 2.0, 3.0)
THM1_FN = "gauss-a1-b1-t4"
THM2_FN = "bump-R2-tc2-tw1"


@dataclass(frozen=True)
class BatteryCell:
    variant: Variant
    fn_id: str
    params: FracParams


def thm1_battery(dims: Sequence[int] = (1, 2), s_values=THM1_S, etas=THM1_ETA, fn_id: str = THM1_FN) -> list[BatteryCell]:
    cells = []
    for d in dims:
        for s in s_values:
            for eta in etas:
                params = FracParams(s=s, eta=eta, p=2.0, d=d)
                if params.admissible("thm1"):
                    cells.append(BatteryCell("thm1_L2", fn_id, params))
    return cells


def thm2_battery(dims: Sequence[int] = (1, 2), s_values=THM1_S, etas=None, ps=THM2_P, fn_id: str = THM2_FN) -> list[BatteryCell]:
    cells = []
    for d in dims:
        for s in s_values:
            for eta in etas if etas is not None else THM2_ETA[d]:
                for p in ps:
                    params = FracParams(s=s, eta=eta, p=p, d=d)
                    if params.admissible("thm2"):
                        cells.append(BatteryCell("thm2_Lp", fn_id, params))
    return cells


def run_battery(cells: Sequence[BatteryCell], cache: OperatorCache | None = None) -> list[CarlemanReport]:
    """Reports in the order ``(variant, s, eta, p, fn_id)`` regardless of input order."""
    cache = cache or OperatorCache()
    ordered = sorted(cells, key=lambda c: (c.variant, c.params.d, c.params.s, c.params.eta, c.params.p, c.fn_id))
    reports = []
    for cell in ordered:
        u = resolve(cell.fn_id, cell.params.d)
        reports.append(verify_carleman(u, cell.params, cell.variant, cache=cache, fn_id=cell.fn_id))
    return reports


def reports_to_csv(reports: Sequence[CarlemanReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CarlemanReport.COLUMNS)
    for rep in reports:
        for row in rep.rows():
            w.writerow([row[c] if isinstance(row[c], str) else "%.17g" % row[c] for c in CarlemanReport.COLUMNS])
    return buf.getvalue()


def reports_to_json(reports: Sequence[CarlemanReport]) -> str:
    cells = []
    for rep in reports:
        for row, r in zip(rep.rows(), (rep,) + rep.alternatives):
            row = dict(row)
            row["passed"] = r.passed
            row["experimental"] = r.experimental
            row["constant_sign"] = r.constant_sign
            cells.append(row)
    summary = {
        "cells": cells,
        "all_passed": all(r.passed for r in reports),
        "gated_passed": all(r.passed for r in reports if not r.experimental),
        "count": len(reports),
    }
    return json.dumps(summary, sort_keys=True, allow_nan=True)
