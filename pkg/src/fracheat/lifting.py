r"""Lifting time into ``N`` fictitious space variables.

The lifted datum :math:`U(x, y) = u(x, |y|^2/2N)` on :math:`\mathbb{R}^{d+N}`
is radial in ``y``. Its heat flow, read back at :math:`|y| = \sqrt{2Nt}`,
is

.. math::

    V_N(x,t,\tau) = \int_0^\infty K_N(p; t, \tau)\,
        e^{\tau\Delta_x}[u(\cdot,p)](x)\,dp,

    K_N = \lambda\,e^{-\lambda(\sqrt p-\sqrt t)^2}(p/t)^{\nu/2}\,
        \tilde I_\nu(2\lambda\sqrt{pt}),
    \qquad \lambda = \frac{N}{2\tau},\ \nu = \frac N2 - 1,

with :math:`\tilde I_\nu = e^{-z}I_\nu` the scaled Bessel function. ``K_N``
is a probability density in ``p`` (a scaled noncentral chi-square) with
mean :math:`t+\tau` and variance :math:`2\tau(\tau+2t)/N`, which is why
:math:`V_N` tends to the backward heat semigroup as ``N`` grows. At
``t = 0`` it degenerates to the Gamma density of shape ``N/2`` and
rate ``lambda``.

:func:`printed_kernel` evaluates the variant with Bessel order
:math:`(N-1)/2` and prefactor
:math:`\tau^{-1/2}\,\Gamma(N/2)/\Gamma((N-1)/2)\,N^{1/2}`; it does not
integrate to one and is kept for the discrepancy report.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import DomainError, QuadratureBudgetError
from .fracbackheat import SUBORDINATION_TOL, fbh_subordination
from .quadrature import _leggauss
from .semigroup import balakrishnan, heat_apply, space_far_tail
from .specfun import log_bessel_i_scaled, log_gamma
from .testfn import SpaceTimeFunction, as_points

N_MAX = 1024
# Kernel mass outside the p-window is below exp(-_WINDOW_EXP).
_WINDOW_EXP = 50.0
_P_PANELS = 12
_P_ORDER = 24
_MASS_TOL = 1e-8

KernelVariant = Literal["corrected", "printed"]


@dataclass(frozen=True)
class LiftParams:
    """Number of fictitious variables ``N``, space dimension ``d`` and order ``s``."""

    N: int
    d: int = 1
    s: float = 0.5

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 2:
            raise DomainError(f"N must be an integer >= 2, got {self.N!r}")
        if self.N > N_MAX:
            raise DomainError(f"N={self.N} exceeds N_MAX={N_MAX}")
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"d must be a positive integer, got {self.d!r}")
        if not 0.0 < self.s < 1.0:
            raise DomainError(f"s={self.s!r} outside (0, 1)")


def _check_n(N: int) -> None:
    if int(N) != N or N < 2:
        raise DomainError(f"N must be an integer >= 2, got {N!r}")
    if N > N_MAX:
        raise DomainError(f"N={N} exceeds N_MAX={N_MAX}")


# ---------------------------------------------------------------------------
# Kernels in p
# ---------------------------------------------------------------------------


def log_lift_kernel(p, t: float, tau: float, N: int) -> np.ndarray:
    """Log of the mass-one kernel ``K_N(p; t, tau)`` (``-inf`` where it vanishes)."""
    p = np.asarray(p, dtype=float)
    lam = 0.5 * N / tau
    nu = 0.5 * N - 1.0
    if t == 0.0:
        with np.errstate(divide="ignore"):
            return (nu + 1.0) * math.log(lam) + nu * np.log(p) - lam * p - float(log_gamma(nu + 1.0))
    z = 2.0 * lam * np.sqrt(p * t)
    with np.errstate(divide="ignore"):
        out = (
            math.log(lam)
            - lam * (np.sqrt(p) - math.sqrt(t)) ** 2
            + 0.5 * nu * (np.log(p) - math.log(t))
            + log_bessel_i_scaled(nu, z)
        )
    return np.where(p > 0, out, -np.inf if nu > 0 else math.log(lam) - lam * t - float(log_gamma(1.0)))


def lift_kernel(p, t: float, tau: float, N: int) -> np.ndarray:
    return np.exp(log_lift_kernel(p, t, tau, N))


def printed_kernel(p, t: float, tau: float, N: int) -> np.ndarray:
    """Kernel with Bessel order ``(N-1)/2`` and the accompanying prefactor."""
    if t <= 0:
        raise DomainError("printed kernel is singular at t = 0")
    p = np.asarray(p, dtype=float)
    lam = 0.5 * N / tau
    nu = 0.5 * (N - 1)
    z = 2.0 * lam * np.sqrt(p * t)
    with np.errstate(divide="ignore"):
        log_k = (
            -0.5 * math.log(tau)
            + float(log_gamma(0.5 * N) - log_gamma(0.5 * (N - 1)))
            + 0.5 * math.log(N)
            - lam * (np.sqrt(p) - math.sqrt(t)) ** 2
            + 0.5 * (N - 2) * np.log(p)
            - 0.25 * (N - 1) * (np.log(p) + math.log(t))
            + log_bessel_i_scaled(nu, z)
        )
    return np.where(p > 0, np.exp(log_k), 0.0)


@dataclass(frozen=True)
class PRule:
    """Quadrature in ``p`` for one ``(t, tau)``: nodes, weights and a half-order companion."""

    nodes: np.ndarray
    weights: np.ndarray
    half_nodes: np.ndarray
    half_weights: np.ndarray


def p_rule(t: float, tau: float, N: int, *, panels: int = _P_PANELS, order: int = _P_ORDER) -> PRule:
    r"""Composite Gauss-Legendre rule in :math:`q = \sqrt p` covering the kernel.

    For small ``tau`` the kernel is a near-Gaussian in ``q`` of width
    :math:`(2\lambda)^{-1/2}` around :math:`\sqrt t`; for larger ``tau`` its
    mass moves to ``p = t + tau``. The window covers both. The onset at
    ``q = 0`` behaves like :math:`q^{N-2}`, a polynomial, which Gauss rules
    integrate exactly.
    """
    lam = 0.5 * N / tau
    nu = 0.5 * N - 1.0
    reach = math.sqrt(_WINDOW_EXP / lam)
    # The mass sits near p = t + tau with spread sqrt(2 tau (tau + 2t) / N).
    mean = t + tau
    spread = 12.0 * math.sqrt(2.0 * tau * (tau + 2.0 * t) / N)
    q_lo = max(0.0, min(math.sqrt(t) - reach, math.sqrt(max(0.0, mean - spread))))
    q_hi = max(
        math.sqrt(t) + reach,
        math.sqrt(mean + spread),
        math.sqrt((nu + 1.0 + 10.0 * math.sqrt(nu + 1.0) + _WINDOW_EXP) / lam),
    )
    edges = np.linspace(q_lo, q_hi, panels + 1)
    out = []
    for q in (order, order // 2):
        z, w = _leggauss(q)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        qs = (mid[:, None] + half[:, None] * z).ravel()
        ws = (half[:, None] * w).ravel() * 2.0 * qs
        out.extend([qs * qs, ws])
    return PRule(*out)


# ---------------------------------------------------------------------------
# V_N, g_N
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LiftValue:
    """Value of ``V_N`` with the raw kernel mass and a quadrature error estimate."""

    value: np.ndarray | float
    mass: np.ndarray | float
    error_estimate: np.ndarray | float


def _squeeze(a):
    a = np.asarray(a, dtype=float)
    return float(a) if a.ndim == 0 else a


def _heat_slices(u: SpaceTimeFunction, tau: float, x: np.ndarray, ps: np.ndarray) -> np.ndarray:
    """``e^{tau Delta}[u(., p)](x)`` for each node ``p``; shape ``(len(ps),) + batch``."""
    batch = x.shape[:-1]
    if u.separable:
        hx = heat_apply(u.space, tau, x)
        return u.time.fn(ps).reshape((-1,) + (1,) * len(batch)) * hx[None]
    from .semigroup import _slice_as_space_function

    return np.stack([heat_apply(_slice_as_space_function(u, float(p)), tau, x) for p in ps])


def _kernel_average(u, x, t, tau, N, variant: KernelVariant, normalize: bool):
    rule = p_rule(t, tau, N)
    results = []
    masses = []
    for ps, ws in ((rule.nodes, rule.weights), (rule.half_nodes, rule.half_weights)):
        if variant == "corrected":
            k = lift_kernel(ps, t, tau, N)
        else:
            k = printed_kernel(ps, t, tau, N)
        kw = k * ws
        vals = _heat_slices(u, tau, x, ps)
        mass = float(np.sum(kw))
        total = np.tensordot(kw, vals, axes=(0, 0))
        results.append(total / mass if normalize else total)
        masses.append(mass)
    return results[0], masses[0], np.abs(results[0] - results[1])


def vn_evaluate(
    u: SpaceTimeFunction,
    params: LiftParams,
    x,
    t: float,
    tau: float,
    *,
    variant: KernelVariant = "corrected",
    normalize: bool = True,
) -> LiftValue:
    r""":math:`V_N(x,t,\tau)` at spatial points ``x`` for scalar ``t >= 0`` and ``tau > 0``.

    With ``normalize`` the kernel average is divided by the quadrature
    mass of the kernel, which removes the window truncation error; the raw
    mass is returned for inspection. ``t = 0`` goes to :func:`boundary_gn`.
    """
    if u.d != params.d:
        raise DomainError(f"u lives in d={u.d}, params has d={params.d}")
    t, tau = float(t), float(tau)
    if t < 0 or tau <= 0:
        raise DomainError("vn_evaluate needs t >= 0 and tau > 0")
    x = as_points(x, u.d)
    if t == 0.0 and variant == "corrected":
        val, mass, err = _kernel_average(u, x, 0.0, tau, params.N, "corrected", normalize)
    else:
        val, mass, err = _kernel_average(u, x, t, tau, params.N, variant, normalize)
    if variant == "corrected" and abs(mass - 1.0) > _MASS_TOL:
        raise QuadratureBudgetError(f"p-rule lost kernel mass: {mass!r}")
    return LiftValue(_squeeze(val), mass, _squeeze(err))


def vn_many(u: SpaceTimeFunction, N: int, x: np.ndarray, t: float, taus: np.ndarray) -> np.ndarray:
    """Normalised ``V_N`` stacked over ``taus``; shape ``(len(taus),) + batch``."""
    _check_n(N)
    x = as_points(x, u.d)
    out = np.empty((len(taus),) + x.shape[:-1])
    for i, tau in enumerate(np.asarray(taus, dtype=float)):
        val, _, _ = _kernel_average(u, x, float(t), float(tau), N, "corrected", True)
        out[i] = val
    return out


def boundary_gn(u: SpaceTimeFunction, N: int, x, tau: float) -> np.ndarray | float:
    r""":math:`g_N(x,\tau) = V_N(x,0,\tau)`: space heat flow averaged in time against the Gamma(N/2, N/2tau) density."""
    _check_n(N)
    if tau <= 0:
        raise DomainError("boundary_gn needs tau > 0")
    x = as_points(x, u.d)
    val, mass, _ = _kernel_average(u, x, 0.0, float(tau), N, "corrected", True)
    return _squeeze(val)


def boundary_limit(u: SpaceTimeFunction, x, tau: float) -> np.ndarray | float:
    r""":math:`\varphi(x,\tau) = e^{\tau\Delta}[u(\cdot,\tau)](x)`, the ``N -> infinity`` limit of :func:`boundary_gn`."""
    x = as_points(x, u.d)
    return _squeeze(_heat_slices(u, float(tau), x, np.array([float(tau)]))[0])


@dataclass(frozen=True)
class SplitIntegrals:
    r"""Pieces of :math:`g_N - \varphi` at one spatial point, split at ``a = 1 -+ delta``.

    ``a = t / tau`` is the rescaled time; ``bound2`` and ``bound3`` are the
    large-``N`` estimates of the two outer pieces for ``|u| <= sup_bound``.
    """

    N: int
    delta: float
    inner: float
    lower: float
    upper: float
    lower_mass: float
    upper_mass: float
    bound2: float
    bound3: float


def split_integrals(u: SpaceTimeFunction, N: int, x, tau: float, delta: float = 0.2) -> SplitIntegrals:
    r"""Split :math:`\int_0^\infty \rho_N(a)\,(u(x,a\tau)-u(x,\tau))\,da` into ``|a-1| < delta`` and the two tails.

    :math:`\rho_N` is the Gamma(N/2, N/2) density in ``a``. The tails are
    integrated on fine Gauss-Legendre panels in ``sqrt(a)``.
    """
    _check_n(N)
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0, 1)")
    x = as_points(x, u.d)
    if x.shape[:-1] != ():
        raise DomainError("split_integrals takes a single point")
    k = 0.5 * N
    ref = float(u.eval(x, np.asarray(tau)))

    def piece(a0: float, a1: float) -> tuple[float, float]:
        z, w = _leggauss(64)
        edges = np.linspace(math.sqrt(a0), math.sqrt(a1), 65)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        q = (mid[:, None] + half[:, None] * z).ravel()
        wq = (half[:, None] * w).ravel() * 2.0 * q
        a = q * q
        with np.errstate(divide="ignore"):
            dens = np.exp(k * math.log(k) + (k - 1.0) * np.log(a) - k * a - float(log_gamma(k)))
        diff = u.eval(np.broadcast_to(x, a.shape + (u.d,)), a * tau) - ref
        return float(np.sum(wq * dens * diff)), float(np.sum(wq * dens))

    a_max = 1.0 + 60.0 / math.sqrt(k) + 60.0 / k
    inner, _ = piece(1.0 - delta, 1.0 + delta)
    lower, lower_mass = piece(0.0, 1.0 - delta)
    upper, upper_mass = piece(1.0 + delta, max(a_max, 2.0 + 2 * delta))
    scale = u.sup_bound / (math.sqrt(2 * math.pi) * math.sqrt(2) * delta * math.sqrt(N))
    bound2 = scale * math.exp(k * (delta + math.log1p(-delta)))
    bound3 = scale * math.exp(-k * (delta - math.log1p(delta)))
    return SplitIntegrals(N, delta, inner, lower, upper, lower_mass, upper_mass, bound2, bound3)


# ---------------------------------------------------------------------------
# G_N and convergence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LiftedResult:
    value: np.ndarray | float
    error_estimate: np.ndarray | float


def _time_scale(u: SpaceTimeFunction) -> float:
    lx = u.space.length_scale if u.space is not None else 1.0
    lt = u.time.length_scale if u.time is not None else 1.0
    return min(lx, math.sqrt(lt))


def gn_evaluate(u: SpaceTimeFunction, params: LiftParams, x, t: float, **kw) -> LiftedResult:
    r""":math:`G_N(x,t) = \frac{1}{\Gamma(-s)}\int_0^\infty (V_N(x,t,\tau)-u(x,t))\,\tau^{-1-s}\,d\tau` at points ``x``.

    Small ``tau`` uses the generator :math:`\Delta u + u_t + (2t/N)u_{tt}`.
    """
    if u.d != params.d:
        raise DomainError(f"u lives in d={u.d}, params has d={params.d}")
    t = float(t)
    if t < 0:
        raise DomainError("gn_evaluate needs t >= 0")
    x = as_points(x, u.d)
    tt = np.full(x.shape[:-1], t)
    ux = u.eval(x, tt)
    lap, ut, utt = u.generator_terms(x, tt)
    gen = lap + ut + (2.0 * t / params.N) * utt
    far = 0.0
    if u.separable and u.time.constant:
        c = float(u.time.fn(0.0))
        tail = space_far_tail(u.space, params.s)
        far = lambda T: c * tail(T)  # noqa: E731

    def diff(taus):
        return vn_many(u, params.N, x, t, taus) - ux

    kw.setdefault("tol", SUBORDINATION_TOL * max(1.0, u.sup_bound))
    res = balakrishnan(diff, params.s, generator=gen, scale=_time_scale(u), far_tail=far, current=ux, **kw)
    return LiftedResult(_squeeze(res.value), _squeeze(res.error_estimate))


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    x: float
    t: float
    G_N: float
    limit: float
    abs_err: float


@dataclass
class ConvergenceTable:
    """``|G_N - (-Delta - d_t)^s u|`` over an increasing list of ``N`` and a fixed probe list."""

    rows: list[ConvergenceRow] = field(default_factory=list)
    order: float = math.nan

    COLUMNS = ("N", "x", "t", "G_N", "limit", "abs_err")

    def __post_init__(self) -> None:
        Ns = [r.N for r in self.rows]
        if any(b < a for a, b in zip(Ns, Ns[1:])):
            raise DomainError("rows must be ordered by N")
        if any(r.abs_err < 0 for r in self.rows):
            raise DomainError("errors must be non-negative")

    @property
    def Ns(self) -> list[int]:
        return sorted({r.N for r in self.rows})

    def errors(self, N: int) -> np.ndarray:
        return np.array([r.abs_err for r in self.rows if r.N == N])

    def max_errors(self) -> np.ndarray:
        return np.array([self.errors(N).max() for N in self.Ns])

    def monotone(self, noise: float = 0.0) -> bool:
        """Errors per probe nonincreasing in ``N``, allowing growth by ``2 * noise``."""
        per_probe = np.array([self.errors(N) for N in self.Ns])
        return bool(np.all(np.diff(per_probe, axis=0) <= 2.0 * noise))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for r in self.rows:
            w.writerow([r.N] + ["%.17g" % getattr(r, c) for c in self.COLUMNS[1:]])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"order": self.order, "rows": [asdict(r) for r in self.rows]}, sort_keys=True)


def empirical_order(Ns: Sequence[int], errors: Sequence[float]) -> float:
    """Slope of ``-log(error)`` against ``log(N)`` by least squares; NaN if any error is zero."""
    e = np.asarray(errors, dtype=float)
    if len(e) < 2 or np.any(e <= 0):
        return math.nan
    slope = np.polyfit(np.log(np.asarray(Ns, dtype=float)), np.log(e), 1)[0]
    return float(-slope)


def convergence_study(
    u: SpaceTimeFunction, s: float, Ns: Sequence[int], probes: Sequence[tuple[float, float]]
) -> ConvergenceTable:
    """Compare ``G_N`` with the subordination value of the backward operator at each probe ``(x, t)``."""
    Ns = list(Ns)
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise DomainError("N list must be strictly increasing")
    if u.d != 1:
        raise DomainError("convergence_study probes are (x, t) pairs in d = 1")
    xs = np.array([p[0] for p in probes], dtype=float)
    ts = np.array([p[1] for p in probes], dtype=float)
    limit = np.atleast_1d(fbh_subordination(u, s, xs, ts).value)
    rows = []
    for N in Ns:
        params = LiftParams(N, u.d, s)
        for i, (xv, tv) in enumerate(zip(xs, ts)):
            g = float(gn_evaluate(u, params, xv, tv).value)
            rows.append(ConvergenceRow(N, float(xv), float(tv), g, float(limit[i]), abs(g - float(limit[i]))))
    table = ConvergenceTable(rows)
    table.order = empirical_order(Ns, table.max_errors())
    return table


# ---------------------------------------------------------------------------
# PDE residuals
# ---------------------------------------------------------------------------


def vn_pde_residual(
    u: SpaceTimeFunction,
    params: LiftParams,
    probes: Sequence[tuple[float, float, float]],
    *,
    h: float = 1e-3,
    coefficient: float = 2.0,
) -> float:
    r"""Largest :math:`|\partial_\tau V - \Delta_x V - V_t - c\,(t/N)\,V_{tt}|` over probes ``(x, t, tau)`` (``d = 1``).

    Writing the radial Laplacian in ``t = r^2/2N`` gives ``c = 2``; pass
    ``coefficient=1`` for the variant with ``t/N``. Central differences
    use step ``h`` times each coordinate's scale.
    """
    if u.d != 1:
        raise DomainError("vn_pde_residual is implemented for d = 1")
    N = params.N

    def V(x, t, tau):
        return float(vn_evaluate(u, params, x, t, tau).value)

    worst = 0.0
    for x, t, tau in probes:
        if t <= 0 or tau <= 0:
            raise DomainError("residual probes must be interior (t > 0, tau > 0)")
        hx = h * max(1.0, abs(x))
        ht = h * max(1.0, t)
        hs = h * max(1.0, tau)
        v0 = V(x, t, tau)
        d_tau = (V(x, t, tau + hs) - V(x, t, tau - hs)) / (2 * hs)
        d_xx = (V(x + hx, t, tau) - 2 * v0 + V(x - hx, t, tau)) / hx**2
        vp, vm = V(x, t + ht, tau), V(x, t - ht, tau)
        d_t = (vp - vm) / (2 * ht)
        d_tt = (vp - 2 * v0 + vm) / ht**2
        worst = max(worst, abs(d_tau - d_xx - d_t - coefficient * (t / N) * d_tt))
    return worst


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------


def _panel_rule(lo: float, hi: float, panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    z, w = _leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + half[:, None] * z).ravel(), (half[:, None] * w).ravel()


def direct_lifted_heat(
    u: SpaceTimeFunction, N: int, x, t: float, tau: float, *, panels: int = 24, order: int = 12, chunk: int = 1 << 20
) -> float:
    r"""Heat flow of the lifted datum by tensor quadrature in the ``N`` fictitious variables.

    Evaluates :math:`(4\pi\tau)^{-N/2}\int e^{-|y-\bar y|^2/4\tau}\,
    e^{\tau\Delta_x}[u(\cdot,|\bar y|^2/2N)](x)\,d\bar y` at
    :math:`y = (\sqrt{2Nt}, 0, \dots)` with composite Gauss-Legendre rules
    on a cube of half-width :math:`\sqrt{160\tau}` around ``y``. Meant for
    ``N <= 3``.
    """
    if N > 3:
        raise DomainError("direct oracle is limited to N <= 3")
    x = as_points(x, u.d)
    y0 = math.sqrt(2.0 * N * t)
    reach = math.sqrt(160.0 * tau)
    nodes = []
    for axis in range(N):
        c = y0 if axis == 0 else 0.0
        nodes.append(_panel_rule(c - reach, c + reach, panels, order))
    grids = np.meshgrid(*[n for n, _ in nodes], indexing="ij")
    wgrid = np.ones_like(grids[0])
    for g, (_, w) in zip(np.ix_(*[w for _, w in nodes]), nodes):
        wgrid = wgrid * g
    ys = np.stack([g.ravel() for g in grids], axis=-1)
    ws = wgrid.ravel()
    centre = np.zeros(N)
    centre[0] = y0
    total = 0.0
    for start in range(0, len(ws), chunk):
        yc = ys[start : start + chunk]
        r2 = np.sum(yc * yc, axis=-1)
        kern = np.exp(-np.sum((yc - centre) ** 2, axis=-1) / (4 * tau)) * (4 * math.pi * tau) ** (-0.5 * N)
        if u.separable:
            vals = u.time.fn(r2 / (2 * N))
            total += float(np.sum(ws[start : start + chunk] * kern * vals))
        else:
            raise DomainError("direct oracle needs separable data")
    return total * float(heat_apply(u.space, tau, x))


def spectral_lifted_fraclap(u: SpaceTimeFunction, N: int, s: float, probes: Sequence[tuple[float, float]], *,
                            half_width: float = 14.0, points: int = 160) -> np.ndarray:
    r"""Fractional Laplacian of the lifted datum on :math:`\mathbb{R}^{1+N}` by FFT (``d = 1``).

    Values are read off at :math:`(x, \sqrt{2Nt}, 0, \dots)` by exact trigonometric
    interpolation. The periodisation error of the power-law tail is removed
    with the monopole image sum of :func:`fracheat.fraclap.image_correction`.
    """
    from .fraclap import image_correction
    from .testfn import PeriodicGrid

    if u.d != 1:
        raise DomainError("spectral lifted oracle is implemented for d = 1")
    dim = 1 + N
    grid = PeriodicGrid.cube(dim, half_width, points)
    mesh = grid.mesh()
    r2 = np.sum(mesh[..., 1:] ** 2, axis=-1)
    vals = u.eval(mesh[..., :1], r2 / (2 * N))
    freqs = np.meshgrid(*grid.frequencies(), indexing="ij")
    k2 = sum(f * f for f in freqs)
    coef = np.fft.fftn(vals) * k2**s
    del freqs, k2
    out = []
    for xv, tv in probes:
        pt = np.zeros(dim)
        pt[0], pt[1] = xv, math.sqrt(2 * N * tv)
        acc = coef
        for c, a, k in zip(pt, grid.axes(), grid.frequencies()):
            acc = np.tensordot(np.exp(1j * (c - a[0]) * k), acc, axes=(0, 0))
        out.append(float(acc.real) / vals.size)
    mass = float(vals.sum() * np.prod(grid.spacing))
    pts = np.array([[xv, math.sqrt(2 * N * tv)] + [0.0] * (N - 1) for xv, tv in probes])
    corr = image_correction(pts, grid, (mass,), s)
    return np.asarray(out) - np.asarray(corr)


__all__ = [
    "N_MAX",
    "LiftParams",
    "LiftValue",
    "LiftedResult",
    "ConvergenceRow",
    "ConvergenceTable",
    "SplitIntegrals",
    "log_lift_kernel",
    "lift_kernel",
    "printed_kernel",
    "p_rule",
    "vn_evaluate",
    "vn_many",
    "boundary_gn",
    "boundary_limit",
    "split_integrals",
    "gn_evaluate",
    "empirical_order",
    "convergence_study",
    "vn_pde_residual",
    "direct_lifted_heat",
    "spectral_lifted_fraclap",
]
