r"""Test functions, even extension in time, sampling grids and hypothesis checks.

Functions on :math:`\mathbb{R}^n` take points as arrays whose last axis has
length ``n``; in one dimension plain scalars and 1-D arrays are accepted too
(see :func:`as_points`). Every function in the zoo is a product
``w(x) * g(t)`` of a :class:`SpaceFunction` and a :class:`TimeFunction`, and
carries the closed forms (heat flow, Laplacian, time derivatives) that the
operator quadratures use when they are available.

Instances are nameable by id strings such as ``"gauss-a1-b1-t4"`` or
``"bump-R2-tc2-tw1"``; see :func:`resolve`.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Literal, Sequence

import numpy as np

from .errors import DomainError
from .params import FracParams, Theorem
from .quadrature import gauss_legendre
from .specfun import sphere_area

DecayClass = Literal["schwartz", "compact_support", "bounded"]

#: Largest admissible :math:`|\partial_t u(\cdot,0)|` before the even extension is flagged.
SMOOTHNESS_TOL = 1e-5
#: Highest order of lifted-data moments inspected for negative weight exponents.
MOMENT_CHECK_ORDER = 4

# exp(-_GAUSS_CUTOFF) is below double precision relative to the peak.
_GAUSS_CUTOFF = 40.0


class SmoothnessWarning(UserWarning):
    """The even extension in time has a visible kink at ``t = 0``."""


class HypothesisWarning(UserWarning):
    """A theorem hypothesis could not be confirmed numerically."""


def as_points(x, n: int) -> np.ndarray:
    """Coerce ``x`` to an array of points with trailing axis ``n``."""
    arr = np.asarray(x, dtype=float)
    if n == 1 and (arr.ndim == 0 or arr.shape[-1] != 1):
        return arr[..., None]
    if arr.ndim == 0 or arr.shape[-1] != n:
        raise DomainError(f"expected points with trailing axis {n}, got shape {arr.shape}")
    return arr


def _norm2(x: np.ndarray) -> np.ndarray:
    return np.sum(x * x, axis=-1)


# ---------------------------------------------------------------------------
# Space factors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpaceFunction:
    r"""A bounded function on :math:`\mathbb{R}^n` plus what the quadratures need to know.

    ``support_radius`` is the radius outside which ``|f|`` is below double
    precision relative to ``sup_bound`` (infinite for non-decaying data).
    ``heat(x, tau)`` is :math:`e^{\tau\Delta} f(x)` in closed form,
    ``mean_value`` the limit of the heat flow as :math:`\tau\to\infty` for
    non-integrable data, ``profile`` the radial profile when ``f`` is radial.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    n: int
    sup_bound: float
    length_scale: float
    support_radius: float
    decay_class: DecayClass
    name: str = ""
    profile: Callable[[np.ndarray], np.ndarray] | None = None
    heat: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    laplacian: Callable[[np.ndarray], np.ndarray] | None = None
    mass: float | None = None
    mean_value: float | None = None

    def __call__(self, x) -> np.ndarray:
        return self.fn(as_points(x, self.n))

    @property
    def decays(self) -> bool:
        return math.isfinite(self.support_radius)

    def scaled(self, factor: float) -> SpaceFunction:
        """``factor * f`` with all metadata adjusted."""
        c = float(factor)

        def mul(g):
            return None if g is None else (lambda *a: c * g(*a))

        return replace(
            self,
            fn=lambda x: c * self.fn(x),
            sup_bound=abs(c) * self.sup_bound,
            name=f"{c:g}*{self.name}",
            profile=mul(self.profile),
            heat=mul(self.heat),
            laplacian=mul(self.laplacian),
            mass=None if self.mass is None else c * self.mass,
            mean_value=None if self.mean_value is None else c * self.mean_value,
        )

    def dilated(self, lam: float) -> SpaceFunction:
        r""":math:`x \mapsto f(\lambda x)`."""
        lam = float(lam)
        if lam <= 0:
            raise DomainError("dilation factor must be positive")

        def heat(x, tau):
            return self.heat(lam * x, lam * lam * np.asarray(tau))

        return replace(
            self,
            fn=lambda x: self.fn(lam * x),
            length_scale=self.length_scale / lam,
            support_radius=self.support_radius / lam,
            name=f"{self.name}@{lam:g}",
            profile=None if self.profile is None else (lambda r: self.profile(lam * r)),
            heat=None if self.heat is None else heat,
            laplacian=None if self.laplacian is None else (lambda x: lam**2 * self.laplacian(lam * x)),
            mass=None if self.mass is None else self.mass / lam**self.n,
        )


def gaussian_mixture(n: int, components: Sequence[tuple[float, float, Sequence[float] | float]], name: str = "") -> SpaceFunction:
    r"""Sum of :math:`A_k e^{-a_k|x-c_k|^2}` for ``components = [(A_k, a_k, c_k), ...]``."""
    comps = []
    for amp, a, c in components:
        if a <= 0:
            raise DomainError("Gaussian rate must be positive")
        comps.append((float(amp), float(a), np.broadcast_to(np.asarray(c, dtype=float), (n,)).copy()))

    def fn(x):
        return sum(A * np.exp(-a * _norm2(x - c)) for A, a, c in comps)

    def heat(x, tau):
        tau = np.asarray(tau, dtype=float)
        out = 0.0
        for A, a, c in comps:
            q = 1.0 + 4.0 * a * tau
            out = out + A * q ** (-0.5 * n) * np.exp(-a * _norm2(x - c) / q)
        return out

    def laplacian(x):
        out = 0.0
        for A, a, c in comps:
            r2 = _norm2(x - c)
            out = out + A * np.exp(-a * r2) * (4.0 * a * a * r2 - 2.0 * a * n)
        return out

    radial = all(np.all(c == 0) for _, _, c in comps)
    profile = None
    if radial:
        def profile(r):
            r = np.asarray(r, dtype=float)
            return sum(A * np.exp(-a * r * r) for A, a, _ in comps)

    a_min = min(a for _, a, _ in comps)
    a_max = max(a for _, a, _ in comps)
    reach = max(float(np.linalg.norm(c)) for _, _, c in comps) + math.sqrt(_GAUSS_CUTOFF / a_min)
    return SpaceFunction(
        fn=fn,
        n=n,
        sup_bound=sum(abs(A) for A, _, _ in comps),
        length_scale=1.0 / math.sqrt(a_max),
        support_radius=reach,
        decay_class="schwartz",
        name=name,
        profile=profile,
        heat=heat,
        laplacian=laplacian,
        mass=sum(A * (math.pi / a) ** (0.5 * n) for A, a, _ in comps),
    )


def space_gaussian(n: int, a: float = 1.0) -> SpaceFunction:
    r""":math:`e^{-a|x|^2}`."""
    return gaussian_mixture(n, [(1.0, a, 0.0)], name=f"gauss-a{a:g}")


def gaussian_pair(a: float = 1.0) -> SpaceFunction:
    """Asymmetric 1-D sum of two Gaussians with different widths and heights."""
    return gaussian_mixture(1, [(1.0, a, 1.0), (0.5, 2.0 * a, -0.75)], name=f"pair-a{a:g}")


def gaussian_second_derivative(a: float = 1.0) -> SpaceFunction:
    r""":math:`\frac{d^2}{dx^2} e^{-a x^2}` in 1-D; it has zero mean."""

    def fn(x):
        x1 = x[..., 0]
        return np.exp(-a * x1 * x1) * (4 * a * a * x1 * x1 - 2 * a)

    def heat(x, tau):
        x1 = x[..., 0]
        q = 1.0 + 4.0 * a * np.asarray(tau, dtype=float)
        A = a / q
        return q**-0.5 * np.exp(-A * x1 * x1) * (4 * A * A * x1 * x1 - 2 * A)

    def laplacian(x):
        x2 = x[..., 0] ** 2
        return np.exp(-a * x2) * (16 * a**4 * x2 * x2 - 48 * a**3 * x2 + 12 * a * a)

    return SpaceFunction(
        fn=fn,
        n=1,
        sup_bound=2.0 * a,
        length_scale=1.0 / math.sqrt(a),
        support_radius=math.sqrt((_GAUSS_CUTOFF + 5.0) / a),
        decay_class="schwartz",
        name=f"d2gauss-a{a:g}",
        profile=lambda r: np.exp(-a * r * r) * (4 * a * a * r * r - 2 * a),
        heat=heat,
        laplacian=laplacian,
        mass=0.0,
    )


def _bump_profile(r, R):
    r"""``exp(-1/(1-(r/R)^2))`` inside the ball, zero outside."""
    r = np.asarray(r, dtype=float)
    q = 1.0 - (r / R) ** 2
    inside = q > 0
    safe = np.where(inside, q, 1.0)
    return np.where(inside, np.exp(-1.0 / safe), 0.0)


def _bump_derivatives(r, R):
    """Profile and its first two radial derivatives."""
    r = np.asarray(r, dtype=float)
    q = 1.0 - (r / R) ** 2
    inside = q > 0
    safe = np.where(inside, q, 1.0)
    phi = np.where(inside, np.exp(-1.0 / safe), 0.0)
    d1 = -2.0 * r / (R * R * safe * safe) * phi
    d2 = phi * (-(2.0 / R**2) * (1.0 / safe**2 + 4.0 * r * r / (R * R * safe**3)) + 4.0 * r * r / (R**4 * safe**4))
    return phi, np.where(inside, d1, 0.0), np.where(inside, d2, 0.0)


def space_bump(n: int, R: float = 2.0) -> SpaceFunction:
    r"""Radial bump :math:`\exp(-1/(1-|x|^2/R^2))` supported in the ball of radius ``R``."""
    if R <= 0:
        raise DomainError("bump radius must be positive")

    def laplacian(x):
        r = np.sqrt(_norm2(x))
        phi, d1, d2 = _bump_derivatives(r, R)
        q = 1.0 - (r / R) ** 2
        safe = np.where(q > 0, q, 1.0)
        # (n-1)/r * phi' with the 1/r cancelled analytically
        return d2 - (n - 1) * 2.0 * phi / (R * R * safe * safe)

    rule = gauss_legendre(0.0, R, 32, 8)
    mass = sphere_area(n) * float(rule.integrate(_bump_profile(rule.nodes, R) * rule.nodes ** (n - 1)))
    return SpaceFunction(
        fn=lambda x: _bump_profile(np.sqrt(_norm2(x)), R),
        n=n,
        sup_bound=math.exp(-1.0),
        length_scale=R / 4.0,
        support_radius=float(R),
        decay_class="compact_support",
        name=f"bump-R{R:g}",
        profile=lambda r: _bump_profile(r, R),
        laplacian=laplacian,
        mass=mass,
    )


def space_constant(n: int, c: float = 1.0) -> SpaceFunction:
    return SpaceFunction(
        fn=lambda x: np.full(x.shape[:-1], float(c)),
        n=n,
        sup_bound=abs(c),
        length_scale=1.0,
        support_radius=math.inf,
        decay_class="bounded",
        name=f"const{c:g}",
        profile=lambda r: np.full(np.shape(r), float(c)),
        heat=lambda x, tau: np.full(np.broadcast_shapes(x.shape[:-1], np.shape(tau)), float(c)),
        laplacian=lambda x: np.zeros(x.shape[:-1]),
        mean_value=float(c),
    )


def space_cosine(k: float, n: int = 1) -> SpaceFunction:
    r""":math:`\cos(k x_1)`."""
    k = float(k)
    return SpaceFunction(
        fn=lambda x: np.cos(k * x[..., 0]),
        n=n,
        sup_bound=1.0,
        length_scale=1.0 / max(abs(k), 1e-300),
        support_radius=math.inf,
        decay_class="bounded",
        name=f"cos-k{k:g}",
        heat=lambda x, tau: np.exp(-k * k * np.asarray(tau)) * np.cos(k * x[..., 0]),
        laplacian=lambda x: -k * k * np.cos(k * x[..., 0]),
        mean_value=0.0,
    )


# ---------------------------------------------------------------------------
# Time factors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TimeFunction:
    """A smooth bounded function of time with its first two derivatives.

    ``support`` is an interval outside which the function is negligible
    (``(-inf, inf)`` for data that does not decay). ``constant`` marks
    functions that do not depend on time at all.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    d1: Callable[[np.ndarray], np.ndarray]
    d2: Callable[[np.ndarray], np.ndarray]
    sup_bound: float
    support: tuple[float, float]
    name: str = ""
    length_scale: float = 1.0
    constant: bool = False
    compact: bool = False
    even: bool = False

    def __call__(self, t) -> np.ndarray:
        return self.fn(np.asarray(t, dtype=float))


def time_gaussian(b: float = 1.0, t0: float = 4.0) -> TimeFunction:
    r""":math:`e^{-b(t-t_0)^2}`."""
    if b <= 0:
        raise DomainError("time Gaussian rate must be positive")
    half = math.sqrt(_GAUSS_CUTOFF / b)

    def fn(t):
        return np.exp(-b * (t - t0) ** 2)

    return TimeFunction(
        fn=fn,
        d1=lambda t: -2.0 * b * (t - t0) * fn(t),
        d2=lambda t: (4.0 * b * b * (t - t0) ** 2 - 2.0 * b) * fn(t),
        sup_bound=1.0,
        support=(t0 - half, t0 + half),
        name=f"b{b:g}-t{t0:g}",
        length_scale=1.0 / math.sqrt(b),
        even=t0 == 0,
    )


def time_bump(t_center: float = 2.0, t_width: float = 1.0) -> TimeFunction:
    r""":math:`\exp(-1/(1-((t-t_c)/t_w)^2))` on :math:`|t-t_c|<t_w`."""
    if t_width <= 0:
        raise DomainError("time bump width must be positive")

    def derivs(t):
        return _bump_derivatives(np.asarray(t, dtype=float) - t_center, t_width)

    return TimeFunction(
        fn=lambda t: derivs(t)[0],
        d1=lambda t: derivs(t)[1],
        d2=lambda t: derivs(t)[2],
        sup_bound=math.exp(-1.0),
        support=(t_center - t_width, t_center + t_width),
        name=f"tc{t_center:g}-tw{t_width:g}",
        length_scale=t_width / 4.0,
        compact=True,
    )


def time_exponential(lam: float = 1.0) -> TimeFunction:
    r""":math:`e^{-\lambda t}`, bounded on :math:`t \ge 0`."""
    return TimeFunction(
        fn=lambda t: np.exp(-lam * t),
        d1=lambda t: -lam * np.exp(-lam * t),
        d2=lambda t: lam * lam * np.exp(-lam * t),
        sup_bound=1.0,
        support=(0.0, (_GAUSS_CUTOFF + 10.0) / lam),
        name=f"exp{lam:g}",
        length_scale=1.0 / lam,
    )


def time_constant(c: float = 1.0) -> TimeFunction:
    return TimeFunction(
        fn=lambda t: np.full(np.shape(t), float(c)),
        d1=lambda t: np.zeros(np.shape(t)),
        d2=lambda t: np.zeros(np.shape(t)),
        sup_bound=abs(c),
        support=(-math.inf, math.inf),
        name=f"const{c:g}",
        constant=True,
        even=True,
    )


# ---------------------------------------------------------------------------
# Space-time functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpaceTimeFunction:
    r"""A bounded function :math:`u(x,t)` on :math:`\mathbb{R}^d\times[0,\infty)`.

    ``eval(x, t)`` takes points ``x[..., d]`` and times broadcastable to
    ``x.shape[:-1]``. ``closed_form_heat(x, t, tau)`` returns the spatial heat
    flow of the slice ``u(., t)`` when it is known in closed form.
    """

    eval: Callable[[np.ndarray, np.ndarray], np.ndarray]
    d: int
    sup_bound: float
    decay_class: DecayClass
    support_radius: float | None = None
    closed_form_heat: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray] | None = None
    space: SpaceFunction | None = None
    time: TimeFunction | None = None
    name: str = ""
    even: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, x, t) -> np.ndarray:
        return self.eval(as_points(x, self.d), np.asarray(t, dtype=float))

    @property
    def separable(self) -> bool:
        return self.space is not None and self.time is not None

    def generator_terms(self, x, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        r""":math:`(\Delta_x u, \partial_t u, \partial_t^2 u)` at ``(x, t)``.

        Closed forms are used for separable data; otherwise central
        differences with step ``1e-3`` (relative to unit scale).
        """
        x = as_points(x, self.d)
        t = np.asarray(t, dtype=float)
        if self.separable:
            w, g = self.space, self.time
            wx = w.fn(x)
            lap = w.laplacian(x) if w.laplacian is not None else _fd_laplacian(w.fn, x, 1e-3 * w.length_scale)
            return lap * g.fn(t), wx * g.d1(t), wx * g.d2(t)
        h = 1e-3
        lap = _fd_laplacian(lambda y: self.eval(y, t), x, h)
        up, u0, um = self.eval(x, t + h), self.eval(x, t), self.eval(x, t - h)
        return lap, (up - um) / (2 * h), (up - 2 * u0 + um) / (h * h)


def _fd_laplacian(fn, x: np.ndarray, h: float) -> np.ndarray:
    out = -2.0 * x.shape[-1] * fn(x)
    for i in range(x.shape[-1]):
        e = np.zeros(x.shape[-1])
        e[i] = h
        out = out + fn(x + e) + fn(x - e)
    return out / (h * h)


def make_separable(space: SpaceFunction, time: TimeFunction, name: str | None = None) -> SpaceTimeFunction:
    r""":math:`u(x,t) = w(x)\,g(t)`."""

    def ev(x, t):
        return space.fn(x) * time.fn(t)

    heat = None
    if space.heat is not None:
        def heat(x, t, tau):
            return space.heat(x, tau) * time.fn(np.asarray(t) + np.asarray(tau))

    compact = space.decay_class == "compact_support" and time.compact
    radius = math.hypot(space.support_radius, max(abs(time.support[0]), abs(time.support[1]))) if compact else None
    return SpaceTimeFunction(
        eval=ev,
        d=space.n,
        sup_bound=space.sup_bound * time.sup_bound,
        decay_class="compact_support" if compact else ("schwartz" if space.decays else "bounded"),
        support_radius=radius,
        closed_form_heat=heat,
        space=space,
        time=time,
        name=name or f"{space.name}*{time.name}",
        even=time.even,
    )


def _check_smoothness(u: SpaceTimeFunction) -> float:
    """Largest sampled :math:`|\\partial_t u(x, 0)|`; warns above ``SMOOTHNESS_TOL``."""
    r = u.space.length_scale if u.space is not None else 1.0
    xs = np.linspace(-3 * r, 3 * r, 25)
    pts = np.zeros((xs.size, u.d))
    pts[:, 0] = xs
    _, ut, _ = u.generator_terms(pts, np.zeros(xs.size))
    worst = float(np.max(np.abs(ut)))
    if worst > SMOOTHNESS_TOL:
        warnings.warn(
            f"{u.name}: |d/dt u(., 0)| = {worst:.3g} exceeds {SMOOTHNESS_TOL:g}; "
            "the even extension in time has a kink at t = 0",
            SmoothnessWarning,
            stacklevel=3,
        )
    return worst


def make_space_time_gaussian(d: int, a: float = 1.0, b: float = 1.0, t0: float = 4.0) -> SpaceTimeFunction:
    r""":math:`e^{-a|x|^2} e^{-b(t-t_0)^2}`."""
    if not (a > 0 and b > 0 and t0 > 0):
        raise DomainError("make_space_time_gaussian requires a, b, t0 > 0")
    u = make_separable(space_gaussian(d, a), time_gaussian(b, t0), name=f"gauss-a{a:g}-b{b:g}-t{t0:g}")
    _check_smoothness(u)
    return u


def make_even_gaussian(d: int, a: float = 1.0, b: float = 1.0) -> SpaceTimeFunction:
    r""":math:`e^{-a|x|^2} e^{-b t^2}`, exactly even in time."""
    if not (a > 0 and b > 0):
        raise DomainError("make_even_gaussian requires a, b > 0")
    return make_separable(space_gaussian(d, a), time_gaussian(b, 0.0), name=f"egauss-a{a:g}-b{b:g}")


def make_bump(d: int, R: float = 2.0, t_center: float = 2.0, t_width: float = 1.0) -> SpaceTimeFunction:
    """Product of a radial bump in space and a bump in time; the peak value is ``e^-2``."""
    if not (R > 0 and t_width > 0 and t_center > 0):
        raise DomainError("make_bump requires R, t_center, t_width > 0")
    if t_center - t_width <= 0:
        raise DomainError(f"bump support [{t_center - t_width:g}, {t_center + t_width:g}] touches t = 0")
    return make_separable(space_bump(d, R), time_bump(t_center, t_width), name=f"bump-R{R:g}-tc{t_center:g}-tw{t_width:g}")


def even_extension(u: SpaceTimeFunction) -> SpaceTimeFunction:
    r""":math:`\tilde u(x,t) = u(x,|t|)` on all of :math:`\mathbb{R}^d\times\mathbb{R}`."""
    if u.even:
        return u
    inner = u.eval

    def ev(x, t):
        return inner(x, np.abs(t))

    time = None
    if u.time is not None:
        g = u.time
        time = replace(
            g,
            fn=lambda t: g.fn(np.abs(t)),
            d1=lambda t: np.sign(t) * g.d1(np.abs(t)),
            d2=lambda t: g.d2(np.abs(t)),
            support=(-max(abs(g.support[0]), abs(g.support[1])), max(abs(g.support[0]), abs(g.support[1]))),
            name=f"even({g.name})",
            even=True,
        )
    return replace(u, eval=ev, time=time, name=u.name, even=True, closed_form_heat=None)


# ---------------------------------------------------------------------------
# Id registry
# ---------------------------------------------------------------------------

_NUM = r"(\d+(?:\.\d+)?(?:e-?\d+)?)"
_SPACE_TIME_IDS = {
    re.compile(rf"gauss-a{_NUM}-b{_NUM}-t{_NUM}"): lambda d, a, b, t0: make_space_time_gaussian(d, a, b, t0),
    re.compile(rf"egauss-a{_NUM}-b{_NUM}"): lambda d, a, b: make_even_gaussian(d, a, b),
    re.compile(rf"bump-R{_NUM}-tc{_NUM}-tw{_NUM}"): lambda d, R, tc, tw: make_bump(d, R, tc, tw),
}
_SPACE_IDS = {
    re.compile(rf"gauss-a{_NUM}"): lambda n, a: space_gaussian(n, a),
    re.compile(rf"pair-a{_NUM}"): lambda n, a: _one_d_only(n, gaussian_pair(a)),
    re.compile(rf"bump-R{_NUM}"): lambda n, R: space_bump(n, R),
    re.compile(rf"d2gauss-a{_NUM}"): lambda n, a: _one_d_only(n, gaussian_second_derivative(a)),
}


def _one_d_only(n: int, f: SpaceFunction) -> SpaceFunction:
    if n != 1:
        raise DomainError(f"{f.name} is only defined in one dimension")
    return f


def resolve(fn_id: str, d: int = 1) -> SpaceTimeFunction:
    """Space-time zoo member named by ``fn_id`` in dimension ``d``."""
    for pat, make in _SPACE_TIME_IDS.items():
        m = pat.fullmatch(fn_id)
        if m:
            u = make(d, *map(float, m.groups()))
            return replace(u, name=fn_id)
    raise DomainError(f"unknown space-time function id {fn_id!r}")


def resolve_space(fn_id: str, n: int = 1) -> SpaceFunction:
    """Space-only zoo member named by ``fn_id`` in dimension ``n``."""
    for pat, make in _SPACE_IDS.items():
        m = pat.fullmatch(fn_id)
        if m:
            return replace(make(n, *map(float, m.groups())), name=fn_id)
    raise DomainError(f"unknown space function id {fn_id!r}")


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Tensor grid: uniform in each space coordinate, graded in time towards ``t = 0``."""

    x_extent: float
    x_points: int
    t_extent: float
    t_points: int
    t_grading: float = 2.0

    def __post_init__(self) -> None:
        if not (self.x_extent > 0 and self.t_extent > 0):
            raise DomainError("grid extents must be positive")
        if self.x_points < 8 or self.t_points < 8:
            raise DomainError("grids need at least 8 points per axis")
        if self.t_grading < 1:
            raise DomainError("time grading exponent must be >= 1")

    def x_axis(self) -> np.ndarray:
        return np.linspace(-self.x_extent, self.x_extent, self.x_points)

    def t_axis(self) -> np.ndarray:
        k = np.arange(self.t_points) / (self.t_points - 1)
        return self.t_extent * k**self.t_grading

    def axes(self, d: int) -> tuple[np.ndarray, ...]:
        return (self.x_axis(),) * d + (self.t_axis(),)

    @classmethod
    def default_for(cls, u: SpaceTimeFunction, points: int = 64) -> GridSpec:
        """Space extent of 8 length scales; time extent past the time support."""
        scale = u.space.length_scale if u.space is not None else 1.0
        t_hi = u.time.support[1] if u.time is not None and math.isfinite(u.time.support[1]) else 10.0
        return cls(8.0 * scale, points, max(t_hi, 1.0), points)


@dataclass(frozen=True)
class PeriodicGrid:
    r"""Uniform grid on the box :math:`\prod_i [-L_i, L_i)` for spectral transforms."""

    half_widths: tuple[float, ...]
    points: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.half_widths) != len(self.points):
            raise DomainError("half_widths and points must have the same length")
        if any(L <= 0 for L in self.half_widths) or any(m < 8 for m in self.points):
            raise DomainError("periodic grids need positive widths and >= 8 points per axis")

    @classmethod
    def cube(cls, dim: int, half_width: float, points: int) -> PeriodicGrid:
        return cls((float(half_width),) * dim, (int(points),) * dim)

    @property
    def dim(self) -> int:
        return len(self.points)

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(2.0 * L / m for L, m in zip(self.half_widths, self.points))

    def axes(self) -> tuple[np.ndarray, ...]:
        return tuple(-L + h * np.arange(m) for L, h, m in zip(self.half_widths, self.spacing, self.points))

    def frequencies(self) -> tuple[np.ndarray, ...]:
        """Angular frequencies matching :func:`numpy.fft.fftn` ordering."""
        return tuple(2.0 * np.pi * np.fft.fftfreq(m, h) for m, h in zip(self.points, self.spacing))

    def mesh(self) -> np.ndarray:
        """All grid points, shape ``points + (dim,)``."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)


@dataclass(frozen=True)
class SampledField:
    """Values of a function on a tensor grid, with the coordinate axes."""

    grid: GridSpec | PeriodicGrid
    values: np.ndarray
    axes: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        shape = tuple(a.size for a in self.axes)
        if self.values.shape != shape:
            raise DomainError(f"field shape {self.values.shape} does not match grid {shape}")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("sampled field contains non-finite values")

    @property
    def periodic(self) -> bool:
        return isinstance(self.grid, PeriodicGrid)


def sample(u: SpaceTimeFunction, grid: GridSpec) -> SampledField:
    """Evaluate ``u`` on the tensor grid ``grid`` (space axes first, time last)."""
    axes = grid.axes(u.d)
    mesh = np.meshgrid(*axes, indexing="ij")
    x = np.stack(mesh[:-1], axis=-1)
    return SampledField(grid, u.eval(x, mesh[-1]), axes)


def sample_space(f: SpaceFunction, grid: PeriodicGrid) -> SampledField:
    if grid.dim != f.n:
        raise DomainError(f"grid dimension {grid.dim} does not match function dimension {f.n}")
    return SampledField(grid, f.fn(grid.mesh()), grid.axes())


# ---------------------------------------------------------------------------
# Hypothesis validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    theorem: str
    failures: tuple[str, ...]
    warnings: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.passed


def lifted_moments(u: SpaceTimeFunction, N: int, order: int = MOMENT_CHECK_ORDER) -> dict[tuple[int, int], float]:
    r"""Radial moments :math:`\int\!\!\int |x|^k\, t^{(N-2)/2+m}\, u(x,t)\,dt\,dx` with ``k + 2m <= order``.

    Up to constant factors these are the moments
    :math:`\int |x|^k |y|^{2m} u(x, |y|^2/2N)\,dx\,dy` of the lifted data.
    Separable data only.
    """
    if not u.separable:
        raise DomainError("moment check needs separable data")
    w, g = u.space, u.time
    r_max = w.support_radius
    rr = gauss_legendre(0.0, r_max, 32, 16)
    lo, hi = max(g.support[0], 0.0), g.support[1]
    tt = gauss_legendre(lo, hi, 32, 16) if hi > max(lo, 1e-12) else None
    out = {}
    for k in range(order + 1):
        if w.profile is not None:
            xk = sphere_area(w.n) * rr.integrate(rr.nodes ** (k + w.n - 1) * w.profile(rr.nodes))
        else:
            xs = gauss_legendre(-r_max, r_max, 32, 32)
            xk = xs.integrate(np.abs(xs.nodes) ** k * w.fn(xs.nodes[:, None]))
        for m in range((order - k) // 2 + 1):
            tk = 0.0 if tt is None else tt.integrate(tt.nodes ** ((N - 2) / 2 + m) * g.fn(tt.nodes))
            out[(k, m)] = float(xk * tk)
    return out


def validate_hypotheses(u: SpaceTimeFunction, params: FracParams, theorem: Theorem, *, samples: int = 2000, seed: int = 0) -> ValidationReport:
    """Check parameter constraints and what can be checked about ``u``; never raises."""
    failures = list(params.violations(theorem))
    notes: list[str] = []
    rng = np.random.default_rng(seed)
    scale = u.space.length_scale if u.space is not None else 1.0
    x = rng.normal(scale=3 * scale, size=(samples, u.d))
    t = rng.exponential(scale=4.0, size=samples)
    vals = u.eval(x, t)
    if np.any(np.abs(vals) > u.sup_bound * (1 + 1e-12)):
        failures.append("sampled |u| exceeds sup_bound")
    if u.separable and not u.time.constant:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SmoothnessWarning)
            kink = _check_smoothness(u)
        if kink > SMOOTHNESS_TOL:
            notes.append(f"|d/dt u(., 0)| = {kink:.3g} > {SMOOTHNESS_TOL:g}")
    if theorem == "thm2" and u.decay_class != "compact_support":
        notes.append("u is not compactly supported")
    if theorem in ("thm1", "thm2") and params.eta <= 0:
        if u.separable and u.space.decays:
            N = params.N or 2
            moments = lifted_moments(u, N)
            ref = max(abs(v) for v in moments.values()) or 1.0
            nonzero = [km for km, v in moments.items() if abs(v) > 1e-8 * max(ref, u.sup_bound)]
            if nonzero:
                notes.append(f"eta <= 0 and lifted moments {sorted(nonzero)} do not vanish")
        else:
            notes.append("eta <= 0 and moments could not be checked")
    for msg in notes:
        warnings.warn(f"{u.name}: {msg}", HypothesisWarning, stacklevel=2)
    return ValidationReport(theorem, tuple(failures), tuple(notes))
