import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from fracheat.errors import DomainError
from fracheat.semigroup import (
    backward_heat_apply,
    backward_heat_residual,
    balakrishnan,
    characteristics_residual,
    heat_apply,
    heat_flowed,
)
from fracheat.testfn import (
    make_separable,
    resolve,
    resolve_space,
    space_constant,
    space_gaussian,
    time_constant,
    time_gaussian,
)

SPACE_ZOO = ["gauss-a1", "gauss-a0.3", "pair-a1", "bump-R2", "bump-R1", "d2gauss-a1"]


@pytest.mark.parametrize("a", [0.25, 1.0, 4.0])
@pytest.mark.parametrize("method", ["closed_form", "gauss_hermite_convolution", "windowed"])
def test_gaussian_heat_closed_form(a, method):
    # exp(-x^2/4a) flows to sqrt(a/(a+tau)) exp(-x^2/4(a+tau))
    f = space_gaussian(1, 1.0 / (4 * a))
    x = np.linspace(-4, 4, 17)
    for tau in (0.01, 0.5, 3.0):
        exact = math.sqrt(a / (a + tau)) * np.exp(-(x**2) / (4 * (a + tau)))
        assert np.max(np.abs(heat_apply(f, tau, x, method=method) - exact)) <= 1e-9


def test_constant_is_invariant():
    f = space_constant(1, 2.5)
    assert np.allclose(heat_apply(f, 7.0, np.linspace(-5, 5, 11)), 2.5, rtol=0, atol=1e-14)


@pytest.mark.parametrize("fn_id", SPACE_ZOO)
def test_maximum_principle(fn_id):
    f = resolve_space(fn_id, 1)
    x = np.linspace(-6, 6, 121)
    sup_f = np.max(np.abs(f(x[:, None])))
    for tau in (0.05, 0.7, 5.0):
        assert np.max(np.abs(heat_apply(f, tau, x))) <= sup_f + 1e-9


@pytest.mark.parametrize("fn_id", ["gauss-a1", "pair-a1", "bump-R2", "d2gauss-a1"])
def test_semigroup_property(fn_id):
    f = resolve_space(fn_id, 1)
    x = np.linspace(-3, 3, 13)
    t1, t2 = 0.3, 0.8
    once = heat_apply(f, t1 + t2, x)
    twice = heat_apply(heat_flowed(f, t1), t2, x)
    assert np.max(np.abs(once - twice)) <= 2e-9


def test_small_tau_recovers_input():
    f = resolve_space("bump-R2", 1)
    x = np.linspace(-2.5, 2.5, 21)
    errs = [np.max(np.abs(heat_apply(f, tau, x) - f(x[:, None]))) for tau in (1e-2, 1e-3, 1e-4)]
    assert errs[0] > errs[1] > errs[2]


def test_radial_bump_in_two_dimensions_matches_cartesian_quadrature():
    f = resolve_space("bump-R2", 2)
    tau = 0.4
    x0 = np.array([0.7, -0.2])

    def integrand(y1, y2):
        k = math.exp(-((x0[0] - y1) ** 2 + (x0[1] - y2) ** 2) / (4 * tau)) / (4 * math.pi * tau)
        return k * float(f(np.array([[y1, y2]]))[0])

    ref, _ = integrate.dblquad(integrand, -2, 2, lambda y: -math.sqrt(max(4 - y * y, 0)), lambda y: math.sqrt(max(4 - y * y, 0)), epsabs=1e-12)
    assert float(heat_apply(f, tau, x0[None])[0]) == pytest.approx(ref, abs=1e-8)


def test_heat_apply_rejects_nonpositive_time():
    with pytest.raises(DomainError):
        heat_apply(space_gaussian(1), 0.0, [0.0])


def test_backward_reductions():
    x = np.linspace(-2, 2, 5)
    w = resolve_space("pair-a1", 1)
    g = time_gaussian(1.0, 4.0)
    u_space = make_separable(w, time_constant(1.0))
    assert np.allclose(backward_heat_apply(u_space, 0.6, x, 1.0), heat_apply(w, 0.6, x), atol=1e-14)
    u_time = make_separable(space_constant(1), g)
    assert np.allclose(backward_heat_apply(u_time, 0.6, x, 1.0), g(1.6), atol=1e-14)


def test_backward_gaussian_against_tensor_quadrature():
    u = resolve("gauss-a1-b1-t4", 1)
    x, t, tau = 0.0, 1.0, 0.5

    def integrand(y):
        return math.exp(-((x - y) ** 2) / (4 * tau)) / math.sqrt(4 * math.pi * tau) * float(u(np.array([[y]]), t + tau)[0])

    ref, _ = integrate.quad(integrand, -30, 30, epsabs=1e-15, epsrel=1e-13, limit=200)
    assert float(backward_heat_apply(u, tau, np.array([[x]]), t)[0]) == pytest.approx(ref, abs=1e-8)


def test_pde_residuals_on_interior_points():
    u = resolve("gauss-a1-b1-t4", 1)
    probes = [(0.2, 2.0, 0.5), (-0.7, 3.5, 1.0), (1.0, 4.0, 0.3)]
    assert backward_heat_residual(u, probes) <= 1e-4
    assert characteristics_residual(u, 5.0, [(0.2, 1.0), (-0.5, 2.5), (1.0, 4.0)]) <= 1e-4


@settings(max_examples=15)
@given(st.floats(min_value=0.05, max_value=0.95), st.floats(min_value=0.1, max_value=5.0))
def test_balakrishnan_on_scalar_exponential(s, lam):
    # S_tau = e^{-lam tau} on the constant 1, so the fractional power is lam^s
    res = balakrishnan(
        lambda taus: np.expm1(-lam * taus),
        s,
        generator=np.asarray(-lam),
        scale=1.0 / math.sqrt(lam),
        current=1.0,
        tol=1e-12,
    )
    assert float(res.value) == pytest.approx(lam**s, rel=1e-8)
