import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from fracheat.errors import DomainError
from fracheat.fracbackheat import fbh_subordination
from fracheat.lifting import (
    ConvergenceRow,
    ConvergenceTable,
    LiftParams,
    boundary_gn,
    boundary_limit,
    convergence_study,
    direct_lifted_heat,
    empirical_order,
    gn_evaluate,
    lift_kernel,
    printed_kernel,
    split_integrals,
    vn_evaluate,
    vn_pde_residual,
)
from fracheat.testfn import resolve

U = "gauss-a1-b1-t4"


@pytest.mark.parametrize("N", [2, 3, 8, 64, 512])
@pytest.mark.parametrize("t,tau", [(0.5, 0.2), (2.0, 1.0), (4.0, 3.0)])
def test_kernel_is_scaled_noncentral_chi_square(N, t, tau):
    # p = |y|^2 / 2N with y Gaussian of variance 2 tau around a point at squared distance 2 N t,
    # so N p / tau is noncentral chi-square with N degrees of freedom and noncentrality N t / tau
    mp.mp.dps = 40
    lam, nu = mp.mpf(N) / (2 * tau), mp.mpf(N) / 2 - 1
    p = np.linspace(0.05, 3 * (t + tau), 25)
    ref = [float(lam * mp.exp(-lam * (mp.mpf(q) + t)) * (mp.mpf(q) / t) ** (nu / 2) * mp.besseli(nu, 2 * lam * mp.sqrt(mp.mpf(q) * t))) for q in p]
    assert np.allclose(lift_kernel(p, t, tau, N), ref, rtol=1e-9, atol=0)
    if N <= 64:
        assert np.allclose(ref, (N / tau) * stats.ncx2.pdf(N * p / tau, N, N * t / tau), rtol=1e-6, atol=1e-200)


@settings(max_examples=25)
@given(st.integers(min_value=2, max_value=1024), st.floats(min_value=0.0, max_value=6.0), st.floats(min_value=0.05, max_value=5.0))
def test_kernel_has_unit_mass(N, t, tau):
    lo, hi = 0.0, t + tau + 40 * math.sqrt(tau * (tau + 2 * t) / N) + 40 * tau / N
    mass, _ = integrate.quad(lambda p: float(lift_kernel(p, t, tau, N)), lo, hi, points=[t + tau], limit=400)
    assert mass == pytest.approx(1.0, abs=1e-7)


def test_printed_kernel_differs():
    p = np.linspace(0.1, 6, 30)
    a = lift_kernel(p, 2.0, 1.0, 4)
    b = printed_kernel(p, 2.0, 1.0, 4)
    assert np.max(np.abs(a - b)) > 1e-3


@pytest.mark.parametrize("x,t,tau", [(0.0, 1.0, 0.5), (0.8, 3.0, 1.2), (-1.5, 5.0, 0.2)])
def test_vn_matches_direct_quadrature(x, t, tau):
    u = resolve(U, 1)
    got = float(vn_evaluate(u, LiftParams(2, 1, 0.5), x, t, tau).value)
    assert got == pytest.approx(direct_lifted_heat(u, 2, x, t, tau), abs=1e-10)


@pytest.mark.parametrize("x,tau", [(0.0, 1.0), (0.5, 2.0), (0.3, 4.0), (1.2, 5.0)])
def test_boundary_function_against_gamma_expectation(x, tau):
    u = resolve(U, 1)
    N = 512
    k = N / 2
    g = lambda s: math.exp(-((s - 4.0) ** 2))  # noqa: E731
    mean_g = integrate.quad(lambda a: stats.gamma.pdf(a, k, scale=1 / k) * g(a * tau), 0, 3, points=[1], limit=200, epsabs=1e-14)[0]
    heat = math.sqrt(1 / (1 + 4 * tau)) * math.exp(-x * x / (1 + 4 * tau))
    assert float(boundary_gn(u, N, x, tau)) == pytest.approx(heat * mean_g, abs=1e-12)
    assert float(boundary_limit(u, x, tau)) == pytest.approx(heat * g(tau), abs=1e-12)


def test_split_pieces_add_up():
    u = resolve(U, 1)
    x, tau, N = 0.3, 2.0, 128
    sp = split_integrals(u, N, x, tau)
    space = math.exp(-x * x)
    # without the spatial heat flow the pieces integrate u(x, a tau) - u(x, tau) against the Gamma density
    k = N / 2
    ref = integrate.quad(
        lambda a: stats.gamma.pdf(a, k, scale=1 / k) * (math.exp(-((a * tau - 4) ** 2)) - math.exp(-((tau - 4) ** 2))) * space,
        0, 4, points=[0.8, 1.2], limit=400, epsabs=1e-14,
    )[0]
    assert sp.inner + sp.lower + sp.upper == pytest.approx(ref, abs=1e-10)
    assert 0 < sp.lower_mass < 1 and 0 < sp.upper_mass < 1


def test_gn_matches_backward_operator_for_large_n():
    u = resolve(U, 1)
    limit = float(fbh_subordination(u, 0.5, 0.3, 2.0).value)
    errs = [abs(float(gn_evaluate(u, LiftParams(N, 1, 0.5), 0.3, 2.0).value) - limit) for N in (8, 64, 512)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 1e-2


def test_convergence_table_outputs():
    u = resolve(U, 1)
    table = convergence_study(u, 0.5, (8, 32), [(0.0, 1.0), (0.5, 2.0)])
    csv = table.to_csv().splitlines()
    assert csv[0] == "N,x,t,G_N,limit,abs_err"
    assert len(csv) == 5
    assert table.monotone(1e-6)
    assert table.order > 0


def test_convergence_table_validation():
    with pytest.raises(DomainError):
        ConvergenceTable([ConvergenceRow(32, 0, 1, 0, 0, 0), ConvergenceRow(8, 0, 1, 0, 0, 0)])
    with pytest.raises(DomainError):
        convergence_study(resolve(U, 1), 0.5, (32, 8), [(0.0, 1.0)])


def test_empirical_order():
    assert empirical_order([8, 32, 128], [1.0, 0.25, 0.0625]) == pytest.approx(1.0)
    assert math.isnan(empirical_order([8, 32], [1.0, 0.0]))


def test_lift_params_validation():
    for bad in (dict(N=1), dict(N=2048), dict(N=2.5), dict(N=4, s=1.0), dict(N=4, d=0)):
        with pytest.raises(DomainError):
            LiftParams(**bad)


def test_pde_residual_prefers_two_t_over_n():
    u = resolve(U, 1)
    probes = [(0.2, 2.0, 0.5), (-0.7, 3.5, 1.0)]
    params = LiftParams(8, 1, 0.5)
    good = vn_pde_residual(u, params, probes)
    other = vn_pde_residual(u, params, probes, coefficient=1.0)
    assert good <= 1e-4
    assert other > 100 * good


def test_vn_rejects_negative_time():
    with pytest.raises(DomainError):
        vn_evaluate(resolve(U, 1), LiftParams(4), 0.0, -1.0, 1.0)
