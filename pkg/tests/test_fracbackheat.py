import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracheat.errors import DomainError
from fracheat.fracbackheat import (
    DivergenceWarning,
    backward_heat_multiplier,
    fbh_fourier,
    fbh_fourier_at,
    fbh_inverse,
    fbh_subordination,
    marchaud,
    principal_branch_min_real,
)
from fracheat.fraclap import fraclap_pv
from fracheat.testfn import (
    PeriodicGrid,
    SampledField,
    make_separable,
    resolve,
    resolve_space,
    space_constant,
    space_cosine,
    time_constant,
    time_exponential,
)

S_VALUES = [0.25, 0.5, 0.75]


def _mode_field(k, omega, points=32):
    grid = PeriodicGrid.cube(2, math.pi, points)
    mesh = grid.mesh()
    values = np.cos(k * mesh[..., 0]) * np.cos(omega * mesh[..., 1])
    return SampledField(grid, values, grid.axes())


@pytest.mark.parametrize("s", S_VALUES)
@pytest.mark.parametrize("k,omega", [(2.0, 0.0), (1.0, 3.0), (3.0, 5.0)])
def test_fourier_mode_multiplier(s, k, omega):
    field = _mode_field(k, omega)
    out = fbh_fourier(field, s, require_decay=False)
    x, t = np.meshgrid(out.axes[0], out.axes[1], indexing="ij")
    # cos(omega t) is the sum of two exponentials, one per sign of omega
    expected = np.cos(k * x) * np.real((k * k - 1j * omega) ** s * np.exp(1j * omega * t))
    assert np.max(np.abs(out.values - expected)) <= 1e-10


@pytest.mark.parametrize("s", S_VALUES)
def test_principal_branch_has_positive_real_part(s):
    grid = PeriodicGrid.cube(2, 8.0, 64)
    assert principal_branch_min_real(grid, s) > 0
    m = backward_heat_multiplier(grid, s)
    assert m.flat[0] == 0


@pytest.mark.parametrize("fn_id", ["gauss-a1-b1-t4", "egauss-a1-b1", "bump-R2-tc2-tw1"])
@pytest.mark.parametrize("s", S_VALUES)
def test_fourier_and_subordination_agree(fn_id, s):
    u = resolve(fn_id, 1)
    rng = np.random.default_rng(11)
    x = rng.uniform(-3, 3, 20)
    t = rng.uniform(0, 6, 20)
    a = np.atleast_1d(fbh_fourier_at(u, s, x, t).value)
    b = np.atleast_1d(fbh_subordination(u, s, x, t).value)
    assert np.max(np.abs(a - b)) <= 1e-3 * np.max(np.abs(b))


def test_gaussian_probe_example():
    u = resolve("gauss-a1-b1-t4", 1)
    a = float(fbh_fourier_at(u, 0.5, 0.5, 4.0).value)
    b = float(fbh_subordination(u, 0.5, 0.5, 4.0).value)
    assert a == pytest.approx(b, rel=1e-3)


def test_constant_maps_to_zero():
    u = make_separable(space_constant(1, 2.0), time_constant(1.0))
    assert np.max(np.abs(fbh_subordination(u, 0.5, np.zeros(3), np.array([0.0, 1.0, 2.0])).value)) <= 1e-10


@pytest.mark.parametrize("s", S_VALUES)
def test_time_independent_reduces_to_fractional_laplacian(s):
    w = resolve_space("pair-a1", 1)
    u = make_separable(w, time_constant(1.0))
    x = np.linspace(-2, 2, 7)
    got = np.atleast_1d(fbh_subordination(u, s, x, np.full(7, 1.5)).value)
    ref = np.atleast_1d(fraclap_pv(w, s, x).value)
    assert np.max(np.abs(got - ref)) <= 1e-3 * np.max(np.abs(ref))


@pytest.mark.parametrize("s", S_VALUES)
def test_unit_exponential_in_time_is_fixed(s):
    u = make_separable(space_constant(1), time_exponential(1.0))
    t = np.array([0.0, 0.5, 2.0])
    assert np.allclose(fbh_subordination(u, s, np.zeros(3), t).value, np.exp(-t), rtol=0, atol=1e-9)


@pytest.mark.parametrize("lam", [0.5, 2.0])
@pytest.mark.parametrize("s", S_VALUES)
def test_marchaud_exponential(lam, s):
    t = np.linspace(0, 4, 9)
    got = np.atleast_1d(marchaud(time_exponential(lam), s, t).value)
    assert np.max(np.abs(got - lam**s * np.exp(-lam * t))) <= 1e-9


def test_marchaud_of_constant():
    assert np.max(np.abs(marchaud(time_constant(3.0), 0.4, np.array([0.0, 1.0])).value)) <= 1e-10


@pytest.mark.parametrize("s", [0.3, 0.7])
def test_inverse_on_cosine_mode(s):
    k = 1.5
    u = make_separable(space_cosine(k), time_exponential(1.0))
    x = np.linspace(-1, 1, 5)
    t = np.full(5, 0.7)
    got = np.atleast_1d(fbh_inverse(u, s, x, t).value)
    expected = (k * k + 1) ** (-s) * np.cos(k * x) * np.exp(-t)
    assert np.max(np.abs(got - expected)) <= 1e-8


def test_inverse_then_forward_recovers_mode():
    # on a mode both operators are scalar multiplications, so they compose to the identity
    k, s = 1.5, 0.4
    u = make_separable(space_cosine(k), time_exponential(1.0))
    x, t = np.linspace(-1, 1, 5), np.full(5, 0.7)
    inv = np.atleast_1d(fbh_inverse(u, s, x, t).value)
    fwd = np.atleast_1d(fbh_subordination(u, s, x, t).value)
    assert np.max(np.abs(inv * fwd / np.atleast_1d(u(x[:, None], t)) - np.atleast_1d(u(x[:, None], t)))) <= 1e-3


@settings(max_examples=10)
@given(st.floats(min_value=-4, max_value=4))
def test_inverse_linearity(alpha):
    w = space_cosine(1.0).scaled(alpha)
    u1 = make_separable(w, time_exponential(1.0))
    u0 = make_separable(space_cosine(1.0), time_exponential(1.0))
    x, t = np.array([0.2, 0.9]), np.array([0.3, 1.0])
    a = np.atleast_1d(fbh_inverse(u1, 0.5, x, t).value)
    b = alpha * np.atleast_1d(fbh_inverse(u0, 0.5, x, t).value)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-14)


def test_inverse_warns_on_slow_decay():
    u = make_separable(resolve_space("gauss-a1", 1), time_constant(1.0))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        fbh_inverse(u, 0.6, np.zeros(1), np.zeros(1))
    assert any(issubclass(w.category, DivergenceWarning) for w in caught)


def test_order_checks():
    u = resolve("gauss-a1-b1-t4", 1)
    with pytest.raises(DomainError):
        fbh_subordination(u, 1.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        fbh_subordination(u, 0.5, 0.0, -1.0)
