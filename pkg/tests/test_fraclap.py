import math
import warnings
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from fracheat.errors import AliasingError, DomainError
from fracheat.fraclap import (
    DivergenceWarning,
    fraclap,
    fraclap_fourier,
    fraclap_fourier_at,
    fraclap_pv,
    fraclap_subordination,
    radiality_check,
    random_rotations,
    riesz_potential,
)
from fracheat.testfn import (
    PeriodicGrid,
    make_separable,
    resolve,
    resolve_space,
    sample_space,
    space_constant,
    space_cosine,
    time_constant,
)

S_VALUES = [0.25, 0.5, 0.75]


def gauss_oracle(s, x):
    # inverse transform of |xi|^{2s} sqrt(pi) e^{-xi^2/4}, the multiplier applied to e^{-x^2}
    f = lambda k: k ** (2 * s) * math.sqrt(math.pi) * math.exp(-k * k / 4) * math.cos(k * x) / math.pi  # noqa: E731
    return integrate.quad(f, 0, 40, epsabs=1e-13, epsrel=1e-12, limit=400)[0]


def test_gaussian_at_origin_closed_form():
    f = resolve_space("gauss-a1", 1)
    assert gauss_oracle(0.5, 0.0) == pytest.approx(2 / math.sqrt(math.pi), rel=1e-12)
    for method in ("fourier", "subordination", "pv_integral"):
        assert float(fraclap(f, 0.5, 0.0, method=method).value) == pytest.approx(1.1283791670955126, rel=1e-6)


@pytest.mark.parametrize("s", S_VALUES)
@pytest.mark.parametrize("method", ["fourier", "subordination", "pv_integral"])
def test_gaussian_against_transform_quadrature(s, method):
    f = resolve_space("gauss-a1", 1)
    xs = np.array([0.0, 0.5, 1.3, 2.7, 4.0])
    got = np.atleast_1d(fraclap(f, s, xs, method=method).value)
    ref = np.array([gauss_oracle(s, x) for x in xs])
    assert np.max(np.abs(got - ref)) <= 1e-6


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75, 1.0])
def test_fourier_cosine_eigenfunction(s):
    grid = PeriodicGrid.cube(1, math.pi, 64)
    k = 3.0
    field = sample_space(space_cosine(k), grid)
    out = fraclap_fourier(field, s, require_decay=False)
    x = grid.mesh()[..., 0]
    assert np.max(np.abs(out.values - k ** (2 * s) * np.cos(k * x))) <= 1e-10


@pytest.mark.parametrize("s", S_VALUES)
def test_subordination_cosine(s):
    k = 1.7
    x = np.linspace(-2, 2, 9)
    got = np.atleast_1d(fraclap_subordination(space_cosine(k), s, x).value)
    assert np.max(np.abs(got - k ** (2 * s) * np.cos(k * x))) <= 1e-8


@pytest.mark.parametrize("method", ["subordination", "pv_integral"])
def test_constants_map_to_zero(method):
    got = np.atleast_1d(fraclap(space_constant(1, 3.0), 0.5, np.linspace(-2, 2, 5), method=method).value)
    assert np.max(np.abs(got)) <= 1e-10


def test_pv_even_function_symmetrization():
    f = resolve_space("gauss-a1", 1)
    s = 0.5
    c = 4**s * math.gamma(0.5 + s) / (math.sqrt(math.pi) * abs(math.gamma(-s)))
    # one-sided integral of 2 f(0) - 2 f(z) over z > 0, doubled by symmetry
    one_sided = integrate.quad(lambda z: (2 - 2 * math.exp(-z * z)) * z ** (-1 - 2 * s), 0, np.inf, limit=400)[0]
    assert float(fraclap_pv(f, s, 0.0).value) == pytest.approx(c * one_sided, rel=1e-7)


def test_fourier_rejects_undecayed_data():
    grid = PeriodicGrid.cube(1, 2.0, 64)
    with pytest.raises(AliasingError):
        fraclap_fourier(sample_space(resolve_space("gauss-a0.1", 1), grid), 0.5)


def test_order_out_of_range():
    f = resolve_space("gauss-a1", 1)
    with pytest.raises(DomainError):
        fraclap_subordination(f, 1.2, 0.0)
    with pytest.raises(DomainError):
        fraclap_pv(f, 0.0, 0.0)


@pytest.mark.parametrize("fn_id", ["gauss-a1", "pair-a1", "bump-R2", "d2gauss-a1"])
@pytest.mark.parametrize("s", S_VALUES)
def test_three_definitions_agree(fn_id, s):
    f = resolve_space(fn_id, 1)
    x = np.linspace(-3, 3, 20)
    vals = {m: np.atleast_1d(fraclap(f, s, x, method=m).value) for m in ("fourier", "subordination", "pv_integral")}
    scale = max(np.max(np.abs(v)) for v in vals.values())
    for a, b in (("fourier", "subordination"), ("fourier", "pv_integral"), ("subordination", "pv_integral")):
        assert np.max(np.abs(vals[a] - vals[b])) <= 1e-3 * scale


@pytest.mark.parametrize("s", S_VALUES)
def test_power_law_decay(s):
    f = resolve_space("gauss-a1", 1)
    r = np.linspace(5, 10, 11)
    scaled = np.abs(np.atleast_1d(fraclap_subordination(f, s, r).value)) * r ** (1 + 2 * s)
    assert np.max(scaled) <= 2 * np.min(scaled)


@pytest.mark.parametrize("lam", [0.5, 2.0])
@pytest.mark.parametrize("s", S_VALUES)
def test_homogeneity(lam, s):
    f = resolve_space("pair-a1", 1)
    x = np.linspace(-2, 2, 9)
    lhs = np.atleast_1d(fraclap_subordination(f.dilated(lam), s, x).value)
    rhs = lam ** (2 * s) * np.atleast_1d(fraclap_subordination(f, s, lam * x).value)
    assert np.max(np.abs(lhs - rhs)) <= 1e-3 * np.max(np.abs(rhs))


@settings(max_examples=20)
@given(st.floats(min_value=-5, max_value=5), st.sampled_from(S_VALUES))
def test_linearity(alpha, s):
    f = resolve_space("bump-R2", 1)
    x = np.array([0.0, 0.9, 2.5])
    a = np.atleast_1d(fraclap_subordination(f.scaled(alpha), s, x).value)
    b = alpha * np.atleast_1d(fraclap_subordination(f, s, x).value)
    # adaptive refinement depends on the amplitude, so agreement is at the quadrature tolerance
    assert np.allclose(a, b, rtol=1e-8, atol=1e-12)


@pytest.mark.parametrize("s", [0.25, 0.4])
def test_riesz_cosine(s):
    k = 1.3
    x = np.linspace(-2, 2, 5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DivergenceWarning)
        got = np.atleast_1d(riesz_potential(space_cosine(k), s, x).value)
    assert np.max(np.abs(got - k ** (-2 * s) * np.cos(k * x))) <= 1e-6


def test_riesz_inverts_fraclap():
    f = resolve_space("d2gauss-a1", 1)
    s = 0.3
    x = np.linspace(-2, 2, 9)
    grid = PeriodicGrid.cube(1, 16.0, 4096)
    potential = riesz_potential(f, s, grid.mesh()[..., 0]).value
    field = sample_space(f, grid)
    # the potential decays only algebraically; its periodic images are below the tolerance here
    back = fraclap_fourier(replace(field, values=np.asarray(potential)), s, require_decay=False, correct_images=False)
    ref = f(x[:, None])
    got = np.interp(x, grid.mesh()[..., 0], back.values)
    assert np.max(np.abs(got - ref)) <= 1e-3


def test_riesz_linearity_and_mass_warning():
    f = resolve_space("d2gauss-a1", 1)
    x = np.array([0.0, 1.0])
    a = np.atleast_1d(riesz_potential(f.scaled(3.0), 0.3, x).value)
    b = 3.0 * np.atleast_1d(riesz_potential(f, 0.3, x).value)
    assert np.allclose(a, b, rtol=1e-14, atol=0)
    with pytest.warns(DivergenceWarning):
        riesz_potential(resolve_space("gauss-a1", 1), 0.3, x)


def test_rotations_preserve_norm():
    R = random_rotations(3, 10, seed=4)
    y = np.array([1.0, 2.0, -0.5])
    assert np.max(np.abs(np.linalg.norm(R @ y, axis=-1) - np.linalg.norm(y))) <= 1e-14


def test_radiality_of_lifted_gaussian():
    rep = radiality_check(resolve("gauss-a1-b1-t4", 1), 0.5, 2)
    assert rep.max_deviation <= 1e-4
    assert rep.max_norm_defect <= 1e-14


def test_radiality_of_time_independent_data():
    u = make_separable(resolve_space("gauss-a1", 1), time_constant(1.0))
    assert radiality_check(u, 0.5, 2, rotations=2, probes=((0.0, 1.0),)).max_deviation <= 1e-6
