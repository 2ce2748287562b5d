import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fracheat.errors import DomainError
from fracheat.params import FracParams
from fracheat.testfn import (
    GridSpec,
    HypothesisWarning,
    even_extension,
    make_bump,
    make_even_gaussian,
    make_space_time_gaussian,
    resolve,
    resolve_space,
    sample,
    validate_hypotheses,
)

ZOO = ["gauss-a1-b1-t4", "egauss-a1-b1", "bump-R2-tc2-tw1", "gauss-a0.5-b2-t3"]


def test_gaussian_peak_and_bound():
    u = make_space_time_gaussian(1, 1.0, 1.0, 4.0)
    assert float(u([0.0], 4.0)) == 1.0
    assert u.sup_bound == 1.0


def test_gaussian_time_derivative_at_zero():
    u = make_space_time_gaussian(1, 1.0, 1.0, 4.0)
    _, ut, _ = u.generator_terms(np.zeros((1, 1)), np.zeros(1))
    assert float(ut[0]) == pytest.approx(8 * math.exp(-16), rel=1e-12)
    assert abs(float(ut[0])) < 1e-5


def test_bump_values():
    u = make_bump(1, 2.0, 2.0, 1.0)
    assert float(u([0.0], 2.0)) == pytest.approx(math.exp(-2), rel=1e-14)
    assert float(u([2.0], 2.0)) == 0.0
    assert float(u([1.0], 3.0)) == 0.0
    grid = GridSpec(3.0, 65, 4.0, 65)
    assert sample(u, grid).values.sum() > 0


def test_bump_rejects_support_touching_zero():
    with pytest.raises(DomainError):
        make_bump(1, 2.0, 1.0, 1.0)


def test_even_extension():
    u = make_space_time_gaussian(1, 1.0, 1.0, 4.0)
    ue = even_extension(u)
    x = np.linspace(-3, 3, 13)[:, None]
    assert np.array_equal(ue(x, -2.0), u(x, 2.0))
    assert np.array_equal(ue(x, 0.0), u(x, 0.0))
    ts = np.linspace(-6, 6, 25)
    X, T = np.meshgrid(x[:, 0], ts, indexing="ij")
    assert np.max(np.abs(ue(X[..., None], T) - ue(X[..., None], -T))) == 0.0
    twice = even_extension(ue)
    assert np.array_equal(twice(X[..., None], T), ue(X[..., None], T))


@pytest.mark.parametrize("fn_id", ZOO)
@pytest.mark.parametrize("d", [1, 2])
def test_sup_bound_holds_at_random_points(fn_id, d):
    u = resolve(fn_id, d)
    rng = np.random.default_rng(3)
    x = rng.normal(scale=2.0, size=(10_000, d))
    t = rng.uniform(0.0, 8.0, 10_000)
    assert np.all(np.abs(u(x, t)) <= u.sup_bound * (1 + 1e-12))


@given(st.floats(min_value=2.0001, max_value=50.0), st.floats(min_value=0.0, max_value=2 * math.pi))
def test_bump_vanishes_outside_support(r, angle):
    u = resolve("bump-R2-tc2-tw1", 2)
    x = np.array([[r * math.cos(angle), r * math.sin(angle)]])
    assert float(u(x, 2.0)[0]) == 0.0


def test_unknown_ids_raise():
    with pytest.raises(DomainError):
        resolve("sinc-a1", 1)
    with pytest.raises(DomainError):
        resolve_space("pair-a1", 2)


def test_resolve_keeps_id_as_name():
    assert resolve("bump-R2-tc2-tw1", 2).name == "bump-R2-tc2-tw1"
    assert resolve_space("gauss-a1", 3).n == 3


def test_validation_examples():
    u = resolve("gauss-a1-b1-t4", 1)
    assert validate_hypotheses(u, FracParams(s=0.5, eta=0.9, d=1), "thm1").passed
    assert not validate_hypotheses(u, FracParams(s=0.5, eta=1.0, d=1), "thm1").passed
    assert not validate_hypotheses(u, FracParams(s=0.25, eta=0.5, d=1), "thm1").passed
    bump = resolve("bump-R2-tc2-tw1", 1)
    report = validate_hypotheses(bump, FracParams(s=0.5, eta=0.6, d=1), "thm2")
    assert not report.passed
    assert any("d-2eta" in f for f in report.failures)


def test_validation_warns_on_negative_eta_moments():
    bump = resolve("bump-R2-tc2-tw1", 1)
    with pytest.warns(HypothesisWarning):
        report = validate_hypotheses(bump, FracParams(s=0.5, eta=-0.3, p=2.0, d=1), "thm2")
    assert report.passed
    assert report.warnings


def test_even_gaussian_is_even():
    u = make_even_gaussian(1, 1.0, 2.0)
    assert u.even
    assert float(u([0.3], -0.7)) == float(u([0.3], 0.7))
