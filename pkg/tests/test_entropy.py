"""
Entropy closed forms, C_d(alpha), covariance bounds and the Cauchy scale matrix.
"""
import math

import numpy as np
import pytest

from src.core.covariance import covariance_lyapunov
from src.core.entropy import (c_d_alpha, cauchy_scale_from_coefficients, cauchy_scale_matrix, model_entropy,
                              model_upper_bound, renyi_cauchy, renyi_gaussian, renyi_upper_bound,
                              shannon_upper_bound)
from src.core.model import build_model
from src.reproduce.reference_examples import PUBLISHED, published_coefficients
from src.utils.errors import ClosedFormUnavailableError, DomainError, NoFiniteCovarianceError
from tests.conftest import scalar_spec, series_phi0


def _random_spd(rng, d):
    w = rng.standard_normal((d, d))
    return w @ w.T / d + 0.5 * np.eye(d)


def test_c_d_alpha_values():
    assert c_d_alpha(3, 1.0) == pytest.approx(1.5 * math.log(2 * math.pi * math.e), abs=1e-12)
    assert c_d_alpha(3, 1.0) == pytest.approx(4.2568, abs=1e-4)
    expected = 0.5 * math.log(5 * math.pi) + math.log(1.25) + math.lgamma(2.0) - math.lgamma(2.5)
    assert c_d_alpha(1, 2.0) == pytest.approx(expected, abs=1e-12)
    assert c_d_alpha(1, 2.0) == pytest.approx(1.3153, abs=1e-3)


@pytest.mark.parametrize("d,alpha", [(1, 0.25), (1, 1.0 / 3.0), (3, 0.5), (3, 0.6)])
def test_c_d_alpha_domain(d, alpha):
    with pytest.raises(DomainError, match="bound constant undefined"):
        c_d_alpha(d, alpha)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_c_d_alpha_continuous_at_one(d):
    at_one = c_d_alpha(d, 1.0)
    for h in (1e-6, -1e-6):
        assert abs(c_d_alpha(d, 1.0 + h) - at_one) < 1e-4


def test_renyi_gaussian_reference_values():
    assert renyi_gaussian([[1.0 / (2 * math.pi * math.e)]], 1.0).value == pytest.approx(0.0, abs=1e-12)
    assert renyi_gaussian([[1.0]], 2.0).value == pytest.approx(math.log(2 * math.sqrt(math.pi)), abs=1e-12)


def test_renyi_gaussian_continuous_and_monotone(rng):
    S = _random_spd(rng, 3)
    at_one = renyi_gaussian(S, 1.0).value
    assert abs(renyi_gaussian(S, 1.0 + 1e-6).value - at_one) < 1e-4
    assert abs(renyi_gaussian(S, 1.0 - 1e-6).value - at_one) < 1e-4
    grid = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0]
    values = [renyi_gaussian(S, a).value for a in grid]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


def test_example1_exact_entropy(example1):
    report = model_entropy(example1, 1.0)
    assert report.kind == "exact_gaussian"
    assert report.value == pytest.approx(renyi_gaussian(series_phi0(example1), 1.0).value, abs=1e-9)
    assert report.value == pytest.approx(6.2021, abs=1e-3)
    assert report.components["solve_residual"] < 1e-12
    # the published 4.9428 comes from the published Phi(0)
    assert renyi_gaussian(PUBLISHED[1]["phi0"], 1.0).value == pytest.approx(4.9428, abs=1e-3)


def test_example1_bound_equals_exact_at_one(example1):
    exact = model_entropy(example1, 1.0)
    bound = model_upper_bound(example1, 1.0)
    assert bound.kind == "upper_bound"
    phi0 = covariance_lyapunov(example1).phi[0]
    assert bound.components["half_logdet"] == pytest.approx(0.5 * np.linalg.slogdet(phi0)[1], abs=1e-12)
    assert abs(bound.value - exact.value) < 1e-9


@pytest.mark.parametrize("alpha", [0.75, 1.0, 2.0])
def test_example3_bound_matches_example1(example1, example3, alpha):
    laplace = model_entropy(example3, alpha)
    assert laplace.kind == "upper_bound"
    assert laplace.value == pytest.approx(model_upper_bound(example1, alpha).value, abs=1e-12)
    half_logdet = 0.5 * np.linalg.slogdet(series_phi0(example3))[1]
    assert laplace.value == pytest.approx(c_d_alpha(3, alpha) + half_logdet, abs=1e-9)
    published = renyi_upper_bound(PUBLISHED[1]["phi0"], 3, alpha).value
    assert published == pytest.approx(c_d_alpha(3, alpha) + 0.6860, abs=1e-3)


def test_bound_rejects_dimension_mismatch():
    with pytest.raises(DomainError, match="does not match"):
        renyi_upper_bound(np.eye(2), 3, 1.0)
    with pytest.raises(DomainError, match="does not match"):
        shannon_upper_bound(np.eye(3), 2)
    assert shannon_upper_bound(np.eye(2), 2).value == pytest.approx(math.log(2 * math.pi * math.e))


def test_example3_alpha_half_outside_domain(example3):
    with pytest.raises(DomainError, match="bound constant undefined"):
        model_entropy(example3, 0.5)


@pytest.mark.parametrize("alpha", [0.75, 1.0, 2.0, 3.0])
def test_bound_dominates_gaussian(rng, alpha):
    for d in (1, 2, 3):
        S = _random_spd(rng, d)
        assert renyi_upper_bound(S, d, alpha).value >= renyi_gaussian(S, alpha).value - 1e-9


def test_scale_equivariance(rng):
    S = _random_spd(rng, 2)
    c = 3.7
    shift = math.log(c)  # (d/2) ln c with d = 2
    for alpha in (0.75, 1.0, 2.0):
        assert renyi_gaussian(c * S, alpha).value - renyi_gaussian(S, alpha).value == pytest.approx(shift, abs=1e-12)
        assert (renyi_upper_bound(c * S, 2, alpha).value - renyi_upper_bound(S, 2, alpha).value
                == pytest.approx(shift, abs=1e-12))
        assert (renyi_cauchy(c * S, 2, alpha).value - renyi_cauchy(S, 2, alpha).value
                == pytest.approx(shift, abs=1e-12))


def test_shannon_bound_identity_and_singular():
    assert shannon_upper_bound(np.eye(3)).value == pytest.approx(1.5 * math.log(2 * math.pi * math.e))
    singular = shannon_upper_bound([[1.0, 1.0], [1.0, 1.0]])
    assert singular.value == -math.inf
    assert singular.unbounded_below
    with pytest.raises(DomainError, match="positive semidefinite"):
        shannon_upper_bound([[1.0, 2.0], [2.0, 1.0]])


def test_renyi_cauchy_printed_formula():
    report = renyi_cauchy([[1.0]], 1, 1.0)
    assert report.value == pytest.approx(math.log(2 * math.e), abs=1e-12)
    assert "quadrature" in report.components


def test_renyi_cauchy_quadrature_deviation_reported():
    report = renyi_cauchy([[1.0]], 1, 2.0)
    # standard Cauchy: integral of f^2 is 1/(2 pi)
    assert report.components["quadrature"] == pytest.approx(math.log(2 * math.pi), abs=1e-5)
    assert report.components["quadrature_deviation"] == pytest.approx(
        report.value - report.components["quadrature"], abs=1e-15)


def test_renyi_cauchy_quadrature_diverges_below_half():
    report = renyi_cauchy([[1.0]], 1, 0.5)
    assert report.components["quadrature"] is None
    assert "diverges" in report.components["quadrature_note"]


def test_renyi_cauchy_continuous_at_one(rng):
    D = _random_spd(rng, 3)
    at_one = renyi_cauchy(D, 3, 1.0).value
    assert abs(renyi_cauchy(D, 3, 1.0 + 1e-6).value - at_one) < 1e-4
    assert abs(renyi_cauchy(D, 3, 1.0 - 1e-6).value - at_one) < 1e-4


def test_example2_scale_matrix_from_recursion(example2):
    scale = cauchy_scale_matrix(example2)
    assert scale.proportional
    assert scale.coefficient_sum == pytest.approx(6.6, abs=1e-8)
    assert np.allclose(scale.D, 6.6 ** 2 * example2.S_u, rtol=1e-8, atol=0)


def test_example2_printed_coefficients(example2):
    printed = cauchy_scale_from_coefficients(published_coefficients(), example2.S_u)
    assert printed.coefficient_sum == pytest.approx(2.3, abs=1e-12)
    # the printed-coefficient closed form lands 1/2 ln 10 above the published 6.5319
    value = renyi_cauchy(printed.D, 3, 1.0).value
    assert value == pytest.approx(7.6832, abs=1e-3)
    assert value - 6.5319 == pytest.approx(0.5 * math.log(10.0), abs=2e-3)


def test_non_commuting_cauchy_not_proportional(example1_cauchy):
    scale = cauchy_scale_matrix(example1_cauchy)
    assert not scale.proportional
    assert scale.D is None
    with pytest.raises(ClosedFormUnavailableError, match="scale matrix not proportional; closed form unavailable"):
        model_entropy(example1_cauchy, 1.0)


def test_single_term_cauchy_scale_is_4S():
    S = [[2.0, 0.3], [0.3, 1.0]]
    m = build_model({"d": 2, "family": "cauchy", "S_u": S, "S_w": S})
    scale = cauchy_scale_matrix(m)
    assert scale.proportional
    assert scale.coefficient_sum == pytest.approx(2.0, abs=1e-12)
    assert np.allclose(scale.D, 4.0 * np.array(S), atol=1e-12)


def test_model_entropy_cauchy_uses_recursion_scale(example2):
    report = model_entropy(example2, 2.0)
    assert report.kind == "exact_cauchy"
    assert report.value == pytest.approx(renyi_cauchy(6.6 ** 2 * example2.S_u, 3, 2.0).value, abs=1e-8)


def test_covariance_bound_rejects_cauchy(example2):
    with pytest.raises(NoFiniteCovarianceError):
        model_upper_bound(example2, 1.0)


def test_singular_bound_flagged():
    m = build_model(scalar_spec(A=(0.5,)))
    phi0 = covariance_lyapunov(m).phi[0]
    report = renyi_upper_bound(np.zeros_like(phi0), 1, 2.0)
    assert report.unbounded_below and report.value == -math.inf
