"""
Stationary covariance tests: the Lyapunov solve, the truncated series and
the stitched autocovariance, against hand values and against each other.
"""
import numpy as np
import pytest

from src.core.covariance import (autocovariance, compare_methods, covariance_lyapunov, covariance_series,
                                 psd_violation)
from src.core.model import build_model, similarity_transform
from src.core.realization import recursion_impulse
from src.reproduce.reference_examples import PUBLISHED, example_spec
from src.utils.errors import ModelSizeError, NoFiniteCovarianceError, StabilityError
from tests.conftest import scalar_spec, series_phi0


def test_example1_phi0_matches_series_sum(example1):
    cov = covariance_lyapunov(example1)
    assert np.allclose(cov.phi[0], series_phi0(example1), atol=1e-10, rtol=0)
    assert cov.residual < 1e-12
    published = np.array(PUBLISHED[1]["phi0"])
    assert np.allclose(cov.phi[0][0], published[0], atol=5e-3, rtol=0)
    assert np.allclose(cov.phi[0][1:, 1:], [[3.9088, 1.7081], [1.7081, 3.1880]], atol=1e-3, rtol=0)
    # published lower block does not follow from the printed coefficients
    assert np.abs(cov.phi[0][1:, 1:] - published[1:, 1:]).max() > 0.5


def _residual_structure(m, phi):
    """Phi(0) - sum_i A_i Phi(i)'."""
    return phi[0] - sum((a @ phi[i].T for i, a in enumerate(m.A, start=1)), np.zeros((m.d, m.d)))


def _residual_cross_moment(m):
    """E[eps(t) x(t)'] with eps(t) = sum_j B_j u(t-j) + sum_k D_k w(t-k), B_0 = D_0 = I."""
    M, Mstar = recursion_impulse(m, max(m.r, m.q))
    out = m.S_u @ M[0].T + m.S_w @ Mstar[0].T
    for j, b in enumerate(m.B, start=1):
        out = out + b @ m.S_u @ M[j].T
    for k, dk in enumerate(m.D, start=1):
        out = out + dk @ m.S_w @ Mstar[k].T
    return out


def test_example1_residual_structure_psd(example1):
    cov = autocovariance(example1, example1.p)
    structure = _residual_structure(example1, cov.phi)
    assert np.allclose(structure, _residual_cross_moment(example1), atol=1e-8)
    assert psd_violation(structure) <= 1e-8


def test_random_residual_structure_consistent(random_models):
    for m in random_models(25, seed=5):
        cov = autocovariance(m, m.p)
        structure = _residual_structure(m, cov.phi)
        assert np.allclose(structure, _residual_cross_moment(m), atol=1e-8)


def test_random_pure_ar_residual_structure_is_noise(random_models):
    for m in random_models(15, seed=6, r=0, q=0):
        cov = autocovariance(m, m.p)
        structure = _residual_structure(m, cov.phi)
        assert np.allclose(structure, m.S_u + m.S_w, atol=1e-8)
        assert psd_violation(structure) <= 1e-8


def test_example1_solution_structure(example1):
    cov = covariance_lyapunov(example1)
    assert np.array_equal(cov.phi_tilde0, cov.phi_tilde0.T)
    assert np.array_equal(cov.phi_tilde0[:3, :3], cov.phi[0])
    assert psd_violation(cov.phi[0]) <= 1e-9


def test_direct_path_for_white_output():
    m = build_model({"d": 2, "family": "gaussian", "S_u": [[1.0, 0.2], [0.2, 2.0]], "S_w": [[0.5, 0.0], [0.0, 0.25]]})
    cov = covariance_lyapunov(m)
    assert np.array_equal(cov.phi[0], m.S_u + m.S_w)
    series = covariance_series(m)
    assert np.allclose(series.phi[0], m.S_u + m.S_w, atol=1e-15)


def test_scalar_ar1(ar1):
    assert covariance_lyapunov(ar1).phi[0][0, 0] == pytest.approx(4.0 / 3.0, abs=1e-12)
    assert covariance_series(ar1).phi[0][0, 0] == pytest.approx(4.0 / 3.0, abs=1e-9)


def test_rejects_cauchy_and_unstable(example2):
    with pytest.raises(NoFiniteCovarianceError):
        covariance_lyapunov(example2)
    with pytest.raises(NoFiniteCovarianceError):
        covariance_series(example2)
    with pytest.raises(StabilityError, match="unstable: spectral radius 1.1"):
        covariance_lyapunov(build_model(scalar_spec(A=(1.1,))))


def test_size_cap(example1):
    with pytest.raises(ModelSizeError, match=r"\(dm\)\^2"):
        covariance_lyapunov(example1, dm_cap=8)


def test_series_agrees_with_lyapunov_example1(example1):
    res = compare_methods(example1, tol=1e-10)
    assert res["agrees"]
    assert res["gap"] <= res["tail_bound"] + 1e-8


def test_example2_parameters_gaussian_diagonal():
    m = build_model(dict(example_spec(2), family="gaussian"))
    # M weights 1, 0.8, 0.4, ... and M* weights 1, 1.5, 0.75, ...
    w_u = 1.0 + 0.64 / 0.75
    w_w = 1.0 + 2.25 / 0.75
    expected = np.diag([w_u * s + w_w * s for s in (0.25, 1.0, 0.5)])
    assert np.allclose(covariance_lyapunov(m).phi[0], expected, atol=1e-10)
    assert np.allclose(covariance_series(m).phi[0], expected, atol=1e-9)


def test_autocovariance_ar1(ar1):
    cov = autocovariance(ar1, tau_max=5)
    for tau in range(6):
        assert cov.phi[tau][0, 0] == pytest.approx(4.0 / 3.0 * 0.5 ** tau, abs=1e-12)


def test_autocovariance_pure_ma_cuts_off():
    m = build_model(scalar_spec(B=(0.7,), D=(1.5,), s_u=1.0, s_w=2.0))
    cov = autocovariance(m, tau_max=4)
    assert cov.phi[0][0, 0] == pytest.approx(1.0 * (1 + 0.49) + 2.0 * (1 + 2.25), abs=1e-9)
    assert cov.phi[1][0, 0] == pytest.approx(0.7 * 1.0 + 1.5 * 2.0, abs=1e-9)
    assert all(not np.any(cov.phi[tau]) for tau in (2, 3, 4))


def test_autocovariance_recursion_matches_series(example1):
    cov = autocovariance(example1, tau_max=6)
    series = covariance_series(example1, tol=1e-12, tau_max=6)
    for tau in range(2, 7):
        assert np.allclose(cov.phi[tau], series.phi[tau], atol=1e-8, rtol=0)


def test_negative_lag_is_transpose(example1):
    cov = autocovariance(example1, tau_max=3)
    assert np.array_equal(cov.at(-2), cov.phi[2].T)
    assert len(cov.to_records()) == 4 * 9


def test_similarity_transform_moves_covariance(example1):
    T = np.array([[1.0, 0.5, 0.0], [0.0, 2.0, 0.3], [0.1, 0.0, 1.0]])
    moved = covariance_lyapunov(similarity_transform(example1, T)).phi[0]
    expected = T @ covariance_lyapunov(example1).phi[0] @ T.T
    assert np.linalg.norm(moved - expected) <= 1e-8 * np.linalg.norm(expected)


@pytest.mark.parametrize("family", ["gaussian", "laplace"])
def test_cross_method_on_random_models(random_models, family):
    for m in random_models(10, family=family, seed=5):
        res = compare_methods(m, tol=1e-10)
        assert res["gap"] <= res["tail_bound"] + 1e-8
