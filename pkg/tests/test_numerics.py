"""
Unit tests for the dense matrix kit in src/core/numerics.py.

Run with:
    pytest -q tests/test_numerics.py
"""
import numpy as np
import pytest

from src.core.covariance import covariance_lyapunov
from src.core.numerics import (as_mat, block_companion, det, kron, solve, spd_factor, spectral_radius, unvec,
                               vec)
from src.utils.errors import DomainError, SingularMatrixError
from tests.conftest import series_phi0


def test_vec_stacks_columns():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert vec(a).ravel().tolist() == [1.0, 3.0, 2.0, 4.0]
    assert np.array_equal(unvec(vec(a), 2, 2), a)


def test_kron_vec_identity(rng):
    a = rng.standard_normal((3, 3))
    x = rng.standard_normal((3, 3))
    b = rng.standard_normal((3, 3))
    lhs = vec(a @ x @ b)
    rhs = kron(b.T, a) @ vec(x)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_spectral_radius_diagonal():
    assert spectral_radius(np.diag([0.5, -0.7])) == pytest.approx(0.7)


def test_block_companion_scalar_ar2():
    c = block_companion([np.array([[0.5]]), np.array([[0.3]])])
    assert np.array_equal(c, np.array([[0.5, 0.3], [1.0, 0.0]]))


def test_block_companion_needs_blocks():
    with pytest.raises(DomainError):
        block_companion([])


def test_spd_factor_reconstructs_and_logdet():
    s = np.array([[2.25, 0.3], [0.3, 1.0]])
    spd = spd_factor(s)
    assert np.allclose(spd.factor @ spd.factor.T, s, atol=1e-14)
    assert spd.logdet == pytest.approx(np.linalg.slogdet(s)[1], abs=1e-12)
    assert spd.scaled(4.0).logdet == pytest.approx(spd.logdet + 2 * np.log(4.0), abs=1e-12)


def test_spd_factor_rejects_asymmetric():
    with pytest.raises(DomainError, match="scale not symmetric"):
        spd_factor([[1.0, 0.9], [0.8, 1.0]])


def test_spd_factor_rejects_indefinite():
    with pytest.raises(DomainError, match="positive definite"):
        spd_factor([[1.0, 2.0], [2.0, 1.0]])


def test_solve_and_singular():
    a = np.array([[4.0, 1.0], [2.0, 3.0]])
    b = np.array([[1.0], [2.0]])
    assert np.allclose(a @ solve(a, b), b, atol=1e-12)
    with pytest.raises(SingularMatrixError):
        solve([[1.0, 2.0], [2.0, 4.0]], b)


def test_det_matches_numpy(rng):
    a = rng.standard_normal((4, 4))
    assert det(a) == pytest.approx(np.linalg.det(a), rel=1e-10)


def test_as_mat_rejects_non_finite():
    with pytest.raises(DomainError):
        as_mat([[1.0, np.nan]])


def test_kron_bilinear(rng):
    a, b = rng.standard_normal((2, 3, 2))
    c = rng.standard_normal((2, 4))
    assert np.allclose(kron(a + b, c), kron(a, c) + kron(b, c), atol=1e-12)
    assert np.allclose(kron(c, a + b), kron(c, a) + kron(c, b), atol=1e-12)
    assert np.allclose(kron(2.5 * a, c), 2.5 * kron(a, c), atol=1e-12)


def test_det_multiplicative(rng):
    for _ in range(10):
        a, b = rng.standard_normal((2, 4, 4))
        assert det(a @ b) == pytest.approx(det(a) * det(b), rel=1e-9)


def test_spd_factor_round_trip_random(rng):
    for d in (1, 2, 3, 5, 8):
        g = rng.standard_normal((d, d))
        s = g @ g.T + 1e-3 * np.eye(d)
        spd = spd_factor(s)
        rel = np.linalg.norm(spd.factor @ spd.factor.T - s) / np.linalg.norm(s)
        assert rel <= 1e-10


def test_solve_well_conditioned_10x10(rng):
    a = rng.standard_normal((10, 10)) + 10.0 * np.eye(10)
    b = rng.standard_normal((10, 3))
    x = solve(a, b)
    assert np.linalg.norm(a @ x - b) / np.linalg.norm(b) < 1e-9


def _charpoly(a):
    """Characteristic polynomial coefficients (highest first) by Faddeev-LeVerrier."""
    n = a.shape[0]
    coeffs = [1.0]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(a @ m) / k)
    return coeffs


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_spectral_radius_matches_polynomial_roots(rng, d):
    for _ in range(5):
        a = rng.standard_normal((d, d))
        # np.roots solves through the companion matrix of the polynomial
        expected = float(np.max(np.abs(np.roots(_charpoly(a)))))
        assert spectral_radius(a) == pytest.approx(expected, rel=1e-7)


def test_example1_phi0_determinant(example1):
    phi0 = covariance_lyapunov(example1).phi[0]
    assert det(phi0) == pytest.approx(np.linalg.det(series_phi0(example1)), rel=1e-9)
    assert det(phi0) == pytest.approx(48.94, abs=0.05)
