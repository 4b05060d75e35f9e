"""
Companion embedding and impulse-response tests.
"""
import numpy as np
import pytest

from src.core.model import build_model
from src.core.numerics import spectral_radius
from src.core.realization import (autocov_recursion_step, build_companion, companion_impulse, impulse_response,
                                  recursion_impulse)
from src.utils.errors import ArityError, DegenerateModelError, DomainError, StabilityError
from tests.conftest import scalar_spec


def test_example1_companion_blocks(example1):
    real = build_companion(example1)
    theta = real.theta
    assert theta.shape == (9, 9)
    assert np.array_equal(theta[:3, :3], example1.A[0])
    assert np.array_equal(theta[:3, 3:6], example1.B[0])
    assert np.array_equal(theta[:3, 6:9], example1.D[0])
    # r = q = 1: no history shifts, lower block rows stay zero
    assert not np.any(theta[3:, :])
    assert np.array_equal(real.sel_I @ real.sel_J1, np.eye(3))
    assert np.array_equal(real.sel_I @ real.sel_J2, np.eye(3))


def test_scalar_ar2_companion():
    real = build_companion(build_model(scalar_spec(A=(0.5, 0.3))))
    assert np.array_equal(real.theta, np.array([[0.5, 0.3], [1.0, 0.0]]))


def test_degenerate_model_has_no_companion():
    with pytest.raises(DegenerateModelError):
        build_companion(build_model(scalar_spec()))


def test_theta_radius_matches_ar_block(random_models):
    for m in random_models(20):
        if m.p == 0:
            # nilpotent theta: eigenvalue noise, not a radius
            continue
        real = build_companion(m)
        assert spectral_radius(real.theta) == pytest.approx(spectral_radius(real.theta11), abs=1e-9)


def test_zero_ar_impulse_is_the_ma_coefficients(rng):
    B = [rng.standard_normal((2, 2)) for _ in range(2)]
    D = [rng.standard_normal((2, 2))]
    m = build_model({"d": 2, "p": 0, "r": 2, "q": 1, "A": [], "B": [b.tolist() for b in B],
                     "D": [k.tolist() for k in D], "family": "gaussian",
                     "S_u": [[1.0, 0.0], [0.0, 1.0]], "S_w": [[1.0, 0.0], [0.0, 1.0]]})
    imp = impulse_response(m, 1e-10)
    assert np.allclose(imp.M[1], B[0]) and np.allclose(imp.M[2], B[1])
    assert np.allclose(imp.Mstar[1], D[0])
    assert all(not np.any(M) for M in imp.M[3:])
    assert all(not np.any(M) for M in imp.Mstar[2:])


def test_example2_impulse_values(example2):
    imp = impulse_response(example2, 1e-10)
    eye = np.eye(3)
    for j, c in enumerate([1.0, 0.8, 0.4, 0.2]):
        assert np.allclose(imp.M[j], c * eye, atol=1e-15)
    for j, c in enumerate([1.0, 1.5, 0.75]):
        assert np.allclose(imp.Mstar[j], c * eye, atol=1e-15)


def test_leading_terms_are_exact_identity(example1):
    imp = impulse_response(example1, 1e-10)
    assert np.array_equal(imp.M[0], np.eye(3))
    assert np.array_equal(imp.Mstar[0], np.eye(3))
    assert imp.tail_bound < 1e-10


def test_recursion_matches_companion_powers(example1):
    M, Mstar = recursion_impulse(example1, 12)
    C, Cstar = companion_impulse(build_companion(example1), 12)
    for j in range(13):
        assert np.allclose(M[j], C[j], atol=1e-10, rtol=0)
        assert np.allclose(Mstar[j], Cstar[j], atol=1e-10, rtol=0)


def test_tail_bound_dominates_scalar_tail(ar1):
    imp = impulse_response(ar1, 1e-6)
    # M_j = M*_j = 0.5^j, so the discarded mass is 2 * 0.5^N
    assert imp.tail_bound >= 2.0 * 0.5 ** imp.N
    assert imp.tail_bound < 1e-6


def test_unstable_and_bad_tolerance():
    with pytest.raises(StabilityError):
        impulse_response(build_model(scalar_spec(A=(1.1,))), 1e-10)
    with pytest.raises(DomainError):
        impulse_response(build_model(scalar_spec(A=(0.5,))), 0.0)


def test_autocov_recursion_step_scalar():
    out = autocov_recursion_step([np.array([[4.0 / 3.0]])], [np.array([[0.5]])])
    assert out[0, 0] == pytest.approx(2.0 / 3.0)


def test_autocov_recursion_step_zero_ar_and_arity():
    assert not np.any(autocov_recursion_step([np.eye(2)], []))
    with pytest.raises(ArityError):
        autocov_recursion_step([np.eye(2)], [np.eye(2), np.eye(2)])
