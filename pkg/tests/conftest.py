"""
Shared fixtures: config dict, the three reference models, small hand-checkable
models and a seeded random-model factory.
"""
import numpy as np
import pytest

from src.core.model import build_model
from src.core.realization import recursion_impulse
from src.core.simulate import random_stable_model
from src.reproduce.reference_examples import example_model, example_spec
from src.utils.loader import load_config


def scalar_spec(A=(), B=(), D=(), family="gaussian", s_u=0.5, s_w=0.5):
    """d = 1 model spec from plain floats."""
    return {
        "schema_version": 1,
        "d": 1, "p": len(A), "r": len(B), "q": len(D),
        "A": [[[a]] for a in A],
        "B": [[[b]] for b in B],
        "D": [[[k]] for k in D],
        "family": family,
        "S_u": [[s_u]],
        "S_w": [[s_w]],
    }


def series_phi0(m, n_terms=400):
    """Phi(0) as the plain sum of M_j S_u M_j' + M*_j S_w M*_j' over n_terms terms."""
    M, Mstar = recursion_impulse(m, n_terms)
    return sum(a @ m.S_u @ a.T for a in M) + sum(b @ m.S_w @ b.T for b in Mstar)


@pytest.fixture
def cfg(tmp_path):
    c = load_config()
    c["logs_path"] = str(tmp_path / "traces.json")
    return c


@pytest.fixture
def example1():
    return example_model(1)


@pytest.fixture
def example2():
    return example_model(2)


@pytest.fixture
def example3():
    return example_model(3)


@pytest.fixture
def example1_cauchy():
    return build_model(dict(example_spec(1), family="cauchy"))


@pytest.fixture
def ar1():
    # x(t) = 0.5 x(t-1) + u(t) + w(t), var(u + w) = 1, so Phi(0) = 4/3
    return build_model(scalar_spec(A=(0.5,)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_models():
    def make(n, family="gaussian", seed=11, **kwargs):
        g = np.random.default_rng(seed)
        return [random_stable_model(g, family=family, **kwargs) for _ in range(n)]
    return make
