"""
The three worked examples, as model specs plus the published numbers they
are checked against.

Example 1: Gaussian residuals, d = 3, p = r = q = 1.
Example 2: Cauchy residuals, scalar-times-identity coefficients.
Example 3: Example 1 parameters with Laplace residuals.
"""
import copy
from typing import Any, Dict, List

from src.core.model import ArmaControlModel, build_model

EXAMPLE_1: Dict[str, Any] = {
    "schema_version": 1,
    "d": 3, "p": 1, "r": 1, "q": 1,
    "A": [[[0.5, 0.0, 0.0], [0.1, 0.1, 0.3], [0.0, 0.2, 0.3]]],
    "B": [[[0.3, 0.0, 0.0], [0.0, 0.1, 0.2], [0.0, 0.2, 0.3]]],
    "D": [[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]],
    "family": "gaussian",
    "S_u": [[2.25, 0.0, 0.0], [0.0, 1.0, 0.5], [0.0, 0.5, 0.74]],
    "S_w": [[0.25, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.5]],
}

EXAMPLE_2: Dict[str, Any] = {
    "schema_version": 1,
    "d": 3, "p": 1, "r": 1, "q": 1,
    "A": [[[0.5, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 0.5]]],
    "B": [[[0.3, 0.0, 0.0], [0.0, 0.3, 0.0], [0.0, 0.0, 0.3]]],
    "D": [[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]],
    "family": "cauchy",
    "S_u": [[0.25, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.5]],
    "S_w": [[0.25, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.5]],
}

EXAMPLE_3: Dict[str, Any] = dict(copy.deepcopy(EXAMPLE_1), family="laplace")

PUBLISHED: Dict[int, Dict[str, Any]] = {
    1: {
        "phi0": [[5.1700, 0.3765, 0.0443], [0.3765, 0.9241, 1.3560], [0.0443, 1.3560, 2.8917]],
        "roots": [2.0, 2.1525, -15.4858],
        "shannon": 4.9428,
        "half_logdet": 0.6860,
        "alpha_constant": 34.1884,
        "alpha_exponent": -3.0,
    },
    2: {
        "shannon": 6.5319,
        "alpha_constant": 34.1884,
        # printed coefficient series: 0.4, 0.2, 0.1, ... and 0.75, 0.375, ...
        "control_series": (0.4, 0.5),
        "noise_series": (0.75, 0.5),
        "coefficient_sum": 2.3,
    },
    3: {
        "half_logdet": 0.6860,
        "alphas": [0.5, 0.75, 1.0, 2.0],
    },
}

EXAMPLES = {1: EXAMPLE_1, 2: EXAMPLE_2, 3: EXAMPLE_3}


def example_spec(n: int) -> Dict[str, Any]:
    if n not in EXAMPLES:
        raise KeyError(f"no reference example {n}; choose from {sorted(EXAMPLES)}")
    return copy.deepcopy(EXAMPLES[n])


def example_model(n: int) -> ArmaControlModel:
    return build_model(example_spec(n))


def published_coefficients(n_terms: int = 64) -> List[float]:
    """Printed Example 2 coefficient series, control terms then noise terms."""
    out: List[float] = []
    for first, ratio in (PUBLISHED[2]["control_series"], PUBLISHED[2]["noise_series"]):
        out.extend(first * ratio ** j for j in range(n_terms))
    return out
