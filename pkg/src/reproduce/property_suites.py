"""
Property suites run by `reproduce --properties`.

Each suite returns one report row with `passed` set, plus the worst case it saw:
- cross_method_suite:        Lyapunov vs series Phi(0) on random stable models
- impulse_equivalence_suite: recursion M_j vs companion powers, j <= 20
- entropy_oracle_suite:      closed Gaussian form vs quadrature, and C_d(alpha) checks
- monte_carlo_suite:         simulated covariance and characteristic function vs analytic values
"""
import math
from typing import Any, Dict, List

import numpy as np

from src.core.charfn import CharacteristicFunction
from src.core.covariance import compare_methods, covariance_lyapunov
from src.core.entropy import c_d_alpha, renyi_gaussian
from src.core.model import build_model
from src.core.realization import build_companion, companion_impulse, recursion_impulse
from src.core.simulate import SimConfig, entropy_numeric_1d, entropy_numeric_2d, random_stable_model, simulate_path
from src.reproduce.reference_examples import example_spec
from src.utils.errors import DomainError
from src.utils.metrics import within_standard_errors

MC_SEED = 20240611
ECF_POINTS = (
    (0.3, 0.0, 0.0),
    (0.0, 0.4, 0.0),
    (0.0, 0.0, 0.4),
    (0.2, -0.2, 0.1),
    (-0.1, 0.3, 0.2),
)


def _suite_cfg(cfg: Dict[str, Any]) -> Dict[str, Any]:
    return dict(cfg.get("reproduce", {}) or {})


def _row(quantity: str, passed: bool, computed: Any, note: str) -> Dict[str, Any]:
    return {"example": "properties", "quantity": quantity, "computed": computed, "published": None,
            "passed": bool(passed), "note": note}


def _non_degenerate(rng: np.random.Generator, **kwargs: Any):
    while True:
        m = random_stable_model(rng, **kwargs)
        if m.p or m.r or m.q:
            return m


def cross_method_suite(cfg: Dict[str, Any]) -> Dict[str, Any]:
    sc = _suite_cfg(cfg)
    n_models = int(sc.get("property_models", 50))
    rng = np.random.default_rng(int(sc.get("seed", 7)))
    worst = -math.inf
    failures = 0
    for i in range(n_models):
        family = "gaussian" if i % 2 == 0 else "laplace"
        m = random_stable_model(rng, family=family)
        res = compare_methods(m, tol=float(cfg.get("series_tol", 1e-10)))
        worst = max(worst, res["gap"] - res["tail_bound"])
        failures += 0 if res["agrees"] else 1
    return _row(f"cross-method covariance ({n_models} models)", failures == 0, worst,
                f"max(gap - tail_bound) = {worst:.3g}; {failures} disagreements")


def impulse_equivalence_suite(cfg: Dict[str, Any], horizon: int = 20, atol: float = 1e-10) -> Dict[str, Any]:
    sc = _suite_cfg(cfg)
    n_models = int(sc.get("property_models", 50))
    rng = np.random.default_rng(int(sc.get("seed", 7)) + 1)
    worst = 0.0
    exact_start = True
    for _ in range(n_models):
        m = _non_degenerate(rng)
        M, Mstar = recursion_impulse(m, horizon)
        C, Cstar = companion_impulse(build_companion(m), horizon)
        eye = np.eye(m.d)
        exact_start = exact_start and np.array_equal(M[0], eye) and np.array_equal(Mstar[0], eye)
        for j in range(horizon + 1):
            scale = max(1.0, float(np.max(np.abs(M[j]))), float(np.max(np.abs(Mstar[j]))))
            gap = max(float(np.max(np.abs(M[j] - C[j]))), float(np.max(np.abs(Mstar[j] - Cstar[j])))) / scale
            worst = max(worst, gap)
    return _row(f"impulse-response equivalence ({n_models} models, j <= {horizon})",
                worst <= atol and exact_start, worst,
                f"max relative gap {worst:.3g}; M_0 = M*_0 = I exactly: {exact_start}")


def _gaussian_density_1d(var: float):
    c = 1.0 / math.sqrt(2.0 * math.pi * var)
    return lambda x: c * math.exp(-0.5 * x * x / var)


def _gaussian_density_2d(S: np.ndarray):
    inv = np.linalg.inv(S)
    c = 1.0 / (2.0 * math.pi * math.sqrt(np.linalg.det(S)))
    a, b, e = inv[0, 0], inv[0, 1], inv[1, 1]
    return lambda x, y: c * math.exp(-0.5 * (a * x * x + 2.0 * b * x * y + e * y * y))


def entropy_oracle_suite(cfg: Dict[str, Any], alphas=(0.5, 1.0, 2.0, 3.0), atol: float = 1e-6) -> Dict[str, Any]:
    sc = _suite_cfg(cfg)
    n_mats = int(sc.get("oracle_matrices", 10))
    abs_tol = float(sc.get("oracle_abs_tol", 1e-10))
    rng = np.random.default_rng(int(sc.get("seed", 7)) + 2)
    worst = 0.0
    for d in (1, 2):
        for _ in range(n_mats):
            w = rng.standard_normal((d, d))
            S = w @ w.T / d + 0.5 * np.eye(d)
            S = 0.5 * (S + S.T)
            for alpha in alphas:
                exact = renyi_gaussian(S, alpha).value
                if d == 1:
                    numeric = entropy_numeric_1d(_gaussian_density_1d(float(S[0, 0])), alpha, abs_tol=abs_tol)
                else:
                    half = 12.0 * np.sqrt(np.diag(S))
                    bounds = ((-half[0], half[0]), (-half[1], half[1]))
                    numeric = entropy_numeric_2d(_gaussian_density_2d(S), alpha, bounds, abs_tol=abs_tol)
                worst = max(worst, abs(exact - numeric))

    continuity = max(abs(c_d_alpha(d, 1.0 + h) - c_d_alpha(d, 1.0)) for d in (1, 2, 3) for h in (1e-6, -1e-6))
    domain_ok = True
    for d in (1, 2, 3):
        try:
            c_d_alpha(d, d / (d + 2.0))
            domain_ok = False
        except DomainError:
            pass
    passed = worst <= atol and continuity < 1e-4 and domain_ok
    return _row("entropy quadrature oracle (d in {1, 2})", passed, worst,
                f"max |closed - quadrature| {worst:.3g}; C_d continuity gap {continuity:.3g}; "
                f"domain error at alpha = d/(d+2): {domain_ok}")


def monte_carlo_suite(cfg: Dict[str, Any], n_samples: int = 200000, k_se: float = 3.0) -> Dict[str, Any]:
    sc = _suite_cfg(cfg)
    seed = int(sc.get("mc_seed", MC_SEED))
    n = int(sc.get("mc_samples", n_samples))
    notes: List[str] = []
    passed = True
    worst = 0.0
    for family in ("gaussian", "laplace", "cauchy"):
        m = build_model(dict(example_spec(1), family=family))
        sim = simulate_path(m, SimConfig(seed=seed, n_samples=n, ecf_points=ECF_POINTS))
        if sim.covariance is not None:
            phi0 = covariance_lyapunov(m).phi[0]
            ok = within_standard_errors(sim.covariance, phi0, sim.covariance_se, k_se)
            if not ok.all():
                passed = False
                notes.append(f"{family}: covariance outside {k_se:g} SE at {int((~ok).sum())} entries")
        cf = CharacteristicFunction(m, cfg)
        limit = 4.0 / math.sqrt(sim.n_effective)
        for s, value, _ in sim.ecf:
            gap = abs(value - cf.evaluate(s).value)
            worst = max(worst, gap)
            if gap > limit:
                passed = False
                notes.append(f"{family}: ecf gap {gap:.3g} at s = {s.tolist()}")
    return _row(f"Monte Carlo oracle (Example 1 parameters, n = {n}, seed {seed})", passed, worst,
                "; ".join(notes) or f"max ecf gap {worst:.3g} within 4/sqrt(n)")


SUITES = {
    "cross_method": cross_method_suite,
    "impulse_equivalence": impulse_equivalence_suite,
    "entropy_oracle": entropy_oracle_suite,
    "monte_carlo": monte_carlo_suite,
}


def run_property_suites(cfg: Dict[str, Any], names=None) -> List[Dict[str, Any]]:
    names = names or list(SUITES)
    return [SUITES[name](cfg) for name in names]
