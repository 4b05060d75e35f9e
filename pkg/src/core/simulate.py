"""
Seeded Monte Carlo engine and numerical-integration oracles.

Residual samplers (scale matrix S = L L'):
- gaussian: L z
- cauchy:   L z / |g|        characteristic function exp(-sqrt(s' S s))
- laplace:  sqrt(e) L z      characteristic function 1 / (1 + 1/2 s' S s), covariance S
with z standard normal, g standard normal and e standard exponential, all
independent. Replicate streams come from numpy SeedSequence.spawn.
"""
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import IntegrationWarning, dblquad, quad

from src.core.model import (STABILITY_MARGIN, ArmaControlModel, ResidualFamily, ar_companion, build_model,
                            is_stable)
from src.core.numerics import block_companion, spectral_radius
from src.utils.errors import DomainError, NumericError, StabilityError
from src.utils.metrics import batch_means_se

DECAY_TARGET = 1e-8
DEFAULT_BATCHES = 200
QUADRATURE_ABS_TOL = 1e-7

Seed = Union[int, np.random.SeedSequence, np.random.Generator]


@dataclass(frozen=True)
class SimConfig:
    seed: int
    n_samples: int
    burn_in: Optional[int] = None
    replicate_count: int = 1
    batches: int = DEFAULT_BATCHES
    ecf_points: Tuple[Tuple[float, ...], ...] = ()
    workers: int = 1
    keep_path: bool = False
    decay_target: float = DECAY_TARGET

    @classmethod
    def from_cfg(cls, cfg: Dict[str, Any], **overrides: Any) -> "SimConfig":
        sim = dict(cfg.get("simulation", {}) or {})
        values = {
            "seed": int(cfg.get("random_seed", 42)),
            "n_samples": int(sim.get("n_samples", 200000)),
            "burn_in": sim.get("burn_in"),
            "replicate_count": int(sim.get("replicate_count", 1)),
            "batches": int(sim.get("batches", DEFAULT_BATCHES)),
            "ecf_points": tuple(tuple(float(v) for v in s) for s in sim.get("ecf_points", []) or []),
            "workers": int(sim.get("workers", 1)),
            "decay_target": float(sim.get("decay_target", DECAY_TARGET)),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True, eq=False)
class EmpiricalSummary:
    mean: np.ndarray
    mean_se: np.ndarray
    covariance: Optional[np.ndarray]
    covariance_se: Optional[np.ndarray]
    ecf: List[Tuple[np.ndarray, complex, float]]
    n_effective: int
    burn_in: int
    seed: int
    path: Optional[np.ndarray] = field(default=None, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "burn_in": self.burn_in,
            "n_effective": self.n_effective,
            "mean": self.mean.tolist(),
            "mean_se": self.mean_se.tolist(),
            "covariance": None if self.covariance is None else self.covariance.tolist(),
            "covariance_se": None if self.covariance_se is None else self.covariance_se.tolist(),
            "ecf": [{"s": s.tolist(), "re": v.real, "im": v.imag, "se": se} for s, v, se in self.ecf],
        }


def _rng(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_residual(family: ResidualFamily, n: int, seed: Seed) -> np.ndarray:
    """n draws of the residual vector, shape (n, d)."""
    rng = _rng(seed)
    L = family.scale.factor
    d = L.shape[0]
    z = rng.standard_normal((n, d)) @ L.T
    if family.kind == "gaussian":
        return z
    if family.kind == "cauchy":
        g = rng.standard_normal(n)
        return z / np.abs(g)[:, None]
    if family.kind == "laplace":
        e = rng.standard_exponential(n)
        return np.sqrt(e)[:, None] * z
    raise DomainError(f"unknown family '{family.kind}'")


def default_burn_in(m: ArmaControlModel, decay_target: float = DECAY_TARGET,
                    margin: float = STABILITY_MARGIN) -> int:
    """Steps needed for rho^n to fall below decay_target (max(p, r, q) + 1 for rho = 0)."""
    verdict = is_stable(m, margin)
    if not verdict.stable:
        raise StabilityError(verdict.spectral_radius)
    rho = verdict.spectral_radius
    floor = max(m.p, m.r, m.q) + 1
    if rho <= 0.0:
        return floor
    return max(floor, int(math.ceil(math.log(decay_target) / math.log(rho))))


def resolve_burn_in(m: ArmaControlModel, cfg: SimConfig, margin: float = STABILITY_MARGIN) -> int:
    needed = default_burn_in(m, cfg.decay_target, margin)
    if cfg.burn_in is None:
        return needed
    if int(cfg.burn_in) < needed:
        raise DomainError(f"burn-in {cfg.burn_in} is shorter than the decay horizon {needed} "
                          f"for spectral radius {spectral_radius(ar_companion(m)):.6g}",
                          burn_in=int(cfg.burn_in), required=needed)
    return int(cfg.burn_in)


def _moving_average(e: np.ndarray, coeffs: Sequence[np.ndarray]) -> np.ndarray:
    """e(t) + sum_j C_j e(t - j), with e(t) = 0 before the start."""
    out = e.copy()
    for j, c in enumerate(coeffs, start=1):
        out[j:] += e[:-j] @ c.T
    return out


def _one_path(m: ArmaControlModel, total: int, seed: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.default_rng(seed)
    u = sample_residual(m.control, total, rng)
    w = sample_residual(m.noise, total, rng)
    drive = _moving_average(u, m.B) + _moving_average(w, m.D)
    x = np.zeros_like(drive)
    A = [a for a in m.A]
    # x(t) = sum_i A_i x(t-i) + drive(t), x = 0 before the start
    for t in range(total):
        acc = drive[t]
        for i, a in enumerate(A, start=1):
            if t - i < 0:
                break
            acc = acc + a @ x[t - i]
        x[t] = acc
    return x


def simulate_path(m: ArmaControlModel, cfg: SimConfig, margin: float = STABILITY_MARGIN) -> EmpiricalSummary:
    burn = resolve_burn_in(m, cfg, margin)
    total = burn + int(cfg.n_samples)
    children = np.random.SeedSequence(int(cfg.seed)).spawn(max(1, int(cfg.replicate_count)))

    if cfg.workers > 1 and len(children) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            paths = list(pool.map(lambda ss: _one_path(m, total, ss), children))
    else:
        paths = [_one_path(m, total, ss) for ss in children]
    kept = [p[burn:] for p in paths]
    pooled = np.concatenate(kept, axis=0)
    d = m.d

    mean = pooled.mean(axis=0)
    mean_se = batch_means_se(kept, cfg.batches)

    covariance = covariance_se = None
    if m.family != "cauchy":
        centred = [k - mean for k in kept]
        products = [np.einsum("ti,tj->tij", c, c).reshape(c.shape[0], d * d) for c in centred]
        covariance = np.concatenate(products, axis=0).mean(axis=0).reshape(d, d)
        covariance = 0.5 * (covariance + covariance.T)
        covariance_se = batch_means_se(products, cfg.batches).reshape(d, d)

    ecf = []
    for s in cfg.ecf_points:
        s = np.asarray(s, dtype=float)
        if s.shape != (d,):
            raise DomainError(f"ecf point {s.tolist()} does not have length {d}")
        phase = [k @ s for k in kept]
        vals = [np.column_stack([np.cos(ph), np.sin(ph)]) for ph in phase]
        both = np.concatenate(vals, axis=0).mean(axis=0)
        se = batch_means_se(vals, cfg.batches)
        ecf.append((s, complex(both[0], both[1]), float(np.hypot(se[0], se[1]))))

    return EmpiricalSummary(mean=mean, mean_se=mean_se, covariance=covariance, covariance_se=covariance_se,
                            ecf=ecf, n_effective=int(pooled.shape[0]), burn_in=burn, seed=int(cfg.seed),
                            path=kept[0] if cfg.keep_path else None)


def _plogp(f: float) -> float:
    return f * math.log(f) if f > 0.0 else 0.0


def _integrate(func: Callable[[float], float], a: float, b: float, abs_tol: float) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            if math.isinf(a) and math.isinf(b):
                left, _ = quad(func, a, 0.0, epsabs=abs_tol, limit=200)
                right, _ = quad(func, 0.0, b, epsabs=abs_tol, limit=200)
                return left + right
            val, _ = quad(func, a, b, epsabs=abs_tol, limit=200)
            return val
        except IntegrationWarning as e:
            raise NumericError(f"quadrature did not converge: {e}")


def _renyi_from_integral(integral: float, alpha: float) -> float:
    if not integral > 0.0 or not math.isfinite(integral):
        raise NumericError(f"integral of f^alpha is {integral}; entropy undefined")
    return math.log(integral) / (1.0 - alpha)


def entropy_numeric_1d(density: Callable[[float], float], alpha: float,
                       support: Tuple[float, float] = (-math.inf, math.inf),
                       abs_tol: float = QUADRATURE_ABS_TOL) -> float:
    """-int f ln f (alpha = 1) or ln(int f^alpha) / (1 - alpha) by adaptive quadrature."""
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    a, b = support
    if alpha == 1.0:
        return -_integrate(lambda x: _plogp(density(x)), a, b, abs_tol)
    return _renyi_from_integral(_integrate(lambda x: density(x) ** alpha, a, b, abs_tol), alpha)


def entropy_numeric_2d(density: Callable[[float, float], float], alpha: float,
                       bounds: Tuple[Tuple[float, float], Tuple[float, float]],
                       abs_tol: float = QUADRATURE_ABS_TOL) -> float:
    """Two-dimensional counterpart of entropy_numeric_1d over a box."""
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    (x0, x1), (y0, y1) = bounds
    if alpha == 1.0:
        def integrand(y, x):
            return _plogp(density(x, y))
    else:
        def integrand(y, x):
            return density(x, y) ** alpha
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, _ = dblquad(integrand, x0, x1, lambda x: y0, lambda x: y1, epsabs=abs_tol)
        except IntegrationWarning as e:
            raise NumericError(f"quadrature did not converge: {e}")
    if alpha == 1.0:
        return -val
    return _renyi_from_integral(val, alpha)


def _random_spd(rng: np.random.Generator, d: int) -> List[List[float]]:
    w = rng.standard_normal((d, d))
    s = w @ w.T / d + 0.5 * np.eye(d)
    return (0.5 * (s + s.T)).tolist()


def random_stable_model(rng: Seed, d: Optional[int] = None, p: Optional[int] = None, r: Optional[int] = None,
                        q: Optional[int] = None, family: str = "gaussian", max_radius: float = 0.9,
                        max_order: int = 2, max_dim: int = 3) -> ArmaControlModel:
    """
    Random model with d <= max_dim and orders <= max_order. The AR part is
    rescaled A_i -> c^i A_i, which multiplies every companion eigenvalue by c,
    to land on a spectral radius drawn from [0.1, max_radius].
    """
    rng = _rng(rng)
    d = d if d is not None else int(rng.integers(1, max_dim + 1))
    p = p if p is not None else int(rng.integers(0, max_order + 1))
    r = r if r is not None else int(rng.integers(0, max_order + 1))
    q = q if q is not None else int(rng.integers(0, max_order + 1))

    A = [rng.standard_normal((d, d)) * 0.5 for _ in range(p)]
    if p:
        rho = spectral_radius(block_companion(A))
        if rho > 0:
            c = float(rng.uniform(0.1, max_radius)) / rho
            A = [a * c ** i for i, a in enumerate(A, start=1)]
    spec = {
        "schema_version": 1,
        "d": d, "p": p, "r": r, "q": q,
        "A": [a.tolist() for a in A],
        "B": [(rng.standard_normal((d, d)) * 0.5).tolist() for _ in range(r)],
        "D": [(rng.standard_normal((d, d)) * 0.5).tolist() for _ in range(q)],
        "family": family,
        "S_u": _random_spd(rng, d),
        "S_w": _random_spd(rng, d),
    }
    return build_model(spec)
