"""
Closed-form Renyi entropies (nats) of the ARMA output and covariance bounds.

- Gaussian output: exact, from Phi(0).
- Cauchy output: exact when every K_j K_j' is proportional to one matrix, so
  the output is again elliptical Cauchy with scale D.
- Laplace output: only the covariance upper bound C_d(alpha) + 1/2 ln det Phi(0).
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
from scipy.special import gammaln

from src.core.covariance import SERIES_TOL, covariance_lyapunov
from src.core.model import STABILITY_MARGIN, ArmaControlModel
from src.core.numerics import SpdMat, as_mat, is_symmetric, spd_factor, symmetrize
from src.core.realization import impulse_response
from src.core.simulate import entropy_numeric_1d
from src.utils.errors import (ArmaEntropyError, ClosedFormUnavailableError, DomainError,
                              NoFiniteCovarianceError)

PROPORTIONALITY_TOL = 1e-8
PSD_TOL = 1e-9

ScaleLike = Union[SpdMat, np.ndarray, Sequence[Sequence[float]]]


@dataclass(frozen=True)
class EntropyReport:
    alpha: float
    value: float
    kind: str
    formula: str
    components: Dict[str, Any] = field(default_factory=dict)
    unbounded_below: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "value": self.value,
            "kind": self.kind,
            "formula": self.formula,
            "components": dict(self.components),
            "unbounded_below": self.unbounded_below,
        }


@dataclass(frozen=True, eq=False)
class CauchyScaleResult:
    proportional: bool
    D: Optional[np.ndarray]
    coefficients: List[float]
    coefficient_sum: float = 0.0
    coefficient_tail: float = 0.0
    max_deviation: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "proportional": self.proportional,
            "D": None if self.D is None else self.D.tolist(),
            "coefficient_sum": self.coefficient_sum,
            "coefficient_tail": self.coefficient_tail,
            "max_deviation": self.max_deviation,
            "n_coefficients": len(self.coefficients),
        }


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (alpha > 0 and math.isfinite(alpha)):
        raise DomainError(f"alpha must be a positive finite number, got {alpha}")
    return alpha


def _as_spd(S: ScaleLike) -> SpdMat:
    return S if isinstance(S, SpdMat) else spd_factor(S)


def c_d_alpha(d: int, alpha: float) -> float:
    """Constant of the covariance bound R_alpha(X) <= C_d(alpha) + 1/2 ln det S."""
    alpha = _check_alpha(alpha)
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    if alpha <= d / (d + 2.0):
        raise DomainError(f"bound constant undefined for alpha = {alpha} <= d/(d+2) = {d / (d + 2.0):.6g}",
                          alpha=alpha, d=d)
    if alpha == 1.0:
        return 0.5 * d * math.log(2.0 * math.pi * math.e)
    g = alpha * (d + 2) - d
    if alpha > 1.0:
        return (0.5 * d * math.log(math.pi * g / (alpha - 1.0))
                + math.log(g / (2.0 * alpha)) / (alpha - 1.0)
                + gammaln(alpha / (alpha - 1.0))
                - gammaln(g / (2.0 * (alpha - 1.0))))
    return (0.5 * d * math.log(math.pi * g / (1.0 - alpha))
            - alpha / (1.0 - alpha) * math.log(g / (2.0 * alpha))
            - gammaln(alpha / (1.0 - alpha))
            + gammaln(g / (2.0 * (1.0 - alpha))))


def _alpha_term(d: int, alpha: float) -> float:
    """-d ln(alpha) / (1 - alpha), continued by its limit d at alpha = 1."""
    if alpha == 1.0:
        return float(d)
    return -d * math.log(alpha) / (1.0 - alpha)


def renyi_gaussian(S: ScaleLike, alpha: float) -> EntropyReport:
    alpha = _check_alpha(alpha)
    spd = _as_spd(S)
    d = spd.d
    half_logdet = 0.5 * (d * math.log(2.0 * math.pi) + spd.logdet)
    # alpha-dependent part: d ln(alpha) / (2 (alpha - 1)), limit d/2
    shape = 0.5 * _alpha_term(d, alpha)
    return EntropyReport(
        alpha=alpha,
        value=half_logdet + shape,
        kind="exact_gaussian",
        formula="gaussian_closed_form",
        components={"half_logdet_2piS": half_logdet, "alpha_term": shape},
    )


def _cauchy_quadrature(scale: float, alpha: float, abs_tol: float) -> Dict[str, Any]:
    if alpha <= 0.5:
        return {"quadrature": None, "quadrature_note": "integral of f^alpha diverges for alpha <= 1/2"}
    s = math.sqrt(scale)

    def density(x: float) -> float:
        return 1.0 / (math.pi * s * (1.0 + (x / s) ** 2))

    try:
        value = entropy_numeric_1d(density, alpha, abs_tol=abs_tol)
    except ArmaEntropyError as e:
        return {"quadrature": None, "quadrature_note": e.message}
    return {"quadrature": value}


def renyi_cauchy(D: ScaleLike, d: Optional[int] = None, alpha: float = 1.0, oracle: bool = True,
                 abs_tol: float = 1e-7) -> EntropyReport:
    """
    Closed Cauchy form, evaluated as printed:
        alpha != 1: ln(alpha^(-d/(1-alpha)) det(4 pi D)^(1/2) Gamma((d+1)/2) / sqrt(pi))
        alpha == 1: ln(det(4 e^2 pi D)^(1/2) Gamma((d+1)/2) / sqrt(pi))
    For d = 1 the quadrature value of the scale-D Cauchy density and the
    deviation from it are added to components.
    """
    alpha = _check_alpha(alpha)
    spd = _as_spd(D)
    if d is not None and d != spd.d:
        raise DomainError(f"dimension {d} does not match scale matrix of size {spd.d}")
    d = spd.d
    half_logdet = 0.5 * (d * math.log(4.0 * math.pi) + spd.logdet)
    gamma_term = float(gammaln((d + 1) / 2.0)) - 0.5 * math.log(math.pi)
    shape = _alpha_term(d, alpha)
    value = half_logdet + gamma_term + shape
    components: Dict[str, Any] = {
        "half_logdet_4piD": half_logdet,
        "gamma_term": gamma_term,
        "alpha_term": shape,
    }
    if oracle and d == 1:
        components.update(_cauchy_quadrature(float(spd.base[0, 0]), alpha, abs_tol))
        if components.get("quadrature") is not None:
            components["quadrature_deviation"] = value - components["quadrature"]
    return EntropyReport(alpha=alpha, value=value, kind="exact_cauchy", formula="cauchy_closed_form",
                         components=components)


def _proportionality(P: np.ndarray, G: np.ndarray) -> float:
    """Relative Frobenius distance between trace-normalized P and G (tr G = 1)."""
    tr = float(np.trace(P))
    if tr <= 0.0:
        return 0.0 if not np.any(P) else float("inf")
    return float(np.linalg.norm(P / tr - G) / np.linalg.norm(G))


def cauchy_scale_matrix(m: ArmaControlModel, tol: float = SERIES_TOL, ptol: float = PROPORTIONALITY_TOL,
                        margin: float = STABILITY_MARGIN) -> CauchyScaleResult:
    """
    Test whether every K_j K_j' = M_j S_u M_j' and K*_j K*_j' = M*_j S_w M*_j'
    is a multiple c_j of S_u. If so the output scale is D = (sum sqrt(c_j))^2 S_u.
    """
    imp = impulse_response(m, tol, margin)
    S_u = m.S_u
    tr_u = float(np.trace(S_u))
    G = S_u / tr_u

    coefficients: List[float] = []
    worst = 0.0
    for Ms, S in ((imp.M, S_u), (imp.Mstar, m.S_w)):
        for M in Ms:
            P = M @ S @ M.T
            worst = max(worst, _proportionality(P, G))
            coefficients.append(math.sqrt(max(float(np.trace(P)), 0.0) / tr_u))

    # sqrt(c_j) <= ||M_j||_F sqrt(||S||_2 / tr S_u) beyond the truncation point
    smax = max(float(np.linalg.norm(S_u, 2)), float(np.linalg.norm(m.S_w, 2)))
    tail = math.sqrt(smax / tr_u) * imp.tail_bound

    if worst > ptol:
        return CauchyScaleResult(proportional=False, D=None, coefficients=coefficients,
                                 coefficient_sum=float(sum(coefficients)), coefficient_tail=tail,
                                 max_deviation=worst)
    a = float(math.fsum(coefficients))
    D = symmetrize(a * a * S_u)
    return CauchyScaleResult(proportional=True, D=D, coefficients=coefficients, coefficient_sum=a,
                             coefficient_tail=tail, max_deviation=worst)


def cauchy_scale_from_coefficients(coefficients: Sequence[float], S: ScaleLike) -> CauchyScaleResult:
    """D = (sum of coefficients)^2 S for an explicitly supplied coefficient series."""
    base = S.base if isinstance(S, SpdMat) else as_mat(S, "scale matrix")
    a = float(math.fsum(float(c) for c in coefficients))
    return CauchyScaleResult(proportional=True, D=symmetrize(a * a * base), coefficients=[float(c) for c in coefficients],
                             coefficient_sum=a)


def _psd_logdet(S: Any, d: Optional[int] = None) -> Dict[str, Any]:
    arr = as_mat(S, "covariance")
    if arr.shape[0] != arr.shape[1]:
        raise DomainError(f"covariance must be square, got shape {arr.shape}")
    if d is not None and d != arr.shape[0]:
        raise DomainError(f"dimension {d} does not match covariance of size {arr.shape[0]}")
    if not is_symmetric(arr):
        raise DomainError("covariance not symmetric")
    arr = symmetrize(arr)
    w = np.linalg.eigvalsh(arr)
    scale = max(1.0, float(np.max(np.abs(w))))
    if w.min() < -PSD_TOL * scale:
        raise DomainError(f"covariance not positive semidefinite (min eigenvalue {w.min():.3g})")
    sign, logdet = np.linalg.slogdet(arr)
    if w.min() <= 0.0 or sign <= 0:
        return {"d": arr.shape[0], "logdet": -math.inf, "singular": True}
    return {"d": arr.shape[0], "logdet": float(logdet), "singular": False}


def shannon_upper_bound(S: Any, d: Optional[int] = None) -> EntropyReport:
    info = _psd_logdet(S, d)
    d = info["d"]
    if info["singular"]:
        return EntropyReport(alpha=1.0, value=-math.inf, kind="upper_bound", formula="covariance_bound_shannon",
                             components={"half_logdet": -math.inf}, unbounded_below=True)
    half_logdet = 0.5 * info["logdet"]
    const = 0.5 * d * math.log(2.0 * math.pi * math.e)
    return EntropyReport(alpha=1.0, value=const + half_logdet, kind="upper_bound",
                         formula="covariance_bound_shannon",
                         components={"half_log_2pie": const, "half_logdet": half_logdet})


def renyi_upper_bound(S: Any, d: Optional[int] = None, alpha: float = 1.0) -> EntropyReport:
    info = _psd_logdet(S, d)
    d = info["d"]
    c = c_d_alpha(d, alpha)
    if info["singular"]:
        return EntropyReport(alpha=alpha, value=-math.inf, kind="upper_bound", formula="covariance_bound_renyi",
                             components={"c_d_alpha": c, "half_logdet": -math.inf}, unbounded_below=True)
    half_logdet = 0.5 * info["logdet"]
    return EntropyReport(alpha=float(alpha), value=c + half_logdet, kind="upper_bound",
                         formula="covariance_bound_renyi",
                         components={"c_d_alpha": c, "half_logdet": half_logdet})


def model_upper_bound(m: ArmaControlModel, alpha: float, dm_cap: int = 60,
                      margin: float = STABILITY_MARGIN) -> EntropyReport:
    if m.family == "cauchy":
        raise NoFiniteCovarianceError("cauchy residuals have no finite covariance; the covariance bound does not apply")
    cov = covariance_lyapunov(m, dm_cap=dm_cap, margin=margin)
    return renyi_upper_bound(cov.phi[0], m.d, alpha)


def model_entropy(m: ArmaControlModel, alpha: float, tol: float = SERIES_TOL, ptol: float = PROPORTIONALITY_TOL,
                  dm_cap: int = 60, margin: float = STABILITY_MARGIN) -> EntropyReport:
    """Exact value for Gaussian and proportional Cauchy models, the covariance bound for Laplace."""
    if m.family == "gaussian":
        cov = covariance_lyapunov(m, dm_cap=dm_cap, margin=margin)
        report = renyi_gaussian(cov.phi[0], alpha)
        report.components["solve_residual"] = cov.residual
        return report
    if m.family == "cauchy":
        scale = cauchy_scale_matrix(m, tol, ptol, margin)
        if not scale.proportional:
            raise ClosedFormUnavailableError("scale matrix not proportional; closed form unavailable",
                                             max_deviation=scale.max_deviation)
        report = renyi_cauchy(scale.D, m.d, alpha)
        report.components["coefficient_sum"] = scale.coefficient_sum
        report.components["coefficient_tail"] = scale.coefficient_tail
        return report
    return model_upper_bound(m, alpha, dm_cap=dm_cap, margin=margin)
