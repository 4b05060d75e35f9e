"""
Characteristic function of the stationary output x(t).

    phi_x(s) = prod_j phi_u(M_j' s) phi_w(M*_j' s)

Gaussian:  exp(-1/2 s' Phi(0) s), using the exact covariance.
Cauchy:    exp(-sum_j sqrt(s' K_j K_j' s) + sqrt(s' K*_j K*_j' s)), K_j = M_j L_u.
Laplace:   prod_j 1 / ((1 + 1/2 s' M_j S_u M_j' s)(1 + 1/2 s' M*_j S_w M*_j' s)).

Products are summed in log space. Truncated products carry a bound on the
distance to the infinite product.
"""
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional

import numpy as np

from src.core.covariance import StationaryCovariance, covariance_lyapunov
from src.core.entropy import cauchy_scale_matrix
from src.core.model import STABILITY_MARGIN, ArmaControlModel
from src.core.realization import ImpulseResponse, impulse_response
from src.utils.errors import DomainError

CHARFN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CharFnValue:
    s: np.ndarray
    value: complex
    truncation_error: float
    cross_check: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "s": self.s.tolist(),
            "re": float(self.value.real),
            "im": float(self.value.imag),
            "truncation_error": self.truncation_error,
            "cross_check": self.cross_check,
        }


class CharacteristicFunction:
    """
    Evaluator bound to one model. Keeps the Lyapunov covariance and the
    tightest impulse response computed so far, so grids reuse them.
    """

    def __init__(self, model: ArmaControlModel, cfg: Optional[Dict[str, Any]] = None):
        self.model = model
        self.cfg = cfg or {}
        self.tol = float(self.cfg.get("charfn_tol", CHARFN_TOL))
        self.margin = float(self.cfg.get("stability_margin", STABILITY_MARGIN))
        self.dm_cap = int(self.cfg.get("dm_cap", 60))
        self._cov: Optional[StationaryCovariance] = None
        self._imp: Optional[ImpulseResponse] = None
        self._scale = None
        # largest of ||L_u||_2, ||L_w||_2
        self._lmax = math.sqrt(max(float(np.linalg.norm(model.S_u, 2)), float(np.linalg.norm(model.S_w, 2))))

    def _vector(self, s) -> np.ndarray:
        arr = np.asarray(s, dtype=float).reshape(-1)
        if arr.shape[0] != self.model.d:
            raise DomainError(f"frequency vector has length {arr.shape[0]}, expected {self.model.d}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("frequency vector has non-finite entries")
        return arr

    def _impulse(self, needed_tail: float) -> ImpulseResponse:
        if self._imp is None or self._imp.tail_bound >= needed_tail:
            self._imp = impulse_response(self.model, needed_tail, self.margin)
        return self._imp

    def _covariance(self) -> StationaryCovariance:
        if self._cov is None:
            self._cov = covariance_lyapunov(self.model, dm_cap=self.dm_cap, margin=self.margin)
        return self._cov

    def gaussian(self, s) -> CharFnValue:
        s = self._vector(s)
        cov = self._covariance()
        quad = float(s @ cov.phi[0] @ s)
        value = math.exp(-0.5 * quad)
        err = 0.5 * float(s @ s) * float(np.linalg.norm(cov.phi[0])) * cov.residual * value
        return CharFnValue(s=s, value=complex(value, 0.0), truncation_error=err)

    def _root_terms(self, imp: ImpulseResponse, s: np.ndarray) -> np.ndarray:
        """sqrt(s' M_j S M_j' s) for both residual streams, stacked."""
        L_u = self.model.control.scale.factor
        L_w = self.model.noise.scale.factor
        vu = np.einsum("jab,a->jb", np.stack(imp.M) @ L_u, s)
        vw = np.einsum("jab,a->jb", np.stack(imp.Mstar) @ L_w, s)
        return np.concatenate([np.sqrt(np.sum(vu ** 2, axis=1)), np.sqrt(np.sum(vw ** 2, axis=1))])

    def cauchy(self, s) -> CharFnValue:
        s = self._vector(s)
        norm = float(np.linalg.norm(s))
        if norm == 0.0:
            return CharFnValue(s=s, value=complex(1.0, 0.0), truncation_error=0.0)
        imp = self._impulse(self.tol / (norm * self._lmax))
        value = math.exp(-float(math.fsum(self._root_terms(imp, s))))
        # omitted exponent lies in [0, ||s|| Lmax tail]
        err = value * -math.expm1(-norm * self._lmax * imp.tail_bound)

        if self._scale is None:
            self._scale = cauchy_scale_matrix(self.model, self.tol, margin=self.margin)
        cross = None
        if self._scale.proportional:
            closed = math.exp(-math.sqrt(max(float(s @ self._scale.D @ s), 0.0)))
            cross = abs(closed - value)
        return CharFnValue(s=s, value=complex(value, 0.0), truncation_error=err, cross_check=cross)

    def laplace(self, s) -> CharFnValue:
        s = self._vector(s)
        norm = float(np.linalg.norm(s))
        if norm == 0.0:
            return CharFnValue(s=s, value=complex(1.0, 0.0), truncation_error=0.0)
        imp = self._impulse(math.sqrt(2.0 * self.tol) / (norm * self._lmax))
        q = self._root_terms(imp, s) ** 2
        value = math.exp(-float(math.fsum(np.log1p(0.5 * q))))
        # omitted factors: sum log(1 + q_j / 2) <= 1/2 ||s||^2 Lmax^2 tail^2
        delta = 0.5 * (norm * self._lmax * imp.tail_bound) ** 2
        err = value * -math.expm1(-delta)
        return CharFnValue(s=s, value=complex(value, 0.0), truncation_error=err)

    def evaluate(self, s) -> CharFnValue:
        family = self.model.family
        if family == "gaussian":
            return self.gaussian(s)
        if family == "cauchy":
            return self.cauchy(s)
        return self.laplace(s)

    def evaluate_many(self, points: Iterable) -> List[CharFnValue]:
        return [self.evaluate(s) for s in points]


def charfn_gaussian(m: ArmaControlModel, s) -> CharFnValue:
    return CharacteristicFunction(m).gaussian(s)


def charfn_cauchy(m: ArmaControlModel, s, tol: float = CHARFN_TOL) -> CharFnValue:
    return CharacteristicFunction(m, {"charfn_tol": tol}).cauchy(s)


def charfn_laplace(m: ArmaControlModel, s, tol: float = CHARFN_TOL) -> CharFnValue:
    return CharacteristicFunction(m, {"charfn_tol": tol}).laplace(s)
