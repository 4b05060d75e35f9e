"""
Stationary covariance of the ARMA control output.

Two independent routes:
- covariance_lyapunov: solve (I - theta (x) theta) vec(Phi~) = vec(J1 S_u J1' + J2 S_w J2')
  on the companion embedding and read Phi(0..p-1) off the leading block row.
- covariance_series: truncated sum of M_{j+tau} S_u M_j' + M*_{j+tau} S_w M*_j'
  with a certified bound on the discarded mass.
autocovariance() stitches them together with the AR recursion for long lags.
"""
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.model import STABILITY_MARGIN, ArmaControlModel, is_stable
from src.core.numerics import CONDITION_CAP, kron, solve, symmetrize, unvec, vec
from src.core.realization import (ImpulseResponse, autocov_recursion_step, build_companion,
                                  impulse_response)
from src.utils.errors import ModelSizeError, NoFiniteCovarianceError, StabilityError

DM_CAP = 60
SERIES_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class StationaryCovariance:
    phi: Tuple[np.ndarray, ...]
    method: str
    phi_tilde0: Optional[np.ndarray] = None
    residual: float = 0.0
    tail_bound: float = 0.0
    cross_check_gap: Optional[float] = None

    @property
    def tau_max(self) -> int:
        return len(self.phi) - 1

    def at(self, tau: int) -> np.ndarray:
        """Phi(tau) for either sign of tau; Phi(-tau) = Phi(tau)'."""
        if tau < 0:
            return self.phi[-tau].T
        return self.phi[tau]

    def to_records(self) -> List[Dict[str, Any]]:
        rows = []
        for tau, block in enumerate(self.phi):
            for i in range(block.shape[0]):
                for j in range(block.shape[1]):
                    rows.append({"tau": tau, "row": i, "col": j, "value": float(block[i, j])})
        return rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "phi": [b.tolist() for b in self.phi],
            "residual": self.residual,
            "tail_bound": self.tail_bound,
            "cross_check_gap": self.cross_check_gap,
        }


def _require_finite_covariance(m: ArmaControlModel) -> None:
    if m.family == "cauchy":
        raise NoFiniteCovarianceError("cauchy residuals have no finite covariance")


def _require_stable(m: ArmaControlModel, margin: float) -> None:
    verdict = is_stable(m, margin)
    if not verdict.stable:
        raise StabilityError(verdict.spectral_radius)


def covariance_lyapunov(m: ArmaControlModel, dm_cap: int = DM_CAP, margin: float = STABILITY_MARGIN,
                        condition_cap: float = CONDITION_CAP) -> StationaryCovariance:
    _require_finite_covariance(m)
    _require_stable(m, margin)

    if m.p == 0 and m.r == 0 and m.q == 0:
        phi0 = symmetrize(m.S_u + m.S_w)
        return StationaryCovariance(phi=(phi0,), method="lyapunov", phi_tilde0=phi0, residual=0.0)

    real = build_companion(m)
    n = real.d * real.m
    if n > dm_cap:
        raise ModelSizeError(
            f"companion dimension dm = {n} exceeds the cap {dm_cap}; "
            f"the dense solve has (dm)^2 = {n * n} unknowns",
            dm=n, cap=dm_cap)

    theta = np.asarray(real.theta)
    lhs = np.eye(n * n) - kron(theta, theta)
    S_tilde = real.sel_J1 @ m.S_u @ real.sel_J1.T + real.sel_J2 @ m.S_w @ real.sel_J2.T
    rhs = vec(S_tilde)
    x = solve(lhs, rhs, condition_cap=condition_cap)
    residual = float(np.linalg.norm(lhs @ x - rhs) / np.linalg.norm(rhs))

    phi_tilde0 = symmetrize(unvec(x, n, n))
    d = real.d
    phi = tuple(phi_tilde0[:d, k * d:(k + 1) * d].copy() for k in range(real.p))
    return StationaryCovariance(phi=phi, method="lyapunov", phi_tilde0=phi_tilde0, residual=residual)


def _lagged(imp: ImpulseResponse, S_u: np.ndarray, S_w: np.ndarray, tau: int) -> np.ndarray:
    M = np.stack(imp.M)
    Ms = np.stack(imp.Mstar)
    n = len(imp.M) - tau
    if n <= 0:
        return np.zeros_like(S_u)
    out = (np.einsum("jab,bc,jdc->ad", M[tau:], S_u, M[:n])
           + np.einsum("jab,bc,jdc->ad", Ms[tau:], S_w, Ms[:n]))
    return symmetrize(out) if tau == 0 else out


def covariance_series(m: ArmaControlModel, tol: float = SERIES_TOL, tau_max: int = 0,
                      margin: float = STABILITY_MARGIN) -> StationaryCovariance:
    _require_finite_covariance(m)
    imp = impulse_response(m, tol, margin)
    smax = max(float(np.linalg.norm(m.S_u, 2)), float(np.linalg.norm(m.S_w, 2)))
    factor = smax * imp.sup_norm()
    if factor * imp.tail_bound >= tol:
        imp = impulse_response(m, tol / (2.0 * factor), margin)
    tail = smax * imp.sup_norm() * imp.tail_bound

    phi = tuple(_lagged(imp, m.S_u, m.S_w, tau) for tau in range(tau_max + 1))
    return StationaryCovariance(phi=phi, method="series", residual=0.0, tail_bound=tail)


def autocovariance(m: ArmaControlModel, tau_max: int, tol: float = SERIES_TOL, dm_cap: int = DM_CAP,
                   margin: float = STABILITY_MARGIN) -> StationaryCovariance:
    """
    Phi(0..tau_max): companion blocks for tau < p, the lagged series for
    p <= tau <= max(r, q), the AR recursion beyond max(r, q).
    """
    lyap = covariance_lyapunov(m, dm_cap=dm_cap, margin=margin)
    phis: List[np.ndarray] = list(lyap.phi[:tau_max + 1])
    h = m.max_ma_order
    series: Optional[StationaryCovariance] = None
    for tau in range(len(phis), tau_max + 1):
        if tau <= h:
            if series is None:
                series = covariance_series(m, tol, tau_max=min(h, tau_max), margin=margin)
            phis.append(series.phi[tau])
        else:
            phis.append(autocov_recursion_step(phis, m.A))
    return StationaryCovariance(
        phi=tuple(phis),
        method="lyapunov",
        phi_tilde0=lyap.phi_tilde0,
        residual=lyap.residual,
        tail_bound=series.tail_bound if series is not None else 0.0,
    )


def compare_methods(m: ArmaControlModel, tol: float = SERIES_TOL, dm_cap: int = DM_CAP,
                    margin: float = STABILITY_MARGIN) -> Dict[str, Any]:
    """Frobenius gap between the Lyapunov and series Phi(0), next to the series tail bound."""
    lyap = covariance_lyapunov(m, dm_cap=dm_cap, margin=margin)
    series = covariance_series(m, tol, margin=margin)
    gap = float(np.linalg.norm(lyap.phi[0] - series.phi[0]))
    return {
        "gap": gap,
        "tail_bound": series.tail_bound,
        "solve_residual": lyap.residual,
        "agrees": gap <= series.tail_bound + 1e-8,
    }


def psd_violation(S: Sequence[Sequence[float]]) -> float:
    """Most negative eigenvalue of the symmetric part, clipped at zero."""
    w = np.linalg.eigvalsh(symmetrize(np.asarray(S, dtype=float)))
    return float(max(0.0, -w.min()))
