"""
Companion-form embedding of the ARMA control system and its impulse response.

The stacked information vector
    X(t) = [x(t) .. x(t-p+1), u(t) .. u(t-r+1), w(t) .. w(t-q+1)]
follows X(t) = theta X(t-1) + J1 u(t) + J2 w(t), and x(t) = I_sel X(t).
Blocks with r = 0 or q = 0 are left out entirely. A pure moving-average
model (p = 0) keeps one output block with a zero AR coefficient so that
I_sel still picks x(t).
"""
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.core.model import STABILITY_MARGIN, ArmaControlModel, ar_companion, is_stable
from src.utils.errors import ArityError, DegenerateModelError, DomainError, NumericError, StabilityError

MAX_IMPULSE_TERMS = 100000
EQUIVALENCE_ATOL = 1e-10
# squaring stops once ||theta^k|| drops below this or k reaches MAX_POWER
CONTRACTION_TARGET = 0.5
MAX_POWER = 4096


@dataclass(frozen=True, eq=False)
class CompanionRealization:
    d: int
    p: int
    r: int
    q: int
    theta: np.ndarray
    sel_I: np.ndarray
    sel_J1: np.ndarray
    sel_J2: np.ndarray

    @property
    def m(self) -> int:
        return self.p + self.r + self.q

    @property
    def theta11(self) -> np.ndarray:
        n = self.d * self.p
        return self.theta[:n, :n]


@dataclass(frozen=True, eq=False)
class ImpulseResponse:
    M: Tuple[np.ndarray, ...]
    Mstar: Tuple[np.ndarray, ...]
    tail_bound: float
    N: int
    rate: float = 0.0

    def frobenius_norms(self) -> Tuple[np.ndarray, np.ndarray]:
        return (np.array([np.linalg.norm(a) for a in self.M]),
                np.array([np.linalg.norm(a) for a in self.Mstar]))

    def sup_norm(self) -> float:
        """Bound on sup_j max(||M_j||_F, ||M*_j||_F) over all j, computed or not."""
        m_norms, s_norms = self.frobenius_norms()
        return float(max(m_norms.max(), s_norms.max(), self.tail_bound))


def build_companion(m: ArmaControlModel) -> CompanionRealization:
    if m.p == 0 and m.r == 0 and m.q == 0:
        raise DegenerateModelError("model has p = r = q = 0; use the direct path (x = u + w)")
    d = m.d
    p_blocks = max(m.p, 1)
    n = d * (p_blocks + m.r + m.q)
    theta = np.zeros((n, n))
    theta[:d * p_blocks, :d * p_blocks] = ar_companion(m) if m.p else np.zeros((d, d))

    u0 = d * p_blocks
    w0 = u0 + d * m.r
    for j, b in enumerate(m.B):
        theta[:d, u0 + j * d:u0 + (j + 1) * d] = b
    for k, dk in enumerate(m.D):
        theta[:d, w0 + k * d:w0 + (k + 1) * d] = dk
    # history shifts of the stored residual blocks
    for j in range(1, m.r):
        theta[u0 + j * d:u0 + (j + 1) * d, u0 + (j - 1) * d:u0 + j * d] = np.eye(d)
    for k in range(1, m.q):
        theta[w0 + k * d:w0 + (k + 1) * d, w0 + (k - 1) * d:w0 + k * d] = np.eye(d)

    sel_I = np.zeros((d, n))
    sel_I[:, :d] = np.eye(d)
    sel_J1 = np.zeros((n, d))
    sel_J1[:d] = np.eye(d)
    if m.r:
        sel_J1[u0:u0 + d] = np.eye(d)
    sel_J2 = np.zeros((n, d))
    sel_J2[:d] = np.eye(d)
    if m.q:
        sel_J2[w0:w0 + d] = np.eye(d)

    for a in (theta, sel_I, sel_J1, sel_J2):
        a.setflags(write=False)
    return CompanionRealization(d=d, p=p_blocks, r=m.r, q=m.q, theta=theta,
                                sel_I=sel_I, sel_J1=sel_J1, sel_J2=sel_J2)


def _recursion(A: Sequence[np.ndarray], C: Sequence[np.ndarray], N: int, d: int) -> Tuple[np.ndarray, ...]:
    """M_i = C_i + sum_{j=1..min(i,p)} A_j M_{i-j}, with M_0 = I assigned."""
    out = [np.eye(d)]
    for i in range(1, N + 1):
        acc = np.array(C[i - 1], dtype=float) if i <= len(C) else np.zeros((d, d))
        for j in range(1, min(i, len(A)) + 1):
            acc = acc + A[j - 1] @ out[i - j]
        out.append(acc)
    return tuple(out)


def _contraction(theta: np.ndarray) -> Tuple[int, float, float]:
    """
    Find k with c = ||theta^k||_2 < 1 and G = max_{0<=i<k} ||theta^i||_2, so
    that ||theta^n||_2 <= G * c^floor(n/k) for every n.
    """
    power = theta.copy()
    k = 1
    c = float(np.linalg.norm(power, 2))
    while c >= CONTRACTION_TARGET and k < MAX_POWER:
        power = power @ power
        k *= 2
        c = float(np.linalg.norm(power, 2))
    if not c < 1.0:
        raise NumericError(f"no contracting power of the companion matrix up to {k}")
    G = 1.0
    P = np.eye(theta.shape[0])
    for _ in range(1, k):
        P = P @ theta
        G = max(G, float(np.linalg.norm(P, 2)))
    return k, c, G


def _tail(scale: float, G: float, k: int, c: float, N: int) -> float:
    """Bound on sum_{n>N} (||M_n||_F + ||M*_n||_F)."""
    return scale * G * k * c ** ((N + 1) // k) / (1.0 - c)


def truncation_index(real: CompanionRealization, tol: float, minimum: int,
                     max_terms: int = MAX_IMPULSE_TERMS) -> Tuple[int, float, float]:
    """Smallest N >= minimum whose geometric envelope certifies tail < tol; returns (N, tail, rate)."""
    k, c, G = _contraction(np.asarray(real.theta))
    # ||I_sel||_2 = 1, ||J||_2 = sqrt(#identity blocks), ||X||_F <= sqrt(d) ||X||_2
    scale = math.sqrt(real.d) * (np.linalg.norm(real.sel_J1, 2) + np.linalg.norm(real.sel_J2, 2))
    if c == 0.0:
        t = 1
    else:
        ratio = tol * (1.0 - c) / (scale * G * k)
        t = 0 if ratio >= 1.0 else int(math.ceil(math.log(ratio) / math.log(c)))
    N = max(minimum, t * k - 1)
    tail = _tail(scale, G, k, c, N)
    while tail >= tol:
        N += k
        tail = _tail(scale, G, k, c, N)
    if N > max_terms:
        raise NumericError(f"impulse response needs {N} terms (cap {max_terms}); spectral radius too close to 1")
    return N, tail, c ** (1.0 / k)


def _verify_equivalence(real: CompanionRealization, M: Sequence[np.ndarray], Mstar: Sequence[np.ndarray],
                        atol: float = EQUIVALENCE_ATOL) -> float:
    theta = np.asarray(real.theta)
    v1 = np.asarray(real.sel_J1)
    v2 = np.asarray(real.sel_J2)
    d = real.d
    worst = 0.0
    for j in range(len(M)):
        scale = max(1.0, float(np.max(np.abs(M[j]))), float(np.max(np.abs(Mstar[j]))))
        gap = max(float(np.max(np.abs(v1[:d] - M[j]))), float(np.max(np.abs(v2[:d] - Mstar[j])))) / scale
        worst = max(worst, gap)
        v1 = theta @ v1
        v2 = theta @ v2
    if worst > atol:
        raise NumericError(f"recursion and companion powers disagree by {worst:.3g}")
    return worst


def companion_impulse(real: CompanionRealization, N: int) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """I_sel theta^j J1 and I_sel theta^j J2 for j = 0..N."""
    theta = np.asarray(real.theta)
    v1 = np.asarray(real.sel_J1)
    v2 = np.asarray(real.sel_J2)
    M, Mstar = [], []
    for _ in range(N + 1):
        M.append(v1[:real.d].copy())
        Mstar.append(v2[:real.d].copy())
        v1 = theta @ v1
        v2 = theta @ v2
    return M, Mstar


def impulse_response(m: ArmaControlModel, tol: float = 1e-10, margin: float = STABILITY_MARGIN,
                     max_terms: int = MAX_IMPULSE_TERMS, verify: bool = True) -> ImpulseResponse:
    if not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    verdict = is_stable(m, margin)
    if not verdict.stable:
        raise StabilityError(verdict.spectral_radius)

    minimum = max(m.p, m.r, m.q) + 1
    real: Optional[CompanionRealization] = None
    if m.p == 0 and m.r == 0 and m.q == 0:
        N, tail, rate = minimum, 0.0, 0.0
    else:
        real = build_companion(m)
        N, tail, rate = truncation_index(real, tol, minimum, max_terms)

    M = _recursion(m.A, m.B, N, m.d)
    Mstar = _recursion(m.A, m.D, N, m.d)
    if verify and real is not None:
        _verify_equivalence(real, M, Mstar)
    return ImpulseResponse(M=M, Mstar=Mstar, tail_bound=tail, N=N, rate=rate)


def recursion_impulse(m: ArmaControlModel, N: int) -> Tuple[Tuple[np.ndarray, ...], Tuple[np.ndarray, ...]]:
    """M_0..M_N and M*_0..M*_N from the coefficient recursion, no truncation logic."""
    return _recursion(m.A, m.B, N, m.d), _recursion(m.A, m.D, N, m.d)


def autocov_recursion_step(phi_prev: Sequence[np.ndarray], A: Sequence[np.ndarray]) -> np.ndarray:
    """
    Phi(tau) = sum_{i=1..p} A_i Phi(tau - i), valid for tau > max(r, q).
    `phi_prev` holds the history in time order, ending with Phi(tau - 1).
    """
    p = len(A)
    if len(phi_prev) < max(p, 1):
        raise ArityError(f"autocovariance recursion needs {max(p, 1)} preceding blocks, got {len(phi_prev)}")
    out = np.zeros_like(np.asarray(phi_prev[-1], dtype=float))
    for i in range(1, p + 1):
        out = out + A[i - 1] @ phi_prev[-i]
    return out
