"""
Dense real-matrix kit used by the rest of the package.

Matrices are plain 2-D float64 numpy arrays. Everything here is a pure
function; inputs are never modified.

Functions:
- as_mat(a, name)
- kron(a, b), vec(a), unvec(v, rows, cols)
- spectral_radius(a)
- block_companion(blocks)
- spd_factor(s) -> SpdMat
- solve(a, b), det(a)
"""
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from src.utils.errors import DomainError, NumericError, SingularMatrixError

SYMMETRY_RTOL = 1e-10
CONDITION_CAP = 1e12


def as_mat(a, name: str = "matrix") -> np.ndarray:
    """Return `a` as a finite 2-D float64 array (1-D input becomes a column)."""
    arr = np.array(a, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DomainError(f"{name} must be a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries")
    return arr


def _square(a, name: str) -> np.ndarray:
    arr = as_mat(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise DomainError(f"{name} must be square, got shape {arr.shape}")
    return arr


def kron(a, b) -> np.ndarray:
    return np.kron(as_mat(a, "a"), as_mat(b, "b"))


def vec(a) -> np.ndarray:
    """Stack the columns of `a` top to bottom into a column vector."""
    return as_mat(a).reshape(-1, 1, order="F")


def unvec(v, rows: int, cols: int) -> np.ndarray:
    return np.asarray(v, dtype=float).reshape(rows, cols, order="F")


def spectral_radius(a) -> float:
    arr = _square(a, "matrix")
    try:
        eig = np.linalg.eigvals(arr)
    except np.linalg.LinAlgError as e:
        raise NumericError(f"eigenvalue iteration did not converge: {e}")
    return float(np.max(np.abs(eig)))


def block_companion(blocks: Sequence[np.ndarray]) -> np.ndarray:
    """
    Block companion matrix with top block-row [C_1 ... C_k] and identity
    blocks on the block subdiagonal.
    """
    if len(blocks) == 0:
        raise DomainError("block_companion needs at least one block")
    d = blocks[0].shape[0]
    k = len(blocks)
    out = np.zeros((d * k, d * k))
    out[:d, :] = np.hstack([as_mat(b) for b in blocks])
    if k > 1:
        out[d:, :-d] = np.eye(d * (k - 1))
    return out


def is_symmetric(a, rtol: float = SYMMETRY_RTOL) -> bool:
    arr = np.asarray(a, dtype=float)
    scale = max(1.0, float(np.max(np.abs(arr))))
    return float(np.max(np.abs(arr - arr.T))) <= rtol * scale


def symmetrize(a) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    return 0.5 * (arr + arr.T)


@dataclass(frozen=True, eq=False)
class SpdMat:
    """Symmetric positive definite matrix together with its Cholesky factor."""

    base: np.ndarray
    factor: np.ndarray

    @property
    def d(self) -> int:
        return self.base.shape[0]

    @property
    def logdet(self) -> float:
        return 2.0 * float(np.sum(np.log(np.diag(self.factor))))

    def scaled(self, c: float) -> "SpdMat":
        return SpdMat(base=c * self.base, factor=np.sqrt(c) * self.factor)


def spd_factor(s, rtol: float = SYMMETRY_RTOL) -> SpdMat:
    arr = _square(s, "scale matrix")
    if not is_symmetric(arr, rtol):
        raise DomainError("scale not symmetric")
    arr = symmetrize(arr)
    c, info = lapack.dpotrf(arr, lower=1)
    if info > 0:
        pivot = int(info) - 1
        raise DomainError(f"scale not positive definite (pivot {pivot})", pivot=pivot)
    if info < 0:
        raise NumericError(f"cholesky factorization failed (info={info})")
    factor = np.tril(c)
    base = arr.copy()
    base.setflags(write=False)
    factor.setflags(write=False)
    return SpdMat(base=base, factor=factor)


def solve(a, b, condition_cap: float = CONDITION_CAP) -> np.ndarray:
    arr = _square(a, "system matrix")
    rhs = as_mat(b, "right-hand side")
    if rhs.shape[0] != arr.shape[0]:
        raise DomainError(f"right-hand side has {rhs.shape[0]} rows, expected {arr.shape[0]}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(arr)
    anorm = float(np.linalg.norm(arr, 1))
    rcond, info = lapack.dgecon(lu, anorm, norm="1")
    if info != 0 or rcond == 0.0 or 1.0 / rcond > condition_cap:
        cond = float("inf") if rcond == 0.0 else 1.0 / rcond
        raise SingularMatrixError(f"matrix is singular or near-singular (condition estimate {cond:.3g})",
                                  condition_estimate=cond)
    return scipy.linalg.lu_solve((lu, piv), rhs)


def det(a) -> float:
    arr = _square(a, "matrix")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(arr)
    swaps = int(np.sum(piv != np.arange(len(piv))))
    sign = -1.0 if swaps % 2 else 1.0
    return sign * float(np.prod(np.diag(lu)))
