"""
Metric helpers: deviations, relative Frobenius distance, batch-means standard errors, coverage checks.
"""

import numpy as np
from typing import List, Sequence

def deviation(computed: float, published: float) -> float:
    # absolute deviation; inf when either side is missing or not finite
    try:
        if computed is None or published is None:
            return float("inf")
        d = abs(float(computed) - float(published))
        return d if np.isfinite(d) else float("inf")
    except (TypeError, ValueError):
        return float("inf")

def rel_frobenius(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    denom = max(float(np.linalg.norm(b)), 1e-300)
    return float(np.linalg.norm(a - b) / denom)

def batch_means(values: np.ndarray, batches: int) -> np.ndarray:
    """
    Split a (n, k) array of consecutive observations into `batches` contiguous
    blocks and return the (batches, k) block means.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    n = values.shape[0]
    batches = max(1, min(int(batches), n))
    size = n // batches
    trimmed = values[: size * batches]
    return trimmed.reshape(batches, size, -1).mean(axis=1)

def standard_error_from_batches(means: np.ndarray) -> np.ndarray:
    # std of the batch means over sqrt(#batches); zeros when only one batch
    means = np.asarray(means, dtype=float)
    b = means.shape[0]
    if b < 2:
        return np.zeros(means.shape[1:])
    return means.std(axis=0, ddof=1) / np.sqrt(b)

def batch_means_se(segments: Sequence[np.ndarray], batches: int) -> np.ndarray:
    """Batch-means standard error pooled over independent segments (replicates)."""
    per_segment = max(2, int(batches) // max(1, len(segments)))
    pooled: List[np.ndarray] = [batch_means(seg, per_segment) for seg in segments]
    return standard_error_from_batches(np.concatenate(pooled, axis=0))

def within_standard_errors(estimate, target, se, k: float = 3.0) -> np.ndarray:
    """Elementwise |estimate - target| <= k * se."""
    estimate = np.asarray(estimate, dtype=float)
    target = np.asarray(target, dtype=float)
    se = np.asarray(se, dtype=float)
    return np.abs(estimate - target) <= k * se
