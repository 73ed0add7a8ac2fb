"""Small statistics helpers for the Monte Carlo harness."""

from __future__ import annotations

import math

__all__ = ["wilson_interval", "paired_delta"]

_Z95 = 1.959963984540054  # two-sided 95%


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Stays valid at low counts where the normal approximation collapses.
    Returns (0, 1) for zero trials.
    """
    if trials <= 0:
        return 0.0, 1.0
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials))
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


def paired_delta(err_a, err_b) -> tuple[float, float, int, int]:
    """Mean and standard error of the paired difference err_a - err_b.

    ``err_a`` / ``err_b`` are boolean frame-error indicators on identical
    noise.  Returns (delta, sigma, n01, n10) where n01 counts frames in which
    only ``a`` failed and n10 frames in which only ``b`` failed.
    """
    import numpy as np

    a = np.asarray(err_a, dtype=np.int8)
    b = np.asarray(err_b, dtype=np.int8)
    if a.shape != b.shape:
        raise ValueError("paired comparison needs identical frame sets")
    n = a.size
    if n == 0:
        return 0.0, 0.0, 0, 0
    d = a - b
    delta = float(d.mean())
    sigma = float(d.std(ddof=0) / math.sqrt(n))
    n01 = int(np.count_nonzero((a == 1) & (b == 0)))
    n10 = int(np.count_nonzero((a == 0) & (b == 1)))
    return delta, sigma, n01, n10
