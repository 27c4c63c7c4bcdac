"""Error-compensated accumulation helpers.

``np.add.accumulate`` is sequential, so the rounding error of every step can
be recovered exactly with Knuth's TwoSum and folded back in afterwards.  The
result is as accurate as a cumulative sum carried out in twice the working
precision, while staying fully vectorised.
"""
from __future__ import annotations

import numpy as np


def compensated_cumsum(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return x.copy()
    s = np.add.accumulate(x)
    prev = np.empty_like(s)
    prev[0] = 0.0
    prev[1:] = s[:-1]
    bp = s - prev
    err = (prev - (s - bp)) + (x - bp)
    return s + np.add.accumulate(err)


def compensated_suffix_sums(x: np.ndarray) -> np.ndarray:
    """``out[v] = sum(x[v:])`` with compensated accumulation."""
    x = np.asarray(x, dtype=float)
    return compensated_cumsum(x[::-1])[::-1]


def compensated_sum(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return 0.0
    return float(compensated_cumsum(x)[-1])


def readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a
