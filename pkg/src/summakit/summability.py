"""Matrix transforms, the weighted absolute-summability functional and the
four-term splitting of ``T_n - T_{n-1}``.

Indices start at 0 everywhere and ``s_{-1} = 0``.  A prefix of length ``N``
covers ``n = 0..N-1``; the functional sums ``n = 1..N-1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._accum import compensated_cumsum
from .errors import DomainError
from .matrices import DerivedEntries, TriangularMatrix
from .sequences import (
    RealSequence,
    Tolerances,
    partial_sums,
    product,
    sequence,
    flatness,
)

__all__ = [
    "SeriesContext",
    "series_context",
    "factored_terms",
    "a_transform",
    "transform_values",
    "transform_values_abar",
    "SummabilityReport",
    "summability_total",
    "DecompositionRow",
    "decomposition",
    "decomposition_table",
    "preset_weights",
    "WEIGHT_PRESETS",
]

UNDERFLOW = 1e-300


@dataclass(frozen=True)
class SeriesContext:
    terms: RealSequence
    partial_sums: RealSequence


def series_context(terms: RealSequence) -> SeriesContext:
    return SeriesContext(terms, partial_sums(terms))


def factored_terms(C: RealSequence, lam: RealSequence, X: RealSequence) -> SeriesContext:
    """Series with terms ``C(n) * lam(n) * X(n)``."""
    return series_context(product(C, lam, X, name=f"{C.name}*{lam.name}*{X.name}"))


def a_transform(matrix: TriangularMatrix, s: RealSequence, n: int) -> float:
    """``sum_{v=0}^n a(n, v) s(v)``."""
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    return float(np.dot(matrix.row(n), s.values(n + 1)))


def transform_values(matrix: TriangularMatrix, s: RealSequence, stop: int) -> np.ndarray:
    sv = s.values(stop)
    return np.array([np.dot(matrix.row(n), sv[: n + 1]) for n in range(stop)])


def transform_values_abar(derived: DerivedEntries, terms: RealSequence, stop: int) -> np.ndarray:
    """Same transform through ``T_n = sum_i abar(n, i) * terms(i)``."""
    tv = terms.values(stop)
    return np.array([np.dot(derived.abar_row(n), tv[: n + 1]) for n in range(stop)])


def _abs_pow(x: np.ndarray, k: float) -> np.ndarray:
    ax = np.abs(x)
    out = np.zeros_like(ax)
    nz = ax >= UNDERFLOW
    out[nz] = np.exp(k * np.log(ax[nz]))
    return out


@dataclass(frozen=True)
class SummabilityReport:
    k: float
    N: int
    T: np.ndarray            # T_n, n = 0..N-1
    dT: np.ndarray           # T_n - T_{n-1}, with T_{-1} = 0
    alpha: np.ndarray
    increments: np.ndarray   # alpha_n |dT_n|^k, zero at n = 0
    partials: np.ndarray     # S_M = sum_{n=1}^{M} increments
    last_decade_gain: float
    flatness_verdict: str
    increment_slope: float
    path_discrepancy: float  # max |direct - abar path| / max(1, |T|)
    max_abs_s: float

    @property
    def total(self) -> float:
        return float(self.partials[-1])


def summability_total(
    matrix: TriangularMatrix,
    alpha: RealSequence,
    k: float,
    ctx: SeriesContext,
    N: int,
    tol: Tolerances | None = None,
) -> SummabilityReport:
    """Prefix partial sums of ``sum alpha_n |T_n - T_{n-1}|^k``."""
    if not k >= 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if N < 4:
        raise DomainError(f"prefix N must be at least 4, got {N}")
    tol = tol or Tolerances()
    av = np.array(alpha.values(N), dtype=float)
    if np.any(av < 0):
        raise DomainError(f"weights {alpha.name} must be nonnegative")
    T = transform_values(matrix, ctx.partial_sums, N)
    T_bar = transform_values_abar(matrix.derived, ctx.terms, N)
    disc = float(np.max(np.abs(T - T_bar) / np.maximum(1.0, np.abs(T))))
    dT = np.diff(T, prepend=0.0)
    inc = av * _abs_pow(dT, k)
    inc[0] = 0.0
    partials = compensated_cumsum(inc)
    fl = flatness(inc, tol)
    return SummabilityReport(
        k=float(k),
        N=N,
        T=T,
        dT=dT,
        alpha=av,
        increments=inc,
        partials=partials,
        last_decade_gain=fl.tail,
        flatness_verdict=fl.verdict,
        increment_slope=fl.slope,
        path_discrepancy=disc,
        max_abs_s=float(np.max(np.abs(ctx.partial_sums.values(N)))),
    )


@dataclass(frozen=True)
class DecompositionRow:
    n: int
    T_delta: float
    parts: tuple[float, float, float, float]

    @property
    def residual(self) -> float:
        return abs(self.T_delta - math.fsum(self.parts))


def _decomp_parts(derived, lam, X, s, n):
    if n == 0:
        return (0.0, 0.0, 0.0, derived.matrix.row(0)[0] * lam[0] * X[0] * s[0])
    ah = derived.ahat_row(n)
    nxt = ah[1:]                       # ahat(n, i+1), i = 0..n-1
    dlam = lam[:n] - lam[1 : n + 1]
    dX = X[:n] - X[1 : n + 1]
    si = s[:n]
    t1 = float(np.dot(nxt * dlam * X[:n], si))
    t2 = float(np.dot(nxt * lam[1 : n + 1] * dX, si))
    t3 = float(np.dot((ah[:-1] - ah[1:]) * lam[:n] * X[:n], si))
    t4 = float(ah[n] * lam[n] * X[n] * s[n])
    return (t1, t2, t3, t4)


def decomposition(
    matrix: TriangularMatrix,
    lam: RealSequence,
    X: RealSequence,
    s: RealSequence,
    n: int,
) -> DecompositionRow:
    """Split ``T_n - T_{n-1}`` for the series ``sum a_i lam_i X_i``.

    ``s`` are the partial sums of the unfactored series.  ``T_delta`` is
    computed directly from the transform, independent of the four parts.
    """
    if n < 1:
        raise DomainError(f"decomposition needs n >= 1, got {n}")
    stop = n + 1
    lv, Xv, sv = lam.values(stop), X.values(stop), s.values(stop)
    a = np.diff(sv, prepend=0.0)
    terms = a * lv * Xv
    fs = compensated_cumsum(terms)
    T_n = float(np.dot(matrix.row(n), fs))
    T_prev = float(np.dot(matrix.row(n - 1), fs[:n]))
    parts = _decomp_parts(matrix.derived, lv, Xv, sv, n)
    return DecompositionRow(n, T_n - T_prev, parts)


def decomposition_table(
    matrix: TriangularMatrix,
    lam: RealSequence,
    X: RealSequence,
    s: RealSequence,
    N: int,
) -> np.ndarray:
    """``(N, 4)`` array of the four parts for ``n = 0..N-1`` (row 0: ``T_0``)."""
    lv, Xv, sv = lam.values(N), X.values(N), s.values(N)
    out = np.empty((N, 4))
    for n in range(N):
        out[n] = _decomp_parts(matrix.derived, lv, Xv, sv, n)
    return out


# --------------------------------------------------------------------------
# weight presets


def _power_weights(e: float, name: str) -> RealSequence:
    return sequence(name, lambda idx: idx.astype(float) ** e)


def preset_weights(preset: str, k: float = 1.0, delta: float = 0.0, gamma: float = 0.0,
                   pn: RealSequence | None = None) -> RealSequence:
    """Named weight sequences ``alpha_n``.

    ``classic``: ``n^(k-1)``; ``cad``: ``n^(delta k + k - 1)``;
    ``nbar``: ``(P_n / p_n)^(delta k + k - 1)``; ``logpower``:
    ``n^(delta k + k - 1) (ln max(n, 2))^gamma`` with ``alpha_0 = 1``.
    """
    preset = preset.lower()
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if delta < 0:
        raise DomainError(f"delta must be >= 0, got {delta}")
    e = delta * k + k - 1
    if preset == "classic":
        return _power_weights(k - 1, f"n^{k - 1:g}")
    if preset == "cad":
        return _power_weights(e, f"n^{e:g}")
    if preset == "nbar":
        if pn is None:
            raise DomainError("nbar weights need the Riesz sequence pn")
        P = partial_sums(pn)

        def fn(idx):
            stop = int(idx[-1]) + 1
            return (P.values(stop)[idx[0]:] / pn.values(stop)[idx[0]:]) ** e

        return sequence(f"(P/p)^{e:g}", fn)
    if preset == "logpower":
        def fn(idx):
            n = idx.astype(float)
            out = n**e * np.log(np.maximum(n, 2.0)) ** gamma
            out[idx == 0] = 1.0
            return out

        return sequence(f"n^{e:g}log^{gamma:g}", fn)
    raise DomainError(f"unknown weight preset {preset!r}; choose from {sorted(WEIGHT_PRESETS)}")


WEIGHT_PRESETS = ("classic", "cad", "nbar", "logpower")
