"""Index sequences, Cesaro binomial coefficients and empirical sequence-class checks.

A :class:`RealSequence` is a pure map ``n -> float`` for ``n >= 0``.  Values
are produced in vectorised blocks and memoised; a value, once produced, is
never recomputed, so repeated evaluation is bit-identical.

The trend rules at the bottom of the module are shared by every certificate
in the package: finite-prefix data can only support or undermine an
asymptotic statement, never prove it.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from ._accum import compensated_cumsum, readonly
from .errors import DomainError

__all__ = [
    "RealSequence",
    "sequence",
    "from_scalar",
    "from_array",
    "constant",
    "product",
    "difference",
    "scaled",
    "partial_sums",
    "cesaro_coeff",
    "cesaro_coeffs",
    "cesaro_coeff_asymptotic",
    "Verdict",
    "Tolerances",
    "ClassId",
    "SequenceClassCertificate",
    "certify_sequence_class",
    "loglog_slope",
    "trend_verdict",
    "FlatnessResult",
    "flatness",
    "trend_prefixes",
]

DEFAULT_PREFIX = 2048


class RealSequence:
    """Deterministic real sequence backed by a vectorised index function.

    ``fn`` receives an ``int64`` array of consecutive indices and must return
    an array of the same length (a scalar is broadcast).
    """

    __slots__ = ("name", "limit", "_fn", "_cache", "_lock")

    def __init__(self, name: str, fn: Callable[[np.ndarray], np.ndarray], limit: int | None = None):
        self.name = name
        self.limit = limit          # number of available terms; None means unbounded
        self._fn = fn
        self._cache = readonly(np.empty(0))
        self._lock = threading.Lock()

    def values(self, stop: int) -> np.ndarray:
        """Read-only array of the first ``stop`` terms."""
        stop = int(stop)
        if stop < 0:
            raise DomainError(f"{self.name}: negative prefix length {stop}")
        if self.limit is not None and stop > self.limit:
            raise DomainError(f"{self.name}: only {self.limit} terms available, {stop} requested")
        cache = self._cache
        if stop > cache.size:
            with self._lock:
                cache = self._cache
                if stop > cache.size:
                    old = cache.size
                    new = max(stop, 2 * old, 64)
                    if self.limit is not None:
                        new = min(new, self.limit)
                    idx = np.arange(old, new, dtype=np.int64)
                    seg = np.asarray(self._fn(idx), dtype=float)
                    seg = np.broadcast_to(seg, idx.shape)
                    cache = readonly(np.concatenate([cache, seg]))
                    self._cache = cache
        return cache[:stop]

    def __call__(self, n: int) -> float:
        n = int(n)
        if n < 0:
            raise DomainError(f"{self.name}: negative index {n}")
        return float(self.values(n + 1)[n])

    def __repr__(self) -> str:
        return f"RealSequence({self.name!r})"


def sequence(name: str, fn: Callable[[np.ndarray], np.ndarray], limit: int | None = None) -> RealSequence:
    return RealSequence(name, fn, limit)


def from_scalar(name: str, fn: Callable[[int], float]) -> RealSequence:
    """Wrap a plain ``int -> float`` function."""
    return RealSequence(
        name, lambda idx: np.fromiter((fn(int(i)) for i in idx), float, idx.size)
    )


def from_array(name: str, data: Sequence[float]) -> RealSequence:
    """Finite sequence; indices beyond the data raise :class:`DomainError`."""
    data = readonly(np.array(data, dtype=float))
    return RealSequence(name, lambda idx: data[idx], limit=data.size)


def _joint_limit(seqs) -> int | None:
    limits = [s.limit for s in seqs if s.limit is not None]
    return min(limits) if limits else None


def constant(c: float, name: str | None = None) -> RealSequence:
    c = float(c)
    return RealSequence(name or f"const({c:g})", lambda idx: np.full(idx.size, c))


def product(*seqs: RealSequence, name: str | None = None) -> RealSequence:
    def fn(idx):
        stop = int(idx[-1]) + 1
        out = np.ones(idx.size)
        for s in seqs:
            out = out * s.values(stop)[idx[0]:]
        return out

    return RealSequence(name or "*".join(s.name for s in seqs), fn, _joint_limit(seqs))


def difference(a: RealSequence, b: RealSequence, name: str | None = None) -> RealSequence:
    def fn(idx):
        stop = int(idx[-1]) + 1
        return a.values(stop)[idx[0]:] - b.values(stop)[idx[0]:]

    return RealSequence(name or f"({a.name})-({b.name})", fn, _joint_limit((a, b)))


def scaled(seq: RealSequence, c: float, name: str | None = None) -> RealSequence:
    c = float(c)

    def fn(idx):
        return c * seq.values(int(idx[-1]) + 1)[idx[0]:]

    return RealSequence(name or f"{c:g}*{seq.name}", fn, seq.limit)


def partial_sums(terms: RealSequence, name: str | None = None) -> RealSequence:
    """``s_n = terms(0) + ... + terms(n)`` (compensated)."""

    def fn(idx):
        return compensated_cumsum(terms.values(int(idx[-1]) + 1))[idx[0]:]

    return RealSequence(name or f"cumsum({terms.name})", fn, terms.limit)


# --------------------------------------------------------------------------
# Cesaro numbers A_n^alpha = Gamma(n+alpha+1) / (Gamma(alpha+1) Gamma(n+1))


class _CesaroTable:
    """Growing table of A_n^alpha for a fixed alpha, by the ratio recurrence."""

    def __init__(self, alpha: float):
        self.alpha = alpha
        self.data = readonly(np.ones(1))
        self.lock = threading.Lock()

    def upto(self, stop: int) -> np.ndarray:
        data = self.data
        if stop > data.size:
            with self.lock:
                data = self.data
                if stop > data.size:
                    new = max(stop, 2 * data.size, 256)
                    a = self.alpha
                    vals = data.tolist()
                    cur = vals[-1]
                    for n in range(data.size, new):
                        # increment form: the rounding error of each step is
                        # scaled by alpha/n, and integer alpha stays exact
                        cur = cur + (cur * a) / n
                        vals.append(cur)
                    data = readonly(np.array(vals))
                    self.data = data
        return data[:stop]


_tables: dict[float, _CesaroTable] = {}
_tables_lock = threading.Lock()


def _table(alpha: float) -> _CesaroTable:
    alpha = float(alpha)
    tab = _tables.get(alpha)
    if tab is None:
        with _tables_lock:
            tab = _tables.setdefault(alpha, _CesaroTable(alpha))
    return tab


def cesaro_coeffs(stop: int, alpha: float) -> np.ndarray:
    """A_0^alpha .. A_{stop-1}^alpha.

    No domain check: the Cesaro matrix of order ``alpha`` needs order
    ``alpha - 1`` numbers, which may lie below -1.
    """
    return _table(alpha).upto(int(stop))


def cesaro_coeff(n: int, alpha: float) -> float:
    if alpha <= -1:
        raise DomainError(f"Cesaro order must exceed -1, got {alpha}")
    if n < 0:
        raise DomainError(f"index must be nonnegative, got {n}")
    return float(cesaro_coeffs(n + 1, alpha)[n])


def cesaro_coeff_asymptotic(n: int, alpha: float) -> float:
    """Leading term n^alpha / Gamma(alpha+1); a diagnostic comparator only."""
    if alpha <= -1:
        raise DomainError(f"Cesaro order must exceed -1, got {alpha}")
    if n < 1:
        raise DomainError(f"asymptotic form needs n >= 1, got {n}")
    return n**alpha / math.gamma(alpha + 1.0)


# --------------------------------------------------------------------------
# trend rules


class Verdict(str, Enum):
    SUPPORTED = "supported"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Tolerances:
    """Thresholds of the finite-prefix verdict heuristics."""

    lower_slope_tol: float = 0.02   # bounded-below statistics: slope >= -tol
    upper_slope_tol: float = 0.05   # bounded-above statistics: slope <= +tol
    degrade_factor: float = 2.0     # monotone worsening N/4 -> N that counts as violated
    flat_tol: float = 1e-3
    flat_slope: float = -1.05
    growth_slope: float = -0.95
    growth_gain: float = 0.10
    exact_tol: float = 1e-10
    truncation_tol: float = 0.05
    max_skip_fraction: float = 0.10
    noise_floor: float = 1e-12      # ratio statistics below this are rounding noise


def trend_prefixes(N: int) -> tuple[int, int, int]:
    return (max(1, N // 4), max(1, N // 2), N)


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x over positive finite pairs."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    if ok.sum() < 2:
        return math.nan
    lx, ly = np.log(x[ok]), np.log(y[ok])
    if np.ptp(lx) == 0:
        return math.nan
    return float(np.polyfit(lx, ly, 1)[0])


def trend_verdict(
    prefixes: Sequence[int], stats: Sequence[float], bound: str, tol: Tolerances
) -> tuple[Verdict, float]:
    """Verdict for a statistic that must stay bounded ``"above"`` or ``"below"``.

    ``stats`` are the statistic at increasing ``prefixes``; the last one is the
    witness.  Supported when the log-log slope stays within tolerance,
    violated when the statistic worsens monotonically by ``degrade_factor``.
    """
    stats = [float(s) for s in stats]
    slope = loglog_slope(prefixes, stats)
    last, first = stats[-1], stats[0]
    if bound == "below":
        if not math.isfinite(last) or last <= 0.0:
            return Verdict.VIOLATED, slope
        ok = math.isfinite(slope) and slope >= -tol.lower_slope_tol
        monotone = all(b <= a for a, b in zip(stats, stats[1:]))
        worse = first / last if last > 0 else math.inf
    elif bound == "above":
        if not math.isfinite(last):
            return Verdict.VIOLATED, slope
        if last == 0.0 and all(s == 0.0 for s in stats):
            return Verdict.SUPPORTED, 0.0
        ok = math.isfinite(slope) and slope <= tol.upper_slope_tol
        monotone = all(b >= a for a, b in zip(stats, stats[1:]))
        worse = last / first if first > 0 else math.inf
    else:
        raise ValueError(f"bound must be 'above' or 'below', not {bound!r}")
    if ok:
        return Verdict.SUPPORTED, slope
    if monotone and worse >= tol.degrade_factor:
        return Verdict.VIOLATED, slope
    return Verdict.INCONCLUSIVE, slope


@dataclass(frozen=True)
class FlatnessResult:
    verdict: str        # "flat" | "growing" | "inconclusive"
    total: float
    tail: float
    slope: float


def flatness(increments: np.ndarray, tol: Tolerances) -> FlatnessResult:
    """Judge whether the partial sums of nonnegative ``increments`` level off.

    ``increments[n]`` is the term at index ``n``; the prefix has ``N = len``
    terms.  The tail is the sum over ``N/2 < n < N``.  The slope is fitted to
    increment densities on geometric bins over ``[N/8, N)`` so that zero or
    oscillating terms do not break the fit.
    """
    inc = np.asarray(increments, dtype=float)
    N = inc.size
    total = float(compensated_cumsum(inc)[-1]) if N else 0.0
    tail = float(compensated_cumsum(inc[N // 2 + 1:])[-1]) if N > N // 2 + 1 else 0.0
    slope = _increment_slope(inc)
    if tail <= tol.flat_tol * max(total, 1e-3):
        return FlatnessResult("flat", total, tail, slope)
    if math.isfinite(slope) and slope <= tol.flat_slope:
        return FlatnessResult("flat", total, tail, slope)
    if math.isfinite(slope) and slope >= tol.growth_slope and tail >= tol.growth_gain * total:
        return FlatnessResult("growing", total, tail, slope)
    return FlatnessResult("inconclusive", total, tail, slope)


def _increment_slope(inc: np.ndarray, bins: int = 12) -> float:
    N = inc.size
    lo = max(1, N // 8)
    if N - lo < 4:
        return math.nan
    edges = np.unique(np.round(np.geomspace(lo, N, bins + 1)).astype(np.int64))
    if edges.size < 3:
        return math.nan
    csum = np.concatenate([[0.0], np.cumsum(inc)])
    widths = np.diff(edges).astype(float)
    sums = csum[edges[1:]] - csum[edges[:-1]]
    centres = np.sqrt(edges[:-1] * np.maximum(edges[1:] - 1, edges[:-1]).astype(float))
    dens = sums / widths
    if (dens > 0).sum() < 3:
        return math.nan
    return loglog_slope(centres, dens)


# --------------------------------------------------------------------------
# sequence classes


class ClassId(str, Enum):
    ALMOST_DECREASING = "ALMOST_DECREASING"
    QUASI_POWER_DECREASING = "QUASI_POWER_DECREASING"
    BV = "BV"
    RATIO_BOUNDED = "RATIO_BOUNDED"


@dataclass(frozen=True)
class SequenceClassCertificate:
    class_id: ClassId
    prefix: int
    witness: float
    trend_slope: float
    verdict: Verdict
    params: dict = field(default_factory=dict)
    statistics: tuple = ()   # ((prefix, statistic), ...) used for the trend
    notes: str = ""


def _almost_decreasing_witness(x: np.ndarray) -> float:
    """min over n <= m of x[n]/x[m]; O(len) via suffix maxima."""
    if x.size == 0:
        return 1.0
    suffix_max = np.maximum.accumulate(x[::-1])[::-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(suffix_max > 0, x / suffix_max, 1.0)
    return float(r.min())


def certify_sequence_class(
    seq: RealSequence,
    class_id: ClassId | str,
    params: dict | None = None,
    N: int = DEFAULT_PREFIX,
    tol: Tolerances | None = None,
) -> SequenceClassCertificate:
    """Check a sequence-class property on indices ``1..N``.

    ``QUASI_POWER_DECREASING`` takes ``params={"beta": b}``.
    """
    class_id = ClassId(class_id)
    params = dict(params or {})
    tol = tol or Tolerances()
    if N < 8:
        raise DomainError(f"prefix N must be at least 8, got {N}")
    vals = np.array(seq.values(N + 1), dtype=float)
    if not np.all(np.isfinite(vals[1:])):
        raise DomainError(f"{seq.name}: non-finite terms in the prefix")
    prefixes = trend_prefixes(N)
    n = np.arange(N + 1, dtype=float)

    if class_id in (ClassId.ALMOST_DECREASING, ClassId.QUASI_POWER_DECREASING):
        if np.any(vals[1:] < 0):
            raise DomainError(f"{seq.name}: negative terms, decreasingness classes need x_n >= 0")
        x = vals.copy()
        if class_id is ClassId.QUASI_POWER_DECREASING:
            if "beta" not in params:
                raise DomainError("QUASI_POWER_DECREASING needs params['beta']")
            x = x * n ** float(params["beta"])
        stats = [_almost_decreasing_witness(x[1:P + 1]) for P in prefixes]
        verdict, slope = trend_verdict(prefixes, stats, "below", tol)
        return SequenceClassCertificate(
            class_id, N, stats[-1], slope, verdict, params, tuple(zip(prefixes, stats))
        )

    if class_id is ClassId.BV:
        inc = np.zeros(N)
        inc[1:] = np.abs(vals[1:N] - vals[2:N + 1])   # |x_n - x_{n+1}|, n = 1..N-1
        fl = flatness(inc, tol)
        csum = compensated_cumsum(inc)
        stats = [float(csum[P - 1]) for P in prefixes]
        verdict = {"flat": Verdict.SUPPORTED, "growing": Verdict.VIOLATED}.get(
            fl.verdict, Verdict.INCONCLUSIVE
        )
        return SequenceClassCertificate(
            class_id, N, fl.total, fl.slope, verdict, params, tuple(zip(prefixes, stats)),
            notes=f"increment rule: {fl.verdict}, tail {fl.tail:.6g}",
        )

    # RATIO_BOUNDED: |x_{n+1}| / |x_n| over n = 1..N-1 with x_n != 0
    a = np.abs(vals)
    num, den = a[2:N + 1], a[1:N]
    ok = den != 0
    if not ok.any():
        return SequenceClassCertificate(
            class_id, N, 0.0, math.nan, Verdict.INCONCLUSIVE, params, (),
            notes="all terms are zero",
        )
    ratios = np.where(ok, num / np.where(ok, den, 1.0), 0.0)
    running = np.maximum.accumulate(ratios)
    stats = [float(running[P - 2]) if P >= 2 else 0.0 for P in prefixes]
    verdict, slope = trend_verdict(prefixes, stats, "above", tol)
    return SequenceClassCertificate(
        class_id, N, stats[-1], slope, verdict, params, tuple(zip(prefixes, stats))
    )
