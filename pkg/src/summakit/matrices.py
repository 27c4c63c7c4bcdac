"""Lower-triangular summability matrices and their derived (bar / hat) entries.

Matrices are entry-function based: nothing is stored densely.  Each family
exposes a vectorised ``row(n)`` (entries ``v = 0..n``) from which scalar
``entry(n, v)`` is read, so both paths agree bit for bit.

Difference convention used throughout: ``Delta_i u = u_i - u_{i+1}``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Mapping

import numpy as np

from ._accum import compensated_suffix_sums, readonly
from .errors import DomainError, UnsupportedFamilyError
from .sequences import RealSequence, cesaro_coeffs, partial_sums

__all__ = [
    "Family",
    "TriangularMatrix",
    "DerivedEntries",
    "build_matrix",
    "derive",
    "ahat_closed_form",
    "ahat_closed_form_row",
    "delta_ahat_closed_form",
]


class Family(str, Enum):
    CESARO = "CESARO"
    RHALY = "RHALY"
    P_CESARO = "P_CESARO"
    RIESZ = "RIESZ"
    CUSTOM = "CUSTOM"


@dataclass(frozen=True, eq=False)
class TriangularMatrix:
    family: Family
    params: Mapping[str, Any]
    row_fn: Callable[[int], np.ndarray] = field(repr=False)
    label: str = ""

    def row(self, n: int) -> np.ndarray:
        """Entries ``a(n, 0..n)``."""
        if n < 0:
            raise DomainError(f"row index must be nonnegative, got {n}")
        return self.row_fn(int(n))

    def entry(self, n: int, v: int) -> float:
        if not 0 <= v <= n:
            raise DomainError(f"entry ({n}, {v}) outside the triangle")
        return float(self.row(n)[v])

    def diagonal(self, stop: int) -> np.ndarray:
        """``a(n, n)`` for ``n < stop``."""
        fast = _DIAGONALS.get(self.family)
        if fast is not None:
            return fast(self, stop)
        return np.array([self.row(n)[n] for n in range(stop)])

    @functools.cached_property
    def derived(self) -> "DerivedEntries":
        return DerivedEntries(self)

    def __repr__(self) -> str:
        return f"TriangularMatrix({self.label or self.family.value})"


def _cesaro_row(alpha: float):
    def row(n):
        lower = cesaro_coeffs(n + 1, alpha - 1.0)
        top = cesaro_coeffs(n + 1, alpha)[n]
        return lower[::-1] / top

    return row


def _rhaly_row(t: float):
    def row(n):
        return t ** np.arange(n, -1, -1, dtype=float) / (n + 1)

    return row


def _p_cesaro_row(p: float):
    def row(n):
        return np.full(n + 1, 1.0 / (n + 1) ** p)

    return row


def _riesz_parts(pn: RealSequence):
    P = partial_sums(pn, name=f"P[{pn.name}]")

    def checked(stop):
        p = pn.values(stop)
        if np.any(~(p > 0)):
            bad = int(np.argmax(~(p > 0)))
            raise DomainError(f"Riesz weights must be positive; p_{bad} = {p[bad]}")
        return p, P.values(stop)

    def row(n):
        p, Pn = checked(n + 1)
        return p / Pn[n]

    return row, checked


def _custom_row(entry: Callable[[int, int], float] | None, row: Callable[[int], Any] | None):
    if row is not None:
        return lambda n: np.asarray(row(n), dtype=float)
    return lambda n: np.array([entry(n, v) for v in range(n + 1)], dtype=float)


def build_matrix(family: Family | str, params: Mapping[str, Any] | None = None) -> TriangularMatrix:
    """Construct one of the named families.

    ``CESARO``: ``alpha > -1``; ``RHALY``: ``0 < t < 1``; ``P_CESARO``:
    ``p > 0``; ``RIESZ``: ``pn`` a positive :class:`RealSequence`;
    ``CUSTOM``: ``entry(n, v)`` or vectorised ``row(n)``.
    """
    family = Family(family)
    params = dict(params or {})
    if family is Family.CESARO:
        alpha = float(params.get("alpha", 1.0))
        if not alpha > -1:
            raise DomainError(f"CESARO needs alpha > -1, got {alpha}")
        params["alpha"] = alpha
        return TriangularMatrix(family, params, _cesaro_row(alpha), f"CESARO({alpha:g})")
    if family is Family.RHALY:
        t = float(params.get("t", 0.5))
        if not 0 < t < 1:
            raise DomainError(f"RHALY needs 0 < t < 1, got {t}")
        params["t"] = t
        return TriangularMatrix(family, params, _rhaly_row(t), f"RHALY({t:g})")
    if family is Family.P_CESARO:
        p = float(params.get("p", 2.0))
        if not p > 0:
            raise DomainError(f"P_CESARO needs p > 0, got {p}")
        params["p"] = p
        return TriangularMatrix(family, params, _p_cesaro_row(p), f"P_CESARO({p:g})")
    if family is Family.RIESZ:
        pn = params.get("pn")
        if not isinstance(pn, RealSequence):
            raise DomainError("RIESZ needs a RealSequence 'pn' of positive weights")
        row, checked = _riesz_parts(pn)
        checked(64)
        params["_weights"] = checked
        return TriangularMatrix(family, params, row, f"RIESZ({pn.name})")
    entry, rowf = params.get("entry"), params.get("row")
    if entry is None and rowf is None:
        raise DomainError("CUSTOM needs an 'entry(n, v)' or 'row(n)' function")
    return TriangularMatrix(family, params, _custom_row(entry, rowf), params.get("label", "CUSTOM"))


def _diag_cesaro(m, stop):
    A = cesaro_coeffs(stop, m.params["alpha"])
    return cesaro_coeffs(1, m.params["alpha"] - 1.0)[0] / A


def _diag_riesz(m, stop):
    p, P = m.params["_weights"](stop)
    return p / P


_DIAGONALS = {
    Family.CESARO: _diag_cesaro,
    Family.RHALY: lambda m, stop: 1.0 / np.arange(1, stop + 1, dtype=float),
    Family.P_CESARO: lambda m, stop: np.arange(1, stop + 1, dtype=float) ** -m.params["p"],
    Family.RIESZ: _diag_riesz,
}


class DerivedEntries:
    """Row-wise ``abar``, ``ahat`` and ``Delta_i ahat`` of a matrix.

    ``abar(n, v) = sum_{r=v}^n a(n, r)`` via compensated suffix sums,
    ``ahat(n, v) = abar(n, v) - abar(n-1, v)`` with ``abar(n-1, n) = 0`` and
    ``abar(-1, .) = 0``; ``delta_ahat(n, i) = ahat(n, i) - ahat(n, i+1)``.
    Rows are cached in a small LRU so sequential sweeps reuse ``abar(n-1)``.
    """

    def __init__(self, matrix: TriangularMatrix, cache_rows: int = 8):
        self.matrix = matrix
        self._abar = functools.lru_cache(maxsize=cache_rows)(self._abar_row)
        self._ahat = functools.lru_cache(maxsize=cache_rows)(self._ahat_row)

    def _abar_row(self, n: int) -> np.ndarray:
        if n < 0:
            return readonly(np.zeros(0))
        return readonly(compensated_suffix_sums(self.matrix.row(n)))

    def _ahat_row(self, n: int) -> np.ndarray:
        cur = self._abar(n)
        out = cur.copy()
        out[:n] -= self._abar(n - 1)
        return readonly(out)

    def abar_row(self, n: int) -> np.ndarray:
        return self._abar(int(n))

    def ahat_row(self, n: int) -> np.ndarray:
        return self._ahat(int(n))

    def delta_ahat_row(self, n: int) -> np.ndarray:
        """``Delta_i ahat(n, i)`` for ``i = 0..n-1``."""
        a = self._ahat(int(n))
        return a[:-1] - a[1:]

    def abar(self, n: int, v: int) -> float:
        return float(self.abar_row(n)[v])

    def ahat(self, n: int, v: int) -> float:
        return float(self.ahat_row(n)[v])

    def delta_ahat(self, n: int, i: int) -> float:
        if not 0 <= i < n:
            raise DomainError(f"delta_ahat({n}, {i}) needs 0 <= i < n")
        a = self.ahat_row(n)
        return float(a[i] - a[i + 1])


def derive(matrix: TriangularMatrix) -> DerivedEntries:
    return DerivedEntries(matrix)


# --------------------------------------------------------------------------
# closed forms


def ahat_closed_form_row(matrix: TriangularMatrix, n: int) -> np.ndarray:
    """Closed-form ``ahat(n, v)`` for ``v = 0..n`` (``n >= 1``)."""
    if n < 1:
        raise DomainError(f"closed forms need n >= 1, got {n}")
    fam, prm = matrix.family, matrix.params
    v = np.arange(n + 1, dtype=float)
    if fam is Family.CESARO:
        a = prm["alpha"]
        lower = cesaro_coeffs(n + 1, a - 1.0)[::-1]
        return v * lower / (n * cesaro_coeffs(n + 1, a)[n])
    if fam is Family.RHALY:
        t = prm["t"]
        m = n - v
        return ((1 - t ** (m + 1)) / (n + 1) - (1 - t**m) / n) / (1 - t)
    if fam is Family.P_CESARO:
        p = prm["p"]
        return (n - v + 1) / (n + 1) ** p - (n - v) / float(n) ** p
    if fam is Family.RIESZ:
        p, P = prm["_weights"](n + 1)
        P_prev = np.concatenate([[0.0], P[:n]])      # P_{v-1}, P_{-1} = 0
        return P_prev * p[n] / (P[n] * P[n - 1])
    raise UnsupportedFamilyError(f"no closed form for family {fam.value}")


def ahat_closed_form(matrix: TriangularMatrix, n: int, v: int) -> float:
    if matrix.family is Family.CUSTOM:
        raise UnsupportedFamilyError("no closed form for family CUSTOM")
    if not 0 <= v <= n:
        raise DomainError(f"({n}, {v}) outside the triangle")
    return float(ahat_closed_form_row(matrix, n)[v])


def delta_ahat_closed_form(matrix: TriangularMatrix, n: int, i: int) -> float:
    """Closed-form ``ahat(n, i) - ahat(n, i+1)``; P_CESARO and RIESZ only."""
    fam = matrix.family
    if fam not in (Family.P_CESARO, Family.RIESZ):
        raise UnsupportedFamilyError(f"no closed difference form for family {fam.value}")
    if n < 1 or not 0 <= i <= n - 1:
        raise DomainError(f"need n >= 1 and 0 <= i <= n-1, got ({n}, {i})")
    if fam is Family.P_CESARO:
        p = matrix.params["p"]
        return 1.0 / (n + 1) ** p - 1.0 / math.pow(n, p)
    p, P = matrix.params["_weights"](n + 1)
    return -float(p[n] * p[i] / (P[n] * P[n - 1]))
