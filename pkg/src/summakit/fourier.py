"""Fourier coefficients of 2*pi-periodic functions and the local-property harness.

Coefficients come from composite 16-point Gauss-Legendre panels whose edges
include every declared breakpoint (jumps, kinks) of the integrand, so
piecewise-smooth functions integrate to near machine precision.  A uniform
trapezoid/FFT rule is kept as an alternative for smooth inputs.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .errors import ConfigurationError, DomainError, PreconditionError
from .matrices import TriangularMatrix
from .sequences import (
    ClassId,
    RealSequence,
    Tolerances,
    certify_sequence_class,
    from_array,
)
from .summability import SummabilityReport, factored_terms, summability_total

__all__ = [
    "PeriodicFunction",
    "FourierSeries",
    "BUILTINS",
    "builtin",
    "zero",
    "sawtooth",
    "square_wave",
    "triangle_wave",
    "bump",
    "coefficients",
    "analytic_coefficients",
    "term_sequence",
    "localize",
    "ExperimentResult",
    "local_property_experiment",
    "DEFAULT_QUADRATURE_POINTS",
]

TWO_PI = 2.0 * math.pi
DEFAULT_QUADRATURE_POINTS = 2**14
GAUSS_ORDER = 16
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GAUSS_ORDER)


def wrap(t):
    """Map angles into ``[-pi, pi)``."""
    return np.mod(np.asarray(t, dtype=float) + math.pi, TWO_PI) - math.pi


@dataclass(frozen=True)
class PeriodicFunction:
    """A bounded 2*pi-periodic function.

    ``fn`` receives angles already wrapped into ``[-pi, pi)``.  ``breakpoints``
    lists the points in ``[-pi, pi)`` where ``fn`` or a low derivative is not
    smooth; ``-pi`` is always treated as one.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    breakpoints: tuple[float, ...] = ()
    mean_removed: bool = True
    analytic: Callable[[int], tuple[np.ndarray, np.ndarray]] | None = field(default=None, repr=False)

    def eval(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.asarray(self.fn(wrap(t)), dtype=float) * np.ones_like(t)

    __call__ = eval


@dataclass(frozen=True)
class FourierSeries:
    """Cosine and sine coefficients for ``n = 0..n_max`` with ``a_0 = b_0 = 0``."""

    a_values: np.ndarray = field(repr=False)
    b_values: np.ndarray = field(repr=False)
    name: str = "f"

    @property
    def n_max(self) -> int:
        return self.a_values.size - 1

    @property
    def a(self) -> RealSequence:
        return from_array(f"a[{self.name}]", self.a_values)

    @property
    def b(self) -> RealSequence:
        return from_array(f"b[{self.name}]", self.b_values)

    def __sub__(self, other: "FourierSeries") -> "FourierSeries":
        n = min(self.n_max, other.n_max) + 1
        return FourierSeries(
            self.a_values[:n] - other.a_values[:n],
            self.b_values[:n] - other.b_values[:n],
            f"{self.name}-{other.name}",
        )


# --------------------------------------------------------------------------
# built-in functions


def _alternating(n_max):
    n = np.arange(n_max + 1, dtype=float)
    return n, np.where(np.arange(n_max + 1) % 2 == 1, 1.0, -1.0)


def zero() -> PeriodicFunction:
    return PeriodicFunction(
        "zero", lambda t: np.zeros_like(t),
        analytic=lambda m: (np.zeros(m + 1), np.zeros(m + 1)),
    )


def sawtooth() -> PeriodicFunction:
    """``f(t) = t/2`` on ``(-pi, pi)``, ``0`` at the jump."""

    def coeffs(m):
        n, sgn = _alternating(m)
        b = np.zeros(m + 1)
        b[1:] = sgn[1:] / n[1:]
        return np.zeros(m + 1), b

    return PeriodicFunction("sawtooth", lambda t: np.where(t == -math.pi, 0.0, t / 2.0),
                            analytic=coeffs)


def square_wave() -> PeriodicFunction:
    """``sign(t)``."""

    def coeffs(m):
        n = np.arange(m + 1, dtype=float)
        b = np.zeros(m + 1)
        odd = np.arange(m + 1) % 2 == 1
        b[odd] = 4.0 / (math.pi * n[odd])
        return np.zeros(m + 1), b

    return PeriodicFunction("square", lambda t: np.where(t == -math.pi, 0.0, np.sign(t)),
                            breakpoints=(0.0,), analytic=coeffs)


def triangle_wave() -> PeriodicFunction:
    """``|t| - pi/2`` (zero mean)."""

    def coeffs(m):
        n = np.arange(m + 1, dtype=float)
        a = np.zeros(m + 1)
        odd = np.arange(m + 1) % 2 == 1
        a[odd] = -4.0 / (math.pi * n[odd] ** 2)
        return a, np.zeros(m + 1)

    return PeriodicFunction("triangle", lambda t: np.abs(t) - math.pi / 2, breakpoints=(0.0,),
                            analytic=coeffs)


def bump(center: float = 0.0, width: float = 1.0) -> PeriodicFunction:
    """C^2 bump ``(1 - (d/width)^2)^3`` on periodic distance ``d < width``.

    The mean is not subtracted pointwise; ``a_0`` is simply not part of the
    coefficient output.
    """
    if not 0 < width < math.pi:
        raise DomainError(f"bump width must lie in (0, pi), got {width}")

    def fn(t):
        d = np.abs(wrap(t - center)) / width
        return np.where(d < 1.0, (1.0 - np.minimum(d, 1.0) ** 2) ** 3, 0.0)

    edges = tuple(sorted(float(wrap(center + s * width)) for s in (-1.0, 1.0)))
    return PeriodicFunction(f"bump({center:g},{width:g})", fn, breakpoints=edges, mean_removed=False)


BUILTINS: dict[str, Callable[[], PeriodicFunction]] = {
    "zero": zero,
    "sawtooth": sawtooth,
    "square": square_wave,
    "triangle": triangle_wave,
    "bump": bump,
}


def builtin(name: str) -> PeriodicFunction:
    try:
        return BUILTINS[str(name).lower()]()
    except KeyError:
        raise ConfigurationError(f"unknown function {name!r}; choose from {sorted(BUILTINS)}") from None


# --------------------------------------------------------------------------
# quadrature


def _check_points(n_max: int, M: int) -> None:
    if n_max < 0:
        raise ConfigurationError(f"n_max must be nonnegative, got {n_max}")
    if M < 4 or M & (M - 1):
        raise ConfigurationError(f"quadrature points M must be a power of two, got {M}")
    if M < 4 * n_max:
        raise ConfigurationError(f"quadrature points M = {M} must be at least 4*n_max = {4 * n_max}")


def _edges(breakpoints: Iterable[float]) -> np.ndarray:
    pts = [-math.pi, math.pi]
    for b in breakpoints:
        w = float(wrap(b))
        pts.append(w)
    pts = np.unique(np.round(np.asarray(pts), 15))
    return pts


def gauss_nodes(breakpoints: Iterable[float], M: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of about ``M`` points in ``M/16`` panels on ``[-pi, pi]``."""
    edges = _edges(breakpoints)
    lengths = np.diff(edges)
    panels = max(M // GAUSS_ORDER, edges.size - 1)
    counts = np.maximum(1, np.round(panels * lengths / TWO_PI).astype(int))
    nodes, weights = [], []
    for lo, length, cnt in zip(edges[:-1], lengths, counts):
        h = length / cnt
        left = lo + h * np.arange(cnt)
        nodes.append((left[:, None] + h * (_NODES[None, :] + 1.0) / 2.0).ravel())
        weights.append(np.tile(_WEIGHTS * h / 2.0, cnt))
    return np.concatenate(nodes), np.concatenate(weights)


def _project(values: np.ndarray, nodes: np.ndarray, weights: np.ndarray, n_max: int,
             chunk: int = 256) -> tuple[np.ndarray, np.ndarray]:
    fw = values * weights / math.pi
    a = np.zeros(n_max + 1)
    b = np.zeros(n_max + 1)
    for start in range(1, n_max + 1, chunk):
        n = np.arange(start, min(start + chunk, n_max + 1), dtype=float)
        arg = np.outer(n, nodes)
        a[start : start + n.size] = np.cos(arg) @ fw
        b[start : start + n.size] = np.sin(arg) @ fw
    return a, b


def _trapezoid(f: PeriodicFunction, n_max: int, M: int) -> tuple[np.ndarray, np.ndarray]:
    t = -math.pi + TWO_PI * np.arange(M) / M
    c = np.fft.rfft(f.eval(t))[: n_max + 1] / M
    c = c * np.where(np.arange(n_max + 1) % 2 == 1, -1.0, 1.0)   # shift origin from -pi to 0
    a, b = 2.0 * c.real, -2.0 * c.imag
    a[0] = b[0] = 0.0
    return a, b


def coefficients(
    f: PeriodicFunction,
    n_max: int,
    M: int = DEFAULT_QUADRATURE_POINTS,
    method: str = "gauss",
    extra_breakpoints: Iterable[float] = (),
) -> FourierSeries:
    """``a_n, b_n`` for ``1 <= n <= n_max``; the constant term is dropped.

    ``M`` must be a power of two with ``M >= 4 n_max``.  ``method="gauss"``
    splits panels at ``f.breakpoints`` and ``extra_breakpoints``;
    ``method="trapezoid"`` is the uniform ``M``-point rule via FFT.
    """
    _check_points(n_max, M)
    if method == "trapezoid":
        a, b = _trapezoid(f, n_max, M)
    elif method == "gauss":
        nodes, weights = gauss_nodes(tuple(f.breakpoints) + tuple(extra_breakpoints), M)
        a, b = _project(f.eval(nodes), nodes, weights, n_max)
    else:
        raise ConfigurationError(f"unknown quadrature method {method!r}")
    return FourierSeries(a, b, f.name)


def analytic_coefficients(f: PeriodicFunction, n_max: int) -> FourierSeries:
    if f.analytic is None:
        raise ConfigurationError(f"{f.name} has no closed-form coefficients")
    a, b = f.analytic(n_max)
    return FourierSeries(np.asarray(a, dtype=float), np.asarray(b, dtype=float), f.name)


def term_sequence(series: FourierSeries, x: float) -> RealSequence:
    """``C(n) = a_n cos(n x) + b_n sin(n x)``, ``C(0) = 0``."""
    n = np.arange(series.n_max + 1, dtype=float)
    c = series.a_values * np.cos(n * x) + series.b_values * np.sin(n * x)
    c[0] = 0.0
    return from_array(f"C[{series.name}]({x:g})", c)


# --------------------------------------------------------------------------
# localisation


def _smoothstep(s):
    s = np.clip(s, 0.0, 1.0)
    return s * s * (3.0 - 2.0 * s)


def localize(f: PeriodicFunction, x0: float, delta: float, g: PeriodicFunction) -> PeriodicFunction:
    """Function equal to ``f`` on ``|t - x0| < delta`` and to ``g`` beyond ``2 delta``.

    Distances are periodic.  Between the two a cubic smoothstep blends
    ``w f + (1 - w) g``.  No constant is subtracted, so ``h`` agrees with ``f``
    exactly near ``x0``; the constant term is dropped by :func:`coefficients`.
    """
    if not 0 < delta < math.pi / 2:
        raise DomainError(f"half-width delta must lie in (0, pi/2), got {delta}")

    def fn(t):
        d = np.abs(wrap(t - x0))
        w = _smoothstep((2.0 * delta - d) / delta)
        inner = d <= delta
        outer = d >= 2.0 * delta
        fv, gv = f.fn(t), g.fn(t)
        return np.where(inner, fv, np.where(outer, gv, w * fv + (1.0 - w) * gv))

    cuts = tuple(float(wrap(x0 + s)) for s in (-2 * delta, -delta, delta, 2 * delta))
    bps = tuple(f.breakpoints) + tuple(g.breakpoints) + cuts
    return PeriodicFunction(f"localize({f.name},{x0:g},{delta:g},{g.name})", fn, bps,
                            mean_removed=False)


# --------------------------------------------------------------------------
# local-property experiment


@dataclass(frozen=True)
class ExperimentResult:
    f_report: SummabilityReport
    g_report: SummabilityReport
    difference_report: SummabilityReport
    certificates: tuple
    x0: float
    delta: float
    quadrature_points: int
    max_abs_s: dict
    series: tuple = ()      # FourierSeries of f, g and f - g

    @property
    def verdict(self) -> str:
        return self.difference_report.flatness_verdict


def agreement_gap(f: PeriodicFunction, g: PeriodicFunction, x0: float, delta: float,
                  points: int = 128) -> float:
    """Max ``|f - g|`` on ``points`` interior samples of ``(x0 - delta, x0 + delta)``."""
    t = x0 + delta * np.linspace(-1.0, 1.0, points + 2)[1:-1]
    return float(np.max(np.abs(f.eval(t) - g.eval(t))))


def default_quadrature_points(n_max: int) -> int:
    return max(DEFAULT_QUADRATURE_POINTS, 1 << max(2, math.ceil(math.log2(max(4 * n_max, 1)))))


def local_property_experiment(
    f: PeriodicFunction,
    g: PeriodicFunction,
    x0: float,
    delta: float,
    matrix: TriangularMatrix,
    alpha: RealSequence,
    lam: RealSequence,
    X: RealSequence,
    k: float,
    N: int,
    M: int | None = None,
    tol: Tolerances | None = None,
    certificates: Callable[[], list] | None = None,
    agreement_tol: float = 1e-12,
    workers: int = 1,
) -> ExperimentResult:
    """Summability reports at ``x0`` for ``f``, ``g`` and ``f - g``.

    All three coefficient sets use one node set (the union of breakpoints),
    so the difference coefficients equal ``coef(f) - coef(g)`` to rounding.
    ``certificates`` optionally produces condition certificates to attach.
    """
    if not 0 < delta < math.pi / 2:
        raise DomainError(f"half-width delta must lie in (0, pi/2), got {delta}")
    gap = agreement_gap(f, g, x0, delta)
    if gap > agreement_tol:
        raise PreconditionError(
            f"f and g differ by {gap:.3g} inside ({x0 - delta:g}, {x0 + delta:g}); "
            "the local-property experiment needs them to agree there"
        )
    tol = tol or Tolerances()
    n_max = N - 1
    M = default_quadrature_points(n_max) if M is None else int(M)
    _check_points(n_max, M)
    nodes, weights = gauss_nodes(tuple(f.breakpoints) + tuple(g.breakpoints), M)
    cf = FourierSeries(*_project(f.eval(nodes), nodes, weights, n_max), name=f.name)
    cg = FourierSeries(*_project(g.eval(nodes), nodes, weights, n_max), name=g.name)
    cd = cf - cg

    ctxs = [factored_terms(term_sequence(c, x0), lam, X) for c in (cf, cg, cd)]

    def run(ctx):
        return summability_total(matrix, alpha, k, ctx, N, tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=min(workers, 3)) as ex:
            reports = list(ex.map(run, ctxs))
    else:
        reports = [run(c) for c in ctxs]

    certs = tuple(certificates()) if certificates is not None else tuple(
        certify_sequence_class(lam, cid, None, max(N, 8), tol)
        for cid in (ClassId.BV, ClassId.RATIO_BOUNDED)
    )
    unfactored = {}
    for label, c in (("f", cf), ("g", cg), ("difference", cd)):
        s = np.cumsum(term_sequence(c, x0).values(N))
        unfactored[label] = float(np.max(np.abs(s)))
    return ExperimentResult(*reports, certs, float(x0), float(delta), M, unfactored, (cf, cg, cd))
