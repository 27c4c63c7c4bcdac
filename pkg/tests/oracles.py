"""Independent reference implementations used only by the tests.

Nothing here imports the package's numerics: entries are rebuilt from their
definitions in plain Python (``math.fsum``) or ``mpmath``.
"""
from __future__ import annotations

import math

import mpmath as mp


def cesaro_gamma(n: int, alpha: float, dps: int = 40) -> float:
    with mp.workdps(dps):
        a = mp.mpf(alpha)
        return float(mp.gamma(n + a + 1) / (mp.gamma(a + 1) * mp.gamma(n + 1)))


def cesaro_binom(n: int, alpha: float, dps: int = 40) -> mp.mpf:
    """A_n^alpha as a generalised binomial coefficient (valid for any alpha)."""
    with mp.workdps(dps):
        return mp.binomial(n + mp.mpf(alpha), n)


def cesaro_entry(alpha):
    def entry(n, v):
        with mp.workdps(40):
            return float(cesaro_binom(n - v, alpha - 1) / cesaro_binom(n, alpha))

    return entry


def rhaly_entry(t):
    return lambda n, v: t ** (n - v) / (n + 1)


def p_cesaro_entry(p):
    return lambda n, v: 1.0 / (n + 1) ** p


def riesz_entry(p):
    def entry(n, v):
        return p(v) / math.fsum(p(r) for r in range(n + 1))

    return entry


def abar(entry, n, v):
    if n < 0 or v > n:
        return 0.0
    return math.fsum(entry(n, r) for r in range(v, n + 1))


def ahat(entry, n, v):
    return abar(entry, n, v) - abar(entry, n - 1, v)


def transform(entry, s, n):
    return math.fsum(entry(n, v) * s[v] for v in range(n + 1))


def summability_partials(entry, terms, alpha, k, N):
    """Double-loop S_M for M = 0..N-1, straight from the definitions."""
    s = [math.fsum(terms[: i + 1]) for i in range(N)]
    T = [transform(entry, s, n) for n in range(N)]
    out, acc = [], []
    for n in range(N):
        if n == 0:
            acc.append(0.0)
        else:
            acc.append(alpha[n] * abs(T[n] - T[n - 1]) ** k)
        out.append(math.fsum(acc))
    return out


def almost_decreasing_all_pairs(x):
    """min over 1 <= n <= m <= N of x[n]/x[m], O(N^2); x[0] is ignored."""
    best = math.inf
    for n in range(1, len(x)):
        for m in range(n, len(x)):
            if x[m] > 0:
                best = min(best, x[n] / x[m])
    return best


def sawtooth_coeffs(n):
    """(a_n, b_n) of t/2 on (-pi, pi) by the antiderivative of t sin(nt)."""
    with mp.workdps(30):
        F = lambda t: (mp.sin(n * t) / n**2 - t * mp.cos(n * t) / n) / 2
        return 0.0, float((F(mp.pi) - F(-mp.pi)) / mp.pi)


def square_coeffs(n):
    """(a_n, b_n) of sign(t): (2/pi) * int_0^pi sin(nt) dt."""
    with mp.workdps(30):
        return 0.0, float(2 * (1 - mp.cos(n * mp.pi)) / (n * mp.pi))
