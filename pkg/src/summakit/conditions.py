"""Condition catalog and certificate engine.

Every hypothesis is turned into something computable on a finite prefix:

* ``ratio`` conditions (``X = O(Y)``) sample ``X/Y`` at log-spaced indices
  and judge the running supremum with the bounded-above trend rule;
* ``tail`` conditions are the same for column sums ``sum_{n > i}`` truncated
  at a horizon ``M``, with a truncation diagnostic;
* ``series`` conditions (``sum < inf``) use the partial-sum flatness rule;
* ``exact`` conditions must hold to ``exact_tol`` at every index;
* ``sequence`` conditions delegate to :func:`certify_sequence_class`.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Callable

import numpy as np

from ._accum import compensated_cumsum
from .errors import ConfigurationError
from .matrices import Family, TriangularMatrix, build_matrix
from .presets import (
    default_phi,
    diagonal_sequence,
    inverse_power_phi,
    lambda_preset,
    matrix_from_options,
    theta_preset,
    x_from_phi_over_diagonal,
    x_reciprocal_n_diagonal,
    x_reciprocal_n_phi,
)
from .sequences import (
    ClassId,
    RealSequence,
    Tolerances,
    Verdict,
    certify_sequence_class,
    constant,
    flatness,
    partial_sums,
    sequence,
    trend_prefixes,
    trend_verdict,
)
from .summability import preset_weights

__all__ = [
    "ConditionSpec",
    "ConditionInputs",
    "ConditionCertificate",
    "catalog",
    "evaluate_condition",
    "evaluate_scenario",
    "bundle_verdict",
    "sample_indices",
    "diagonal_weight_inputs",
    "SCENARIOS",
    "scenario_key",
    "scenario_inputs",
]

TAIL_CONDITIONS = ("T3", "T4", "TA_vii", "TA_viii", "L4_IV", "L4_V", "M1")


@dataclass(frozen=True)
class ConditionSpec:
    id: str
    statement: str
    requires: tuple[str, ...]
    rule: str


_CATALOG = (
    ConditionSpec("T1", "sum_{i<n} |Delta_i ahat(n,i)| = O(phi_n)", ("matrix", "phi"), "ratio"),
    ConditionSpec("T2", "max_{i<=n} |ahat(n,i)| = O(phi_n)", ("matrix", "phi"), "ratio"),
    ConditionSpec("T3", "sum_{n>i} alpha_n phi_n^(k-1) |Delta_i ahat(n,i)| = O(alpha_i phi_i^k)",
                  ("matrix", "alpha", "phi", "k"), "tail"),
    ConditionSpec("T4", "sum_{n>i} alpha_n phi_n^(k-1) |ahat(n,i+1)| = O(alpha_i phi_i^(k-1))",
                  ("matrix", "alpha", "phi", "k"), "tail"),
    ConditionSpec("A", "sum alpha_n phi_n^k |X_n|^k |lambda_n|^k < inf",
                  ("alpha", "phi", "X", "lam", "k"), "series"),
    ConditionSpec("B", "sum alpha_n phi_n^(k-1) |X_n|^k |Delta lambda_n| < inf",
                  ("alpha", "phi", "X", "lam", "k"), "series"),
    ConditionSpec("N1", "sum_{v<=n} |a_vv ahat(n,v+1)| = O(phi_n)", ("matrix", "phi"), "ratio"),
    ConditionSpec("N2", "Delta X_n = O(phi_n), X_n = phi_n / a_nn", ("matrix", "phi", "X"), "ratio"),
    ConditionSpec("N11", "sum_{v<=n} |ahat(n,v+1) phi_v| = O(phi_n)", ("matrix", "phi"), "ratio"),
    ConditionSpec("N12", "Delta X_n = O(1/n), X_n = 1/(n phi_n)", ("phi", "X"), "ratio"),
    ConditionSpec("TA_i", "a(n-1,v) >= a(n,v) for n >= v+1", ("matrix",), "exact"),
    ConditionSpec("TA_ii", "abar(n,0) = 1", ("matrix",), "exact"),
    ConditionSpec("TA_iii", "sum_{v=1}^{n-1} a_vv ahat(n,v+1) = O(a_nn)", ("matrix",), "ratio"),
    ConditionSpec("TA_iv", "Delta X_n = O(1/n), X_n = 1/(n a_nn)", ("matrix", "X"), "ratio"),
    ConditionSpec("TA_v", "sum (theta_v a_vv)^(k-1) |X_v|^(k-1) |lambda_v|^k / v < inf",
                  ("matrix", "theta", "X", "lam", "k"), "series"),
    ConditionSpec("TA_vi", "sum (theta_v a_vv)^(k-1) |X_v|^k |Delta lambda_v| < inf",
                  ("matrix", "theta", "X", "lam", "k"), "series"),
    ConditionSpec("TA_vii",
                  "sum_{n>v} (theta_n a_nn)^(k-1) |Delta_v ahat(n,v)| = O((theta_v a_vv)^(k-1) a_vv)",
                  ("matrix", "theta", "k"), "tail"),
    ConditionSpec("TA_viii", "sum_{n>v} (theta_n a_nn)^(k-1) |ahat(n,v+1)| = O((theta_v a_vv)^(k-1))",
                  ("matrix", "theta", "k"), "tail"),
    ConditionSpec("L4_I", "abar(n,0) = 1", ("matrix",), "exact"),
    ConditionSpec("L4_II", "a(n-1,v) >= a(n,v) for n >= v+1", ("matrix",), "exact"),
    ConditionSpec("L4_III", "n a_nn = O(1)", ("matrix",), "ratio"),
    ConditionSpec("L4_IV", "sum_{n>v} alpha_n n^(1-k) |Delta_v ahat(n,v)| = O(alpha_v a_vv v^(1-k))",
                  ("matrix", "alpha", "k"), "tail"),
    ConditionSpec("L4_V", "sum_{n>v} alpha_n n^(1-k) ahat(n,v+1) = O(alpha_v v^(1-k))",
                  ("matrix", "alpha", "k"), "tail"),
    ConditionSpec("M1", "sum_{n>v} alpha_n n^(1-k) p_n/(P_n P_{n-1}) = O(alpha_v v^(1-k) / P_v)",
                  ("alpha", "pn", "k"), "tail"),
    ConditionSpec("LAMBDA_RATIO", "lambda_{n+1} = O(|lambda_n|)", ("lam",), "sequence"),
    ConditionSpec("QPD", "alpha_n phi_n^(k-1) / n is quasi-epsilon-power decreasing",
                  ("alpha", "phi", "k", "epsilon"), "sequence"),
    ConditionSpec("NPN", "n p_n = O(P_n)", ("pn",), "ratio"),
    ConditionSpec("BV", "sum |lambda_n - lambda_{n+1}| < inf", ("lam",), "sequence"),
)
_BY_ID = {c.id: c for c in _CATALOG}


def catalog() -> list[ConditionSpec]:
    return list(_CATALOG)


@dataclass
class ConditionInputs:
    matrix: TriangularMatrix | None = None
    alpha: RealSequence | None = None
    phi: RealSequence | None = None
    k: float | None = None
    lam: RealSequence | None = None
    X: RealSequence | None = None
    theta: RealSequence | None = None
    pn: RealSequence | None = None
    epsilon: float | None = None

    def resolved_pn(self) -> RealSequence | None:
        if self.pn is not None:
            return self.pn
        if self.matrix is not None and self.matrix.family is Family.RIESZ:
            return self.matrix.params["pn"]
        return None

    def describe(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        if self.matrix is not None:
            out["matrix"] = self.matrix.label
        for key in ("alpha", "phi", "lam", "X", "theta"):
            seq = getattr(self, key)
            if seq is not None:
                out[key] = seq.name
        pn = self.resolved_pn()
        if pn is not None:
            out["pn"] = pn.name
        if self.k is not None:
            out["k"] = float(self.k)
        if self.epsilon is not None:
            out["epsilon"] = float(self.epsilon)
        return out


def diagonal_weight_inputs(matrix: TriangularMatrix, theta: RealSequence, k: float, **extra) -> ConditionInputs:
    """Inputs with ``phi_n = a_nn`` and ``alpha_n = theta_n^(k-1)``.

    Under this choice the ratio definitions of TA_vii / TA_viii coincide with
    those of T3 / T4.
    """
    alpha = sequence(f"{theta.name}^{k - 1:g}", lambda idx: theta.values(int(idx[-1]) + 1)[idx[0]:] ** (k - 1))
    return ConditionInputs(matrix=matrix, alpha=alpha, phi=diagonal_sequence(matrix), k=k,
                           theta=theta, **extra)


@dataclass(frozen=True)
class ConditionCertificate:
    id: str
    rule: str
    params: dict
    N: int
    M: int | None
    samples: tuple[tuple[int, float], ...]
    sup_ratio: float
    slope: float | None
    verdict: Verdict
    notes: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "params": dict(self.params, rule=self.rule),
            "N": self.N,
            "M": self.M,
            "samples": [[int(i), float(r)] for i, r in self.samples],
            "sup_ratio": float(self.sup_ratio),
            "slope": None if self.slope is None else float(self.slope),
            "verdict": self.verdict.value,
            "notes": self.notes,
        }


def sample_indices(N: int, per_octave: int = 8) -> np.ndarray:
    """Log-spaced indices in ``[1, N]`` plus the trend prefixes."""
    top = int(math.floor(per_octave * math.log2(max(N, 1)))) + 1
    idx = np.round(2.0 ** (np.arange(top) / per_octave)).astype(np.int64)
    idx = np.union1d(idx, trend_prefixes(N))
    return idx[(idx >= 1) & (idx <= N)]


# --------------------------------------------------------------------------
# verdict helpers


def _ratio_verdict(idx, num, den, N, tol):
    idx = np.asarray(idx)
    num = np.abs(np.asarray(num, dtype=float))
    den = np.abs(np.asarray(den, dtype=float))
    ok = (den > 0) & np.isfinite(den) & np.isfinite(num)
    skipped = int((~ok).sum())
    i_ok = idx[ok]
    ratios = num[ok] / den[ok]
    samples = tuple((int(i), float(r)) for i, r in zip(i_ok, ratios))
    notes = []
    if ratios.size == 0:
        return samples, math.nan, math.nan, Verdict.INCONCLUSIVE, ["no usable samples"]
    prefixes = trend_prefixes(N)
    running = np.maximum.accumulate(ratios)
    stats = []
    for P in prefixes:
        pos = np.searchsorted(i_ok, P, side="right") - 1
        stats.append(float(running[max(pos, 0)]))
    verdict, slope = trend_verdict(prefixes, stats, "above", tol)
    if stats[-1] <= tol.noise_floor:
        verdict = Verdict.SUPPORTED
        notes.append(f"ratio within rounding noise (<= {tol.noise_floor:g})")
    if skipped:
        notes.append(f"skipped {skipped} samples with zero or non-finite denominator")
        if skipped > tol.max_skip_fraction * idx.size:
            verdict = Verdict.INCONCLUSIVE
    notes.append("rule: running sup of ratio, bounded-above trend")
    return samples, float(ratios.max()), slope, verdict, notes


def _series_verdict(terms, N, tol):
    inc = np.abs(np.asarray(terms, dtype=float)).copy()
    inc[0] = 0.0
    fl = flatness(inc, tol)
    partial = compensated_cumsum(inc)
    idx = sample_indices(N)
    idx = idx[idx < inc.size]
    samples = tuple((int(i), float(partial[i])) for i in idx)
    verdict = {"flat": Verdict.SUPPORTED, "growing": Verdict.VIOLATED}.get(fl.verdict, Verdict.INCONCLUSIVE)
    notes = [f"rule: partial-sum flatness ({fl.verdict}); tail over (N/2, N] = {fl.tail:.6g}",
             "summed from n = 1"]
    return samples, fl.total, fl.slope, verdict, notes


# --------------------------------------------------------------------------
# per-condition evaluators


def _require(cid: str, inputs: ConditionInputs) -> None:
    spec = _BY_ID[cid]
    for key in spec.requires:
        val = inputs.resolved_pn() if key == "pn" else getattr(inputs, key)
        if val is None:
            raise ConfigurationError(f"condition {cid} needs input {key!r}, which is missing")


def _row_ratio(inputs, N, num_fn, den):
    idx = sample_indices(N)
    d = inputs.matrix.derived
    num = np.array([num_fn(d, int(n)) for n in idx])
    return idx, num, den[idx]


def _tails(derived, weights, cols, M, kind):
    tails = np.zeros(cols.size)
    last = np.zeros(cols.size)
    for n in range(1, M + 1):
        cnt = int(np.searchsorted(cols, n))
        if cnt == 0:
            continue
        c = cols[:cnt]
        ah = derived.ahat_row(n)
        if kind == "delta":
            vals = np.abs(ah[c] - ah[c + 1])
        else:
            vals = np.abs(ah[c + 1])
        contrib = weights[n] * vals
        tails[:cnt] += contrib
        if n == M:
            last[:cnt] = contrib
    return tails, last


def _truncation(tails, last):
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(tails > 0, last / tails, 0.0)
    return float(r.max()) if r.size else 0.0


def _power_weight(alpha, nn, k):
    """``alpha_n n^(1-k)`` with the n = 0 slot set to 0 (it never enters a tail)."""
    w = np.zeros_like(nn)
    w[1:] = alpha[1:] * nn[1:] ** (1 - k)
    return w


def _kpow(x, e):
    x = np.asarray(x, dtype=float)
    return np.ones_like(x) if e == 0 else np.abs(x) ** e


def _evaluate(cid: str, inputs: ConditionInputs, N: int, M: int, tol: Tolerances):
    """Returns (samples, sup, slope, verdict, notes, M_used)."""
    m = inputs.matrix
    k = None if inputs.k is None else float(inputs.k)
    stop = max(M, N) + 2
    nn = np.arange(stop, dtype=float)

    def seq(name):
        return np.asarray(getattr(inputs, name).values(stop), dtype=float)

    if cid in ("T1", "T2", "N1", "N11"):
        phi = seq("phi")
        if cid == "T1":
            fn = lambda d, n: float(np.abs(d.delta_ahat_row(n)).sum())
        elif cid == "T2":
            fn = lambda d, n: float(np.abs(d.ahat_row(n)).max())
        elif cid == "N1":
            diag = m.diagonal(N + 1)
            fn = lambda d, n: float(np.abs(diag[:n] * d.ahat_row(n)[1:]).sum())
        else:
            fn = lambda d, n: float(np.abs(d.ahat_row(n)[1:] * phi[:n]).sum())
        idx, num, den = _row_ratio(inputs, N, fn, phi)
        return (*_ratio_verdict(idx, num, den, N, tol), None)

    if cid == "TA_iii":
        diag = m.diagonal(N + 1)
        fn = lambda d, n: float(np.dot(diag[1:n], d.ahat_row(n)[2 : n + 1]))
        idx, num, den = _row_ratio(inputs, N, fn, diag)
        return (*_ratio_verdict(idx, num, den, N, tol), None)

    if cid in ("N2", "N12", "TA_iv"):
        X = seq("X")
        idx = sample_indices(N)
        dX = np.abs(X[idx] - X[idx + 1])
        if cid == "N2":
            phi = seq("phi")
            den = phi[idx]
            target = phi[: N + 1] / m.diagonal(N + 1)
            rel_from = 0
        elif cid == "N12":
            den = 1.0 / idx
            phi = seq("phi")
            target = np.concatenate([[0.0], 1.0 / (nn[1 : N + 1] * phi[1 : N + 1])])
            rel_from = 1
        else:
            den = 1.0 / idx
            target = np.concatenate([[0.0], 1.0 / (nn[1 : N + 1] * m.diagonal(N + 1)[1:])])
            rel_from = 1
        samples, sup, slope, verdict, notes = _ratio_verdict(idx, dX, den, N, tol)
        t = target[rel_from:]
        dev = float(np.max(np.abs(X[rel_from : N + 1] - t) / np.maximum(np.abs(t), 1e-300)))
        notes.append(f"max relative deviation of X from its defining formula: {dev:.3g}")
        return samples, sup, slope, verdict, notes, None

    if cid == "L4_III":
        idx = sample_indices(N)
        diag = m.diagonal(N + 1)
        return (*_ratio_verdict(idx, idx * diag[idx], np.ones(idx.size), N, tol), None)

    if cid == "NPN":
        pn = inputs.resolved_pn()
        p = pn.values(N + 1)
        P = partial_sums(pn).values(N + 1)
        idx = sample_indices(N)
        return (*_ratio_verdict(idx, idx * p[idx], P[idx], N, tol), None)

    if cid in ("T3", "T4", "TA_vii", "TA_viii", "L4_IV", "L4_V"):
        cols = sample_indices(N)
        if cid in ("T3", "T4"):
            alpha, phi = seq("alpha"), seq("phi")
            w = alpha * _kpow(phi, k - 1)
            den = alpha * _kpow(phi, k) if cid == "T3" else alpha * _kpow(phi, k - 1)
        elif cid in ("TA_vii", "TA_viii"):
            diag = m.diagonal(stop)
            w = _kpow(seq("theta") * diag, k - 1)
            den = w * diag if cid == "TA_vii" else w
        else:
            alpha = seq("alpha")
            w = _power_weight(alpha, nn, k)
            den = w * m.diagonal(stop) if cid == "L4_IV" else w
        kind = "delta" if cid in ("T3", "TA_vii", "L4_IV") else "next"
        tails, last = _tails(m.derived, w, cols, M, kind)
        samples, sup, slope, verdict, notes = _ratio_verdict(cols, tails, den[cols], N, tol)
        trunc = _truncation(tails, last)
        notes.append(f"tail horizon M = {M}; truncation diagnostic {trunc:.3g}")
        if trunc > tol.truncation_tol:
            verdict = Verdict.INCONCLUSIVE
            notes.append("tail not converged at horizon")
        return samples, sup, slope, verdict, notes, M

    if cid == "M1":
        pn = inputs.resolved_pn()
        p = pn.values(stop)
        P = partial_sums(pn).values(stop)
        alpha = seq("alpha")
        w = _power_weight(alpha, nn, k)
        terms = np.zeros(stop)
        terms[1 : M + 1] = w[1 : M + 1] * p[1 : M + 1] / (P[1 : M + 1] * P[: M])
        # tail[v] = sum_{n=v+1}^{M} terms[n]
        upto = compensated_cumsum(terms[: M + 1])
        cols = sample_indices(N)
        tails = upto[M] - upto[cols]
        den = w[cols] / P[cols]
        samples, sup, slope, verdict, notes = _ratio_verdict(cols, tails, den, N, tol)
        trunc = _truncation(tails, np.full(cols.size, terms[M]))
        notes.append(f"tail horizon M = {M}; truncation diagnostic {trunc:.3g}")
        if trunc > tol.truncation_tol:
            verdict = Verdict.INCONCLUSIVE
            notes.append("tail not converged at horizon")
        return samples, sup, slope, verdict, notes, M

    if cid in ("A", "B", "TA_v", "TA_vi"):
        lam, X = seq("lam"), seq("X")
        L = N + 1
        dlam = np.abs(lam[:L] - lam[1 : L + 1])
        if cid == "A":
            terms = seq("alpha")[:L] * _kpow(seq("phi")[:L] * X[:L] * lam[:L], k)
        elif cid == "B":
            terms = seq("alpha")[:L] * _kpow(seq("phi")[:L], k - 1) * _kpow(X[:L], k) * dlam
        else:
            base = _kpow(seq("theta")[:L] * m.diagonal(L), k - 1)
            if cid == "TA_v":
                with np.errstate(divide="ignore", invalid="ignore"):
                    terms = base * _kpow(X[:L], k - 1) * _kpow(lam[:L], k) / nn[:L]
            else:
                terms = base * _kpow(X[:L], k) * dlam
        terms = np.where(np.isfinite(terms), terms, 0.0)
        samples, sup, slope, verdict, notes = _series_verdict(terms, N, tol)
        if cid == "TA_vi":
            notes.append("Delta lambda taken in absolute value")
        return samples, sup, slope, verdict, notes, None

    if cid in ("TA_i", "L4_II", "TA_ii", "L4_I"):
        return (*_exact(cid, m, N, tol), None)

    if cid in ("LAMBDA_RATIO", "BV", "QPD"):
        if cid == "QPD":
            alpha, phi = inputs.alpha, inputs.phi

            def fn(idx):
                s = int(idx[-1]) + 1
                n = idx.astype(float)
                with np.errstate(divide="ignore", invalid="ignore"):
                    out = alpha.values(s)[idx[0]:] * _kpow(phi.values(s)[idx[0]:], k - 1) / n
                return np.where(idx == 0, 0.0, out)

            target = sequence(f"{alpha.name}*{phi.name}^{k - 1:g}/n", fn)
            cert = certify_sequence_class(
                target, ClassId.QUASI_POWER_DECREASING, {"beta": inputs.epsilon}, N, tol
            )
        else:
            cls = ClassId.RATIO_BOUNDED if cid == "LAMBDA_RATIO" else ClassId.BV
            cert = certify_sequence_class(inputs.lam, cls, None, N, tol)
        notes = [f"sequence class {cert.class_id.value}; witness {cert.witness:.6g}"]
        if cert.notes:
            notes.append(cert.notes)
        return (tuple((int(a), float(b)) for a, b in cert.statistics), cert.witness,
                cert.trend_slope, cert.verdict, notes, None)

    raise ConfigurationError(f"unknown condition {cid!r}")


def _exact(cid, m, N, tol):
    viol = np.zeros(N + 1)
    where = np.zeros(N + 1, dtype=np.int64)
    notes = []
    if cid in ("TA_ii", "L4_I"):
        abar0 = np.array([m.derived.abar_row(n)[0] for n in range(N + 1)])
        viol = np.abs(abar0 - 1.0)
        show = sorted({n for n in (1, 2, 9, N // 2, N) if n <= N})
        notes.append("abar(n,0): " + ", ".join(f"n={n}: {abar0[n]:.10g}" for n in show))
        if m.family is Family.CESARO and m.params["alpha"] != 1 and viol.max() <= tol.exact_tol:
            notes.append(
                "row sums equal 1 for this Cesaro order as well (hockey-stick identity), "
                "so the row-sum condition is not what excludes alpha != 1"
            )
    else:
        prev = m.row(0)
        for n in range(1, N + 1):
            cur = m.row(n)
            diff = cur[:n] - prev
            j = int(np.argmax(diff))
            viol[n] = max(0.0, float(diff[j]))
            where[n] = j
            prev = cur
    worst = int(np.argmax(viol))
    idx = sample_indices(N)
    idx = np.union1d(idx, [worst]) if worst > 0 else idx
    samples = tuple((int(n), float(viol[n])) for n in idx)
    sup = float(viol.max())
    if sup <= tol.exact_tol:
        verdict = Verdict.SUPPORTED
    else:
        verdict = Verdict.VIOLATED
        loc = f"(n={worst}, v={where[worst]})" if cid in ("TA_i", "L4_II") else f"n={worst}"
        notes.append(f"worst violation {sup:.6g} at {loc}")
    notes.insert(0, f"rule: exact, tolerance {tol.exact_tol:g}")
    return samples, sup, None, verdict, notes


def evaluate_condition(
    spec_id: str,
    inputs: ConditionInputs,
    N: int,
    M: int | None = None,
    tol: Tolerances | None = None,
    params: dict | None = None,
) -> ConditionCertificate:
    if spec_id not in _BY_ID:
        raise ConfigurationError(f"unknown condition {spec_id!r}")
    spec = _BY_ID[spec_id]
    _require(spec_id, inputs)
    tol = tol or Tolerances()
    M = 4 * N if M is None else int(M)
    if spec.rule == "tail" and M < 2 * N:
        raise ConfigurationError(f"{spec_id}: tail horizon M = {M} must be at least 2N = {2 * N}")
    samples, sup, slope, verdict, notes, m_used = _evaluate(spec_id, inputs, N, M, tol)
    p = inputs.describe()
    p.update(params or {})
    return ConditionCertificate(
        id=spec_id,
        rule=spec.rule,
        params=p,
        N=N,
        M=m_used,
        samples=samples,
        sup_ratio=float(sup),
        slope=None if slope is None else float(slope),
        verdict=verdict,
        notes="; ".join(notes),
    )


def bundle_verdict(certs: list[ConditionCertificate]) -> Verdict:
    if all(c.verdict is Verdict.SUPPORTED for c in certs):
        return Verdict.SUPPORTED
    if any(c.verdict is Verdict.VIOLATED for c in certs):
        return Verdict.VIOLATED
    return Verdict.INCONCLUSIVE


# --------------------------------------------------------------------------
# scenarios


@dataclass(frozen=True)
class _Scenario:
    conditions: tuple[str, ...]
    build: Callable[[dict], tuple[ConditionInputs, list[str]]]


def _weights(params, pn=None):
    return preset_weights(
        params.get("weights", "classic"),
        k=float(params.get("k", 2.0)),
        delta=float(params.get("delta", 0.0)),
        gamma=float(params.get("gamma", 0.0)),
        pn=pn,
    )


def _matrix(params, default):
    m = params.get("matrix", default)
    if isinstance(m, TriangularMatrix):
        return m
    return matrix_from_options(
        m,
        alpha=float(params.get("alpha", 1.0)),
        t=float(params.get("t", 0.5)),
        p=float(params.get("p", 2.0)),
        pn=params.get("pn", "ones"),
    )


def _lam(params):
    return lambda_preset(params.get("lam", "invlog"))


def _build_class_scenario(params, default_family, default_eps):
    m = _matrix(params, default_family)
    k = float(params.get("k", 2.0))
    notes = []
    fam = m.family
    if fam is Family.CESARO and not m.params["alpha"] > 0:
        notes.append("constraint alpha > 0 not met")
    if fam is Family.P_CESARO:
        p = m.params["p"]
        eps = float(params.get("epsilon", max(default_eps, 2.0 - p + 0.25)))
        if not 1 < p <= 2:
            notes.append("constraint 1 < p <= 2 not met")
        if not p - 2 + eps > 0:
            notes.append("constraint p - 2 + epsilon > 0 not met")
    else:
        eps = float(params.get("epsilon", default_eps))
    phi = params.get("phi") or default_phi(m)
    return ConditionInputs(matrix=m, alpha=_weights(params), phi=phi, k=k, epsilon=eps), notes


def _build_riesz_conditions(params):
    m = _matrix(params, "riesz")
    return ConditionInputs(matrix=m, alpha=_weights(params, m.params.get("pn")),
                           phi=inverse_power_phi(1.0), k=float(params.get("k", 2.0))), []


def _build_factored(params, form):
    m = _matrix(params, "cesaro")
    phi = params.get("phi") or default_phi(m)
    if form == 1:
        X = x_from_phi_over_diagonal(m, phi)
    else:
        X = x_reciprocal_n_phi(phi)
    if m.family is Family.CESARO:
        X = constant(1.0, "1")
    X = params.get("X") or X
    return ConditionInputs(matrix=m, alpha=_weights(params, m.params.get("pn")), phi=phi,
                           k=float(params.get("k", 2.0)), lam=_lam(params), X=X), []


def _build_triangle_hypotheses(params):
    m = _matrix(params, "cesaro")
    theta = theta_preset(params.get("theta", "n"))
    return ConditionInputs(matrix=m, k=float(params.get("k", 2.0)), lam=_lam(params),
                           X=params.get("X") or x_reciprocal_n_diagonal(m), theta=theta), []


def _build_reciprocal_x(params):
    m = _matrix(dict(params, matrix=params.get("matrix", "riesz")), "riesz")
    notes = [] if m.family is Family.RIESZ else ["scenario expects a Riesz matrix"]
    phi = inverse_power_phi(1.0)
    return ConditionInputs(matrix=m, alpha=_weights(params, m.params.get("pn")), phi=phi,
                           k=float(params.get("k", 2.0)), lam=_lam(params),
                           X=x_reciprocal_n_phi(phi)), notes


def _build_cor(params, which):
    k = float(params.get("k", 2.0))
    delta = float(params.get("delta", 0.0))
    gamma = float(params.get("gamma", 0.0))
    a = float(params.get("alpha", 1.0 if which == 1 else 0.5))
    m = build_matrix(Family.CESARO, {"alpha": a})
    notes = []
    if which == 1:
        phi = inverse_power_phi(1.0)
        expo = delta * k - 1
        if a < 1:
            notes.append("constraint alpha >= 1 not met")
        if not 0 <= delta < 1 / k:
            notes.append("constraint 0 <= delta < 1/k not met")
    else:
        phi = inverse_power_phi(a)
        expo = delta * k + (1 - a) * (k - 1) - 1
        if not 0 < a < 1:
            notes.append("constraint 0 < alpha < 1 not met")
        if not 0 <= delta < (2 - a + (1 - a) * k) / k:
            notes.append("constraint 0 <= delta < (2 - alpha + (1 - alpha) k)/k not met")
    eps = float(params.get("epsilon", -expo / 2 if expo < 0 else 0.25))
    alpha_w = preset_weights("logpower", k=k, delta=delta, gamma=gamma)
    # with phi_n = n^-alpha the invlog factor makes (A) diverge, so COR2 defaults to 1/(n+1)
    lam = lambda_preset(params.get("lam", "invlog" if which == 1 else "inv"))
    return ConditionInputs(matrix=m, alpha=alpha_w, phi=phi, k=k, lam=lam,
                           X=constant(1.0, "1"), epsilon=eps), notes


_CLASS_CONDITIONS = ("QPD", "T1", "T2", "T3", "T4")

SCENARIOS: dict[str, _Scenario] = {
    "LEMMA1": _Scenario(_CLASS_CONDITIONS, lambda p: _build_class_scenario(p, "cesaro", 0.25)),
    "LEMMA2": _Scenario(_CLASS_CONDITIONS, lambda p: _build_class_scenario(p, "rhaly", 0.25)),
    "LEMMA3": _Scenario(_CLASS_CONDITIONS, lambda p: _build_class_scenario(p, "p_cesaro", 0.25)),
    "LEMMA4": _Scenario(("L4_I", "L4_II", "L4_III", "L4_IV", "L4_V"), _build_riesz_conditions),
    "THM1_HYP": _Scenario(("A", "B", "N1", "N2", "LAMBDA_RATIO", "BV"), lambda p: _build_factored(p, 1)),
    "THM2_HYP": _Scenario(("A", "B", "N11", "N12", "LAMBDA_RATIO", "BV"), lambda p: _build_factored(p, 2)),
    "THMA_HYP": _Scenario(("TA_i", "TA_ii", "TA_iii", "TA_iv", "TA_v", "TA_vi", "TA_vii", "TA_viii"),
                          _build_triangle_hypotheses),
    "THM6_HYP": _Scenario(("NPN", "M1", "N11", "N12", "A", "B"), _build_reciprocal_x),
    "COR1": _Scenario(_CLASS_CONDITIONS + ("A", "B", "N11", "N12", "LAMBDA_RATIO", "BV"),
                      lambda p: _build_cor(p, 1)),
    "COR2": _Scenario(_CLASS_CONDITIONS + ("A", "B", "N1", "N2", "LAMBDA_RATIO", "BV"),
                      lambda p: _build_cor(p, 2)),
}

_ALIASES = {
    "lemma1": "LEMMA1", "lemma2": "LEMMA2", "lemma3": "LEMMA3", "lemma4": "LEMMA4",
    "thm1": "THM1_HYP", "thm2": "THM2_HYP", "thma": "THMA_HYP", "thm6": "THM6_HYP",
    "cor1": "COR1", "cor2": "COR2",
}


def scenario_key(name: str) -> str:
    key = str(name)
    if key.upper() in SCENARIOS:
        return key.upper()
    try:
        return _ALIASES[key.lower()]
    except KeyError:
        raise ConfigurationError(
            f"unknown scenario {name!r}; choose from {sorted(_ALIASES)}"
        ) from None


def scenario_inputs(scenario_id: str, params: dict | None = None) -> tuple[ConditionInputs, list[str], tuple[str, ...]]:
    sc = SCENARIOS[scenario_key(scenario_id)]
    inputs, notes = sc.build(dict(params or {}))
    conds = sc.conditions
    key = scenario_key(scenario_id)
    if key == "LEMMA4" and inputs.matrix.family is Family.RIESZ:
        conds = conds + ("NPN", "M1")
    return inputs, notes, conds


def evaluate_scenario(
    scenario_id: str,
    params: dict | None = None,
    N: int = 2048,
    M: int | None = None,
    tol: Tolerances | None = None,
    workers: int = 1,
) -> list[ConditionCertificate]:
    """One certificate per condition of the named bundle.

    Parameters outside a scenario's stated constraints are allowed; the
    violation is recorded in every certificate's notes.
    """
    key = scenario_key(scenario_id)
    inputs, notes, conds = scenario_inputs(key, params)
    if M is not None and M < 2 * N and any(_BY_ID[c].rule == "tail" for c in conds):
        raise ConfigurationError(f"tail horizon M = {M} must be at least 2N = {2 * N}")
    extra = {"scenario": key}

    def run(cid):
        c = evaluate_condition(cid, inputs, N, M, tol, extra)
        if notes:
            c = replace(c, notes="; ".join([c.notes] + notes) if c.notes else "; ".join(notes))
        return c

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(run, conds))
    return [run(c) for c in conds]
