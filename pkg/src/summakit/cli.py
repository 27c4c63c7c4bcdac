"""Command-line runner: ``summakit <command> [options]``.

Commands
  check-class       certify a scenario bundle; one JSON certificate per condition
  summability       CSV table of the summability functional and its decomposition
  local-experiment  reports for f, g and f - g at a point
  validate          re-read CSV/JSON outputs and report diagnostics

Options may also come from ``--config FILE`` (``key = value`` per line);
command-line flags take precedence.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .conditions import (
    ConditionInputs,
    bundle_verdict,
    evaluate_condition,
    evaluate_scenario,
    scenario_key,
)
from .errors import ConfigurationError, PreconditionError, SummakitError
from .fourier import (
    builtin,
    coefficients,
    default_quadrature_points,
    local_property_experiment,
    localize,
    term_sequence,
)
from .presets import default_phi, family_x, lambda_preset, matrix_from_options
from .reports import (
    SUMMABILITY_HEADER,
    summability_rows,
    to_json,
    validate_paths,
    write_csv,
    write_json,
)
from .sequences import RealSequence, Tolerances, Verdict, constant, from_array, sequence
from .summability import decomposition_table, factored_terms, preset_weights, summability_total

DEFAULT_SEED = 0x5EED
ENV_DEFAULT_N = "SUMMAKIT_DEFAULT_N"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VIOLATED = 2
EXIT_INCONCLUSIVE = 3
EXIT_PRECONDITION = 4

VERDICT_EXIT = {Verdict.SUPPORTED: EXIT_OK, Verdict.VIOLATED: EXIT_VIOLATED, Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE}
FLATNESS_EXIT = {"flat": EXIT_OK, "growing": EXIT_VIOLATED, "inconclusive": EXIT_INCONCLUSIVE}


@dataclass(frozen=True)
class RunConfig:
    command: str
    scenario: str | None = None
    matrix: str | None = None
    alpha: float | None = None
    t: float = 0.5
    p: float = 2.0
    pn: str = "ones"
    weights: str = "classic"
    k: float = 2.0
    delta: float = 0.0
    gamma: float = 0.0
    lam: str | None = None
    theta: str = "n"
    terms: str = "fourier"
    f: str = "square"
    g: str | None = None
    replacement: str = "zero"
    preset: str | None = None
    x0: float = math.pi / 2
    half_width: float = 0.3
    N: int = 2048
    M: int | None = None
    quadrature_points: int | None = None
    out: str = "summakit-out"
    seed: int = DEFAULT_SEED
    slope_tol: float | None = None
    flat_tol: float | None = None
    workers: int = 1
    paths: tuple = ()

    def tolerances(self) -> Tolerances:
        tol = Tolerances()
        if self.slope_tol is not None:
            tol = replace(tol, upper_slope_tol=self.slope_tol)
        if self.flat_tol is not None:
            tol = replace(tol, flat_tol=self.flat_tol)
        return tol

    def validate(self) -> "RunConfig":
        if self.N < 8:
            raise ConfigurationError(f"N must be at least 8, got {self.N}")
        if self.k < 1:
            raise ConfigurationError(f"k must be >= 1, got {self.k}")
        if self.M is not None and self.M < 1:
            raise ConfigurationError(f"M must be positive, got {self.M}")
        if self.workers < 1:
            raise ConfigurationError("workers must be at least 1")
        if self.command == "check-class" and not self.scenario:
            raise ConfigurationError("check-class needs --scenario")
        if self.command == "validate" and not self.paths:
            raise ConfigurationError("validate needs at least one path")
        return self


def _seed(text: str) -> int:
    value = int(str(text), 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


# dest -> (flags, type, help)
_OPTIONS = {
    "scenario": (("--scenario",), str, "scenario bundle, e.g. lemma1, lemma4, thmA, cor1"),
    "matrix": (("--matrix",), str, "cesaro | rhaly | p_cesaro | riesz"),
    "alpha": (("--alpha",), float, "Cesaro order"),
    "t": (("--t",), float, "Rhaly parameter, 0 < t < 1"),
    "p": (("--p",), float, "p-Cesaro exponent"),
    "pn": (("--pn",), str, "Riesz weights: ones | inv | linear"),
    "weights": (("--weights",), str, "weight preset: classic | cad | nbar | logpower"),
    "k": (("--k",), float, "summability index k >= 1"),
    "delta": (("--delta",), float, "weight exponent delta >= 0"),
    "gamma": (("--gamma",), float, "log exponent of the logpower preset"),
    "lam": (("--lambda",), str, "lambda preset: invlog | invlog2 | inv | invsqrt | ones"),
    "theta": (("--theta",), str, "theta preset: n | ones"),
    "terms": (("--terms",), str, "series terms: fourier | ones | alternating | random"),
    "f": (("--f",), str, "function: zero | sawtooth | square | triangle | bump"),
    "g": (("--g",), str, "comparison function (default: f localized around x0)"),
    "replacement": (("--replacement",), str, "function used outside the neighbourhood by localization"),
    "preset": (("--preset",), str, "named experiment preset (mohanty-demo)"),
    "x0": (("--x0",), float, "evaluation point"),
    "half_width": (("--half-width",), float, "neighbourhood half-width delta"),
    "N": (("--N",), int, "prefix length"),
    "M": (("--M",), int, "tail horizon for double sums (default 4N)"),
    "quadrature_points": (("--quadrature-points",), int, "quadrature points (power of two)"),
    "out": (("--out",), str, "output directory"),
    "seed": (("--seed",), _seed, "64-bit seed for random terms"),
    "slope_tol": (("--slope-tol",), float, "slope tolerance for bounded ratios"),
    "flat_tol": (("--flat-tol",), float, "relative tail tolerance of the flatness rule"),
    "workers": (("--workers",), int, "parallel workers for independent conditions"),
}

COMMANDS = ("check-class", "summability", "local-experiment", "validate")

PRESETS = {
    "mohanty-demo": dict(f="square", replacement="zero", x0=math.pi / 2, half_width=0.3,
                         matrix="cesaro", alpha=1.0, k=2.0, lam="invlog", weights="classic", N=2048),
}


def _add_options(p: argparse.ArgumentParser) -> None:
    for dest, (flags, typ, hlp) in _OPTIONS.items():
        p.add_argument(*flags, dest=dest, type=typ, help=hlp, default=argparse.SUPPRESS)
    p.add_argument("--config", default=argparse.SUPPRESS, help="key = value configuration file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="summakit", description=__doc__.split("\n")[0])
    parser.add_argument("--validate", nargs="+", metavar="PATH", default=argparse.SUPPRESS,
                        help="shortcut for the validate command")
    sub = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        sp = sub.add_parser(name)
        if name == "validate":
            sp.add_argument("paths", nargs="+")
        else:
            _add_options(sp)
    return parser


def _config_options_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="config", add_help=False, exit_on_error=False)
    _add_options(p)
    return p


_FLAG_OF = {dest: flags[0] for dest, (flags, _, _) in _OPTIONS.items()}
_KEY_ALIASES = {"lambda": "lam", "half-width": "half_width", "quadrature-points": "quadrature_points"}


def read_config_file(path: str) -> dict[str, Any]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from None
    argv = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        dest = _KEY_ALIASES.get(key, key.replace("-", "_"))
        if dest not in _OPTIONS:
            raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
        argv += [_FLAG_OF[dest], value]
    try:
        ns, rest = _config_options_parser().parse_known_args(argv)
    except (argparse.ArgumentError, SystemExit) as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    if rest:
        raise ConfigurationError(f"{path}: cannot parse {rest}")
    return vars(ns)


def default_prefix() -> int:
    env = os.environ.get(ENV_DEFAULT_N)
    if env is None:
        return 2048
    try:
        value = int(env)
    except ValueError:
        raise ConfigurationError(f"{ENV_DEFAULT_N} must be an integer, got {env!r}") from None
    return value


def resolve_config(args: argparse.Namespace) -> RunConfig:
    given = vars(args).copy()
    command = given.pop("command", None)
    if "validate" in given:
        command = "validate"
        given["paths"] = given.pop("validate")
    if command is None:
        raise ConfigurationError("no command given; choose from " + ", ".join(COMMANDS))
    merged: dict[str, Any] = {"N": default_prefix()}
    preset = None
    cfg = {}
    if "config" in given:
        cfg = read_config_file(given.pop("config"))
    preset = given.get("preset", cfg.get("preset"))
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigurationError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        merged.update(PRESETS[preset])
    merged.update(cfg)
    merged.update(given)
    if "paths" in merged:
        merged["paths"] = tuple(merged["paths"])
    return RunConfig(command=command, **merged).validate()


# --------------------------------------------------------------------------
# shared builders


def _matrix(cfg: RunConfig, default: str = "cesaro"):
    return matrix_from_options(
        cfg.matrix or default,
        alpha=1.0 if cfg.alpha is None else cfg.alpha,
        t=cfg.t, p=cfg.p, pn=cfg.pn,
    )


def _weights(cfg: RunConfig, matrix):
    return preset_weights(cfg.weights, k=cfg.k, delta=cfg.delta, gamma=cfg.gamma,
                          pn=matrix.params.get("pn"))


def _scenario_params(cfg: RunConfig) -> dict[str, Any]:
    params: dict[str, Any] = {"k": cfg.k, "weights": cfg.weights, "delta": cfg.delta,
                              "gamma": cfg.gamma, "t": cfg.t, "p": cfg.p, "pn": cfg.pn,
                              "theta": cfg.theta}
    if cfg.matrix is not None:
        params["matrix"] = cfg.matrix
    if cfg.alpha is not None:
        params["alpha"] = cfg.alpha
    if cfg.lam is not None:
        params["lam"] = cfg.lam
    return params


def _say(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


# --------------------------------------------------------------------------
# commands


def cmd_check_class(cfg: RunConfig) -> int:
    key = scenario_key(cfg.scenario)
    certs = evaluate_scenario(key, _scenario_params(cfg), N=cfg.N, M=cfg.M,
                              tol=cfg.tolerances(), workers=cfg.workers)
    verdict = bundle_verdict(certs)
    code = VERDICT_EXIT[verdict]
    out = Path(cfg.out)
    for c in certs:
        write_json(out / f"{c.id}.json", c.to_dict())
    summary = {
        "scenario": key,
        "N": cfg.N,
        "M": cfg.M if cfg.M is not None else 4 * cfg.N,
        "verdict": verdict.value,
        "exit_code": code,
        "conditions": {c.id: c.verdict.value for c in certs},
        "certificates": [c.to_dict() for c in certs],
    }
    write_json(out / "bundle.json", summary)
    for c in certs:
        _say(f"{c.id:<13} {c.verdict.value:<13} sup={c.sup_ratio:.6g}\n")
    _say(f"bundle {key}: {verdict.value}\n")
    return code


def _base_terms(cfg: RunConfig, N: int) -> RealSequence:
    kind = cfg.terms.lower()
    if kind == "fourier":
        f = builtin(cfg.f)
        M = cfg.quadrature_points or default_quadrature_points(N - 1)
        return term_sequence(coefficients(f, N - 1, M), cfg.x0)
    if kind == "ones":
        return constant(1.0, "1")
    if kind == "alternating":
        return sequence("(-1)^n", lambda i: np.where(i % 2 == 0, 1.0, -1.0))
    if kind == "random":
        # bounded partial sums: s_n uniform on [-1, 1], terms are their differences
        s = np.random.default_rng(cfg.seed).uniform(-1.0, 1.0, N)
        return from_array(f"random(seed={cfg.seed:#x})", np.diff(s, prepend=0.0))
    raise ConfigurationError(f"unknown terms source {cfg.terms!r}")


def _summary(report, residual: float | None = None) -> dict[str, Any]:
    out = {
        "N": report.N,
        "k": report.k,
        "S_N": report.total,
        "last_decade_gain": report.last_decade_gain,
        "flatness_verdict": report.flatness_verdict,
        "increment_slope": report.increment_slope,
        "path_discrepancy": report.path_discrepancy,
        "max_abs_s": report.max_abs_s,
    }
    if residual is not None:
        out["max_decomposition_residual"] = residual
    return out


def _report_table(matrix, lam, X, C, report):
    s = np.cumsum(C.values(report.N))
    parts = decomposition_table(matrix, lam, X, from_array("s", s), report.N)
    resid = np.abs(report.dT - parts.sum(axis=1)) / np.maximum(1.0, np.abs(report.dT))
    return parts, float(resid.max())


def cmd_summability(cfg: RunConfig) -> int:
    m = _matrix(cfg)
    N = cfg.N
    C = _base_terms(cfg, N)
    lam = lambda_preset(cfg.lam or "invlog")
    X = family_x(m)
    alpha = _weights(cfg, m)
    report = summability_total(m, alpha, cfg.k, factored_terms(C, lam, X), N, cfg.tolerances())
    parts, resid = _report_table(m, lam, X, C, report)
    write_csv(Path(cfg.out) / "summability.csv", SUMMABILITY_HEADER, summability_rows(report, parts))
    summary = {"command": "summability", "matrix": m.label, "weights": alpha.name,
               "lambda": lam.name, "X": X.name, "terms": C.name, **_summary(report, resid)}
    _say(to_json(summary, indent=0).replace("\n", " ").strip() + "\n")
    return EXIT_OK


def cmd_local_experiment(cfg: RunConfig) -> int:
    m = _matrix(cfg)
    f = builtin(cfg.f)
    if cfg.g is not None:
        g = builtin(cfg.g)
    else:
        g = localize(f, cfg.x0, cfg.half_width, builtin(cfg.replacement))
    lam = lambda_preset(cfg.lam or "invlog")
    X = family_x(m)
    alpha = _weights(cfg, m)
    tol = cfg.tolerances()

    def certificates():
        inputs = ConditionInputs(matrix=m, alpha=alpha, phi=default_phi(m), k=cfg.k, lam=lam, X=X)
        return [evaluate_condition(cid, inputs, cfg.N, cfg.M, tol, {"experiment": "local"})
                for cid in ("A", "B", "LAMBDA_RATIO", "BV")]

    res = local_property_experiment(f, g, cfg.x0, cfg.half_width, m, alpha, lam, X, cfg.k, cfg.N,
                                    M=cfg.quadrature_points, tol=tol, certificates=certificates,
                                    workers=cfg.workers)
    out = Path(cfg.out)
    reports = {"f": res.f_report, "g": res.g_report, "difference": res.difference_report}
    series = dict(zip(reports, res.series))
    report_json = {}
    for label, rep in reports.items():
        C = term_sequence(series[label], cfg.x0)
        parts, resid = _report_table(m, lam, X, C, rep)
        write_csv(out / f"{label}.csv", SUMMABILITY_HEADER, summability_rows(rep, parts))
        report_json[label] = _summary(rep, resid)
    verdict = res.verdict
    code = FLATNESS_EXIT[verdict]
    doc = {
        "command": "local-experiment",
        "preset": cfg.preset,
        "f": f.name,
        "g": g.name,
        "x0": cfg.x0,
        "half_width": cfg.half_width,
        "matrix": m.label,
        "weights": alpha.name,
        "lambda": lam.name,
        "X": X.name,
        "k": cfg.k,
        "N": cfg.N,
        "quadrature_points": res.quadrature_points,
        "verdict": verdict,
        "exit_code": code,
        "reports": report_json,
        "max_abs_unfactored_partial_sums": res.max_abs_s,
        "certificates": [c.to_dict() for c in res.certificates],
    }
    write_json(out / "verdict.json", doc)
    _say(f"difference verdict: {verdict} (S_N = {res.difference_report.total:.6g}, "
         f"tail = {res.difference_report.last_decade_gain:.3g})\n")
    for c in res.certificates:
        _say(f"  {c.id:<13} {c.verdict.value}\n")
    return code


def cmd_validate(cfg: RunConfig) -> int:
    diags = validate_paths(cfg.paths)
    for d in diags:
        _say(d + "\n")
    _say(f"{len(diags)} diagnostics\n")
    return EXIT_OK if not diags else EXIT_VIOLATED


HANDLERS = {
    "check-class": cmd_check_class,
    "summability": cmd_summability,
    "local-experiment": cmd_local_experiment,
    "validate": cmd_validate,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = resolve_config(args)
        return HANDLERS[cfg.command](cfg)
    except PreconditionError as exc:
        sys.stderr.write(f"precondition failed: {exc}\n")
        return EXIT_PRECONDITION
    except (ConfigurationError, SummakitError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
