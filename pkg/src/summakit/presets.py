"""Named sequences used by scenarios and the command line.

Conventions for the auxiliary sequences of each matrix family:

* Cesaro of order ``alpha``: ``phi_n = 1/A_n^alpha`` for ``0 < alpha <= 1``,
  ``phi_n = 1/n`` for ``alpha > 1``; ``X_n = 1``.
* Rhaly: ``phi_n = 1/n``; ``X_n = phi_n / a_nn = (n+1)/n``.
* p-Cesaro: ``phi_n = n^-p``; ``X_n = phi_n / a_nn = (n+1)^p / n^p``.
* Riesz: ``phi_n = 1/n``; ``X_n = 1/(n phi_n) = 1`` with ``X_0 = 0``.

In every case ``phi_0 = 1``.
"""
from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .matrices import Family, TriangularMatrix, build_matrix
from .sequences import RealSequence, cesaro_coeffs, constant, sequence

__all__ = [
    "LAMBDA_PRESETS",
    "PN_PRESETS",
    "THETA_PRESETS",
    "lambda_preset",
    "pn_preset",
    "theta_preset",
    "inverse_power_phi",
    "cesaro_phi",
    "default_phi",
    "diagonal_sequence",
    "x_from_phi_over_diagonal",
    "x_reciprocal_n_phi",
    "x_reciprocal_n_diagonal",
    "family_x",
    "matrix_from_options",
]


def _safe_log(idx):
    return np.log(idx.astype(float) + 2.0)


LAMBDA_PRESETS = {
    "invlog": lambda: sequence("1/log(n+2)", lambda i: 1.0 / _safe_log(i)),
    "invlog2": lambda: sequence("1/log(n+2)^2", lambda i: _safe_log(i) ** -2.0),
    "inv": lambda: sequence("1/(n+1)", lambda i: 1.0 / (i + 1.0)),
    "invsqrt": lambda: sequence("1/sqrt(n+1)", lambda i: (i + 1.0) ** -0.5),
    "ones": lambda: constant(1.0, "1"),
}

PN_PRESETS = {
    "ones": lambda: constant(1.0, "1"),
    "inv": lambda: sequence("1/(n+1)", lambda i: 1.0 / (i + 1.0)),
    "linear": lambda: sequence("n+1", lambda i: i + 1.0),
}

THETA_PRESETS = {
    "n": lambda: sequence("n", lambda i: i.astype(float)),
    "ones": lambda: constant(1.0, "1"),
}


def _pick(table, name, what):
    if isinstance(name, RealSequence):
        return name
    try:
        return table[str(name).lower()]()
    except KeyError:
        raise ConfigurationError(f"unknown {what} preset {name!r}; choose from {sorted(table)}") from None


def lambda_preset(name) -> RealSequence:
    return _pick(LAMBDA_PRESETS, name, "lambda")


def pn_preset(name) -> RealSequence:
    return _pick(PN_PRESETS, name, "pn")


def theta_preset(name) -> RealSequence:
    return _pick(THETA_PRESETS, name, "theta")


def inverse_power_phi(e: float) -> RealSequence:
    def fn(idx):
        n = idx.astype(float)
        out = np.ones(idx.size)
        pos = idx > 0
        out[pos] = n[pos] ** -e
        return out

    return sequence(f"n^-{e:g}", fn)


def cesaro_phi(alpha: float) -> RealSequence:
    if alpha > 1:
        return inverse_power_phi(1.0)

    def fn(idx):
        out = 1.0 / cesaro_coeffs(int(idx[-1]) + 1, alpha)[idx[0]:]
        out[idx == 0] = 1.0
        return out

    return sequence(f"1/A_n^{alpha:g}", fn)


def default_phi(matrix: TriangularMatrix) -> RealSequence:
    fam = matrix.family
    if fam is Family.CESARO:
        return cesaro_phi(matrix.params["alpha"])
    if fam in (Family.RHALY, Family.RIESZ):
        return inverse_power_phi(1.0)
    if fam is Family.P_CESARO:
        return inverse_power_phi(matrix.params["p"])
    raise ConfigurationError("custom matrices need an explicit phi sequence")


def diagonal_sequence(matrix: TriangularMatrix) -> RealSequence:
    return sequence(
        f"diag[{matrix.label}]",
        lambda idx: matrix.diagonal(int(idx[-1]) + 1)[idx[0]:],
    )


def x_from_phi_over_diagonal(matrix: TriangularMatrix, phi: RealSequence) -> RealSequence:
    """``X_n = phi_n / a_nn``."""

    def fn(idx):
        stop = int(idx[-1]) + 1
        return phi.values(stop)[idx[0]:] / matrix.diagonal(stop)[idx[0]:]

    return sequence(f"{phi.name}/diag", fn)


def x_reciprocal_n_phi(phi: RealSequence) -> RealSequence:
    """``X_n = 1/(n phi_n)``, ``X_0 = 0``."""

    def fn(idx):
        p = phi.values(int(idx[-1]) + 1)[idx[0]:]
        out = np.zeros(idx.size)
        pos = idx > 0
        out[pos] = 1.0 / (idx[pos] * p[pos])
        return out

    return sequence(f"1/(n*{phi.name})", fn)


def x_reciprocal_n_diagonal(matrix: TriangularMatrix) -> RealSequence:
    """``X_n = 1/(n a_nn)``, ``X_0 = 0``."""
    return x_reciprocal_n_phi(diagonal_sequence(matrix))


def family_x(matrix: TriangularMatrix, phi: RealSequence | None = None) -> RealSequence:
    fam = matrix.family
    if fam is Family.CESARO:
        return constant(1.0, "1")
    phi = phi or default_phi(matrix)
    if fam in (Family.RHALY, Family.P_CESARO):
        return x_from_phi_over_diagonal(matrix, phi)
    if fam is Family.RIESZ:
        return x_reciprocal_n_phi(phi)
    raise ConfigurationError("custom matrices need an explicit X sequence")


def matrix_from_options(name: str, alpha: float = 1.0, t: float = 0.5, p: float = 2.0,
                        pn="ones") -> TriangularMatrix:
    """Build a matrix from command-line style options."""
    key = str(name).lower().replace("-", "_")
    if key in ("cesaro", "c"):
        return build_matrix(Family.CESARO, {"alpha": alpha})
    if key in ("rhaly", "d"):
        return build_matrix(Family.RHALY, {"t": t})
    if key in ("p_cesaro", "pcesaro", "e"):
        return build_matrix(Family.P_CESARO, {"p": p})
    if key in ("riesz", "r"):
        return build_matrix(Family.RIESZ, {"pn": pn_preset(pn)})
    raise ConfigurationError(f"unknown matrix family {name!r}")
