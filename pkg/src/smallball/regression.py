"""Recover small-ball exponents from computed bounds and compare with closed forms."""

import numpy as np

from . import closed_forms as cf
from . import lower, spectra, subgauss, upper_diag
from ._validation import DomainError
from .results import BoundUnavailable

POWER_TOL = 0.05
LOG2_TOL = 0.10


def _neg_logs(fn, eps):
    return -np.array([fn(float(e)).log_value for e in eps])


def _entry(formula, route, target, fitted, tol, reason=None):
    if fitted is None:
        return {"formula": formula, "route": route, "target": target, "fitted": None,
                "rel_error": None, "tolerance": tol, "ok": False, "reason": reason}
    rel = abs(fitted - target) / abs(target)
    return {"formula": formula, "route": route, "target": target, "fitted": fitted,
            "rel_error": rel, "tolerance": tol, "ok": bool(rel <= tol), "reason": None}


def power_report(alpha, gamma, eps):
    """Leading eps-exponents of the direct bounds for lambda_i = i^-gamma."""
    seq = spectra.power_sequence(gamma)
    out = []
    d = cf.subgauss_power_denominator(alpha, gamma)
    if d > 0:
        y = _neg_logs(lambda e: subgauss.direct_ball_bound_subgauss(seq, None, alpha, e), eps)
        out.append(_entry("eq22", "eq15_direct", 2 * alpha / d, cf.fit_power_exponent(eps, y), POWER_TOL))
    y = _neg_logs(lambda e: upper_diag.direct_cube_bound(seq, None, alpha, e), eps)
    out.append(_entry("eq23", "eq6_direct", alpha / gamma, cf.fit_power_exponent(eps, y), POWER_TOL))
    y = _neg_logs(lambda e: upper_diag.direct_ball_bound(seq, None, alpha, e), eps)
    out.append(_entry("eq24", "eq7_direct", 2 * alpha / (2 * gamma - alpha),
                      cf.fit_power_exponent(eps, y), POWER_TOL))
    return out


def exponential_report(alpha, eps, params=None):
    """ln^2(1/eps) coefficients of the cube bounds for lambda_i = e^-i."""
    seq = spectra.exponential_sequence()
    out = []
    try:
        y = _neg_logs(lambda e: lower.lower_bound_cube(seq, None, alpha, params, e, explicit=True), eps)
        out.append(_entry("eq26", "eq18_explicit", alpha, cf.fit_log2_coefficient(eps, y), LOG2_TOL))
    except (BoundUnavailable, DomainError) as exc:
        out.append(_entry("eq26", "eq18_explicit", alpha, None, LOG2_TOL, reason=str(exc)))
    y = _neg_logs(lambda e: upper_diag.direct_cube_bound(seq, None, alpha, e), eps)
    out.append(_entry("eq27", "eq6_direct", alpha / 2.0, cf.fit_log2_coefficient(eps, y), LOG2_TOL))
    return out
