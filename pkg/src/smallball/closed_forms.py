"""Closed-form small-ball asymptotics for power and exponential spectra.

All functions return natural logs with the unspecified multiplicative constant
dropped.  The fitting helpers recover exponents from numerically computed
bounds so they can be compared with the closed forms.
"""

import math

import numpy as np
from scipy import optimize, special

from ._validation import DomainError, check_alpha, check_positive


def _check_eps(eps):
    eps = np.asarray(eps, dtype=float)
    if np.any(eps <= 0.0) or np.any(eps >= 1.0):
        raise DomainError("eps must lie in (0, 1)")
    return eps


def _check_gamma(gamma):
    gamma = float(gamma)
    if not gamma > 1.0:
        raise DomainError(f"gamma must exceed 1, got {gamma}")
    return gamma


def subgauss_power_denominator(alpha, gamma):
    """2 - 2 alpha + gamma alpha; equals 2 gamma - alpha at alpha = 2."""
    return 2.0 - 2.0 * alpha + gamma * alpha


def C5(alpha, gamma):
    d = subgauss_power_denominator(alpha, gamma)
    return d / (2.0 * alpha) * (alpha / 2.0) ** (2.0 / d)


def ex1_ball_subgauss_exponent(alpha, gamma):
    return 2.0 * alpha / subgauss_power_denominator(alpha, gamma)


def ex1_ball_subgauss(alpha, gamma, eps):
    """log of eps^(-alpha(gamma-2)/(2D)) exp(-C_5 eps^(-2 alpha/D)), D = 2 - 2 alpha + gamma alpha."""
    alpha = check_alpha(alpha)
    gamma = _check_gamma(gamma)
    d = subgauss_power_denominator(alpha, gamma)
    if not d > 0.0:
        raise DomainError(f"2 - 2 alpha + gamma alpha must be positive, got {d}")
    eps = _check_eps(eps)
    return (-alpha * (gamma - 2.0) / (2.0 * d) * np.log(eps)
            - C5(alpha, gamma) * eps ** (-2.0 * alpha / d))


def ex1_cube_diag_constant(alpha, gamma):
    return math.pi * gamma / (2.0 ** (1.0 / alpha) * special.gamma(1.0 / alpha))


def ex1_cube_diag(alpha, gamma, eps):
    """log of eps^(-1/2) exp(-(pi gamma / (2^(1/alpha) Gamma(1/alpha))) eps^(-alpha/gamma))."""
    alpha = check_alpha(alpha)
    gamma = _check_gamma(gamma)
    eps = _check_eps(eps)
    return -0.5 * np.log(eps) - ex1_cube_diag_constant(alpha, gamma) * eps ** (-alpha / gamma)


def C6(alpha, gamma):
    d = 2.0 * gamma - alpha
    base = math.sqrt(math.pi) * alpha / (2.0 * special.gamma(1.0 / alpha))
    return d / (2.0 * alpha) * base ** (2.0 * alpha / d)


def ex1_ball_diag(alpha, gamma, eps):
    """log of eps^((alpha-gamma)/(2 gamma-alpha)) exp(-C_6 eps^(-2 alpha/(2 gamma-alpha)))."""
    alpha = check_alpha(alpha)
    gamma = _check_gamma(gamma)
    eps = _check_eps(eps)
    d = 2.0 * gamma - alpha
    return (alpha - gamma) / d * np.log(eps) - C6(alpha, gamma) * eps ** (-2.0 * alpha / d)


def C7(alpha, gamma):
    return (2.0 * gamma - alpha) / (2.0 * alpha)


def ex1_ball_lower(alpha, gamma, gamma1, eps):
    """Display-only lower-bound formula for power spectra, evaluated exactly as printed.

    With delta = gamma1/gamma: log of
    eps^((1 + alpha + delta/2) / gamma^(delta-1)) exp(-C_7 eps^(-delta alpha/(gamma delta - 1))).
    The printed exponents do not follow from the general lower bound, so the
    value is not used to check anything.
    """
    alpha = check_alpha(alpha)
    gamma = _check_gamma(gamma)
    gamma1 = float(gamma1)
    if not 1.0 < gamma1 < gamma:
        raise DomainError(f"need 1 < gamma1 < gamma, got gamma1={gamma1}, gamma={gamma}")
    eps = _check_eps(eps)
    delta = gamma1 / gamma
    prefactor = (1.0 + alpha + delta / 2.0) / gamma ** (delta - 1.0)
    return prefactor * np.log(eps) - C7(alpha, gamma) * eps ** (-delta * alpha / (gamma * delta - 1.0))


def C8(alpha):
    alpha = check_alpha(alpha)
    inner = math.pi * alpha / (2.0 ** ((1.0 + alpha) / alpha) * special.gamma(1.0 / alpha))
    return 0.5 + 2.0 * alpha ** 2 * math.log(inner)


def ex2_cube_lower(alpha, eps):
    """log of exp(-alpha ln^2(1/eps)) for lambda_i = e^-i."""
    alpha = check_alpha(alpha)
    eps = _check_eps(eps)
    return -alpha * np.log(eps) ** 2


def ex2_cube_upper(alpha, eps):
    """log of eps^(-C_8) exp(-(alpha/2) ln^2(1/eps)) for lambda_i = e^-i."""
    alpha = check_alpha(alpha)
    eps = _check_eps(eps)
    return -C8(alpha) * np.log(eps) - 0.5 * alpha * np.log(eps) ** 2


def log_grid(lo, hi, n):
    """n log-spaced points from lo to hi inclusive."""
    check_positive("lo", lo)
    check_positive("hi", hi)
    return np.geomspace(lo, hi, int(n))


def fit_power_exponent(eps, neg_log):
    """Fit -log B(eps) = C eps^-theta + b log(1/eps) + c and return theta.

    The log and constant terms absorb the prefactors and the integer rounding
    of the truncation index, so theta is the leading exponent alone.
    """
    eps = np.asarray(eps, dtype=float)
    y = np.asarray(neg_log, dtype=float)
    u = np.log(1.0 / eps)
    slope = np.polyfit(u, np.log(np.maximum(y, 1e-300)), 1)[0]

    def residual(params):
        theta = params[0]
        design = np.column_stack([np.exp(theta * u), u, np.ones_like(u)])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        return design @ coef - y

    res = optimize.least_squares(residual, x0=[min(max(slope, 1e-3), 5.0)], bounds=([1e-6], [10.0]))
    return float(res.x[0])


def fit_log2_coefficient(eps, neg_log):
    """Fit -log B(eps) = a ln^2(1/eps) + b ln(1/eps) + c and return a."""
    u = np.log(1.0 / np.asarray(eps, dtype=float))
    return float(np.polyfit(u, np.asarray(neg_log, dtype=float), 2)[0])


def loglog_slope(eps, neg_log):
    """Plain slope of log(-log B) against log(1/eps)."""
    u = np.log(1.0 / np.asarray(eps, dtype=float))
    return float(np.polyfit(u, np.log(np.asarray(neg_log, dtype=float)), 1)[0])
