"""Ball upper bounds for the sub-Gaussian stable measure.

The measure has ch.f. exp(-1/2 (sum_i lambda_i y_i^2)^(alpha/2)); its
finite-dimensional marginals are radial with density bounded by q_{n,alpha}(0).
Envelopes here minorate lambda_n^(1/2) (role ``minorant_half``).
"""

import math

import numpy as np
from scipy import special

from ._lattice import largest_admissible
from ._validation import DomainError, check_alpha, check_index, check_positive
from .results import BoundResult
from .upper_diag import DEFAULT_N_MAX, _check_role, _cum_log_sigma, _resolve_env, log_ball_volume, scan_minimum

ROLE = "minorant_half"


def q_zero(n, alpha):
    """log q_{n,alpha}(0) = log[2^(1+n/alpha) pi^(n/2) Gamma(n/alpha) / ((2 pi)^n Gamma(n/2) alpha)]."""
    n = check_index("n", n)
    alpha = check_alpha(alpha)
    return ((1.0 + n / alpha) * math.log(2.0) + 0.5 * n * math.log(math.pi)
            + special.gammaln(n / alpha) - n * math.log(2.0 * math.pi)
            - special.gammaln(0.5 * n) - math.log(alpha))


def log_kappa(env, alpha, x):
    x = np.asarray(x, dtype=float)
    return math.log(2.0 / alpha) / alpha + (1.0 - alpha) / alpha * np.log(x) - env.log(x)


def kappa(env, alpha, x):
    """kappa(x) = (2/alpha)^(1/alpha) x^((1-alpha)/alpha) / sigma_bar(x)."""
    alpha = check_alpha(alpha)
    _check_role(env, ROLE)
    if np.any(np.asarray(x) < 1.0):
        raise DomainError("kappa is defined on [1, inf)")
    return np.exp(log_kappa(env, alpha, x))


def zeta_eps(env, alpha, eps):
    """Largest n with eps * kappa(n) <= 1; needs 0 < eps < 1/kappa(1) and kappa unbounded."""
    alpha = check_alpha(alpha)
    eps = check_positive("eps", eps)
    _check_role(env, ROLE)
    limit = math.exp(-float(log_kappa(env, alpha, 1.0)))
    if not eps < limit:
        raise DomainError(f"eps must lie in (0, {limit:.6g}) = (0, 1/kappa(1)); got {eps}")
    log_eps = math.log(eps)
    return largest_admissible(lambda n: log_eps + float(log_kappa(env, alpha, float(n))) <= 0.0)


def L_integral(env, alpha, y):
    """L(y) = int_1^y x kappa'/kappa dx, integrand -x sigma_bar'/sigma_bar + (1 - alpha)/alpha."""
    alpha = check_alpha(alpha)
    return env.log_slope_integral(float(y), (1.0 - alpha) / alpha)


def bound_ball_subgauss(env, alpha, eps, log_convex=None):
    """log of the sub-Gaussian ball bound, valid for every centre.

    General form: -L(zeta) - ((2 - alpha)/(2 alpha)) log zeta - log eps.
    Log-convex form: -L(zeta) - log(eps^alpha zeta) / (2 alpha).
    At alpha = 2 both reduce to the Gaussian expressions.
    """
    alpha = check_alpha(alpha)
    refined = env.log_convex if log_convex is None else (bool(log_convex) and env.log_convex)
    z = zeta_eps(env, alpha, eps)
    ell = L_integral(env, alpha, z)
    if refined:
        value = -ell - (alpha * math.log(eps) + math.log(z)) / (2.0 * alpha)
        return BoundResult(value, z, "eq13", center_free=True)
    value = -ell - (2.0 - alpha) / (2.0 * alpha) * math.log(z) - math.log(eps)
    return BoundResult(value, z, "eq12", center_free=True)


def F2(env, alpha, eps, n_max):
    """F_2(n) = n log eps + (n/alpha) log(2/alpha) + n(1/alpha - 1)(log n - 1) - log(n)/2 - sum log sigma_bar(j)."""
    alpha = check_alpha(alpha)
    n = np.arange(1, n_max + 1, dtype=float)
    return (n * math.log(eps) + n / alpha * math.log(2.0 / alpha)
            + n * (1.0 / alpha - 1.0) * (np.log(n) - 1.0) - 0.5 * np.log(n)
            - _cum_log_sigma(env, n_max))


def finite_dim_ball_subgauss(env, alpha, eps, n_max):
    """log[q_{n,alpha}(0) eps^n V_n / prod sigma_bar(j)] for n = 1..n_max."""
    alpha = check_alpha(alpha)
    n = np.arange(1, n_max + 1, dtype=float)
    log_q0 = ((1.0 + n / alpha) * math.log(2.0) + 0.5 * n * math.log(math.pi)
              + special.gammaln(n / alpha) - n * math.log(2.0 * math.pi)
              - special.gammaln(0.5 * n) - math.log(alpha))
    return log_q0 + n * math.log(eps) + log_ball_volume(n) - _cum_log_sigma(env, n_max)


def direct_ball_bound_subgauss(seq, env, alpha, eps, n_max=DEFAULT_N_MAX, route="exact"):
    """Smallest explicit ball bound over truncations n <= n_max.

    ``route="exact"`` minimises the finite-dimensional bound itself.
    ``route="stirling"`` minimises F_2 + D, where D is the largest gap between
    the exact bound and F_2 over the scanned range, so every term stays a bound.
    """
    alpha = check_alpha(alpha)
    eps = check_positive("eps", eps)
    env = _resolve_env(seq, env, alpha, ROLE)
    if route == "exact":
        def curve(m):
            return finite_dim_ball_subgauss(env, alpha, eps, m)
    elif route == "stirling":
        def curve(m):
            f2 = F2(env, alpha, eps, m)
            return f2 + float(np.max(finite_dim_ball_subgauss(env, alpha, eps, m) - f2))
    else:
        raise ValueError(f"route must be 'exact' or 'stirling', got {route!r}")
    value, n = scan_minimum(curve, seq, n_max)
    return BoundResult(value, n, "eq15_direct", center_free=True, explicit=True)
