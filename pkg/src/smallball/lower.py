"""Lower bounds on small balls and cubes for the diagonal stable measure.

Envelopes here majorate lambda_n^(1/alpha) (role ``majorant_alpha``); the
sequence itself must satisfy sum lambda_i^(beta/alpha) < inf for the chosen
beta < alpha.  Each bound comes in two flavours:

* ``explicit=False``: the closed form in terms of M or M_1, valid only up to
  an unspecified constant C(r, alpha, lambda);
* ``explicit=True``: the finite-dimensional chain with every factor computed,
  which is a genuine lower bound on the probability.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from . import univariate
from ._lattice import largest_admissible, smallest_admissible
from ._validation import DomainError, check_alpha, check_beta, check_index, check_positive
from .results import BoundResult, BoundUnavailable
from .upper_diag import _check_role, log_ball_volume, log_C0

ROLE = "majorant_alpha"
C3_READINGS = ("literal", "c0")
M1_READINGS = ("rho1", "literal")
MIN_RULES = ("product", "last_coordinate")


@dataclass(frozen=True)
class LowerBoundParams:
    """beta < alpha (fractional moment order) and slack r.

    The ball bound needs 0 < r < beta/(2 alpha); the cube bound needs 0 < r < 1.
    """

    beta: float
    r: float

    @classmethod
    def ball_defaults(cls, alpha):
        beta = check_alpha(alpha) / 2.0
        return cls(beta, beta / (4.0 * alpha))

    @classmethod
    def cube_defaults(cls, alpha):
        return cls(check_alpha(alpha) / 2.0, 0.5)

    def check(self, alpha, kind):
        check_beta(alpha, self.beta)
        upper = self.beta / (2.0 * alpha) if kind == "ball" else 1.0
        if not 0.0 < self.r < upper:
            raise DomainError(f"r must lie in (0, {upper:.6g}) for the {kind} bound, got {self.r}")
        return self


def _params(params, alpha, kind):
    if params is None:
        params = LowerBoundParams.ball_defaults(alpha) if kind == "ball" else LowerBoundParams.cube_defaults(alpha)
    return params.check(alpha, kind)


def log_C3(alpha, reading="literal"):
    """log C_3: 2 Gamma(1/alpha)/(pi alpha) read literally, or C_0(alpha) under ``reading="c0"``."""
    alpha = check_alpha(alpha)
    if reading == "literal":
        return math.log(2.0) + special.gammaln(1.0 / alpha) - math.log(math.pi * alpha)
    if reading == "c0":
        return log_C0(alpha)
    raise ValueError(f"C3 reading must be one of {C3_READINGS}")


def C3(alpha, reading="literal"):
    return math.exp(log_C3(alpha, reading))


def log_rho(env_hat, alpha, x, c3="literal"):
    x = np.asarray(x, dtype=float)
    return log_C3(alpha, c3) - env_hat.log(x) - 0.5 * np.log(x)


def rho(env_hat, alpha, x, c3="literal"):
    """rho(x) = C_3(alpha) / (sigma_hat(x) sqrt(x))."""
    _check_role(env_hat, ROLE)
    return np.exp(log_rho(env_hat, alpha, x, c3))


def M_integral(env_hat, alpha, y):
    """M(y) = int_1^y x rho'/rho dx = int_1^y (-x sigma_hat'/sigma_hat - 1/2) dx."""
    check_alpha(alpha)
    return env_hat.log_slope_integral(float(y), -0.5)


def _tail_threshold(alpha, params, eps):
    """log of r eps^beta / E|xi|^beta, the bound condition (ii) puts on the tail sum."""
    return (math.log(params.r) + params.beta * math.log(eps)
            - math.log(univariate.abs_moment(alpha, params.beta)))


def _tail_ok(seq, alpha, params, eps):
    e = params.beta / alpha
    threshold = _tail_threshold(alpha, params, eps)

    def ok(n):
        s = seq.tail_sum(n, e)
        return s <= 0.0 or math.log(s) < threshold

    ok(1)  # surfaces a divergent tail before any search
    return ok


def eta_bar(seq, env_hat, alpha, params=None, eps=None, c3="literal"):
    """Smallest n with eps rho(n) >= sqrt 2 and sum_{i>n} lambda_i^(beta/alpha) < r eps^beta / E|xi|^beta.

    The tail sum decreases in n, so checking it at the candidate suffices.
    Raises BoundUnavailable when no n <= 2^40 qualifies.
    """
    alpha = check_alpha(alpha)
    eps = check_positive("eps", eps)
    _check_role(env_hat, ROLE)
    params = _params(params, alpha, "ball")
    tail_ok = _tail_ok(seq, alpha, params, eps)
    target = 0.5 * math.log(2.0) - math.log(eps)
    n_i = smallest_admissible(lambda n: float(log_rho(env_hat, alpha, float(n), c3)) >= target)
    n_ii = smallest_admissible(tail_ok)
    if n_i is None or n_ii is None:
        raise BoundUnavailable(f"no truncation index satisfies the lower-bound conditions at eps={eps}")
    n0 = max(n_i, n_ii)
    # rho need not be monotone for a custom envelope; walk forward until (i) holds again
    while float(log_rho(env_hat, alpha, float(n0), c3)) < target:
        n0 += 1
    return n0


def a_term(alpha, n, eps):
    """log[C_4(alpha) min(1, (sqrt 2 n^(1/alpha) / eps)^(1 + alpha))]."""
    alpha = check_alpha(alpha)
    n = check_index("n", n)
    eps = check_positive("eps", eps)
    ratio = 0.5 * math.log(2.0) + math.log(n) / alpha - math.log(eps)
    return math.log(univariate.tail_constant(alpha)) + (1.0 + alpha) * min(0.0, ratio)


def explicit_ball_chain(seq, alpha, beta, r, eps, n, min_rule="product"):
    """log of the explicit finite-dimensional lower bound on mu(S_eps) at truncation n.

    The first n coordinates are confined to the ball of radius eps/sqrt 2, where
    each coordinate density is at least p_alpha(eps / (sqrt 2 lambda_i^(1/alpha)))
    by unimodality (``min_rule="product"``).  ``min_rule="last_coordinate"`` instead uses
    p_alpha(0)^(n-1) p_alpha(eps / (sqrt 2 lambda_n^(1/alpha))), which is not a
    minimum of the density over the ball and can exceed 1.
    """
    alpha = check_alpha(alpha)
    n = check_index("n", n)
    slack = 1.0 - 2.0 ** (beta / 2.0) * r
    if not slack > 0.0:
        raise DomainError("1 - 2^(beta/2) r must be positive")
    log_lam = np.asarray(seq.log_values(n), dtype=float)
    half = eps / math.sqrt(2.0)
    log_scale = log_lam / alpha
    if min_rule == "product":
        log_dens = float(np.sum(univariate.log_density(alpha, half * np.exp(-log_scale))))
    elif min_rule == "last_coordinate":
        log_dens = ((n - 1) * univariate.log_density_at_zero(alpha)
                    + float(univariate.log_density(alpha, half * math.exp(-log_scale[-1]))))
    else:
        raise ValueError(f"min_rule must be one of {MIN_RULES}")
    return (math.log(slack) + n * math.log(half) + float(log_ball_volume(n))
            - float(np.sum(log_scale)) + log_dens)


def lower_bound_ball(seq, env_hat, alpha, params=None, eps=None, explicit=False,
                     c3="literal", min_rule="product"):
    """Lower bound on log mu(S_eps) at n = eta_bar(eps, beta).

    ``explicit=False`` gives -M(n) - log(n)/2 + a(alpha, n, eps);
    ``explicit=True`` gives :func:`explicit_ball_chain` at the same n.
    """
    alpha = check_alpha(alpha)
    if alpha == 2.0:
        raise DomainError("lower bounds need alpha < 2")
    eps = check_positive("eps", eps)
    if not eps < 1.0:
        raise DomainError(f"lower bounds need 0 < eps < 1, got {eps}")
    if env_hat is None:
        env_hat = seq.envelope(ROLE, alpha)
    params = _params(params, alpha, "ball")
    n = eta_bar(seq, env_hat, alpha, params, eps, c3)
    if explicit:
        value = explicit_ball_chain(seq, alpha, params.beta, params.r, eps, n, min_rule)
        return BoundResult(value, n, "eq17_explicit", explicit=True, upper=False)
    value = -M_integral(env_hat, alpha, n) - 0.5 * math.log(n) + a_term(alpha, n, eps)
    return BoundResult(value, n, "eq17", upper=False)


def log_rho1(env_hat, alpha, x):
    return math.log(univariate.tail_constant(alpha)) - env_hat.log(np.asarray(x, dtype=float))


def rho1(env_hat, alpha, x):
    """rho_1(x) = C_4(alpha) / sigma_hat(x)."""
    _check_role(env_hat, ROLE)
    return np.exp(log_rho1(env_hat, alpha, x))


def M1_integral(env_hat, alpha, y, reading="rho1", c3="literal"):
    """M_1(y) = int_1^y x rho_1'(x)/rho_1(x) dx.

    ``reading="literal"`` divides by rho instead of rho_1, giving the integrand
    (C_4/C_3) sqrt(x) * (-x sigma_hat'/sigma_hat).
    """
    alpha = check_alpha(alpha)
    y = float(y)
    if reading == "rho1":
        return env_hat.log_slope_integral(y, 0.0)
    if reading != "literal":
        raise ValueError(f"M1 reading must be one of {M1_READINGS}")
    if y == 1.0:
        return 0.0
    factor = math.exp(math.log(univariate.tail_constant(alpha)) - log_C3(alpha, c3))
    if env_hat.kind == "exponential":
        return factor * env_hat.rate * 0.4 * (y ** 2.5 - 1.0)
    if env_hat.kind == "power":
        return factor * env_hat.rate * (2.0 / 3.0) * (y ** 1.5 - 1.0)
    val, _ = integrate.quad(lambda x: math.sqrt(x) * float(env_hat.elasticity(x)), 1.0, y, limit=200)
    return factor * val


def eta_bar1(seq, env_hat, alpha, params=None, eps=None):
    """Smallest n with eps rho_1(n) > 1, the tail condition, and sigma_hat(n) >= eps; None if absent.

    (i) needs sigma_hat(n) < C_4 eps while (iii) needs sigma_hat(n) >= eps.
    Since C_4 < 1 the two can only meet if sigma_hat is not monotone.
    """
    alpha = check_alpha(alpha)
    eps = check_positive("eps", eps)
    _check_role(env_hat, ROLE)
    params = _params(params, alpha, "cube")
    tail_ok = _tail_ok(seq, alpha, params, eps)
    log_eps = math.log(eps)

    def cond_iii(n):
        return float(env_hat.log(float(n))) >= log_eps

    if not cond_iii(1):
        return None
    n_iii = largest_admissible(cond_iii)
    n_i = smallest_admissible(lambda n: log_eps + float(log_rho1(env_hat, alpha, float(n))) > 0.0)
    n_ii = smallest_admissible(tail_ok)
    if n_i is None or n_ii is None:
        return None
    n0 = max(n_i, n_ii)
    return n0 if n0 <= n_iii else None


def explicit_cube_chain(seq, env_hat, alpha, r, eps, n):
    """log(1 - r) + n log eps + n log C_4 - sum_{i<=n} log sigma_hat(i)."""
    alpha = check_alpha(alpha)
    n = check_index("n", n)
    log_sigma = float(np.sum(env_hat.log(np.arange(1, n + 1, dtype=float))))
    return (math.log1p(-r) + n * math.log(eps) + n * math.log(univariate.tail_constant(alpha))
            - log_sigma)


def lower_bound_cube(seq, env_hat, alpha, params=None, eps=None, explicit=False, reading="rho1"):
    """Lower bound on log mu(D_eps) at n = eta_bar1; BoundUnavailable when that index is absent."""
    alpha = check_alpha(alpha)
    if alpha == 2.0:
        raise DomainError("lower bounds need alpha < 2")
    eps = check_positive("eps", eps)
    if env_hat is None:
        env_hat = seq.envelope(ROLE, alpha)
    params = _params(params, alpha, "cube")
    n = eta_bar1(seq, env_hat, alpha, params, eps)
    if n is None:
        raise BoundUnavailable(
            f"no index satisfies eps rho_1(n) > 1, the tail condition and sigma_hat(n) >= eps at eps={eps}"
        )
    if explicit:
        value = explicit_cube_chain(seq, env_hat, alpha, params.r, eps, n)
        return BoundResult(value, n, "eq18_explicit", explicit=True, upper=False)
    return BoundResult(-M1_integral(env_hat, alpha, n, reading), n, "eq18", upper=False)
