"""Upper bounds on small cubes and balls for the diagonal stable measure.

The measure has ch.f. exp(-1/2 sum_i lambda_i |y_i|^alpha): independent
coordinates lambda_i^(1/alpha) xi_i with xi_i ~ p_alpha.  Two families of
bounds are provided:

* the closed-form bounds driven by an envelope sigma_alpha (minorant of
  lambda_n^(1/alpha)) through the scaling functions phi, Psi and the integrals
  H, K.  They hold up to a multiplicative constant C(alpha, lambda_1) which is
  not materialised (``explicit=False``);
* the direct bounds, which evaluate the finite-dimensional bound at every
  truncation n <= n_max and keep the smallest.  Every constant is explicit.
"""

import math

import numpy as np
from scipy import special

from . import univariate
from ._lattice import largest_admissible
from ._validation import DomainError, check_alpha, check_index, check_positive
from .results import BoundResult

PHI_READINGS = ("literal", "proof")
DEFAULT_N_MAX = None
N_MAX_START = 1024
N_MAX_CAP = 1 << 23


def log_C0(alpha):
    alpha = check_alpha(alpha)
    return ((0.5 + 1.0 / alpha) * math.log(2.0) + special.gammaln(1.0 / alpha)
            - 0.5 * math.log(math.pi) - math.log(alpha))


def C0(alpha):
    """C_0(alpha) = 2^(1/2 + 1/alpha) Gamma(1/alpha) / (sqrt(pi) alpha); C_0(2) = 1."""
    return math.exp(log_C0(alpha))


def _check_role(env, role):
    if env.role != role:
        raise DomainError(f"envelope role must be {role!r}, got {env.role!r}")


def _log_phi_const(alpha, reading):
    if reading not in PHI_READINGS:
        raise ValueError(f"phi reading must be one of {PHI_READINGS}")
    log_2p0 = math.log(2.0) + univariate.log_density_at_zero(alpha)
    # literal: phi = (2 p(0) sigma)^-1 ; proof: phi = 2 p(0) / sigma
    return -log_2p0 if reading == "literal" else log_2p0


def log_phi(env, alpha, x, reading="literal"):
    return _log_phi_const(check_alpha(alpha), reading) - env.log(x)


def phi(env, alpha, x, reading="literal"):
    """phi(x) = (2 p_alpha(0) sigma_alpha(x))^-1.

    ``reading="proof"`` uses 2 p_alpha(0) / sigma_alpha(x) instead, the form the
    derivation of the cube bound actually integrates.
    """
    _check_role(env, "minorant_alpha")
    if np.any(np.asarray(x) < 1.0):
        raise DomainError("phi is defined on [1, inf)")
    return np.exp(log_phi(env, alpha, x, reading))


def log_psi(env, alpha, x):
    return log_C0(alpha) - env.log(x) - 0.5 * np.log(x)


def psi(env, alpha, x):
    """Psi(x) = C_0(alpha) (sigma_alpha(x) sqrt(x))^-1."""
    _check_role(env, "minorant_alpha")
    if np.any(np.asarray(x) < 1.0):
        raise DomainError("Psi is defined on [1, inf)")
    return np.exp(log_psi(env, alpha, x))


def _admissible_limit(log_scale_at_1):
    return math.exp(-log_scale_at_1)


def nu_eps(env, alpha, eps, reading="literal"):
    """Largest n >= 1 with eps * phi(n) <= 1, for 0 < eps < 1/phi(1)."""
    alpha = check_alpha(alpha)
    eps = check_positive("eps", eps)
    _check_role(env, "minorant_alpha")
    limit = _admissible_limit(float(log_phi(env, alpha, 1.0, reading)))
    if not eps < limit:
        raise DomainError(f"eps must lie in (0, {limit:.6g}) = (0, 1/phi(1)); got {eps}")
    log_eps = math.log(eps)
    return largest_admissible(lambda n: log_eps + float(log_phi(env, alpha, float(n), reading)) <= 0.0)


def eta_eps(env, alpha, eps):
    """Largest n >= 1 with eps * Psi(n) <= 1, for 0 < eps < 1/Psi(1)."""
    alpha = check_alpha(alpha)
    eps = check_positive("eps", eps)
    _check_role(env, "minorant_alpha")
    limit = _admissible_limit(float(log_psi(env, alpha, 1.0)))
    if not eps < limit:
        raise DomainError(f"eps must lie in (0, {limit:.6g}) = (0, 1/Psi(1)); got {eps}")
    log_eps = math.log(eps)
    return largest_admissible(lambda n: log_eps + float(log_psi(env, alpha, float(n))) <= 0.0)


def H_integral(env, alpha, y):
    """H(y) = int_1^y x phi'(x)/phi(x) dx = int_1^y -x sigma'(x)/sigma(x) dx."""
    check_alpha(alpha)
    return env.log_slope_integral(float(y), 0.0)


def K_integral(env, alpha, y):
    """K(y) = int_1^y x Psi'(x)/Psi(x) dx; the integrand is -x sigma'/sigma - 1/2."""
    check_alpha(alpha)
    return env.log_slope_integral(float(y), -0.5)


def admissible_eps(env, alpha, reading="literal"):
    """Upper end of the eps range shared by the cube and ball bounds: 1 / max(phi(1), Psi(1))."""
    alpha = check_alpha(alpha)
    return math.exp(-max(float(log_phi(env, alpha, 1.0, reading)), float(log_psi(env, alpha, 1.0))))


def bound_cube(env, alpha, eps, log_convex=None, reading="literal"):
    """log of the cube bound: -H(nu(eps)) - log(eps), or -H(nu) - log(eps)/2 for log-convex sigma.

    ``log_convex`` defaults to the envelope's verified flag; pass False to force
    the general form.
    """
    alpha = check_alpha(alpha)
    refined = env.log_convex if log_convex is None else (bool(log_convex) and env.log_convex)
    n = nu_eps(env, alpha, eps, reading)
    h = H_integral(env, alpha, n)
    log_eps = math.log(eps)
    if refined:
        return BoundResult(-h - 0.5 * log_eps, n, "eq4")
    return BoundResult(-h - log_eps, n, "eq2")


def bound_ball(env, alpha, eps, log_convex=None, reading="literal"):
    """log of the ball bound: -K(eta) - log(eps), or -K(eta) - log(eps^2 eta)/4 for log-convex sigma.

    Valid for every centre (sup over a of mu(S_eps(a))).
    """
    alpha = check_alpha(alpha)
    eps = check_positive("eps", eps)
    limit = admissible_eps(env, alpha, reading)
    if not eps < limit:
        raise DomainError(f"eps must lie in (0, {limit:.6g}) = (0, 1/max(phi(1), Psi(1))); got {eps}")
    refined = env.log_convex if log_convex is None else (bool(log_convex) and env.log_convex)
    n = eta_eps(env, alpha, eps)
    k = K_integral(env, alpha, n)
    log_eps = math.log(eps)
    if refined:
        return BoundResult(-k - 0.25 * (2.0 * log_eps + math.log(n)), n, "eq5", center_free=True)
    return BoundResult(-k - log_eps, n, "eq3", center_free=True)


def _cum_log_sigma(env, n_max):
    return np.cumsum(env.log(np.arange(1, n_max + 1, dtype=float)))


def F(env, alpha, eps, n_max):
    """F(n, eps, sigma) = n log eps + n log(2 p_alpha(0)) - sum_{i<=n} log sigma(i), n = 1..n_max."""
    alpha = check_alpha(alpha)
    n = np.arange(1, n_max + 1, dtype=float)
    log_2p0 = math.log(2.0) + univariate.log_density_at_zero(alpha)
    return n * (math.log(eps) + log_2p0) - _cum_log_sigma(env, n_max)


def F1(env, alpha, eps, n_max):
    """F_1(n) = n log eps + n log C_0 - sum log sigma(i) - log(n)/2 - (n/2)(log n - 1)."""
    alpha = check_alpha(alpha)
    n = np.arange(1, n_max + 1, dtype=float)
    return (n * (math.log(eps) + log_C0(alpha)) - _cum_log_sigma(env, n_max)
            - 0.5 * np.log(n) - 0.5 * n * (np.log(n) - 1.0))


def log_ball_volume(n):
    """log of the volume of the unit ball in R^n."""
    n = np.asarray(n, dtype=float)
    return 0.5 * n * math.log(math.pi) - special.gammaln(0.5 * n + 1.0)


def finite_dim_ball(env, alpha, eps, n_max):
    """log[eps^n V_n p_alpha(0)^n / prod sigma(i)], the bound F_1 approximates via Stirling."""
    alpha = check_alpha(alpha)
    n = np.arange(1, n_max + 1, dtype=float)
    return (n * (math.log(eps) + univariate.log_density_at_zero(alpha)) + log_ball_volume(n)
            - _cum_log_sigma(env, n_max))


def _resolve_env(seq, env, alpha, role):
    if env is None:
        env = seq.envelope(role, alpha)
    _check_role(env, role)
    return env


def _n_max(seq, n_max):
    n_max = check_index("n_max", n_max)
    if math.isfinite(seq.length):
        n_max = min(n_max, int(seq.length))
    return n_max


def scan_minimum(curve, seq, n_max):
    """argmin of curve(m) (an array over n = 1..m) as (value, n).

    With n_max=None the scan doubles m until the minimiser lies in the first
    half of the range, the sequence runs out, or m reaches N_MAX_CAP.
    """
    if n_max is not None:
        values = curve(_n_max(seq, n_max))
        k = int(np.argmin(values))
        return float(values[k]), k + 1
    limit = int(seq.length) if math.isfinite(seq.length) else N_MAX_CAP
    m = min(N_MAX_START, limit)
    while True:
        values = curve(m)
        k = int(np.argmin(values))
        if 2 * (k + 1) <= m or m >= limit:
            return float(values[k]), k + 1
        m = min(2 * m, limit)


def direct_cube_bound(seq, env, alpha, eps, n_max=DEFAULT_N_MAX):
    """min over 1 <= n <= n_max of F(n, eps, sigma); each F(n) bounds log mu(D_eps).

    n_max=None scans adaptively (see :func:`scan_minimum`).
    """
    alpha = check_alpha(alpha)
    eps = check_positive("eps", eps)
    env = _resolve_env(seq, env, alpha, "minorant_alpha")
    value, n = scan_minimum(lambda m: F(env, alpha, eps, m), seq, n_max)
    return BoundResult(value, n, "eq6_direct", explicit=True)


def direct_ball_bound(seq, env, alpha, eps, n_max=DEFAULT_N_MAX, route="exact"):
    """min over n of an explicit bound on log mu(S_eps(a)), valid for every centre a.

    ``route="exact"`` minimises log[eps^n V_n p(0)^n / prod sigma(i)] (the bound
    before Stirling's formula is applied); ``route="stirling"`` minimises
    F_1 - log(pi)/2, which dominates it for every n because
    Gamma(x + 1) >= sqrt(2 pi x) (x/e)^x.
    """
    alpha = check_alpha(alpha)
    eps = check_positive("eps", eps)
    env = _resolve_env(seq, env, alpha, "minorant_alpha")
    if route == "exact":
        def curve(m):
            return finite_dim_ball(env, alpha, eps, m)
    elif route == "stirling":
        def curve(m):
            return F1(env, alpha, eps, m) - 0.5 * math.log(math.pi)
    else:
        raise ValueError(f"route must be 'exact' or 'stirling', got {route!r}")
    value, n = scan_minimum(curve, seq, n_max)
    return BoundResult(value, n, "eq7_direct", center_free=True, explicit=True)
