"""One-dimensional symmetric stable law with characteristic function exp(-|t|^alpha / 2).

The density is obtained by Fourier inversion,

    p(x) = (1/pi) * int_0^inf cos(t x) exp(-t^alpha / 2) dt,

evaluated with QUADPACK: an ordinary adaptive rule on the first half-period
[0, pi/x] and the QAWF Fourier rule (cycle-by-cycle integration with epsilon
extrapolation of the alternating lobe sums) on [pi/x, inf).  Far in the tail the
convergent (alpha < 1) or asymptotic (alpha > 1) power series in x^(-alpha) is
used instead, since it keeps full relative precision where the quadrature only
delivers absolute precision.
"""

import functools
import math
import warnings

import numpy as np
from scipy import integrate, special

from ._validation import DomainError, QuadratureError, check_alpha, check_beta, check_positive

#: Below this stability index the quadrature tolerance is relaxed tenfold.
ALPHA_LOW = 0.5
DEFAULT_TOL = 1e-10
#: Safety factor applied to the grid infimum in :func:`tail_constant`.
TAIL_SAFETY = 0.99
_SERIES_MIN_X = 6.0
_SERIES_MAX_TERMS = 80


def _effective_tol(alpha, tol):
    if alpha < ALPHA_LOW:
        warnings.warn(
            f"alpha={alpha} < {ALPHA_LOW}: quadrature tolerance relaxed to {10 * tol:g}",
            RuntimeWarning,
            stacklevel=3,
        )
        return 10.0 * tol
    return tol


def density_at_zero(alpha):
    """Closed-form value p_alpha(0) = 2^(1/alpha) Gamma(1/alpha) / (pi alpha)."""
    alpha = check_alpha(alpha)
    return math.exp(log_density_at_zero(alpha))


def log_density_at_zero(alpha):
    alpha = check_alpha(alpha)
    return math.log(2.0) / alpha + special.gammaln(1.0 / alpha) - math.log(math.pi * alpha)


def tail_limit(alpha):
    """Limit of x^(1+alpha) p_alpha(x) as x -> inf, i.e. Gamma(1+alpha) sin(pi alpha/2) / (2 pi)."""
    alpha = check_alpha(alpha)
    return special.gamma(1.0 + alpha) * math.sin(math.pi * alpha / 2.0) / (2.0 * math.pi)


def _tail_series(alpha, x, integrated=False):
    """Power series of p(x) (or of P(X > x) when ``integrated``) for large x > 0.

    Returns the sum, or None when the terms stop decreasing before reaching
    double precision (the asymptotic series for alpha > 1 at moderate x).
    """
    total = 0.0
    prev = math.inf
    logx = math.log(x)
    for k in range(1, _SERIES_MAX_TERMS + 1):
        if integrated:
            log_mag = special.gammaln(alpha * k) - special.gammaln(k + 1.0) - alpha * k * logx
        else:
            log_mag = special.gammaln(alpha * k + 1.0) - special.gammaln(k + 1.0) - (alpha * k + 1.0) * logx
        log_mag -= k * math.log(2.0) + math.log(math.pi)
        mag = math.exp(log_mag)
        if mag > prev:
            return None
        total += (-1.0) ** (k + 1) * math.sin(k * math.pi * alpha / 2.0) * mag
        if mag <= 1e-17 * abs(total):
            return total
        prev = mag
    return None


def _quad(func, a, b, tol, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err = integrate.quad(func, a, b, epsabs=tol / 10.0, epsrel=1e-13, limit=400, **kw)
    return value, err


def _kernel_support(alpha):
    return 160.0 ** (1.0 / alpha)


def _kernel_breaks(alpha, support):
    scale = 2.0 ** (1.0 / alpha)
    return [b for b in (scale, 4.0 * scale, 16.0 ** (1.0 / alpha) * scale) if b < support]


def _density_quad(alpha, x, tol):
    kernel = lambda t: math.exp(-0.5 * t**alpha)
    if x == 0.0:
        value, err = _quad(kernel, 0.0, math.inf, tol)
        return value / math.pi, err / math.pi
    head = math.pi / x
    support = _kernel_support(alpha)
    if head >= support:
        # Whole kernel sits inside the first half-period; exp(-t^alpha/2) < 1e-35 beyond.
        value, err = _quad(lambda t: math.cos(t * x) * kernel(t), 0.0, support, tol,
                           points=_kernel_breaks(alpha, support))
        return value / math.pi, err / math.pi
    v1, e1 = _quad(lambda t: math.cos(t * x) * kernel(t), 0.0, head, tol,
                   points=_kernel_breaks(alpha, head) or None)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        v2, e2 = integrate.quad(kernel, head, math.inf, weight="cos", wvar=x, epsabs=tol / 10.0, limlst=400)
    return (v1 + v2) / math.pi, (e1 + e2) / math.pi


def _density_scalar(alpha, x, tol):
    x = abs(float(x))
    if alpha < 2.0 and x >= _SERIES_MIN_X:
        value = _tail_series(alpha, x)
        if value is not None:
            return value
    value, err = _density_quad(alpha, x, tol)
    if not err <= tol:
        raise QuadratureError(
            f"density(alpha={alpha}, x={x}) reached error {err:.3g} > tol {tol:.3g}", achieved=err
        )
    return max(value, 0.0)


def density(alpha, x, tol=DEFAULT_TOL):
    """Density p_alpha(x) of the symmetric stable law with ch.f. exp(-|t|^alpha / 2).

    Parameters
    ----------
    alpha : float
        Stability index in (0, 2].
    x : float or array_like
        Evaluation point(s).  Only |x| is used, so the result is exactly even.
    tol : float
        Absolute error target.  Relaxed tenfold (with a warning) for alpha < 0.5.

    Raises
    ------
    QuadratureError
        If the inversion integral does not reach ``tol``; ``achieved`` carries
        the error estimate.
    """
    alpha = check_alpha(alpha)
    tol = _effective_tol(alpha, check_positive("tol", tol))
    if np.ndim(x) == 0:
        return _density_scalar(alpha, x, tol)
    x = np.abs(np.asarray(x, dtype=float))
    uniq, inverse = np.unique(x, return_inverse=True)
    values = np.array([_density_scalar(alpha, u, tol) for u in uniq])
    return values[inverse].reshape(x.shape)


def log_density(alpha, x, tol=DEFAULT_TOL):
    """log p_alpha(x); far-tail values come from the series and keep relative accuracy."""
    return np.log(density(alpha, x, tol))


def _upper_tail_scalar(alpha, x, tol):
    """P(X > x) for x >= 0."""
    if x == 0.0:
        return 0.5
    if alpha < 2.0 and x >= _SERIES_MIN_X:
        value = _tail_series(alpha, x, integrated=True)
        if value is not None:
            return value
    head = math.pi / x
    support = _kernel_support(alpha)
    integrand = lambda t: x * np.sinc(t * x / math.pi) * math.exp(-0.5 * t**alpha)
    if head >= support:
        v, e = _quad(integrand, 0.0, support, tol, points=_kernel_breaks(alpha, support))
        if not e / math.pi <= tol:
            raise QuadratureError(f"cdf(alpha={alpha}, x={x}) reached error {e / math.pi:.3g}", achieved=e)
        return min(max(0.5 - v / math.pi, 0.0), 0.5)
    v1, e1 = _quad(integrand, 0.0, head, tol, points=_kernel_breaks(alpha, head) or None)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        v2, e2 = integrate.quad(
            lambda t: math.exp(-0.5 * t**alpha) / t, head, math.inf,
            weight="sin", wvar=x, epsabs=tol / 10.0, limlst=400,
        )
    err = (e1 + e2) / math.pi
    if not err <= tol:
        raise QuadratureError(f"cdf(alpha={alpha}, x={x}) reached error {err:.3g}", achieved=err)
    return min(max(0.5 - (v1 + v2) / math.pi, 0.0), 0.5)


def cdf(alpha, x, tol=DEFAULT_TOL):
    """Distribution function, F(x) = 1/2 + (1/pi) int_0^inf sin(t x) exp(-t^alpha/2) / t dt."""
    alpha = check_alpha(alpha)
    tol = _effective_tol(alpha, check_positive("tol", tol))

    def one(v):
        upper = _upper_tail_scalar(alpha, abs(float(v)), tol)
        return 1.0 - upper if v >= 0 else upper

    if np.ndim(x) == 0:
        return one(x)
    x = np.asarray(x, dtype=float)
    return np.array([one(v) for v in x.ravel()]).reshape(x.shape)


@functools.lru_cache(maxsize=64)
def _tail_constant_cached(alpha, x_max, n_grid, safety):
    grid = np.unique(np.concatenate([np.linspace(0.0, 1.0, 41), np.geomspace(1.0, x_max, n_grid)]))
    p = density(alpha, grid)
    envelope = np.minimum(1.0, np.maximum(grid, 1.0) ** -(1.0 + alpha))
    ratio = p / envelope
    return safety * min(float(ratio.min()), tail_limit(alpha))


def tail_constant(alpha, x_max=1e4, n_grid=400, safety=TAIL_SAFETY):
    """A constant c > 0 with p_alpha(x) >= c * min(1, |x|^-(1+alpha)) for all x.

    Computed as ``safety`` times the smaller of the grid infimum of the ratio
    p(x) / min(1, x^-(1+alpha)) over [0, x_max] and its limit at infinity.
    Undefined for alpha = 2 (the Gaussian tail is lighter than any power).
    """
    alpha = check_alpha(alpha)
    if alpha >= 2.0:
        raise DomainError("tail_constant is undefined for alpha = 2: no power minorant exists")
    if not 0.0 < safety <= 1.0:
        raise DomainError(f"safety must be in (0, 1], got {safety}")
    return _tail_constant_cached(alpha, float(x_max), int(n_grid), float(safety))


@functools.lru_cache(maxsize=256)
def _abs_moment_cached(alpha, beta, split, x_far, tol):
    inner, _ = integrate.quad(lambda x: x**beta * _density_scalar(alpha, x, tol), 0.0, split,
                              epsabs=1e-12, epsrel=1e-10, limit=200)
    middle, _ = integrate.quad(lambda x: x**beta * _density_scalar(alpha, x, tol), split, x_far,
                               epsabs=1e-12, epsrel=1e-10, limit=400)
    outer = 0.0
    if alpha < 2.0:
        # Termwise integral of the tail series: int_X^inf x^(beta - alpha k - 1) dx.
        logx = math.log(x_far)
        for k in range(1, _SERIES_MAX_TERMS + 1):
            log_mag = (special.gammaln(alpha * k + 1.0) - special.gammaln(k + 1.0)
                       - k * math.log(2.0) - math.log(math.pi)
                       + (beta - alpha * k) * logx - math.log(alpha * k - beta))
            mag = math.exp(log_mag)
            outer += (-1.0) ** (k + 1) * math.sin(k * math.pi * alpha / 2.0) * mag
            if mag < 1e-16 * abs(outer):
                break
    return 2.0 * (inner + middle + outer)


def abs_moment(alpha, beta):
    """E|X|^beta for 0 < beta < alpha, by quadrature of |x|^beta p_alpha(x).

    The range is split at |x| = 1; beyond ``x_far`` the power-tail series is
    integrated term by term.
    """
    alpha = check_alpha(alpha)
    beta = check_beta(alpha, beta)
    x_far = 40.0 if alpha > 1.0 else 20.0
    return _abs_moment_cached(alpha, beta, 1.0, x_far, DEFAULT_TOL)


def sample(alpha, rng, size=None):
    """Draw from the law with ch.f. exp(-|t|^alpha / 2).

    Chambers-Mallows-Stuck construction for the standard symmetric stable
    variate (ch.f. exp(-|t|^alpha)), rescaled by 2^(-1/alpha).
    """
    alpha = check_alpha(alpha)
    v = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, size=size)
    w = rng.standard_exponential(size=size)
    if alpha == 1.0:
        x = np.tan(v)
    elif alpha == 2.0:
        x = 2.0 * np.sqrt(w) * np.sin(v)
    else:
        x = (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)
             * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha))
    return x * 2.0 ** (-1.0 / alpha)


def sample_positive(index, rng, size=None):
    """Positive stable variate A with E exp(-s A) = exp(-s^index), 0 < index < 1.

    Kanter's representation: with U uniform on (0, pi) and W standard exponential,
    A = (Z(U) / W)^((1 - index) / index), where
    Z(u) = sin(index u)^(index/(1-index)) sin((1-index) u) / sin(u)^(1/(1-index)).
    ``index == 1`` is the degenerate law at 1.
    """
    if not 0.0 < index <= 1.0:
        raise DomainError(f"positive stable index must be in (0, 1], got {index}")
    if index == 1.0:
        return np.ones(size) if size is not None else 1.0
    u = rng.uniform(0.0, math.pi, size=size)
    w = rng.standard_exponential(size=size)
    a = index
    zolotarev = (np.sin(a * u) ** (a / (1.0 - a)) * np.sin((1.0 - a) * u)
                 / np.sin(u) ** (1.0 / (1.0 - a)))
    return (zolotarev / w) ** ((1.0 - a) / a)
