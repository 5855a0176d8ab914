"""Eigenvalue sequences lambda_1 >= lambda_2 >= ... > 0 and their smooth envelopes.

An envelope is a differentiable decreasing function f on [1, inf) that bounds a
power of the sequence: ``minorant_alpha`` means f(n) <= lambda_n^(1/alpha),
``minorant_half`` means f(n) <= lambda_n^(1/2), ``majorant_alpha`` means
f(n) >= lambda_n^(1/alpha).  Every bound in the package is driven by one of
these three roles.
"""

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, special

from ._validation import DomainError, check_alpha, check_index, check_positive

ROLES = ("minorant_alpha", "minorant_half", "majorant_alpha")

_CONVEXITY_GRID = np.linspace(1.0, 200.0, 797)
_REL_SLACK = 1e-12


def _role_exponent(role, alpha):
    if role not in ROLES:
        raise ValueError(f"unknown envelope role {role!r}; expected one of {ROLES}")
    return 0.5 if role == "minorant_half" else 1.0 / alpha


def is_log_convex(log_f, grid=_CONVEXITY_GRID):
    """Second-difference test of convexity of ``log_f`` on an equispaced grid."""
    with np.errstate(divide="ignore", invalid="ignore"):
        logf = np.asarray(log_f(grid), dtype=float)
    # a custom f may underflow far out; judge only the representable stretch
    logf = logf[: np.argmin(np.isfinite(logf))] if not np.all(np.isfinite(logf)) else logf
    if logf.size < 3:
        return False
    d2 = logf[2:] - 2.0 * logf[1:-1] + logf[:-2]
    slack = 1e-11 * (1.0 + np.abs(logf[1:-1]))
    return bool(np.all(d2 >= -slack))


@dataclass(frozen=True)
class Envelope:
    """Differentiable decreasing envelope with an analytic derivative.

    ``kind`` / ``rate`` describe the built-in shapes x^-rate ("power") and
    exp(-rate x) ("exponential"), for which the log-derivative integrals have
    closed forms.  ``log_convex`` is measured on a grid when left as None.
    """

    f: Callable
    df: Callable
    role: str
    kind: str = "custom"
    rate: float = math.nan
    log_convex: bool | None = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown envelope role {self.role!r}")
        if self.log_convex is None:
            object.__setattr__(self, "log_convex", is_log_convex(self.log))

    def __call__(self, x):
        return self.f(x)

    def log(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "power":
            return -self.rate * np.log(x)
        if self.kind == "exponential":
            return -self.rate * x
        return np.log(self.f(x))

    def elasticity(self, x):
        """-x f'(x) / f(x)."""
        return -np.asarray(x) * self.df(x) / self.f(x)

    def log_slope_integral(self, y, shift=0.0):
        """int_1^y (-x f'(x)/f(x) + shift) dx, closed form for the built-in shapes."""
        if y < 1.0:
            raise DomainError(f"integral upper limit must be >= 1, got {y}")
        if y == 1.0:
            return 0.0
        if self.kind == "power":
            return (self.rate + shift) * (y - 1.0)
        if self.kind == "exponential":
            return self.rate * (y * y - 1.0) / 2.0 + shift * (y - 1.0)
        return quad_log_slope_integral(self, y, shift)


def quad_log_slope_integral(env, y, shift=0.0):
    """Adaptive quadrature of int_1^y (-x f'/f + shift) dx (the generic route)."""
    value, _ = integrate.quad(lambda x: float(env.elasticity(x)) + shift, 1.0, y,
                              epsabs=0.0, epsrel=1e-11, limit=500)
    return value


def power_envelope(exponent, role, log_convex=None):
    """f(x) = x^-exponent."""
    return Envelope(
        f=lambda x: np.asarray(x, dtype=float) ** -exponent,
        df=lambda x: -exponent * np.asarray(x, dtype=float) ** (-exponent - 1.0),
        role=role, kind="power", rate=float(exponent), log_convex=log_convex,
    )


def exponential_envelope(rate, role, log_convex=None):
    """f(x) = exp(-rate x)."""
    return Envelope(
        f=lambda x: np.exp(-rate * np.asarray(x, dtype=float)),
        df=lambda x: -rate * np.exp(-rate * np.asarray(x, dtype=float)),
        role=role, kind="exponential", rate=float(rate), log_convex=log_convex,
    )


class LambdaSequence:
    """Base class: a positive nonincreasing summable sequence indexed from 1."""

    kind = "abstract"

    def __call__(self, i):
        raise NotImplementedError

    def values(self, n):
        return np.asarray(self(np.arange(1, n + 1)), dtype=float)

    def log_values(self, n):
        return np.log(self.values(n))

    def tail_sum(self, n, e):
        """sum_{i > n} lambda_i^e."""
        raise NotImplementedError

    def envelope(self, role, alpha):
        raise NotImplementedError(f"{type(self).__name__} has no built-in envelope")

    @property
    def length(self):
        """Number of explicitly defined terms (inf for analytic sequences)."""
        return math.inf


@dataclass(frozen=True)
class PowerSequence(LambdaSequence):
    """lambda_i = i^-gamma with gamma > 1."""

    gamma: float
    kind = "power"

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise DomainError(f"power sequence needs gamma > 1 to be summable, got {self.gamma}")

    def __call__(self, i):
        return np.asarray(i, dtype=float) ** -self.gamma

    def log_values(self, n):
        return -self.gamma * np.log(np.arange(1, n + 1, dtype=float))

    def tail_sum(self, n, e):
        s = self.gamma * e
        if s <= 1.0:
            raise DomainError(f"sum of i^-{s:g} diverges (need gamma * e > 1)")
        return float(special.zeta(s, n + 1))

    def envelope(self, role, alpha):
        alpha = check_alpha(alpha)
        return power_envelope(self.gamma * _role_exponent(role, alpha), role)

    def __str__(self):
        return f"power:{self.gamma:g}"


@dataclass(frozen=True)
class ExponentialSequence(LambdaSequence):
    """lambda_i = exp(-rate * i); the default rate 1 gives e^-i."""

    rate: float = 1.0
    kind = "exponential"

    def __post_init__(self):
        check_positive("rate", self.rate)

    def __call__(self, i):
        return np.exp(-self.rate * np.asarray(i, dtype=float))

    def log_values(self, n):
        return -self.rate * np.arange(1, n + 1, dtype=float)

    def tail_sum(self, n, e):
        q = self.rate * check_positive("e", e)
        return math.exp(-(n + 1) * q) / -math.expm1(-q)

    def envelope(self, role, alpha):
        alpha = check_alpha(alpha)
        return exponential_envelope(self.rate * _role_exponent(role, alpha), role)

    def __str__(self):
        return "exp" if self.rate == 1.0 else f"exp:{self.rate:g}"


@dataclass(frozen=True)
class TableSequence(LambdaSequence):
    """Finite table lambda_1..lambda_N, optionally continued by an analytic ``tail``.

    The tail sequence is evaluated at the global index i > N.  Without a tail,
    operations that need terms beyond N raise DomainError.
    """

    table: tuple
    tail: LambdaSequence | None = None
    kind = "custom"
    _arr: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        arr = np.asarray(self.table, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("table must be a nonempty 1-D sequence")
        if not np.all(arr > 0):
            raise ValueError("table entries must be strictly positive")
        object.__setattr__(self, "table", tuple(arr.tolist()))
        object.__setattr__(self, "_arr", arr)

    @property
    def length(self):
        return len(self._arr) if self.tail is None else math.inf

    def __call__(self, i):
        i = np.asarray(i)
        n_tab = len(self._arr)
        if np.any(i < 1):
            raise DomainError("indices start at 1")
        if self.tail is None and np.any(i > n_tab):
            raise DomainError(f"index beyond table length {n_tab} and no analytic tail given")
        inside = np.clip(i, 1, n_tab) - 1
        out = self._arr[inside]
        if self.tail is not None:
            out = np.where(i > n_tab, self.tail(np.maximum(i, 1)), out)
        return out if out.ndim else float(out)

    def tail_sum(self, n, e):
        n_tab = len(self._arr)
        if self.tail is None:
            raise DomainError("tail sums need an analytic tail for a finite table")
        partial = float(np.sum(self._arr[n:] ** e)) if n < n_tab else 0.0
        return partial + self.tail.tail_sum(max(n, n_tab), e)

    def envelope(self, role, alpha):
        return loglinear_envelope(self, role, alpha, len(self._arr))

    def __str__(self):
        return f"table[{len(self._arr)}]"


def tail_sum(seq, n, e):
    """sum_{i > n} lambda_i^e (closed form for the built-in sequences)."""
    n = check_index("n", n, minimum=0)
    return seq.tail_sum(n, check_positive("e", e))


def power_sequence(gamma):
    return PowerSequence(float(gamma))


def exponential_sequence(rate=1.0):
    return ExponentialSequence(float(rate))


def loglinear_envelope(seq, role, alpha, n_knots):
    """Piecewise log-linear interpolation of lambda_n^e through the integer knots.

    It equals lambda_n^e at every knot, so it serves as minorant and majorant at
    the integers; between knots it is the geometric interpolant.  Beyond the
    last knot the final slope is continued (only meaningful when the sequence
    itself decays at least that fast; `validate` checks this).
    """
    alpha = check_alpha(alpha)
    e = _role_exponent(role, alpha)
    knots = np.arange(1, n_knots + 1, dtype=float)
    logv = e * np.log(seq.values(n_knots))
    if n_knots == 1:
        slopes = np.array([-1e-12])
    else:
        slopes = np.diff(logv)
        slopes = np.minimum(slopes, -1e-12)

    def logf(x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.floor(x).astype(int) - 1, 0, len(slopes) - 1)
        return logv[idx] + slopes[idx] * (x - knots[idx])

    def f(x):
        return np.exp(logf(x))

    def df(x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.floor(x).astype(int) - 1, 0, len(slopes) - 1)
        return slopes[idx] * f(x)

    return Envelope(f=f, df=df, role=role, kind="custom")


def load_csv(path, tail=None):
    """Read a two-column CSV (index, lambda) into a TableSequence.

    A header row is allowed.  Indices must run 1, 2, ..., N; values must be
    strictly positive and nonincreasing.
    """
    indices, values = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            try:
                i, lam = int(row[0]), float(row[1])
            except (ValueError, IndexError) as exc:
                if not indices:
                    continue  # header
                raise ValueError(f"malformed row in {path}: {row}") from exc
            indices.append(i)
            values.append(lam)
    if not values:
        raise ValueError(f"{path} contains no data rows")
    if indices != list(range(1, len(indices) + 1)):
        raise ValueError(f"{path}: indices must be 1..N in order")
    arr = np.asarray(values)
    if np.any(arr <= 0):
        raise ValueError(f"{path}: lambda values must be strictly positive")
    if np.any(np.diff(arr) > 0):
        first = int(np.argmax(np.diff(arr) > 0)) + 2
        raise ValueError(f"{path}: lambda must be nonincreasing (violated at index {first})")
    return TableSequence(tuple(values), tail=tail)


@dataclass
class ValidationReport:
    ok: bool
    violations: list
    checked_up_to: int

    @property
    def first_violation(self):
        return self.violations[0] if self.violations else None

    def __bool__(self):
        return self.ok


def validate(seq, env, alpha, N):
    """Check the standing hypotheses on indices 1..N.

    Checks, in order: lambda positive and nonincreasing; the envelope's role
    inequality at every integer; the envelope decreasing on a grid; and, when
    ``env.log_convex`` is set, convexity of log f.  Violations are collected as
    ``(check, index_or_x, message)`` tuples rather than raised.
    """
    alpha = check_alpha(alpha)
    N = check_index("N", N)
    if math.isfinite(seq.length):
        N = min(N, int(seq.length))
    violations = []
    lam = seq.values(N)
    bad = np.flatnonzero(lam <= 0)
    if bad.size:
        violations.append(("positivity", int(bad[0]) + 1, f"lambda_{bad[0] + 1} <= 0"))
    inc = np.flatnonzero(np.diff(lam) > 0)
    if inc.size:
        i = int(inc[0]) + 2
        violations.append(("monotonicity", i, f"lambda_{i} = {lam[i - 1]:g} > lambda_{i - 1} = {lam[i - 2]:g}"))

    n = np.arange(1, N + 1, dtype=float)
    target = lam ** _role_exponent(env.role, alpha)
    fn = np.asarray(env.f(n), dtype=float)
    if env.role == "majorant_alpha":
        wrong = np.flatnonzero(fn < target * (1.0 - _REL_SLACK))
        sense = "<"
    else:
        wrong = np.flatnonzero(fn > target * (1.0 + _REL_SLACK))
        sense = ">"
    if wrong.size:
        k = int(wrong[0])
        violations.append(("role", k + 1, f"{env.role}: f({k + 1}) = {fn[k]:g} {sense} {target[k]:g}"))

    grid = np.linspace(1.0, max(float(N), 2.0), 4 * N + 1)
    slope = np.asarray(env.df(grid), dtype=float)
    nondec = np.flatnonzero(~(slope < 0))
    if nondec.size:
        x = float(grid[nondec[0]])
        violations.append(("decreasing", x, f"f'({x:g}) = {slope[nondec[0]]:g} >= 0"))
    if env.log_convex and not is_log_convex(env.log, grid):
        violations.append(("log_convex", None, "log f fails the second-difference convexity test"))
    return ValidationReport(ok=not violations, violations=violations, checked_up_to=N)
