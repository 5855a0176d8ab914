"""Monte Carlo estimates of small-ball and small-cube probabilities.

Vectors are truncated to their first ``n`` coordinates.  Truncation can only
enlarge the events {||P_n(X - a)|| <= eps}, so estimates are biased upwards;
the analytic tail bound of the discarded coordinates is recorded alongside.

Sampling is split across ``workers`` independent streams spawned from one
master seed.  Each worker draws a fixed share of the samples and the hit
counts are summed, so results depend on (seed, workers) and nothing else.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy import special, stats

from . import univariate
from ._lattice import smallest_admissible
from ._validation import DomainError, check_alpha, check_beta, check_index, check_positive

FAMILIES = ("diag", "subgauss")
NORMS = ("l2", "linf")
BETA_FRACTIONS = (0.5, 0.75, 0.9)
MAX_TRUNC = 200_000
_CHUNK_CELLS = 1 << 22


@dataclass(frozen=True)
class MCConfig:
    """Sampling settings.

    ``truncation=None`` picks the smallest dimension whose tail bound is at
    most ``delta``; an integer fixes it.
    """

    samples: int = 100_000
    seed: int = 0
    truncation: int | None = None
    delta: float = 0.01
    workers: int = 1
    confidence: float = 0.95

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 100:
            raise DomainError(f"samples must be an integer >= 100, got {self.samples}")
        if not 0.0 < self.delta < 0.5:
            raise DomainError(f"delta must lie in (0, 0.5), got {self.delta}")
        check_index("workers", self.workers)
        if self.truncation is not None:
            check_index("truncation", self.truncation)
        if not 0.0 < self.confidence < 1.0:
            raise DomainError(f"confidence must lie in (0, 1), got {self.confidence}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class MCEstimate:
    p_hat: float
    ci_low: float
    ci_high: float
    n_trunc: int
    trunc_tail_bound: float
    seed_used: int
    hits: int
    samples: int
    workers: int
    eps: float
    norm: str
    family: str
    center_norm: float = 0.0

    def as_dict(self):
        return asdict(self)


def subgauss_scale(alpha):
    """c with E exp(-c A q / 2) = exp(-q^(alpha/2) / 2) when E exp(-s A) = exp(-s^(alpha/2))."""
    return 2.0 ** (1.0 - 2.0 / check_alpha(alpha))


def _log_abs_moment_positive(alpha, p):
    """log E A^p for the positive (alpha/2)-stable A, 0 <= p < alpha/2."""
    if alpha == 2.0:
        return 0.0
    return special.gammaln(1.0 - 2.0 * p / alpha) - special.gammaln(1.0 - p)


def tail_bound(seq, alpha, beta, eps, n, family="diag", norm="l2"):
    """Chebyshev-type bound on the probability that coordinates beyond n spoil the event.

    diag, l2:     2^(beta/2) E|xi|^beta sum_{i>n} lambda_i^(beta/alpha) / eps^beta
    diag, linf:   E|xi|^beta sum_{i>n} lambda_i^(beta/alpha) / eps^beta   (union bound)
    subgauss:     (k/eps^2)^(beta/2) c^(beta/2) E A^(beta/2) (sum_{i>n} lambda_i)^(beta/2),
                  k = 2 for l2 and 1 for linf
    """
    alpha = check_alpha(alpha)
    beta = check_beta(alpha, beta)
    if family == "diag":
        s = seq.tail_sum(n, beta / alpha)
        if s <= 0.0:
            return 0.0
        log_b = (math.log(univariate.abs_moment(alpha, beta)) + math.log(s) - beta * math.log(eps))
        if norm == "l2":
            log_b += 0.5 * beta * math.log(2.0)
    elif family == "subgauss":
        s = seq.tail_sum(n, 1.0)
        if s <= 0.0:
            return 0.0
        k = 2.0 if norm == "l2" else 1.0
        log_b = 0.5 * beta * (math.log(k) - 2.0 * math.log(eps) + math.log(subgauss_scale(alpha))
                              + math.log(s)) + _log_abs_moment_positive(alpha, beta / 2.0)
    else:
        raise ValueError(f"family must be one of {FAMILIES}")
    return math.exp(log_b)


def truncation_dim(seq, alpha, beta, eps, delta, family="diag", norm="l2"):
    """Smallest n whose tail bound is <= delta, as (n, achieved bound).

    ``beta=None`` tries beta = f * alpha for f in BETA_FRACTIONS and keeps the
    smallest n among those with a convergent tail.
    """
    alpha = check_alpha(alpha)
    eps = check_positive("eps", eps)
    if beta is None:
        best, last_error = None, None
        for f in BETA_FRACTIONS:
            try:
                cand = truncation_dim(seq, alpha, f * alpha, eps, delta, family, norm)
            except DomainError as exc:
                last_error = exc
                continue
            if best is None or cand[0] < best[0]:
                best = cand
        if best is None:
            raise last_error
        return best
    tail_bound(seq, alpha, beta, eps, 1, family, norm)  # divergent tails fail here
    limit = int(seq.length) if math.isfinite(seq.length) else MAX_TRUNC
    n = smallest_admissible(lambda m: tail_bound(seq, alpha, beta, eps, m, family, norm) <= delta,
                            cap=limit)
    if n is None or n > limit:
        raise DomainError(f"truncation dimension for delta={delta} exceeds {limit}")
    return n, tail_bound(seq, alpha, beta, eps, n, family, norm)


def sample_diag(seq, alpha, n, rng, size=None):
    """Rows of lambda_i^(1/alpha) xi_i, i = 1..n, with xi_i i.i.d. from the univariate law."""
    alpha = check_alpha(alpha)
    n = check_index("n", n)
    scale = np.exp(np.asarray(seq.log_values(n), dtype=float) / alpha)
    shape = (n,) if size is None else (int(size), n)
    return univariate.sample(alpha, rng, size=shape) * scale


def sample_subgauss(seq, alpha, n, rng, size=None):
    """Rows of sqrt(c A) Z with Z ~ N(0, diag(lambda_1..lambda_n)) and A positive (alpha/2)-stable."""
    alpha = check_alpha(alpha)
    n = check_index("n", n)
    sd = np.exp(0.5 * np.asarray(seq.log_values(n), dtype=float))
    rows = 1 if size is None else int(size)
    z = rng.standard_normal((rows, n)) * sd
    a = univariate.sample_positive(alpha / 2.0, rng, size=rows)
    x = np.sqrt(subgauss_scale(alpha) * a)[:, None] * z
    return x[0] if size is None else x


_SAMPLERS = {"diag": sample_diag, "subgauss": sample_subgauss}


def _worker_counts(family, seq, alpha, n, count, seed_seq, eps, centers):
    """Hit counts of shape (norm, centre, eps) for one worker's share of samples."""
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    draw = _SAMPLERS[family]
    hits = np.zeros((len(NORMS), len(centers), len(eps)), dtype=np.int64)
    chunk = max(1, _CHUNK_CELLS // n)
    done = 0
    while done < count:
        rows = min(chunk, count - done)
        x = draw(seq, alpha, n, rng, size=rows)
        for k, c in enumerate(centers):
            d = x - c
            l2 = np.sqrt(np.einsum("ij,ij->i", d, d))
            linf = np.max(np.abs(d), axis=1)
            hits[0, k] += np.searchsorted(np.sort(l2), eps, side="right")
            hits[1, k] += np.searchsorted(np.sort(linf), eps, side="right")
        done += rows
    return hits


def _pad_center(center, n):
    c = np.zeros(n)
    if center is None:
        return c
    center = np.asarray(center, dtype=float).ravel()
    m = min(n, center.size)
    c[:m] = center[:m]
    return c


def count_hits(family, seq, alpha, n, eps, cfg, centers=(None,)):
    """Summed hit counts (norm, centre, eps) over all workers for dimension n."""
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}")
    alpha = check_alpha(alpha)
    eps = np.asarray(eps, dtype=float)
    padded = [_pad_center(c, n) for c in centers]
    streams = np.random.SeedSequence(int(cfg.seed)).spawn(cfg.workers)
    base, extra = divmod(int(cfg.samples), cfg.workers)
    shares = [base + (1 if w < extra else 0) for w in range(cfg.workers)]
    jobs = [(family, seq, alpha, n, shares[w], streams[w], eps, padded) for w in range(cfg.workers)]
    if cfg.workers == 1:
        parts = [_worker_counts(*jobs[0])]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(lambda job: _worker_counts(*job), jobs))
    return np.sum(parts, axis=0)


def clopper_pearson(hits, samples, confidence=0.95):
    """Exact two-sided binomial interval."""
    ci = stats.binomtest(int(hits), int(samples)).proportion_ci(confidence_level=confidence, method="exact")
    return float(ci.low), float(ci.high)


def resolve_truncation(family, seq, alpha, eps_min, cfg, norm, min_dim):
    if cfg.truncation is not None:
        n = max(int(cfg.truncation), min_dim)
        if math.isfinite(seq.length):
            n = min(n, int(seq.length))
        bound = _best_tail(seq, alpha, eps_min, n, family, norm)
        return n, bound
    n, _ = truncation_dim(seq, alpha, None, eps_min, cfg.delta, family, norm)
    n = max(n, min_dim)
    if math.isfinite(seq.length):
        n = min(n, int(seq.length))
    return n, _best_tail(seq, alpha, eps_min, n, family, norm)


def _best_tail(seq, alpha, eps, n, family, norm):
    """Smallest tail bound over the beta grid (inf when every choice diverges)."""
    if math.isfinite(seq.length) and n >= seq.length:
        return 0.0
    best = math.inf
    for f in BETA_FRACTIONS:
        try:
            best = min(best, tail_bound(seq, alpha, f * alpha, eps, n, family, norm))
        except DomainError:
            continue
    return best


def estimate(family, seq, alpha, eps, cfg, norm="l2", centers=(None,), min_dim=1):
    """MCEstimate for every (centre, eps) pair from one shared set of draws.

    Returns a nested list indexed [centre][eps].  The truncation is chosen at
    the smallest eps and raised to at least ``min_dim``; each estimate carries
    the tail bound for its own eps.
    """
    if norm not in NORMS:
        raise ValueError(f"norm must be one of {NORMS}")
    eps = np.atleast_1d(np.asarray(eps, dtype=float))
    if np.any(eps <= 0.0):
        raise DomainError("eps must be positive")
    n, _ = resolve_truncation(family, seq, alpha, float(eps.min()), cfg, norm, min_dim)
    hits = count_hits(family, seq, alpha, n, eps, cfg, centers)
    return estimates_from_hits(hits, family, seq, alpha, n, eps, cfg, norm, centers)


def estimates_from_hits(hits, family, seq, alpha, n, eps, cfg, norm, centers):
    """Turn count_hits output into MCEstimate records indexed [centre][eps]."""
    counts = hits[NORMS.index(norm)]
    out = []
    for k, c in enumerate(centers):
        c_norm = 0.0 if c is None else float(np.linalg.norm(_pad_center(c, n)))
        row = []
        for j, e in enumerate(eps):
            h = int(counts[k, j])
            lo, hi = clopper_pearson(h, cfg.samples, cfg.confidence)
            row.append(MCEstimate(
                p_hat=h / cfg.samples, ci_low=lo, ci_high=hi, n_trunc=n,
                trunc_tail_bound=_best_tail(seq, alpha, float(e), n, family, norm),
                seed_used=int(cfg.seed), hits=h, samples=int(cfg.samples), workers=cfg.workers,
                eps=float(e), norm=norm, family=family, center_norm=c_norm,
            ))
        out.append(row)
    return out


def estimate_ball(family, seq, alpha, eps, center=None, cfg=None, min_dim=1):
    """Estimate P(||X - a||_2 <= eps); a sequence of eps gives a list on shared draws."""
    cfg = cfg or MCConfig()
    res = estimate(family, seq, alpha, eps, cfg, "l2", (center,), min_dim)[0]
    return res if np.ndim(eps) else res[0]


def estimate_cube(seq, alpha, eps, cfg=None, family="diag", min_dim=1):
    """Estimate P(max_i |X_i| <= eps), with the union-bound tail allowance."""
    cfg = cfg or MCConfig()
    res = estimate(family, seq, alpha, eps, cfg, "linf", (None,), min_dim)[0]
    return res if np.ndim(eps) else res[0]


def random_centers(count, dim, radius, rng):
    """``count`` points uniform in the radius-``radius`` ball of R^dim."""
    g = rng.standard_normal((count, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.uniform(size=count) ** (1.0 / dim)
    return g * r[:, None]
