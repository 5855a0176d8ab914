"""Check explicit bounds against Monte Carlo estimates.

Upper bounds must satisfy ``bound >= ci_low - tail`` and lower bounds
``bound <= ci_high + tail``, where ``tail`` is the truncation allowance.  The
simulated dimension is raised to the largest truncation index used by any
upper bound, so each upper bound also dominates the truncated probability
being estimated.
"""

import math

import numpy as np

from . import lower, montecarlo, subgauss, upper_diag
from ._validation import DomainError, QuadratureError, check_alpha
from .results import BoundUnavailable


def _upper_bounds(family, seq, alpha, eps):
    if family == "diag":
        return [
            ("cube", upper_diag.direct_cube_bound(seq, None, alpha, eps)),
            ("ball", upper_diag.direct_ball_bound(seq, None, alpha, eps)),
        ]
    return [("ball", subgauss.direct_ball_bound_subgauss(seq, None, alpha, eps))]


def _lower_bounds(family, seq, alpha, eps, beta, r):
    if family != "diag":
        return []
    out = []
    for kind, fn, defaults in (
        ("ball", lower.lower_bound_ball, lower.LowerBoundParams.ball_defaults),
        ("cube", lower.lower_bound_cube, lower.LowerBoundParams.cube_defaults),
    ):
        try:
            base = defaults(alpha)
            params = lower.LowerBoundParams(beta if beta is not None else base.beta,
                                            r if r is not None else base.r)
            out.append((kind, fn(seq, None, alpha, params, eps, explicit=True), None))
        except (BoundUnavailable, DomainError) as exc:
            out.append((kind, None, str(exc)))
    return out


def _row(family, alpha, seq, est, set_name, bound, side, reason=None, center_index=-1):
    row = {
        "family": family, "alpha": alpha, "sequence": str(seq), "eps": est.eps,
        "set": set_name, "side": side, "center_index": center_index,
        "center_norm": est.center_norm, "p_hat": est.p_hat, "ci_low": est.ci_low,
        "ci_high": est.ci_high, "tail_allowance": est.trunc_tail_bound, "n_trunc": est.n_trunc,
        "samples": est.samples, "seed": est.seed_used, "workers": est.workers,
    }
    if bound is None:
        row.update(available=False, reason=reason, formula=None, equation=None, constants=None,
                   log_bound=None, n_star=None, ok=True)
        return row
    if side == "upper":
        ok = bound.value >= est.ci_low - est.trunc_tail_bound
    else:
        ok = bound.value <= est.ci_high + est.trunc_tail_bound
    row.update(available=True, reason=None, formula=bound.formula, equation=bound.equation,
               constants="explicit" if bound.explicit else "symbolic-dropped",
               log_bound=bound.log_value, n_star=bound.n_star, ok=bool(ok))
    return row


def run(family, seq, alpha, eps_grid, cfg, beta=None, r=None, n_centers=0, center_radius=1.0):
    """Return (rows, violations) for every bound and eps on one shared set of draws.

    With ``n_centers > 0`` the ball upper bounds are also checked at that many
    random centres drawn uniformly from the ball of radius ``center_radius``.
    """
    alpha = check_alpha(alpha)
    eps_grid = np.asarray(sorted(float(e) for e in eps_grid))
    uppers = {e: _upper_bounds(family, seq, alpha, e) for e in eps_grid}
    lowers = {e: _lower_bounds(family, seq, alpha, e, beta, r) for e in eps_grid}
    min_dim = max(b.n_star for bs in uppers.values() for _, b in bs)
    n, _ = montecarlo.resolve_truncation(family, seq, alpha, float(eps_grid.min()), cfg, "l2", min_dim)

    centers = [None]
    if n_centers:
        rng = np.random.default_rng([int(cfg.seed), 0x5EED])
        centers += list(montecarlo.random_centers(int(n_centers), min(n, 10), center_radius, rng))
    hits = montecarlo.count_hits(family, seq, alpha, n, eps_grid, cfg, centers)
    est = {norm: montecarlo.estimates_from_hits(hits, family, seq, alpha, n, eps_grid, cfg, norm, centers)
           for norm in montecarlo.NORMS}
    norm_of = {"ball": "l2", "cube": "linf"}

    rows = []
    for j, e in enumerate(eps_grid):
        for set_name, bound in uppers[e]:
            rows.append(_row(family, alpha, seq, est[norm_of[set_name]][0][j], set_name, bound, "upper"))
        for set_name, bound, reason in lowers[e]:
            rows.append(_row(family, alpha, seq, est[norm_of[set_name]][0][j], set_name, bound, "lower", reason))
        for k in range(1, len(centers)):
            for set_name, bound in uppers[e]:
                if set_name == "ball":
                    rows.append(_row(family, alpha, seq, est["l2"][k][j], "ball", bound, "upper",
                                     center_index=k - 1))
    violations = sum(1 for row in rows if not row["ok"])
    return rows, violations


def safe_run(*args, **kwargs):
    """:func:`run`, mapping quadrature failures to QuadratureError with context."""
    try:
        return run(*args, **kwargs)
    except QuadratureError:
        raise
    except FloatingPointError as exc:
        raise QuadratureError(str(exc), achieved=math.nan) from exc
