import math

import numpy as np
import pytest
from scipy import special

from smallball import montecarlo as mc
from smallball import spectra, univariate
from smallball._validation import DomainError

from . import oracles

EXP = spectra.exponential_sequence()
ONE = spectra.TableSequence((1.0,))


def test_truncation_matches_geometric_inversion():
    alpha, beta = 1.0, 0.5
    moment = oracles.abs_moment_closed(alpha, beta)
    for eps, delta in ((0.3, 0.01), (0.05, 0.001), (0.8, 0.1)):
        # 2^(beta/2) m e^(-e(n+1)) / ((1 - e^-e) eps^beta) <= delta with e = beta/alpha
        e = beta / alpha
        rhs = delta * eps ** beta * (1 - math.exp(-e)) / (2 ** (beta / 2) * moment)
        expected = max(1, math.ceil(-math.log(rhs) / e - 1 - 1e-12))
        n, bound = mc.truncation_dim(EXP, alpha, beta, eps, delta)
        assert n == expected and bound <= delta
        assert mc.tail_bound(EXP, alpha, beta, eps, n - 1) > delta or n == 1


def test_truncation_trivial_for_huge_eps():
    assert mc.truncation_dim(EXP, 1.0, 0.5, 1e6, 0.49)[0] == 1


def test_truncation_divergent_tail():
    with pytest.raises(DomainError):
        mc.truncation_dim(spectra.power_sequence(2.0), 1.0, 0.5, 0.1, 0.01)


def test_auto_beta_avoids_divergent_choice():
    n, bound = mc.truncation_dim(spectra.power_sequence(2.0), 1.0, None, 0.3, 0.01)
    assert n >= 1 and bound <= 0.01


def test_linf_tail_drops_factor():
    l2 = mc.tail_bound(EXP, 1.5, 0.75, 0.2, 5, norm="l2")
    linf = mc.tail_bound(EXP, 1.5, 0.75, 0.2, 5, norm="linf")
    assert l2 / linf == pytest.approx(2 ** 0.375, rel=1e-12)


def test_subgauss_tail_gaussian_case():
    seq = spectra.power_sequence(4.0)
    got = mc.tail_bound(seq, 2.0, 1.0, 0.5, 3, family="subgauss")
    assert got == pytest.approx(math.sqrt(2 / 0.25 * seq.tail_sum(3, 1.0)), rel=1e-12)


@pytest.mark.parametrize("alpha", (0.8, 1.0, 1.5))
def test_diag_coordinate_characteristic_function(alpha):
    x = mc.sample_diag(EXP, alpha, 3, np.random.default_rng(11), size=100_000)
    for i, t in ((0, 1.5), (1, 2.0), (2, 4.0)):
        vals = np.cos(t * x[:, i])
        se = vals.std(ddof=1) / math.sqrt(vals.size)
        assert abs(vals.mean() - math.exp(-math.exp(-(i + 1)) * t ** alpha / 2)) < 4 * se


@pytest.mark.parametrize("alpha", (1.0, 1.5))
def test_subgauss_characteristic_functional(alpha):
    seq = spectra.power_sequence(4.0)
    x = mc.sample_subgauss(seq, alpha, 4, np.random.default_rng(12), size=100_000)
    lam = seq.values(4)
    rng = np.random.default_rng(13)
    for _ in range(5):
        y = rng.normal(size=4) * 2.0
        vals = np.cos(x @ y)
        se = vals.std(ddof=1) / math.sqrt(vals.size)
        assert abs(vals.mean() - math.exp(-0.5 * float(lam @ y ** 2) ** (alpha / 2))) < 4 * se


def test_subgauss_shares_a_scale_factor():
    seq = spectra.TableSequence((1.0, 1.0))
    sub = np.log(np.abs(mc.sample_subgauss(seq, 1.0, 2, np.random.default_rng(4), size=50_000)))
    diag = np.log(np.abs(mc.sample_diag(seq, 1.0, 2, np.random.default_rng(4), size=50_000)))
    assert np.corrcoef(sub.T)[0, 1] > 0.2
    assert abs(np.corrcoef(diag.T)[0, 1]) < 0.03


def test_subgauss_scale_gaussian_limit():
    assert mc.subgauss_scale(2.0) == 1.0
    assert mc.subgauss_scale(1.0) == 0.5


def test_cauchy_interval_probability():
    cfg = mc.MCConfig(samples=50_000, seed=3, truncation=1)
    est = mc.estimate_ball("diag", ONE, 1.0, 0.4, cfg=cfg)
    truth = 2 * math.atan(0.8) / math.pi
    assert est.n_trunc == 1 and est.trunc_tail_bound == 0.0
    assert est.ci_low <= truth <= est.ci_high


def test_gaussian_interval_probability():
    cfg = mc.MCConfig(samples=50_000, seed=5, truncation=1)
    est = mc.estimate_cube(ONE, 2.0, 0.7, cfg=cfg)
    truth = special.erf(0.7 / math.sqrt(2))
    assert est.ci_low <= truth <= est.ci_high


def test_extreme_eps():
    cfg = mc.MCConfig(samples=2_000, seed=1)
    big, tiny = mc.estimate_ball("diag", EXP, 1.5, [1e9, 1e-9], cfg=cfg)
    assert big.p_hat == 1.0 and big.ci_high == 1.0
    assert tiny.p_hat == 0.0 and tiny.ci_low == 0.0 and tiny.ci_high < 2e-3


def test_cube_hits_dominate_ball_hits():
    cfg = mc.MCConfig(samples=5_000, seed=2)
    hits = mc.count_hits("diag", EXP, 1.0, 6, np.array([0.1, 0.3, 0.6]), cfg)
    assert np.all(hits[1] >= hits[0])


def test_hits_monotone_in_eps():
    cfg = mc.MCConfig(samples=5_000, seed=2)
    hits = mc.count_hits("subgauss", spectra.power_sequence(4.0), 1.0, 5, np.geomspace(0.01, 2, 12), cfg)
    assert np.all(np.diff(hits, axis=-1) >= 0)


def test_determinism_and_seed_sensitivity():
    a = mc.estimate_ball("diag", EXP, 1.0, 0.5, cfg=mc.MCConfig(samples=4_000, seed=7, workers=3))
    b = mc.estimate_ball("diag", EXP, 1.0, 0.5, cfg=mc.MCConfig(samples=4_000, seed=7, workers=3))
    c = mc.estimate_ball("diag", EXP, 1.0, 0.5, cfg=mc.MCConfig(samples=4_000, seed=8, workers=3))
    assert a == b and a.hits != c.hits


def test_worker_shares_add_up():
    cfg = mc.MCConfig(samples=1_001, seed=0, workers=4)
    hits = mc.count_hits("diag", EXP, 1.0, 3, np.array([1e9]), cfg)
    assert int(hits[0, 0, 0]) == 1_001


def test_center_changes_estimate_and_is_recorded():
    cfg = mc.MCConfig(samples=20_000, seed=0)
    at0 = mc.estimate_ball("diag", EXP, 1.5, 0.5, cfg=cfg)
    off = mc.estimate_ball("diag", EXP, 1.5, 0.5, center=[0.8, 0.0], cfg=cfg)
    assert off.center_norm == pytest.approx(0.8) and off.p_hat < at0.p_hat


def test_clopper_pearson_contains_estimate():
    lo, hi = mc.clopper_pearson(7, 1000)
    assert lo < 0.007 < hi
    assert mc.clopper_pearson(0, 1000)[0] == 0.0


def test_config_validation():
    with pytest.raises(DomainError):
        mc.MCConfig(samples=50)
    with pytest.raises(DomainError):
        mc.MCConfig(delta=0.5)
    with pytest.raises(DomainError):
        mc.MCConfig(workers=0)


def test_random_centers_inside_ball():
    c = mc.random_centers(50, 7, 1.0, np.random.default_rng(0))
    assert c.shape == (50, 7) and np.all(np.linalg.norm(c, axis=1) <= 1.0)


def test_fixed_truncation_respects_table_length():
    cfg = mc.MCConfig(samples=200, truncation=10)
    est = mc.estimate_ball("diag", spectra.TableSequence((1.0, 0.5)), 1.0, 0.3, cfg=cfg)
    assert est.n_trunc == 2 and est.trunc_tail_bound == 0.0


def test_positive_stable_mean_of_power():
    # E A^p = Gamma(1 - 2p/alpha)/Gamma(1 - p) for the alpha/2 positive law
    a = univariate.sample_positive(0.5, np.random.default_rng(8), size=200_000)
    p = 0.2
    vals = a ** p
    se = vals.std(ddof=1) / math.sqrt(vals.size)
    assert abs(vals.mean() - math.exp(mc._log_abs_moment_positive(1.0, p))) < 4 * se


def test_auto_truncation_rejects_table_without_tail():
    with pytest.raises(DomainError, match="analytic tail"):
        mc.estimate_ball("diag", ONE, 1.0, 0.4, cfg=mc.MCConfig(samples=200))
