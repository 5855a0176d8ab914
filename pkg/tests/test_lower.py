import math

import numpy as np
import pytest

from smallball import lower, spectra, univariate
from smallball import montecarlo as mc
from smallball import upper_diag as ud
from smallball._validation import DomainError
from smallball.results import BoundUnavailable

from . import oracles

EXP = spectra.exponential_sequence()
ENV_EXP_A1 = EXP.envelope("majorant_alpha", 1.0)
PARAMS = lower.LowerBoundParams(0.5, 0.2)


def test_C3_readings():
    assert lower.C3(2.0) == pytest.approx(1.0 / math.sqrt(math.pi), rel=1e-14)
    assert lower.C3(1.0) == pytest.approx(2.0 / math.pi, rel=1e-14)
    assert lower.C3(1.0, "c0") == pytest.approx(ud.C0(1.0), rel=1e-14)
    with pytest.raises(ValueError):
        lower.C3(1.0, "other")


def test_M_integral_exponential():
    assert lower.M_integral(ENV_EXP_A1, 1.0, 1.0) == 0.0
    for y in (2.0, 3.5, 10.0):
        expected = (y * y - 1) / 2 - (y - 1) / 2
        assert lower.M_integral(ENV_EXP_A1, 1.0, y) == pytest.approx(expected, abs=1e-12)
        assert oracles.quad_integral(lambda x: x - 0.5, 1.0, y) == pytest.approx(expected, abs=1e-9)


def test_rho_definition():
    xs = np.array([1.0, 2.0, 5.0])
    assert np.allclose(lower.rho(ENV_EXP_A1, 1.0, xs), (2 / math.pi) * np.exp(xs) / np.sqrt(xs), rtol=1e-13)


def _eta_bar_reference(eps, alpha=1.0, beta=0.5, r=0.2):
    c3 = 2.0 * math.gamma(1.0 / alpha) / (math.pi * alpha)
    moment = oracles.abs_moment_closed(alpha, beta)
    e = beta / alpha

    def ok(n):
        cond_i = eps * c3 * math.exp(n / alpha) / math.sqrt(n) >= math.sqrt(2.0)
        tail = math.exp(-e * (n + 1)) / (1.0 - math.exp(-e))
        return cond_i and tail < r * eps ** beta / moment

    return oracles.brute_smallest(ok, limit=10 ** 4)


@pytest.mark.parametrize("eps", [0.9, 0.5, 0.3, 0.1, 0.03, 0.01, 1e-3, 1e-5])
def test_eta_bar_exponential_against_brute_force(eps):
    assert lower.eta_bar(EXP, ENV_EXP_A1, 1.0, PARAMS, eps) == _eta_bar_reference(eps)


def test_eta_bar_minimal_case():
    seq = spectra.exponential_sequence(5.0)
    env = seq.envelope("majorant_alpha", 1.0)
    assert lower.eta_bar(seq, env, 1.0, PARAMS, 0.5) == 1


def test_eta_bar_rejects_divergent_tail():
    seq = spectra.power_sequence(2.0)
    with pytest.raises(DomainError):
        lower.eta_bar(seq, seq.envelope("majorant_alpha", 1.0), 1.0, lower.LowerBoundParams(0.5, 0.2), 0.1)


def test_params_ranges():
    with pytest.raises(DomainError):
        lower.LowerBoundParams(0.5, 0.3).check(1.0, "ball")
    lower.LowerBoundParams(0.5, 0.9).check(1.0, "cube")
    with pytest.raises(DomainError):
        lower.LowerBoundParams(1.0, 0.1).check(1.0, "ball")
    d = lower.LowerBoundParams.ball_defaults(1.5)
    assert d.beta == 0.75 and d.r == pytest.approx(0.125)


def test_a_term_branches():
    c4 = math.log(univariate.tail_constant(1.0))
    assert lower.a_term(1.0, 3, 0.01) == pytest.approx(c4, abs=1e-14)
    assert lower.a_term(1.0, 1, 10.0) == pytest.approx(c4 + 2.0 * math.log(math.sqrt(2) / 10), abs=1e-13)
    kink = math.sqrt(2.0) * 4 ** (1 / 1.5)
    left = lower.a_term(1.5, 4, kink * (1 - 1e-12))
    right = lower.a_term(1.5, 4, kink * (1 + 1e-12))
    assert left == pytest.approx(right, abs=1e-10)


def test_explicit_ball_chain_one_dimension():
    beta, r, eps, alpha = 0.5, 0.2, 0.4, 1.0
    got = lower.explicit_ball_chain(EXP, alpha, beta, r, eps, 1)
    lam1 = math.exp(-1.0)
    x = eps / (math.sqrt(2) * lam1)
    expected = (math.log(1 - 2 ** (beta / 2) * r) + math.log(eps / math.sqrt(2)) + math.log(2.0)
                + math.log(oracles.cauchy_half_pdf(x)) - math.log(lam1))
    assert got == pytest.approx(expected, abs=1e-12)
    # a single coordinate makes both density rules agree
    loose = lower.explicit_ball_chain(EXP, alpha, beta, r, eps, 1, "last_coordinate")
    assert loose == pytest.approx(expected, abs=1e-12)


def test_last_coordinate_rule_can_exceed_one():
    n = lower.eta_bar(EXP, ENV_EXP_A1, 1.0, lower.LowerBoundParams.ball_defaults(1.0), 0.3)
    loose = lower.explicit_ball_chain(EXP, 1.0, 0.5, 0.125, 0.3, n, "last_coordinate")
    product = lower.explicit_ball_chain(EXP, 1.0, 0.5, 0.125, 0.3, n)
    assert product < 0.0 < loose


def test_lower_ball_example_is_finite_and_negative():
    res = lower.lower_bound_ball(EXP, None, 1.0, PARAMS, 0.3, explicit=True)
    assert res.formula == "eq17_explicit" and not res.upper and res.explicit
    assert np.isfinite(res.log_value) and res.log_value < 0.0


def test_lower_ball_symbolic_form():
    res = lower.lower_bound_ball(EXP, None, 1.0, PARAMS, 0.1)
    n = res.n_star
    expected = -lower.M_integral(ENV_EXP_A1, 1.0, n) - 0.5 * math.log(n) + lower.a_term(1.0, n, 0.1)
    assert res.formula == "eq17" and res.log_value == pytest.approx(expected, abs=1e-12)


def test_lower_ball_domain():
    with pytest.raises(DomainError):
        lower.lower_bound_ball(EXP, None, 2.0, None, 0.1)
    with pytest.raises(DomainError):
        lower.lower_bound_ball(EXP, None, 1.0, None, 1.0)


@pytest.mark.parametrize("alpha", (1.0, 1.5))
def test_lower_never_exceeds_direct_upper(alpha):
    for eps in (0.8, 0.5, 0.3, 0.1, 0.03):
        lo = lower.lower_bound_ball(EXP, None, alpha, None, eps, explicit=True)
        up = ud.direct_ball_bound(EXP, None, alpha, eps)
        assert lo.log_value <= up.log_value


def test_eta_bar_nonincreasing_in_eps():
    grid = np.geomspace(1e-4, 0.9, 40)
    ns = [lower.eta_bar(EXP, ENV_EXP_A1, 1.0, PARAMS, e) for e in grid]
    assert all(a >= b for a, b in zip(ns, ns[1:]))


def test_rho1_and_M1():
    c4 = univariate.tail_constant(1.0)
    assert lower.rho1(ENV_EXP_A1, 1.0, 2.0) == pytest.approx(c4 * math.exp(2.0), rel=1e-13)
    assert lower.M1_integral(ENV_EXP_A1, 1.0, 1.0) == 0.0
    assert lower.M1_integral(ENV_EXP_A1, 1.0, 4.0) == pytest.approx(7.5, abs=1e-12)
    assert lower.M1_integral(ENV_EXP_A1, 1.0, 1.0, reading="literal") == 0.0


@pytest.mark.parametrize("env", [ENV_EXP_A1, spectra.power_envelope(2.0, "majorant_alpha")])
def test_M1_literal_reading_against_quadrature(env):
    factor = univariate.tail_constant(1.0) / lower.C3(1.0)
    ref = factor * oracles.quad_integral(lambda x: math.sqrt(x) * float(env.elasticity(x)), 1.0, 3.0)
    assert lower.M1_integral(env, 1.0, 3.0, reading="literal") == pytest.approx(ref, rel=1e-9)


def test_eta_bar1_absent_for_power():
    seq = spectra.power_sequence(3.0)
    env = seq.envelope("majorant_alpha", 1.0)
    params = lower.LowerBoundParams(0.75, 0.5)
    for eps in (0.1, 0.01):
        assert lower.eta_bar1(seq, env, 1.0, params, eps) is None
        with pytest.raises(BoundUnavailable):
            lower.lower_bound_cube(seq, env, 1.0, params, eps)


@pytest.mark.parametrize("eps", [0.1, 0.01])
def test_eta_bar1_exponential_matches_lattice_scan(eps):
    # (i) needs e^-n < C_4 eps and (iii) needs e^-n >= eps, empty for C_4 < 1
    c4 = univariate.tail_constant(1.0)
    ref = oracles.brute_smallest(lambda n: math.exp(-n) < c4 * eps and math.exp(-n) >= eps, limit=200)
    assert c4 < 1.0
    assert ref is None
    assert lower.eta_bar1(EXP, ENV_EXP_A1, 1.0, None, eps) is None


def test_explicit_cube_chain_one_dimension():
    got = lower.explicit_cube_chain(EXP, ENV_EXP_A1, 1.0, 0.5, 0.2, 1)
    expected = math.log(0.2) + math.log(univariate.tail_constant(1.0)) + 1.0 + math.log(0.5)
    assert got == pytest.approx(expected, abs=1e-13)


def test_lower_ball_example_below_monte_carlo():
    res = lower.lower_bound_ball(EXP, None, 1.0, PARAMS, 0.3, explicit=True)
    est = mc.estimate_ball("diag", EXP, 1.0, 0.3, cfg=mc.MCConfig(samples=100_000, seed=1))
    assert res.value <= est.ci_high + est.trunc_tail_bound
