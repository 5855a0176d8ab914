import math

import numpy as np
import pytest

from smallball import spectra, univariate
from smallball import upper_diag as ud
from smallball._validation import DomainError

from . import oracles

POW2 = spectra.power_sequence(2.0)
ENV_POW2_A1 = POW2.envelope("minorant_alpha", 1.0)


def test_C0_values():
    assert ud.C0(2.0) == pytest.approx(1.0, abs=1e-12)
    assert ud.C0(1.0) == pytest.approx(2 ** 1.5 / math.sqrt(math.pi), rel=1e-14)
    assert ud.C0(1.0) == pytest.approx(1.5958, abs=1e-4)


def test_phi_gaussian_linear_envelope():
    env = spectra.power_envelope(1.0, "minorant_alpha")
    xs = np.array([1.0, 2.0, 7.5])
    assert np.allclose(ud.phi(env, 2.0, xs), math.sqrt(math.pi / 2) * xs, rtol=1e-14)


def test_phi_cauchy_power_two():
    xs = np.array([1.0, 3.0, 10.0])
    assert np.allclose(ud.phi(ENV_POW2_A1, 1.0, xs), math.pi / 4 * xs ** 2, rtol=1e-14)


def test_phi_proof_reading():
    assert ud.phi(ENV_POW2_A1, 1.0, 2.0, reading="proof") == pytest.approx(4.0 / math.pi * 4.0, rel=1e-14)


def test_phi_rejects_below_one():
    with pytest.raises(DomainError):
        ud.phi(ENV_POW2_A1, 1.0, 0.5)


def test_nu_eps_example_and_closed_form():
    assert ud.nu_eps(ENV_POW2_A1, 1.0, 0.04) == 5
    for eps in np.geomspace(1e-4, 1.2, 40):
        expected = oracles.brute_largest(lambda n: eps * math.pi / 4 * n * n <= 1.0)
        assert ud.nu_eps(ENV_POW2_A1, 1.0, eps) == expected
        assert expected == math.floor(2 / math.sqrt(math.pi * eps)) or abs(
            2 / math.sqrt(math.pi * eps) - round(2 / math.sqrt(math.pi * eps))) < 1e-9


def test_nu_eps_boundary():
    edge = 1.0 / float(ud.phi(ENV_POW2_A1, 1.0, 1.0))
    assert ud.nu_eps(ENV_POW2_A1, 1.0, edge * (1 - 1e-9)) == 1
    with pytest.raises(DomainError, match="1/phi"):
        ud.nu_eps(ENV_POW2_A1, 1.0, edge)


def test_H_examples():
    assert ud.H_integral(ENV_POW2_A1, 1.0, 1.0) == 0.0
    assert ud.H_integral(ENV_POW2_A1, 1.0, 5.0) == pytest.approx(8.0, abs=1e-12)
    env = spectra.exponential_sequence().envelope("minorant_alpha", 1.0)
    assert ud.H_integral(env, 1.0, 3.0) == pytest.approx(4.0, abs=1e-12)
    assert oracles.quad_integral(lambda x: float(env.elasticity(x)), 1.0, 3.0) == pytest.approx(4.0, abs=1e-9)


def test_H_custom_envelope_uses_quadrature():
    env = spectra.Envelope(f=lambda x: np.asarray(x, dtype=float) ** -2.0,
                           df=lambda x: -2.0 * np.asarray(x, dtype=float) ** -3.0, role="minorant_alpha")
    assert env.kind == "custom"
    assert ud.H_integral(env, 1.0, 5.0) == pytest.approx(8.0, rel=1e-9)


def test_bound_cube_examples():
    general = ud.bound_cube(ENV_POW2_A1, 1.0, 0.04, log_convex=False)
    refined = ud.bound_cube(ENV_POW2_A1, 1.0, 0.04)
    assert general.formula == "eq2" and general.log_value == pytest.approx(-4.781, abs=5e-4)
    assert refined.formula == "eq4" and refined.log_value == pytest.approx(-8.0 - 0.5 * math.log(0.04), abs=1e-12)
    assert refined.log_value == pytest.approx(-6.390, abs=1e-3)
    assert not general.center_free and not general.explicit
    assert refined.log_value - general.log_value == pytest.approx(0.5 * math.log(0.04), abs=1e-12)


def test_bound_cube_at_nu_one():
    eps = 0.999 / float(ud.phi(ENV_POW2_A1, 1.0, 1.0))
    res = ud.bound_cube(ENV_POW2_A1, 1.0, eps, log_convex=False)
    assert res.n_star == 1 and res.log_value == pytest.approx(-math.log(eps), abs=1e-14)


def test_psi_K_examples():
    assert ud.K_integral(ENV_POW2_A1, 1.0, 5.0) == pytest.approx(6.0, abs=1e-12)
    quad = oracles.quad_integral(lambda x: float(ENV_POW2_A1.elasticity(x)) - 0.5, 1.0, 5.0)
    assert quad == pytest.approx(6.0, abs=1e-9)
    assert ud.psi(ENV_POW2_A1, 1.0, 4.0) == pytest.approx(ud.C0(1.0) * 4 ** 2 / 2, rel=1e-14)


def test_eta_and_ball_example():
    assert ud.eta_eps(ENV_POW2_A1, 1.0, 0.1) == 3
    res = ud.bound_ball(ENV_POW2_A1, 1.0, 0.1, log_convex=False)
    assert res.formula == "eq3" and res.center_free
    assert res.log_value == pytest.approx(-0.697, abs=5e-4)
    refined = ud.bound_ball(ENV_POW2_A1, 1.0, 0.1)
    assert refined.formula == "eq5"
    assert refined.log_value == pytest.approx(-3.0 - 0.25 * math.log(0.01 * 3), abs=1e-12)


def test_ball_gaussian_reduction():
    env = spectra.power_envelope(1.5, "minorant_alpha")
    xs = np.array([1.0, 2.0, 9.0])
    assert np.allclose(ud.psi(env, 2.0, xs), 1.0 / (xs ** -1.5 * np.sqrt(xs)), rtol=1e-12)


def test_ball_admissible_range_uses_max_of_phi_and_psi():
    limit = ud.admissible_eps(ENV_POW2_A1, 1.0)
    assert limit == pytest.approx(1.0 / max(float(ud.phi(ENV_POW2_A1, 1.0, 1.0)),
                                            float(ud.psi(ENV_POW2_A1, 1.0, 1.0))), rel=1e-14)
    with pytest.raises(DomainError):
        ud.bound_ball(ENV_POW2_A1, 1.0, limit * 1.0001)


def test_direct_cube_single_term():
    res = ud.direct_cube_bound(POW2, ENV_POW2_A1, 1.0, 0.3, n_max=1)
    assert res.n_star == 1
    assert res.log_value == pytest.approx(math.log(0.3) + math.log(2 * 2 / math.pi) - 0.0, abs=1e-14)


def test_direct_cube_matches_scan_and_stays_below_F_at_nu():
    value, n = oracles.direct_cube_scan(lambda i: -2.0 * math.log(i), 1.0, 0.04, 500)
    res = ud.direct_cube_bound(POW2, ENV_POW2_A1, 1.0, 0.04)
    assert res.log_value == pytest.approx(value, abs=1e-10) and res.n_star == n
    assert res.explicit and res.formula == "eq6_direct"
    # the general closed form differs from F(nu) only by the dropped constant
    nu = ud.nu_eps(ENV_POW2_A1, 1.0, 0.04)
    f_at_nu = float(ud.F(ENV_POW2_A1, 1.0, 0.04, nu)[-1])
    assert res.log_value <= f_at_nu + 1e-12


def test_direct_ball_F1_matches_scan():
    seq = spectra.power_sequence(3.0)
    env = seq.envelope("minorant_alpha", 2.0)
    ref = oracles.F1_scan(lambda i: -1.5 * math.log(i), 2.0, 0.1, 200)
    res = ud.direct_ball_bound(seq, env, 2.0, 0.1, n_max=200, route="stirling")
    assert res.log_value == pytest.approx(ref.min() - 0.5 * math.log(math.pi), abs=1e-10)
    assert res.n_star == int(np.argmin(ref)) + 1


def test_exact_ball_route_never_exceeds_stirling_route():
    env = spectra.exponential_sequence().envelope("minorant_alpha", 1.5)
    exact = ud.finite_dim_ball(env, 1.5, 0.2, 300)
    stirling = ud.F1(env, 1.5, 0.2, 300) - 0.5 * math.log(math.pi)
    assert np.all(exact <= stirling + 1e-12)


def test_adaptive_scan_reaches_deep_minimum():
    seq = spectra.power_sequence(2.0)
    res = ud.direct_ball_bound(seq, None, 2.0, 1e-3)
    fixed = ud.direct_ball_bound(seq, None, 2.0, 1e-3, n_max=1024)
    assert res.n_star > 1024 and res.log_value < fixed.log_value


def test_direct_bounds_reject_wrong_role():
    with pytest.raises(DomainError):
        ud.direct_cube_bound(POW2, POW2.envelope("majorant_alpha", 1.0), 1.0, 0.1)


def test_F_uses_density_at_zero():
    vals = ud.F(ENV_POW2_A1, 1.0, 0.2, 3)
    c = math.log(2 * univariate.density_at_zero(1.0))
    assert vals[2] == pytest.approx(3 * (math.log(0.2) + c) + 2 * (math.log(2) + math.log(3)), abs=1e-13)


def test_bound_result_dict():
    d = ud.bound_cube(ENV_POW2_A1, 1.0, 0.04).as_dict()
    assert d["equation"] == "(4)" and d["constants"] == "symbolic-dropped"
