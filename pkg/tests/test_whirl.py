import itertools

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from whirl_lab.constructor import (WhirlParams, build_tangent, example_legendre_helix,
                                   example_non_legendre, integrate_curve)
from whirl_lab.errors import NotLegendre
from whirl_lab.frames import frenet_apparatus
from whirl_lab.whirl import (assess, legendre_torsion_check, tauprime_rhs, torsion_ode_residual,
                             u_form_lhs, u_form_residual, u_form_rhs, whirl_identities)

k, t, dk, r = sp.symbols("kappa tau dkappa rho", nonzero=True)


def printed_u_form(kappa, tau, rho, eps1, eps2):
    """Alternative arrangement ``eps2 rho (tau-1) [1 - u^2 / (eps2 + eps1 rho^2)]``."""
    u = (tau - 1) / kappa
    return eps2 * rho * (tau - 1) * (1 - u ** 2 / (eps2 + eps1 * rho ** 2))


@pytest.mark.parametrize("e1,e2", list(itertools.product((1, -1), repeat=2)))
def test_u_form_equivalent_symbolically(e1, e2):
    dtau = tauprime_rhs(k, t, dk, r, e1, e2, -e1 * e2)
    diff = u_form_lhs(k, t, dk, dtau) - u_form_rhs(k, t, r, e1, e2)
    assert sp.simplify(diff) == 0


@pytest.mark.parametrize("e1,e2", list(itertools.product((1, -1), repeat=2)))
def test_printed_u_form_only_matches_on_unit_rho_equal_signs(e1, e2):
    dtau = tauprime_rhs(k, t, dk, r, e1, e2, -e1 * e2)
    diff = sp.simplify(u_form_lhs(k, t, dk, dtau) - printed_u_form(k, t, r, e1, e2))
    on_branch = sp.simplify(diff.subs(r, 1))
    assert (on_branch == 0) == (e1 == e2)
    assert sp.simplify(diff.subs(r, 2)) != 0


@settings(max_examples=300, deadline=None)
@given(st.floats(0.1, 3), st.floats(-3, 3), st.floats(-2, 2), st.floats(0.2, 3),
       st.sampled_from([1, -1]), st.sampled_from([1, -1]), st.sampled_from([1, -1]))
def test_u_form_equivalent_numerically(kappa, tau, dkappa, rho, sign, e1, e2):
    rho = sign * rho
    if abs(e1 + e2 / rho ** 2) < 1e-2:
        return
    dtau = tauprime_rhs(kappa, tau, dkappa, rho, e1, e2, -e1 * e2)
    lhs = u_form_lhs(kappa, tau, dkappa, dtau)
    rhs = u_form_rhs(kappa, tau, rho, e1, e2)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs), abs(rhs))


def test_assess_helix_is_legendre():
    series = example_legendre_helix()
    res = assess(series, frenet_apparatus(series))
    assert res.is_legendre and res.is_whirl and res.rho_hat is None


def test_assess_worked_example():
    series = example_non_legendre()
    res = assess(series, frenet_apparatus(series))
    assert not res.is_legendre and res.is_whirl
    assert res.rho_hat == pytest.approx(1.0, abs=1e-12)


@pytest.fixture(scope="module")
def general_curve():
    # Off the worked branch: rho = 2, kappa = eps2 rho lambda0 = 1.
    prm = WhirlParams(rho=2.0, lambda0=0.5, v0=0.3, s_end=1.0, step=1e-4)
    series = integrate_curve(build_tangent(prm))
    return series, frenet_apparatus(series)


def test_general_construction_recovers_rho(general_curve):
    series, f = general_curve
    res = assess(series, f)
    assert res.rho_hat == pytest.approx(2.0, abs=1e-9)
    np.testing.assert_allclose(f.kappa, 1.0, atol=1e-12)


def test_torsion_forms_hold_off_worked_branch(general_curve):
    series, f = general_curve
    assert torsion_ode_residual(series, f, 2.0).max_abs < 1e-6
    assert u_form_residual(series, f, 2.0).max_abs < 1e-6
    for rep in whirl_identities(series, f, 2.0):
        assert rep.max_abs < 1e-6, rep.name


def test_printed_u_form_fails_off_worked_branch(general_curve):
    series, f = general_curve
    dtau = f.derivative(f.tau)
    dkappa = f.derivative(f.kappa)
    lhs = u_form_lhs(f.kappa, f.tau, dkappa, dtau)
    printed = printed_u_form(f.kappa, f.tau, 2.0, f.eps1, f.eps2)
    assert np.max(np.abs(lhs - printed)) > 0.1


def test_wrong_rho_breaks_torsion_ode():
    series = example_non_legendre()
    f = frenet_apparatus(series)
    assert torsion_ode_residual(series, f, 1.0).max_abs < 1e-4
    assert torsion_ode_residual(series, f, 1.5).max_abs > 1e-2


def test_hypothesis_mask_on_legendre_curve():
    series = example_legendre_helix()
    rep = torsion_ode_residual(series, frenet_apparatus(series), 1.0)
    assert rep.empty and rep.excluded["eta_T_zero"] == len(series)


def test_legendre_check():
    helix = example_legendre_helix()
    check = legendre_torsion_check(helix, frenet_apparatus(helix))
    assert check.ok and check.tau_report.max_abs < 1e-9
    curve = example_non_legendre(step=1e-3)
    with pytest.raises(NotLegendre):
        legendre_torsion_check(curve, frenet_apparatus(curve))


def test_assessment_to_dict_roundtrips_json():
    import json
    series = example_non_legendre(step=1e-3)
    d = assess(series, frenet_apparatus(series)).to_dict()
    assert json.loads(json.dumps(d)) == d
