"""Seeded verification battery behind ``whirl-lab verify``.

Every suite returns a list of :class:`Check`. Residual checks compare a
measured value against a tolerance; a global override replaces those
tolerances (boolean and ratio checks keep theirs).
"""
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from . import geometry as geo
from .constructor import example_legendre_helix, example_non_legendre
from .frames import frame_identities, frenet_apparatus, reeb_identities, verify_frenet
from .magnetic import (MagneticParams, check_magnetic_whirl, conservation_reports,
                       integrate_magnetic, lorentz_residual, unit_velocity)
from .nullcurves import evaluate_profile, profile_grid, profile_identities, verify_null_system
from .whirl import (assess, legendre_torsion_check, tauprime_rhs, torsion_ode_residual,
                    u_form_lhs, u_form_rhs, u_form_residual, whirl_identities)

# Values below this are at rounding level; no convergence ratio is measured.
CONVERGENCE_FLOOR = 1e-11


@dataclass
class Check:
    name: str
    value: float
    tol: float
    mode: str = "lt"

    @property
    def passed(self):
        if self.mode == "lt":
            return bool(np.isfinite(self.value) and self.value < self.tol)
        if self.mode == "ge":
            return bool(self.value >= self.tol)
        if self.mode == "eq":
            return bool(self.value == self.tol)
        raise ValueError(self.mode)

    def to_dict(self):
        return {"name": self.name, "value": self.value, "tol": self.tol,
                "mode": self.mode, "passed": self.passed}


def _lt(name, value, tol):
    return Check(name, float(value), float(tol), "lt")


def _flag(name, ok):
    return Check(name, 1.0 if ok else 0.0, 1.0, "eq")


def _rel(diff, *scales):
    """Largest residual relative to ``1 + prod(scales)``."""
    scale = 1.0
    for s in scales:
        scale = scale * s
    diff = np.asarray(diff)
    mag = geo.euclid_norm(diff) if diff.ndim > 1 else np.abs(diff)
    return np.max(mag / (1.0 + scale))


# -- structure identities --------------------------------------------------

def structure_suite(rng, n=1000, tol=1e-12):
    def vectors():
        return rng.standard_normal((n, 3)) * 10.0 ** rng.uniform(-1, 1, (n, 1))

    u, v, w, p = vectors(), vectors(), vectors(), vectors()
    nu, nv, nw = (geo.euclid_norm(a) for a in (u, v, w))
    alpha, beta = rng.standard_normal((2, n, 1))
    xi = np.broadcast_to(geo.XI, u.shape)
    zero = np.zeros_like(u)
    G = geo.connection_term
    checks = []

    checks.append(_lt("gdeta", _rel(geo.metric(geo.phi(u), geo.phi(v))
                                     - geo.metric(u, v) - geo.eta(u) * geo.eta(v), nu, nv), tol))
    checks.append(_lt("eta_is_minus_g_xi", _rel(geo.eta(u) + geo.metric(u, xi), nu), tol))
    checks.append(_lt("nabla_xi_is_phi", _rel(geo.nabla(u, xi, zero) - geo.phi(u), nu), tol))
    checks.append(_lt("phi_squared", _rel(geo.phi(geo.phi(u)) + u - geo.eta(u)[:, None] * xi, nu),
                      tol))
    sas = (G(u, geo.phi(w)) - geo.phi(G(u, w))
           - geo.metric(u, w)[:, None] * xi - geo.eta(w)[:, None] * u)
    checks.append(_lt("sasakian_random", _rel(sas, nu, nw), tol))
    frame_err = 0.0
    for Ei, Ej in product(geo.FRAME, repeat=2):
        lhs = G(Ei, geo.phi(Ej)) - geo.phi(G(Ei, Ej))
        rhs = geo.metric(Ei, Ej) * geo.XI + geo.eta(Ej) * Ei
        frame_err = max(frame_err, float(np.max(np.abs(lhs - rhs))))
    checks.append(_lt("sasakian_frame", frame_err, tol))

    cuv = geo.lorentz_cross(u, v)
    checks.append(_lt("cross_skew", _rel(cuv + geo.lorentz_cross(v, u), nu, nv), tol))
    checks.append(_lt("cross_orthogonal_u", _rel(geo.metric(cuv, u), nu, nu, nv), tol))
    checks.append(_lt("cross_orthogonal_v", _rel(geo.metric(cuv, v), nu, nv, nv), tol))
    lin = (geo.lorentz_cross(alpha * u + beta * w, v)
           - alpha * cuv - beta * geo.lorentz_cross(w, v))
    scale = (np.abs(alpha[:, 0]) * nu + np.abs(beta[:, 0]) * nw)
    checks.append(_lt("cross_bilinear", _rel(lin, scale, nv), tol))
    basis = max(
        float(np.max(np.abs(geo.lorentz_cross(geo.E_X, geo.E_Y) + geo.XI))),
        float(np.max(np.abs(geo.lorentz_cross(geo.E_Y, geo.XI) - geo.E_X))),
        float(np.max(np.abs(geo.lorentz_cross(geo.XI, geo.E_X) - geo.E_Y))),
        float(np.max(np.abs(geo.lorentz_cross(geo.E_X, geo.XI) + geo.phi(geo.E_X)))),
    )
    checks.append(_lt("cross_frame_basis", basis, tol))

    compat = geo.metric(G(u, v), w) + geo.metric(v, G(u, w))
    checks.append(_lt("metric_compatibility", _rel(compat, nu, nv, nw), tol))
    compat_frame = max(abs(float(geo.metric(G(a, b), c) + geo.metric(b, G(a, c))))
                       for a, b, c in product(geo.FRAME, repeat=3))
    checks.append(_lt("metric_compatibility_frame", compat_frame, tol))
    bracket = 2.0 * (u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])[:, None] * xi
    checks.append(_lt("torsion_free", _rel(G(u, v) - G(v, u) - bracket, nu, nv), tol))
    checks.append(_lt("bracket_XY_2xi",
                      float(np.max(np.abs(G(geo.E_X, geo.E_Y) - G(geo.E_Y, geo.E_X) - 2 * geo.XI))),
                      tol))

    np_ = geo.euclid_norm(p)
    round_trip = geo.coord_to_frame(p, geo.frame_to_coord(p, u)) - u
    checks.append(_lt("coord_round_trip", _rel(round_trip, nu, 1.0 + np_), tol))
    cm = (geo.metric(geo.coord_to_frame(p, u), geo.coord_to_frame(p, w))
          - geo.coord_metric(p, u, w))
    checks.append(_lt("coord_metric", _rel(cm, nu * (1 + np_), nw * (1 + np_)), tol))
    return checks


# -- curves ----------------------------------------------------------------

def helix_suite(step=1e-3, tol=None):
    series = example_legendre_helix(1.0, 1.0, step=step)
    f = frenet_apparatus(series)
    res = assess(series, f)
    leg = legendre_torsion_check(series, f, tol=1e-6)
    checks = [
        Check("helix_eta_T_exact", float(np.max(np.abs(series.tangent[:, 2]))), 0.0, "eq"),
        _lt("helix_kappa", np.max(np.abs(f.kappa - 1.0)), 1e-10),
        _lt("helix_tau", np.max(np.abs(f.tau - 1.0)), 1e-6),
        _flag("helix_is_legendre", res.is_legendre),
        _flag("helix_is_whirl", res.is_whirl),
        _flag("helix_legendre_torsion", leg.ok),
        _lt("helix_eta_N", np.max(np.abs(f.eta_N)), 1e-10),
    ]
    checks += [_lt(f"helix_{r.name}", r.max_abs, 1e-5) for r in verify_frenet(series, f)]
    checks += [_lt(f"helix_{r.name}", r.max_abs, 1e-6) for r in reeb_identities(series, f)]
    checks += [_lt(f"helix_{r.name}", r.max_abs, 1e-6) for r in frame_identities(series, f)]
    return checks


def construct_suite(step=1e-4, s_range=(0.0, 1.0)):
    checks = []
    for branch, series in example_non_legendre(s_range, step, both=True).items():
        tag = "plus" if branch > 0 else "minus"
        f = frenet_apparatus(series)
        res = assess(series, f)
        T = series.tangent
        checks += [
            _lt(f"construct_{tag}_kappa", np.max(np.abs(f.kappa - 1.0)), 1e-4),
            _lt(f"construct_{tag}_rho_hat",
                abs(res.rho_hat - 1.0) if res.rho_hat is not None else math.inf, 1e-3),
            _flag(f"construct_{tag}_is_whirl", res.is_whirl),
            _flag(f"construct_{tag}_not_legendre", not res.is_legendre),
            _lt(f"construct_{tag}_eta_T_exp", np.max(np.abs(T[:, 2] - np.exp(series.s))), 1e-5),
            _lt(f"construct_{tag}_unit_speed", np.max(np.abs(geo.metric(T, T) - 1.0)), 1e-8),
        ]
        checks += [_lt(f"construct_{tag}_{r.name}", r.max_abs, 1e-3)
                   for r in verify_frenet(series, f) + reeb_identities(series, f)]
        checks += [_lt(f"construct_{tag}_{r.name}", r.max_abs, 1e-4)
                   for r in frame_identities(series, f)]
    return checks


def torsion_suite(rng, step=1e-4, n_tuples=10_000):
    checks = []
    for branch, series in example_non_legendre((0.0, 1.0), step, both=True).items():
        tag = "plus" if branch > 0 else "minus"
        f = frenet_apparatus(series)
        for rep in (torsion_ode_residual(series, f, 1.0), u_form_residual(series, f, 1.0),
                    *whirl_identities(series, f, 1.0)):
            checks.append(_lt(f"torsion_{tag}_{rep.name}",
                              rep.max_abs if not rep.empty else math.inf, 1e-3))
    checks.append(_lt("torsion_form_equivalence", form_equivalence_error(rng, n_tuples), 1e-12))
    return checks


def random_symbol_tuples(rng, n):
    """Random ``(kappa, tau, kappa', rho, eps1, eps2, eps3)`` off the singular sets."""
    kappa = rng.uniform(0.1, 3.0, n)
    tau = rng.uniform(-3.0, 3.0, n)
    dkappa = rng.uniform(-2.0, 2.0, n)
    rho = rng.choice([-1.0, 1.0], n) * rng.uniform(0.2, 3.0, n)
    eps1 = rng.choice([-1, 1], n)
    eps2 = rng.choice([-1, 1], n)
    A = eps1 + eps2 / rho ** 2
    keep = (np.abs(tau - 1.0) > 1e-3) & (np.abs(A) > 1e-2)
    return (kappa[keep], tau[keep], dkappa[keep], rho[keep], eps1[keep], eps2[keep],
            -eps1[keep] * eps2[keep])


def form_equivalence_error(rng, n):
    kappa, tau, dkappa, rho, e1, e2, e3 = random_symbol_tuples(rng, n)
    dtau = tauprime_rhs(kappa, tau, dkappa, rho, e1, e2, e3)
    lhs = u_form_lhs(kappa, tau, dkappa, dtau)
    rhs = u_form_rhs(kappa, tau, rho, e1, e2)
    return float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))))


def _threads():
    try:
        return max(1, int(os.environ.get("WHIRL_LAB_THREADS", "1")))
    except ValueError:
        return 1


def magnetic_draws(rng, n):
    """Alternate Legendre draws (``v0 = 0``) with generic ones, some timelike."""
    draws = []
    for i in range(n):
        q = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 3.0))
        angle = float(rng.uniform(0.0, 2 * np.pi))
        if i % 2 == 0:
            v0, eps1 = 0.0, 1
        else:
            v0 = float(rng.uniform(-2.0, 2.0))
            eps1 = -1 if (i % 4 == 3 and abs(v0) > 1.05) else 1
        draws.append((q, v0, angle, eps1))
    return draws


def _run_magnetic(draw, s_end, step):
    q, v0, angle, eps1 = draw
    series = integrate_magnetic(MagneticParams(q, unit_velocity(v0, angle, eps1),
                                               s_end=s_end, step=step))
    f = frenet_apparatus(series)
    drift_eta, drift_g = conservation_reports(series)
    out = {
        "v0": v0,
        "eta_drift": drift_eta.max_abs,
        "g_drift": drift_g.max_abs,
        "lorentz": lorentz_residual(series, q).max_abs,
        "eta_N": float(np.max(np.abs(f.eta_N))),
        "kappa_err": float(np.max(np.abs(f.kappa - abs(q)))) if v0 == 0.0 else 0.0,
        "contradictions": 0,
    }
    try:
        rep = check_magnetic_whirl(series, f)
    except Exception as exc:  # ContradictionDetected
        out["contradictions"] = 1
        out["error"] = str(exc)
        return out
    out["legendre"] = rep.assessment.is_legendre
    out["whirl"] = rep.assessment.is_whirl
    out["tau_err"] = rep.tau_report.max_abs if rep.tau_report is not None else None
    return out


def magnetic_suite(rng, n_draws=20, s_end=10.0, step=1e-4):
    draws = magnetic_draws(rng, n_draws)
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(lambda d: _run_magnetic(d, s_end, step), draws))
    legendre = [r for r in results if r["v0"] == 0.0]
    generic = [r for r in results if r["v0"] != 0.0]
    return [
        _lt("magnetic_eta_T_drift", max(r["eta_drift"] for r in results), 1e-8),
        _lt("magnetic_gTT_drift", max(r["g_drift"] for r in results), 1e-6),
        _lt("magnetic_lorentz_equation", max(r["lorentz"] for r in results), 1e-10),
        _lt("magnetic_eta_N_zero", max(r["eta_N"] for r in results), 1e-8),
        _lt("magnetic_legendre_tau", max((r.get("tau_err") or math.inf) for r in legendre), 1e-4),
        _lt("magnetic_legendre_kappa", max(r["kappa_err"] for r in legendre), 1e-4),
        _flag("magnetic_legendre_whirl", all(r.get("legendre") and r.get("whirl")
                                             for r in legendre)),
        _flag("magnetic_generic_not_whirl", all(not r.get("whirl", True) for r in generic)),
        Check("magnetic_contradictions", float(sum(r["contradictions"] for r in results)),
              0.0, "eq"),
    ]


def null_suite(grid_size=16, tol=1e-10):
    worst = {}
    for prof in profile_grid(grid_size):
        st = evaluate_profile(prof)
        for rep in verify_null_system(st, prof) + profile_identities(st, prof):
            worst[rep.name] = max(worst.get(rep.name, 0.0), rep.max_abs)
    checks = [_lt(name, value, tol) for name, value in sorted(worst.items())]

    from .nullcurves import NullProfile
    spot = evaluate_profile(NullProfile(1.0, 1.0, 1, (0.0, 0.0, 1)))
    k, rho, delta = Fraction(1), Fraction(1), Fraction(1)
    tau_exact = delta - rho ** 2 / 2 + 1 / (2 * k ** 2)
    z_exact = k
    x_exact = (-1 - rho ** 2 * z_exact ** 2) / (2 * z_exact)
    checks.append(_lt("null_spot_tau", abs(spot.tau[0] - float(tau_exact)), tol))
    checks.append(_lt("null_spot_state", max(abs(spot.x[0] - float(x_exact)),
                                             abs(spot.y[0] - float(rho * z_exact)),
                                             abs(spot.z[0] - float(z_exact))), tol))
    checks.append(_flag("null_spot_tau_is_one", tau_exact == 1))
    return checks


def _convergence_ratio(residual_sets):
    """Smallest per-halving reduction factor over all Frenet residuals."""
    worst = math.inf
    for coarse, fine in zip(residual_sets, residual_sets[1:]):
        for a, b in zip(coarse, fine):
            if a < CONVERGENCE_FLOOR and b < CONVERGENCE_FLOOR:
                continue
            worst = min(worst, a / b if b > 0 else math.inf)
    return worst


def convergence_suite(helix_steps=(0.1, 0.05, 0.025), construct_steps=(0.02, 0.01, 0.005)):
    def residuals(series):
        return [r.max_abs for r in verify_frenet(series, frenet_apparatus(series))]

    helix = [residuals(example_legendre_helix(step=h)) for h in helix_steps]
    checks = [Check("convergence_helix", _convergence_ratio(helix), 8.0, "ge")]
    for branch in (1, -1):
        tag = "plus" if branch > 0 else "minus"
        runs = [residuals(example_non_legendre((0.0, 1.0), h, branch=branch))
                for h in construct_steps]
        checks.append(Check(f"convergence_construct_{tag}", _convergence_ratio(runs), 8.0, "ge"))
    return checks


SUITES = ("structure", "helix", "construct", "torsion", "magnetic", "null", "convergence")


def run_suites(names=SUITES, seed=0, tolerance=None, grid_size=16, magnetic_draws_n=20,
               magnetic_s_end=10.0, magnetic_step=1e-4):
    """Run the named suites and return ``{suite: [Check, ...]}``.

    Each randomized suite draws from its own generator seeded from ``seed``
    so results do not depend on which other suites were selected.
    """
    out = {}
    for name in names:
        rng = np.random.default_rng([seed, SUITES.index(name)])
        if name == "structure":
            checks = structure_suite(rng)
        elif name == "helix":
            checks = helix_suite()
        elif name == "construct":
            checks = construct_suite()
        elif name == "torsion":
            checks = torsion_suite(rng)
        elif name == "magnetic":
            checks = magnetic_suite(rng, magnetic_draws_n, magnetic_s_end, magnetic_step)
        elif name == "null":
            checks = null_suite(grid_size)
        elif name == "convergence":
            checks = convergence_suite()
        else:
            raise ValueError(f"unknown suite {name!r}")
        if tolerance is not None:
            for c in checks:
                if c.mode == "lt":
                    c.tol = float(tolerance)
        out[name] = checks
    return out
