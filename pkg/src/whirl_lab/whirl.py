"""Contact whirl detection, torsion law checks and Legendre rigidity.

A Frenet curve is a contact whirl curve when ``eta(T) = rho * eta(N)`` for a
nonzero constant ``rho``. Where in addition ``eta(T) != 0``, ``tau != 1`` and
``A = eps1 + eps2 / rho^2 != 0``, the torsion obeys::

    tau' = (tau - 1) * ( eps2 eps3 (tau - 1)^2 / (rho kappa A) + kappa'/kappa + eps2 kappa / rho )

and, for ``w = (tau - 1) / kappa``, the equivalent first-order law::

    w' = (eps2 / rho) (tau - 1) * ( 1 - eps1 eps2 rho^2 w^2 / (eps2 + eps1 rho^2) )

The printed shorthand ``eps2 rho (tau - 1)(1 - w^2 / (eps2 + eps1 rho^2))`` only
agrees with the torsion ODE when ``rho^2 = 1`` and ``eps1 = eps2``; the
general rearrangement above is the one implemented here.
"""
from collections import namedtuple
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NotLegendre
from .frames import ResidualReport

WHIRL_TOL = {"analytic": 1e-7, "integrated": 1e-4, "sampled": 1e-4}

# Hypothesis exclusion thresholds for the torsion laws.
ETA_T_MIN = 1e-7
TAU_SINGULAR = 1e-6
A_MIN = 1e-9

THRESHOLDS = {"eta_T_min": ETA_T_MIN, "tau_singular": TAU_SINGULAR, "A_min": A_MIN}


@dataclass
class WhirlAssessment:
    rho_hat: Optional[float]
    constancy_residual: float
    is_whirl: bool
    is_legendre: bool
    valid_interval: Optional[tuple]
    tol: float
    n_fit: int = 0

    def to_dict(self):
        return {
            "rho_hat": self.rho_hat,
            "constancy_residual": self.constancy_residual,
            "is_whirl": self.is_whirl,
            "is_legendre": self.is_legendre,
            "valid_interval": list(self.valid_interval) if self.valid_interval else None,
            "tol": self.tol,
            "n_fit": self.n_fit,
        }


def assess(series, frames, tol=None):
    """Decide whether the curve is Legendre and/or contact whirl.

    For Legendre curves the whirl relation holds for every ``rho`` as soon as
    ``eta(N)`` vanishes, so ``rho_hat`` is left as ``None``. Otherwise
    ``rho_hat`` is the least-squares fit of ``eta(T) ~ rho eta(N)`` over
    samples with ``|eta(N)| > tol``.
    """
    if tol is None:
        tol = WHIRL_TOL[series.source]
    eT, eN = frames.eta_T, frames.eta_N
    interval = (float(frames.s[0]), float(frames.s[-1]))
    max_T = float(np.max(np.abs(eT)))

    if max_T < tol:
        max_N = float(np.max(np.abs(eN)))
        return WhirlAssessment(None, max_N, max_N < tol, True, interval, tol)

    fit = np.abs(eN) > tol
    if not fit.any():
        return WhirlAssessment(None, 1.0, False, False, interval, tol)
    rho_hat = float(np.dot(eT[fit], eN[fit]) / np.dot(eN[fit], eN[fit]))
    resid = float(np.max(np.abs(eT - rho_hat * eN)) / max_T)
    return WhirlAssessment(rho_hat, resid, resid < tol, False, interval, tol, int(fit.sum()))


def tauprime_rhs(kappa, tau, dkappa, rho, eps1, eps2, eps3):
    A = eps1 + eps2 / rho ** 2
    t1 = tau - 1.0
    return t1 * (eps2 * eps3 * t1 ** 2 / (rho * kappa * A) + dkappa / kappa + eps2 * kappa / rho)


def u_form_rhs(kappa, tau, rho, eps1, eps2):
    t1 = tau - 1.0
    w = t1 / kappa
    return (eps2 / rho) * t1 * (1.0 - eps1 * eps2 * rho ** 2 * w ** 2 / (eps2 + eps1 * rho ** 2))


def u_form_lhs(kappa, tau, dkappa, dtau):
    """``d/ds ((tau - 1) / kappa)`` from the derivatives of ``kappa`` and ``tau``."""
    return dtau / kappa - (tau - 1.0) * dkappa / kappa ** 2


def _hypothesis_mask(frames, rho):
    A = frames.eps1 + frames.eps2 / rho ** 2
    checks = {
        "eta_T_zero": np.abs(frames.eta_T) <= ETA_T_MIN,
        "tau_singular": np.abs(frames.tau - 1.0) <= TAU_SINGULAR,
        "A_degenerate": np.abs(A) <= A_MIN,
    }
    bad = np.zeros(len(frames), dtype=bool)
    excluded = dict(frames.excluded)
    for reason, hit in checks.items():
        new = hit & ~bad
        if new.any():
            excluded[reason] = excluded.get(reason, 0) + int(new.sum())
        bad |= hit
    return ~bad, excluded


def torsion_ode_residual(series, frames, rho):
    """Residual of the torsion ODE on samples meeting its hypotheses.

    When no sample qualifies (e.g. the singular branch ``tau = 1``) the
    returned report is empty rather than an exception.
    """
    ok, excluded = _hypothesis_mask(frames, rho)
    dtau = frames.derivative(frames.tau)
    dkappa = frames.derivative(frames.kappa)
    rhs = tauprime_rhs(frames.kappa, frames.tau, dkappa, rho,
                       frames.eps1, frames.eps2, frames.eps3)
    return ResidualReport.from_values("torsion_ode", frames.s[ok], (dtau - rhs)[ok], excluded)


def u_form_residual(series, frames, rho):
    ok, excluded = _hypothesis_mask(frames, rho)
    denom = frames.eps2 + frames.eps1 * rho ** 2
    degenerate = (np.abs(denom) <= A_MIN) & ok
    if degenerate.any():
        excluded["degenerate_denominator"] = int(degenerate.sum())
        ok &= ~degenerate
    w = (frames.tau - 1.0) / frames.kappa
    dw = frames.derivative(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        rhs = u_form_rhs(frames.kappa, frames.tau, rho, frames.eps1, frames.eps2)
    return ResidualReport.from_values("u_form", frames.s[ok], (dw - rhs)[ok], excluded)


def whirl_identities(series, frames, rho):
    """Consequences of the whirl relation used in deriving the torsion law.

    ``eta(T)' = (eps2 / rho) kappa eta(T)`` everywhere, and on the hypothesis
    set ``eta(B) = -kappa A eta(T) / (eps3 (tau - 1))``.
    """
    f = frames
    r1 = f.derivative(f.eta_T) - (f.eps2 / rho) * f.kappa * f.eta_T
    ok, excluded = _hypothesis_mask(f, rho)
    A = f.eps1 + f.eps2 / rho ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = f.eta_B + f.kappa * A * f.eta_T / (f.eps3 * (f.tau - 1.0))
    return [
        ResidualReport.from_values("whirl_eta_T_growth", f.s, r1, f.excluded),
        ResidualReport.from_values("whirl_eta_B_express", f.s[ok], r2[ok], excluded),
    ]


LegendreCheck = namedtuple("LegendreCheck", "ok tau_report eta_B_report")


def legendre_torsion_check(series, frames, tol=1e-6, legendre_tol=None):
    """Check ``tau = 1`` and ``eta(B)^2 = 1`` on a non-geodesic Legendre curve."""
    if legendre_tol is None:
        legendre_tol = WHIRL_TOL[series.source]
    max_T = float(np.max(np.abs(frames.eta_T)))
    if max_T >= legendre_tol:
        raise NotLegendre(f"max |eta(T)| = {max_T:.3e} is not below {legendre_tol:.1e}")
    tau_rep = ResidualReport.from_values("legendre_tau", frames.s, frames.tau - 1.0,
                                         frames.excluded)
    eta_rep = ResidualReport.from_values("legendre_eta_B", frames.s, frames.eta_B ** 2 - 1.0,
                                         frames.excluded)
    return LegendreCheck(tau_rep.passes(tol) and eta_rep.passes(tol), tau_rep, eta_rep)
