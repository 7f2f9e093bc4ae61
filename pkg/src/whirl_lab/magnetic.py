"""Contact magnetic trajectories ``nabla_T T = q phi(T)`` in the Heisenberg model.

With ``T = (a, b, v)`` in frame components the Lorentz equation reduces to::

    a' = -b (q - 2 v),   b' = a (q - 2 v),   v' = 0

so the Reeb component is conserved and ``(a, b)`` rotates at rate ``q - 2v``.
Positions are integrated alongside through ``frame_to_coord``. Setting
``q = 0`` gives the geodesic equation.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import geometry as geo
from .errors import ContradictionDetected, NotUnitSpeed
from .frames import CurveSeries, ResidualReport
from .numerics import grid, rk4
from .whirl import WhirlAssessment, assess, legendre_torsion_check


@dataclass(frozen=True)
class MagneticParams:
    q: float
    initial_velocity: tuple
    origin: tuple = (0.0, 0.0, 0.0)
    s_start: float = 0.0
    s_end: float = 10.0
    step: float = 1e-4

    def validate(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not self.s_end > self.s_start:
            raise ValueError("s_range must be non-degenerate")
        t0 = np.asarray(self.initial_velocity, dtype=float)
        if t0.shape != (3,) or not np.all(np.isfinite(t0)):
            raise ValueError("initial_velocity must be three finite frame components")
        g = float(geo.metric(t0, t0))
        if abs(abs(g) - 1.0) > 1e-9:
            raise NotUnitSpeed(f"|g(T0, T0)| = {abs(g):.17g}, expected 1")

    @property
    def causal_character(self):
        return int(geo.causal_sign(np.asarray(self.initial_velocity, dtype=float)))


def unit_velocity(v0, angle, eps1=1):
    """Frame components ``(r cos angle, r sin angle, v0)`` with ``r^2 - v0^2 = eps1``."""
    r2 = eps1 + v0 * v0
    if r2 < 0:
        raise NotUnitSpeed(f"no real radius for eps1={eps1}, v0={v0}")
    r = math.sqrt(r2)
    return (r * math.cos(angle), r * math.sin(angle), float(v0))


def integrate_magnetic(params):
    params.validate()
    q = float(params.q)

    def rhs(s, state):
        x, y, _, a, b, v = state
        w = q - 2.0 * v
        return (a, b, v - y * a + x * b, -b * w, a * w, 0.0)

    s = grid(params.s_start, params.s_end, params.step)
    y0 = [*map(float, params.origin), *map(float, params.initial_velocity)]
    states = rk4(rhs, y0, s[0], params.step, len(s) - 1)
    p = states[:, :3]
    a, b, v = states[:, 3], states[:, 4], states[:, 5]
    x, y = p[:, 0], p[:, 1]
    w = q - 2.0 * v
    da, db = -b * w, a * w
    u = np.stack([a, b, v - y * a + x * b], axis=-1)
    du = np.stack([da, db, x * db - y * da], axis=-1)
    T = np.stack([a, b, v], axis=-1)
    dT = np.stack([da, db, np.zeros_like(v)], axis=-1)
    return CurveSeries(s, p, u, du, None, "integrated", T, dT)


def conservation_reports(series):
    """Drift of ``eta(T)`` and ``g(T, T)`` from their initial values."""
    T = series.tangent
    eta_T = T[:, 2]
    gTT = geo.metric(T, T)
    return [
        ResidualReport.from_values("magnetic_eta_T_drift", series.s, eta_T - eta_T[0]),
        ResidualReport.from_values("magnetic_gTT_drift", series.s, gTT - gTT[0]),
    ]


def lorentz_residual(series, q):
    T = series.tangent
    acc = geo.nabla(T, T, series.tangent_derivative)
    return ResidualReport.from_values("lorentz_equation", series.s,
                                      geo.euclid_norm(acc - q * geo.phi(T)))


@dataclass
class MagneticWhirlReport:
    assessment: WhirlAssessment
    eta_N_max: float
    tau_report: Optional[ResidualReport]
    tau_ok: Optional[bool]
    contradictions: int = 0

    def to_dict(self):
        return {
            "assessment": self.assessment.to_dict(),
            "eta_N_max": self.eta_N_max,
            "tau": self.tau_report.to_dict() if self.tau_report else None,
            "tau_ok": self.tau_ok,
            "contradictions": self.contradictions,
        }


def check_magnetic_whirl(series, frames, tol=None, tau_tol=1e-4):
    """Test that magnetic and whirl together force the Legendre condition.

    A non-Legendre trajectory that passes the whirl test raises
    :class:`ContradictionDetected`. Legendre trajectories are additionally
    checked for ``tau = 1``.
    """
    res = assess(series, frames, tol)
    if res.is_whirl and res.rho_hat is not None and not res.is_legendre:
        raise ContradictionDetected(
            f"non-Legendre magnetic trajectory passes whirl test with rho = {res.rho_hat:.6g}")
    eta_N_max = float(np.max(np.abs(frames.eta_N)))
    tau_report = tau_ok = None
    if res.is_legendre:
        check = legendre_torsion_check(series, frames, tol=tau_tol, legendre_tol=res.tol)
        tau_report, tau_ok = check.tau_report, check.ok
    return MagneticWhirlReport(res, eta_N_max, tau_report, tau_ok)
