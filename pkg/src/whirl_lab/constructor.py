"""Construction of contact whirl curves by quadratures, plus the two worked examples.

A unit tangent is written ``T = r cos(beta) X + r sin(beta) Y + v xi`` with
``r^2 - v^2 = eps1``. Taking ``v' = lambda0 v`` and choosing ``beta`` from::

    beta' = -2 v +/- sqrt(Q) / r,   Q = eps2 rho^2 lambda0^2 + v'^2 - r'^2

gives constant curvature ``kappa = eps2 rho lambda0`` and the whirl relation
``eta(T) = rho eta(N)``. Positions follow from ``x' = r cos(beta)``,
``y' = r sin(beta)``, ``z' = v - y x' + x y'``.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EmptyDomain, ImaginaryRadius, NotUnitSpeed, SignConditionViolated
from .frames import CurveSeries
from .numerics import grid, rk4


@dataclass(frozen=True)
class WhirlParams:
    rho: float = 1.0
    lambda0: float = 1.0
    eps1: int = 1
    eps2: int = 1
    v0: float = 1.0
    beta0: float = 0.0
    branch: int = 1
    s_start: float = 0.0
    s_end: float = 1.0
    step: float = 1e-4
    origin: tuple = (0.0, 0.0, 0.0)

    def validate(self):
        if self.rho == 0:
            raise ValueError("rho must be nonzero")
        if self.lambda0 == 0:
            raise ValueError("lambda0 must be nonzero")
        if self.eps1 not in (1, -1) or self.eps2 not in (1, -1):
            raise ValueError("eps1 and eps2 must be +1 or -1")
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        if self.v0 == 0:
            raise ValueError("v0 must be nonzero (the construction is non-Legendre)")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not self.s_end > self.s_start:
            raise ValueError("s_range must be non-degenerate")
        if not self.eps2 * self.rho * self.lambda0 > 0:
            raise SignConditionViolated(
                f"eps2*rho*lambda0 = {self.eps2 * self.rho * self.lambda0:g} must be > 0")

    # Closed-form profile along the construction; all accept arrays.
    def v(self, s):
        return self.v0 * np.exp(self.lambda0 * (np.asarray(s) - self.s_start))

    def r(self, s):
        return np.sqrt(self.eps1 + self.v(s) ** 2)

    def r_prime(self, s):
        v = self.v(s)
        return v * self.lambda0 * v / self.r(s)

    def Q(self, s):
        v_prime = self.lambda0 * self.v(s)
        return (self.eps2 * self.rho ** 2 * self.lambda0 ** 2
                + v_prime ** 2 - self.r_prime(s) ** 2)

    def beta_prime(self, s):
        q = np.sqrt(np.maximum(self.Q(s), 0.0))
        return -2.0 * self.v(s) + self.branch * q / self.r(s)

    def scalar_profile(self, s):
        """``(v, r, beta')`` at a single float ``s``, for the integrator loop."""
        v = self.v0 * math.exp(self.lambda0 * (s - self.s_start))
        r = math.sqrt(self.eps1 + v * v)
        r_prime = self.lambda0 * v * v / r
        q = self.eps2 * (self.rho * self.lambda0) ** 2 + (self.lambda0 * v) ** 2 - r_prime ** 2
        return v, r, -2.0 * v + self.branch * math.sqrt(max(q, 0.0)) / r

    @property
    def kappa(self):
        return self.eps2 * self.rho * self.lambda0


@dataclass
class TangentField:
    params: WhirlParams
    s: np.ndarray
    r: np.ndarray
    beta: np.ndarray
    v: np.ndarray
    Q: np.ndarray
    truncated_at: Optional[float] = None

    def __len__(self):
        return self.s.shape[0]


def build_tangent(params):
    """Sample ``(r, beta, v, Q)`` on the grid where ``Q >= 0``.

    If ``Q`` turns negative inside the range the field is cut to the longest
    valid prefix and ``truncated_at`` records the first rejected ``s``.
    Grid midpoints are probed too since RK4 evaluates there. As the radius
    shrinks to zero ``r'`` blows up and ``Q`` goes negative first, so a
    vanishing radius downstream shows up as truncation.
    """
    params.validate()
    s = grid(params.s_start, params.s_end, params.step)
    mid = s[:-1] + 0.5 * params.step

    def scan(probe):
        # First sample where the radius degenerates, and where Q < 0.
        r2 = params.eps1 + params.v(probe) ** 2
        with np.errstate(invalid="ignore", divide="ignore"):
            q = np.where(r2 > 0, params.Q(np.where(r2 > 0, probe, probe[0])), -np.inf)
        return r2 <= 0, q < 0

    r_bad, q_bad = scan(s)
    if r_bad[0]:
        raise ImaginaryRadius(f"eps1 + v^2 <= 0 at s = {s[0]:.17g}")
    if q_bad[0]:
        raise EmptyDomain(f"Q(s_start) = {params.Q(s[0]):.6g} < 0")
    r_mid, q_mid = scan(mid)
    r_bad[1:] |= r_mid
    q_bad[1:] |= q_mid
    truncated_at = None
    bad = r_bad | q_bad
    if bad.any():
        cut = int(np.argmax(bad))
        if r_bad[cut] and not q_bad[cut]:
            raise ImaginaryRadius(f"eps1 + v^2 <= 0 before s = {s[cut]:.17g}")
        truncated_at = float(s[cut])
        s = s[:cut]

    beta = rk4(lambda t, b: (params.scalar_profile(t)[2],), params.beta0, s[0], params.step,
               len(s) - 1)[:, 0]
    return TangentField(params, s, params.r(s), beta, params.v(s), params.Q(s), truncated_at)


def integrate_curve(field, origin=None):
    """Integrate positions for a tangent field with classical RK4.

    The phase ``beta`` and the coordinates ``x, y, z`` are advanced as one
    state so that ``z' = v - y x' + x y'`` sees the stage values of ``x, y``.
    """
    prm = field.params
    origin = prm.origin if origin is None else origin
    if len(field) < 1:
        raise EmptyDomain("tangent field is empty")

    def rhs(s, state):
        beta, x, y, _ = state
        v, r, beta_prime = prm.scalar_profile(s)
        dx = r * math.cos(beta)
        dy = r * math.sin(beta)
        return (beta_prime, dx, dy, v - y * dx + x * dy)

    y0 = np.array([prm.beta0, *origin], dtype=float)
    states = rk4(rhs, y0, field.s[0], prm.step, len(field) - 1)
    s = field.s
    beta, p = states[:, 0], states[:, 1:]
    x, y = p[:, 0], p[:, 1]

    r, r1, v, b1 = prm.r(s), prm.r_prime(s), prm.v(s), prm.beta_prime(s)
    dx, dy = r * np.cos(beta), r * np.sin(beta)
    ddx = r1 * np.cos(beta) - r * b1 * np.sin(beta)
    ddy = r1 * np.sin(beta) + r * b1 * np.cos(beta)
    u = np.stack([dx, dy, v - y * dx + x * dy], axis=-1)
    du = np.stack([ddx, ddy, prm.lambda0 * v - y * ddx + x * ddy], axis=-1)
    T = np.stack([dx, dy, v], axis=-1)
    dT = np.stack([ddx, ddy, prm.lambda0 * v], axis=-1)
    return CurveSeries(s, p, u, du, None, "integrated", T, dT)


def example_legendre_helix(R=1.0, omega=1.0, s_start=0.0, s_end=2 * np.pi, step=1e-3):
    """Horizontal helix ``(R cos ws, R sin ws, R^2 w s)`` with exact derivatives."""
    if not R > 0 or omega == 0:
        raise ValueError("need R > 0 and omega != 0")
    if abs(R * R * omega * omega - 1.0) > 1e-12:
        raise NotUnitSpeed(f"R^2 omega^2 = {R * R * omega * omega:.17g} != 1")
    s = grid(s_start, s_end, step)
    c, sn = np.cos(omega * s), np.sin(omega * s)
    zero = np.zeros_like(s)
    p = np.stack([R * c, R * sn, R * R * omega * s], axis=-1)
    u = np.stack([-R * omega * sn, R * omega * c, R * R * omega + zero], axis=-1)
    du = np.stack([-R * omega ** 2 * c, -R * omega ** 2 * sn, zero], axis=-1)
    ddu = np.stack([R * omega ** 3 * sn, -R * omega ** 3 * c, zero], axis=-1)
    # Horizontal: the Reeb component R^2 w - R^2 w (sin^2 + cos^2) is exactly 0.
    T = np.stack([u[:, 0], u[:, 1], zero], axis=-1)
    dT = du.copy()
    return CurveSeries(s, p, u, du, ddu, "analytic", T, dT)


NON_LEGENDRE_PARAMS = dict(rho=1.0, lambda0=1.0, eps1=1, eps2=1, v0=1.0)


def example_non_legendre(s_range=(0.0, 1.0), step=1e-4, branch=1, both=False, beta0=0.0,
                         origin=(0.0, 0.0, 0.0)):
    """Spacelike non-Legendre whirl curve with ``v = e^s`` and ``kappa = 1``.

    With ``both=True`` returns a dict mapping each branch sign to its series.
    """
    def one(sign):
        prm = WhirlParams(**NON_LEGENDRE_PARAMS, beta0=beta0, branch=sign,
                          s_start=s_range[0], s_end=s_range[1], step=step, origin=tuple(origin))
        return integrate_curve(build_tangent(prm))

    if both:
        return {1: one(1), -1: one(-1)}
    return one(branch)
