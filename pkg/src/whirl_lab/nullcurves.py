"""Closed-form profiles that a non-geodesic null contact whirl curve must follow.

In a Cartan frame ``{T, N, B}`` (``g(T,B) = g(N,N) = 1``, other products 0)
the Reeb field is written ``xi = x T + y N + z B``. With ``rho = 1/varrho``::

    z = k e^{rho s},   y = rho z,   x = (-1 - rho^2 z^2) / (2 z)
    tau = delta - rho^2 / 2 + e^{-2 rho s} / (2 k^2)
    phi(T) = delta z (N - rho T)

Nothing here constructs a curve; the profiles are checked against the
structure equations using exact derivatives of the closed forms.
"""
import itertools
from dataclasses import dataclass

import numpy as np

from .frames import ResidualReport


@dataclass(frozen=True)
class NullProfile:
    k: float
    rho: float
    delta: int
    s_grid: tuple = (0.0, 2.0, 201)

    def __post_init__(self):
        if self.k == 0 or self.rho == 0:
            raise ValueError("k and rho must be nonzero")
        if self.delta not in (1, -1):
            raise ValueError("delta must be +1 or -1")

    @property
    def s(self):
        lo, hi, n = self.s_grid
        return np.linspace(lo, hi, int(n))

    # Exact derivatives of the closed forms in s.
    def z(self, s):
        return self.k * np.exp(self.rho * s)

    def dz(self, s):
        return self.rho * self.z(s)

    def dy(self, s):
        return self.rho * self.dz(s)

    def dx(self, s):
        z, dz = self.z(s), self.dz(s)
        return dz / (2.0 * z * z) - 0.5 * self.rho ** 2 * dz


@dataclass
class NullStates:
    s: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    tau: np.ndarray

    def __len__(self):
        return self.s.shape[0]

    @property
    def xi(self):
        return np.stack([self.x, self.y, self.z], axis=-1)


def cartan_metric(u, w):
    """Bilinear form on Cartan components: ``g(T,B) = g(N,N) = 1``."""
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    return u[..., 0] * w[..., 2] + u[..., 2] * w[..., 0] + u[..., 1] * w[..., 1]


def evaluate_profile(p):
    s = p.s
    z = p.z(s)
    y = p.rho * z
    x = (-1.0 - p.rho ** 2 * z ** 2) / (2.0 * z)
    tau = p.delta - 0.5 * p.rho ** 2 + np.exp(-2.0 * p.rho * s) / (2.0 * p.k ** 2)
    return NullStates(s, x, y, z, tau)


def verify_null_system(states, p):
    """Residuals of the three structure equations and of ``z' = rho z``."""
    s, x, y, z, tau = states.s, states.x, states.y, states.z, states.tau
    rho, delta = p.rho, p.delta
    r1 = p.dx(s) - rho * tau * z + delta * rho * z
    r2 = x + p.dy(s) + tau * z - delta * z
    r3 = p.dz(s) - y
    r4 = p.dz(s) - rho * z
    return [
        ResidualReport.from_values("null_sys1", s, r1),
        ResidualReport.from_values("null_sys2", s, r2),
        ResidualReport.from_values("null_sys3", s, r3),
        ResidualReport.from_values("null_z_growth", s, r4),
    ]


def phi_T_profile(states, p):
    """Cartan components ``(-delta rho z, delta z, 0)`` of ``phi(T)``."""
    z = states.z
    return np.stack([-p.delta * p.rho * z, p.delta * z, np.zeros_like(z)], axis=-1)


def profile_identities(states, p):
    """Pointwise identities of a profile beyond the structure equations."""
    s = states.s
    xi = states.xi
    phiT = phi_T_profile(states, p)
    T = np.broadcast_to([1.0, 0.0, 0.0], xi.shape)
    N = np.broadcast_to([0.0, 1.0, 0.0], xi.shape)
    eta_T = -cartan_metric(T, xi)
    eta_N = -cartan_metric(N, xi)
    ekz = p.k * np.exp(p.rho * s)
    x_closed = -np.exp(-p.rho * s) / (2.0 * p.k) - 0.5 * p.k * p.rho ** 2 * np.exp(p.rho * s)
    return [
        ResidualReport.from_values("null_norm", s, cartan_metric(xi, xi) + 1.0),
        ResidualReport.from_values("null_whirl_relation", s, states.y - p.rho * states.z),
        ResidualReport.from_values("null_eta_T", s, eta_T + ekz),
        ResidualReport.from_values("null_eta_N", s, eta_N + p.rho * ekz),
        ResidualReport.from_values("null_x_closed", s, states.x - x_closed),
        ResidualReport.from_values("null_phiT_norm", s, cartan_metric(phiT, phiT) - states.z ** 2),
        ResidualReport.from_values("null_eta_phiT", s, cartan_metric(phiT, xi)),
    ]


def profile_grid(size=None, s_grid=(0.0, 2.0, 201)):
    """Profiles over ``k in {1, -2, 2, -1}``, ``rho in {1, -0.5, 0.5, -1}``, ``delta = +-1``.

    ``size`` keeps the first ``size`` combinations in that product order.
    """
    combos = itertools.product((1.0, -2.0, 2.0, -1.0), (1.0, -0.5, 0.5, -1.0), (1, -1))
    profiles = [NullProfile(k, r, d, s_grid) for k, r, d in combos]
    return profiles if size is None else profiles[:size]
