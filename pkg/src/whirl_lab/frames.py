"""Frenet apparatus of non-null curves and residual checks of the frame identities.

Conventions for a unit-speed non-null curve with ``g(T, T) = eps1``::

    nabla_T T =  eps2 kappa N
    nabla_T N = -eps1 kappa T - eps3 tau B
    nabla_T B =  eps2 tau N,          eps1 eps2 = -eps3

``N = nabla_T T / (eps2 kappa)`` and ``B = eps3 (T ^ N)``, where ``^`` is the
Lorentzian cross product of :mod:`whirl_lab.geometry`. Torsion is read off as
``tau = -g(nabla_T N, B)``.
"""
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import geometry as geo
from .errors import GeodesicPoint, NotUnitSpeed, NullAcceleration, TooFewSamples
from .numerics import MIN_SAMPLES, fd_derivative, uniform_step

SOURCES = ("analytic", "integrated", "sampled")

KAPPA_MIN = 1e-8
UNIT_SPEED_TOL = {"analytic": 1e-6, "integrated": 1e-4, "sampled": 1e-4}


@dataclass
class CurveSeries:
    """Arc-length samples of a curve.

    ``u``, ``du`` and ``ddu`` are the first three coordinate derivatives of
    the position ``p`` with respect to ``s``. Sources that know the tangent
    exactly may also pass its frame components ``T`` and their derivative
    ``dT``; these take precedence over converting ``u`` and ``du``. Missing
    derivatives are filled by :func:`derivative_fill`.
    """
    s: np.ndarray
    p: np.ndarray
    u: Optional[np.ndarray] = None
    du: Optional[np.ndarray] = None
    ddu: Optional[np.ndarray] = None
    source: str = "sampled"
    T: Optional[np.ndarray] = None
    dT: Optional[np.ndarray] = None

    _VECTORS = ("p", "u", "du", "ddu", "T", "dT")

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"unknown source tag {self.source!r}")
        self.s = np.asarray(self.s, dtype=float)
        n = self.s.shape[0]
        for name in self._VECTORS:
            arr = getattr(self, name)
            if arr is None:
                continue
            arr = np.asarray(arr, dtype=float)
            if arr.shape != (n, 3):
                raise ValueError(f"{name} must have shape ({n}, 3), got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")
            setattr(self, name, arr)
        if self.p is None:
            raise ValueError("positions are required")
        self.step = uniform_step(self.s)

    def __len__(self):
        return self.s.shape[0]

    @property
    def has_derivatives(self):
        return ((self.T is not None or self.u is not None)
                and (self.dT is not None or self.du is not None))

    @property
    def tangent(self):
        """Frame components of the velocity."""
        if self.T is not None:
            return self.T
        return geo.coord_to_frame(self.p, self.u)

    @property
    def tangent_derivative(self):
        """``d/ds`` of the frame components of the velocity.

        For this frame the position-dependent terms cancel, so this equals
        the frame conversion of the coordinate acceleration.
        """
        if self.dT is not None:
            return self.dT
        return geo.coord_to_frame(self.p, self.du)

    def slice(self, start, stop):
        kw = {name: None if getattr(self, name) is None else getattr(self, name)[start:stop]
              for name in self._VECTORS}
        return CurveSeries(self.s[start:stop], source=self.source, **kw)


def derivative_fill(series):
    """Fill missing velocity and higher derivatives.

    Exact frame data is converted when present; anything else is obtained
    by fourth-order finite differences. Analytic series pass through.
    """
    if len(series) < MIN_SAMPLES:
        raise TooFewSamples(f"need at least {MIN_SAMPLES} samples, got {len(series)}")
    if series.source == "analytic" or (series.u is not None and series.du is not None
                                       and series.ddu is not None):
        return series
    h = series.step
    u = series.u
    if u is None:
        u = geo.frame_to_coord(series.p, series.T) if series.T is not None \
            else fd_derivative(series.p, h)
    du = series.du
    if du is None:
        du = geo.frame_to_coord(series.p, series.dT) if series.dT is not None \
            else fd_derivative(u, h)
    ddu = series.ddu if series.ddu is not None else fd_derivative(du, h)
    return CurveSeries(series.s, series.p, u, du, ddu, series.source, series.T, series.dT)


@dataclass
class FrenetRecord:
    s: float
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: float
    tau: float
    eps1: int
    eps2: int
    eps3: int


@dataclass
class FrenetFrames:
    """Frenet data on the retained samples of a series.

    ``index`` maps each retained sample back to the series; ``runs`` are
    slices of the retained arrays over which samples are contiguous in the
    series, so finite differences are only taken inside a run.
    """
    s: np.ndarray
    index: np.ndarray
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    eps1: np.ndarray
    eps2: np.ndarray
    eps3: np.ndarray
    step: float
    runs: list
    excluded: dict = field(default_factory=dict)

    def __len__(self):
        return self.s.shape[0]

    def __iter__(self):
        for i in range(len(self)):
            yield FrenetRecord(float(self.s[i]), self.T[i], self.N[i], self.B[i],
                               float(self.kappa[i]), float(self.tau[i]),
                               int(self.eps1[i]), int(self.eps2[i]), int(self.eps3[i]))

    @property
    def eta_T(self):
        return self.T[:, 2]

    @property
    def eta_N(self):
        return self.N[:, 2]

    @property
    def eta_B(self):
        return self.B[:, 2]

    def derivative(self, values):
        """Finite-difference ``d/ds`` of per-sample values, run by run."""
        values = np.asarray(values, dtype=float)
        out = np.empty_like(values)
        for run in self.runs:
            out[run] = fd_derivative(values[run], self.step)
        return out

    def covariant_derivative(self, frame_values):
        """``nabla_T`` of a frame field given by its frame components."""
        return geo.nabla(self.T, frame_values, self.derivative(frame_values))


@dataclass
class ResidualReport:
    name: str
    max_abs: float
    rms: float
    valid_interval: Optional[tuple]
    n_valid: int
    excluded: dict = field(default_factory=dict)

    @classmethod
    def from_values(cls, name, s, values, excluded=None):
        values = np.abs(np.asarray(values, dtype=float))
        s = np.asarray(s, dtype=float)
        excluded = dict(excluded or {})
        if values.size == 0:
            return cls(name, 0.0, 0.0, None, 0, excluded)
        return cls(name, float(np.max(values)), float(np.sqrt(np.mean(values ** 2))),
                   (float(s[0]), float(s[-1])), int(values.size), excluded)

    @property
    def empty(self):
        return self.n_valid == 0

    def passes(self, tol):
        return not self.empty and self.max_abs < tol

    def to_dict(self):
        return {
            "name": self.name,
            "max_abs": self.max_abs,
            "rms": self.rms,
            "valid_interval": list(self.valid_interval) if self.valid_interval else None,
            "n_valid": self.n_valid,
            "excluded": dict(sorted(self.excluded.items())),
        }


def _contiguous_runs(index):
    runs = []
    start = 0
    for k in range(1, len(index) + 1):
        if k == len(index) or index[k] != index[k - 1] + 1:
            runs.append((start, k))
            start = k
    return runs


def frenet_apparatus(series, kappa_min=KAPPA_MIN, unit_tol=None):
    """Compute ``T, N, B, kappa, tau`` and causal signs along ``series``.

    Geodesic samples (vanishing acceleration) are dropped and counted in
    ``excluded``; if every sample is geodesic, :class:`GeodesicPoint` is
    raised. A non-zero null acceleration raises :class:`NullAcceleration`.
    """
    if not series.has_derivatives:
        series = derivative_fill(series)
    if len(series) < MIN_SAMPLES:
        raise TooFewSamples(f"need at least {MIN_SAMPLES} samples, got {len(series)}")
    if unit_tol is None:
        unit_tol = UNIT_SPEED_TOL[series.source]

    T = series.tangent
    eps1 = geo.causal_sign(T)
    if np.any(eps1 == 0):
        raise NotUnitSpeed("tangent is null at some samples")
    defect = np.max(np.abs(geo.metric(T, T) - eps1))
    if defect > unit_tol:
        raise NotUnitSpeed(f"max |g(T,T) - eps1| = {defect:.3e} exceeds {unit_tol:.1e}")

    A = geo.nabla(T, T, series.tangent_derivative)
    geodesic = geo.euclid_norm(A) < kappa_min
    if np.all(geodesic):
        raise GeodesicPoint("acceleration vanishes at every sample")
    eps2 = geo.causal_sign(A)
    null = (eps2 == 0) & ~geodesic
    if np.any(null):
        first = series.s[np.argmax(null)]
        raise NullAcceleration(f"null acceleration at s = {first:.17g}")

    keep = np.flatnonzero(~geodesic)
    excluded = Counter()
    if geodesic.any():
        excluded["geodesic"] = int(geodesic.sum())

    runs = []
    for a, b in _contiguous_runs(keep):
        if b - a < MIN_SAMPLES:
            excluded["short_run"] += b - a
        else:
            runs.append((a, b))
    if not runs:
        raise GeodesicPoint("no run of at least 5 consecutive non-geodesic samples")
    keep = np.concatenate([keep[a:b] for a, b in runs])
    offsets = np.cumsum([0] + [b - a for a, b in runs])
    runs = [slice(int(offsets[i]), int(offsets[i + 1])) for i in range(len(runs))]

    T = T[keep]
    A = A[keep]
    e1 = eps1[keep]
    e2 = eps2[keep]
    e3 = -e1 * e2
    kappa = np.sqrt(np.abs(geo.metric(A, A)))
    N = A / (e2 * kappa)[:, None]
    B = e3[:, None] * geo.lorentz_cross(T, N)

    frames = FrenetFrames(series.s[keep], keep, T, N, B, kappa, np.zeros_like(kappa),
                          e1, e2, e3, series.step, runs, dict(excluded))
    frames.tau = -geo.metric(frames.covariant_derivative(N), B)
    return frames


def _norms(v):
    return geo.euclid_norm(v)


def verify_frenet(series, frames):
    """Residuals of the three Frenet equations with finite-differenced frames."""
    f = frames
    k = f.kappa[:, None]
    t = f.tau[:, None]
    dT = f.covariant_derivative(f.T)
    dN = f.covariant_derivative(f.N)
    dB = f.covariant_derivative(f.B)
    r1 = dT - f.eps2[:, None] * k * f.N
    r2 = dN + f.eps1[:, None] * k * f.T + f.eps3[:, None] * t * f.B
    r3 = dB - f.eps2[:, None] * t * f.N
    return [
        ResidualReport.from_values("frenet_T", f.s, _norms(r1), f.excluded),
        ResidualReport.from_values("frenet_N", f.s, _norms(r2), f.excluded),
        ResidualReport.from_values("frenet_B", f.s, _norms(r3), f.excluded),
    ]


def reeb_identities(series, frames):
    """Residuals of the derivative identities for ``eta(T)``, ``eta(N)``, ``eta(B)``.

    In the Heisenberg model ``h = 0``, so the ``h``-dependent terms are absent.
    """
    f = frames
    eT, eN, eB = f.eta_T, f.eta_N, f.eta_B
    r1 = f.derivative(eT) - f.eps2 * f.kappa * eN
    r2 = f.derivative(eN) + f.eps1 * f.kappa * eT + f.eps3 * (f.tau - 1.0) * eB
    r3 = f.derivative(eB) - f.eps2 * (f.tau - 1.0) * eN
    return [
        ResidualReport.from_values("reeb_eta_T", f.s, r1, f.excluded),
        ResidualReport.from_values("reeb_eta_N", f.s, r2, f.excluded),
        ResidualReport.from_values("reeb_eta_B", f.s, r3, f.excluded),
    ]


def frame_identities(series, frames):
    """Pointwise algebraic checks of the Frenet frame against the structure.

    Covers the Gram matrix, the Reeb decomposition
    ``xi = -eps1 eta(T) T - eps2 eta(N) N - eps3 eta(B) B``, the action of
    ``phi`` on the frame, and ``nabla_T xi = phi T``.
    """
    f = frames
    T, N, B = f.T, f.N, f.B
    e1, e2, e3 = f.eps1, f.eps2, f.eps3
    eT, eN, eB = f.eta_T, f.eta_N, f.eta_B

    gram = np.stack([
        geo.metric(T, T) - e1, geo.metric(N, N) - e2, geo.metric(B, B) - e3,
        geo.metric(T, N), geo.metric(T, B), geo.metric(N, B),
    ], axis=-1)
    xi = -(e1 * eT)[:, None] * T - (e2 * eN)[:, None] * N - (e3 * eB)[:, None] * B
    phi_T = geo.phi(T) - (e2 * e3)[:, None] * (eN[:, None] * B - eB[:, None] * N)
    phi_N = geo.phi(N) - (e1 * e3)[:, None] * (eB[:, None] * T - eT[:, None] * B)
    phi_B = geo.phi(B) - (e1 * e2)[:, None] * (eT[:, None] * N - eN[:, None] * T)
    phi_err = np.maximum(np.maximum(_norms(phi_T), _norms(phi_N)), _norms(phi_B))
    nabla_xi = geo.nabla(T, np.broadcast_to(geo.XI, T.shape), np.zeros_like(T)) - geo.phi(T)
    return [
        ResidualReport.from_values("gram", f.s, np.max(np.abs(gram), axis=-1), f.excluded),
        ResidualReport.from_values("reeb_decomposition", f.s, _norms(xi - geo.XI), f.excluded),
        ResidualReport.from_values("phi_action", f.s, phi_err, f.excluded),
        ResidualReport.from_values("nabla_xi", f.s, _norms(nabla_xi), f.excluded),
    ]
