"""Lorentzian Heisenberg group with its standard Sasakian structure.

Tangent vectors are stored by their components against the left-invariant
orthonormal frame ``{X, Y, xi}`` of signature ``(+, +, -)``::

    X = d/dx - y d/dz,   Y = d/dy + x d/dz,   xi = d/dz

Frame components are point independent, so only the conversion to and from
coordinate components needs a base point. Every function accepts arrays with
a trailing axis of length 3 and broadcasts over the leading axes.
"""
import numpy as np

XI = np.array([0.0, 0.0, 1.0])
E_X = np.array([1.0, 0.0, 0.0])
E_Y = np.array([0.0, 1.0, 0.0])
FRAME = (E_X, E_Y, XI)

SIGNATURE = np.array([1.0, 1.0, -1.0])

# Scale-aware null detection: |g(u,u)| < NULL_TOL * (|u|_euclid^2 + 1).
NULL_TOL = 1e-9


def _split(v):
    v = np.asarray(v, dtype=float)
    return v[..., 0], v[..., 1], v[..., 2]


def coord_to_frame(p, u):
    """Convert coordinate components ``(dx, dy, dz)`` at ``p`` to frame components.

    The third component is the Reeb component ``eta(u) = dz + y dx - x dy``.
    """
    x, y, _ = _split(p)
    dx, dy, dz = _split(u)
    return np.stack([dx, dy, dz + y * dx - x * dy], axis=-1)


def frame_to_coord(p, v):
    """Inverse of :func:`coord_to_frame`."""
    x, y, _ = _split(p)
    a, b, c = _split(v)
    return np.stack([a, b, c - y * a + x * b], axis=-1)


def reeb_component(p, u):
    """``eta`` applied to a coordinate vector: ``dz + y dx - x dy``."""
    x, y, _ = _split(p)
    dx, dy, dz = _split(u)
    return dz + y * dx - x * dy


def metric(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1] - u[..., 2] * v[..., 2]


def coord_metric(p, u, w):
    """The metric ``dx^2 + dy^2 - eta^2`` evaluated on coordinate vectors."""
    x, y, _ = _split(p)
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    eta_u = u[..., 2] + y * u[..., 0] - x * u[..., 1]
    eta_w = w[..., 2] + y * w[..., 0] - x * w[..., 1]
    return u[..., 0] * w[..., 0] + u[..., 1] * w[..., 1] - eta_u * eta_w


def eta(v):
    return np.asarray(v, dtype=float)[..., 2]


def phi(v):
    """Structure tensor: ``X -> Y``, ``Y -> -X``, ``xi -> 0``."""
    a, b, _ = _split(v)
    return np.stack([-b, a, np.zeros_like(a)], axis=-1)


def connection_term(u, w):
    """Bilinear part of ``nabla_u w`` for constant frame components.

    Built from the frame table ``nabla_X Y = xi``, ``nabla_Y X = -xi``,
    ``nabla_X xi = Y``, ``nabla_Y xi = -X``, ``nabla_xi X = Y``,
    ``nabla_xi Y = -X``; every other pair vanishes.
    """
    u1, u2, u3 = _split(u)
    w1, w2, w3 = _split(w)
    cx = -u2 * w3 - u3 * w2
    cy = u1 * w3 + u3 * w1
    cz = u1 * w2 - u2 * w1
    return np.stack([cx, cy, cz], axis=-1)


def nabla(u, w, dw):
    """Covariant derivative of a field with value ``w`` along ``u``.

    ``dw`` is the ordinary derivative of the frame components of the field
    in the direction ``u``.
    """
    return np.asarray(dw, dtype=float) + connection_term(u, w)


def lorentz_cross(u, v):
    """Lorentzian vector product ``g(u, phi v) xi - eta(v) phi u + eta(u) phi v``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    g_u_phiv = metric(u, phi(v))
    return (g_u_phiv[..., None] * XI
            - eta(v)[..., None] * phi(u)
            + eta(u)[..., None] * phi(v))


def causal_sign(u, tol=NULL_TOL):
    """Causal character of ``u``: +1 spacelike, -1 timelike, 0 null."""
    u = np.asarray(u, dtype=float)
    g = metric(u, u)
    scale = np.sum(u * u, axis=-1) + 1.0
    sign = np.where(g > 0, 1, -1)
    return np.where(np.abs(g) < tol * scale, 0, sign).astype(int)


def euclid_norm(v):
    return np.linalg.norm(np.asarray(v, dtype=float), axis=-1)
