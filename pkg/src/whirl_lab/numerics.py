"""Uniform-grid finite differences and a fixed-step classical Runge-Kutta loop."""
import numpy as np

from .errors import TooFewSamples

MIN_SAMPLES = 5

_INTERIOR = np.array([1.0, -8.0, 0.0, 8.0, -1.0])
_EDGE0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0])
_EDGE1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0])


def fd_derivative(values, h):
    """Fourth-order derivative of samples on a uniform grid along axis 0.

    Central five-point stencil in the interior, one-sided five-point stencils
    on the two outermost samples at each end, so the whole array carries
    O(h^4) truncation error.
    """
    f = np.asarray(values, dtype=float)
    n = f.shape[0]
    if n < MIN_SAMPLES:
        raise TooFewSamples(f"need at least {MIN_SAMPLES} samples, got {n}")
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    head = f[:5]
    tail = f[-5:][::-1]
    out[0] = np.tensordot(_EDGE0, head, axes=1) / (12.0 * h)
    out[1] = np.tensordot(_EDGE1, head, axes=1) / (12.0 * h)
    out[-1] = -np.tensordot(_EDGE0, tail, axes=1) / (12.0 * h)
    out[-2] = -np.tensordot(_EDGE1, tail, axes=1) / (12.0 * h)
    return out


def uniform_step(s, rtol=1e-9):
    """Return the common spacing of ``s`` or raise ``ValueError``."""
    s = np.asarray(s, dtype=float)
    if s.ndim != 1 or s.size < 2:
        raise ValueError("arc-length grid must be one-dimensional with >= 2 samples")
    d = np.diff(s)
    h = (s[-1] - s[0]) / (s.size - 1)
    if h <= 0 or np.max(np.abs(d - h)) > rtol * max(abs(h), 1.0) * max(1.0, np.max(np.abs(s))):
        raise ValueError("arc-length grid must be strictly increasing with uniform step")
    return h


def rk4(rhs, y0, s0, h, n):
    """Integrate ``y' = rhs(s, y)`` with ``n`` classical RK4 steps of size ``h``.

    The state is a short sequence of floats and ``rhs`` returns a sequence of
    the same length; the loop runs on plain floats, which is much faster than
    numpy for low-dimensional systems. Returns an ``(n + 1, dim)`` array.
    """
    y = [float(c) for c in np.atleast_1d(y0)]
    dim = len(y)
    out = np.empty((n + 1, dim))
    out[0] = y
    half = 0.5 * h
    sixth = h / 6.0
    rng = range(dim)
    for i in range(n):
        s = s0 + i * h
        k1 = rhs(s, y)
        k2 = rhs(s + half, [y[j] + half * k1[j] for j in rng])
        k3 = rhs(s + half, [y[j] + half * k2[j] for j in rng])
        k4 = rhs(s + h, [y[j] + h * k3[j] for j in rng])
        y = [y[j] + sixth * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) for j in rng]
        out[i + 1] = y
    return out


def grid(s_start, s_end, step):
    """Uniform grid from ``s_start`` with spacing ``step`` not exceeding ``s_end``."""
    if step <= 0:
        raise ValueError("step must be positive")
    if not s_end > s_start:
        raise ValueError("s_range must be non-degenerate")
    n = int(np.floor((s_end - s_start) / step + 1e-9))
    return s_start + step * np.arange(n + 1)
