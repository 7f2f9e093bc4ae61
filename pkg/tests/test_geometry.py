"""Frame geometry against a Christoffel-symbol oracle built from the coordinate metric."""
import itertools

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from whirl_lab import geometry as geo

x, y, z = sp.symbols("x y z", real=True)
COORDS = (x, y, z)
# dx^2 + dy^2 - (dz + y dx - x dy)^2
theta = sp.Matrix([y, -x, 1])
G = sp.diag(1, 1, 0) - theta * theta.T
GINV = G.inv()
CHRIS = [[[sp.simplify(sum(GINV[k, m] * (sp.diff(G[m, i], COORDS[j]) + sp.diff(G[m, j], COORDS[i])
                                          - sp.diff(G[i, j], COORDS[m])) for m in range(3)) / 2)
           for j in range(3)] for i in range(3)] for k in range(3)]
# Frame fields as coordinate vector fields.
FIELDS = [sp.Matrix([1, 0, -y]), sp.Matrix([0, 1, x]), sp.Matrix([0, 0, 1])]
TO_FRAME = sp.Matrix([[1, 0, 0], [0, 1, 0], [y, -x, 1]])


def covariant(U, W):
    return sp.Matrix([sum(U[i] * sp.diff(W[k], COORDS[i]) for i in range(3))
                      + sum(CHRIS[k][i][j] * U[i] * W[j] for i in range(3) for j in range(3))
                      for k in range(3)])


def test_connection_table_matches_christoffel():
    for i, j in itertools.product(range(3), repeat=2):
        oracle = sp.simplify(TO_FRAME * covariant(FIELDS[i], FIELDS[j]))
        got = geo.connection_term(geo.FRAME[i], geo.FRAME[j])
        assert [float(c) for c in oracle] == pytest.approx(list(got), abs=1e-15)


def test_frame_is_orthonormal_with_signature():
    for i, j in itertools.product(range(3), repeat=2):
        oracle = sp.simplify((FIELDS[i].T * G * FIELDS[j])[0])
        assert float(oracle) == geo.metric(geo.FRAME[i], geo.FRAME[j])
        assert float(oracle) == (geo.SIGNATURE[i] if i == j else 0.0)


def test_coord_metric_matches_symbolic(rng):
    f = sp.lambdify(COORDS, G, "numpy")
    for _ in range(20):
        p, u, w = rng.standard_normal((3, 3))
        assert geo.coord_metric(p, u, w) == pytest.approx(u @ np.array(f(*p), float) @ w, rel=1e-12)


def test_reeb_and_phi_basics():
    assert geo.eta(geo.XI) == 1.0
    assert geo.metric(geo.XI, geo.XI) == -1.0
    np.testing.assert_array_equal(geo.phi(geo.E_X), geo.E_Y)
    np.testing.assert_array_equal(geo.phi(geo.E_Y), -geo.E_X)
    np.testing.assert_array_equal(geo.phi(geo.XI), np.zeros(3))


def test_reeb_component_equals_frame_third(rng):
    p, u = rng.standard_normal((2, 3))
    assert geo.reeb_component(p, u) == pytest.approx(geo.coord_to_frame(p, u)[2])


def test_causal_sign():
    assert geo.causal_sign(geo.E_X) == 1
    assert geo.causal_sign(geo.XI) == -1
    assert geo.causal_sign(np.array([1.0, 0.0, 1.0])) == 0
    np.testing.assert_array_equal(geo.causal_sign(np.array([[0, 2.0, 1], [0, 1.0, 2]])), [1, -1])


vec = arrays(np.float64, 3, elements=st.floats(-1e3, 1e3))


@settings(max_examples=200, deadline=None)
@given(vec, vec, vec)
def test_cross_product_properties(u, v, w):
    scale = (1 + np.linalg.norm(u)) * (1 + np.linalg.norm(v)) * (1 + np.linalg.norm(w))
    c = geo.lorentz_cross(u, v)
    np.testing.assert_allclose(c, -geo.lorentz_cross(v, u), atol=1e-12 * scale)
    assert abs(geo.metric(c, u)) <= 1e-12 * scale * (1 + np.linalg.norm(u))
    assert abs(geo.metric(c, v)) <= 1e-12 * scale * (1 + np.linalg.norm(v))
    np.testing.assert_allclose(geo.lorentz_cross(u + w, v), c + geo.lorentz_cross(w, v),
                               atol=1e-12 * scale)


@settings(max_examples=200, deadline=None)
@given(vec, vec, vec)
def test_metric_compatibility_and_torsion(u, v, w):
    scale = (1 + np.linalg.norm(u)) * (1 + np.linalg.norm(v)) * (1 + np.linalg.norm(w))
    lhs = geo.metric(geo.connection_term(u, v), w) + geo.metric(v, geo.connection_term(u, w))
    assert abs(lhs) <= 1e-12 * scale
    torsion = geo.connection_term(u, v) - geo.connection_term(v, u)
    np.testing.assert_allclose(torsion, [0, 0, 2 * (u[0] * v[1] - u[1] * v[0])], atol=1e-12 * scale)


@settings(max_examples=200, deadline=None)
@given(vec, vec)
def test_phi_identities(u, v):
    scale = (1 + np.linalg.norm(u)) * (1 + np.linalg.norm(v))
    np.testing.assert_allclose(geo.phi(geo.phi(u)), -u + geo.eta(u) * geo.XI, atol=1e-12 * scale)
    assert geo.metric(geo.phi(u), geo.phi(v)) == pytest.approx(
        geo.metric(u, v) + geo.eta(u) * geo.eta(v), abs=1e-12 * scale ** 2)


@settings(max_examples=100, deadline=None)
@given(vec, vec)
def test_coordinate_round_trip(p, u):
    back = geo.frame_to_coord(p, geo.coord_to_frame(p, u))
    np.testing.assert_allclose(back, u, atol=1e-12 * (1 + np.linalg.norm(p)) * (1 + np.linalg.norm(u)))


def test_vectorized_shapes(rng):
    u, v = rng.standard_normal((2, 7, 3))
    assert geo.metric(u, v).shape == (7,)
    assert geo.lorentz_cross(u, v).shape == (7, 3)
    assert geo.nabla(u, v, np.zeros_like(v)).shape == (7, 3)
