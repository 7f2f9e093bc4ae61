import numpy as np
import pytest

from whirl_lab import geometry as geo
from whirl_lab.constructor import example_legendre_helix, example_non_legendre
from whirl_lab.errors import GeodesicPoint, NotUnitSpeed, TooFewSamples
from whirl_lab.frames import (CurveSeries, ResidualReport, derivative_fill, frame_identities,
                              frenet_apparatus, reeb_identities, verify_frenet)


def torsion_oracle(s, branch):
    e = np.exp(s)
    return 1.0 + branch * 2.0 * e / np.sqrt(1.0 + 2.0 * e * e)


def test_helix_frenet_values():
    series = example_legendre_helix()
    f = frenet_apparatus(series)
    assert np.max(np.abs(f.kappa - 1)) < 1e-12
    assert np.max(np.abs(f.tau - 1)) < 1e-9
    # T, N horizontal and B along the Reeb field.
    np.testing.assert_allclose(np.abs(f.B[:, 2]), 1.0, atol=1e-12)
    assert set(f.eps1) == {1} and set(f.eps2) == {1} and set(f.eps3) == {-1}


def test_frame_orthonormality_and_orientation():
    series = example_non_legendre(step=1e-3)
    f = frenet_apparatus(series)
    for rec in list(f)[::100]:
        assert geo.metric(rec.T, rec.T) == pytest.approx(rec.eps1)
        assert geo.metric(rec.N, rec.N) == pytest.approx(rec.eps2)
        assert geo.metric(rec.B, rec.B) == pytest.approx(rec.eps3)
        assert abs(geo.metric(rec.T, rec.N)) < 1e-12
        assert abs(geo.metric(rec.N, rec.B)) < 1e-12
        assert rec.eps1 * rec.eps2 == -rec.eps3
        np.testing.assert_allclose(geo.lorentz_cross(rec.T, rec.N), rec.eps3 * rec.B, atol=1e-12)


@pytest.mark.parametrize("branch", [1, -1])
def test_constructed_torsion_matches_closed_form(branch):
    series = example_non_legendre(step=1e-3, branch=branch)
    f = frenet_apparatus(series)
    np.testing.assert_allclose(f.tau, torsion_oracle(f.s, branch), atol=1e-8)
    np.testing.assert_allclose(f.kappa, 1.0, atol=1e-12)


def test_positions_only_series_uses_differences():
    exact = example_non_legendre(step=1e-3)
    sampled = CurveSeries(exact.s, exact.p, source="sampled")
    filled = derivative_fill(sampled)
    assert filled.u is not None and filled.ddu is not None
    f = frenet_apparatus(sampled)
    assert np.max(np.abs(f.kappa - 1.0)) < 1e-5
    err = np.abs(f.tau - torsion_oracle(f.s, 1))
    # Torsion stacks four differences; one-sided stencils dominate at the ends.
    assert np.max(err[12:-12]) < 1e-5
    assert np.max(err) < 1e-2


def test_residual_reports_small():
    series = example_non_legendre(step=1e-3)
    f = frenet_apparatus(series)
    for rep in verify_frenet(series, f) + reeb_identities(series, f) + frame_identities(series, f):
        assert rep.max_abs < 1e-6, rep.name
        assert rep.n_valid == len(f)


def _line(n=20):
    s = np.linspace(0, 1, n)
    p = np.stack([s, 0 * s, 0 * s], axis=-1)
    u = np.tile([1.0, 0, 0], (n, 1))
    return CurveSeries(s, p, u, np.zeros((n, 3)), np.zeros((n, 3)), "analytic")


def test_geodesic_line_raises():
    with pytest.raises(GeodesicPoint):
        frenet_apparatus(_line())


def test_geodesic_samples_excluded():
    helix = example_legendre_helix(step=1e-2)
    line = _line(len(helix))
    mask = np.zeros(len(helix), dtype=bool)
    mask[100:140] = True
    T = np.where(mask[:, None], line.u, helix.tangent)
    dT = np.where(mask[:, None], 0.0, helix.tangent_derivative)
    s = CurveSeries(helix.s, helix.p, None, None, None, "analytic", T, dT)
    f = frenet_apparatus(s)
    assert f.excluded == {"geodesic": 40}
    assert len(f.runs) == 2 and len(f) == len(helix) - 40


def test_short_runs_excluded():
    helix = example_legendre_helix(step=1e-2)
    mask = np.zeros(len(helix), dtype=bool)
    mask[100:140] = True
    mask[143:200] = True  # leaves a 3-sample island
    T = np.where(mask[:, None], [1.0, 0, 0], helix.tangent)
    dT = np.where(mask[:, None], 0.0, helix.tangent_derivative)
    f = frenet_apparatus(CurveSeries(helix.s, helix.p, None, None, None, "analytic", T, dT))
    assert f.excluded["short_run"] == 3


def test_too_few_samples():
    helix = example_legendre_helix(step=1e-2)
    with pytest.raises(TooFewSamples):
        frenet_apparatus(helix.slice(0, 4))
    with pytest.raises(TooFewSamples):
        frenet_apparatus(CurveSeries(helix.s[:3], helix.p[:3]))


def test_not_unit_speed():
    helix = example_legendre_helix(step=1e-2)
    bad = CurveSeries(helix.s, helix.p, 2 * helix.u, helix.du, helix.ddu, "analytic",
                      2 * helix.T, helix.dT)
    with pytest.raises(NotUnitSpeed):
        frenet_apparatus(bad)


def test_series_validation():
    with pytest.raises(ValueError):
        CurveSeries(np.arange(5.0), np.zeros((4, 3)))
    with pytest.raises(ValueError):
        CurveSeries(np.arange(5.0), np.full((5, 3), np.nan))
    with pytest.raises(ValueError):
        CurveSeries(np.arange(5.0), np.zeros((5, 3)), source="measured")


def test_residual_report_empty():
    rep = ResidualReport.from_values("r", [], [])
    assert rep.empty and not rep.passes(1.0) and rep.valid_interval is None


def test_derivative_fill_on_sampled_circle():
    s = np.arange(0, 1.0 + 5e-4, 1e-3)
    p = np.stack([np.cos(s), np.sin(s), 0 * s], axis=-1)
    filled = derivative_fill(CurveSeries(s, p))
    np.testing.assert_allclose(filled.u, np.stack([-np.sin(s), np.cos(s), 0 * s], axis=-1),
                               atol=1e-9)
