"""Normal-coordinate curvature laws: the conserved flow, nu, classification."""

import math

import numpy as np
import pytest

from kappaflow import curves
from kappaflow import normal_flow as nf


DELTAS = (0.5, 1.0, 2.0, 4.0, 8.0, 9.0, 20.0)


def test_model_validation():
    with pytest.raises(ValueError):
        nf.normal_model(0.0)
    with pytest.raises(ValueError):
        nf.normal_model(-2.0)


def test_potential_vanishes_at_unit_radius():
    for d in DELTAS:
        m = nf.normal_model(d)
        assert m.G(1.0) == pytest.approx(0.0, abs=1e-14)
        assert m.G1(1.0) == pytest.approx(0.0, abs=1e-14)
        assert m.G2(1.0) == pytest.approx(2.0 * (d + 1.0), rel=1e-14)


def test_potential_derivatives_match_finite_differences():
    h = 1e-6
    for d in (0.5, 1.0, 3.0, 9.0):
        m = nf.normal_model(d)
        for s in (0.4, 0.9, 1.7):
            fd1 = (m.G(s + h) - m.G(s - h)) / (2.0 * h)
            fd2 = (m.G(s + h) - 2.0 * m.G(s) + m.G(s - h)) / (h * h)
            assert m.G1(s) == pytest.approx(fd1, rel=1e-7, abs=1e-7)
            assert m.G2(s) == pytest.approx(fd2, rel=1e-3, abs=1e-3)


def test_upper_potential_limit():
    assert nf.normal_model(0.5).G_upper_limit() == pytest.approx(3.0)
    assert math.isinf(nf.normal_model(1.0).G_upper_limit())
    assert math.isinf(nf.normal_model(4.0).G_upper_limit())


# -- the conserved quantity ---------------------------------------------------


def test_orbit_conserves_energy():
    m = nf.normal_model(2.0)
    tr = nf.psi_flow_orbit(m, 0.4 + 0.0j, 30.0)
    assert tr.hamiltonian_drift <= 1e-9
    assert tr.orientation == 1
    assert tr.period is None


def test_orbit_stays_in_right_half_plane():
    for d, p in ((0.5, 0.2 + 0.5j), (9.0, 0.7 + 0.0j)):
        tr = nf.psi_flow_orbit(nf.normal_model(d), p, 20.0)
        assert np.all(tr.samples.real > 0.0)


def test_unit_radius_point_is_fixed():
    tr = nf.psi_flow_orbit(nf.normal_model(7.0), 1.0 + 0.0j, 5.0)
    assert np.max(np.abs(tr.samples - 1.0)) == 0.0


def test_orbit_rejects_bad_starting_points():
    m = nf.normal_model(0.5)
    with pytest.raises(ValueError, match="positive real part"):
        nf.psi_flow_orbit(m, -0.5 + 0.0j, 1.0)
    with pytest.raises(ValueError, match="invariant region"):
        nf.psi_flow_orbit(m, 0.1 + 2.0j, 1.0)


# -- nu -----------------------------------------------------------------------


def test_nu_limit_at_minimum():
    # quadrature values a hair inside the rim against the closed form
    for d in (0.5, 1.0, 4.0, 9.0, 20.0):
        m = nf.normal_model(d)
        want = 1.0 / math.sqrt(d + 1.0)
        assert nf.nu(m, 1.0 - 1e-4) == pytest.approx(want, abs=2e-3)
        assert nf.nu(m, 1.0 - 5e-3, 1e-10) == pytest.approx(want, abs=2e-3)


def test_nu_limit_at_zero():
    assert nf.nu_limit_at_zero(nf.normal_model(0.5)) == pytest.approx(2.0 / 3.0)
    assert nf.nu_limit_at_zero(nf.normal_model(1.0)) == pytest.approx(0.5)
    assert nf.nu_limit_at_zero(nf.normal_model(9.0)) == pytest.approx(0.5)
    assert nf.nu(nf.normal_model(0.5), 1e-6) == pytest.approx(2.0 / 3.0, abs=1e-3)
    assert nf.nu(nf.normal_model(2.0), 1e-4) == pytest.approx(0.5, abs=1e-4)
    assert nf.nu(nf.normal_model(4.0), 1e-4) == pytest.approx(0.5, abs=1e-6)


def test_nu_second_derivative_at_minimum():
    # (nu(1-h) - nu(1)) / (h^2/2) approaches the closed-form curvature
    h = 5e-3
    for d in (1.0, 6.0):
        m = nf.normal_model(d)
        val, second = nf.nu_limit_at_sg(m)
        assert second == pytest.approx(d * (d - 3.0) / (12.0 * math.sqrt(d + 1.0)))
        est = (nf.nu(m, 1.0 - h, 1e-11) - val) / (0.5 * h * h)
        assert est == pytest.approx(second, rel=5e-2)


def test_nu_constant_for_isochronous_law():
    m = nf.normal_model(3.0)
    grid, vals = nf.nu_profile(m, n=20, tol=1e-10)
    assert grid.shape == vals.shape == (20,)
    assert np.max(np.abs(vals - 0.5)) <= 1e-8


def test_nu_matches_curve_turning_rate():
    # total tangent turning over two half-periods equals 2 pi nu
    for d, s in ((9.0, 0.4), (0.5, 0.3), (2.0, 0.62)):
        m = nf.normal_model(d)
        tr = nf.reconstruct_curve(m, s, n_halfperiods=2, num=6000)
        nu_turn = curves.total_turning_of(tr.points, False) / (2.0 * math.pi)
        assert nf.nu(m, s, 1e-10) == pytest.approx(nu_turn, abs=2e-4)


def test_nu_domain_checks():
    m = nf.normal_model(2.0)
    for bad in (0.0, -0.3, 1.0, 1.4):
        with pytest.raises(ValueError):
            nf.nu(m, bad)
    with pytest.raises(ValueError, match="grid"):
        nf.nu_profile(m, grid=[0.5, 0.4])
    with pytest.raises(ValueError, match="grid"):
        nf.nu_profile(m, grid=[0.5, 1.2])


def test_nu_prime_signs_and_derivative_oracle():
    # increasing below the cubic law, flat at it, decreasing above
    h = 1e-4
    for d in DELTAS:
        m = nf.normal_model(d)
        v = nf.nu_prime(m, 0.3)
        fd = (nf.nu(m, 0.3 + h, 1e-12) - nf.nu(m, 0.3 - h, 1e-12)) / (2.0 * h)
        assert v == pytest.approx(fd, rel=1e-4, abs=1e-7)
        if d < 3.0:
            assert v > 0.0
        else:
            assert v < 0.0
    assert abs(nf.nu_prime(nf.normal_model(3.0), 0.3)) <= 1e-10


def test_nu_prime_identities_agree_where_well_conditioned():
    for d in (0.5, 2.0, 8.0):
        a, b = nf.nu_prime_forms(nf.normal_model(d), 0.55)
        assert abs(a - b) <= 1e-7


# -- curve reconstruction -----------------------------------------------------


def test_unit_circle_is_reproduced_exactly():
    tr = nf.reconstruct_curve(nf.normal_model(7.0), 1.0)
    assert tr.closed and tr.simple and tr.winding_n == 1
    assert np.max(np.abs(np.abs(tr.points) - 1.0)) <= 1e-12
    assert np.max(np.abs(tr.orbit - 1.0)) == 0.0


def test_isochronous_law_curves_are_centered_ellipses():
    m = nf.normal_model(3.0)
    tr = nf.reconstruct_curve(m, 2.0, n_halfperiods=4, num=8000)
    assert tr.closed and tr.simple and tr.winding_n == 1
    assert tr.closure_gap <= 1e-6 * tr.diameter
    assert curves.ellipse_residual(tr) <= 1e-6
    assert np.max(np.abs(tr.points.real)) == pytest.approx(2.0, abs=1e-6)
    assert np.max(np.abs(tr.points.imag)) == pytest.approx(0.5, abs=1e-6)
    assert tr.max_curvature_residual <= 1e-3


def test_curvature_tracks_the_normal_coordinate():
    # levels far below the rim reach huge curvature, so stay near it
    m = nf.normal_model(9.0)
    tr = nf.reconstruct_curve(m, 0.9, n_halfperiods=2, num=6000)
    assert tr.max_curvature_residual <= 1e-4


def test_reconstruct_validation():
    m = nf.normal_model(0.5)
    with pytest.raises(ValueError):
        nf.reconstruct_curve(m, -1.0)
    with pytest.raises(ValueError, match="invariant region"):
        nf.reconstruct_curve(m, 5.0)
    with pytest.raises(ValueError):
        nf.reconstruct_curve(nf.normal_model(2.0), 0.5, n_halfperiods=0)


# -- classification -----------------------------------------------------------


def test_predicted_counts():
    assert nf.predicted_supplement_count(0.5) == 0
    assert nf.predicted_supplement_count(8.0) == 0
    assert nf.predicted_supplement_count(9.0) == 1
    assert nf.predicted_supplement_count(24.0) == 2
    assert nf.predicted_supplement_count(35.0) == 3


def test_classification_below_threshold_has_no_ovals():
    for d in (0.5, 2.0):
        rep = nf.classify_supplement(d)
        assert rep.records == ()
        assert rep.predicted_count == 0
        assert not rep.isochronous


def test_classification_boundary_law_excludes_the_rim_level():
    rep = nf.classify_supplement(8.0)
    assert rep.records == ()
    assert any("boundary" in note for note in rep.notes)


def test_classification_isochronous_descriptor():
    rep = nf.classify_supplement(3.0)
    assert rep.isochronous
    assert rep.records == ()
    assert rep.predicted_count is None
    assert any("ellipse" in note for note in rep.notes)


def test_classification_finds_the_level_radii():
    rep = nf.classify_supplement(9.0)
    assert rep.predicted_count == 1
    assert len(rep.records) == 1
    rec = rep.records[0]
    assert rec.n == 3
    assert 0.0 < rec.s < 1.0
    assert rec.residual <= 1e-10
    m = nf.normal_model(9.0)
    assert nf.nu(m, rec.s, 1e-10) == pytest.approx(1.0 / 3.0, abs=1e-9)

    rep24 = nf.classify_supplement(24.0)
    assert rep24.predicted_count == 2
    assert tuple(r.n for r in rep24.records) == (3, 4)


def test_classification_record_curve_closes():
    rep = nf.classify_supplement(9.0)
    rec = rep.records[0]
    tr = nf.reconstruct_curve(nf.normal_model(9.0), rec.s,
                              n_halfperiods=2 * rec.n, num=12000)
    assert tr.closed and tr.simple and tr.winding_n == 1
    assert tr.closure_gap <= 1e-6 * tr.diameter
    assert tr.max_curvature_residual <= 1e-3


def test_classification_rejects_nonpositive_exponent():
    with pytest.raises(ValueError):
        nf.classify_supplement(0.0)
    with pytest.raises(ValueError):
        nf.classify_supplement(-1.0)
