"""End-to-end acceptance checks with pinned tolerances and budgets.

Each test covers one numbered criterion and prints a single summary
line, so a verbose run doubles as a checklist. Tolerances are fixed
here on purpose; loosening them is a behavior change, not a tweak.
"""

from __future__ import annotations

import math
import time

import numpy as np

from kappaflow import classification, curves, flow, normal_flow, positivity, winding
from kappaflow.models import example, monomial

# non-circular record counts per exponent: ceil(sqrt(delta+1)) - 2 above 3
EXPECTED_COUNTS = {2: 0, 3: 0, 4: 1, 8: 1, 9: 2, 15: 2, 24: 3, 35: 4}

OVAL_S4 = 0.4819
ROOT9_N2 = 0.1955
ROOT9_N3 = 0.8477
ROOT_TOL = 5e-4


def _announce(capsys, line: str) -> None:
    with capsys.disabled():
        print(line)


def test_criterion_1_monomial_record_counts(capsys):
    t0 = time.monotonic()
    for delta, want in EXPECTED_COUNTS.items():
        report = classification.classify_monomial(1.0, float(delta))
        assert report.predicted_count == want
        assert len(report.jordan_set_Of) == want
    elapsed = time.monotonic() - t0
    assert elapsed < 60.0
    _announce(capsys, "CRITERION 1: PASS - record counts exact for delta in "
                      f"{sorted(EXPECTED_COUNTS)} ({elapsed:.2f}s)")


def test_criterion_2_known_roots(capsys):
    rep4 = classification.classify_monomial(1.0, 4.0)
    assert len(rep4.jordan_set_Of) == 1
    rec4 = rep4.jordan_set_Of[0]
    assert rec4.n == 2
    assert abs(rec4.s - OVAL_S4) <= ROOT_TOL

    rep9 = classification.classify_monomial(1.0, 9.0)
    by_n = {rec.n: rec for rec in rep9.jordan_set_Of}
    assert sorted(by_n) == [2, 3]
    assert abs(by_n[2].s - ROOT9_N2) <= ROOT_TOL
    assert abs(by_n[3].s - ROOT9_N3) <= ROOT_TOL
    _announce(capsys, "CRITERION 2: PASS - delta=4 root "
                      f"{rec4.s:.5f} (n=2); delta=9 roots {by_n[2].s:.5f} (n=2), "
                      f"{by_n[3].s:.5f} (n=3)")


def test_criterion_3_boundary_limits(capsys):
    worst = 0.0
    for delta in (0.5, 1.0, 4.0, 9.0):
        model = monomial(1.0, delta)
        near_sf = winding.omega_quadrature(model, 1.0 - 1e-4)
        near_zero = winding.omega_quadrature(model, 1e-4)
        err_sf = abs(near_sf - 1.0 / math.sqrt(delta + 1.0))
        err_zero = abs(near_zero - (0.5 + 0.5 / (delta + 1.0)))
        assert err_sf <= 2e-3
        assert err_zero <= 2e-3
        worst = max(worst, err_sf, err_zero)
    _announce(capsys, "CRITERION 3: PASS - boundary winding limits for "
                      f"delta in (0.5, 1, 4, 9), worst deviation {worst:.2e}")


def test_criterion_4_quadrature_vs_ode(capsys):
    t0 = time.monotonic()
    models = [monomial(1.0, d) for d in (0.5, 1.0, 4.0, 9.0)] + [example("s")]
    worst = 0.0
    for model in models:
        grid = np.linspace(0.05, 0.95, 25) * model.s_f
        quad = winding.winding_profile(model, grid=grid, method="quadrature")
        ode = winding.winding_profile(model, grid=grid, method="ode_oracle")
        worst = max(worst, float(np.max(np.abs(quad.omega - ode.omega))))
    elapsed = time.monotonic() - t0
    assert worst <= 1e-5
    assert elapsed < 120.0
    _announce(capsys, "CRITERION 4: PASS - quadrature and ODE winding agree to "
                      f"{worst:.2e} on 25-point grids for 5 models ({elapsed:.1f}s)")


def test_criterion_5_example_regressions(capsys):
    linear = example("s")
    period = flow.minimal_period(linear, 0.0)
    assert abs(period - 4.541) <= 1e-3
    omega0 = winding.omega_quadrature(linear, 1e-5)
    assert abs(omega0 - 0.75) <= 1e-4

    affine = example("3-2/s")
    near_sf = winding.omega_quadrature(affine, 1.0 - 1e-4)
    assert abs(near_sf - math.sqrt(3.0) / 3.0) <= 2e-3
    # orbits near the origin wind around it, so only the ODE route applies
    near_zero = winding.omega_ode(affine, 3e-4)
    assert abs(near_zero - 2.0 * math.sqrt(3.0) / 3.0) <= 2e-3
    _announce(capsys, f"CRITERION 5: PASS - f=s period {period:.6f}, "
                      f"0-orbit winding {omega0:.6f}; f=3-2/s limits "
                      f"{near_sf:.6f} and {near_zero:.6f}")


def test_criterion_6_curve_fidelity(capsys):
    oval = curves.reconstruct(monomial(1.0, 4.0), 0.48197132279240085,
                              n_halfperiods=4, num=10000)
    assert oval.closed
    assert oval.closure_gap <= 1e-6 * oval.diameter
    assert oval.simple
    assert oval.max_curvature_residual <= 1e-4
    oval_ellipse = curves.ellipse_residual(oval)
    assert oval_ellipse > 1e-3

    # winding 1 closes the circle after two half-periods, not four
    circle = curves.reconstruct(monomial(1.0, 1.0), 1.0, n_halfperiods=2, num=10000)
    assert circle.closed
    assert circle.closure_gap <= 1e-6 * circle.diameter
    assert circle.simple
    assert circle.max_curvature_residual <= 1e-6
    assert curves.ellipse_residual(circle) <= 1e-6
    _announce(capsys, "CRITERION 6: PASS - delta=4 oval closes, is simple, tracks "
                      f"curvature to {oval.max_curvature_residual:.2e}, ellipse "
                      f"residual {oval_ellipse:.2e}; unit-circle control clean")


def test_criterion_7_positivity_certificates(capsys):
    t0 = time.monotonic()
    first = positivity.certify_positive_coeffs("p", range(0, 13))
    second = positivity.certify_positive_coeffs("q", range(0, 44))
    assert first.passed and second.passed

    cert = positivity.certificate("all")
    by_name = {}
    for check in cert["checks"]:
        by_name.setdefault(check["name"], []).append(check["passed"])
    for name in ("p0_printed_form", "p1_printed_form", "q1_printed_form"):
        assert by_name[name] == [True]

    assert positivity.grid_positivity_p()
    assert positivity.check_p51(np.linspace(0.01, 10.0, 1000))
    elapsed = time.monotonic() - t0
    assert elapsed < 300.0
    _announce(capsys, "CRITERION 7: PASS - integer coefficient positivity, printed "
                      f"expansions, grid and one-variable bounds ({elapsed:.1f}s)")


def test_criterion_8_supplement(capsys):
    iso = normal_flow.normal_model(3.0)
    _, nus = normal_flow.nu_profile(iso, n=20)
    iso_dev = float(np.max(np.abs(nus - 0.5)))
    assert iso_dev <= 1e-8

    for delta in (0.5, 1.0, 2.0, 4.0, 8.0, 20.0):
        model = normal_flow.normal_model(delta)
        for s in (0.3, 0.5, 0.7):
            slope = normal_flow.nu_prime(model, s)
            if delta < 3.0:
                assert slope > 0.0
            else:
                assert slope < 0.0

    rep8 = normal_flow.classify_supplement(8.0)
    rep9 = normal_flow.classify_supplement(9.0)
    assert len(rep8.records) == 0
    assert len(rep9.records) == 1
    assert rep9.records[0].n == 3
    _announce(capsys, f"CRITERION 8: PASS - isochronous profile flat to {iso_dev:.1e}, "
                      "slope signs match 3 - delta, record counts 0 (delta=8) "
                      "and 1 (delta=9)")


def test_criterion_9_gamma_inequalities(capsys):
    assert positivity.check_gautschi(np.geomspace(1e-3, 1e4, 1000))
    assert positivity.check_binomial_ineq(np.linspace(0.05, 50.0, 40),
                                          np.linspace(0.05, 50.0, 25))
    _announce(capsys, "CRITERION 9: PASS - gamma-ratio and binomial-tail "
                      "inequalities hold on 1000-point grids")


def test_criterion_10_property_suites(capsys):
    rng = np.random.default_rng(20260816)
    counts = {"conservation": 0, "symmetry": 0, "window": 0, "turning": 0}
    for trial in range(100):
        decreasing = trial % 5 == 4
        if decreasing:
            delta = float(rng.uniform(-0.8, -0.2))
        else:
            delta = float(rng.uniform(0.2, 6.0))
        a = float(rng.uniform(0.5, 2.0))
        model = monomial(a, delta)
        s_f = model.s_f

        z0 = complex(s_f * float(rng.uniform(0.15, 0.85)), 0.0)
        t = float(rng.uniform(0.3, 3.0))
        z1 = flow.flow_map(model, z0, t)
        h0 = float(flow.hamiltonian(model, z0))
        h1 = float(flow.hamiltonian(model, z1))
        assert abs(h1 - h0) <= 1e-8 * (1.0 + abs(h0))
        counts["conservation"] += 1

        w = complex(s_f * float(rng.uniform(0.2, 0.9)),
                    s_f * float(rng.uniform(-0.35, 0.35)))
        lhs = complex(np.conj(flow.flow_map(model, w, t)))
        rhs = complex(flow.flow_map(model, w.conjugate(), -t))
        assert abs(lhs - rhs) <= 1e-7 * (1.0 + abs(w))
        counts["symmetry"] += 1

        s = s_f * float(rng.uniform(0.15, 0.9))
        if decreasing:
            # near-origin orbits of decreasing laws enclose the origin
            omega = winding.omega_ode(model, s)
            assert omega > 1.0
        else:
            omega = winding.omega_quadrature(model, s)
            assert 0.0 < omega < 1.0
        counts["window"] += 1

        if not decreasing:
            trace = curves.reconstruct(model, s, n_halfperiods=1, num=600)
            turning = curves.total_turning_of(trace.points, False) / math.pi
            assert turning > 0.0
            assert abs(turning - omega) <= 1e-2
            counts["turning"] += 1

    assert counts["conservation"] == counts["symmetry"] == counts["window"] == 100
    assert counts["turning"] == 80
    _announce(capsys, "CRITERION 10: PASS - 100 seeded trials: invariant "
                      "conservation, conjugation symmetry, winding windows, "
                      "turning checks")
