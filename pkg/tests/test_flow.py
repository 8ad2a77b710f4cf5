"""Tests for the phase flow: invariant, symmetry, periods, fixed points."""

import math

import numpy as np
import pytest

from kappaflow.models import EXAMPLE_IDS, eval_F2, eval_f, example, monomial
from kappaflow import flow


def well_models():
    return [
        example("s"),
        example("3-2/s"),
        monomial(1.0, 4.0),
        monomial(2.0, 0.5),
        monomial(1.0, 9.0),
    ]


def test_vector_field_values():
    m = example("s")
    z = np.array([1.0 + 0.0j, 0.5j, -2.0 + 1.0j])
    v = flow.vector_field(m, z)
    r = np.abs(z)
    expected = 1j * z * r - 1j
    assert np.allclose(v, expected, rtol=0.0, atol=1e-15)


def test_hamiltonian_is_conserved_along_orbits():
    for m in well_models():
        s0 = 0.6 * m.s_f
        tr = flow.integrate_orbit(m, s0, tol=1e-10)
        assert tr.hamiltonian_drift <= 1e-9


def test_orbit_closure_within_tolerance():
    for m in well_models():
        s0 = 0.5 * m.s_f
        tr = flow.integrate_orbit(m, s0, tol=1e-10)
        gap = abs(tr.samples[-1] - tr.samples[0])
        assert gap <= 1e-8 * (1.0 + abs(s0))
        assert tr.period is not None and tr.period > 0.0


def test_conjugation_time_reversal_symmetry():
    # conj(Phi(t, z)) == Phi(-t, conj(z)), 20 random points per model
    rng = np.random.default_rng(20260816)
    for m in well_models():
        for _ in range(20):
            r = rng.uniform(0.4, 1.4) * m.s_f
            phi = rng.uniform(0.0, 2.0 * math.pi)
            z = r * np.exp(1j * phi)
            t = rng.uniform(0.05, 1.5)
            lhs = np.conj(flow.flow_map(m, z, t))
            rhs = flow.flow_map(m, np.conj(z), -t)
            assert abs(lhs - rhs) <= 1e-8 * (1.0 + abs(z))


def test_reversibility_round_trip():
    rng = np.random.default_rng(7)
    for m in well_models():
        for _ in range(5):
            r = rng.uniform(0.5, 1.3) * m.s_f
            z = r * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
            t = rng.uniform(0.1, 1.0)
            back = flow.flow_map(m, flow.flow_map(m, z, t), -t)
            assert abs(back - z) <= 1e-7 * (1.0 + abs(z))


def test_period_through_origin_for_linear_law():
    # f(s) = s: exact value (1/4) sqrt(6) Gamma(1/4)^2 / sqrt(pi)
    m = example("s")
    T = flow.minimal_period(m, 0.0)
    T_exact = 0.25 * math.sqrt(6.0) * math.gamma(0.25) ** 2 / math.sqrt(math.pi)
    assert abs(T - T_exact) <= 1e-8


def test_period_limit_near_center():
    # T -> 2 pi / sqrt(f(s_f) F''(s_f)) as the orbit shrinks onto the center
    for m in (example("s"), example("3-2/s"), monomial(1.0, 4.0)):
        s_f = m.s_f
        lim = 2.0 * math.pi / math.sqrt(
            float(eval_f(m, s_f)) * float(eval_F2(m, s_f)))
        errs = []
        for k in (2, 3, 4):
            T = flow.minimal_period(m, s_f * (1.0 - 10.0 ** -k))
            errs.append(abs(T - lim))
        assert errs[2] <= 1e-5 * lim
        assert errs[1] <= 0.1 * errs[0]
        # the last step rides the solver floor: crossing-time error grows
        # like tol/|F'(s)| as the orbit shrinks onto the center
        assert errs[2] <= max(0.1 * errs[1], 5e-7)


def test_orientation_of_orbits():
    # counterclockwise around the center when f > 0 there
    assert flow.integrate_orbit(example("s"), 0.5).orientation == 1
    assert flow.integrate_orbit(monomial(1.0, 4.0), 0.7).orientation == 1
    # orbit of 3-2/s around the origin is clockwise
    assert flow.integrate_orbit(example("3-2/s"), 0.05).orientation == -1
    # and around its center at 1, counterclockwise
    assert flow.integrate_orbit(example("3-2/s"), 0.9).orientation == 1


def test_fixed_points_table():
    cases = {
        "s": [(1.0, "center", 2.0)],
        "1/s^2": [(1.0, "saddle", -1.0)],
        "3-2/s": [(-1.0 / 3.0, "saddle", -1.0), (1.0, "center", 3.0)],
        "(1+3s^4)/(s+3s^3)": [(1.0, "center", 1.5)],
        "1/(1+s)": [],
        "e^{-s}/s": [],
        "1/(s+s^3)": [],
        "(s+2)/s^2": [],
        "(s^2+2)/s^3": [],
    }
    for ex_id, expected in cases.items():
        pts = flow.fixed_points(example(ex_id))
        assert len(pts) == len(expected), ex_id
        for p, (z, kind, d2) in zip(pts, expected):
            assert abs(p.z - z) <= 1e-10
            assert p.kind == kind
            assert abs(p.second_derivative - d2) <= 1e-9


def test_fixed_points_monomial():
    pts = flow.fixed_points(monomial(16.0, 3.0))
    assert len(pts) == 1 and abs(pts[0].z - 0.5) <= 1e-12
    assert pts[0].kind == "center"
    pts = flow.fixed_points(monomial(1.0, -2.5))
    assert len(pts) == 1 and pts[0].kind == "saddle"
    assert abs(pts[0].second_derivative + 1.5) <= 1e-12


def test_fixed_points_continuum_raises():
    with pytest.raises(ValueError):
        flow.fixed_points(example("1/s"))


def test_origin_and_infinity_types():
    assert flow.origin_type(example("3-2/s")) == "center"
    assert flow.origin_type(example("1/s^2")) == "center"
    assert flow.origin_type(example("s")) == "not_center"
    assert flow.origin_type(example("1/s")) == "undetermined"
    assert flow.origin_type(example("e^{-s}/s")) == "undetermined"
    assert flow.infinity_type(example("s")) == "center"
    assert flow.infinity_type(example("1/(1+s)")) == "undetermined"
    assert flow.infinity_type(example("1/s^2")) == "not_center"


def test_polar_chart_small_orbit():
    # tiny orbit of an origin-singular law: integrated in the polar chart
    m = example("1/s^2")
    rho = 5e-7
    T = flow.minimal_period(m, rho)
    assert abs(T - 2.0 * math.pi * rho ** 2) <= 1e-3 * T
    tr = flow.integrate_orbit(m, rho, duration=3.0 * T, tol=1e-10)
    assert tr.hamiltonian_drift * 3.0 * T <= 1e-9
    assert np.min(np.abs(tr.samples)) > 0.0


def test_scalar_f_matches_registry():
    s = np.geomspace(0.05, 20.0, 37)
    for ex_id in EXAMPLE_IDS:
        m = example(ex_id)
        fast = flow._scalar_f(m)
        ref = eval_f(m, s)
        got = np.array([fast(float(u)) for u in s])
        assert np.allclose(got, ref, rtol=1e-14, atol=0.0), ex_id


def test_portrait_lines_lie_on_levels():
    m = example("3-2/s")
    lines = flow.portrait_samples(m, grid=300)
    assert lines
    spread = [ln.level for ln in lines]
    assert len(set(spread)) > 3
    for ln in lines[::5]:
        pts = ln.points
        r = np.abs(pts)
        ok = r > 1e-6
        H = flow.hamiltonian(m, pts[ok])
        scale = 1.0 + abs(ln.level)
        assert np.max(np.abs(H - ln.level)) <= 5e-2 * scale


def test_backward_duration_orbit():
    m = example("s")
    tr = flow.integrate_orbit(m, 0.5, duration=-1.0)
    assert tr.times[-1] == -1.0
    # backward samples match the conjugated forward orbit of conj(z0)
    fw = flow.integrate_orbit(m, 0.5, duration=1.0)
    assert np.allclose(np.conj(fw.samples), tr.samples, atol=1e-8)
