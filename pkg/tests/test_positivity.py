"""Exact certificates: exponential-sum signs, Taylor positivity,
polynomial and classical inequalities."""

import math
from fractions import Fraction

import numpy as np
import pytest

from kappaflow import positivity as pos


def test_exp_polynomial_validation():
    with pytest.raises(ValueError, match="zero coefficient"):
        pos.ExpPolynomial(((Fraction(0), Fraction(2)),))
    with pytest.raises(ValueError, match="decreasing"):
        pos.ExpPolynomial(((Fraction(1), Fraction(1)),
                           (Fraction(2), Fraction(3))))
    g = pos.exp_polynomial([(1, 2), (3, 5), (-1, 2)])
    assert g.terms == ((Fraction(3), Fraction(5)),)


def test_exponent_collisions_are_merged():
    g = pos.as_exp_polynomial(1, "p")
    exps = [b for _, b in g.terms]
    assert all(x > y for x, y in zip(exps, exps[1:]))
    # merged sum still evaluates like the raw term list
    t = 0.37
    raw = math.fsum(
        float(pos._eval_poly(a, Fraction(1)))
        * math.exp(float(pos._eval_poly(b, Fraction(1))) * t)
        for a, b in pos._P_TERMS)
    assert abs(g.eval(t) - raw) < 1e-12 * (1.0 + abs(raw))


def test_sigma_counts():
    assert pos.sigma(pos.as_exp_polynomial(5, "p")) == 6
    assert pos.sigma(pos.phat_exp_polynomial(5)) == 4
    single = pos.exp_polynomial([(7, 3)])
    assert pos.sigma(single) == 0
    for eps in (Fraction(11, 2), 8, 21, 34):
        assert pos.sigma(pos.as_exp_polynomial(eps, "p")) == 6
        assert pos.sigma(pos.phat_exp_polynomial(eps)) == 4


def test_quadruple_root_at_zero():
    for k in range(4):
        assert pos.derivative_at_zero(5, k) == 0
        assert pos.derivative_at_zero(5, k, "q") == 0
    assert pos.derivative_at_zero(5, 4) == 63000
    for eps in (Fraction(7), Fraction(11, 2), Fraction(34)):
        got = pos.derivative_at_zero(eps, 4)
        want = 24 * eps ** 3 * (eps + 2) * (2 * eps ** 2 - 11 * eps + 8)
        assert got == want
        for k in range(4):
            assert pos.derivative_at_zero(eps, k) == 0


def test_p_positive_near_zero():
    assert pos.eval_p(5, 0.5) > 0.0
    assert pos.eval_p(5, -0.5) > 0.0
    assert pos.eval_p(5, 0.0) == pytest.approx(0.0, abs=1e-9)


def test_q_is_reflected_p():
    for eps in (Fraction(5), Fraction(13, 2), Fraction(20)):
        p_terms = {(a, Fraction(4) * eps - 1 - b)
                   for a, b in pos.as_exp_polynomial(eps, "p").terms}
        q_terms = set(pos.as_exp_polynomial(eps, "q").terms)
        assert p_terms == q_terms
    for t in (-0.8, 0.3, 1.1):
        lhs = pos.eval_q(7, t)
        rhs = math.exp((4 * 7 - 1) * t) * pos.eval_p(7, -t)
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_taylor_printed_forms():
    assert pos.taylor_p(0).coefficients == pos.PRINTED_P0.coefficients
    assert pos.taylor_p(1).coefficients == pos.PRINTED_P1.coefficients
    assert pos.taylor_q(1).coefficients == pos.PRINTED_Q1.coefficients
    assert pos.taylor_q(0).coefficients == pos.taylor_p(0).coefficients
    assert pos.taylor_p(0)(0) == 63000
    for n in (0, 1, 2, 5, 9):
        assert pos.taylor_p(n).degree == n + 6
        assert pos.taylor_q(n).degree == n + 6


def test_taylor_matches_exact_derivatives():
    for n in (0, 1, 3, 7):
        for nu in (0, 2, 11, 29):
            assert pos.taylor_p(n)(nu) == pos.derivative_at_zero(
                nu + 5, n + 4)
            assert pos.taylor_q(n)(nu) == pos.derivative_at_zero(
                nu + 5, n + 4, "q")


def test_positive_coefficient_tables():
    rp = pos.certify_positive_coeffs("p", range(0, 13))
    assert rp.passed, rp.detail
    rq = pos.certify_positive_coeffs("q", range(0, 44))
    assert rq.passed, rq.detail


def test_dominations_extend_the_tables():
    for n in (13, 14, 20, 40, 80, 200):
        assert pos.domination_p(n).passed
    for n in (44, 45, 60, 100, 200):
        assert pos.domination_q(n).passed
    with pytest.raises(ValueError):
        pos.domination_p(12)
    with pytest.raises(ValueError):
        pos.domination_q(43)


def test_grid_positivity():
    assert pos.grid_positivity_p()


def test_series_recovers_the_function():
    # truncated Taylor series in exact rationals; the window shrinks
    # as nu grows because the terms peak near n = 4 nu + 19
    windows = {0: 1.0, 14: 0.25, 29: 0.125}
    for nu, tmax in windows.items():
        polys = [pos._taylor("p", n) for n in range(61)]
        for t in (tmax, 0.5 * tmax, -0.5 * tmax, -tmax):
            tq = Fraction(t).limit_denominator(2 ** 20)
            acc = Fraction(0)
            for n, poly in enumerate(polys):
                acc += Fraction(poly(nu), math.factorial(n + 4)) * tq ** n
            direct = pos.eval_p(nu + 5, float(tq)) / float(tq) ** 4
            assert float(acc) == pytest.approx(direct, rel=1e-6)


def test_p51_polynomial():
    assert pos.P51(1) == 2625
    assert pos.P51(0) == 252
    assert pos.P51.degree == 15
    assert pos.P51.coefficients[-1] == 30
    assert pos.p51_lower_bound(1.0) == pytest.approx(2625.0, rel=1e-14)
    assert pos.check_p51(np.linspace(0.01, 10.0, 1000))
    with pytest.raises(ValueError):
        pos.check_p51([0.0, 1.0])


def test_gautschi_bounds():
    assert 1.25 < 4.0 / math.pi < 1.0 + 1.0 / math.pi
    ratio = math.exp(2.0 * (math.lgamma(2.0) - math.lgamma(1.5)))
    assert ratio == pytest.approx(4.0 / math.pi, rel=1e-12)
    a = 1e4
    big = math.exp(2.0 * (math.lgamma(a + 1.0) - math.lgamma(a + 0.5)))
    assert 0.25 < big - a < 1.0 / math.pi
    assert pos.check_gautschi(np.geomspace(1e-3, 1e4, 1000))
    with pytest.raises(ValueError):
        pos.check_gautschi([-1.0])


def test_binomial_bounds():
    # b = 1 collapses both sides to a
    assert pos.check_binomial_ineq([2.0], [1.0])
    mid = math.sqrt(7.0) - math.sqrt(3.0)
    assert math.sqrt(3.0) / 2.0 <= mid <= 1.0
    assert pos.check_binomial_ineq(np.geomspace(0.05, 50.0, 40),
                                   np.geomspace(0.05, 50.0, 25))
    with pytest.raises(ValueError):
        pos.check_binomial_ineq([1.0], [-2.0])


def test_root_counts_never_exceed_sign_changes():
    rng = np.random.default_rng(20260816)
    ts = np.linspace(-40.0, 40.0, 100001)
    for _ in range(100):
        k = int(rng.integers(2, 7))
        den = int(rng.integers(1, 4))
        bs = rng.choice(np.arange(-12, 13), size=k, replace=False)
        terms = []
        for b in bs:
            a = int(rng.integers(1, 10)) * (1 if rng.random() < 0.5 else -1)
            terms.append((Fraction(a), Fraction(int(b), den)))
        g = pos.exp_polynomial(terms)
        s = pos.sigma(g)
        vals = g.eval_array(ts)
        scale = g.magnitude_array(ts)
        sgn = np.where(np.abs(vals) <= 1e-9 * scale, 0, np.sign(vals))
        nz = sgn[sgn != 0]
        crossings = int(np.sum(nz[1:] * nz[:-1] < 0))
        assert crossings <= s
        assert (s - crossings) % 2 == 0
        # window catches the tails: edge signs match the asymptotics
        assert nz[-1] == (1 if g.terms[0][0] > 0 else -1)
        assert nz[0] == (1 if g.terms[-1][0] > 0 else -1)


def test_certificate_suites():
    for suite in ("p", "q", "p51", "gautschi"):
        cert = pos.certificate(suite)
        assert cert["passed"], suite
        assert all(c["passed"] for c in cert["checks"])
    with pytest.raises(ValueError):
        pos.certificate("nope")


def test_parameter_validation():
    with pytest.raises(ValueError):
        pos.as_exp_polynomial(0, "p")
    with pytest.raises(ValueError):
        pos.as_exp_polynomial(5, "r")
    with pytest.raises(ValueError):
        pos.eval_p(-1, 0.5)
    with pytest.raises(ValueError):
        pos.taylor_p(-1)
