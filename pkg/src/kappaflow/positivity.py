"""Exact sign certificates for the exponential sums behind the
monotonicity results.

Everything structural runs in arbitrary-precision integers and
rationals; floats appear only when a value is finally evaluated on a
grid.  The certified objects are two families of exponential
polynomials p(eps, t) and q(eps, t) = e^{(4 eps - 1) t} p(eps, -t),
their integer Taylor polynomials in the shifted parameter nu = eps - 5,
a fixed degree-15 polynomial bound, and two classical inequalities
(a Gautschi-type gamma ratio bound and a binomial-sum bound).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

Rational = Union[int, Fraction]

__all__ = [
    "ExpPolynomial",
    "IntegerPolynomial",
    "exp_polynomial",
    "sigma",
    "as_exp_polynomial",
    "phat_exp_polynomial",
    "eval_p",
    "eval_q",
    "derivative_at_zero",
    "taylor_p",
    "taylor_q",
    "certify_positive_coeffs",
    "domination_p",
    "domination_q",
    "grid_positivity_p",
    "P51",
    "p51_lower_bound",
    "check_p51",
    "check_gautschi",
    "check_binomial_ineq",
    "CheckResult",
    "certificate",
]


# ---------------------------------------------------------------------------
# exponential polynomials g(t) = sum a_l e^{b_l t}


@dataclass(frozen=True)
class ExpPolynomial:
    """Finite sum of real exponentials with exact rational data.

    terms are (coefficient, exponent) pairs, exponents strictly
    decreasing, no zero coefficients.
    """

    terms: Tuple[Tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        for a, _ in self.terms:
            if a == 0:
                raise ValueError("zero coefficient in an ExpPolynomial")
        exps = [b for _, b in self.terms]
        if any(x <= y for x, y in zip(exps, exps[1:])):
            raise ValueError("exponents must be strictly decreasing")

    def eval(self, t: float) -> float:
        return math.fsum(float(a) * math.exp(float(b) * t)
                         for a, b in self.terms)

    def eval_array(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for a, b in self.terms:
            out += float(a) * np.exp(float(b) * t)
        return out

    def magnitude_array(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for a, b in self.terms:
            out += abs(float(a)) * np.exp(float(b) * t)
        return out


def exp_polynomial(terms: Iterable[Tuple[Rational, Rational]]
                   ) -> ExpPolynomial:
    """Normalize raw (coefficient, exponent) pairs: merge exponent
    collisions, drop zeros, sort by decreasing exponent."""
    merged: dict = {}
    for a, b in terms:
        b = Fraction(b)
        merged[b] = merged.get(b, Fraction(0)) + Fraction(a)
    pairs = [(a, b) for b, a in merged.items() if a != 0]
    pairs.sort(key=lambda ab: ab[1], reverse=True)
    return ExpPolynomial(tuple(pairs))


def sigma(g: ExpPolynomial) -> int:
    """Sign changes in the coefficient sequence; the number of real
    roots (with multiplicity) is sigma minus an even number."""
    count = 0
    for (a0, _), (a1, _) in zip(g.terms, g.terms[1:]):
        if a0 * a1 < 0:
            count += 1
    return count


# ---------------------------------------------------------------------------
# dense integer polynomials, ascending coefficients


def _trim(c: Sequence[int]) -> Tuple[int, ...]:
    c = list(c)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c)


def _padd(a, b):
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                  for i in range(n)])


def _pmul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return _trim(out)


def _ppow(a, m: int):
    out = (1,)
    base = _trim(a)
    while m:
        if m & 1:
            out = _pmul(out, base)
        base = _pmul(base, base)
        m >>= 1
    return out


def _pcompose(coeffs, inner):
    out = (0,)
    for c in reversed(coeffs):
        out = _padd(_pmul(out, inner), (c,))
    return out


@dataclass(frozen=True)
class IntegerPolynomial:
    """Exact integer polynomial, coefficients ascending in degree."""

    coefficients: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficients",
                           _trim(self.coefficients))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        out = 0
        for c in reversed(self.coefficients):
            out = out * x + c
        return out

    def all_coefficients_positive(self) -> bool:
        return all(c > 0 for c in self.coefficients)

    def __add__(self, other):
        return IntegerPolynomial(_padd(self.coefficients,
                                       other.coefficients))

    def __mul__(self, other):
        if isinstance(other, int):
            return IntegerPolynomial(tuple(other * c
                                           for c in self.coefficients))
        return IntegerPolynomial(_pmul(self.coefficients,
                                       other.coefficients))

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# the certified families: 11 terms each, polynomial data in eps

# (coefficient poly, exponent poly), ascending coefficients in eps
_P_TERMS = (
    ((0, 6), (-1, 4)),
    ((8, -12, -8), (0, 3)),
    ((0, -18, 9), (-1, 3)),
    ((0, 0, 3), (-3, 3)),
    ((-24, 36, 24), (0, 2)),
    ((0, 18, -30), (-1, 2)),
    ((0, 0, -18), (-3, 2)),
    ((24, -36, -24), (0, 1)),
    ((0, -6, 21, 12), (-1, 1)),
    ((0, 0, 15, -12), (-3, 1)),
    ((-8, 12, 8), (0,)),
)

# q(eps, t) = e^{(4 eps - 1) t} p(eps, -t), written out term by term
_Q_TERMS = tuple((a, _padd(_pmul(b, (-1,)), (-1, 4)))
                 for a, b in _P_TERMS)


def _eval_poly(coeffs, x: Fraction) -> Fraction:
    out = Fraction(0)
    for c in reversed(coeffs):
        out = out * x + c
    return out


def _term_table(which: str):
    if which == "p":
        return _P_TERMS
    if which == "q":
        return _Q_TERMS
    raise ValueError(f"unknown family {which!r}")


def as_exp_polynomial(eps: Rational, which: str = "p") -> ExpPolynomial:
    """The family member at a fixed parameter, exponents merged."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("the parameter must be positive")
    table = _term_table(which)
    return exp_polynomial((_eval_poly(a, eps), _eval_poly(b, eps))
                          for a, b in table)


def phat_exp_polynomial(eps: Rational) -> ExpPolynomial:
    """Reduced five-term sum with two fewer sign changes."""
    e = Fraction(eps)
    if e <= 0:
        raise ValueError("the parameter must be positive")
    return exp_polynomial([
        (2 * e, 4 * e - 1),
        (-(2 * e - 1) * (3 * e - 1), 3 * e),
        (2 * e * (3 * e - 1), 3 * e - 1),
        (-2 * (3 * e - 1), 2 * e),
        (e - 1, e),
    ])


def eval_p(eps: Rational, t: float) -> float:
    """Float value of p via compensated summation."""
    return as_exp_polynomial(eps, "p").eval(t)


def eval_q(eps: Rational, t: float) -> float:
    return as_exp_polynomial(eps, "q").eval(t)


def derivative_at_zero(eps: Rational, order: int,
                       which: str = "p") -> Fraction:
    """Exact d^k/dt^k at t = 0: sum of a_l b_l^k."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("the parameter must be positive")
    table = _term_table(which)
    out = Fraction(0)
    for a, b in table:
        av = _eval_poly(a, eps)
        bv = _eval_poly(b, eps)
        out += av * bv ** order
    return out


# ---------------------------------------------------------------------------
# Taylor polynomials in nu = eps - 5

_SHIFT = (5, 1)


def _taylor(which: str, n: int) -> IntegerPolynomial:
    if n < 0:
        raise ValueError("need n >= 0")
    m = n + 4
    total = (0,)
    for a, b in _term_table(which):
        an = _pcompose(a, _SHIFT)
        bn = _pcompose(b, _SHIFT)
        total = _padd(total, _pmul(an, _ppow(bn, m)))
    return IntegerPolynomial(total)


def taylor_p(n: int) -> IntegerPolynomial:
    """d^{n+4} p/dt^{n+4} (nu+5, 0) as an exact polynomial in nu."""
    return _taylor("p", n)


def taylor_q(n: int) -> IntegerPolynomial:
    return _taylor("q", n)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class CheckResult:
    name: str
    params: dict
    passed: bool
    detail: str


def certify_positive_coeffs(which: str = "p",
                            ns: Iterable[int] = range(0, 13)) -> CheckResult:
    """Every coefficient of the listed Taylor polynomials is > 0."""
    ns = list(ns)
    for n in ns:
        poly = _taylor(which, n)
        for k, c in enumerate(poly.coefficients):
            if c <= 0:
                return CheckResult(
                    name=f"{which}_taylor_positive",
                    params={"n_values": ns},
                    passed=False,
                    detail=f"non-positive coefficient at n={n}, degree={k}")
    return CheckResult(name=f"{which}_taylor_positive",
                       params={"n_values": ns}, passed=True,
                       detail=f"{len(ns)} polynomials, all coefficients > 0")


def _lin(c0: int, c1: int, nu: int) -> int:
    return c0 + c1 * nu


def domination_p(n: int, nus: Iterable[int] = range(30)) -> CheckResult:
    """Exact term dominations that force positivity of the p-Taylor
    polynomial once n is large; checked at integer sample points."""
    if n < 13:
        raise ValueError("the domination route is for n >= 13")
    m = n + 4
    bad = []
    for nu in nus:
        ok = (
            3 * (nu + 5) * (4 * nu + 19) ** m
            >= 2 * (nu + 7) * (2 * nu + 9) * (3 * nu + 15) ** m
        ) and (
            3 * (nu + 3) * (3 * nu + 14) ** m
            >= 2 * (5 * nu + 22) * (2 * nu + 9) ** m
        ) and (
            (3 * nu + 12) ** m >= 6 * (2 * nu + 7) ** m
        ) and (
            12 * (nu + 7) * (2 * nu + 9) * (2 * nu + 10) ** m
            >= 12 * (nu + 7) * (2 * nu + 9) * (nu + 5) ** m
        ) and (
            3 * (nu + 5) * (nu + 7) * (4 * nu + 19) * (nu + 4) ** m
            >= 3 * (nu + 5) ** 2 * (4 * nu + 15) * (nu + 2) ** m
        )
        if not ok:
            bad.append(nu)
    return CheckResult(name="p_domination", params={"n": n},
                       passed=not bad,
                       detail=("holds at all sampled points" if not bad
                               else f"fails at nu in {bad}"))


def domination_q(n: int, nus: Iterable[int] = range(30)) -> CheckResult:
    """Exact dominations for the q-Taylor polynomials, n >= 44: the
    leading term absorbs all four large negative terms."""
    if n < 44:
        raise ValueError("the domination route is for n >= 44")
    m = n + 4
    bad = []
    for nu in nus:
        c = (nu + 7) * (2 * nu + 9)
        lead = c * (4 * nu + 19) ** m
        neg1 = 3 * (nu + 5) ** 2 * (4 * nu + 15) * (3 * nu + 17) ** m
        neg2 = 12 * c * (3 * nu + 14) ** m
        neg3 = 18 * (nu + 5) ** 2 * (2 * nu + 12) ** m
        neg4 = 3 * (5 * nu + 22) * (2 * nu + 10) ** (m + 1)
        ok = (lead >= neg1
              and (4 * nu + 19) ** m >= 12 * (3 * nu + 14) ** m
              and lead >= neg3
              and lead >= neg4
              and 4 * lead >= neg1 + neg2 + neg3 + neg4
              and 12 * (nu + 7) * (2 * nu + 9) ** (m + 1)
              >= 4 * c * (nu + 4) ** m)
        if not ok:
            bad.append(nu)
    return CheckResult(name="q_domination", params={"n": n},
                       passed=not bad,
                       detail=("holds at all sampled points" if not bad
                               else f"fails at nu in {bad}"))


def grid_positivity_p(eps_lo: float = 5.0, eps_hi: float = 34.0,
                      eps_step: float = 0.25, t_lo: float = -2.0,
                      t_hi: float = 2.0, t_step: float = 0.01,
                      slack: float = 1e-12) -> bool:
    """p >= -slack * scale on a rectangle, scale being the magnitude
    sum of the eleven exponential terms at each point."""
    ts = np.arange(t_lo, t_hi + 0.5 * t_step, t_step)
    for eps in np.arange(eps_lo, eps_hi + 0.5 * eps_step, eps_step):
        g = as_exp_polynomial(Fraction(eps).limit_denominator(10 ** 9), "p")
        vals = g.eval_array(ts)
        scale = g.magnitude_array(ts)
        if np.any(vals < -slack * scale):
            return False
    return True


# ---------------------------------------------------------------------------
# the fixed degree-15 polynomial and the two classical inequalities

P51 = IntegerPolynomial((252, 1008, 1395, 540, -435, -1164, -1281, -870,
                         -15, 540, 807, 798, 600, 300, 120, 30))


def p51_lower_bound(s: float) -> float:
    lo = min(1.0, s)
    hi = max(1.0, s)
    return 15.0 * (213.0 * s ** 9 * lo ** 6 - 251.0 * s ** 4 * hi ** 4
                   + 213.0 * lo ** 3)


def check_p51(s_grid: Sequence[float]) -> bool:
    """Positivity of the degree-15 polynomial on a positive grid, and
    consistency with its printed lower bound."""
    for s in np.asarray(s_grid, dtype=float):
        if not s > 0.0:
            raise ValueError("the grid must be positive")
        v = float(P51(s))
        scale = float(sum(abs(c) * s ** k
                          for k, c in enumerate(P51.coefficients)))
        if not v > 0.0:
            return False
        if v < p51_lower_bound(s) - 1e-9 * scale:
            return False
    return True


def check_gautschi(a_grid: Sequence[float]) -> bool:
    """a + 1/4 < Gamma(a+1)^2/Gamma(a+1/2)^2 < a + 1/pi for a > 0."""
    for a in np.asarray(a_grid, dtype=float):
        if not a > 0.0:
            raise ValueError("the grid must be positive")
        ratio = math.exp(2.0 * (math.lgamma(a + 1.0)
                                - math.lgamma(a + 0.5)))
        if not (a + 0.25 < ratio < a + 1.0 / math.pi):
            return False
    return True


def check_binomial_ineq(a_grid: Sequence[float],
                        b_grid: Sequence[float]) -> bool:
    """a min{(b+1)^{1/b}/2, 1} <= (((a+1)^{b+1}-1)/a)^{1/b}
    - (b+1)^{1/b} <= a max{(b+1)^{1/b}/2, 1} for a, b > 0."""
    for b in np.asarray(b_grid, dtype=float):
        if not b > 0.0:
            raise ValueError("the grids must be positive")
        root = (b + 1.0) ** (1.0 / b)
        lo_f = min(0.5 * root, 1.0)
        hi_f = max(0.5 * root, 1.0)
        for a in np.asarray(a_grid, dtype=float):
            if not a > 0.0:
                raise ValueError("the grids must be positive")
            mid = (((a + 1.0) ** (b + 1.0) - 1.0) / a) ** (1.0 / b) - root
            tol = 1e-10 * (1.0 + abs(mid) + a)
            if not (a * lo_f - tol <= mid <= a * hi_f + tol):
                return False
    return True


# ---------------------------------------------------------------------------
# aggregated certificate


def _expand(*factors: Sequence[int]) -> IntegerPolynomial:
    out = (1,)
    for f in factors:
        out = _pmul(out, f)
    return IntegerPolynomial(out)


# printed factored expansions, used as coefficient-exact references
PRINTED_P0 = 24 * _expand((5, 1), (5, 1), (5, 1), (7, 1), (3, 9, 2))
PRINTED_P1 = 24 * _expand((5, 1), (5, 1), (5, 1), (7, 1),
                          (138, 321, 127, 14))
PRINTED_Q1 = 24 * _expand((5, 1), (5, 1), (5, 1), (7, 1),
                          (147, 594, 243, 26))


def certificate(suite: str = "all") -> dict:
    """Machine-checkable certificate for one suite or everything."""
    checks = []

    def add(name, params, passed, detail):
        checks.append(CheckResult(name, params, bool(passed), detail))

    if suite in ("p", "all"):
        checks.append(certify_positive_coeffs("p", range(0, 13)))
        for n in (13, 14, 20, 40, 80):
            checks.append(domination_p(n))
        add("p0_printed_form", {},
            taylor_p(0).coefficients == PRINTED_P0.coefficients,
            "matches 24(nu+5)^3(nu+7)(2nu^2+9nu+3)")
        add("p1_printed_form", {},
            taylor_p(1).coefficients == PRINTED_P1.coefficients,
            "matches 24(nu+5)^3(nu+7)(14nu^3+127nu^2+321nu+138)")
        add("p_flat_at_zero", {"eps": 5},
            all(derivative_at_zero(5, k) == 0 for k in range(4))
            and derivative_at_zero(5, 4) == 63000,
            "4-fold root at t=0 with 4th derivative 63000")
        add("sigma_p", {"eps": 5}, sigma(as_exp_polynomial(5, "p")) == 6,
            "six sign changes")
        add("sigma_phat", {"eps": 5}, sigma(phat_exp_polynomial(5)) == 4,
            "four sign changes")
        add("p_grid_positive",
            {"eps": [5.0, 34.0, 0.25], "t": [-2.0, 2.0, 0.01]},
            grid_positivity_p(), "no value below -1e-12 * scale")
    if suite in ("q", "all"):
        checks.append(certify_positive_coeffs("q", range(0, 44)))
        for n in (44, 45, 60, 100):
            checks.append(domination_q(n))
        add("q0_equals_p0", {},
            taylor_q(0).coefficients == taylor_p(0).coefficients,
            "shared leading Taylor polynomial")
        add("q1_printed_form", {},
            taylor_q(1).coefficients == PRINTED_Q1.coefficients,
            "matches 24(nu+5)^3(nu+7)(26nu^3+243nu^2+594nu+147)")
    if suite in ("p51", "all"):
        grid = np.linspace(0.01, 10.0, 1000)
        add("p51_positive", {"grid": [0.01, 10.0, 1000]},
            check_p51(grid), "positive and above the printed bound")
        add("p51_at_one", {}, P51(1) == 2625, "value 2625 at s=1")
    if suite in ("gautschi", "all"):
        grid = np.geomspace(1e-3, 1e4, 1000)
        add("gautschi", {"grid": [1e-3, 1e4, 1000]},
            check_gautschi(grid), "gamma ratio within (a+1/4, a+1/pi)")
        agrid = np.geomspace(0.05, 50.0, 40)
        bgrid = np.geomspace(0.05, 50.0, 25)
        add("binomial_bound", {"a": [0.05, 50.0, 40], "b": [0.05, 50.0, 25]},
            check_binomial_ineq(agrid, bgrid),
            "middle expression within the stated multiples of a")
    if not checks:
        raise ValueError(f"unknown suite {suite!r}")
    return {
        "suite": suite,
        "passed": all(c.passed for c in checks),
        "checks": [
            {"name": c.name, "params": c.params, "passed": c.passed,
             "detail": c.detail}
            for c in checks
        ],
    }
