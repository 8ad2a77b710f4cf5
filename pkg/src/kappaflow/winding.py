"""Net winding of orbits in the potential well.

For a law with a circular radius s_f and a convex potential there, the
orbit through a real s in ]0, s_f[ oscillates between s and the
reflected radius s* > s_f with F(s*) = F(s).  Its net winding has a
closed integral form over [s, s*] with inverse-square-root endpoint
singularities, evaluated here by the shared well quadrature; a direct
time integration of f along the orbit serves as an independent oracle.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from . import flow
from .models import (
    CurvatureModel,
    eval_F,
    eval_F2,
    eval_f,
    eval_f_prime,
    sf_derivatives,
)
from .quadrature import PotentialWell

__all__ = [
    "WindingProfile",
    "StarMap",
    "LimitAtSf",
    "center_well",
    "s_star",
    "omega_quadrature",
    "omega_ode",
    "omega_limit_at_sf",
    "omega_limit_at_zero",
    "omega_prime",
    "omega_lower_bound",
    "winding_profile",
    "psi_convexity_factor",
]

_NEAR_SF = 1e-4           # inside this margin of s_f, use the quadratic expansion
_DEFAULT_QUAD_TOL = 1e-8
_DEFAULT_ODE_TOL = 1e-10


@dataclass(frozen=True)
class StarMap:
    s: float
    s_star: float


@dataclass(frozen=True)
class LimitAtSf:
    """Value and one-sided derivatives of omega at the circular radius."""

    omega: float
    omega_prime: float        # always 0: the profile is flat at s_f
    omega_second: float


@dataclass(frozen=True)
class WindingProfile:
    model: CurvatureModel
    grid: np.ndarray
    omega: np.ndarray
    est_error: np.ndarray
    limit_at_zero: float
    limit_at_sf: float
    method: str               # "quadrature" | "ode_oracle"


# ---------------------------------------------------------------------------
# the well


@functools.lru_cache(maxsize=128)
def center_well(model: CurvatureModel) -> PotentialWell:
    """The potential well of F around s_f; raises when there is none."""
    if model.s_f is None:
        raise ValueError(f"law {model.spec!r} has no circular radius s_f")
    s_f = model.s_f
    F2 = float(eval_F2(model, s_f))
    if not F2 > 0.0:
        raise ValueError(
            f"law {model.spec!r} has no potential well at s_f (F'' <= 0)")
    if model.kind == "monomial":
        delta = model.delta
        taylor = []
        prod = 1.0
        for k in range(2, 7):
            prod *= delta + 3.0 - k
            taylor.append(prod * s_f ** (1.0 - k))
        a, d = model.a, model.delta
        V3 = lambda u: a * (d + 1.0) * d * np.asarray(u, dtype=float) ** (d - 1.0)
    else:
        taylor = list(sf_derivatives(model))
        V3 = None
    return PotentialWell(
        V=lambda u: eval_F(model, u),
        V1=lambda u: np.asarray(u, dtype=float) * eval_f(model, u) - 1.0,
        V2=lambda u: eval_F2(model, u),
        s0=s_f, taylor=taylor, V3=V3)


def _check_interior(model: CurvatureModel, s: float) -> None:
    if model.s_f is None or not 0.0 < s < model.s_f:
        raise ValueError(
            f"s must lie strictly between 0 and s_f for {model.spec!r}, got {s}")


def s_star(model: CurvatureModel, s: float) -> float:
    """The reflected radius s* > s_f with F(s*) = F(s)."""
    _check_interior(model, s)
    return center_well(model).reflect(s)


def star_map(model: CurvatureModel, s: float) -> StarMap:
    return StarMap(s=float(s), s_star=s_star(model, s))


# ---------------------------------------------------------------------------
# quadrature route


def omega_quadrature(model: CurvatureModel, s: float,
                     tol: float = _DEFAULT_QUAD_TOL) -> float:
    """Net winding of the untwisted orbit through s by singular quadrature.

    Near s_f (within 1e-4) the quadratic expansion around the circular
    radius is returned instead, since the two-endpoint factorization
    degenerates as s* -> s.
    """
    return _omega_quadrature_full(model, s, tol)[0]


def _omega_quadrature_full(model: CurvatureModel, s: float, tol: float):
    _check_interior(model, s)
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    s_f = model.s_f
    if s > s_f - _NEAR_SF * max(s_f, 1.0):
        lim = omega_limit_at_sf(model)
        val = lim.omega + 0.5 * lim.omega_second * (s - s_f) ** 2
        err = abs(lim.omega_second) * (s - s_f) ** 2
        return val, err
    well = center_well(model)
    st = well.reflect(s)
    level = float(eval_F(model, s))

    def g(u):
        radicand = 2.0 * u + eval_F(model, u) - level
        if np.any(radicand <= 0.0):
            raise ValueError(
                f"orbit through s={s} of {model.spec!r} winds about the "
                "origin; the well formula applies to untwisted orbits only")
        return u * eval_f(model, u) / np.sqrt(radicand)

    res = well.integrate(s, g, tol=tol * math.pi, weight="inverse_sqrt",
                         s_star=st)
    return res.value / math.pi, res.error_estimate / math.pi


# ---------------------------------------------------------------------------
# ODE oracle


def omega_ode(model: CurvatureModel, s: float,
              tol: float = _DEFAULT_ODE_TOL) -> float:
    """Net winding by direct time integration over one minimal period.

    Independent of the quadrature route: integrates f(|z(t)|) along the
    orbit through the real point s and signs the result by orientation
    (positive when counterclockwise).
    """
    if not s > 0.0:
        raise ValueError(f"need a positive real starting radius, got {s}")
    sf_res = s * float(eval_f(model, s))
    if min(abs(sf_res - 1.0), abs(sf_res + 1.0)) < 1e-12:
        raise ValueError(f"s={s} is a fixed point of the flow")
    rtol = atol = 0.5 * tol
    fast_f = flow._scalar_f(model)

    def rhs(t, y):
        x, yi, _ = y
        r = math.hypot(x, yi)
        fr = fast_f(r)
        return (-yi * fr, x * fr - 1.0, fr)

    # advance off the section so all three crossings are transversal
    rate = max(1.0, abs(float(eval_f(model, s))))
    z1 = flow.flow_map(model, complex(s), 1e-6 / rate, tol)

    def ev(t, y):
        return y[1]
    ev.terminal = 3
    ev.direction = 0.0

    sol = solve_ivp(rhs, (0.0, flow._MAX_EVENT_TIME),
                    (z1.real, z1.imag, 0.0), method="DOP853",
                    rtol=rtol, atol=atol, dense_output=True, events=[ev])
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    t_ev = sol.t_events[0]
    if t_ev.size < 3:
        raise RuntimeError(f"orbit through s={s} did not return; not periodic?")
    ta, tb, tc = (float(t) for t in t_ev[:3])
    if abs(2.0 * (tb - ta) - (tc - ta)) > 1e-6 * (tc - ta) + 64.0 * np.finfo(float).eps:
        raise RuntimeError(f"period cross-check failed for the orbit through {s}")
    ya = sol.sol(ta)
    yc = sol.sol(tc)
    integral = float(yc[2] - ya[2])
    tt = np.linspace(ta, tc, 2048)
    yy = sol.sol(tt)
    area = 0.5 * float(np.sum(yy[0] * np.roll(yy[1], -1) - np.roll(yy[0], -1) * yy[1]))
    sign = 1.0 if area > 0.0 else -1.0
    return sign * integral / (2.0 * math.pi)


# ---------------------------------------------------------------------------
# limits


def omega_limit_at_sf(model: CurvatureModel) -> LimitAtSf:
    """Limit of the winding profile at the circular radius.

    omega -> 1/sqrt(s_f F2), the one-sided first derivative vanishes,
    and the second derivative has a closed form in F2, F3, F4.
    """
    if model.s_f is None:
        raise ValueError(f"law {model.spec!r} has no circular radius s_f")
    s_f = model.s_f
    F2, F3, F4 = sf_derivatives(model)
    if not F2 > 0.0:
        raise ValueError(
            f"law {model.spec!r} has no potential well at s_f (F'' <= 0)")
    omega = 1.0 / math.sqrt(s_f * F2)
    num = (9.0 * F2 ** 2
           - 3.0 * s_f * F2 * (3.0 * F2 ** 2 - 2.0 * F3)
           - s_f ** 2 * (3.0 * F2 * F4 - 5.0 * F3 ** 2))
    second = num / (24.0 * math.sqrt(s_f * F2) ** 5)
    return LimitAtSf(omega=omega, omega_prime=0.0, omega_second=second)


def omega_limit_at_zero(model: CurvatureModel) -> float:
    """Limit of the net winding as the starting radius shrinks to 0.

    Closed forms: 1/sqrt(1 - 1/a^2) when a = lim s|f(s)| > 1 (1.0 for
    a = inf), and (delta+2)/(2 delta+2) for monomials with delta >= 0.
    Otherwise the quadrature value is followed down s = 10^-k; math.nan
    is returned when the law has no well to evaluate in, math.inf when
    the values diverge.
    """
    a0 = model.origin_limit
    if a0 > 1.0:
        if math.isinf(a0):
            return 1.0
        return 1.0 / math.sqrt(1.0 - 1.0 / a0 ** 2)
    if model.kind == "monomial" and model.delta >= 0.0:
        return 0.5 + 0.5 / (model.delta + 1.0)
    try:
        center_well(model)
    except ValueError:
        return math.nan
    vals = [omega_quadrature(model, 10.0 ** -k, tol=1e-10) for k in (3, 4, 5)]
    if vals[2] > vals[1] > vals[0] and vals[2] > 10.0 * vals[0]:
        return math.inf
    return vals[2]


# ---------------------------------------------------------------------------
# derivative


def psi_convexity_factor(t):
    """psi(t) = 2t/sqrt(1-t)^3 + 2/(1+sqrt(1-t)) for t < 1."""
    t = np.asarray(t, dtype=float)
    if np.any(t >= 1.0):
        raise ValueError("psi is defined for t < 1 only")
    root = np.sqrt(1.0 - t)
    return 2.0 * t / root ** 3 + 2.0 / (1.0 + root)


def omega_prime(model: CurvatureModel, s: float,
                tol: float = _DEFAULT_QUAD_TOL) -> float:
    """Derivative of the winding profile by its exact integral form.

    The integrand combines f, f' and the series-continued well ratios
    F/F' and F F''/(F')^2; the remaining endpoint singularity is handled
    by the same substitution as the profile itself.
    """
    _check_interior(model, s)
    well = center_well(model)
    st = well.reflect(s)
    level = float(eval_F(model, s))
    if level <= 0.0:
        raise ValueError(f"degenerate level at s={s}")
    F1s = s * float(eval_f(model, s)) - 1.0
    prefactor = F1s / (2.0 * math.pi * math.sqrt(2.0) * level)

    def h(u):
        fu = eval_f(model, u)
        fpu = eval_f_prime(model, u)
        A = well.ratio_V_over_V1(u)
        B = well.ratio_VV2_over_V1sq(u)
        tau = (level - eval_F(model, u)) / (2.0 * u)
        bracket = (fu * A + 2.0 * u * fpu * A + 2.0 * u * fu * (1.0 - B)
                   - u * fu + 0.25 * fu * level * psi_convexity_factor(tau))
        return bracket / np.sqrt(u)

    inner_tol = tol / max(abs(prefactor), 1e-300)
    res = well.integrate(s, h, tol=inner_tol, weight="inverse_sqrt", s_star=st)
    return prefactor * res.value


# ---------------------------------------------------------------------------
# lower bound


def _f_is_increasing(model: CurvatureModel) -> bool:
    if model.kind == "monomial":
        return model.delta > 0.0
    s = np.geomspace(1e-3, 1e3, 257)
    return bool(np.all(eval_f_prime(model, s) > 0.0))


def _ratio_direction(model: CurvatureModel) -> str:
    """Monotonicity of F''F/(F')^2 on a wide grid: "increasing"/"decreasing"."""
    well = center_well(model)
    s_f = model.s_f
    s = np.geomspace(0.02 * s_f, 50.0 * s_f, 400)
    with np.errstate(over="ignore", invalid="ignore"):
        M = well.ratio_VV2_over_V1sq(s)
    ok = np.isfinite(M)
    d = np.diff(M[ok])
    scale = 1e-12 * (1.0 + float(np.max(np.abs(M[ok]))))
    if np.all(d >= -scale):
        return "increasing"
    if np.all(d <= scale):
        return "decreasing"
    raise ValueError(
        f"F''F/(F')^2 is not monotone for {model.spec!r}; "
        "the lower bound requires a monotone ratio")


def omega_lower_bound(model: CurvatureModel, s: float) -> float:
    """Lower bound for the winding profile, sharp as s -> s_f.

    Requires f increasing; the monotonicity direction of F''F/(F')^2
    selects which endpoint carries the width-to-slope ratio.
    """
    _check_interior(model, s)
    if not _f_is_increasing(model):
        raise ValueError(
            f"law {model.spec!r} is not increasing; for decreasing laws a "
            "variant bound holds with the right-hand side divided by sqrt(2)")
    direction = _ratio_direction(model)
    well = center_well(model)
    s_f = model.s_f
    st = well.reflect(s)
    if direction == "increasing":
        ratio = (st - s_f) / (st * float(eval_f(model, st)) - 1.0)
    else:
        ratio = (s - s_f) / (s * float(eval_f(model, s)) - 1.0)

    mid = 0.5 * (st ** 2 + s ** 2)
    half = 0.5 * (st ** 2 - s ** 2)

    def integrand(v):
        return eval_f(model, np.sqrt(mid - half * np.cos(v)))

    n = 64
    prev = float(np.mean(integrand((np.arange(n) + 0.5) * math.pi / n))) * math.pi
    while n < (1 << 16):
        n *= 2
        cur = float(np.mean(integrand((np.arange(n) + 0.5) * math.pi / n))) * math.pi
        if abs(cur - prev) <= 1e-11 * (1.0 + abs(cur)):
            break
        prev = cur
    return math.sqrt(s_f) / math.pi * math.sqrt(ratio) * cur


# ---------------------------------------------------------------------------
# profiles


def winding_profile(model: CurvatureModel,
                    grid: Optional[np.ndarray] = None,
                    n: int = 25,
                    method: str = "quadrature",
                    tol: Optional[float] = None) -> WindingProfile:
    """Winding values on an increasing grid in ]0, s_f[.

    The default grid places n uniformly spaced interior points.  Methods:
    "quadrature" (well integral) or "ode_oracle" (time integration).
    """
    if model.s_f is None:
        raise ValueError(f"law {model.spec!r} has no circular radius s_f")
    s_f = model.s_f
    if grid is None:
        grid = s_f * np.arange(1, n + 1) / (n + 1.0)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0.0):
        raise ValueError("grid must be a nonempty increasing 1-d array")
    if not (grid[0] > 0.0 and grid[-1] < s_f):
        raise ValueError(f"grid must lie strictly inside ]0, {s_f}[")
    omega = np.empty_like(grid)
    err = np.empty_like(grid)
    if method == "quadrature":
        qtol = _DEFAULT_QUAD_TOL if tol is None else tol
        for i, s in enumerate(grid):
            omega[i], err[i] = _omega_quadrature_full(model, float(s), qtol)
    elif method == "ode_oracle":
        otol = _DEFAULT_ODE_TOL if tol is None else tol
        for i, s in enumerate(grid):
            omega[i] = omega_ode(model, float(s), otol)
            err[i] = 10.0 * otol
    else:
        raise ValueError(f"unknown method {method!r}")
    return WindingProfile(
        model=model, grid=grid, omega=omega, est_error=err,
        limit_at_zero=omega_limit_at_zero(model),
        limit_at_sf=omega_limit_at_sf(model).omega,
        method=method if method == "quadrature" else "ode_oracle")
