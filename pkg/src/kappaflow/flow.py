"""Phase flow z' = i z f(|z|) - i and its conserved quantity.

The scalar H(z) = Re z - F(|z|) - |z| is constant along orbits, so closed
level curves of H are the periodic orbits.  Orbits are symmetric under
complex conjugation combined with time reversal; a periodic orbit meets
the real axis exactly twice, which is what the period finder exploits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .models import (
    CurvatureModel,
    eval_F,
    eval_F2,
    eval_f,
)

__all__ = [
    "OrbitTrace",
    "FixedPointInfo",
    "PortraitLine",
    "vector_field",
    "hamiltonian",
    "f_unbounded_at_zero",
    "flow_map",
    "integrate_orbit",
    "minimal_period",
    "section_times",
    "fixed_points",
    "origin_type",
    "infinity_type",
    "portrait_samples",
]

_POLAR_RADIUS = 1e-6      # switch to the polar chart below this radius
_SCAN_LO, _SCAN_HI = 1e-3, 1e3
_MAX_EVENT_TIME = 1e4


@dataclass(frozen=True)
class OrbitTrace:
    """One integrated orbit, sampled uniformly in time."""

    samples: np.ndarray           # complex positions
    times: np.ndarray
    period: Optional[float]       # minimal period when one was located
    hamiltonian_drift: float      # (max H - min H) / duration over the samples
    orientation: int              # +1 ccw, -1 cw, 0 when not periodic


@dataclass(frozen=True)
class FixedPointInfo:
    z: float                      # fixed points are real
    kind: str                     # "center" | "saddle" | "degenerate"
    second_derivative: float      # z * F''(|z|)


@dataclass(frozen=True)
class PortraitLine:
    level: float
    points: np.ndarray            # complex polyline


# ---------------------------------------------------------------------------
# field and invariant


def vector_field(model: CurvatureModel, z):
    """i z f(|z|) - i, vectorized over complex arrays; needs |z| > 0."""
    z = np.asarray(z, dtype=complex)
    return 1j * z * eval_f(model, np.abs(z)) - 1j


def hamiltonian(model: CurvatureModel, z):
    """Re z - F(|z|) - |z|, constant along orbits; needs |z| > 0."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    return np.real(z) - eval_F(model, r) - r


def f_unbounded_at_zero(model: CurvatureModel) -> bool:
    if model.kind == "monomial":
        return model.delta < 0.0
    return model.example_id not in ("s", "1/(1+s)")


def _scalar_f(model: CurvatureModel):
    """Pure-float f for the inner ODE loop; mirrors models.eval_f."""
    if model.kind == "monomial":
        a, delta = model.a, model.delta
        return lambda r: a * r ** delta
    table = {
        "s": lambda r: r,
        "1/(1+s)": lambda r: 1.0 / (1.0 + r),
        "1/s^2": lambda r: r ** -2.0,
        "1/s": lambda r: 1.0 / r,
        "(1+3s^4)/(s+3s^3)": lambda r: (1.0 + 3.0 * r ** 4) / (r + 3.0 * r ** 3),
        "3-2/s": lambda r: 3.0 - 2.0 / r,
        "e^{-s}/s": lambda r: math.exp(-r) / r,
        "1/(s+s^3)": lambda r: 1.0 / (r + r ** 3),
        "(s+2)/s^2": lambda r: (r + 2.0) / r ** 2,
        "(s^2+2)/s^3": lambda r: (r ** 2 + 2.0) / r ** 3,
    }
    try:
        return table[model.example_id]
    except KeyError:
        f = eval_f
        return lambda r: float(f(model, r))


def _cartesian_rhs(model: CurvatureModel):
    f = _scalar_f(model)

    def rhs(t, y):
        x, yi = y
        r = math.hypot(x, yi)
        if r == 0.0:
            # only reachable when r*f(r) -> 0; then z*f(|z|) -> 0
            return (0.0, -1.0)
        fr = f(r)
        return (-yi * fr, x * fr - 1.0)

    return rhs


def _polar_rhs(model: CurvatureModel):
    f = _scalar_f(model)

    def rhs(t, y):
        rho, phi = y
        return (-math.sin(phi), f(rho) - math.cos(phi) / rho)

    return rhs


# ---------------------------------------------------------------------------
# integration


def _solve(model: CurvatureModel, z0: complex, t_final: float, tol: float,
           events=None, polar: Optional[bool] = None):
    """Integrate from z0, switching to the polar chart when the orbit
    would cross the guard radius of an origin-singular law.

    Returns (sol, polar_used); sol carries dense output in the chart used.
    """
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    rtol = atol = 0.5 * tol
    z0 = complex(z0)
    if polar is None:
        polar = False
        if f_unbounded_at_zero(model):
            if abs(z0) < _POLAR_RADIUS:
                polar = True
            elif _can_reach_guard(model, z0):
                # user events first so their indices are stable; the guard
                # is terminal, so a trigger means: redo in the polar chart
                probe = solve_ivp(
                    _cartesian_rhs(model), (0.0, t_final),
                    (z0.real, z0.imag), method="DOP853",
                    rtol=rtol, atol=atol, dense_output=True,
                    events=(events or []) + [_guard_event()])
                if not probe.success:
                    raise RuntimeError(f"integration failed: {probe.message}")
                if probe.t_events[-1].size == 0:
                    return probe, False
                polar = True
    if polar:
        if abs(z0) == 0.0:
            raise ValueError("polar chart requires z0 != 0")
        y0 = (abs(z0), math.atan2(z0.imag, z0.real))
        sol = solve_ivp(_polar_rhs(model), (0.0, t_final), y0,
                        method="DOP853", rtol=rtol, atol=atol,
                        dense_output=True,
                        events=[_ev_polar(e) for e in events] if events else None)
    else:
        sol = solve_ivp(_cartesian_rhs(model), (0.0, t_final),
                        (z0.real, z0.imag), method="DOP853",
                        rtol=rtol, atol=atol, dense_output=True, events=events)
    if not sol.success:
        raise RuntimeError(f"integration failed: {sol.message}")
    return sol, polar


def _guard_event():
    def ev(t, y):
        return math.hypot(y[0], y[1]) - _POLAR_RADIUS
    ev.terminal = True
    ev.direction = -1.0
    return ev


def _can_reach_guard(model: CurvatureModel, z0: complex) -> bool:
    """Whether the H-level through z0 meets the disk |z| < guard radius.

    On |z| = g the invariant ranges over [-F(g) - 2g, -F(g)], so levels
    outside that band never cross the guard circle and need no probe.
    """
    g = _POLAR_RADIUS
    try:
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            Fg = float(eval_F(model, g))
            H0 = float(np.real(hamiltonian(model, z0)))
    except (ValueError, OverflowError):
        return True
    if not math.isfinite(H0):
        return True
    if not math.isfinite(Fg):
        return False
    slack = g + 1e-9 * (1.0 + abs(H0))
    return -Fg - 2.0 * g - slack <= H0 <= -Fg + slack


def _ev_polar(ev_cart):
    """Wrap an event written against (x, y) to act on (rho, phi)."""
    def ev(t, y):
        rho, phi = y
        return ev_cart(t, (rho * math.cos(phi), rho * math.sin(phi)))
    ev.terminal = getattr(ev_cart, "terminal", False)
    ev.direction = getattr(ev_cart, "direction", 0.0)
    return ev


def _to_complex(sol, polar: bool, t) -> np.ndarray:
    y = sol.sol(t)
    if polar:
        return y[0] * np.exp(1j * y[1])
    return y[0] + 1j * y[1]


def flow_map(model: CurvatureModel, z0: complex, t: float, tol: float = 1e-10) -> complex:
    """The flow applied to z0 for (possibly negative) time t."""
    if t == 0.0:
        return complex(z0)
    sol, polar = _solve(model, z0, t, tol)
    return complex(_to_complex(sol, polar, t))


def section_times(model: CurvatureModel, z0: complex, tol: float = 1e-10
                  ) -> Tuple[float, float]:
    """(half period, full period) of the orbit through z0.

    Uses the real axis as a Poincare section: a periodic orbit crosses it
    exactly twice, so consecutive crossings are half a period apart.  The
    integration starts from a point advanced slightly along the orbit so
    the section is always crossed transversally, and the full period is
    cross-checked against twice the half arc.

    Crossing times inherit the solver error divided by the section speed
    |Re(z) f(|z|) - 1|, so orbits shrinking onto a center need a tighter
    tol for the same period accuracy.
    """
    z0 = complex(z0)
    # advance off the section by a fraction of the local rotation time
    rate = 1.0
    if abs(z0) > 0.0:
        rate = max(1.0, abs(float(eval_f(model, abs(z0)))))
    z1 = flow_map(model, z0, 1e-6 / rate, tol)

    def ev(t, y):
        return y[1]
    ev.terminal = 3
    ev.direction = 0.0

    sol, polar = _solve(model, z1, _MAX_EVENT_TIME, tol, events=[ev])
    t_ev = sol.t_events[0]
    if t_ev.size < 3:
        raise RuntimeError(f"no periodic return found through z0={z0}")
    ta, tb, tc = float(t_ev[0]), float(t_ev[1]), float(t_ev[2])
    half, full = tb - ta, tc - ta
    # absolute floor: event times are localized to ~1e-15 in t
    if abs(2.0 * half - full) > 1e-6 * full + 64.0 * np.finfo(float).eps:
        raise RuntimeError(
            f"period cross-check failed through z0={z0}: "
            f"half arc {half}, full return {full}")
    return half, full


def minimal_period(model: CurvatureModel, z0: complex, tol: float = 1e-10) -> float:
    """Minimal period of the (periodic) orbit through z0."""
    return section_times(model, z0, tol)[1]


def integrate_orbit(model: CurvatureModel, z0: complex,
                    duration: Optional[float] = None,
                    tol: float = 1e-10, num: int = 2048) -> OrbitTrace:
    """Integrate from z0 and sample uniformly in time.

    With duration None the minimal period is located first and exactly one
    revolution is returned; closure is then enforced to within
    1e-8 * (1 + |z0|).  A negative duration integrates backwards.
    """
    z0 = complex(z0)
    if duration is None:
        period = minimal_period(model, z0, tol)
        t_final = period
    else:
        period = None
        t_final = float(duration)
    if t_final == 0.0:
        raise ValueError("duration must be nonzero")
    sol, polar = _solve(model, z0, t_final, tol)
    t = np.linspace(0.0, t_final, num)
    z = _to_complex(sol, polar, t)
    r = np.abs(z)
    ok = r > 0.0
    H = hamiltonian(model, z[ok])
    drift = float((np.max(H) - np.min(H)) / abs(t_final))
    orientation = 0
    if period is not None:
        gap = abs(z[-1] - z[0])
        if gap > 1e-8 * (1.0 + abs(z0)):
            raise RuntimeError(
                f"orbit through {z0} failed to close: |z(T)-z(0)| = {gap:.3e}")
        area = _signed_area(z)
        orientation = 1 if area > 0.0 else -1
    return OrbitTrace(samples=z, times=t, period=period,
                      hamiltonian_drift=drift, orientation=orientation)


def _signed_area(z: np.ndarray) -> float:
    x, y = z.real, z.imag
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


# ---------------------------------------------------------------------------
# fixed points


def fixed_points(model: CurvatureModel) -> List[FixedPointInfo]:
    """Real solutions of z f(|z|) = 1 with |z| in [1e-3, 1e3].

    Scans both half axes on a log-spaced grid and polishes each sign
    change.  Raises for laws where s*f(s) is identically +-1 (a continuum
    of fixed points).
    """
    s = np.geomspace(_SCAN_LO, _SCAN_HI, 8001)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        sf = s * eval_f(model, s)
    out: List[FixedPointInfo] = []
    for target, sign in ((1.0, 1.0), (-1.0, -1.0)):
        g = sf - target
        finite = np.isfinite(g)
        if np.all(np.abs(g[finite]) < 1e-14):
            raise ValueError(
                "every point of one half axis is fixed for this law")
        roots = [float(s[i]) for i in np.flatnonzero(finite & (g == 0.0))]
        for i in np.flatnonzero(finite[:-1] & finite[1:] & (g[:-1] * g[1:] < 0.0)):
            roots.append(float(brentq(
                lambda u: float(u * eval_f(model, u)) - target,
                s[i], s[i + 1], xtol=1e-300, rtol=8.9e-16)))
        for root in roots:
            z = sign * root
            d2 = z * float(eval_F2(model, root))
            if abs(d2) <= 1e-12:
                kind = "degenerate"
            else:
                kind = "center" if d2 > 0.0 else "saddle"
            out.append(FixedPointInfo(z=z, kind=kind, second_derivative=d2))
    out.sort(key=lambda p: p.z)
    return out


def origin_type(model: CurvatureModel) -> str:
    """Center behaviour at z = 0 from a0 = lim s|f(s)| as s -> 0."""
    a0 = model.origin_limit
    if a0 > 1.0:
        return "center"
    if a0 < 1.0:
        return "not_center"
    return "undetermined"


def infinity_type(model: CurvatureModel) -> str:
    """Center behaviour at infinity from a_inf = lim s|f(s)| as s -> inf."""
    a_inf = model.infinity_limit
    if a_inf > 1.0:
        return "center"
    if a_inf < 1.0:
        return "not_center"
    return "undetermined"


# ---------------------------------------------------------------------------
# portraits


def portrait_samples(model: CurvatureModel,
                     window: Optional[Tuple[float, float, float, float]] = None,
                     levels: Optional[list] = None,
                     grid: int = 400) -> List[PortraitLine]:
    """Polylines of level curves of H covering a window of the plane.

    Default window spans the fixed points with a margin; default levels
    are spread between the H values seen on the window.
    """
    import contourpy

    if window is None:
        try:
            pts = fixed_points(model)
        except ValueError:
            pts = []
        if pts:
            extent = max(2.0 * max(abs(p.z) for p in pts), 1.0)
        else:
            extent = 3.0
        window = (-extent, extent, -extent, extent)
    x0, x1, y0, y1 = window
    xs = np.linspace(x0, x1, grid)
    ys = np.linspace(y0, y1, grid)
    X, Y = np.meshgrid(xs, ys)
    Z = X + 1j * Y
    R = np.abs(Z)
    H = np.full_like(R, np.nan)
    ok = R > 1e-9
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        H[ok] = np.asarray(hamiltonian(model, Z[ok]), dtype=float)
    H[~np.isfinite(H)] = np.nan
    if levels is None:
        vals = H[np.isfinite(H)]
        qs = np.quantile(vals, np.linspace(0.05, 0.95, 13))
        fixed_levels = []
        try:
            for p in fixed_points(model):
                fixed_levels.append(float(hamiltonian(model, complex(p.z, 0.0))))
        except ValueError:
            pass
        levels = sorted(set(np.round(np.concatenate([qs, fixed_levels]), 12)))
    gen = contourpy.contour_generator(x=xs, y=ys, z=np.ma.masked_invalid(H))
    out: List[PortraitLine] = []
    for lev in levels:
        for line in gen.lines(float(lev)):
            pts = np.asarray(line)
            if pts.shape[0] >= 2:
                out.append(PortraitLine(level=float(lev),
                                        points=pts[:, 0] + 1j * pts[:, 1]))
    return out
