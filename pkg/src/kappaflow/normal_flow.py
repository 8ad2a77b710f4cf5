"""Curves whose curvature depends on the normal coordinate.

For a law kappa = g(|<c, n>|) the auxiliary flow is dz/dt =
i z g(|Re z|) - i, restricted to the half-plane region A_g where
E(z) = G(Re z) + (Im z)^2 stays below G(0+); here G'(s) = 2s - 2/g(s)
and G is normalized to vanish at its minimum s_g, the root of
s g(s) = 1.  E is conserved, so orbits are the level loops of E and
the same two-turning-point quadrature as in the radial problem yields
the normalized half-period nu_g(s) = (1/pi) int_s^{s*}
du/sqrt(G(s) - G(u)).  The primary family is g(s) = s^delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import curves, flow
from .quadrature import PotentialWell

__all__ = [
    "NormalModel",
    "normal_model",
    "potential_well",
    "nu",
    "nu_prime",
    "nu_prime_forms",
    "nu_limit_at_sg",
    "nu_limit_at_zero",
    "nu_profile",
    "psi_flow_orbit",
    "reconstruct_curve",
    "SupplementRecord",
    "SupplementReport",
    "classify_supplement",
]

_NEAR_SG = 1e-4
_BOUNDARY_EPS = 1e-9


@dataclass(frozen=True)
class NormalModel:
    """Monomial normal-coordinate law g(s) = s**delta, delta > 0."""

    delta: float

    @property
    def s_g(self) -> float:
        return 1.0

    def g(self, s):
        return np.asarray(s, dtype=float) ** self.delta

    def g_prime(self, s):
        s = np.asarray(s, dtype=float)
        return self.delta * s ** (self.delta - 1.0)

    def G(self, s):
        s = np.asarray(s, dtype=float)
        d = self.delta
        if d == 1.0:
            return s * s - 2.0 * np.log(s) - 1.0
        return s * s + 2.0 * s ** (1.0 - d) / (d - 1.0) - (d + 1.0) / (d - 1.0)

    def G1(self, s):
        s = np.asarray(s, dtype=float)
        return 2.0 * s - 2.0 * s ** (-self.delta)

    def G2(self, s):
        s = np.asarray(s, dtype=float)
        return 2.0 + 2.0 * self.delta * s ** (-self.delta - 1.0)

    def G3(self, s):
        s = np.asarray(s, dtype=float)
        d = self.delta
        return -2.0 * d * (d + 1.0) * s ** (-d - 2.0)

    def G_upper_limit(self) -> float:
        """G(0+); finite only below delta = 1."""
        d = self.delta
        if d >= 1.0:
            return math.inf
        return (d + 1.0) / (1.0 - d)


def normal_model(delta: float) -> NormalModel:
    if not delta > 0.0:
        raise ValueError(f"need delta > 0, got {delta}")
    return NormalModel(delta=float(delta))


@lru_cache(maxsize=64)
def _well_for(delta: float) -> PotentialWell:
    m = NormalModel(delta=delta)
    d = delta
    # G^(k)(1) = 2[k=2] + 2(-1)^k d (d+1) ... (d+k-2)
    taylor = [2.0 + 2.0 * d]
    prod = d
    sign = -1.0
    for k in range(3, 7):
        prod *= d + k - 2.0
        taylor.append(sign * 2.0 * prod)
        sign = -sign
    return PotentialWell(V=m.G, V1=m.G1, V2=m.G2, s0=1.0,
                         taylor=taylor, V3=m.G3)


def potential_well(model: NormalModel) -> PotentialWell:
    return _well_for(model.delta)


def _check_interior(model: NormalModel, s: float) -> None:
    if not 0.0 < s < model.s_g:
        raise ValueError(f"need 0 < s < {model.s_g}, got {s}")


def nu_limit_at_sg(model: NormalModel) -> Tuple[float, float]:
    """Limit value and second derivative of nu at the well minimum."""
    d = model.delta
    val = 1.0 / math.sqrt(d + 1.0)
    second = d * (d - 3.0) / (12.0 * math.sqrt(d + 1.0))
    return val, second


def nu_limit_at_zero(model: NormalModel) -> float:
    return 1.0 / (1.0 + min(model.delta, 1.0))


def nu(model: NormalModel, s: float, tol: float = 1e-8) -> float:
    """Normalized half-period of the E-level loop through (s, 0)."""
    _check_interior(model, s)
    if model.s_g - s < _NEAR_SG:
        val, second = nu_limit_at_sg(model)
        return val + 0.5 * second * (s - model.s_g) ** 2
    well = potential_well(model)
    res = well.integrate(s, lambda u: np.ones_like(u), tol * math.pi,
                         weight="inverse_sqrt")
    return res.value / math.pi


def _nu_prime_parts(model: NormalModel, s: float, tol: float):
    _check_interior(model, s)
    well = potential_well(model)
    level = float(model.G(s))
    g1 = float(model.G1(s))
    pref_a = g1 / (2.0 * math.pi * level)
    pref_b = g1 / (math.pi * level)
    inner_a = tol / max(abs(pref_a), 1e-300)
    inner_b = tol / max(abs(pref_b), 1e-300)
    res_a = well.integrate(
        s, lambda u: model.G1(u) * well.K_first(u), inner_a,
        weight="inverse_sqrt")
    res_b = well.integrate(s, well.K_second, inner_b, weight="sqrt")
    return (pref_a * res_a.value, abs(pref_a) * res_a.error_estimate,
            pref_b * res_b.value, abs(pref_b) * res_b.error_estimate)


def nu_prime_forms(model: NormalModel, s: float,
                   tol: float = 1e-8) -> Tuple[float, float]:
    """Both ratio-derivative identities for d nu/ds.

    Each rewrites the derivative through K = G/(G')^2: the first
    integrates G' K' against the singular weight, the second K''
    against its inverse.
    """
    form_a, _, form_b, _ = _nu_prime_parts(model, s, tol)
    return form_a, form_b


def nu_prime(model: NormalModel, s: float, tol: float = 1e-8) -> float:
    """d nu/ds, cross-checked between the two identities.

    For very deep wells the second identity integrates a pair of huge
    near-cancelling lobes, so each form's quadrature error estimate
    widens the agreement band and the better-resolved form is returned.
    """
    form_a, err_a, form_b, err_b = _nu_prime_parts(model, s, tol)
    scale = max(abs(form_a), abs(form_b), 1.0)
    band = 1e4 * tol * scale + 8.0 * (err_a + err_b)
    if abs(form_a - form_b) > band:
        raise RuntimeError(
            f"derivative identities disagree at s={s}: "
            f"{form_a} vs {form_b}")
    return form_a if err_a <= err_b else form_b


def nu_profile(model: NormalModel, grid=None, n: int = 25,
               tol: float = 1e-8) -> Tuple[np.ndarray, np.ndarray]:
    """nu sampled on a grid in ]0, s_g[."""
    if grid is None:
        grid = model.s_g * (np.arange(1, n + 1)) / (n + 1.0)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0.0) or np.any(grid >= model.s_g) \
            or np.any(np.diff(grid) <= 0.0):
        raise ValueError("grid must increase strictly inside ]0, s_g[")
    vals = np.array([nu(model, float(s), tol) for s in grid])
    return grid, vals


# ---------------------------------------------------------------------------
# the flow itself


def _energy(model: NormalModel, z: np.ndarray) -> np.ndarray:
    return model.G(np.abs(z.real)) + z.imag ** 2


def psi_flow_orbit(model: NormalModel, p: complex, t_end: float,
                   tol: float = 1e-10) -> flow.OrbitTrace:
    """Integrate dz/dt = i z g(|Re z|) - i from p over [0, t_end]."""
    p = complex(p)
    if not p.real > 0.0:
        raise ValueError("starting point must have positive real part")
    if float(_energy(model, np.asarray(p))) >= model.G_upper_limit():
        raise ValueError("starting point lies outside the invariant region")
    d = model.delta

    def rhs(t, y):
        gr = abs(y[0]) ** d
        return (-y[1] * gr, y[0] * gr - 1.0)

    ts = np.linspace(0.0, t_end, 2048)
    sol = solve_ivp(rhs, (0.0, t_end), (p.real, p.imag), method="DOP853",
                    rtol=0.5 * tol, atol=0.5 * tol, t_eval=ts,
                    dense_output=False)
    if not sol.success:
        raise RuntimeError(f"orbit integration failed: {sol.message}")
    z = sol.y[0] + 1j * sol.y[1]
    energy = _energy(model, z)
    drift = float((np.max(energy) - np.min(energy)) / max(t_end, 1e-300))
    area = 0.5 * float(np.sum(z.real[:-1] * np.diff(z.imag)
                              - z.imag[:-1] * np.diff(z.real)))
    orientation = 1 if area > 0 else (-1 if area < 0 else 0)
    return flow.OrbitTrace(samples=z, times=ts, period=None,
                           hamiltonian_drift=drift, orientation=orientation)


def _psi_half_period(model: NormalModel, s: float, tol: float) -> float:
    """Time for the orbit from (s, 0) to next reach the axis."""
    d = model.delta

    def rhs(t, y):
        gr = abs(y[0]) ** d
        return (-y[1] * gr, y[0] * gr - 1.0)

    def axis(t, y):
        return y[1]

    axis.terminal = 2
    axis.direction = 0
    horizon = 1e4
    sol = solve_ivp(rhs, (0.0, horizon), (s, 0.0), method="DOP853",
                    rtol=0.5 * tol, atol=0.5 * tol, events=axis,
                    dense_output=False)
    hits = sol.t_events[0]
    hits = hits[hits > 1e-9]
    if hits.size == 0:
        raise RuntimeError("orbit did not return to the axis")
    return float(hits[0])


def reconstruct_curve(model: NormalModel, s: float, theta0: float = 0.0,
                      n_halfperiods: int = 2, num: int = 4096,
                      tol: float = 1e-10) -> curves.CurveTrace:
    """Curve with kappa = g(|<c, n>|) rebuilt from the orbit through s.

    Same phase-integral scheme as the radial reconstruction; the
    curvature residual is measured against g(|Re z|) along the orbit.
    """
    if not s > 0.0:
        raise ValueError(f"need a positive starting abscissa, got {s}")
    if n_halfperiods < 1 or num < 8:
        raise ValueError("need n_halfperiods >= 1 and num >= 8")
    d = model.delta
    if abs(s * s ** d - 1.0) < 1e-12:
        t_final = n_halfperiods * math.pi
        ts = np.linspace(0.0, t_final, num)
        points = np.exp(1j * (theta0 + ts))
        z = np.ones(num, dtype=complex)
        return _finish_normal_trace(model, points, ts, z)
    if float(_energy(model, np.asarray(complex(s)))) >= model.G_upper_limit():
        raise ValueError("starting point lies outside the invariant region")

    half = _psi_half_period(model, s, tol)
    t_final = n_halfperiods * half

    def rhs(t, y):
        x, yi, _, _ = y
        gr = abs(x) ** d
        r2 = x * x + yi * yi
        return (-yi * gr, x * gr - 1.0, x / r2, yi / r2)

    ts = np.linspace(0.0, t_final, num)
    sol = solve_ivp(rhs, (0.0, t_final), (s, 0.0, 0.0, 0.0), method="DOP853",
                    rtol=0.5 * tol, atol=0.5 * tol, t_eval=ts)
    if not sol.success:
        raise RuntimeError(f"curve integration failed: {sol.message}")
    z = sol.y[0] + 1j * sol.y[1]
    phase = sol.y[2] + 1j * sol.y[3]
    points = abs(s) * np.exp(1j * theta0 + 1j * phase)
    return _finish_normal_trace(model, points, ts, z)


def _finish_normal_trace(model, points, ts, z) -> curves.CurveTrace:
    diam = curves._diameter(points)
    gap = float(abs(points[-1] - points[0]))
    closed = gap <= 1e-6 * diam
    simple = curves._is_simple(points, diam) if closed else False
    turns = curves.total_turning_of(points, closed) / (2.0 * math.pi)
    winding = int(round(turns)) if closed else None
    a, b, c = points[:-2], points[1:-1], points[2:]
    ab, bc, ca = b - a, c - b, a - c
    cross = np.imag(np.conj(ab) * bc)
    kappa = 2.0 * cross / (np.abs(ab) * np.abs(bc) * np.abs(ca))
    resid = float(np.max(np.abs(kappa - model.g(np.abs(z.real[1:-1])))))
    return curves.CurveTrace(points=points, times=ts, closed=closed,
                             simple=simple, winding_n=winding,
                             max_curvature_residual=resid, closure_gap=gap,
                             diameter=diam, orbit=z)


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class SupplementRecord:
    s: float
    n: int
    residual: float


@dataclass(frozen=True)
class SupplementReport:
    delta: float
    records: Tuple[SupplementRecord, ...]
    predicted_count: Optional[int]
    isochronous: bool
    notes: Tuple[str, ...]


def predicted_supplement_count(delta: float) -> int:
    if delta <= 8.0:
        return 0
    return max(math.ceil(math.sqrt(delta + 1.0)) - 3, 0)


def classify_supplement(delta: float) -> SupplementReport:
    """Closed simple solutions for the normal-coordinate monomial law.

    The unit circle always closes.  delta = 3 is the isochronous case
    whose solutions sweep out every centered ellipse of interior area
    pi; elsewhere non-circular solutions exist only for delta > 8, one
    per integer n >= 3 with nu attaining 1/n strictly inside its range.
    """
    if not delta > 0.0:
        raise ValueError(f"need delta > 0, got {delta}")
    model = normal_model(delta)
    notes = ["the n = 2 level coincides with the limit of nu at 0 and is "
             "excluded as degenerate"]
    if delta == 3.0:
        # nu is 1/2 everywhere, so the ellipse needs four half-periods
        tr = reconstruct_curve(model, 2.0, n_halfperiods=4, num=4096)
        if not tr.closed:
            raise RuntimeError("isochronous ellipse check failed")
        resid = curves.ellipse_residual(tr)
        axes = (float(np.max(np.abs(tr.points.real))),
                float(np.max(np.abs(tr.points.imag))))
        notes.append("isochronous: nu is constant 1/2 and every centered "
                     "ellipse of interior area pi closes; verified at s=2 "
                     f"with semi-axes {axes[0]:.6f}, {axes[1]:.6f} and "
                     f"ellipse residual {resid:.2e}")
        if resid > 1e-6:
            raise RuntimeError("isochronous ellipse check failed")
        return SupplementReport(delta=delta, records=(),
                                predicted_count=None, isochronous=True,
                                notes=tuple(notes))

    nu_sg, _ = nu_limit_at_sg(model)
    nu_zero = nu_limit_at_zero(model)
    lo_val, hi_val = sorted((nu_sg, nu_zero))
    records = []
    n = 2
    while True:
        n += 1
        target = 1.0 / n
        if target <= lo_val + _BOUNDARY_EPS:
            if abs(target - lo_val) <= _BOUNDARY_EPS:
                notes.append(f"n={n} sits on the boundary value of nu: "
                             "degenerate, excluded")
            break
        if target >= hi_val - _BOUNDARY_EPS:
            continue
        a, b = 1e-3, 1.0 - 1e-3
        fa = nu(model, a, 1e-10) - target
        fb = nu(model, b, 1e-10) - target
        if fa * fb > 0.0:
            raise RuntimeError(
                f"no bracket for nu = 1/{n} at delta = {delta}")
        root = float(brentq(lambda u: nu(model, u, 1e-10) - target, a, b,
                            xtol=1e-12))
        residual = abs(nu(model, root, 1e-11) - target)
        records.append(SupplementRecord(s=root, n=n, residual=residual))
    predicted = predicted_supplement_count(delta)
    if len(records) != predicted:
        raise RuntimeError(
            f"found {len(records)} non-circular solutions at delta = "
            f"{delta}, predicted {predicted}")
    return SupplementReport(delta=delta, records=tuple(records),
                            predicted_count=predicted, isochronous=False,
                            notes=tuple(notes))
