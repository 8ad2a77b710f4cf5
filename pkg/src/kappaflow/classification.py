"""Which curvature laws admit closed simple curves, and how many.

For a law with f, f' and F'' all sign-definite, the position of the
interval I_f relative to [-1, 1] decides everything: disjoint means all
periodic orbits wind more than once (no simple closed curve), inside
means nothing closes up at all, -1 inside gives exactly one circle, and
1 inside opens the door to non-circular ovals at radii where the
winding profile passes through 1/n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import flow, winding
from .models import CurvatureModel, eval_f, monomial

__all__ = [
    "JordanRecord",
    "ClassificationReport",
    "taxonomy",
    "jordan_set",
    "classify",
    "classify_monomial",
    "predicted_count",
]

_CASES = ("If_disjoint_unit", "If_inside_unit", "minus_one_in_If", "one_in_If")

_GRID_POINTS = 200
_ROOT_QUAD_TOL = 1e-10
_BISECT_WIDTH = 1e-12
_BOUNDARY_EPS = 1e-9


@dataclass(frozen=True)
class JordanRecord:
    """A non-circular simple closed solution class: omega(s) = 1/n."""

    s: float
    n: int
    residual: float           # |omega_ode(s) - 1/n|, independent check


@dataclass(frozen=True)
class ClassificationReport:
    model: CurvatureModel
    taxonomy_case: Optional[str]
    circle_solutions: tuple        # (radius, orientation) pairs
    jordan_set_Of: tuple           # JordanRecord entries
    predicted_count: Optional[int]
    monotone_certified: Optional[bool]
    notes: tuple


def taxonomy(model: CurvatureModel) -> str:
    """Position of I_f relative to the unit interval, for sign-definite laws."""
    if not model.in_family:
        raise ValueError(
            f"law {model.spec!r} has a zero of f, f' or F''; "
            "the interval taxonomy needs all three sign-definite")
    lo, hi = model.interval_If
    if hi <= -1.0 or lo >= 1.0:
        return "If_disjoint_unit"
    if lo >= -1.0 and hi <= 1.0:
        return "If_inside_unit"
    if lo < -1.0 < hi:
        return "minus_one_in_If"
    if lo < 1.0 < hi:
        return "one_in_If"
    raise ValueError(f"interval {model.interval_If} defeats the taxonomy")


def _circle_solutions(model: CurvatureModel) -> tuple:
    """Radii and orientations of the circular solutions (curvature 1/r)."""
    out = []
    seen = []
    for fp in flow.fixed_points(model):
        r = abs(fp.z)
        if any(abs(r - q) <= 1e-12 * (1.0 + q) for q in seen):
            continue
        seen.append(r)
        orientation = 1 if float(eval_f(model, r)) > 0.0 else -1
        out.append((r, orientation))
    return tuple(out)


def _certify_monotone(values: np.ndarray, errors: np.ndarray):
    """(certified, direction) on a grid: margin must beat 10x the noise."""
    d = np.diff(values)
    margin = 10.0 * float(np.max(errors))
    if np.all(d < -margin):
        return True, "decreasing"
    if np.all(d > margin):
        return True, "increasing"
    return False, None


def jordan_set(model: CurvatureModel,
               omega_profile: Optional[winding.WindingProfile] = None,
               grid_points: int = _GRID_POINTS):
    """Roots of omega(s) = 1/n, n >= 2, refined by bisection.

    Returns (records, certified, notes).  Candidate n come from the open
    interval between 1/omega(0+) and 1/omega(s_f-); when the profile is
    not certified monotone every grid sign change is scanned and the
    notes flag that the count is not certified.
    """
    if not model.in_family_star:
        raise ValueError(
            f"law {model.spec!r} is outside the class with 1 in I_f; "
            "no non-circular simple closed solutions to search for")
    s_f = model.s_f
    if omega_profile is None:
        grid = np.linspace(1e-3 * s_f, (1.0 - 1e-3) * s_f, grid_points)
        omega_profile = winding.winding_profile(model, grid=grid,
                                                tol=_ROOT_QUAD_TOL)
    grid = omega_profile.grid
    om = omega_profile.omega
    certified, direction = _certify_monotone(om, omega_profile.est_error)

    notes = []
    lim0 = omega_profile.limit_at_zero
    lim1 = omega_profile.limit_at_sf
    lo_n = 0.0 if math.isinf(lim0) else 1.0 / lim0
    hi_n = 1.0 / lim1

    n_lo, n_hi = (lo_n, hi_n) if lo_n < hi_n else (hi_n, lo_n)
    candidates = set()
    for n in range(2, int(math.floor(n_hi + 1.0)) + 2):
        if n_lo + _BOUNDARY_EPS < n < n_hi - _BOUNDARY_EPS:
            candidates.add(n)
        elif abs(n - n_hi) <= _BOUNDARY_EPS or abs(n - n_lo) <= _BOUNDARY_EPS:
            notes.append(f"n={n} sits on the admissible boundary: "
                         "degenerate, excluded")
    if not certified:
        notes.append("winding profile not certified monotone on the grid; "
                     "the root count below is numerical, not certified")
        # sign changes can put extra 1/n values in range
        m_lo, m_hi = float(np.min(om)), float(np.max(om))
        for n in range(2, int(math.floor(1.0 / max(m_lo, 1e-12))) + 1):
            if m_lo < 1.0 / n < m_hi:
                candidates.add(n)

    records = []
    for n in sorted(candidates):
        target = 1.0 / n
        brackets = []
        g = om - target
        hit = np.flatnonzero(g[:-1] * g[1:] < 0.0)
        for i in hit:
            brackets.append((float(grid[i]), float(grid[i + 1])))
        exact = np.flatnonzero(g == 0.0)
        for i in exact:
            records.append(_polish(model, float(grid[i]), n))
        if not brackets and not exact.size and certified:
            ext = _edge_bracket(model, grid, target, s_f)
            if ext is None:
                raise ValueError(
                    f"profile too coarse to bracket omega = 1/{n} for "
                    f"{model.spec!r}; refine the grid")
            brackets.append(ext)
        for a, b in brackets:
            fa = winding.omega_quadrature(model, a, _ROOT_QUAD_TOL) - target
            fb = winding.omega_quadrature(model, b, _ROOT_QUAD_TOL) - target
            while b - a > _BISECT_WIDTH:
                mid = 0.5 * (a + b)
                fm = winding.omega_quadrature(model, mid, _ROOT_QUAD_TOL) - target
                if fm == 0.0:
                    a = b = mid
                    break
                if fa * fm < 0.0:
                    b, fb = mid, fm
                else:
                    a, fa = mid, fm
            records.append(_polish(model, 0.5 * (a + b), n))
    records.sort(key=lambda rec: rec.s)
    return tuple(records), certified, tuple(notes)


def _edge_bracket(model, grid, target, s_f):
    """Bracket a root lying between the grid and one of the endpoints."""
    for a, b in ((1e-8 * s_f, float(grid[0])),
                 (float(grid[-1]), (1.0 - 1e-7) * s_f)):
        fa = winding.omega_quadrature(model, a, _ROOT_QUAD_TOL) - target
        fb = winding.omega_quadrature(model, b, _ROOT_QUAD_TOL) - target
        if fa * fb < 0.0:
            return a, b
    return None


def _polish(model: CurvatureModel, s: float, n: int) -> JordanRecord:
    """One Newton step at tight tolerance, then the independent residual."""
    target = 1.0 / n
    slope = winding.omega_prime(model, s, 1e-12)
    if slope != 0.0:
        step = (winding.omega_quadrature(model, s, 1e-13) - target) / slope
        if abs(step) < 1e-6 * model.s_f:
            s = s - step
    residual = abs(winding.omega_ode(model, s, 1e-11) - target)
    return JordanRecord(s=s, n=n, residual=residual)


def predicted_count(delta: float) -> int:
    """Number of non-circular simple closed solution classes for s^delta."""
    if delta <= 3.0:
        return 0
    return math.ceil(math.sqrt(delta + 1.0)) - 2


def classify(model: CurvatureModel) -> ClassificationReport:
    """Full classification of the simple closed solutions of a law."""
    case = taxonomy(model)
    circles = _circle_solutions(model)
    records: tuple = ()
    certified: Optional[bool] = None
    notes: tuple = ()
    predicted: Optional[int] = None
    if case in ("If_disjoint_unit", "If_inside_unit"):
        if circles:
            raise RuntimeError(
                f"taxonomy {case} forbids circular solutions but "
                f"{model.spec!r} produced {circles}")
    elif case == "minus_one_in_If":
        if len(circles) != 1:
            raise RuntimeError(
                f"expected exactly one circular solution for {model.spec!r}, "
                f"found {len(circles)}")
    else:
        records, certified, notes = jordan_set(model)
        if certified:
            lim0 = winding.omega_limit_at_zero(model)
            lim1 = winding.omega_limit_at_sf(model).omega
            lo_n = 0.0 if math.isinf(lim0) else 1.0 / lim0
            n_lo, n_hi = sorted((lo_n, 1.0 / lim1))
            predicted = sum(
                1 for n in range(2, int(math.floor(n_hi + 1.0)) + 2)
                if n_lo + _BOUNDARY_EPS < n < n_hi - _BOUNDARY_EPS)
            if predicted != len(records):
                raise RuntimeError(
                    f"certified monotone profile for {model.spec!r} promised "
                    f"{predicted} solution classes, found {len(records)}")
    return ClassificationReport(
        model=model, taxonomy_case=case, circle_solutions=circles,
        jordan_set_Of=records, predicted_count=predicted,
        monotone_certified=certified, notes=notes)


def classify_monomial(a: float, delta: float) -> ClassificationReport:
    """Classification for the law a*s^delta over all exponent regimes."""
    if not a > 0.0:
        raise ValueError(f"amplitude must be positive, got {a}")
    model = monomial(a, delta)
    if delta == -1.0:
        if a == 1.0:
            return ClassificationReport(
                model=model, taxonomy_case=None, circle_solutions=(),
                jordan_set_Of=(), predicted_count=None,
                monotone_certified=None,
                notes=("every circle centered at the origin solves this law; "
                       "the radius is arbitrary",))
        return ClassificationReport(
            model=model, taxonomy_case=None, circle_solutions=(),
            jordan_set_Of=(), predicted_count=None, monotone_certified=None,
            notes=("no simple closed solutions: the curvature a/|c| closes "
                   "a circle only when a = 1",))
    if delta == 0.0:
        return ClassificationReport(
            model=model, taxonomy_case=None,
            circle_solutions=((1.0 / a, 1),), jordan_set_Of=(),
            predicted_count=0, monotone_certified=None,
            notes=("constant curvature: circles of radius 1/a about any "
                   "center; the law never refers to the origin",))
    report = classify(model)
    if delta > 3.0:
        want = predicted_count(delta)
        if report.monotone_certified and len(report.jordan_set_Of) != want:
            raise RuntimeError(
                f"count formula promised {want} classes for delta={delta}, "
                f"search found {len(report.jordan_set_Of)}")
        report = ClassificationReport(
            model=report.model, taxonomy_case=report.taxonomy_case,
            circle_solutions=report.circle_solutions,
            jordan_set_Of=report.jordan_set_Of, predicted_count=want,
            monotone_certified=report.monotone_certified, notes=report.notes)
    return report
