"""Solution curves rebuilt from flow orbits.

A curve with curvature f(|c|) is recovered from an orbit z(t) of the
auxiliary flow by the phase integral c(t) = |p| exp(i theta0 +
i int_0^t du/conj(z(u))), with t doubling as arc length.  The phase
integral rides along the orbit integration as two extra state
variables so both see the same step control.  On top of the raw trace:
closure and simplicity checks, a discrete curvature residual as the
end-to-end error metric, an ellipse-fit residual, and SVG/CSV/JSON
export.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.spatial import ConvexHull, QhullError

from . import flow
from ._serialize import csv_text, fmt_float, json_text
from .models import CurvatureModel, eval_f

__all__ = [
    "CurveTrace",
    "reconstruct",
    "simplicity_check",
    "curvature_residual",
    "ellipse_residual",
    "turning_progress",
    "total_turning",
    "orbit_estimate",
    "export",
]

_CLOSURE_REL = 1e-6
_SNAP_REL = 1e-12


@dataclass(frozen=True)
class CurveTrace:
    """Sampled curve c(t) with t an arc-length parameter."""

    points: np.ndarray            # complex samples of c
    times: np.ndarray
    closed: bool
    simple: bool
    winding_n: Optional[int]      # orbit periods traversed, when closed
    max_curvature_residual: float
    closure_gap: float
    diameter: float
    orbit: np.ndarray             # z(t) from the same integration


def _diameter(points: np.ndarray) -> float:
    xy = np.column_stack([points.real, points.imag])
    try:
        hull = xy[ConvexHull(xy).vertices]
    except (QhullError, ValueError):
        hull = xy
    if hull.shape[0] > 512:
        hull = hull[:: hull.shape[0] // 512 + 1]
    d2 = np.sum((hull[:, None, :] - hull[None, :, :]) ** 2, axis=-1)
    return float(np.sqrt(np.max(d2)))


def reconstruct(model: CurvatureModel, s: float, theta0: float = 0.0,
                n_halfperiods: int = 2, num: int = 4096,
                tol: float = 1e-10) -> CurveTrace:
    """Curve through |c(0)| = s whose curvature follows the law.

    Spans n_halfperiods half-periods of the underlying orbit; a trace
    over 2n half-periods closes exactly when the orbit's net winding is
    1/n.  The circular radius (a fixed point of the flow) yields the
    circle directly, with n_halfperiods counting half-turns.
    """
    if not s > 0.0:
        raise ValueError(f"need a positive starting radius, got {s}")
    if n_halfperiods < 1 or num < 8:
        raise ValueError("need n_halfperiods >= 1 and num >= 8")
    if abs(s * float(eval_f(model, s)) - 1.0) < 1e-12:
        return _circle_trace(model, s, theta0, n_halfperiods, num)

    half, _ = flow.section_times(model, complex(s), tol)
    t_final = n_halfperiods * half
    fast_f = flow._scalar_f(model)

    def rhs(t, y):
        x, yi, _, _ = y
        r2 = x * x + yi * yi
        fr = fast_f(math.sqrt(r2))
        return (-yi * fr, x * fr - 1.0, x / r2, yi / r2)

    r_min = 1e-7 * max(1.0, s)

    def near_origin(t, y):
        return y[0] * y[0] + y[1] * y[1] - r_min * r_min

    near_origin.terminal = True

    ts = np.linspace(0.0, t_final, num)
    sol = solve_ivp(rhs, (0.0, t_final), (s, 0.0, 0.0, 0.0), method="DOP853",
                    rtol=0.5 * tol, atol=0.5 * tol, t_eval=ts,
                    events=near_origin)
    origin_hit = sol.status == 1 or (
        sol.success and float(np.min(np.hypot(sol.y[0], sol.y[1]))) < r_min)
    if origin_hit:
        raise RuntimeError(
            "orbit passes through the origin; the phase integral is "
            "undefined on the orbit of 0")
    if not sol.success:
        raise RuntimeError(f"curve integration failed: {sol.message}")
    z = sol.y[0] + 1j * sol.y[1]
    phase = sol.y[2] + 1j * sol.y[3]
    points = s * np.exp(1j * theta0 + 1j * phase)
    return _finish_trace(model, points, ts, z)


def _circle_trace(model: CurvatureModel, s: float, theta0: float,
                  n_halfperiods: int, num: int) -> CurveTrace:
    t_final = n_halfperiods * math.pi * s
    ts = np.linspace(0.0, t_final, num)
    points = s * np.exp(1j * (theta0 + ts / s))
    z = np.full(num, complex(s), dtype=complex)
    return _finish_trace(model, points, ts, z)


def _finish_trace(model, points, ts, z) -> CurveTrace:
    diam = _diameter(points)
    gap = float(abs(points[-1] - points[0]))
    closed = gap <= _CLOSURE_REL * diam
    simple = _is_simple(points, diam) if closed else False
    full_turns = total_turning_of(points, closed) / (2.0 * math.pi)
    winding = int(round(full_turns)) if closed else None
    resid = _max_curvature_residual(model, points, diam)
    return CurveTrace(points=points, times=ts, closed=closed, simple=simple,
                      winding_n=winding, max_curvature_residual=resid,
                      closure_gap=gap, diameter=diam, orbit=z)


# ---------------------------------------------------------------------------
# simplicity: exact predicates on a snapped integer grid


def _orient(p, q, r) -> int:
    v = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    return (v > 0) - (v < 0)


def _on_segment(p, q, r) -> bool:
    return (min(p[0], q[0]) <= r[0] <= max(p[0], q[0])
            and min(p[1], q[1]) <= r[1] <= max(p[1], q[1]))


def _segments_cross(p, q, r, s) -> bool:
    d1 = _orient(r, s, p)
    d2 = _orient(r, s, q)
    d3 = _orient(p, q, r)
    d4 = _orient(p, q, s)
    if ((d1 > 0) != (d2 > 0) or (d1 < 0) != (d2 < 0)) and \
       ((d3 > 0) != (d4 > 0) or (d3 < 0) != (d4 < 0)) and \
       d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True
    if d1 == 0 and _on_segment(r, s, p):
        return True
    if d2 == 0 and _on_segment(r, s, q):
        return True
    if d3 == 0 and _on_segment(p, q, r):
        return True
    if d4 == 0 and _on_segment(p, q, s):
        return True
    return False


def _is_simple(points: np.ndarray, diam: float) -> bool:
    eta = _SNAP_REL * diam
    xi = np.round((points.real - np.min(points.real)) / eta).astype(object)
    yi = np.round((points.imag - np.min(points.imag)) / eta).astype(object)
    verts = [(int(a), int(b)) for a, b in zip(xi, yi)]
    # drop the duplicated closing vertex, then de-duplicate runs
    if verts[-1] == verts[0]:
        verts.pop()
    dedup = [verts[0]]
    for v in verts[1:]:
        if v != dedup[-1]:
            dedup.append(v)
    if dedup[-1] == dedup[0]:
        dedup.pop()
    n = len(dedup)
    if n < 3:
        return False
    segs = [(dedup[i], dedup[(i + 1) % n]) for i in range(n)]

    cell = max(int(math.ceil(max(
        max(abs(a[0] - b[0]), abs(a[1] - b[1])) for a, b in segs))), 1)
    buckets: dict = {}
    for i, (a, b) in enumerate(segs):
        for cx in range(min(a[0], b[0]) // cell, max(a[0], b[0]) // cell + 1):
            for cy in range(min(a[1], b[1]) // cell,
                            max(a[1], b[1]) // cell + 1):
                buckets.setdefault((cx, cy), []).append(i)
    checked = set()
    for members in buckets.values():
        for ii in range(len(members)):
            for jj in range(ii + 1, len(members)):
                i, j = members[ii], members[jj]
                if (i, j) in checked:
                    continue
                checked.add((i, j))
                if abs(i - j) <= 1 or abs(i - j) == n - 1:
                    continue
                if _segments_cross(*segs[i], *segs[j]):
                    return False
    return True


def simplicity_check(trace: CurveTrace) -> bool:
    """Whether a closed trace is free of self-intersections."""
    if not trace.closed:
        raise ValueError("simplicity is defined for closed traces only")
    return _is_simple(trace.points, trace.diameter)


# ---------------------------------------------------------------------------
# curvature residual: circumscribed-circle curvature vs the law


def _max_curvature_residual(model, points: np.ndarray, diam: float) -> float:
    if points.size < 5:
        raise ValueError("need at least 5 points for a curvature residual")
    a, b, c = points[:-2], points[1:-1], points[2:]
    ab, bc, ca = b - a, c - b, a - c
    lab, lbc, lca = np.abs(ab), np.abs(bc), np.abs(ca)
    if min(float(np.min(lab)), float(np.min(lbc))) < 1e-14 * diam:
        raise ValueError("degenerate spacing between consecutive samples")
    cross = np.imag(np.conj(ab) * bc)
    kappa = 2.0 * cross / (lab * lbc * lca)
    return float(np.max(np.abs(kappa - eval_f(model, np.abs(b)))))


def curvature_residual(model: CurvatureModel, trace: CurveTrace) -> float:
    """Max deviation of discrete curvature from f(|c|) over the trace."""
    return _max_curvature_residual(model, trace.points, trace.diameter)


# ---------------------------------------------------------------------------
# turning and the orbit correspondence


def _points_of(trace_or_points) -> np.ndarray:
    if isinstance(trace_or_points, CurveTrace):
        return trace_or_points.points
    return np.asarray(trace_or_points, dtype=complex)


def total_turning_of(points: np.ndarray, closed: bool) -> float:
    segs = np.diff(points)
    segs = segs[np.abs(segs) > 0.0]
    if closed:
        segs = np.append(segs, segs[0])
    d = np.diff(np.angle(segs))
    d = (d + math.pi) % (2.0 * math.pi) - math.pi
    return float(np.sum(d))


def turning_progress(trace: CurveTrace) -> np.ndarray:
    """Cumulative tangent turning along the trace, in radians."""
    segs = np.diff(trace.points)
    d = np.diff(np.angle(segs))
    d = (d + math.pi) % (2.0 * math.pi) - math.pi
    return np.concatenate([[0.0], np.cumsum(d)])


def total_turning(trace: CurveTrace) -> float:
    """Total tangent turning; +-2 pi for a simple closed trace."""
    return total_turning_of(trace.points, trace.closed)


def orbit_estimate(trace: CurveTrace) -> np.ndarray:
    """Flow states recovered from the curve alone: -i conj(c) e^{i theta_c}.

    Uses centered differences for the unit tangent, so the ends are one
    order less accurate; compare interior samples against trace.orbit.
    """
    c = trace.points
    t = trace.times
    tang = np.empty_like(c)
    tang[1:-1] = (c[2:] - c[:-2]) / (t[2:] - t[:-2])
    tang[0] = (c[1] - c[0]) / (t[1] - t[0])
    tang[-1] = (c[-1] - c[-2]) / (t[-1] - t[-2])
    tang = tang / np.abs(tang)
    return -1j * np.conj(c) * tang


# ---------------------------------------------------------------------------
# ellipse fit


def ellipse_residual(trace_or_points) -> float:
    """Max distance to the best-fit ellipse, as a fraction of diameter.

    Fits the conic algebraically with the ellipse-specific constraint
    4ac - b^2 = 1, then measures first-order geometric (Sampson)
    distances on diameter-normalized coordinates.
    """
    pts = _points_of(trace_or_points)
    if pts.size < 6:
        raise ValueError("need at least 6 points to fit an ellipse")
    diam = _diameter(pts)
    if not diam > 0.0:
        raise ValueError("degenerate point set")
    w = (pts - np.mean(pts)) / diam
    x, y = w.real, w.imag
    D1 = np.column_stack([x * x, x * y, y * y])
    D2 = np.column_stack([x, y, np.ones_like(x)])
    S1 = D1.T @ D1
    S2 = D1.T @ D2
    S3 = D2.T @ D2
    T = -np.linalg.solve(S3, S2.T)
    M = S1 + S2 @ T
    M = np.array([M[2] / 2.0, -M[1], M[0] / 2.0])
    vals, vecs = np.linalg.eig(M)
    disc = 4.0 * vecs[0] * vecs[2] - vecs[1] ** 2
    ok = np.flatnonzero((disc > 0.0) & np.isfinite(vals))
    if ok.size == 0:
        raise ValueError("no ellipse fits these points")
    a1 = vecs[:, ok[np.argmin(np.abs(vals[ok]))]]
    theta = np.concatenate([a1, T @ a1])
    A, B, C, D, E, F = theta
    Q = A * x * x + B * x * y + C * y * y + D * x + E * y + F
    gx = 2.0 * A * x + B * y + D
    gy = B * x + 2.0 * C * y + E
    grad = np.hypot(gx, gy)
    return float(np.max(np.abs(Q) / np.maximum(grad, 1e-300)))


# ---------------------------------------------------------------------------
# export


def export(traces: Union[CurveTrace, Sequence[CurveTrace]], fmt: str,
           path: str) -> str:
    """Write one or more traces as svg, csv or json; returns the path."""
    if isinstance(traces, CurveTrace):
        traces = [traces]
    traces = list(traces)
    if not traces or any(t.points.size == 0 for t in traces):
        raise ValueError("nothing to export")
    if fmt == "svg":
        text = _svg_text(traces)
    elif fmt == "csv":
        text = _csv_trace_text(traces)
    elif fmt == "json":
        text = json_text({"curves": [_trace_record(t) for t in traces]})
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path


def _trace_record(t: CurveTrace) -> dict:
    return {
        "t": t.times,
        "re": t.points.real,
        "im": t.points.imag,
        "closed": t.closed,
        "simple": t.simple,
        "winding_n": t.winding_n,
        "max_curvature_residual": t.max_curvature_residual,
        "closure_gap": t.closure_gap,
        "diameter": t.diameter,
    }


def _csv_trace_text(traces) -> str:
    if len(traces) == 1:
        t = traces[0]
        rows = zip(t.times, t.points.real, t.points.imag)
        return csv_text(("t", "re", "im"), rows)
    rows = []
    for k, t in enumerate(traces):
        rows.extend((k, tt, xr, xi) for tt, xr, xi
                    in zip(t.times, t.points.real, t.points.imag))
    return csv_text(("curve", "t", "re", "im"), rows)


_SVG_STROKES = ("#000000", "#aa2200", "#0055bb", "#118833", "#886600")


def _svg_text(traces) -> str:
    xs = np.concatenate([t.points.real for t in traces])
    ys = np.concatenate([-t.points.imag for t in traces])
    x0, x1 = float(np.min(xs)), float(np.max(xs))
    y0, y1 = float(np.min(ys)), float(np.max(ys))
    span = max(x1 - x0, y1 - y0, 1e-12)
    pad = 0.05 * span
    vb = (x0 - pad, y0 - pad, (x1 - x0) + 2 * pad, (y1 - y0) + 2 * pad)
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="%s" '
        'width="640" height="640">' % " ".join("%.8g" % v for v in vb)]
    for k, t in enumerate(traces):
        coords = " L ".join("%.8g %.8g" % (p.real, -p.imag)
                            for p in t.points[:: max(1, t.points.size // 4000)])
        tail = " Z" if t.closed else ""
        parts.append(
            '<path d="M %s%s" fill="none" stroke="%s" stroke-width="%.8g"/>'
            % (coords, tail, _SVG_STROKES[k % len(_SVG_STROKES)],
               0.004 * span))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
