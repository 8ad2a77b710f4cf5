"""Singular quadrature over a potential well.

Both period-like integrals in this package have the same shape: an
integrand with inverse-square-root singularities at the two radii s and
s* where a convex potential V takes a common value.  Factoring
V(s) - V(u) = (u - s)(s* - u) R(u) with R smooth and positive and
substituting u = (s + s*)/2 + ((s* - s)/2) cos(theta) turns them into
smooth periodic integrals, which the midpoint rule resolves with
spectral accuracy.  Node counts double until two refinements agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

__all__ = ["PotentialWell", "WellIntegral", "series_ratio_coeffs"]

_ENDPOINT_CUT = 1e-8     # switch R(u) to its endpoint series inside this fraction of s*-s
_SERIES_CUT = 1e-3       # switch well ratios to Taylor series inside this fraction of s0
_N_START = 64
_N_MAX = 1 << 18


@dataclass(frozen=True)
class WellIntegral:
    value: float
    error_estimate: float
    nodes: int


def _poly_div_trunc(num: np.ndarray, den: np.ndarray, terms: int) -> np.ndarray:
    """Coefficients of num/den as a power series, truncated to `terms`."""
    out = np.zeros(terms)
    rem = np.zeros(terms)
    rem[: min(terms, num.size)] = num[:terms]
    d0 = den[0]
    for k in range(terms):
        c = rem[k] / d0
        out[k] = c
        top = min(terms - k, den.size)
        rem[k: k + top] -= c * den[:top]
    return out


def series_ratio_coeffs(taylor: np.ndarray, terms: int = 4):
    """Series data for the ratios V/V', V''V/(V')^2 and K = V/(V')^2 near s0.

    `taylor` holds derivative values (V2, V3, V4, ...) at the well minimum.
    Returns (A, C, K) where V/V' = sigma*A(sigma), V''V/(V')^2 = A(sigma)*C(sigma)
    and K(sigma) are plain power series in sigma = u - s0.
    """
    v = np.asarray(taylor, dtype=float)
    n = v.size
    # V/sigma^2, V'/sigma and V'' as series in sigma
    v_over = np.array([v[k] / math.factorial(k + 2) for k in range(n)])
    v1_over = np.array([v[k] / math.factorial(k + 1) for k in range(n)])
    v2_ser = np.array([v[k] / math.factorial(k) for k in range(n)])
    A = _poly_div_trunc(v_over, v1_over, terms)
    C = _poly_div_trunc(v2_ser, v1_over, terms)
    den = np.zeros(2 * n)
    for i in range(n):
        for j in range(n):
            den[i + j] += v1_over[i] * v1_over[j]
    K = _poly_div_trunc(v_over, den, terms)
    return A, C, K


class PotentialWell:
    """Convex potential with V(s0) = 0 and the machinery built on it.

    Parameters
    ----------
    V, V1, V2 : callables for the potential and its first two derivatives,
        vectorized over positive radii.
    s0 : location of the non-degenerate minimum, V(s0) = 0.
    taylor : derivative values (V2, V3, V4, ...) at s0, at least three.
    """

    def __init__(self, V: Callable, V1: Callable, V2: Callable,
                 s0: float, taylor, V3: Optional[Callable] = None) -> None:
        self.V = V
        self.V1 = V1
        self.V2 = V2
        self._V3_exact = V3
        self.s0 = float(s0)
        self.taylor = np.asarray(taylor, dtype=float)
        if self.taylor.size < 3:
            raise ValueError("need at least (V2, V3, V4) at the minimum")
        if not self.taylor[0] > 0.0:
            raise ValueError("well minimum must be non-degenerate (V'' > 0)")
        self._A, self._C, self._K = series_ratio_coeffs(self.taylor, terms=max(4, self.taylor.size))

    # -- reflection ---------------------------------------------------------

    def reflect(self, s: float) -> float:
        """The radius s* > s0 with V(s*) = V(s), for 0 < s < s0."""
        if not 0.0 < s < self.s0:
            raise ValueError(f"reflection needs 0 < s < {self.s0}, got {s}")
        level = float(self.V(s))
        hi = self.s0 * 2.0
        for _ in range(200):
            if float(self.V(hi)) > level:
                break
            hi *= 2.0
        else:
            raise ValueError("could not bracket the reflected radius")
        return float(brentq(lambda u: float(self.V(u)) - level, self.s0, hi,
                            xtol=1e-300, rtol=8.9e-16))

    # -- factorization ------------------------------------------------------

    def _R(self, u: np.ndarray, s: float, s_star: float, level: float) -> np.ndarray:
        """(V(s) - V(u)) / ((u - s)(s* - u)), stable at both endpoints."""
        u = np.asarray(u, dtype=float)
        width = s_star - s
        R = np.empty_like(u)
        # the difference level - V(u) loses all bits within eps*|level|/|V'|
        # of an endpoint, so the series zone must widen when V' is small there
        eps = np.finfo(float).eps
        floor = 1e-300
        cancel = 256.0 * eps * abs(level)

        def cut_at(end: float) -> float:
            v1 = float(self.V1(end))
            v2 = float(self.V2(end))
            cut = max(_ENDPOINT_CUT * width,
                      min(cancel / max(abs(v1), floor), 1e-3 * width))
            # the linearized numerator changes sign at 2|V1|/|V2|; stay
            # well inside when the two derivatives pull opposite ways
            if v1 * v2 < 0.0:
                cut = min(cut, 0.25 * abs(v1) / max(abs(v2), floor))
            return cut

        near_lo = u - s < cut_at(s)
        near_hi = s_star - u < cut_at(s_star)
        mid = ~(near_lo | near_hi)
        if np.any(mid):
            um = u[mid]
            R[mid] = (level - self.V(um)) / ((um - s) * (s_star - um))
        if np.any(near_lo):
            ul = u[near_lo]
            R[near_lo] = -(self.V1(s) + 0.5 * self.V2(s) * (ul - s)) / (s_star - ul)
        if np.any(near_hi):
            uh = u[near_hi]
            R[near_hi] = (self.V1(s_star) - 0.5 * self.V2(s_star) * (s_star - uh)) / (uh - s)
        return R

    # -- quadrature ---------------------------------------------------------

    def integrate(self, s: float, g: Callable, tol: float,
                  weight: str = "inverse_sqrt",
                  s_star: Optional[float] = None) -> WellIntegral:
        """Integral of g(u) against the singular weight between s and s*.

        weight "inverse_sqrt": integral of g(u)/sqrt(V(s) - V(u)) du;
        weight "sqrt": integral of g(u)*sqrt(V(s) - V(u)) du.
        """
        if tol <= 0.0:
            raise ValueError("tolerance must be positive")
        if s_star is None:
            s_star = self.reflect(s)
        level = float(self.V(s))
        m = 0.5 * (s + s_star)
        r = 0.5 * (s_star - s)

        def midpoint(n: int) -> float:
            theta = (np.arange(n) + 0.5) * (math.pi / n)
            u = m + r * np.cos(theta)
            R = self._R(u, s, s_star, level)
            vals = g(u)
            if weight == "inverse_sqrt":
                h = vals / np.sqrt(R)
            elif weight == "sqrt":
                h = vals * np.sqrt(R) * (r * np.sin(theta)) ** 2
            else:
                raise ValueError(f"unknown weight {weight!r}")
            return float(np.sum(h)) * math.pi / n

        n = _N_START
        prev = midpoint(n)
        err = math.inf
        while n <= _N_MAX:
            n *= 2
            cur = midpoint(n)
            err = abs(cur - prev)
            if err <= max(tol, 8.0 * np.finfo(float).eps * abs(cur)):
                return WellIntegral(value=cur, error_estimate=err, nodes=n)
            prev = cur
        return WellIntegral(value=prev, error_estimate=err, nodes=n)

    # -- ratios with removable singularities at s0 --------------------------

    def ratio_V_over_V1(self, u) -> np.ndarray:
        """V(u)/V'(u), series-continued across the 0/0 at s0."""
        u = np.asarray(u, dtype=float)
        sig = u - self.s0
        near = np.abs(sig) < _SERIES_CUT * max(self.s0, 1.0)
        out = np.empty_like(u)
        if np.any(~near):
            uf = u[~near]
            out[~near] = self.V(uf) / self.V1(uf)
        if np.any(near):
            sn = sig[near]
            out[near] = sn * np.polyval(self._A[::-1], sn)
        return out

    def ratio_VV2_over_V1sq(self, u) -> np.ndarray:
        """V(u) V''(u) / V'(u)^2; tends to 1/2 at s0."""
        u = np.asarray(u, dtype=float)
        sig = u - self.s0
        near = np.abs(sig) < _SERIES_CUT * max(self.s0, 1.0)
        out = np.empty_like(u)
        if np.any(~near):
            uf = u[~near]
            out[~near] = self.V(uf) * self.V2(uf) / self.V1(uf) ** 2
        if np.any(near):
            sn = sig[near]
            out[near] = np.polyval(self._A[::-1], sn) * np.polyval(self._C[::-1], sn)
        return out

    def K_second(self, u) -> np.ndarray:
        """Second derivative of K = V/(V')^2, series-continued at s0."""
        u = np.asarray(u, dtype=float)
        sig = u - self.s0
        near = np.abs(sig) < _SERIES_CUT * max(self.s0, 1.0)
        out = np.empty_like(u)
        if np.any(~near):
            uf = u[~near]
            V, V1, V2 = self.V(uf), self.V1(uf), self.V2(uf)
            V3 = self._V3(uf)
            out[~near] = (-2.0 * V * V3 * V1 - 3.0 * V1 ** 2 * V2 + 6.0 * V * V2 ** 2) / V1 ** 4
        if np.any(near):
            sn = sig[near]
            kpp = np.polynomial.polynomial.polyder(self._K, 2)
            out[near] = np.polyval(kpp[::-1], sn)
        return out

    def K_first(self, u) -> np.ndarray:
        """First derivative of K = V/(V')^2, series-continued at s0."""
        u = np.asarray(u, dtype=float)
        sig = u - self.s0
        near = np.abs(sig) < _SERIES_CUT * max(self.s0, 1.0)
        out = np.empty_like(u)
        if np.any(~near):
            uf = u[~near]
            V, V1, V2 = self.V(uf), self.V1(uf), self.V2(uf)
            out[~near] = (V1 ** 2 - 2.0 * V * V2) / V1 ** 3
        if np.any(near):
            sn = sig[near]
            kp = np.polynomial.polynomial.polyder(self._K, 1)
            out[near] = np.polyval(kp[::-1], sn)
        return out

    def _V3(self, u) -> np.ndarray:
        """Third derivative, exact when supplied, else differences of V2."""
        if self._V3_exact is not None:
            return self._V3_exact(u)
        h = 1e-5 * max(self.s0, 1.0)
        return (self.V2(u + h) - self.V2(u - h)) / (2.0 * h)
