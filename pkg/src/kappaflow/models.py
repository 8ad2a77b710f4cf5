"""Curvature laws f(s) and their normalized potentials.

A model bundles a curvature law f : (0, inf) -> R with the closed-form
antiderivative F of s*f(s) - 1 and the scalar constants everything else
derives from it: the sign eps_f making eps_f*F'' > 0, the open interval
I_f spanned by eps_f*s*f(s), and (when it exists) the radius s_f of the
unique circular solution, the root of s*f(s) = eps_f.

Two kinds are supported: monomials f(s) = a*s^delta and a fixed registry
of named example laws.  F is always stored in closed form, never by
numeric integration, and is normalized to vanish at the distinguished
radius (s_f when present, else the radius of the circular fixed point,
else s = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "CurvatureModel",
    "PotentialEval",
    "EXAMPLE_IDS",
    "monomial",
    "example",
    "parse_model_spec",
    "eval_f",
    "eval_f_prime",
    "eval_F",
    "eval_F2",
    "fixed_radius",
    "potential_eval",
    "sf_derivatives",
]

_INF = math.inf


@dataclass(frozen=True)
class CurvatureModel:
    """A curvature law with its derived constants.

    Scalar fields are precomputed by the factory functions; instances are
    immutable and safe to share across threads.
    """

    kind: str                       # "monomial" | "example"
    spec: str                       # canonical spec string, serialized verbatim
    a: float = 1.0                  # monomial scale (1.0 for named examples)
    delta: float = 0.0              # monomial exponent
    example_id: Optional[str] = None
    eps_f: int = 1                  # sign with eps_f * F'' > 0 (best effort outside the family)
    s_f: Optional[float] = None     # root of s*f(s) = eps_f, when it exists
    interval_If: tuple = (0.0, 0.0)
    in_family: bool = False         # f * f' * F'' never vanishes on (0, inf)
    in_family_star: bool = False    # in_family and 1 inside interval_If
    origin_limit: float = 0.0       # lim_{s->0} s*|f(s)|
    infinity_limit: float = 0.0     # lim_{s->inf} s*|f(s)|


@dataclass(frozen=True)
class PotentialEval:
    """F and its first derivative at s, plus F'', F''', F'''' at s_f."""

    s: float
    F: float
    F1: float
    F2plus: Optional[tuple]         # (F2, F3, F4) at s_f; None when s_f absent


# ---------------------------------------------------------------------------
# named example registry


@dataclass(frozen=True)
class _ExampleDef:
    id: str
    f: Callable
    f_prime: Callable
    F: Callable                     # normalized antiderivative of s*f(s) - 1
    F2: Callable                    # F'' = f + s*f'
    eps: int
    s_f: Optional[float]
    interval: tuple
    in_family: bool
    in_family_star: bool
    origin_limit: float
    infinity_limit: float
    sf_derivs: Optional[tuple]      # exact (F2, F3, F4) at s_f when known


_SQ3 = math.sqrt(3.0)

_EXAMPLES = {}


def _register(defn: _ExampleDef) -> None:
    _EXAMPLES[defn.id] = defn


_register(_ExampleDef(
    id="s",
    f=lambda s: s,
    f_prime=lambda s: np.ones_like(np.asarray(s, dtype=float)),
    F=lambda s: s ** 3 / 3.0 - s + 2.0 / 3.0,
    F2=lambda s: 2.0 * s,
    eps=1,
    s_f=1.0,
    interval=(0.0, _INF),
    in_family=True,
    in_family_star=True,
    origin_limit=0.0,
    infinity_limit=_INF,
    sf_derivs=(2.0, 2.0, 0.0),
))

_register(_ExampleDef(
    id="1/(1+s)",
    f=lambda s: 1.0 / (1.0 + s),
    f_prime=lambda s: -1.0 / (1.0 + s) ** 2,
    F=lambda s: np.log(2.0 / (1.0 + s)),
    F2=lambda s: 1.0 / (1.0 + s) ** 2,
    eps=1,
    s_f=None,
    interval=(0.0, 1.0),
    in_family=True,
    in_family_star=False,
    origin_limit=0.0,
    infinity_limit=1.0,
    sf_derivs=None,
))

_register(_ExampleDef(
    id="1/s^2",
    f=lambda s: s ** -2.0,
    f_prime=lambda s: -2.0 * s ** -3.0,
    F=lambda s: np.log(s) - s + 1.0,
    F2=lambda s: -(s ** -2.0),
    eps=-1,
    s_f=None,
    interval=(-_INF, 0.0),
    in_family=True,
    in_family_star=False,
    origin_limit=_INF,
    infinity_limit=0.0,
    sf_derivs=None,
))

_register(_ExampleDef(
    id="1/s",
    f=lambda s: 1.0 / s,
    f_prime=lambda s: -(s ** -2.0),
    F=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
    F2=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
    eps=1,                          # F'' vanishes identically; sign is a convention here
    s_f=None,
    interval=(1.0, 1.0),
    in_family=False,
    in_family_star=False,
    origin_limit=1.0,
    infinity_limit=1.0,
    sf_derivs=None,
))

_register(_ExampleDef(
    id="(1+3s^4)/(s+3s^3)",
    f=lambda s: (1.0 + 3.0 * s ** 4) / (s + 3.0 * s ** 3),
    f_prime=lambda s: (12.0 * s ** 3 * (s + 3.0 * s ** 3)
                       - (1.0 + 3.0 * s ** 4) * (1.0 + 9.0 * s ** 2))
                      / (s + 3.0 * s ** 3) ** 2,
    F=lambda s: (s ** 3 / 3.0 - 4.0 * s / 3.0
                 + (4.0 * _SQ3 / 9.0) * np.arctan(_SQ3 * s)
                 + 1.0 - 4.0 * _SQ3 * math.pi / 27.0),
    F2=lambda s: _quartic_F2(s),
    eps=1,
    s_f=1.0,
    interval=(1.0, _INF),
    in_family=False,                # f' vanishes near s = 0.83
    in_family_star=False,
    origin_limit=1.0,
    infinity_limit=_INF,
    sf_derivs=None,                 # filled numerically on demand
))


def _quartic_F2(s):
    # F'' = d/ds [ s^2 - 4/3 + (4/3)/(3s^2+1) ] = 2s - 8s/(3s^2+1)^2
    s = np.asarray(s, dtype=float)
    return 2.0 * s - 8.0 * s / (3.0 * s ** 2 + 1.0) ** 2


_register(_ExampleDef(
    id="3-2/s",
    f=lambda s: 3.0 - 2.0 / s,
    f_prime=lambda s: 2.0 * s ** -2.0,
    F=lambda s: 1.5 * (s - 1.0) ** 2,
    F2=lambda s: np.full_like(np.asarray(s, dtype=float), 3.0),
    eps=1,
    s_f=1.0,
    interval=(-2.0, _INF),
    in_family=False,                # f vanishes at s = 2/3
    in_family_star=False,
    origin_limit=2.0,
    infinity_limit=_INF,
    sf_derivs=(3.0, 0.0, 0.0),
))

_register(_ExampleDef(
    id="e^{-s}/s",
    f=lambda s: np.exp(-s) / s,
    f_prime=lambda s: -np.exp(-s) * (1.0 + s) / s ** 2,
    F=lambda s: math.exp(-1.0) + 1.0 - np.exp(-s) - s,
    F2=lambda s: -np.exp(-s),
    eps=-1,
    s_f=None,
    interval=(-1.0, 0.0),
    in_family=True,
    in_family_star=False,
    origin_limit=1.0,
    infinity_limit=0.0,
    sf_derivs=None,
))

_register(_ExampleDef(
    id="1/(s+s^3)",
    f=lambda s: 1.0 / (s + s ** 3),
    f_prime=lambda s: -(1.0 + 3.0 * s ** 2) / (s + s ** 3) ** 2,
    F=lambda s: np.arctan(s) - s + 1.0 - math.pi / 4.0,
    F2=lambda s: -2.0 * s / (1.0 + s ** 2) ** 2,
    eps=-1,
    s_f=None,
    interval=(-1.0, 0.0),
    in_family=True,
    in_family_star=False,
    origin_limit=1.0,
    infinity_limit=0.0,
    sf_derivs=None,
))

_register(_ExampleDef(
    id="(s+2)/s^2",
    f=lambda s: (s + 2.0) / s ** 2,
    f_prime=lambda s: -(s + 4.0) / s ** 3,
    F=lambda s: 2.0 * np.log(s),
    F2=lambda s: -2.0 / s ** 2,
    eps=-1,
    s_f=None,
    interval=(-_INF, -1.0),
    in_family=True,
    in_family_star=False,
    origin_limit=_INF,
    infinity_limit=1.0,
    sf_derivs=None,
))

_register(_ExampleDef(
    id="(s^2+2)/s^3",
    f=lambda s: (s ** 2 + 2.0) / s ** 3,
    f_prime=lambda s: -(s ** 2 + 6.0) / s ** 4,
    F=lambda s: 2.0 - 2.0 / s,
    F2=lambda s: -4.0 / s ** 3,
    eps=-1,
    s_f=None,
    interval=(-_INF, -1.0),
    in_family=True,
    in_family_star=False,
    origin_limit=_INF,
    infinity_limit=1.0,
    sf_derivs=None,
))

EXAMPLE_IDS = tuple(_EXAMPLES)


# ---------------------------------------------------------------------------
# factories


def monomial(a: float = 1.0, delta: float = 1.0) -> CurvatureModel:
    """Model for f(s) = a * s^delta with a > 0."""
    if not (a > 0.0) or not math.isfinite(a):
        raise ValueError(f"monomial scale must be positive and finite, got {a!r}")
    if not math.isfinite(delta):
        raise ValueError(f"monomial exponent must be finite, got {delta!r}")
    spec = f"monomial:a={a:.17g},delta={delta:.17g}"
    if delta == -1.0:
        # F'' vanishes identically; the law sits outside the family.
        return CurvatureModel(
            kind="monomial", spec=spec, a=a, delta=delta,
            eps_f=1, s_f=None, interval_If=(a, a),
            in_family=False, in_family_star=False,
            origin_limit=a, infinity_limit=a,
        )
    eps = 1 if delta > -1.0 else -1
    s_f = a ** (-1.0 / (delta + 1.0)) if delta > -1.0 else None
    if delta > -1.0:
        interval = (0.0, _INF)
        origin, infinity = 0.0, _INF
    else:
        interval = (-_INF, 0.0)
        origin, infinity = _INF, 0.0
    in_family = delta != 0.0
    return CurvatureModel(
        kind="monomial", spec=spec, a=a, delta=delta,
        eps_f=eps, s_f=s_f, interval_If=interval,
        in_family=in_family, in_family_star=in_family and delta > -1.0,
        origin_limit=origin, infinity_limit=infinity,
    )


def example(example_id: str) -> CurvatureModel:
    """Model for one of the named example laws; see EXAMPLE_IDS."""
    try:
        d = _EXAMPLES[example_id]
    except KeyError:
        known = ", ".join(EXAMPLE_IDS)
        raise ValueError(f"unknown example id {example_id!r}; known ids: {known}") from None
    return CurvatureModel(
        kind="example", spec=f"example:{example_id}",
        a=1.0, delta=0.0, example_id=example_id,
        eps_f=d.eps, s_f=d.s_f, interval_If=d.interval,
        in_family=d.in_family, in_family_star=d.in_family_star,
        origin_limit=d.origin_limit, infinity_limit=d.infinity_limit,
    )


def parse_model_spec(spec: str) -> CurvatureModel:
    """Parse "monomial:a=<float>,delta=<float>" or "example:<id>"."""
    if spec.startswith("monomial:"):
        body = spec[len("monomial:"):]
        params = {}
        for part in body.split(","):
            if "=" not in part:
                raise ValueError(f"bad monomial parameter {part!r} in {spec!r}")
            key, _, val = part.partition("=")
            params[key.strip()] = val.strip()
        extra = set(params) - {"a", "delta"}
        if extra:
            raise ValueError(f"unknown monomial parameters {sorted(extra)} in {spec!r}")
        try:
            a = float(params.get("a", "1"))
            delta = float(params["delta"])
        except (KeyError, ValueError) as exc:
            raise ValueError(f"cannot parse monomial spec {spec!r}: {exc}") from None
        return monomial(a=a, delta=delta)
    if spec.startswith("example:"):
        return example(spec[len("example:"):])
    raise ValueError(f"model spec must start with 'monomial:' or 'example:', got {spec!r}")


# ---------------------------------------------------------------------------
# evaluation


def _check_positive(s) -> None:
    arr = np.asarray(s, dtype=float)
    if np.any(~(arr > 0.0)):
        raise ValueError(f"curvature laws are defined for s > 0 only, got {s!r}")


def eval_f(model: CurvatureModel, s):
    """f(s); accepts scalars or arrays, s > 0."""
    _check_positive(s)
    if model.kind == "monomial":
        return model.a * np.asarray(s, dtype=float) ** model.delta
    return _EXAMPLES[model.example_id].f(np.asarray(s, dtype=float))


def eval_f_prime(model: CurvatureModel, s):
    """f'(s) from the stored closed form."""
    _check_positive(s)
    if model.kind == "monomial":
        return model.a * model.delta * np.asarray(s, dtype=float) ** (model.delta - 1.0)
    return _EXAMPLES[model.example_id].f_prime(np.asarray(s, dtype=float))


def eval_F(model: CurvatureModel, s):
    """Normalized potential with F'(s) = s*f(s) - 1."""
    _check_positive(s)
    s = np.asarray(s, dtype=float)
    if model.kind == "monomial":
        a, delta = model.a, model.delta
        if delta == -2.0:
            # F' = a/s - 1, normalized to vanish at the circular radius s = a
            return a * np.log(s / a) - s + a
        if delta == -1.0:
            return (a - 1.0) * (s - 1.0)
        s0 = a ** (-1.0 / (delta + 1.0))
        return (a * s ** (delta + 2.0) - (delta + 2.0) * s + (delta + 1.0) * s0) / (delta + 2.0)
    return _EXAMPLES[model.example_id].F(s)


def eval_F2(model: CurvatureModel, s):
    """F''(s) = f(s) + s*f'(s) from the stored closed form."""
    _check_positive(s)
    s = np.asarray(s, dtype=float)
    if model.kind == "monomial":
        return model.a * (model.delta + 1.0) * s ** model.delta
    return _EXAMPLES[model.example_id].F2(s)


def fixed_radius(model: CurvatureModel) -> Optional[float]:
    """Radius of the circular solution: the root of s*f(s) = eps_f, or None.

    Monomials with delta > -1 return a**(-1/(delta+1)) exactly (1 for a=1).
    """
    return model.s_f


def sf_derivatives(model: CurvatureModel) -> Optional[tuple]:
    """(F2, F3, F4) evaluated at s_f; None when s_f is absent.

    Monomials use the exact product formula; named examples fall back to
    central differences of the closed-form F'' when no exact values are
    stored.
    """
    if model.s_f is None:
        return None
    if model.kind == "monomial":
        delta, s_f = model.delta, model.s_f
        f2 = (delta + 1.0) / s_f
        f3 = (delta + 1.0) * delta / s_f ** 2
        f4 = (delta + 1.0) * delta * (delta - 1.0) / s_f ** 3
        return (f2, f3, f4)
    d = _EXAMPLES[model.example_id]
    if d.sf_derivs is not None:
        return d.sf_derivs
    s_f = model.s_f
    h = 1e-5 * s_f
    f2 = float(d.F2(s_f))
    f3 = float((d.F2(s_f + h) - d.F2(s_f - h)) / (2.0 * h))
    f4 = float((d.F2(s_f + h) - 2.0 * f2 + d.F2(s_f - h)) / h ** 2)
    return (f2, f3, f4)


def potential_eval(model: CurvatureModel, s: float) -> PotentialEval:
    """Bundle F(s), F'(s) and the s_f derivative stack for one radius."""
    _check_positive(s)
    F = float(eval_F(model, s))
    F1 = float(s) * float(eval_f(model, s)) - 1.0
    return PotentialEval(s=float(s), F=F, F1=F1, F2plus=sf_derivatives(model))
