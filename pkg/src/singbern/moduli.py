"""Weighted second-order moduli of smoothness and a K-functional upper bound.

The modulus takes a sup over step sizes h <= t.  The h values are drawn
from a fixed global geometric ladder (not rescaled per t), so enlarging t
only adds candidate steps; this makes the computed modulus exactly
non-decreasing in t.  The weight always multiplies from outside the
difference stencil; stencil points may approach the singular point xi,
but any stencil that lands exactly on xi (or leaves the domain) is
treated as undefined and excluded from the sup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .weight import GridSpec, SingularWeight, grid_points, phi, weighted_values

__all__ = [
    "ModulusQuery",
    "second_difference_symmetric",
    "second_difference_forward",
    "second_difference_backward",
    "h_ladder",
    "ladder_band_sups",
    "omega2",
    "omega2_mainpart",
    "kfunctional_upper",
]

_H_FLOOR = 2.0 ** -12
_BAND_POINTS = 129


@dataclass(frozen=True)
class ModulusQuery:
    """Inputs for a modulus evaluation.

    t may not exceed 0.25: beyond that the one-sided boundary bands
    [0, 16h^2] and [1 - 16h^2, 1] swallow the interior band.
    """

    f: Callable = field(repr=False)
    w: SingularWeight
    lam: float = 0.0
    t: float = 0.125
    h_steps: int = 32
    g: GridSpec = GridSpec()

    def __post_init__(self):
        if not (0.0 <= self.lam <= 1.0):
            raise ValueError("lam must lie in [0, 1]")
        if not (0.0 < self.t <= 0.25):
            raise ValueError(f"t must lie in (0, 0.25], got {self.t}")
        if self.h_steps < 1:
            raise ValueError("h_steps must be positive")


def h_ladder(t: float, h_steps: int = 32) -> np.ndarray:
    """Geometric step candidates below t, drawn from a global ladder.

    h_steps sets the density (points per factor-16 range); the ladder is
    shared across t values so that grids for nested t are nested.
    """
    if t <= _H_FLOOR:
        return np.array([t])
    per = max(1, round(h_steps / 4))
    jmin = math.ceil(per * math.log2(1.0 / t) - 1e-12)
    jmax = per * 12
    hs = np.exp2(-np.arange(jmin, jmax + 1) / per)
    return hs[hs <= t]


def _sym_values(f, w, lam, h, xs):
    """Weighted symmetric second differences on xs; NaN where undefined."""
    xs = np.asarray(xs, dtype=float)
    step = h * phi(xs) ** lam
    left = xs - step
    right = xs + step
    ok = (
        (left >= 0.0)
        & (right <= 1.0)
        & (xs != w.xi)
        & (left != w.xi)
        & (right != w.xi)
    )
    out = np.full(xs.shape, np.nan)
    if ok.any():
        xo, lo, ro = xs[ok], left[ok], right[ok]
        out[ok] = w(xo) * (np.asarray(f(ro), dtype=float)
                           - 2.0 * np.asarray(f(xo), dtype=float)
                           + np.asarray(f(lo), dtype=float))
    return out


def _oneside_values(f, w, h, xs, sign):
    """Weighted one-sided second differences (sign=+1 forward, -1 backward)."""
    xs = np.asarray(xs, dtype=float)
    p1 = xs + sign * h
    p2 = xs + sign * 2.0 * h
    ok = (
        (np.minimum(p2, xs) >= 0.0)
        & (np.maximum(p2, xs) <= 1.0)
        & (xs != w.xi)
        & (p1 != w.xi)
        & (p2 != w.xi)
    )
    out = np.full(xs.shape, np.nan)
    if ok.any():
        out[ok] = w(xs[ok]) * (np.asarray(f(p2[ok]), dtype=float)
                               - 2.0 * np.asarray(f(p1[ok]), dtype=float)
                               + np.asarray(f(xs[ok]), dtype=float))
    return out


def second_difference_symmetric(f, w: SingularWeight, lam: float, h: float, x: float):
    """w(x) [f(x + h phi^lam) - 2 f(x) + f(x - h phi^lam)], or None."""
    if h <= 0.0:
        raise ValueError("h must be positive")
    v = _sym_values(f, w, lam, h, np.array([x]))[0]
    return None if np.isnan(v) else float(v)


def second_difference_forward(f, w: SingularWeight, h: float, x: float):
    """w(x) [f(x + 2h) - 2 f(x + h) + f(x)], or None when out of domain."""
    if h <= 0.0:
        raise ValueError("h must be positive")
    v = _oneside_values(f, w, h, np.array([x]), +1.0)[0]
    return None if np.isnan(v) else float(v)


def second_difference_backward(f, w: SingularWeight, h: float, x: float):
    """w(x) [f(x - 2h) - 2 f(x - h) + f(x)], or None when out of domain."""
    if h <= 0.0:
        raise ValueError("h must be positive")
    v = _oneside_values(f, w, h, np.array([x]), -1.0)[0]
    return None if np.isnan(v) else float(v)


def _band_sup(values: np.ndarray) -> float:
    vals = values[~np.isnan(values)]
    return float(np.max(np.abs(vals))) if vals.size else 0.0


def _band_grid(lo: float, hi: float, base: np.ndarray) -> np.ndarray:
    if hi <= lo:
        return np.empty(0)
    pts = base[(base >= lo) & (base <= hi)]
    return np.unique(np.concatenate([pts, np.linspace(lo, hi, _BAND_POINTS)]))


def _near_singularity(xi: float, h: float) -> np.ndarray:
    """Scale-aware points around xi; fixed grids miss the sup at small h."""
    offs = np.array([0.25, 0.5, 0.75, 1.0, 1.5, 2.0]) * h
    pts = np.concatenate([xi - offs, xi + offs])
    return pts[(pts > 0.0) & (pts < 1.0)]


def ladder_band_sups(f, w: SingularWeight, lam: float, hs, g: GridSpec):
    """Per-step band values underlying both moduli.

    For each h returns the three-band sum (symmetric differences on
    [16h^2, 1-16h^2]; one-sided differences on the shrinking boundary
    bands, padded with uniform points since few grid points land there)
    and the main-part sup (symmetric stencil strictly inside (0, 1)).
    The weighted symmetric difference peaks within O(h) of xi, so the
    caller's grid is supplemented there at each step scale.
    """
    base = grid_points(g, w.xi)
    three_band = np.empty(len(hs))
    mainpart = np.empty(len(hs))
    for i, h in enumerate(hs):
        xs = np.unique(np.concatenate([base, _near_singularity(w.xi, h)]))
        cut = 16.0 * h * h
        interior = xs[(xs >= cut) & (xs <= 1.0 - cut)]
        total = _band_sup(_sym_values(f, w, lam, h, interior))
        total += _band_sup(_oneside_values(f, w, h, _band_grid(0.0, min(cut, 1.0), base), +1.0))
        total += _band_sup(_oneside_values(f, w, h, _band_grid(max(1.0 - cut, 0.0), 1.0, base), -1.0))
        three_band[i] = total
        step = h * phi(xs) ** lam
        inner = (xs - step > 0.0) & (xs + step < 1.0)
        mainpart[i] = _band_sup(_sym_values(f, w, lam, h, xs[inner]))
    return three_band, mainpart


def omega2(q: ModulusQuery) -> float:
    """Three-band weighted modulus at width t (sup over the h ladder)."""
    hs = h_ladder(q.t, q.h_steps)
    three_band, _ = ladder_band_sups(q.f, q.w, q.lam, hs, q.g)
    return float(np.max(three_band))


def omega2_mainpart(q: ModulusQuery) -> float:
    """Modulus restricted to x whose full symmetric stencil stays inside (0, 1)."""
    hs = h_ladder(q.t, q.h_steps)
    _, mainpart = ladder_band_sups(q.f, q.w, q.lam, hs, q.g)
    return float(np.max(mainpart))


def kfunctional_upper(
    f,
    w: SingularWeight,
    lam: float,
    t: float,
    candidates: Sequence,
    g: GridSpec = GridSpec(),
) -> float:
    """min over smooth candidates c of ||w (f - c)|| + t^2 ||w phi^(2 lam) c''||.

    An upper bound for the two-term functional; the true infimum over all
    admissible functions is not computable.  Candidates must carry an
    analytic ``second_derivative``.
    """
    if not candidates:
        raise ValueError("need at least one candidate")
    xs = grid_points(g, w.xi)
    best = math.inf
    for cand in candidates:
        second = getattr(cand, "second_derivative", None)
        if second is None:
            raise ValueError(f"candidate {getattr(cand, 'name', cand)!r} lacks a second derivative")
        approx = float(np.max(np.abs(weighted_values(lambda x: f(x) - cand(x), w, xs))))
        curv = float(np.max(np.abs(weighted_values(lambda x: phi(x) ** (2.0 * lam) * second(x), w, xs))))
        best = min(best, approx + t * t * curv)
    return best
