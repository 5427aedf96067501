"""Degree-n operator, its singularity-modified variant, and second derivatives.

The modified operator applies the classical one to surrogate node values,
so everything reduces to weighted sums of basis rows against a coefficient
vector of length n+1.  The second derivative uses the exact second
forward-difference identity

    n (n-1) sum_{k=0}^{n-2} (v[k+2] - 2 v[k+1] + v[k]) b(n-2, k, x),

which is exact for the polynomial the operator produces; numerical
differentiation appears only in tests as an oracle.
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .basis import basis_matrix, basis_row, ksum
from .bridge import BridgeNodes, compute_nodes, linear_joiner, psi_bar
from .weight import (
    EvaluationError,
    GridSpec,
    SingularWeight,
    grid_points,
    phi,
    weighted_sup_norm,
    weighted_values,
)

__all__ = [
    "SurrogateCoefficients",
    "collocation_matrix",
    "bernstein_apply",
    "build_surrogate",
    "bbar_apply",
    "bbar_second_derivative",
    "weighted_operator_norm_ratio",
]

# Collocation matrices are expensive at large n and shared by everything
# that evaluates on a common grid, so keep the last few around.
_MATRIX_CACHE: OrderedDict = OrderedDict()
_MATRIX_CACHE_SIZE = 16
_MATRIX_LOCK = threading.Lock()


def collocation_matrix(n: int, xs: np.ndarray) -> np.ndarray:
    key = (n, xs.tobytes())
    with _MATRIX_LOCK:
        hit = _MATRIX_CACHE.get(key)
        if hit is not None:
            _MATRIX_CACHE.move_to_end(key)
            return hit
    B = basis_matrix(n, xs)
    B.flags.writeable = False
    with _MATRIX_LOCK:
        _MATRIX_CACHE[key] = B
        if len(_MATRIX_CACHE) > _MATRIX_CACHE_SIZE:
            _MATRIX_CACHE.popitem(last=False)
    return B


def bernstein_apply(values: np.ndarray, x):
    """sum_k values[k] b(n, k, x) with compensated summation.

    ``x`` may be a scalar or a 1-D grid; the degree is len(values) - 1.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ValueError("values must be a vector of n+1 >= 2 entries")
    n = values.size - 1
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return ksum(basis_row(n, float(x)) * values)
    return ksum(collocation_matrix(n, x) * values[None, :], axis=1)


@dataclass(frozen=True, eq=False)
class SurrogateCoefficients:
    """Surrogate node values F(k/n), k = 0..n, with their bridge nodes."""

    n: int
    values: np.ndarray = field(repr=False)
    nodes: BridgeNodes

    def __post_init__(self):
        if self.values.shape != (self.n + 1,):
            raise ValueError("values must have length n+1")
        self.values.flags.writeable = False


def _surrogate_values(f: Callable, nodes: BridgeNodes) -> np.ndarray:
    """Node values branch-by-branch; f is never sampled on [x2, x3]."""
    n = nodes.n
    P = linear_joiner(f, nodes)
    k = np.arange(n + 1)
    t = k / float(n)
    values = np.empty(n + 1)

    outer = (k <= nodes.k1) | (k >= nodes.k4)
    ramp1 = (nodes.k1 < k) & (k < nodes.k2)
    mid = (nodes.k2 <= k) & (k <= nodes.k3)
    ramp2 = (nodes.k3 < k) & (k < nodes.k4)

    values[outer] = f(t[outer])
    values[mid] = P(t[mid])
    if ramp1.any():
        s = psi_bar(nodes, 1, t[ramp1])
        values[ramp1] = (1.0 - s) * f(t[ramp1]) + s * P(t[ramp1])
    if ramp2.any():
        s = psi_bar(nodes, 2, t[ramp2])
        values[ramp2] = (1.0 - s) * P(t[ramp2]) + s * f(t[ramp2])
    if not np.isfinite(values).all():
        bad = t[~np.isfinite(values)]
        raise EvaluationError(f"non-finite surrogate value at k/n={bad[0]!r}")
    return values


@lru_cache(maxsize=256)
def _cached_surrogate(f: Callable, n: int, w: SingularWeight) -> SurrogateCoefficients:
    nodes = compute_nodes(n, w.xi)
    nodes.require_valid()
    return SurrogateCoefficients(n=n, values=_surrogate_values(f, nodes), nodes=nodes)


def build_surrogate(f: Callable, n: int, w: SingularWeight) -> SurrogateCoefficients:
    """Coefficient vector F(k/n) for the modified operator at degree n.

    Results are cached per (f, n, w); coefficients are immutable.
    """
    try:
        return _cached_surrogate(f, int(n), w)
    except TypeError:
        # unhashable f: build without caching
        nodes = compute_nodes(int(n), w.xi)
        nodes.require_valid()
        return SurrogateCoefficients(n=int(n), values=_surrogate_values(f, nodes), nodes=nodes)


def bbar_apply(f: Callable, n: int, w: SingularWeight, x):
    """Modified operator: the classical operator applied to surrogate values.

    A polynomial of degree at most n; reproduces linear functions and uses
    only f values on [0, x2] union [x3, 1].
    """
    return bernstein_apply(build_surrogate(f, n, w).values, x)


def bbar_second_derivative(coeffs: SurrogateCoefficients, x):
    """Second derivative of the modified operator via second differences."""
    n = coeffs.n
    if n < 2:
        raise ValueError("second derivative needs n >= 2")
    v = coeffs.values
    d2 = v[2:] - 2.0 * v[1:-1] + v[:-2]
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return n * (n - 1.0) * ksum(basis_row(n - 2, float(x)) * d2)
    return n * (n - 1.0) * ksum(collocation_matrix(n - 2, x) * d2[None, :], axis=1)


def weighted_operator_norm_ratio(
    f,
    n: int,
    w: SingularWeight,
    lam: float,
    g: GridSpec,
    branch: str = "w2",
) -> float:
    """Grid max of |w phi^(2 lam) B''| over the branch majorant.

    branch "cw" uses n^(2-lam) ||w f|| (lam must be 0 or 1, the two cases
    with a closed-form power); branch "w2" uses ||w phi^(2 lam) f''|| and
    needs an analytic second derivative on f.
    """
    if not (0.0 <= lam <= 1.0):
        raise ValueError("lam must lie in [0, 1]")
    coeffs = build_surrogate(f, n, w)
    nd = coeffs.nodes
    xs = grid_points(g, w.xi, extra=(nd.x1, nd.x2, nd.x3, nd.x4))
    d2 = bbar_second_derivative(coeffs, xs)
    num = float(np.max(np.abs(w(xs) * phi(xs) ** (2.0 * lam) * d2)))

    if branch == "cw":
        if lam not in (0.0, 1.0):
            raise ValueError("cw branch has a closed-form majorant only for lam in {0, 1}")
        den = float(n) ** (2.0 - lam) * weighted_sup_norm(f, w, g)
    elif branch == "w2":
        second = getattr(f, "second_derivative", None)
        if second is None:
            raise ValueError(f"{getattr(f, 'name', f)!r} lacks a second derivative")
        den = float(
            np.max(np.abs(weighted_values(lambda t: phi(t) ** (2.0 * lam) * second(t), w, xs)))
        )
    else:
        raise ValueError(f"unknown branch {branch!r}")

    if den == 0.0:
        # rounding of the coefficient vector alone produces second
        # differences up to a few eps, amplified by n(n-1)
        floor = 16.0 * n * n * np.finfo(float).eps * float(np.max(np.abs(coeffs.values)))
        return 0.0 if num <= floor else float("inf")
    return num / den
