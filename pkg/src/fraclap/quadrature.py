"""Gauss rules and robust 1D integration against the degenerate weight y^alpha.

The extended-direction integrands carry an algebraic singularity at y = 0
(from the weight and from the blow-up of the exact solution's y-derivative).
Plain Gauss rules are used on cells bounded away from zero; cells touching
zero are split dyadically so every sub-cell sees a smooth integrand.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _reference_gauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    pts, wts = np.polynomial.legendre.leggauss(n)
    pts.flags.writeable = False
    wts.flags.writeable = False
    return pts, wts


def gauss_rule(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to the interval [a, b]."""
    if b <= a:
        raise ValueError(f"empty interval [{a}, {b}]")
    pts, wts = _reference_gauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * pts, half * wts


def fixed_gauss(fn, a: float, b: float, n: int = 12) -> float:
    x, w = gauss_rule(n, a, b)
    return float(w @ np.asarray(fn(x), dtype=float))


def integrate_singular_lower(fn, a: float, b: float, n: int = 12,
                             levels: int = 64) -> float:
    """Integrate fn over [a, b] where fn may be algebraically singular at 0.

    For a == 0 the interval is split into dyadic pieces [b/2^{j+1}, b/2^j];
    the integrand is smooth on each piece, so a fixed Gauss rule converges
    geometrically.  The leftover [0, b/2^levels] is dropped: for integrable
    singularities y^beta with beta > -1 its contribution is below 1e-15
    relative once levels is ~64.
    """
    if a > 0.0:
        return fixed_gauss(fn, a, b, n)
    if b <= 0.0:
        raise ValueError("upper bound must be positive")
    total = 0.0
    hi = b
    for _ in range(levels):
        lo = 0.5 * hi
        total += fixed_gauss(fn, lo, hi, n)
        hi = lo
        if hi < 1e-280:
            break
    return total


def integrate_decaying_upper(fn, a: float, step: float = 1.0,
                             n: int = 16, rel_tol: float = 1e-13,
                             max_windows: int = 400) -> float:
    """Integrate fn over [a, infinity) for exponentially decaying fn."""
    total = 0.0
    lo = a
    for _ in range(max_windows):
        piece = fixed_gauss(fn, lo, lo + step, n)
        total += piece
        lo += step
        if abs(piece) < rel_tol * max(abs(total), 1e-300):
            break
    return total


def tensor_gauss(n: int, ax: float, bx: float, ay: float, by: float):
    """Tensor Gauss rule on the rectangle [ax,bx] x [ay,by].

    Returns (X, Y, W) as flat arrays of equal length.
    """
    x, wx = gauss_rule(n, ax, bx)
    y, wy = gauss_rule(n, ay, by)
    X, Y = np.meshgrid(x, y, indexing="ij")
    W = np.outer(wx, wy)
    return X.ravel(), Y.ravel(), W.ravel()
