"""Upper and lower bounds on the capacity of the improved channel R_n.

With H = 1 - I(W), the improved channel after n slow-polarization steps obeys

    1 - G_n(H) <= I(R_n) <= 1 - F_n(H),

where F_n and G_n iterate ``f_step`` and ``g_step`` from F_0 = G_0 = H.
The upper bound is met with equality by erasure channels and the lower
bound comes from the binary symmetric extremal case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HINV_TOL = 1e-13
CLAMP_SLACK = 1e-12


def h(x: float) -> float:
    """Binary entropy in bits, h(0) = h(1) = 0."""
    if x < 0.0 or x > 1.0:
        raise ValueError(f"h is defined on [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def h_inv(y: float) -> float:
    """The x in [0, 1/2] with h(x) = y, by bisection."""
    if y < 0.0 or y > 1.0:
        raise ValueError(f"h_inv is defined on [0, 1], got {y}")
    if y == 0.0:
        return 0.0
    if y == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    while hi - lo > HINV_TOL:
        mid = 0.5 * (lo + hi)
        if h(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _h_vec(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    out = np.zeros_like(x)
    inner = (x > 0) & (x < 1)
    xi = x[inner]
    out[inner] = -xi * np.log2(xi) - (1 - xi) * np.log2(1 - xi)
    return out


def _h_inv_vec(y: np.ndarray) -> np.ndarray:
    # same bisection as h_inv, run on a whole array at once
    y = np.asarray(y, dtype=float)
    lo = np.zeros_like(y)
    hi = np.full_like(y, 0.5)
    while np.max(hi - lo, initial=0.0) > HINV_TOL:
        mid = 0.5 * (lo + hi)
        below = _h_vec(mid) < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    out[y <= 0.0] = 0.0
    out[y >= 1.0] = 0.5
    return out


def bsc_convolution(a: float, b: float) -> float:
    """a * b = a(1 - b) + (1 - a)b, the crossover of two cascaded BSCs."""
    return a * (1.0 - b) + (1.0 - a) * b


def _domain(x: float) -> tuple[float, float]:
    return max(0.0, 2.0 * x - 1.0), x


def _check_domain(t: float, x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    lo, hi = _domain(x)
    if t < lo - CLAMP_SLACK or t > hi + CLAMP_SLACK:
        raise ValueError(f"t={t} outside the admissible interval [{lo}, {hi}] for x={x}")
    return min(max(t, lo), hi)


def f_step(t: float, x: float) -> float:
    t = _check_domain(t, x)
    return t * (2.0 * x - t)


def g_step(t: float, x: float) -> float:
    t = _check_domain(t, x)
    other = min(max(2.0 * x - t, 0.0), 1.0)
    return 2.0 * x - h(bsc_convolution(h_inv(t), h_inv(other)))


@dataclass(frozen=True)
class BoundState:
    n: int
    lowerI: float
    upperI: float
    h_input: float


def bound_table(capacity: float, n_max: int) -> list[BoundState]:
    """Rows n = 0..n_max of the capacity bracket for I(R_n)."""
    if not 0.0 <= capacity <= 1.0:
        raise ValueError(f"capacity must lie in [0, 1], got {capacity}")
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    x = 1.0 - capacity
    big_f = big_g = x
    rows = [BoundState(0, 1.0 - big_g, 1.0 - big_f, x)]
    for n in range(1, n_max + 1):
        big_f = f_step(big_f, x)
        big_g = g_step(big_g, x)
        rows.append(BoundState(n, 1.0 - big_g, 1.0 - big_f, x))
    return rows


def check_g_monotone(x: float, grid_points: int = 1000, tol: float = 1e-10) -> bool:
    """True when t -> g_step(t, x) is nondecreasing on the admissible interval."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    lo, hi = _domain(x)
    if hi <= lo:
        return True
    t = np.linspace(lo, hi, grid_points)
    other = np.clip(2.0 * x - t, 0.0, 1.0)
    a, b = _h_inv_vec(t), _h_inv_vec(other)
    values = 2.0 * x - _h_vec(a * (1 - b) + (1 - a) * b)
    return bool(np.all(np.diff(values) >= -tol))


def design_delta(capacity: float, n: int) -> float:
    """Worst-case entropy bound G_n(1 - capacity) on R_n over the class I(W) >= capacity."""
    return 1.0 - bound_table(capacity, n)[-1].lowerI
