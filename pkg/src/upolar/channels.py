"""Finite-output binary-input memoryless channels.

A channel is stored as two mass vectors ``p0[y] = W(y|0)`` and
``p1[y] = W(y|1)``. Every operation returns a new immutable channel.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

PRUNE_MASS = 1e-15
MERGE_TOL = 1e-9
DEFAULT_BUDGET = 512
FILE_HEADER = "binary-input-dmc v1"


@dataclass(frozen=True, eq=False)
class Channel:
    """Binary-input DMC with output masses ``p0`` (input 0) and ``p1`` (input 1)."""

    p0: np.ndarray
    p1: np.ndarray

    def __post_init__(self):
        p0 = np.array(self.p0, dtype=float).ravel()
        p1 = np.array(self.p1, dtype=float).ravel()
        if p0.shape != p1.shape or p0.size == 0:
            raise ValueError("p0 and p1 must be non-empty and of equal length")
        if np.any(p0 < 0) or np.any(p1 < 0) or not (np.all(np.isfinite(p0)) and np.all(np.isfinite(p1))):
            raise ValueError("channel masses must be finite and nonnegative")
        if abs(p0.sum() - 1.0) > 1e-12 or abs(p1.sum() - 1.0) > 1e-12:
            raise ValueError("each conditional distribution must sum to 1")
        if np.any(p0 + p1 == 0):
            raise ValueError("outputs with zero mass under both inputs are not allowed")
        p0.flags.writeable = False
        p1.flags.writeable = False
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "p1", p1)

    @classmethod
    def from_masses(cls, p0, p1) -> "Channel":
        """Build a channel from raw masses, pruning negligible outputs and renormalizing."""
        p0 = np.asarray(p0, dtype=float).ravel()
        p1 = np.asarray(p1, dtype=float).ravel()
        keep = (p0 + p1) >= PRUNE_MASS
        p0, p1 = p0[keep], p1[keep]
        return cls(p0 / p0.sum(), p1 / p1.sum())

    @property
    def n_outputs(self) -> int:
        return self.p0.size

    def pairs(self) -> list[tuple[float, float]]:
        return list(zip(self.p0.tolist(), self.p1.tolist()))

    def __repr__(self):
        return f"Channel(n_outputs={self.n_outputs})"


@dataclass(frozen=True)
class ChannelMetrics:
    capacity: float
    bhattacharyya: float
    entropy: float


def make_bsc(p: float) -> Channel:
    if not 0.0 <= p <= 0.5:
        raise ValueError(f"BSC crossover must lie in [0, 1/2], got {p}")
    return Channel.from_masses([1.0 - p, p], [p, 1.0 - p])


def make_bec(eps: float) -> Channel:
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"BEC erasure probability must lie in [0, 1], got {eps}")
    return Channel.from_masses([1.0 - eps, eps, 0.0], [0.0, eps, 1.0 - eps])


def perfect_channel() -> Channel:
    return make_bsc(0.0)


def useless_channel() -> Channel:
    return make_bec(1.0)


def mixture(channels, weights) -> Channel:
    """Channel that picks ``channels[k]`` with probability ``weights[k]`` and reveals k."""
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(channels),) or np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
        raise ValueError("weights must be a probability vector matching channels")
    p0 = np.concatenate([wt * c.p0 for c, wt in zip(channels, weights)])
    p1 = np.concatenate([wt * c.p1 for c, wt in zip(channels, weights)])
    return merge_equivalent(Channel.from_masses(p0, p1))


def make_z_channel(q: float) -> Channel:
    """Input 0 is received as 0; input 1 is received as 0 with probability ``q``."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"Z-channel flip probability must lie in [0, 1], got {q}")
    return Channel.from_masses([1.0, 0.0], [q, 1.0 - q])


def erase(w: Channel, eps: float) -> Channel:
    """``w`` followed by an erasure of its output with probability ``eps`` (a degraded version of w)."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"erasure probability must lie in [0, 1], got {eps}")
    p0 = np.append((1.0 - eps) * w.p0, eps)
    p1 = np.append((1.0 - eps) * w.p1, eps)
    return Channel.from_masses(p0, p1)


def random_channel(rng: np.random.Generator, n_outputs: int = 4) -> Channel:
    """Channel with Dirichlet(1, ..., 1) rows; handy for randomized checks."""
    return Channel.from_masses(rng.dirichlet(np.ones(n_outputs)), rng.dirichlet(np.ones(n_outputs)))


def _xlog2(a, b):
    # a * log2(a / b) with the 0 log 0 = 0 convention
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.zeros(np.broadcast(a, b).shape)
    mask = np.broadcast_to(a > 0, out.shape)
    a_b, b_b = np.broadcast_to(a, out.shape), np.broadcast_to(b, out.shape)
    out[mask] = a_b[mask] * np.log2(a_b[mask] / b_b[mask])
    return out


def _symbol_capacity(p0, p1):
    avg = 0.5 * (p0 + p1)
    return 0.5 * (_xlog2(p0, avg) + _xlog2(p1, avg))


def metrics(w: Channel) -> ChannelMetrics:
    capacity = float(np.sum(_symbol_capacity(w.p0, w.p1)))
    capacity = min(max(capacity, 0.0), 1.0)
    z = float(np.sum(np.sqrt(w.p0 * w.p1)))
    return ChannelMetrics(capacity, min(max(z, 0.0), 1.0), 1.0 - capacity)


def capacity(w: Channel) -> float:
    return metrics(w).capacity


def bhattacharyya(w: Channel) -> float:
    return metrics(w).bhattacharyya


def log_likelihood_ratios(w: Channel) -> np.ndarray:
    """Natural-log LR per output, +inf when p1 = 0 and -inf when p0 = 0."""
    with np.errstate(divide="ignore"):
        return np.log(w.p0) - np.log(w.p1)


def merge_equivalent(w: Channel, tol: float = MERGE_TOL) -> Channel:
    """Sum outputs whose likelihood ratios agree within relative tolerance ``tol``.

    The result is sorted by increasing likelihood ratio. Merging outputs with
    equal ratios is lossless, so capacity and Bhattacharyya are preserved.
    """
    llr = log_likelihood_ratios(w)
    order = np.argsort(llr, kind="stable")
    llr = llr[order]
    p0, p1 = w.p0[order], w.p1[order]
    finite = np.isfinite(llr)
    new_group = np.ones(llr.size, dtype=bool)
    if llr.size > 1:
        same_inf = (~finite[1:]) & (~finite[:-1]) & (llr[1:] == llr[:-1])
        with np.errstate(invalid="ignore"):
            close = finite[1:] & finite[:-1] & (np.abs(llr[1:] - llr[:-1]) <= tol)
        new_group[1:] = ~(same_inf | close)
    starts = np.flatnonzero(new_group)
    if starts.size == llr.size and np.all(order == np.arange(llr.size)):
        return w
    return Channel.from_masses(np.add.reduceat(p0, starts), np.add.reduceat(p1, starts))


def _merge_loss(p0, p1):
    # capacity lost by merging symbol k with symbol k+1, for every adjacent pair
    c = _symbol_capacity(p0, p1)
    return c[:-1] + c[1:] - _symbol_capacity(p0[:-1] + p0[1:], p1[:-1] + p1[1:])


def _greedy_merge(p0, p1, target):
    # exact one-pair-at-a-time greedy on a doubly linked list
    n = p0.size
    p0, p1 = p0.tolist(), p1.tolist()
    nxt = list(range(1, n)) + [-1]
    prv = [-1] + list(range(n - 1))
    alive = [True] * n
    version = [0] * n

    def cap(a, b):
        avg = 0.5 * (a + b)
        return 0.5 * ((a * math.log2(a / avg) if a > 0 else 0.0) + (b * math.log2(b / avg) if b > 0 else 0.0))

    def loss(i):
        j = nxt[i]
        return cap(p0[i], p1[i]) + cap(p0[j], p1[j]) - cap(p0[i] + p0[j], p1[i] + p1[j])

    heap = [(loss(i), i, 0) for i in range(n - 1)]
    heapq.heapify(heap)
    size = n
    while size > target and heap:
        value, i, ver = heapq.heappop(heap)
        if not alive[i] or ver != version[i] or nxt[i] < 0:
            continue
        j = nxt[i]
        p0[i] += p0[j]
        p1[i] += p1[j]
        alive[j] = False
        nxt[i] = nxt[j]
        if nxt[j] >= 0:
            prv[nxt[j]] = i
        size -= 1
        version[i] += 1
        if nxt[i] >= 0:
            heapq.heappush(heap, (loss(i), i, version[i]))
        k = prv[i]
        if k >= 0:
            version[k] += 1
            heapq.heappush(heap, (loss(k), k, version[k]))
    idx = [i for i in range(n) if alive[i]]
    return np.array([p0[i] for i in idx]), np.array([p1[i] for i in idx])


def degrade_quantize(w: Channel, max_outputs: int = DEFAULT_BUDGET) -> Channel:
    """Degraded version of ``w`` with at most ``max_outputs`` outputs.

    Adjacent symbols in likelihood-ratio order are merged, cheapest capacity
    loss first. Large alphabets are first thinned in vectorized rounds that
    merge every pair whose loss is a local minimum; the last factor of two
    uses the exact sequential greedy.
    """
    if max_outputs < 2:
        raise ValueError("max_outputs must be at least 2")
    w = merge_equivalent(w)
    if w.n_outputs <= max_outputs:
        return w
    p0, p1 = w.p0.copy(), w.p1.copy()
    while p0.size > 2 * max_outputs:
        loss = _merge_loss(p0, p1)
        left = np.concatenate([[np.inf], loss[:-1]])
        right = np.concatenate([loss[1:], [np.inf]])
        pick = np.flatnonzero((loss < left) & (loss <= right))
        excess = p0.size - 2 * max_outputs
        if pick.size > excess:
            pick = pick[np.argsort(loss[pick], kind="stable")[:excess]]
            pick.sort()
        if pick.size == 0:
            break
        drop = pick + 1
        p0[pick] += p0[drop]
        p1[pick] += p1[drop]
        keep = np.ones(p0.size, dtype=bool)
        keep[drop] = False
        p0, p1 = p0[keep], p1[keep]
    p0, p1 = _greedy_merge(p0, p1, max_outputs)
    return Channel.from_masses(p0, p1)


def is_less_noisy(v: Channel, w: Channel, grid_points: int = 201, tol: float = 1e-9) -> bool:
    """True when ``p -> I_v(p) - I_w(p)`` is concave on a uniform prior grid."""
    if grid_points < 3:
        raise ValueError("grid_points must be at least 3")
    grid = np.linspace(0.0, 1.0, grid_points)
    d = prior_information(v, grid) - prior_information(w, grid)
    second = d[:-2] - 2 * d[1:-1] + d[2:]
    return bool(np.all(second <= tol))


def prior_information(w: Channel, priors) -> np.ndarray:
    """I(X;Y) in bits for each input prior P(X=0) = p in ``priors``."""
    p = np.asarray(priors, dtype=float)[:, None]
    joint0 = p * w.p0[None, :]
    joint1 = (1 - p) * w.p1[None, :]
    q = joint0 + joint1
    return np.sum(_xlog2(joint0, p * q) + _xlog2(joint1, (1 - p) * q), axis=1)


def parse_channel(descriptor: str) -> Channel:
    """Channel from ``"bsc:p"``, ``"bec:e"`` or ``"file:path"``."""
    kind, _, arg = descriptor.strip().partition(":")
    kind = kind.lower()
    try:
        if kind == "bsc":
            return make_bsc(float(arg))
        if kind == "bec":
            return make_bec(float(arg))
    except ValueError as exc:
        raise ValueError(f"bad channel descriptor {descriptor!r}: {exc}") from None
    if kind == "file":
        return load_channel(arg)
    raise ValueError(f"unknown channel descriptor {descriptor!r}")


def dump_channel(w: Channel) -> str:
    lines = [FILE_HEADER] + [f"{a!r} {b!r}" for a, b in w.pairs()]
    return "\n".join(lines) + "\n"


def parse_channel_text(text: str) -> Channel:
    rows = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not rows or rows[0] != FILE_HEADER:
        raise ValueError(f"channel file must start with {FILE_HEADER!r}")
    masses = []
    for row in rows[1:]:
        parts = row.split()
        if len(parts) != 2:
            raise ValueError(f"expected 'p0 p1', got {row!r}")
        masses.append((float(parts[0]), float(parts[1])))
    if not masses:
        raise ValueError("channel file lists no outputs")
    p0, p1 = zip(*masses)
    return Channel(np.array(p0), np.array(p1))


def load_channel(path) -> Channel:
    return parse_channel_text(Path(path).read_text())


def save_channel(w: Channel, path) -> None:
    Path(path).write_text(dump_channel(w))
