"""Independent reference computations used by the tests."""

from __future__ import annotations

import itertools
import math

import numpy as np


def generator_matrix(plan) -> np.ndarray:
    """G with X = U G over GF(2), built by pushing unit vectors through the XOR layers."""
    n = plan.blocklength
    rows = np.eye(n, dtype=np.uint8)
    for layer in plan.layers:
        for t, s in layer.ops:
            rows[:, t] ^= rows[:, s]
    return rows


def bec_sc_erasure(plan, eps: float) -> np.ndarray:
    """Exact erasure probability of every input line under genie-aided SC over BEC(eps).

    Line u, decoded after the set D, stays erased exactly when some input
    difference a with a_u = 1 and a_D = 0 maps to a codeword difference
    supported inside the erased set.
    """
    G = generator_matrix(plan)
    n = plan.blocklength
    weights = np.array([1 << j for j in range(n)], dtype=np.int64)
    popcount = np.array([bin(e).count("1") for e in range(1 << n)])
    prob_e = eps ** popcount * (1 - eps) ** (n - popcount)
    out = np.zeros(n)
    decided = []
    for u in plan.decode_order:
        free = [i for i in range(n) if i != u and i not in decided]
        base = G[u].astype(np.int64)
        combos = np.array(list(itertools.product((0, 1), repeat=len(free))), dtype=np.int64)
        diffs = base[None, :].copy()
        if free:
            diffs = (base[None, :] + combos @ G[free].astype(np.int64)) % 2
        masks = diffs @ weights
        hit = np.zeros(1 << n, dtype=bool)
        hit[masks] = True
        idx = np.arange(1 << n)
        for j in range(n):
            bit = 1 << j
            sel = (idx & bit) != 0
            hit[idx[sel]] |= hit[idx[sel] ^ bit]
        out[u] = float(np.sum(prob_e[hit]))
        decided.append(u)
    return out


def binary_entropy(p: float) -> float:
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def bound_rows_mp(capacity: str, n_max: int, dps: int = 40):
    """(1 - G_n, 1 - F_n) for n = 0..n_max in high precision, by plain bisection for h^{-1}."""
    from mpmath import log, mp, mpf

    mp.dps = dps

    def ent(x):
        if x <= 0 or x >= 1:
            return mpf(0)
        return -x * log(x, 2) - (1 - x) * log(1 - x, 2)

    def ent_inv(y):
        lo, hi = mpf(0), mpf("0.5")
        for _ in range(4 * dps):
            mid = (lo + hi) / 2
            if ent(mid) < y:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2

    x = 1 - mpf(capacity)
    F = G = x
    rows = [(1 - G, 1 - F)]
    for _ in range(n_max):
        F = F * (2 * x - F)
        a, b = ent_inv(G), ent_inv(2 * x - G)
        G = 2 * x - ent(a * (1 - b) + (1 - a) * b)
        rows.append((1 - G, 1 - F))
    return rows


class ArikanPlan:
    """Natural-order length-2^m Arikan transform dressed up like a TransformPlan."""

    def __init__(self, m: int):
        from upolar.construction import XorLayer

        size = 1 << m
        layers = []
        half = 1
        while half < size:
            ops = tuple((blk + i, blk + half + i) for blk in range(0, size, 2 * half) for i in range(half))
            layers.append(XorLayer(ops, 0))
            half *= 2
        self.blocklength = size
        self.layers = tuple(layers)
        self.decode_order = tuple(range(size))


def gf2_rank(rows: np.ndarray) -> int:
    a = np.array(rows, dtype=np.uint8) % 2
    rank = 0
    for col in range(a.shape[1]):
        pivot = next((r for r in range(rank, a.shape[0]) if a[r, col]), None)
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        for r in range(a.shape[0]):
            if r != rank and a[r, col]:
                a[r] ^= a[rank]
        rank += 1
    return rank


def genie_undetermined(plan, unerased: np.ndarray) -> np.ndarray:
    """Per line: True when its input bit is not pinned down by the unerased outputs and earlier inputs."""
    G = generator_matrix(plan)[:, unerased]
    n = plan.blocklength
    out = np.zeros(n, dtype=bool)
    decided = set()
    for u in plan.decode_order:
        rest = [i for i in range(n) if i != u and i not in decided]
        base = gf2_rank(G[rest]) if rest else 0
        out[u] = gf2_rank(G[rest + [u]]) == base
        decided.add(u)
    return out


def _set_partitions(items):
    if not items:
        yield []
        return
    first = items[0]
    for part in _set_partitions(items[1:]):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def best_merge_loss(w, k: int) -> float:
    """Smallest capacity loss over every way of merging w's outputs into exactly k groups."""
    from upolar.channels import Channel, capacity

    base = capacity(w)
    best = math.inf
    for part in _set_partitions(list(range(w.n_outputs))):
        if len(part) != k:
            continue
        merged = Channel.from_masses([w.p0[g].sum() for g in part], [w.p1[g].sum() for g in part])
        best = min(best, base - capacity(merged))
    return best


def kernel_by_enumeration(w, v, sign: str):
    """Raw (unmerged) minus/plus channel built by looping over every output tuple."""
    from upolar.channels import Channel

    W = (w.p0, w.p1)
    V = (v.p0, v.p1)
    rows = {0: [], 1: []}
    for x in (0, 1):
        if sign == "-":
            for y in range(w.n_outputs):
                for z in range(v.n_outputs):
                    rows[x].append(sum(0.5 * W[u ^ x][y] * V[u][z] for u in (0, 1)))
        else:
            for u in (0, 1):
                for y in range(w.n_outputs):
                    for z in range(v.n_outputs):
                        rows[x].append(0.5 * W[u ^ x][y] * V[x][z])
    return Channel.from_masses(rows[0], rows[1])


class OneLevelPlan:
    """A single one-level adder circuit as a plan-like object, decoded top to bottom."""

    def __init__(self, b: int, g: int):
        from upolar.construction import XorLayer, one_level_adder_order

        circuit = one_level_adder_order(b, g)
        ranks = sorted(set(circuit.positions))
        self.blocklength = b + g
        self.layers = tuple(XorLayer(tuple((i, i + 1) for i, r in enumerate(circuit.positions) if r == rank), 1)
                            for rank in ranks)
        self.decode_order = tuple(range(b + g))
        self.types = circuit.types
