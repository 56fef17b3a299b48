"""Heterogeneous two-channel polarization kernels and slow-polarization recursions.

For channels W (on the XOR line) and V (on the passed-through line)::

    (W, V)^-(y, z | x)    = sum_u 1/2 W(y | u ^ x) V(z | u)
    (W, V)^+(y, z, u | x) = 1/2 W(y | u ^ x) V(z | x)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import Channel, degrade_quantize, merge_equivalent
from .construction import one_level_adder_order, shifted_input_order


def minus(w: Channel, v: Channel) -> Channel:
    p0 = 0.5 * (np.outer(w.p0, v.p0) + np.outer(w.p1, v.p1))
    p1 = 0.5 * (np.outer(w.p1, v.p0) + np.outer(w.p0, v.p1))
    return merge_equivalent(Channel.from_masses(p0.ravel(), p1.ravel()))


def plus(w: Channel, v: Channel) -> Channel:
    # u = 0 block followed by u = 1 block
    p0 = 0.5 * np.concatenate([np.outer(w.p0, v.p0).ravel(), np.outer(w.p1, v.p0).ravel()])
    p1 = 0.5 * np.concatenate([np.outer(w.p1, v.p1).ravel(), np.outer(w.p0, v.p1).ravel()])
    return merge_equivalent(Channel.from_masses(p0, p1))


def _kernels(budget):
    if budget is None:
        return minus, plus

    def qminus(w, v):
        return degrade_quantize(minus(w, v), budget)

    def qplus(w, v):
        return degrade_quantize(plus(w, v), budget)

    return qminus, qplus


@dataclass(frozen=True)
class SlowPairState:
    level: int
    left: Channel
    right: Channel


@dataclass(frozen=True)
class GeneralRateState:
    level: int
    lefts: tuple[Channel, ...]
    rights: tuple[Channel, ...]


def slow_recursion(w: Channel, n: int, budget: int | None = None) -> list[SlowPairState]:
    """States for levels 0..n of L_{k+1} = (L_k, R_k)^-, R_{k+1} = (L_k, R_k)^+."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    mn, pl = _kernels(budget)
    states = [SlowPairState(0, w, w)]
    for level in range(1, n + 1):
        prev = states[-1]
        states.append(SlowPairState(level, mn(prev.left, prev.right), pl(prev.left, prev.right)))
    return states


def one_level_outputs(inputs, positions, budget: int | None = None) -> list[Channel]:
    """Synthesized channels, top to bottom, of a one-level adder circuit.

    ``inputs[i]`` is the channel seen by line i on the channel side and
    ``positions[i]`` the horizontal rank of the adder joining line i to i+1.
    Adders nearest the channels are resolved first.
    """
    mn, pl = _kernels(budget)
    ch = list(inputs)
    for rank in sorted(set(positions), reverse=True):
        for i, r in enumerate(positions):
            if r == rank:
                ch[i], ch[i + 1] = mn(ch[i], ch[i + 1]), pl(ch[i], ch[i + 1])
    return ch


def _circuit_step(state: GeneralRateState, b: int, g: int, budget) -> GeneralRateState:
    circuit = one_level_adder_order(b, g)
    pick = {"L": state.lefts, "R": state.rights}
    inputs = [pick[kind][idx - 1] for kind, idx in shifted_input_order(b, g)]
    outputs = one_level_outputs(inputs, circuit.positions, budget)
    lefts = tuple(c for c, t in zip(outputs, circuit.types) if t == "L")
    rights = tuple(c for c, t in zip(outputs, circuit.types) if t == "R")
    return GeneralRateState(state.level + 1, lefts, rights)


def _small_g_step(state: GeneralRateState, b: int, g: int, budget) -> GeneralRateState:
    # closed-form decomposition through the chains Q_i and pairs P_i (g <= b)
    mn, pl = _kernels(budget)
    L = (None,) + state.lefts
    R = (None,) + state.rights
    lefts = [None] * (b + 1)
    rights = [None] * (g + 1)
    Q = [None, R[g]]
    for i in range(1, b - g + 1):
        Q.append(pl(Q[i], L[i]))
    for i in range(1, b - g + 1):
        lefts[i] = mn(Q[i], L[i])
    if g == 1:
        lefts[b] = mn(Q[b], L[b])
        rights[1] = pl(Q[b], L[b])
    else:
        Pm = [None] + [mn(L[b - g + i], R[i]) for i in range(1, g)]
        Pp = [None] + [pl(L[b - g + i], R[i]) for i in range(1, g)]
        lefts[b - g + 1] = mn(Q[b - g + 1], Pm[1])
        rights[1] = pl(Q[b - g + 1], Pm[1])
        for i in range(b - g + 2, b):
            lefts[i] = mn(Pp[g - b + i - 1], Pm[g - b + i])
        for j in range(2, g):
            rights[j] = pl(Pp[j - 1], Pm[j])
        lefts[b] = mn(Pp[g - 1], L[b])
        rights[g] = pl(Pp[g - 1], L[b])
    return GeneralRateState(state.level + 1, tuple(lefts[1:]), tuple(rights[1:]))


def general_rate_step(state: GeneralRateState, b: int, g: int, budget: int | None = None,
                      use_circuit: bool = False) -> GeneralRateState:
    if g <= b and not use_circuit:
        return _small_g_step(state, b, g, budget)
    return _circuit_step(state, b, g, budget)


def general_rate_recursion(w: Channel, b: int, g: int, n: int, budget: int | None = None) -> list[GeneralRateState]:
    """States for levels 0..n of the rate g/(b+g) slow recursion.

    Level 0 holds b + g copies of ``w``. For g <= b each step uses the
    closed-form decomposition; for g > b the one-level circuit is evaluated
    directly on the up-shifted input order.
    """
    if b < 1 or g < 1:
        raise ValueError("b and g must be positive")
    if n < 0:
        raise ValueError("n must be nonnegative")
    states = [GeneralRateState(0, (w,) * b, (w,) * g)]
    for _ in range(n):
        states.append(general_rate_step(states[-1], b, g, budget))
    return states
