"""Encoding and two-stage successive-cancellation decoding.

Layout of a length N*M codeword: copy c of the slow circuit occupies
positions ``c*N .. c*N + N - 1``. Input position ``u*M + j`` holds fast
index j of slow line u; for each slow line the M copies are joined by a
natural-order Arikan transform (x = u F^{(x)m}, F = [[1, 0], [1, 1]]).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import Channel, log_likelihood_ratios
from .construction import CodeSpec, TransformPlan

LLR_CLAMP = 40.0
SMALL_LLR = 1.0


@dataclass
class DecodeStats:
    slow_evaluations: int = 0
    fast_evaluations: int = 0


@dataclass(frozen=True)
class Codeword:
    bits: np.ndarray


@dataclass(frozen=True)
class LlrVector:
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.clip(np.asarray(self.values, dtype=float), -LLR_CLAMP, LLR_CLAMP))


@dataclass(frozen=True)
class DecodeResult:
    info_bits: np.ndarray
    block_ok: bool | None = None
    per_stage_stats: DecodeStats = field(default_factory=DecodeStats)


def check_node(a, b):
    """ln((1 + e^{a+b}) / (e^a + e^b)) in an overflow-free form.

    The magnitude is min(|a|, |b|) + ln(1 + e^{-(|a|+|b|)}) - ln(1 + e^{-||a|-|b||}),
    which never exceeds min(|a|, |b|); the sign is sign(a) sign(b) exactly.
    Below SMALL_LLR the log form cancels badly, so those entries use
    2 atanh(tanh(|a|/2) tanh(|b|/2)) instead.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    abs_a = np.abs(a)
    abs_b = np.abs(b)
    s = abs_a + abs_b
    np.negative(s, out=s)
    np.exp(s, out=s)
    np.log1p(s, out=s)
    d = abs_a - abs_b
    np.abs(d, out=d)
    np.negative(d, out=d)
    np.exp(d, out=d)
    np.log1p(d, out=d)
    s -= d
    out = np.minimum(abs_a, abs_b)
    small = out < SMALL_LLR
    out += s
    if small.any():
        t = np.tanh(0.5 * abs_a[small]) * np.tanh(0.5 * abs_b[small])
        out[small] = 2.0 * np.arctanh(t)
    np.maximum(out, 0.0, out=out)
    # a*b carries the sign product; a signed zero still gives out == 0 there
    np.copysign(out, a * b, out=out)
    return out


def variable_node(a, b, bit):
    """b + (-1)^bit a.

    Not clamped: saturating here would let two clamped values cancel to an
    exact 0, a tie that SC and hard decision resolve differently.
    """
    a = np.asarray(a)
    out = np.where(np.asarray(bit, dtype=bool), -a, a)
    out += b
    return out


def hard_decision(llr):
    # ties go to 0
    return (llr < 0).astype(np.uint8)


def channel_llr_table(w: Channel) -> np.ndarray:
    """Clamped LLR of every output symbol of ``w``."""
    return np.clip(log_likelihood_ratios(w), -LLR_CLAMP, LLR_CLAMP)


def channel_llr(w: Channel, observation: int) -> float:
    """Clamped LLR of output symbol ``observation`` (an index into the channel's outputs).

    For ``make_bsc`` the symbols are (0, 1); for ``make_bec`` they are
    (0, erasure, 1).
    """
    if not 0 <= int(observation) < w.n_outputs or int(observation) != observation:
        raise ValueError(f"unknown output symbol {observation!r}")
    return float(channel_llr_table(w)[int(observation)])


# --- transforms ---------------------------------------------------------------

def arikan_transform(u: np.ndarray) -> np.ndarray:
    """x = u F^{(x)m} over GF(2) along the last axis (self-inverse)."""
    x = np.array(u, dtype=np.uint8, copy=True)
    length = x.shape[-1]
    if length & (length - 1):
        raise ValueError("length must be a power of two")
    half = 1
    lead = x.shape[:-1]
    while half < length:
        view = x.reshape(lead + (length // (2 * half), 2, half))
        view[..., 0, :] ^= view[..., 1, :]
        half *= 2
    return x


def _layer_arrays(plan: TransformPlan):
    return [(np.array([t for t, _ in layer.ops]), np.array([s for _, s in layer.ops])) for layer in plan.layers]


def slow_encode(plan: TransformPlan, u: np.ndarray) -> np.ndarray:
    """Apply the slow circuit along the last axis."""
    x = np.array(u, dtype=np.uint8, copy=True)
    for t, s in _layer_arrays(plan):
        x[..., t] ^= x[..., s]
    return x


def slow_inverse(plan: TransformPlan, x: np.ndarray) -> np.ndarray:
    """Undo ``slow_encode`` by replaying the layers in reverse order."""
    u = np.array(x, dtype=np.uint8, copy=True)
    for t, s in reversed(_layer_arrays(plan)):
        u[..., t] ^= u[..., s]
    return u


def _as_bits(info, width):
    arr = np.asarray(info)
    if arr.ndim not in (1, 2) or arr.shape[-1] != width:
        raise ValueError(f"expected {width} information bits per message, got shape {arr.shape}")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("information bits must be 0 or 1")
    return arr.astype(np.uint8)


def encode_batch(spec: CodeSpec, info: np.ndarray) -> np.ndarray:
    """Codewords, one row per message row of ``info``."""
    info = _as_bits(info, spec.n_info)
    single = info.ndim == 1
    info = np.atleast_2d(info)
    batch = info.shape[0]
    N, M = spec.plan.blocklength, spec.M
    v = np.zeros((batch, N * M), dtype=np.uint8)
    v[:, spec.info_positions] = info
    u = arikan_transform(v.reshape(batch, N, M))
    x = slow_encode(spec.plan, u.transpose(0, 2, 1))
    x = x.reshape(batch, M * N)
    return x[0] if single else x


def encode(spec: CodeSpec, info) -> Codeword:
    info = _as_bits(info, spec.n_info)
    if info.ndim != 1:
        raise ValueError("encode takes one message; use encode_batch for several")
    return Codeword(encode_batch(spec, info))


# --- decoding -----------------------------------------------------------------

class _SlowSC:
    """Lazy SC message passing through the slow circuit for many lanes at once.

    ``llr(t, line)`` is the LLR of the value on ``line`` just before layer t
    (t = 0 is the input side, t = T the channel side). Every node is computed
    once, when first needed, and must only depend on decided bits.
    """

    def __init__(self, plan: TransformPlan, chan: np.ndarray, stats: DecodeStats, per_codeword: int):
        self.T = len(plan.layers)
        # one contiguous row per line keeps every node operation unit-stride;
        # transposing in tiles is far more cache friendly than one big .T copy
        self.chan = np.empty(chan.shape[::-1], dtype=chan.dtype)
        for start in range(0, chan.shape[0], 4096):
            self.chan[:, start:start + 4096] = chan[start:start + 4096].T
        self.stats = stats
        self.per_codeword = per_codeword
        self.role = []
        for layer in plan.layers:
            role = {}
            for t, s in layer.ops:
                role[t] = ("t", s)
                role[s] = ("s", t)
            self.role.append(role)
        self.llr_memo: dict[tuple[int, int], np.ndarray] = {}
        self.bit_memo: dict[tuple[int, int], np.ndarray] = {}
        self.decided: dict[int, np.ndarray] = {}

    def llr(self, t, line):
        key = (t, line)
        hit = self.llr_memo.get(key)
        if hit is not None:
            return hit
        if t == self.T:
            val = self.chan[line]
        else:
            role = self.role[t].get(line)
            if role is None:
                val = self.llr(t + 1, line)
            elif role[0] == "t":
                val = check_node(self.llr(t + 1, line), self.llr(t + 1, role[1]))
                self.stats.slow_evaluations += self.per_codeword
            else:
                partner = role[1]
                val = variable_node(self.llr(t + 1, partner), self.llr(t + 1, line), self.bit(t, partner))
                self.stats.slow_evaluations += self.per_codeword
        self.llr_memo[key] = val
        return val

    def bit(self, t, line):
        """Value of ``line`` just before layer t (t = 0 is the decided input)."""
        if t == 0:
            try:
                return self.decided[line]
            except KeyError:
                raise RuntimeError(f"decode order needs line {line} before it is decided") from None
        key = (t, line)
        hit = self.bit_memo.get(key)
        if hit is not None:
            return hit
        role = self.role[t - 1].get(line)
        val = self.bit(t - 1, line)
        if role is not None and role[0] == "t":
            val = val ^ self.bit(t - 1, role[1])
        self.bit_memo[key] = val
        return val


def fast_sc_decode(llr: np.ndarray, frozen: np.ndarray, stats: DecodeStats | None = None,
                   prune: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """SC decoding of a natural-order Arikan code, vectorized over rows.

    Returns (u_hat, x_hat). With ``prune`` all-frozen subtrees return zeros
    and frozen-free subtrees take hard decisions, both of which coincide with
    plain SC decisions.
    """
    stats = stats if stats is not None else DecodeStats()
    frozen = np.asarray(frozen, dtype=bool)
    llr = np.asarray(llr)
    if llr.dtype.kind != "f":
        llr = llr.astype(float)
    return _fast_node(llr, frozen, stats, prune)


def _fast_node(llr, frozen, stats, prune):
    length = frozen.size
    if length == 1:
        u = np.zeros(llr.shape, dtype=np.uint8) if frozen[0] else hard_decision(llr)
        return u, u
    if prune and frozen.all():
        z = np.zeros(llr.shape, dtype=np.uint8)
        return z, z
    if prune and not frozen.any():
        x = hard_decision(llr)
        return arikan_transform(x), x
    half = length // 2
    a, b = llr[:, :half], llr[:, half:]
    stats.fast_evaluations += half
    u1, c = _fast_node(check_node(a, b), frozen[:half], stats, prune)
    stats.fast_evaluations += half
    u2, d = _fast_node(variable_node(a, b, c), frozen[half:], stats, prune)
    return np.concatenate([u1, u2], axis=1), np.concatenate([c ^ d, d], axis=1)


def decode_batch(spec: CodeSpec, llrs: np.ndarray, prune: bool = True,
                 dtype=np.float64) -> tuple[np.ndarray, DecodeStats]:
    """Decode rows of channel LLRs; returns (info bits per row, work counters per codeword).

    ``dtype=np.float32`` roughly halves the decoding time at single precision.
    """
    llrs = np.atleast_2d(np.asarray(llrs, dtype=dtype))
    N, M = spec.plan.blocklength, spec.M
    if llrs.shape[1] != N * M:
        raise ValueError(f"expected {N * M} LLRs per codeword, got {llrs.shape[1]}")
    batch = llrs.shape[0]
    llrs = np.clip(llrs, -LLR_CLAMP, LLR_CLAMP).astype(dtype, copy=False)
    stats = DecodeStats()
    slow = _SlowSC(spec.plan, llrs.reshape(batch * M, N), stats, M)
    good = set(spec.plan.good_indices)
    fast_frozen = np.zeros(M, dtype=bool)
    fast_frozen[spec.fast_frozen] = True
    v_hat = np.zeros((batch, N, M), dtype=np.uint8)
    zeros = np.zeros(batch * M, dtype=np.uint8)
    # frozen slow lines carry all-zero fast blocks, so they resolve immediately
    for u in spec.plan.decode_order:
        if u not in good:
            slow.decided[u] = zeros
    for u in spec.plan.decode_order:
        if u not in good:
            continue
        lane_llr = slow.llr(0, u).reshape(batch, M)
        v, x = fast_sc_decode(lane_llr, fast_frozen, stats, prune)
        v_hat[:, u, :] = v
        slow.decided[u] = x.reshape(batch * M)
    info = v_hat.reshape(batch, N * M)[:, spec.info_positions]
    return info, stats


def sc_decode(spec: CodeSpec, channel_llrs, reference=None, prune: bool = True) -> DecodeResult:
    values = channel_llrs.values if isinstance(channel_llrs, LlrVector) else np.asarray(channel_llrs, dtype=float)
    if values.ndim != 1:
        raise ValueError("sc_decode takes one LLR vector; use decode_batch for several")
    info, stats = decode_batch(spec, values[None, :], prune)
    info = info[0]
    ok = None if reference is None else bool(np.array_equal(info, np.asarray(reference, dtype=np.uint8)))
    return DecodeResult(info, ok, stats)
