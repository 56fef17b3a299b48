"""Explicit slow-polarization circuits and the two-stage code description.

Lines are numbered top to bottom from 0. A circuit is a list of XOR layers
applied from the input side to the channel side; an op ``(t, s)`` means
``value[t] ^= value[s]``. The line carrying the XOR (the target) sees the
degraded channel of its kernel and the source line sees the improved one.

Blocks are assembled recursively. Each block keeps its lines split into a
prefix (decoded first, polarized only to lower levels), a core (lines at the
top level, in decode order, cycling through the one-level type pattern) and
a suffix (decoded last).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, order=True)
class ChannelLabel:
    level: int
    kind: str
    sub_index: int = 1

    def __str__(self):
        return f"{self.kind}{self.level}.{self.sub_index}"


@dataclass(frozen=True)
class XorLayer:
    ops: tuple[tuple[int, int], ...]
    level: int = 0


@dataclass(frozen=True)
class OneLevelCircuit:
    """Adder ranks (one per line except the bottom) and the induced L/R types."""

    positions: tuple[int, ...]
    types: tuple[str, ...]


@dataclass(frozen=True)
class TransformPlan:
    blocklength: int
    layers: tuple[XorLayer, ...]
    labels: tuple[ChannelLabel, ...]
    good_indices: tuple[int, ...]
    decode_order: tuple[int, ...]
    params: tuple[int, int, int, int]  # (n, K, b, g)

    @property
    def n(self) -> int:
        return self.params[0]

    @property
    def K(self) -> int:
        return self.params[1]

    @property
    def b(self) -> int:
        return self.params[2]

    @property
    def g(self) -> int:
        return self.params[3]


@dataclass(frozen=True)
class CodeSpec:
    plan: TransformPlan
    fast_m: int
    frozen: np.ndarray = field(repr=False)
    rate: float
    delta: float
    fast_frozen: np.ndarray = field(repr=False)
    margin: float = 0.0

    @property
    def M(self) -> int:
        return 1 << self.fast_m

    @property
    def length(self) -> int:
        return self.plan.blocklength * self.M

    @property
    def info_positions(self) -> np.ndarray:
        mask = np.ones(self.length, dtype=bool)
        mask[self.frozen] = False
        return np.flatnonzero(mask)

    @property
    def n_info(self) -> int:
        return self.length - self.frozen.size


def one_level_types(b: int, g: int) -> tuple[str, ...]:
    """Output types, top to bottom, of the one-level transform with b L's and g R's."""
    if b < 1 or g < 1:
        raise ValueError("b and g must be positive")
    if g <= b:
        return ("L",) * (b - g) + ("L", "R") * g
    return ("L", "R") * b + ("R",) * (g - b)


def types_from_positions(positions) -> tuple[str, ...]:
    """Label each line L or R from where its lower adder sits relative to the one above."""
    s = len(positions) + 1
    out = ["L"]
    for i in range(1, s - 1):
        out.append("L" if positions[i] < positions[i - 1] else "R")
    out.append("R")
    return tuple(out)


def one_level_adder_order(b: int, g: int) -> OneLevelCircuit:
    """Adder placement whose left/right pattern yields the one-level type sequence.

    Walk the lines top to bottom stepping left for an L line and right for an
    R line, then rank-normalize the positions.
    """
    types = one_level_types(b, g)
    walk = [0]
    for i in range(1, len(types) - 1):
        walk.append(walk[-1] + (-1 if types[i] == "L" else 1))
    levels = sorted(set(walk))
    positions = tuple(levels.index(p) for p in walk)
    return OneLevelCircuit(positions, types)


def shifted_input_order(b: int, g: int) -> tuple[tuple[str, int], ...]:
    """Which level-n channel feeds each line of the next one-level transform.

    The one-level output sequence (with sub-indices) is rotated down by one
    when g <= b and up by one when g > b.
    """
    types = one_level_types(b, g)
    count = {"L": 0, "R": 0}
    seq = []
    for t in types:
        count[t] += 1
        seq.append((t, count[t]))
    if g <= b:
        return tuple([seq[-1]] + seq[:-1])
    return tuple(seq[1:] + [seq[0]])


def _labels_for(types, level):
    count = {"L": 0, "R": 0}
    out = []
    for t in types:
        count[t] += 1
        out.append(ChannelLabel(level, t, count[t]))
    return out


class _Builder:
    """Accumulates ops per (level, adder rank) and labels per line."""

    def __init__(self, n_lines):
        self.ops: dict[tuple[int, int], list[tuple[int, int]]] = {}
        self.labels: list[ChannelLabel | None] = [None] * n_lines

    def apply_group(self, lines, circuit: OneLevelCircuit, level: int):
        for i, rank in enumerate(circuit.positions):
            self.ops.setdefault((level, rank), []).append((lines[i], lines[i + 1]))
        for line, label in zip(lines, _labels_for(circuit.types, level)):
            self.labels[line] = label

    def replicate(self, copies: int, size: int):
        """Stack ``copies`` shifted duplicates of the first ``size`` lines."""
        self.ops = {key: [(t + c * size, u + c * size) for c in range(copies) for t, u in ops]
                    for key, ops in self.ops.items()}
        base = self.labels[:size]
        self.labels = base * copies + self.labels[copies * size:]

    def layers(self) -> tuple[XorLayer, ...]:
        # input side first: highest level, then increasing adder rank
        keys = sorted(self.ops, key=lambda k: (-k[0], k[1]))
        return tuple(XorLayer(tuple(self.ops[k]), k[0]) for k in keys)


@dataclass
class _Block:
    prefix: list[int]
    core: list[int]
    suffix: list[int]

    def shifted(self, offset):
        return _Block([i + offset for i in self.prefix], [i + offset for i in self.core],
                      [i + offset for i in self.suffix])


def _interleave(lists):
    return [x for group in zip(*lists) for x in group]


def _build(b: int, g: int, n: int, K: int) -> TransformPlan:
    if n < 2 or K < 2 or b < 1 or g < 1:
        raise ValueError("need n >= 2, K >= 2, b >= 1, g >= 1")
    s = b + g
    circuit = one_level_adder_order(b, g)
    order = shifted_input_order(b, g)
    types = circuit.types
    sub_of = _labels_for(types, 1)
    slot = {(lab.kind, lab.sub_index): q for q, lab in enumerate(sub_of)}
    # position q of the one-level output pattern feeding line p of the next transform
    feed = [slot[key] for key in order]

    n_lines = K * s ** (n - 1)
    builder = _Builder(n_lines)

    # level 1: K independent one-level transforms on adjacent lines
    for j in range(K):
        builder.apply_group(list(range(j * s, (j + 1) * s)), circuit, 1)

    # level 2: chain the K blocks; output q of block j joins group j + (s-1) - q,
    # so every group draws one line from each of s consecutive blocks
    group_of = {}
    n_groups = K - s + 1
    for j in range(K):
        for q in range(s):
            group_of[j * s + q] = j - (s - 1 - q)
    prefix, suffix, groups = [], [], [[None] * s for _ in range(max(n_groups, 0))]
    for line in range(K * s):
        k = group_of[line]
        if k < 0:
            prefix.append(line)
        elif k >= n_groups:
            suffix.append(line)
        else:
            q = line % s
            groups[k][feed.index(q)] = line
    core = []
    for members in groups:
        builder.apply_group(members, circuit, 2)
        core.extend(members)
    block = _Block(prefix, core, suffix)
    size = K * s

    # levels >= 3: s copies; block i contributes core line k + (s-1-i) to group k
    for level in range(3, n + 1):
        builder.replicate(s, size)
        blocks = [block.shifted(i * size) for i in range(s)]
        m = len(block.core)
        n_groups = m - s + 1
        new_prefix = _interleave([bk.prefix for bk in blocks])
        new_suffix = []
        for i, bk in enumerate(blocks):
            new_prefix.extend(bk.core[: s - 1 - i])
        for i, bk in enumerate(blocks):
            new_suffix.extend(bk.core[m - i:] if i else [])
        new_suffix.extend(_interleave([bk.suffix for bk in blocks]))
        new_core = []
        for k in range(max(n_groups, 0)):
            picks = [bk.core[k + s - 1 - i] for i, bk in enumerate(blocks)]
            if s == 2:
                # the two-line kernel is symmetric: keep block order as drawn
                members = picks
            else:
                members = [None] * s
                for i, line in enumerate(picks):
                    members[feed.index((k + s - 1 - i) % s)] = line
            builder.apply_group(members, circuit, level)
            new_core.extend(members)
        block = _Block(new_prefix, new_core, new_suffix)
        size *= s

    labels = tuple(builder.labels)
    good = tuple(sorted(i for i, lab in enumerate(labels) if lab.level == n and lab.kind == "R"))
    decode = tuple(block.prefix + block.core + block.suffix)
    return TransformPlan(n_lines, builder.layers(), labels, good, decode, (n, K, b, g))


def build_rate_half(n: int, K: int) -> TransformPlan:
    """Rate-1/2 slow stage: pairs, a K-chain, then doubling by block combination."""
    return _build(1, 1, n, K)


def build_general(b: int, g: int, n: int, K: int) -> TransformPlan:
    """Slow stage of rate g/(b+g) built from the one-level (b+g)-line transform."""
    return _build(b, g, n, K)


def universal_good_indices(plan: TransformPlan) -> tuple[int, ...]:
    return tuple(i for i, lab in enumerate(plan.labels) if lab.level == plan.n and lab.kind == "R")


def level_counts(plan: TransformPlan) -> dict[int, int]:
    out: dict[int, int] = {}
    for lab in plan.labels:
        out[lab.level] = out.get(lab.level, 0) + 1
    return out


def bec_fast_z(m: int, delta: float) -> np.ndarray:
    """Erasure probability of each synthesized index of a length-2^m Arikan transform over BEC(delta)."""
    z = np.array([delta])
    for _ in range(m):
        # index bit 0 (first half) takes the degraded branch
        z = np.stack([2 * z - z * z, z * z], axis=1).ravel()
    return z


def attach_fast_stage(plan: TransformPlan, m: int, delta: float, margin: float = 0.02,
                      z_threshold: float = 0.5) -> CodeSpec:
    """Add M = 2^m plan copies joined by Arikan transforms across copies of each good index.

    The fast-stage information set holds the ``ceil((1 - delta - margin) M)``
    indices of smallest erasure probability over BEC(delta), dropping any with
    erasure probability above ``z_threshold``.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if m < 0:
        raise ValueError("m must be nonnegative")
    if not plan.good_indices:
        # happens when the chain is shorter than b + g
        raise ValueError("plan has no good index; use a chain length K >= b + g")
    M = 1 << m
    if m == 0:
        fast_info = np.array([0])
    else:
        z = bec_fast_z(m, delta)
        k = min(M, max(0, math.ceil((1.0 - delta - margin) * M)))
        best = np.argsort(z, kind="stable")[:k]
        fast_info = np.sort(best[z[best] <= z_threshold])
    fast_frozen = np.setdiff1d(np.arange(M), fast_info)
    N = plan.blocklength
    is_good = np.zeros(N, dtype=bool)
    is_good[list(plan.good_indices)] = True
    frozen_mask = np.ones((N, M), dtype=bool)
    frozen_mask[np.ix_(is_good, fast_info)] = False
    frozen = np.flatnonzero(frozen_mask.ravel())
    rate = (N * M - frozen.size) / (N * M)
    return CodeSpec(plan, m, frozen, rate, float(delta), fast_frozen, margin)


# --- plan files ---------------------------------------------------------------

PLAN_HEADER = "utp v1"


def dump_plan(plan: TransformPlan, spec: CodeSpec | None = None) -> str:
    """Line-oriented text form of a plan, plus the fast-stage parameters when given a spec."""
    lines = [PLAN_HEADER,
             "params " + " ".join(map(str, plan.params)),
             f"blocklength {plan.blocklength}",
             "labels " + " ".join(map(str, plan.labels)),
             "good " + " ".join(map(str, plan.good_indices)),
             "decode " + " ".join(map(str, plan.decode_order))]
    for layer in plan.layers:
        lines.append(f"layer {layer.level} " + " ".join(f"{t}:{s}" for t, s in layer.ops))
    if spec is not None:
        lines.append(f"fast {spec.fast_m} {spec.delta!r} {spec.margin!r}")
    return "\n".join(lines) + "\n"


def _parse_label(tok):
    kind, level, dot, sub = tok[0], *tok[1:].partition(".")
    if kind not in ("L", "R") or not dot:
        raise ValueError(f"bad label {tok!r}")
    return ChannelLabel(int(level), kind, int(sub))


def parse_plan(text: str) -> tuple[TransformPlan, CodeSpec | None]:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or " ".join(rows[0]) != PLAN_HEADER:
        raise ValueError(f"plan file must start with {PLAN_HEADER!r}")
    fields_ = {}
    layers = []
    fast = None
    try:
        for row in rows[1:]:
            key, vals = row[0], row[1:]
            if key == "layer":
                ops = tuple(tuple(int(v) for v in op.split(":")) for op in vals[1:])
                layers.append(XorLayer(ops, int(vals[0])))
            elif key == "fast":
                fast = (int(vals[0]), float(vals[1]), float(vals[2]))
            elif key == "labels":
                fields_[key] = tuple(_parse_label(v) for v in vals)
            elif key in ("params", "blocklength", "good", "decode"):
                fields_[key] = tuple(int(v) for v in vals)
            else:
                raise ValueError(f"unknown plan record {key!r}")
        plan = TransformPlan(fields_["blocklength"][0], tuple(layers), fields_["labels"],
                             fields_["good"], fields_["decode"], fields_["params"])
    except (KeyError, IndexError) as exc:
        raise ValueError(f"incomplete plan file: {exc}") from None
    if len(plan.labels) != plan.blocklength or sorted(plan.decode_order) != list(range(plan.blocklength)):
        raise ValueError("plan file is inconsistent with its blocklength")
    spec = None if fast is None else attach_fast_stage(plan, fast[0], fast[1], fast[2])
    return plan, spec
