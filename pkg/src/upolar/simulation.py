"""Monte Carlo block/bit error rates of a two-stage code over a named channel.

Trials are split into fixed-size chunks. Chunk i draws from a Philox
generator keyed by ``SeedSequence([seed, i])``, so a result depends only on
(config, seed) and never on how many worker processes shared the chunks.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache
from pathlib import Path
from statistics import NormalDist

import numpy as np

from .bounds import design_delta
from .channels import Channel, parse_channel
from .codec import channel_llr_table, decode_batch, encode_batch
from .construction import CodeSpec, attach_fast_stage, build_general

WORKERS_ENV = "UPOLAR_WORKERS"
_PRECISIONS = {"single": np.float32, "double": np.float64}


@dataclass(frozen=True)
class SimConfig:
    n: int = 4
    K: int = 8
    b: int = 1
    g: int = 1
    m: int = 10
    delta: float | None = None  # None: entropy bound G_n for the capacity-g/(b+g) class
    channel: str = "bsc:0.05"
    trials: int = 1000
    seed: int = 0
    output: str | None = None
    chunk: int = 256
    margin: float = 0.02
    precision: str = "single"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.chunk < 1:
            raise ValueError("chunk must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.precision not in _PRECISIONS:
            raise ValueError(f"precision must be one of {sorted(_PRECISIONS)}")
        parse_channel(self.channel)

    @property
    def design_delta(self) -> float:
        if self.delta is not None:
            return float(self.delta)
        return design_delta(self.g / (self.b + self.g), self.n)


@dataclass(frozen=True)
class SimResult:
    bler: float
    ber: float
    trials: int
    block_errors: int
    bit_errors: int
    wilson_halfwidth: float
    seed: int
    channel: str
    rate: float
    wall_time: float = field(default=0.0, compare=False)

    def wilson_interval(self) -> tuple[float, float]:
        return wilson_interval(self.block_errors, self.trials)

    def to_dict(self, include_wall_time: bool = False) -> dict:
        out = asdict(self)
        if not include_wall_time:
            out.pop("wall_time")
        return out


def wilson_interval(errors: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials < 1 or not 0 <= errors <= trials:
        raise ValueError("need 0 <= errors <= trials and trials >= 1")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    p = errors / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    lo = 0.0 if errors == 0 else max(0.0, center - half)
    hi = 1.0 if errors == trials else min(1.0, center + half)
    return lo, hi


def wilson_halfwidth(errors: int, trials: int, confidence: float = 0.95) -> float:
    lo, hi = wilson_interval(errors, trials, confidence)
    return (hi - lo) / 2


@lru_cache(maxsize=8)
def _spec_for(n, K, b, g, m, delta, margin) -> CodeSpec:
    try:
        plan = build_general(b, g, n, K)
        return attach_fast_stage(plan, m, delta, margin)
    except ValueError as exc:
        raise ValueError(f"infeasible spec: {exc}") from None


def build_spec(config: SimConfig) -> CodeSpec:
    c = config
    return _spec_for(c.n, c.K, c.b, c.g, c.m, c.design_delta, c.margin)


def sample_outputs(w: Channel, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Output symbol indices for transmitted bits ``x``, by inverse-CDF sampling."""
    r = rng.random(x.shape)
    c0 = np.cumsum(w.p0)[:-1]
    c1 = np.cumsum(w.p1)[:-1]
    y = np.zeros(x.shape, dtype=np.intp)
    one = x.astype(bool)
    for k in range(w.n_outputs - 1):
        y += r >= np.where(one, c1[k], c0[k])
    return y


def _chunk_sizes(trials, chunk):
    full, rest = divmod(trials, chunk)
    return [chunk] * full + ([rest] if rest else [])


def _run_chunk(config: SimConfig, index: int, size: int) -> tuple[int, int]:
    spec = build_spec(config)
    w = parse_channel(config.channel)
    table = channel_llr_table(w)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([config.seed, index])))
    info = rng.integers(0, 2, size=(size, spec.n_info), dtype=np.uint8)
    x = encode_batch(spec, info)
    y = sample_outputs(w, x, rng)
    decoded, _ = decode_batch(spec, table[y], dtype=_PRECISIONS[config.precision])
    wrong = decoded != info
    return int(np.count_nonzero(wrong.any(axis=1))), int(np.count_nonzero(wrong))


def _worker_batch(config, jobs):
    return [_run_chunk(config, i, s) for i, s in jobs]


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
        if value < 1:
            raise ValueError(f"{WORKERS_ENV} must be positive")
        return value
    return 1


def run_mc(config: SimConfig, workers: int | None = None) -> SimResult:
    """Estimate block and bit error rates; deterministic given ``config``."""
    start = time.perf_counter()
    spec = build_spec(config)
    workers = default_workers() if workers is None else workers
    jobs = list(enumerate(_chunk_sizes(config.trials, config.chunk)))
    if workers <= 1 or len(jobs) == 1:
        counts = _worker_batch(config, jobs)
    else:
        shares = [jobs[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_worker_batch, [config] * workers, shares))
        counts = [c for part in parts for c in part]
    block_errors = sum(c[0] for c in counts)
    bit_errors = sum(c[1] for c in counts)
    result = SimResult(
        bler=block_errors / config.trials,
        ber=bit_errors / (config.trials * spec.n_info) if spec.n_info else 0.0,
        trials=config.trials,
        block_errors=block_errors,
        bit_errors=bit_errors,
        wilson_halfwidth=wilson_halfwidth(block_errors, config.trials),
        seed=config.seed,
        channel=config.channel,
        rate=spec.rate,
        wall_time=time.perf_counter() - start,
    )
    if config.output:
        write_result(result, config.output)
    return result


def write_result(result: SimResult, path, include_wall_time: bool = False) -> None:
    Path(path).write_text(json.dumps(result.to_dict(include_wall_time), indent=2, sort_keys=True) + "\n")


def read_result(path) -> SimResult:
    data = json.loads(Path(path).read_text())
    return SimResult(**data)


# --- key=value config files ---------------------------------------------------

def _coerce(name, raw):
    kinds = {f.name: f.type for f in fields(SimConfig)}
    if name not in kinds:
        raise ValueError(f"unknown config key {name!r}")
    kind = kinds[name]
    if raw.lower() in ("", "none") and "None" in str(kind):
        return None
    if kind.startswith("int"):
        return int(raw, 0)
    if kind.startswith("float"):
        return float(raw)
    return raw


def parse_config_text(text: str, **overrides) -> SimConfig:
    """SimConfig from ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        values[key.strip()] = _coerce(key.strip(), raw.strip())
    values.update({k: v for k, v in overrides.items() if v is not None})
    return SimConfig(**values)


def load_config(path, **overrides) -> SimConfig:
    return parse_config_text(Path(path).read_text(), **overrides)


def dump_config(config: SimConfig) -> str:
    return "".join(f"{k} = {'none' if v is None else v}\n" for k, v in asdict(config).items())
