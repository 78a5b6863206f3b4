"""Event-level simulation of the six setting-pair runs.

Random numbers
--------------
Each setting pair ``i`` (0..5, canonical order) gets its own Philox4x64-10
stream (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3", SC'11)
with counter starting at zero and 128-bit key ``(k0, k1)``::

    k0 = mix64(seed + (i + 1) * 0x9E3779B97F4A7C15  mod 2**64)
    k1 = mix64(k0 ^ 0xD1B54A32D192ED03)

where ``mix64`` is the SplitMix64 finalizer::

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z = z ^ (z >> 31)

Each 64-bit output ``x`` becomes ``u = (x >> 11) * 2**-53`` in [0, 1). An event
falls in category ``k`` of the fixed order ``++, +-, +0, -+, --, -0, 0+, 0-, 00``
when ``cdf[k-1] <= u < cdf[k]``, with the last cumulative value pinned to 1.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    AUDITED_PAIRS,
    OUTCOMES,
    SPRIME_SIGNS,
    AngleConfig,
    Outcome,
    OutcomeSelector,
    selected_outcomes,
)
from .quantum import DetectorParams, OutcomeTable, outcome_table

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
KEY_SALT = 0xD1B54A32D192ED03
_CHUNK = 1 << 20
_IDX = {o: i for i, o in enumerate(OUTCOMES)}


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def substream_key(seed: int, pair_index: int) -> tuple[int, int]:
    k0 = mix64(seed + (pair_index + 1) * GOLDEN_GAMMA)
    return k0, mix64(k0 ^ KEY_SALT)


def substream(seed: int, pair_index: int) -> np.random.Generator:
    key = np.array(substream_key(seed, pair_index), dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class SimConfig:
    detector: DetectorParams
    angles: AngleConfig
    events_per_pair: int
    seed: int
    selector: OutcomeSelector = OutcomeSelector()

    def __post_init__(self) -> None:
        if int(self.events_per_pair) != self.events_per_pair or self.events_per_pair < 1:
            raise ValueError(f"events_per_pair must be a positive integer, got {self.events_per_pair!r}")
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class CountMatrix:
    counts: np.ndarray  # 3x3 int64 in (+, -, 0) order
    total: int

    def __post_init__(self) -> None:
        c = np.asarray(self.counts, dtype=np.int64).reshape(3, 3)
        if (c < 0).any() or int(c.sum()) != self.total:
            raise ValueError("counts must be nonnegative and sum to total")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    def __add__(self, other: CountMatrix) -> CountMatrix:
        return CountMatrix(self.counts + other.counts, self.total + other.total)

    def count(self, o1: Outcome, o2: Outcome) -> int:
        return int(self.counts[_IDX[o1], _IDX[o2]])


def _cdf(table: OutcomeTable) -> np.ndarray:
    cdf = np.cumsum(table.flat())
    cdf[-1] = 1.0
    return cdf


def simulate_pair_block(table: OutcomeTable, n: int, stream: np.random.Generator) -> CountMatrix:
    """Draw ``n`` events from ``table`` by inverse CDF and count them."""
    cdf = _cdf(table)
    below = np.zeros(9, dtype=np.int64)
    done = 0
    while done < n:
        u = stream.random(min(_CHUNK, n - done))
        # number of draws with u < cdf[k]; differencing gives per-category counts
        below += [np.count_nonzero(u < c) for c in cdf]
        done += u.size
    counts = np.diff(below, prepend=0)
    return CountMatrix(counts.reshape(3, 3), n)


@dataclass
class PairResult:
    name: str
    delta: float
    counts: CountMatrix
    probabilities: np.ndarray
    std_errors: np.ndarray
    m_estimate: float
    m_std_error: float


@dataclass
class SimReport:
    config: SimConfig
    pairs: list[PairResult]
    sprime_estimate: float
    sprime_std_error: float
    z_scores: dict[tuple[int, int], float] = field(default_factory=dict)

    @property
    def m_estimates(self) -> list[float]:
        return [p.m_estimate for p in self.pairs]

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "config": config_to_dict(cfg),
            "pairs": [
                {
                    "pair": p.name,
                    "delta": _num(p.delta),
                    "total": p.counts.total,
                    "counts": p.counts.counts.tolist(),
                    "probabilities": [[_num(x) for x in row] for row in p.probabilities],
                    "std_errors": [[_num(x) for x in row] for row in p.std_errors],
                    "m_estimate": _num(p.m_estimate),
                    "m_std_error": _num(p.m_std_error),
                }
                for p in self.pairs
            ],
            "sprime_estimate": _num(self.sprime_estimate),
            "sprime_std_error": _num(self.sprime_std_error),
            "assumption_a_z": [
                {"pairs": [self.pairs[i].name, self.pairs[j].name], "z": _num(z)}
                for (i, j), z in sorted(self.z_scores.items())
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def counts_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["pair", "o1", "o2", "count"])
        for p in self.pairs:
            for o1, o2 in itertools.product(OUTCOMES, repeat=2):
                w.writerow([p.name, o1.symbol, o2.symbol, p.counts.count(o1, o2)])
        return buf.getvalue()


def _num(x: float) -> float | None:
    """12 significant digits; non-finite values become null."""
    x = float(x)
    return float(format(x, ".12g")) if math.isfinite(x) else None


def config_to_dict(cfg: SimConfig) -> dict:
    dp = cfg.detector
    return {
        "detector": {"eta1": dp.eta1, "eta2": dp.eta2, "f": dp.f, "F": dp.F},
        "angles": {
            "unit": "rad",
            "a": _num(cfg.angles.a.radians),
            "b": _num(cfg.angles.b.radians),
            "a_prime": _num(cfg.angles.a_prime.radians),
            "b_prime": _num(cfg.angles.b_prime.radians),
        },
        "events_per_pair": cfg.events_per_pair,
        "seed": cfg.seed,
        "selector": {"r": cfg.selector.r, "q": cfg.selector.q},
    }


def _z(a: float, sa: float, b: float, sb: float) -> float:
    den = math.sqrt(sa * sa + sb * sb)
    if den == 0.0:
        return 0.0 if a == b else math.inf
    return abs(a - b) / den


def assumption_a_zscores(m: list[float], se: list[float]) -> dict[tuple[int, int], float]:
    return {(i, j): _z(m[i], se[i], m[j], se[j]) for i, j in itertools.combinations(range(len(m)), 2)}


def simulate_pairs(cfg: SimConfig, order: list[int] | None = None) -> dict[int, CountMatrix]:
    """Count matrices for the six pairs; ``order`` only changes the visiting order."""
    order = list(range(len(AUDITED_PAIRS))) if order is None else order
    out = {}
    for i in order:
        table = outcome_table(cfg.detector, AUDITED_PAIRS[i].delta(cfg.angles))
        out[i] = simulate_pair_block(table, cfg.events_per_pair, substream(cfg.seed, i))
    return out


def run_experiment(cfg: SimConfig) -> SimReport:
    counts = simulate_pairs(cfg)
    n = cfg.events_per_pair
    pairs = []
    for i, pair in enumerate(AUDITED_PAIRS):
        cm = counts[i]
        p = cm.counts / n
        se = np.sqrt(p * (1.0 - p) / n)
        m_hat = int(cm.counts[:2, :2].sum()) / n
        pairs.append(
            PairResult(
                name=pair.name,
                delta=pair.delta(cfg.angles).radians,
                counts=cm,
                probabilities=p,
                std_errors=se,
                m_estimate=m_hat,
                m_std_error=math.sqrt(m_hat * (1.0 - m_hat) / n),
            )
        )

    terms, variances = [], []
    for sign, pr, (o1, o2) in zip(SPRIME_SIGNS, pairs, selected_outcomes(cfg.selector)):
        ph = pr.probabilities[_IDX[o1], _IDX[o2]]
        terms.append(sign * ph)
        variances.append(ph * (1.0 - ph) / n)
    z = assumption_a_zscores([p.m_estimate for p in pairs], [p.m_std_error for p in pairs])
    return SimReport(cfg, pairs, math.fsum(terms), math.sqrt(math.fsum(variances)), z)


@dataclass(frozen=True)
class AssumptionACheck:
    passed: bool
    threshold: float
    details: list[tuple[str, str, float, bool]]

    @property
    def offending(self) -> list[tuple[str, str]]:
        return [(a, b) for a, b, _, ok in self.details if not ok]


def check_assumption_a(report: SimReport, z_threshold: float = 4.0) -> AssumptionACheck:
    """Two-sample z-test of M-hat between every pair of setting pairs."""
    m = report.m_estimates
    se = [p.m_std_error for p in report.pairs]
    details = []
    for (i, j), z in sorted(assumption_a_zscores(m, se).items()):
        details.append((report.pairs[i].name, report.pairs[j].name, z, z < z_threshold))
    return AssumptionACheck(all(ok for *_, ok in details), z_threshold, details)
