"""Declarative Monte Carlo experiments with CSV output.

Trial ``i`` of every row uses ``trial_seed(seed, i)``.  Trials are processed
in fixed-size blocks that may run on several worker processes; the blocks are
merged in trial order, so the output does not depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .analysis import critical_p, expected_flexible_count, failure_bound
from .kernels import associative_batch, flexible_count_batch, witness_batch
from .quasirandom import DEFAULT_DELTA, DEFAULT_EPSILON, algebra_quasirandomness
from .sampler import MASK64, bits_to_structures, sample_bits, trial_seeds

__all__ = [
    "CSV_HEADERS",
    "ConfigError",
    "ExperimentConfig",
    "TRIAL_HEADER",
    "TrialRecord",
    "run_experiment",
    "write_experiment",
]

CSV_HEADERS = {
    "associativity": [
        "n", "p", "trials", "seed", "fail_assoc", "fail_paper_cond", "fail_extended_cond",
        "empirical_fail_rate", "union_bound", "asymptotic_bound",
    ],
    "flexible": ["n", "p", "trials", "seed", "mean_flexible", "expected_flexible", "stderr"],
    "quasirandom": ["n", "p", "trials", "seed", "epsilon", "delta", "fraction_quasirandom"],
}

TRIAL_HEADER = [
    "n", "p", "trial_index", "associative", "paper_condition", "extended_condition",
    "flexible_count", "quasirandom",
]

BLOCK = 1024


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    n_values: tuple[int, ...]
    trials: int
    seed: int
    output_path: str
    p: float | None = None
    p_mode: str | None = None
    epsilon: float = DEFAULT_EPSILON
    delta: float = DEFAULT_DELTA

    def __post_init__(self) -> None:
        if self.kind not in CSV_HEADERS:
            raise ConfigError(f"kind must be one of {sorted(CSV_HEADERS)}, got {self.kind!r}")
        if not self.n_values:
            raise ConfigError("n_values must be non-empty")
        if any(not isinstance(n, int) or isinstance(n, bool) or n < 1 for n in self.n_values):
            raise ConfigError("n_values must be positive integers")
        if self.kind == "quasirandom" and min(self.n_values) < 3:
            raise ConfigError("quasirandom experiments need every n >= 3")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials must be a positive integer")
        if not isinstance(self.seed, int) or not 0 <= self.seed <= MASK64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if (self.p is None) == (self.p_mode is None):
            raise ConfigError("give exactly one of p and p_mode")
        if self.p_mode is not None and self.p_mode != "critical":
            raise ConfigError(f"unknown p_mode {self.p_mode!r}; only 'critical' is supported")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"p must lie in [0, 1], got {self.p!r}")
        if self.epsilon <= 0 or self.delta < 0:
            raise ConfigError("epsilon must be positive and delta non-negative")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("experiment config must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"kind", "n_values", "trials", "seed", "output_path"} - set(raw)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        values = dict(raw)
        if not isinstance(values["n_values"], list):
            raise ConfigError("n_values must be a list")
        values["n_values"] = tuple(values["n_values"])
        for key in ("p", "epsilon", "delta"):
            if values.get(key) is not None:
                if isinstance(values[key], bool) or not isinstance(values[key], (int, float)):
                    raise ConfigError(f"{key} must be a number")
                values[key] = float(values[key])
        try:
            return cls(**values)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from None
        return cls.from_dict(raw)

    def p_for(self, n: int) -> float:
        return critical_p(n) if self.p_mode == "critical" else float(self.p)


@dataclass
class TrialRecord:
    n: int
    p: float
    trial_index: int
    associative: bool
    paper_condition: bool
    extended_condition: bool
    flexible_count: int
    quasirandom: bool | None = None


@dataclass
class _Block:
    assoc: np.ndarray | None = None
    literal: np.ndarray | None = None
    extended: np.ndarray | None = None
    flexible: np.ndarray | None = None
    quasirandom: np.ndarray | None = None


def _run_block(kind: str, n: int, p: float, seed: int, lo: int, hi: int,
               epsilon: float, delta: float, full: bool) -> _Block:
    bits = sample_bits(n, p, trial_seeds(seed, lo, hi))
    out = _Block()
    if kind == "associativity" or full:
        out.assoc = associative_batch(bits, n)
        out.literal = witness_batch(bits, n, include_identity=False)
        out.extended = witness_batch(bits, n, include_identity=True)
    if kind == "flexible" or full:
        out.flexible = flexible_count_batch(bits, n)
    if kind == "quasirandom":
        verdicts = [algebra_quasirandomness(s, p, epsilon, delta).algebra_quasirandom
                    for s in bits_to_structures(n, bits)]
        out.quasirandom = np.array(verdicts, dtype=bool)
    return out


def _gather(blocks: list[_Block], name: str) -> np.ndarray | None:
    parts = [getattr(b, name) for b in blocks]
    return None if parts[0] is None else np.concatenate(parts)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def run_experiment(cfg: ExperimentConfig, workers: int = 1, per_trial: bool = False):
    """Run every row; returns ``(rows, trial_records)`` with rows as lists of strings."""
    rows: list[list[str]] = []
    records: list[TrialRecord] = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for n in sorted(cfg.n_values):
            p = cfg.p_for(n)
            spans = [(lo, min(cfg.trials, lo + BLOCK)) for lo in range(0, cfg.trials, BLOCK)]
            args = [(cfg.kind, n, p, cfg.seed, lo, hi, cfg.epsilon, cfg.delta, per_trial) for lo, hi in spans]
            if pool is None:
                blocks = [_run_block(*a) for a in args]
            else:
                blocks = list(pool.map(_run_block, *zip(*args)))
            rows.append(_aggregate(cfg, n, p, blocks))
            if per_trial:
                records += _records(n, p, blocks)
    finally:
        if pool is not None:
            pool.shutdown()
    return rows, records


def _aggregate(cfg: ExperimentConfig, n: int, p: float, blocks: list[_Block]) -> list[str]:
    trials = cfg.trials
    head = [n, p, trials, cfg.seed]
    if cfg.kind == "associativity":
        assoc = _gather(blocks, "assoc")
        fail = int((~assoc).sum())
        fail_paper = int((~_gather(blocks, "literal")).sum())
        fail_ext = int((~_gather(blocks, "extended")).sum())
        union, asymptotic = failure_bound(n, p) if p > 0 else (math.nan, math.nan)
        values = head + [fail, fail_paper, fail_ext, fail / trials, union, asymptotic]
    elif cfg.kind == "flexible":
        counts = _gather(blocks, "flexible").astype(np.float64)
        stderr = float(counts.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        values = head + [float(counts.mean()), expected_flexible_count(n, p), stderr]
    else:
        qr = _gather(blocks, "quasirandom")
        values = head + [cfg.epsilon, cfg.delta, float(qr.mean())]
    return [_fmt(v) for v in values]


def _records(n: int, p: float, blocks: list[_Block]) -> list[TrialRecord]:
    assoc = _gather(blocks, "assoc")
    literal = _gather(blocks, "literal")
    ext = _gather(blocks, "extended")
    flex = _gather(blocks, "flexible")
    qr = _gather(blocks, "quasirandom")
    return [
        TrialRecord(n, p, i, bool(assoc[i]), bool(literal[i]), bool(ext[i]), int(flex[i]),
                    None if qr is None else bool(qr[i]))
        for i in range(len(assoc))
    ]


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def write_experiment(cfg: ExperimentConfig, workers: int = 1, per_trial_path: str | Path | None = None) -> str:
    """Run ``cfg`` and write its CSV to ``cfg.output_path``; returns the CSV text."""
    rows, records = run_experiment(cfg, workers=workers, per_trial=per_trial_path is not None)
    text = _csv_text(CSV_HEADERS[cfg.kind], rows)
    Path(cfg.output_path).write_text(text, encoding="utf-8")
    if per_trial_path is not None:
        trial_rows = [[_fmt(v) if v is not None else "" for v in asdict(r).values()] for r in records]
        Path(per_trial_path).write_text(_csv_text(TRIAL_HEADER, trial_rows), encoding="utf-8")
    return text
