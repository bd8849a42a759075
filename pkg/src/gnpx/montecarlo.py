"""Reproducible Monte Carlo runs comparing normalized maxima with their limits.

Trial ``t`` samples its graph from ``mix_seed(master_seed, t)``, so a run is a
pure function of its configuration: neither the number of worker processes
nor their scheduling changes any output.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import serialize
from .extremes import count_ell_exceedances, top_m_common_neighbors
from .graph import GEOMETRIC_SKIP, GEOMETRIC_SKIP_BELOW, PER_PAIR, sample_gnp
from .limits import (
    NormalizationParams,
    gamma_ell,
    gumbel_limit_cdf,
    lambda_exact,
    normalization,
    threshold_b,
)

log = logging.getLogger(__name__)

EULER_GAMMA = 0.57721566490153286061
MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def default_y_grid(lo: float = -2.0, hi: float = 4.0, step: float = 0.25) -> tuple[float, ...]:
    count = int(round((hi - lo) / step))
    return tuple(lo + i * step for i in range(count + 1))


def mix_seed(master_seed: int, trial_index: int) -> int:
    """SplitMix64 output for stream position ``trial_index + 1`` of ``master_seed``.

    ``z = master + (t + 1) * 0x9E3779B97F4A7C15 (mod 2^64)``, followed by the
    SplitMix64 finalizer (xor-shift 30, multiply 0xBF58476D1CE4E5B9, xor-shift
    27, multiply 0x94D049BB133111EB, xor-shift 31).
    """
    z = (master_seed + (trial_index + 1) * GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def resolve_threads(threads: int | str | None) -> int:
    if threads is None:
        threads = os.environ.get("GNPX_THREADS", 1)
    if threads == "auto":
        return os.cpu_count() or 1
    threads = int(threads)
    if threads < 1:
        raise ValueError(f"threads must be positive or 'auto', got {threads}")
    return threads


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    p: float
    k: int = 1
    m: int = 1
    trials: int = 100
    y_grid: tuple[float, ...] = field(default_factory=default_y_grid)
    master_seed: int = 0
    threads: int | str = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "y_grid", tuple(float(y) for y in self.y_grid))
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")
        if not self.y_grid:
            raise ValueError("y_grid must be nonempty")
        if any(b <= a for a, b in zip(self.y_grid, self.y_grid[1:])):
            raise ValueError("y_grid must be strictly increasing")
        if not 1 <= self.k < self.n:
            raise ValueError(f"k must satisfy 1 <= k < n, got k={self.k}, n={self.n}")
        if self.m < 1:
            raise ValueError(f"m must be positive, got {self.m}")
        if self.threads != "auto":
            resolve_threads(self.threads)
        normalization(self.n, self.p, self.k)

    @property
    def sampling_method(self) -> str:
        return GEOMETRIC_SKIP if self.p < GEOMETRIC_SKIP_BELOW else PER_PAIR

    def to_dict(self, include_threads: bool = True) -> dict:
        d = asdict(self)
        d["y_grid"] = list(self.y_grid)
        if not include_threads:
            # Worker count never affects results, so summaries omit it.
            del d["threads"]
        return d

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    seed_used: int
    delta_values: tuple[int, ...]
    normalized: tuple[float, ...]
    gamma_exceedances: tuple[int, ...]


@dataclass(frozen=True)
class ExperimentSummary:
    config: ExperimentConfig
    normalization: NormalizationParams
    sampling_method: str
    y_grid: tuple[float, ...]
    empirical_cdf: tuple[float, ...]
    gumbel_cdf: tuple[float, ...]
    janson_cdf: tuple[float, ...] | None
    ks_vs_gumbel: float
    ks_vs_janson: float | None
    gumbel_fit: tuple[float, float] | None
    gamma_exceedance_rate: float | None

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(include_threads=False),
            "normalization": asdict(self.normalization),
            "sampling_method": self.sampling_method,
            "y_grid": list(self.y_grid),
            "empirical_cdf": list(self.empirical_cdf),
            "gumbel_cdf": list(self.gumbel_cdf),
            "janson_cdf": None if self.janson_cdf is None else list(self.janson_cdf),
            "ks_vs_gumbel": self.ks_vs_gumbel,
            "ks_vs_janson": self.ks_vs_janson,
            "gumbel_fit": None
            if self.gumbel_fit is None
            else {"location": self.gumbel_fit[0], "scale": self.gumbel_fit[1]},
            "gamma_exceedance_rate": self.gamma_exceedance_rate,
        }

    def to_json(self) -> str:
        return serialize.dumps(self.to_dict())

    def cdf_csv(self) -> str:
        janson = self.janson_cdf or [None] * len(self.y_grid)
        rows = [list(r) for r in zip(self.y_grid, self.empirical_cdf, self.gumbel_cdf, janson)]
        return serialize.csv_text(["y", "empirical", "gumbel", "janson"], rows)


def run_trial(cfg: ExperimentConfig, trial_index: int) -> TrialRecord:
    """Sample one graph and measure its top-m values and cutoff exceedances."""
    seed = mix_seed(cfg.master_seed, trial_index)
    g = sample_gnp(cfg.n, cfg.p, seed)
    top = top_m_common_neighbors(g, cfg.k, cfg.m)
    params = normalization(cfg.n, cfg.p, cfg.k)
    exceed = tuple(
        count_ell_exceedances(g, ell, gamma_ell(cfg.n, cfg.p, ell)).count for ell in range(1, cfg.k)
    )
    return TrialRecord(
        trial_index=trial_index,
        seed_used=seed,
        delta_values=top.values,
        normalized=tuple(params.normalize(v) for v in top.values),
        gamma_exceedances=exceed,
    )


def _run_chunk(cfg: ExperimentConfig, indices: Sequence[int]) -> list[TrialRecord]:
    return [run_trial(cfg, t) for t in indices]


def run_trials(
    cfg: ExperimentConfig, progress_every: int = 0
) -> list[TrialRecord]:
    """All trial records in trial-index order."""
    workers = resolve_threads(cfg.threads)
    indices = list(range(cfg.trials))
    if workers == 1:
        records = []
        for t in indices:
            records.append(run_trial(cfg, t))
            if progress_every and (t + 1) % progress_every == 0:
                log.info("completed %d/%d trials", t + 1, cfg.trials)
        return records
    chunk = max(1, min(64, cfg.trials // (4 * workers) or 1))
    chunks = [indices[i : i + chunk] for i in range(0, len(indices), chunk)]
    records = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for done in pool.map(_run_chunk, [cfg] * len(chunks), chunks):
            records.extend(done)
            if progress_every:
                log.info("completed %d/%d trials", len(records), cfg.trials)
    records.sort(key=lambda r: r.trial_index)
    return records


def ks_distance(
    empirical: Sequence[float],
    reference: Sequence[float] | Callable[[float], float],
    y_grid: Sequence[float] | None = None,
) -> float:
    """Largest absolute gap between two CDFs over the evaluation grid.

    ``reference`` is either a sequence aligned with ``empirical`` or a
    callable evaluated at each point of ``y_grid``.
    """
    if len(empirical) == 0:
        raise ValueError("empty evaluation grid")
    if callable(reference):
        if y_grid is None or len(y_grid) != len(empirical):
            raise ValueError("a callable reference needs a y_grid aligned with the empirical CDF")
        reference = [reference(y) for y in y_grid]
    if len(reference) != len(empirical):
        raise ValueError("empirical and reference CDFs have different lengths")
    return max(abs(float(e) - float(r)) for e, r in zip(empirical, reference))


def fit_gumbel(samples: Sequence[float]) -> tuple[float, float]:
    """Method-of-moments Gumbel fit returning ``(location, scale)``."""
    x = np.asarray(samples, dtype=np.float64)
    if x.size < 10:
        raise ValueError(f"need at least 10 samples, got {x.size}")
    sd = float(np.std(x, ddof=1))
    if not sd > 0:
        raise ValueError("samples have zero variance")
    scale = math.sqrt(6.0) * sd / math.pi
    return float(np.mean(x)) - EULER_GAMMA * scale, scale


def empirical_cdf(values: Sequence[int], thresholds: Sequence[float]) -> tuple[float, ...]:
    """Fraction of ``values`` at or below each threshold."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    counts = np.searchsorted(v, np.asarray(thresholds, dtype=np.float64), side="right")
    return tuple(float(c) / v.size for c in counts)


def summarize(cfg: ExperimentConfig, records: Sequence[TrialRecord]) -> ExperimentSummary:
    params = normalization(cfg.n, cfg.p, cfg.k)
    # Compare raw counts against b(y) so the empirical side and the exact
    # lambda side use the same threshold arithmetic.
    thresholds = [threshold_b(params, y) for y in cfg.y_grid]
    mth = [r.delta_values[cfg.m - 1] for r in records if len(r.delta_values) >= cfg.m]
    emp = empirical_cdf(mth, thresholds)
    gumbel = tuple(gumbel_limit_cdf(y, cfg.m) for y in cfg.y_grid)

    janson = ks_janson = fit = None
    if cfg.m == 1:
        janson = tuple(lambda_exact(cfg.n, cfg.p, cfg.k, y).lower_bound for y in cfg.y_grid)
        ks_janson = ks_distance(emp, janson)
        try:
            fit = fit_gumbel([r.normalized[0] for r in records])
        except ValueError:
            fit = None

    rate = None
    if cfg.k > 1:
        rate = sum(1 for r in records if any(r.gamma_exceedances)) / len(records)

    return ExperimentSummary(
        config=cfg,
        normalization=params,
        sampling_method=cfg.sampling_method,
        y_grid=cfg.y_grid,
        empirical_cdf=emp,
        gumbel_cdf=gumbel,
        janson_cdf=janson,
        ks_vs_gumbel=ks_distance(emp, gumbel),
        ks_vs_janson=ks_janson,
        gumbel_fit=fit,
        gamma_exceedance_rate=rate,
    )


def run_experiment(cfg: ExperimentConfig, progress_every: int = 0) -> ExperimentSummary:
    return summarize(cfg, run_trials(cfg, progress_every))


def trials_csv(records: Sequence[TrialRecord], m: int) -> str:
    header = ["trial", "seed"] + [f"delta_{j}" for j in range(1, m + 1)]
    header += [f"normalized_{j}" for j in range(1, m + 1)]
    rows = [
        [r.trial_index, r.seed_used, *r.delta_values, *r.normalized] for r in records
    ]
    return serialize.csv_text(header, rows)


def write_outputs(
    summary: ExperimentSummary,
    out_dir: str | Path,
    records: Sequence[TrialRecord] | None = None,
) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.json").write_text(summary.to_json())
    (out / "cdf.csv").write_text(summary.cdf_csv())
    if records is not None:
        (out / "trials.csv").write_text(trials_csv(records, summary.config.m))
