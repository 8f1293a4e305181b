"""Empirical check that the studentized estimator is close to standard normal."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import streams
from .dataset import simulate_dataset
from .errors import InvalidInputError, InvalidParameterError
from .estimate import DEFAULT_TRIM_EPS, EstimateResult, EstimatorConfig, bandwidth_rule, intensity_estimate, undersmoothed_bandwidth
from .kernels import COV_KERNEL, TIME_KERNEL
from .montecarlo import draw_design
from .simulate import IntensityModel, intensity

__all__ = [
    "CltConfig",
    "CltSample",
    "standardized_statistic",
    "normal_cdf",
    "normality_distance",
    "run_clt",
]

MIN_STATISTICS = 100


def normal_cdf(x):
    """Standard normal CDF through the complementary error function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def standardized_statistic(result: EstimateResult, true_theta: float, n: int, h: float, eta: float):
    """Studentized estimation error, or ``None`` when the estimate is not positive.

    The variance term is ``theta_tilde * |K|_2^2 * |H|_2^(2 dM) / f_tilde``.
    """
    if not true_theta > 0:
        raise InvalidParameterError(f"true_theta must be positive, got {true_theta!r}")
    if not result.theta_tilde > 0:
        return None
    dm = result.effective_dim
    scale = n * h * eta**dm
    variance = result.theta_tilde * TIME_KERNEL.l2_norm_squared() * COV_KERNEL.l2_norm_squared() ** dm / result.f_tilde
    return math.sqrt(scale) * (result.theta_tilde - true_theta) / math.sqrt(variance)


@dataclass(frozen=True)
class CltConfig:
    model: IntensityModel = field(default_factory=lambda: IntensityModel(beta0=0.1, renewal_eps=0.3))
    n: int = 2000
    n_mc: int = 500
    t: float = 0.5
    d: int = 1
    master_seed: int = 0
    bandwidth: str = "undersmoothed"
    trim_eps: float = DEFAULT_TRIM_EPS
    threads: int = 1

    def __post_init__(self):
        if self.bandwidth not in ("undersmoothed", "mse"):
            raise InvalidParameterError(f"bandwidth must be 'undersmoothed' or 'mse', got {self.bandwidth!r}")
        for name in ("n", "n_mc", "d", "threads"):
            if getattr(self, name) < 1:
                raise InvalidParameterError(f"{name} must be positive")
        if not 0 < self.t <= 1:
            raise InvalidParameterError(f"t must lie in (0, 1], got {self.t!r}")

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("threads")
        return out


@dataclass
class CltSample:
    statistics: np.ndarray
    n: int
    h: float
    eta: float
    effective_dim: int
    n_excluded: int = 0
    n_mc: int = 0
    t: float = 0.5
    true_theta: float = float("nan")

    @property
    def exclusion_rate(self) -> float:
        return self.n_excluded / self.n_mc if self.n_mc else 0.0


def normality_distance(sample) -> float:
    """Kolmogorov-Smirnov distance to the standard normal."""
    stats = sample.statistics if isinstance(sample, CltSample) else sample
    x = np.sort(np.asarray(stats, dtype=float).reshape(-1))
    if x.size < MIN_STATISTICS:
        raise InvalidInputError(f"need at least {MIN_STATISTICS} statistics, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("statistics must be finite")
    cdf = np.array([normal_cdf(v) for v in x])
    m = x.size
    upper = np.arange(1, m + 1) / m - cdf
    lower = cdf - np.arange(0, m) / m
    return float(max(upper.max(), lower.max()))


def _statistics_chunk(config: CltConfig, schedule, z, est_config, true_theta, reps):
    zvec = z.projection(config.t)
    out = []
    for r in reps:
        data = simulate_dataset(schedule, config.model, config.n, config.d, streams.replication_stream(config.master_seed, r))
        res = intensity_estimate(config.t, zvec, data, est_config)
        stat = None if res.trimmed else standardized_statistic(res, true_theta, config.n, est_config.h, est_config.eta)
        out.append(float("nan") if stat is None else stat)
    return np.array(out)


def run_clt(config: CltConfig) -> CltSample:
    schedule, z = draw_design(config.model, config.d, config.master_seed)
    dim = config.d * schedule.count(config.t)
    rule = undersmoothed_bandwidth if config.bandwidth == "undersmoothed" else bandwidth_rule
    bw = rule(config.n, dim)
    est_config = EstimatorConfig(h=bw, eta=bw, trim_eps=config.trim_eps)
    true_theta = float(intensity(config.t, z, config.model))
    reps = list(range(config.n_mc))
    if config.threads == 1:
        raw = _statistics_chunk(config, schedule, z, est_config, true_theta, reps)
    else:
        chunks = [c.tolist() for c in np.array_split(np.array(reps), config.threads) if c.size]
        k = len(chunks)
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            raw = np.concatenate(list(pool.map(_statistics_chunk, [config] * k, [schedule] * k, [z] * k, [est_config] * k, [true_theta] * k, chunks)))
    kept = raw[np.isfinite(raw)]
    return CltSample(
        statistics=kept,
        n=config.n,
        h=bw,
        eta=bw,
        effective_dim=dim,
        n_excluded=int(raw.size - kept.size),
        n_mc=config.n_mc,
        t=config.t,
        true_theta=true_theta,
    )


def write_clt_outputs(sample: CltSample, out_dir, ks: float | None = None):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stats_path = out / "statistics.csv"
    with stats_path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["statistic"])
        for s in sample.statistics:
            w.writerow([repr(float(s))])
    summary = {
        "ks_distance": ks,
        "exclusion_rate": sample.exclusion_rate,
        "n_excluded": sample.n_excluded,
        "n_mc": sample.n_mc,
        "n": sample.n,
        "h": sample.h,
        "eta": sample.eta,
        "effective_dim": sample.effective_dim,
        "t": sample.t,
        "true_theta": sample.true_theta,
    }
    json_path = out / "clt.json"
    json_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return [stats_path, json_path]
