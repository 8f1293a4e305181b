"""Monte Carlo study of the estimator over a time grid.

One schedule and one evaluation covariate path are drawn from the design
stream and held fixed. Replication ``r`` draws ``n`` fresh trajectories from
its own stream ``(master_seed, r)``, so results do not depend on how
replications are spread over workers.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import streams
from .dataset import simulate_dataset
from .errors import InvalidInputError, InvalidParameterError
from .estimate import DEFAULT_TRIM_EPS, EstimatorConfig, intensity_estimate
from .simulate import CovariatePath, IntensityModel, ObservationSchedule, intensity, sample_covariate, sample_schedule

__all__ = ["McConfig", "McSummary", "run_study", "summarize_errors", "draw_design", "time_grid"]


def time_grid(n_t: int) -> np.ndarray:
    """``{i / n_t : i = 1..n_t}``."""
    if n_t < 1:
        raise InvalidParameterError(f"n_t must be positive, got {n_t!r}")
    return np.arange(1, n_t + 1) / n_t


@dataclass(frozen=True)
class McConfig:
    model: IntensityModel = field(default_factory=IntensityModel)
    n: int = 500
    n_mc: int = 100
    n_t: int = 100
    d: int = 1
    master_seed: int = 0
    estimator: object = "auto"
    trim_eps: float = DEFAULT_TRIM_EPS
    threads: int = 1

    def __post_init__(self):
        for name in ("n", "n_mc", "n_t", "d", "threads"):
            if getattr(self, name) < 1:
                raise InvalidParameterError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not (self.estimator == "auto" or isinstance(self.estimator, EstimatorConfig)):
            raise InvalidParameterError("estimator must be 'auto' or an EstimatorConfig")

    @property
    def grid(self) -> np.ndarray:
        return time_grid(self.n_t)

    def config_at(self, effective_dim: int) -> EstimatorConfig:
        if self.estimator == "auto":
            return EstimatorConfig.auto(self.n, effective_dim, self.trim_eps)
        return self.estimator

    def to_dict(self) -> dict:
        out = {
            "model": asdict(self.model),
            "n": self.n,
            "n_mc": self.n_mc,
            "n_t": self.n_t,
            "d": self.d,
            "master_seed": self.master_seed,
            "trim_eps": self.trim_eps,
        }
        if self.estimator == "auto":
            out["estimator"] = "auto"
        else:
            out["estimator"] = {"h": self.estimator.h, "eta": self.estimator.eta, "trim_eps": self.estimator.trim_eps}
        return out


def summarize_errors(errors, true_theta: float):
    """Return ``(mse, nrmse, median, q1, q3)`` of squared errors.

    Quartiles interpolate linearly between order statistics.
    """
    errors = np.asarray(errors, dtype=float).reshape(-1)
    if errors.size == 0:
        raise InvalidInputError("need at least one squared error")
    mse = float(np.mean(errors))
    nrmse = float(np.sqrt(mse) / true_theta) if true_theta > 0 else float("nan")
    q1, median, q3 = (float(q) for q in np.percentile(errors, [25, 50, 75]))
    return mse, nrmse, median, q1, q3


@dataclass
class McSummary:
    """Per-grid-time summary. ``estimates`` keeps the raw ``(n_mc, n_t)`` matrix."""

    t: np.ndarray
    effective_dim: np.ndarray
    true_theta: np.ndarray
    mean_estimate: np.ndarray
    mse: np.ndarray
    nrmse: np.ndarray
    median_se: np.ndarray
    q1_se: np.ndarray
    q3_se: np.ndarray
    est_q1: np.ndarray
    est_median: np.ndarray
    est_q3: np.ndarray
    estimates: np.ndarray = field(repr=False)

    COLUMNS = (
        "t",
        "effective_dim",
        "true_theta",
        "mean_estimate",
        "mse",
        "nrmse",
        "median_se",
        "q1_se",
        "q3_se",
        "est_q1",
        "est_median",
        "est_q3",
    )

    @classmethod
    def from_estimates(cls, grid, effective_dim, true_theta, estimates):
        estimates = np.asarray(estimates, dtype=float)
        sq = (estimates - true_theta[None, :]) ** 2
        stats = np.array([summarize_errors(sq[:, i], true_theta[i]) for i in range(len(grid))]).reshape(len(grid), 5)
        eq1, emed, eq3 = np.percentile(estimates, [25, 50, 75], axis=0)
        return cls(
            t=np.asarray(grid, dtype=float),
            effective_dim=np.asarray(effective_dim, dtype=int),
            true_theta=np.asarray(true_theta, dtype=float),
            mean_estimate=estimates.mean(axis=0),
            mse=stats[:, 0],
            nrmse=stats[:, 1],
            median_se=stats[:, 2],
            q1_se=stats[:, 3],
            q3_se=stats[:, 4],
            est_q1=eq1,
            est_median=emed,
            est_q3=eq3,
            estimates=estimates,
        )

    def at(self, t: float) -> dict:
        """The summary row at the grid time closest to ``t``."""
        i = int(np.argmin(np.abs(self.t - t)))
        return {c: getattr(self, c)[i].item() for c in self.COLUMNS}

    def rows(self):
        for i in range(self.t.size):
            yield [getattr(self, c)[i].item() for c in self.COLUMNS]

    def write_csv(self, path):
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.COLUMNS)
            for row in self.rows():
                w.writerow([v if isinstance(v, int) else repr(v) for v in row])
        return path

    def write_plot_data(self, path):
        """Series ``(t, true, quartiles of the estimate, quartiles of the squared error)``."""
        cols = ("t", "true_theta", "est_q1", "est_median", "est_q3", "q1_se", "median_se", "q3_se")
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for i in range(self.t.size):
                w.writerow([repr(getattr(self, c)[i].item()) for c in cols])
        return path

    def to_json(self) -> str:
        data = {c: [None if np.isnan(v) else v for v in getattr(self, c).tolist()] if c != "effective_dim" else getattr(self, c).tolist() for c in self.COLUMNS}
        data["n_mc"] = int(self.estimates.shape[0])
        return json.dumps(data, indent=2, sort_keys=True) + "\n"


def draw_design(model: IntensityModel, d: int, master_seed: int):
    """The fixed schedule and evaluation path shared by all replications."""
    rng = streams.design_stream(master_seed)
    schedule = sample_schedule(model.renewal_eps, 1.0, rng)
    z = sample_covariate(schedule, d, rng)
    return schedule, z


def _run_replications(config: McConfig, schedule: ObservationSchedule, z: CovariatePath, reps) -> np.ndarray:
    grid = config.grid
    dims = config.d * schedule.count(grid)
    configs = [config.config_at(int(m)) for m in dims]
    zvecs = [z.projection(t) for t in grid]
    out = np.empty((len(reps), grid.size))
    for row, r in enumerate(reps):
        data = simulate_dataset(schedule, config.model, config.n, config.d, streams.replication_stream(config.master_seed, r))
        for i, t in enumerate(grid):
            out[row, i] = intensity_estimate(t, zvecs[i], data, configs[i]).theta_tilde
    return out


def run_study(config: McConfig) -> McSummary:
    schedule, z = draw_design(config.model, config.d, config.master_seed)
    grid = config.grid
    true_theta = np.asarray(intensity(grid, z, config.model), dtype=float)
    dims = config.d * schedule.count(grid)
    reps = list(range(config.n_mc))
    if config.threads == 1:
        estimates = _run_replications(config, schedule, z, reps)
    else:
        chunks = [c.tolist() for c in np.array_split(np.array(reps), config.threads) if c.size]
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            parts = pool.map(_run_replications, [config] * len(chunks), [schedule] * len(chunks), [z] * len(chunks), chunks)
            estimates = np.concatenate(list(parts), axis=0)
    return McSummary.from_estimates(grid, dims, true_theta, estimates)
