"""A sample of ``n`` (covariate path, counting trajectory) pairs on one schedule."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .simulate import (
    CountingRealization,
    CovariatePath,
    IntensityModel,
    ObservationSchedule,
    sample_counts_batch,
    sample_covariate_batch,
)

__all__ = ["Dataset", "simulate_dataset", "write_dataset", "read_dataset"]


@dataclass(frozen=True)
class Dataset:
    """Covariates of shape ``(n, M, d)`` and jumps stored flat with an owner index.

    Jumps are ordered by owner and then by time.
    """

    schedule: ObservationSchedule
    covariates: np.ndarray
    jump_times: np.ndarray
    owner: np.ndarray

    def __post_init__(self):
        cov = np.asarray(self.covariates, dtype=float)
        if cov.ndim != 3 or cov.shape[1] != len(self.schedule):
            raise InvalidInputError(f"covariates must have shape (n, {len(self.schedule)}, d), got {cov.shape}")
        if cov.shape[0] < 1:
            raise InvalidInputError("a dataset needs at least one trajectory")
        jumps = np.asarray(self.jump_times, dtype=float).reshape(-1)
        owner = np.asarray(self.owner, dtype=np.intp).reshape(-1)
        if jumps.shape != owner.shape:
            raise InvalidInputError("jump_times and owner must have equal length")
        if owner.size and (owner.min() < 0 or owner.max() >= cov.shape[0]):
            raise InvalidInputError("owner index out of range")
        object.__setattr__(self, "covariates", cov)
        object.__setattr__(self, "jump_times", jumps)
        object.__setattr__(self, "owner", owner)

    @property
    def n(self) -> int:
        return self.covariates.shape[0]

    @property
    def d(self) -> int:
        return self.covariates.shape[2]

    @classmethod
    def from_trajectories(cls, paths, realizations):
        paths = list(paths)
        realizations = list(realizations)
        if not paths or len(paths) != len(realizations):
            raise InvalidInputError("need equally many covariate paths and realizations (n >= 1)")
        schedule = paths[0].schedule
        if any(p.schedule is not schedule and not np.array_equal(p.schedule.times, schedule.times) for p in paths):
            raise InvalidInputError("all covariate paths must share the schedule")
        covariates = np.stack([p.values for p in paths])
        jumps = [np.asarray(r.jump_times, dtype=float) for r in realizations]
        owner = np.repeat(np.arange(len(jumps)), [j.size for j in jumps])
        flat = np.concatenate(jumps) if jumps else np.empty(0)
        return cls(schedule, covariates, flat, owner)

    @property
    def paths(self):
        return [CovariatePath(self.schedule, v) for v in self.covariates]

    @property
    def counts(self):
        bounds = np.searchsorted(self.owner, np.arange(self.n + 1))
        return [CountingRealization(self.jump_times[bounds[k] : bounds[k + 1]]) for k in range(self.n)]

    def projections(self, m: int) -> np.ndarray:
        """The first ``m`` observed covariate vectors of every path, flattened to ``(n, m*d)``."""
        return self.covariates[:, :m, :].reshape(self.n, m * self.d)


def simulate_dataset(schedule: ObservationSchedule, model: IntensityModel, n: int, d: int = 1, rng=None) -> Dataset:
    """Draw ``n`` covariate paths and their Cox trajectories on a shared schedule."""
    rng = np.random.default_rng() if rng is None else rng
    covariates = sample_covariate_batch(schedule, n, d, rng)
    jumps, owner = sample_counts_batch(schedule, covariates, model, rng)
    return Dataset(schedule, covariates, jumps, owner)


def _fmt(x) -> str:
    return repr(float(x))


def write_dataset(data: Dataset, out_dir, replicate_offset: int = 0) -> list:
    """Write ``schedule.csv``, ``covariates.csv``, ``jumps.csv`` and ``dataset.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    path = out / "schedule.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "time"])
        for j, s in enumerate(data.schedule.times, start=1):
            w.writerow([j, _fmt(s)])
    written.append(path)

    path = out / "covariates.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["replicate", "index", "time"] + [f"z{c + 1}" for c in range(data.d)])
        for k in range(data.n):
            for j, s in enumerate(data.schedule.times):
                w.writerow([k + replicate_offset, j + 1, _fmt(s)] + [_fmt(v) for v in data.covariates[k, j]])
    written.append(path)

    path = out / "jumps.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["replicate", "time"])
        for k, t in zip(data.owner, data.jump_times):
            w.writerow([int(k) + replicate_offset, _fmt(t)])
    written.append(path)

    path = out / "dataset.json"
    meta = {"n": data.n, "d": data.d, "horizon": data.schedule.horizon, "schedule_size": len(data.schedule)}
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    written.append(path)
    return written


def read_dataset(in_dir) -> Dataset:
    """Inverse of :func:`write_dataset`."""
    src = Path(in_dir)
    meta = json.loads((src / "dataset.json").read_text())
    n, d = int(meta["n"]), int(meta["d"])
    horizon = float(meta.get("horizon", 1.0))

    with (src / "schedule.csv").open(newline="") as fh:
        times = [float(row["time"]) for row in csv.DictReader(fh)]
    schedule = ObservationSchedule(np.array(times), horizon)

    covariates = np.zeros((n, len(times), d))
    with (src / "covariates.csv").open(newline="") as fh:
        for row in csv.DictReader(fh):
            k, j = int(row["replicate"]), int(row["index"]) - 1
            covariates[k, j] = [float(row[f"z{c + 1}"]) for c in range(d)]

    owner, jumps = [], []
    with (src / "jumps.csv").open(newline="") as fh:
        for row in csv.DictReader(fh):
            owner.append(int(row["replicate"]))
            jumps.append(float(row["time"]))
    owner = np.array(owner, dtype=np.intp)
    jumps = np.array(jumps)
    order = np.lexsort((jumps, owner))
    return Dataset(schedule, covariates, jumps[order], owner[order])
