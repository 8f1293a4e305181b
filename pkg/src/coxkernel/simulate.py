"""Data-generating process: renewal schedule, Brownian covariates, Cox counts.

Counts are produced exactly by time change: unit-rate Poisson arrival times
are pushed through the inverse of the cumulative intensity, which is
piecewise Weibull between consecutive observation times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, InvalidParameterError, OutOfRangeError, SingularityError

__all__ = [
    "ObservationSchedule",
    "CovariatePath",
    "IntensityModel",
    "CountingRealization",
    "sample_schedule",
    "sample_covariate",
    "sample_covariate_batch",
    "baseline_intensity",
    "baseline_cumulative",
    "baseline_cumulative_inverse",
    "intensity",
    "cumulative_intensity",
    "inverse_cumulative",
    "time_change",
    "sample_counts",
    "sample_counts_batch",
]


@dataclass(frozen=True)
class ObservationSchedule:
    """Increasing observation times ``S_1 < S_2 < ...`` inside ``(0, horizon]``."""

    times: np.ndarray
    horizon: float = 1.0

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        object.__setattr__(self, "times", times)
        if times.size:
            if np.any(np.diff(times) <= 0):
                raise InvalidInputError("schedule times must be strictly increasing")
            if times[0] <= 0 or times[-1] > self.horizon:
                raise InvalidInputError(f"schedule times must lie in (0, {self.horizon}]")

    def __len__(self):
        return self.times.size

    def count(self, t):
        """M(t), the number of observation times ``<= t``."""
        out = np.searchsorted(self.times, t, side="right")
        return int(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class CovariatePath:
    """Covariate values recorded at each schedule time, shape ``(M, d)``."""

    schedule: ObservationSchedule
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2 or values.shape[0] != len(self.schedule):
            raise InvalidInputError(
                f"expected one covariate vector per schedule time ({len(self.schedule)}), got shape {values.shape}"
            )
        object.__setattr__(self, "values", values)

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def projection(self, t) -> np.ndarray:
        """Concatenate the covariate vectors observed up to ``t``."""
        return self.values[: self.schedule.count(t)].reshape(-1)


@dataclass(frozen=True)
class IntensityModel:
    """Weibull baseline modulated by ``exp(sin(beta0 * sum of observed covariates))``."""

    a: float = 0.5
    b: float = 2.0
    beta0: float = 0.1
    renewal_eps: float = 0.0075

    def __post_init__(self):
        for name in ("a", "b", "renewal_eps"):
            value = getattr(self, name)
            if not value > 0:
                raise InvalidParameterError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class CountingRealization:
    """Jump times of one trajectory on ``[0, 1]``."""

    jump_times: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        jumps = np.asarray(self.jump_times, dtype=float).reshape(-1)
        if jumps.size and np.any(np.diff(jumps) <= 0):
            raise InvalidInputError("jump times must be strictly increasing")
        object.__setattr__(self, "jump_times", jumps)

    def __len__(self):
        return self.jump_times.size

    def count(self, t):
        out = np.searchsorted(self.jump_times, t, side="right")
        return int(out) if np.ndim(out) == 0 else out


def sample_schedule(renewal_eps: float, horizon: float = 1.0, rng=None) -> ObservationSchedule:
    """Renewal times with inter-arrivals ``renewal_eps + Exp(mean renewal_eps)``.

    Generation stops at the first time beyond ``horizon``, which is dropped.
    """
    if not renewal_eps > 0:
        raise InvalidParameterError(f"renewal_eps must be positive, got {renewal_eps!r}")
    rng = np.random.default_rng() if rng is None else rng
    block = max(8, int(horizon / (2 * renewal_eps)) + 8)
    times = []
    last = 0.0
    while last <= horizon:
        gaps = renewal_eps + np.asarray(rng.exponential(scale=renewal_eps, size=block), dtype=float)
        arrivals = last + np.cumsum(gaps)
        times.append(arrivals[arrivals <= horizon])
        last = arrivals[-1]
    return ObservationSchedule(np.concatenate(times), horizon)


def _increment_scale(schedule: ObservationSchedule) -> np.ndarray:
    return np.sqrt(np.diff(schedule.times, prepend=0.0))


def sample_covariate(schedule: ObservationSchedule, d: int = 1, rng=None) -> CovariatePath:
    """Brownian motion started at 0, sampled at the schedule times."""
    if d < 1:
        raise InvalidParameterError(f"d must be a positive integer, got {d!r}")
    rng = np.random.default_rng() if rng is None else rng
    draws = np.asarray(rng.standard_normal((len(schedule), d)), dtype=float)
    values = np.cumsum(_increment_scale(schedule)[:, None] * draws, axis=0)
    return CovariatePath(schedule, values)


def sample_covariate_batch(schedule: ObservationSchedule, n: int, d: int = 1, rng=None) -> np.ndarray:
    """``n`` independent Brownian paths at the schedule times, shape ``(n, M, d)``."""
    rng = np.random.default_rng() if rng is None else rng
    draws = rng.standard_normal((n, len(schedule), d))
    return np.cumsum(_increment_scale(schedule)[None, :, None] * draws, axis=1)


def baseline_intensity(t, model: IntensityModel):
    """Weibull hazard ``(b/a) (t/a)**(b-1)``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InvalidParameterError("baseline intensity is defined for t >= 0")
    if model.b < 1 and np.any(t == 0):
        raise SingularityError(f"baseline intensity diverges at t = 0 for b = {model.b}")
    out = (model.b / model.a) * (t / model.a) ** (model.b - 1)
    return float(out) if out.ndim == 0 else out


def baseline_cumulative(t, model: IntensityModel):
    out = (np.asarray(t, dtype=float) / model.a) ** model.b
    return float(out) if out.ndim == 0 else out


def baseline_cumulative_inverse(v, model: IntensityModel):
    out = model.a * np.asarray(v, dtype=float) ** (1.0 / model.b)
    return float(out) if out.ndim == 0 else out


def _segment_factors(sums: np.ndarray, beta0: float) -> np.ndarray:
    """Intensity multipliers per segment from per-time covariate sums ``(..., M)``.

    Segment 0 is ``[0, S_1)`` where nothing has been observed yet.
    """
    running = np.cumsum(sums, axis=-1)
    running = np.concatenate([np.zeros(running.shape[:-1] + (1,)), running], axis=-1)
    return np.exp(np.sin(beta0 * running))


def _segment_tables(schedule: ObservationSchedule, model: IntensityModel, sums: np.ndarray):
    """Return ``(edges, base, factors, cumlam)`` for segment-wise integration.

    ``edges`` has ``M + 2`` entries ``0, S_1, ..., S_M, horizon``; ``cumlam``
    holds the cumulative intensity at those edges.
    """
    edges = np.concatenate([[0.0], schedule.times, [schedule.horizon]])
    base = baseline_cumulative(edges, model)
    factors = _segment_factors(sums, model.beta0)
    mass = factors * np.diff(base)
    zero = np.zeros(mass.shape[:-1] + (1,))
    cumlam = np.concatenate([zero, np.cumsum(mass, axis=-1)], axis=-1)
    return edges, base, factors, cumlam


def _path_tables(path: CovariatePath, model: IntensityModel):
    return _segment_tables(path.schedule, model, path.values.sum(axis=1))


def intensity(t, path: CovariatePath, model: IntensityModel):
    """Conditional intensity at ``t`` given the covariates observed so far."""
    _, _, factors, _ = _path_tables(path, model)
    j = path.schedule.count(t)
    out = baseline_intensity(t, model) * factors[j]
    return float(out) if np.ndim(out) == 0 else out


def cumulative_intensity(t, path: CovariatePath, model: IntensityModel):
    """Integral of the intensity from 0 to ``t``."""
    edges, base, factors, cumlam = _path_tables(path, model)
    t = np.asarray(t, dtype=float)
    j = path.schedule.count(t)
    out = cumlam[j] + factors[j] * (baseline_cumulative(t, model) - base[j])
    return float(out) if out.ndim == 0 else out


def _invert(u, rows, edges, base, factors, cumlam, model):
    """Invert segment-wise; ``rows`` indexes the per-trajectory tables."""
    m = edges.size - 2
    j = np.zeros(u.shape, dtype=np.intp)
    for c in range(1, m + 1):
        j += u >= cumlam[rows, c]
    v = base[j] + (u - cumlam[rows, j]) / factors[rows, j]
    t = baseline_cumulative_inverse(np.maximum(v, 0.0), model)
    return np.clip(t, edges[j], edges[j + 1])


def inverse_cumulative(u, path: CovariatePath, model: IntensityModel):
    """The time ``t`` at which the cumulative intensity reaches ``u``."""
    edges, base, factors, cumlam = _path_tables(path, model)
    u = np.asarray(u, dtype=float)
    total = cumlam[-1]
    if np.any(u < 0) or np.any(u > total * (1 + 1e-12)):
        raise OutOfRangeError(f"u must lie in [0, {total}]")
    flat = np.minimum(u.reshape(-1), total)
    rows = np.zeros(flat.shape, dtype=np.intp)
    out = _invert(flat, rows, edges, base, factors[None, :], cumlam[None, :], model).reshape(u.shape)
    return float(out) if out.ndim == 0 else out


def time_change(unit_times, path: CovariatePath, model: IntensityModel) -> CountingRealization:
    """Map unit-rate arrival times to jump times, dropping those past ``Lambda(horizon)``."""
    unit_times = np.asarray(unit_times, dtype=float)
    total = cumulative_intensity(path.schedule.horizon, path, model)
    kept = unit_times[unit_times <= total]
    return CountingRealization(np.atleast_1d(inverse_cumulative(kept, path, model)))


def sample_counts(path: CovariatePath, model: IntensityModel, rng=None) -> CountingRealization:
    """One Cox trajectory given its covariate path."""
    rng = np.random.default_rng() if rng is None else rng
    total = cumulative_intensity(path.schedule.horizon, path, model)
    block = int(total + 3 * math.sqrt(total)) + 8
    chunks = []
    last = 0.0
    while last <= total:
        arrivals = last + np.cumsum(np.asarray(rng.standard_exponential(block), dtype=float))
        chunks.append(arrivals)
        last = arrivals[-1]
    return time_change(np.concatenate(chunks), path, model)


def sample_counts_batch(schedule: ObservationSchedule, covariates: np.ndarray, model: IntensityModel, rng=None):
    """Jump times for every path in ``covariates`` (shape ``(n, M, d)``).

    Returns ``(jump_times, owner)``: a flat array ordered by trajectory and
    time, and the trajectory index of each jump. Given the total mass
    ``Lambda_k(horizon)``, unit-rate arrivals are a Poisson number of sorted
    uniforms, which lets every trajectory be drawn at once.
    """
    rng = np.random.default_rng() if rng is None else rng
    covariates = np.asarray(covariates, dtype=float)
    n = covariates.shape[0]
    edges, base, factors, cumlam = _segment_tables(schedule, model, covariates.sum(axis=2))
    totals = cumlam[:, -1]
    counts = rng.poisson(totals)
    owner = np.repeat(np.arange(n), counts)
    u = rng.random(owner.size) * totals[owner]
    order = np.lexsort((u, owner))
    u = u[order]
    jumps = _invert(u, owner, edges, base, factors, cumlam, model)
    return jumps, owner
