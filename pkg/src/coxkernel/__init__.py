"""Kernel estimation of the intensity of Cox processes driven by covariates observed at random times."""

__version__ = "0.1.0"

from .dataset import Dataset, read_dataset, simulate_dataset, write_dataset
from .estimate import (
    EstimateResult,
    EstimatorConfig,
    bandwidth_rule,
    density_estimate,
    estimate_curve,
    intensity_estimate,
    phi_estimate,
    trimming_level,
)
from .kernels import COV_KERNEL, TIME_KERNEL, KernelSpec
from .simulate import (
    CountingRealization,
    CovariatePath,
    IntensityModel,
    ObservationSchedule,
    sample_counts,
    sample_covariate,
    sample_schedule,
)
