import json

import numpy as np
import pytest

from coxkernel.errors import InvalidInputError, InvalidParameterError
from coxkernel.estimate import EstimatorConfig
from coxkernel.montecarlo import McConfig, McSummary, draw_design, run_study, summarize_errors, time_grid
from coxkernel.simulate import IntensityModel, intensity


def test_summarize_table_values():
    mse, nrmse, *_ = summarize_errors([11.0], 36.21)
    assert nrmse == pytest.approx(0.0916, abs=5e-5)
    assert round(nrmse, 2) == 0.09
    _, nrmse, *_ = summarize_errors([96.0], 36.21)
    assert round(nrmse, 2) == 0.27


def test_summarize_zeros():
    assert summarize_errors([0.0, 0.0, 0.0], 2.0) == (0.0, 0.0, 0.0, 0.0, 0.0)


def test_summarize_quartiles_interpolate():
    mse, _, median, q1, q3 = summarize_errors([1.0, 2.0, 3.0, 4.0], 1.0)
    assert mse == 2.5
    assert (q1, median, q3) == (1.75, 2.5, 3.25)


def test_summarize_empty():
    with pytest.raises(InvalidInputError):
        summarize_errors([], 1.0)


def test_time_grid():
    assert np.allclose(time_grid(4), [0.25, 0.5, 0.75, 1.0])
    with pytest.raises(InvalidParameterError):
        time_grid(0)


def test_single_replication_mse_is_squared_error():
    cfg = McConfig(n=50, n_mc=1, n_t=5, master_seed=3)
    s = run_study(cfg)
    assert np.array_equal(s.mse, (s.estimates[0] - s.true_theta) ** 2)


def test_perfect_estimates_give_zero_error():
    grid = time_grid(3)
    truth = np.array([1.0, 2.0, 3.0])
    s = McSummary.from_estimates(grid, [0, 1, 2], truth, np.tile(truth, (4, 1)))
    assert np.all(s.mse == 0) and np.all(s.nrmse == 0)


def test_summary_coherence_and_ordering():
    s = run_study(McConfig(n=100, n_mc=30, n_t=10, master_seed=1))
    assert np.allclose(s.nrmse**2 * s.true_theta**2, s.mse, rtol=1e-10, atol=0)
    assert np.all(s.q1_se <= s.median_se) and np.all(s.median_se <= s.q3_se)
    assert np.all(np.diff(s.effective_dim) >= 0)
    schedule, z = draw_design(IntensityModel(), 1, 1)
    assert np.array_equal(s.true_theta, intensity(time_grid(10), z, IntensityModel()))


def test_fixed_bandwidth_config():
    est = EstimatorConfig(h=0.3, eta=1.5)
    s = run_study(McConfig(n=60, n_mc=3, n_t=4, estimator=est))
    assert s.estimates.shape == (3, 4)


def test_parallel_matches_serial():
    cfg = McConfig(n=80, n_mc=6, n_t=5, master_seed=11)
    serial = run_study(cfg)
    parallel = run_study(McConfig(n=80, n_mc=6, n_t=5, master_seed=11, threads=2))
    assert np.array_equal(serial.estimates, parallel.estimates)
    assert serial.to_json() == parallel.to_json()


def test_outputs(tmp_path):
    s = run_study(McConfig(n=40, n_mc=4, n_t=7))
    s.write_csv(tmp_path / "s.csv")
    s.write_plot_data(tmp_path / "p.csv")
    rows = (tmp_path / "s.csv").read_text().splitlines()
    assert len(rows) == 8
    assert rows[0].split(",")[:3] == ["t", "effective_dim", "true_theta"]
    plot = (tmp_path / "p.csv").read_text().splitlines()
    assert plot[0] == "t,true_theta,est_q1,est_median,est_q3,q1_se,median_se,q3_se"
    data = json.loads(s.to_json())
    assert data["n_mc"] == 4 and len(data["mse"]) == 7


def test_degradation_with_time():
    # the third quartile of the squared error is worse late in the window
    s = run_study(McConfig(n=500, n_mc=200, n_t=10, master_seed=0))
    assert s.at(0.9)["q3_se"] > s.at(0.5)["q3_se"]


def test_config_validation():
    with pytest.raises(InvalidParameterError):
        McConfig(n=0)
    with pytest.raises(InvalidParameterError):
        McConfig(estimator="bogus")
