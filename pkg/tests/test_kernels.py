import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coxkernel.errors import InvalidParameterError
from coxkernel.kernels import (
    COV_KERNEL,
    TIME_KERNEL,
    check_kernel,
    eval_cov_kernel,
    eval_time_kernel,
    l2_norm_squared,
    moment,
    product_cov_kernel,
    quadrature_moment,
    scaled,
)


@pytest.mark.parametrize("u, expected", [(0.0, 9.0), (0.5, -1.5), (1.5, 0.0), (-0.1, 0.0), (1.0, 3.0)])
def test_time_kernel_values(u, expected):
    assert eval_time_kernel(u) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("u, expected", [(0.0, 1.125), (1.0, -0.75), (-1.0, -0.75), (2.0, 0.0)])
def test_cov_kernel_values(u, expected):
    assert eval_cov_kernel(u) == pytest.approx(expected, abs=1e-15)


def test_cov_kernel_matches_original_form():
    u = np.linspace(-1, 1, 41)
    assert np.allclose(eval_cov_kernel(u), 0.5 - 5 / 8 * (3 * u**2 - 1), atol=1e-15)


def test_vectorised_evaluation():
    out = eval_time_kernel(np.array([0.0, 0.5, 2.0]))
    assert out.shape == (3,)
    assert np.allclose(out, [9.0, -1.5, 0.0])


@pytest.mark.parametrize(
    "kernel, bw, u, expected",
    [(COV_KERNEL, 1.0, 0.0, 1.125), (COV_KERNEL, 0.5, 0.0, 2.25), (TIME_KERNEL, 0.5, 0.25, -3.0)],
)
def test_scaled(kernel, bw, u, expected):
    assert scaled(kernel, bw, u) == pytest.approx(expected)


@pytest.mark.parametrize("bw", [0.0, -1.0])
def test_scaled_rejects_bad_bandwidth(bw):
    with pytest.raises(InvalidParameterError):
        scaled(COV_KERNEL, bw, 0.0)
    with pytest.raises(InvalidParameterError):
        product_cov_kernel([0.0], bw)


def test_product_kernel_examples():
    assert product_cov_kernel([], 0.3) == 1.0
    assert product_cov_kernel([0.0], 1.0) == pytest.approx(1.125)
    assert product_cov_kernel([0.0, 0.0], 0.5) == pytest.approx(5.0625)


def test_product_kernel_rowwise():
    v = np.array([[0.0, 0.0], [0.0, 2.0]])
    assert np.allclose(product_cov_kernel(v, 1.0), [1.125**2, 0.0])
    assert np.array_equal(product_cov_kernel(np.empty((3, 0)), 0.7), np.ones(3))


@given(st.floats(-3, 3), st.floats(0.05, 5))
def test_product_of_one_equals_scaled(v, bw):
    assert product_cov_kernel([v], bw) == scaled(COV_KERNEL, bw, v)


@pytest.mark.parametrize("kernel", [TIME_KERNEL, COV_KERNEL])
def test_order_two_exactly(kernel):
    assert kernel.exact_moment(0) == 1
    assert kernel.exact_moment(1) == 0
    assert kernel.exact_moment(2) == 0
    assert check_kernel(kernel)["ok"]


def test_moment_examples():
    assert moment(TIME_KERNEL, 0) == 1.0
    assert moment(TIME_KERNEL, 1) == 0.0
    assert moment(COV_KERNEL, 2) == 0.0


def test_l2_norms():
    assert l2_norm_squared(TIME_KERNEL) == 9.0
    assert l2_norm_squared(COV_KERNEL) == 1.125


@pytest.mark.parametrize("kernel", [TIME_KERNEL, COV_KERNEL])
@pytest.mark.parametrize("j", [0, 1, 2, 3, 4])
def test_quadrature_agrees_with_exact(kernel, j):
    assert abs(quadrature_moment(kernel, j) - kernel.moment(j)) < 1e-8


@pytest.mark.parametrize("kernel", [TIME_KERNEL, COV_KERNEL])
def test_l2_norm_by_quadrature(kernel):
    lo, hi = float(kernel.support[0]), float(kernel.support[1])
    u = np.linspace(lo, hi, 10_001)
    from scipy.integrate import simpson

    assert simpson(kernel(u) ** 2, x=u) == pytest.approx(kernel.l2_norm_squared(), abs=1e-8)


@given(st.floats(0.01, 10))
def test_scaled_kernel_integrates_to_one(bw):
    from scipy.integrate import simpson

    for kernel in (TIME_KERNEL, COV_KERNEL):
        lo, hi = float(kernel.support[0]) * bw, float(kernel.support[1]) * bw
        u = np.linspace(lo, hi, 10_001)
        assert abs(simpson(scaled(kernel, bw, u), x=u) - 1.0) < 1e-10


def test_negative_moment_order_rejected():
    with pytest.raises(InvalidParameterError):
        moment(TIME_KERNEL, -1)
