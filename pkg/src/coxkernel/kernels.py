"""Polynomial kernels on bounded intervals.

Coefficients and support bounds are held as exact fractions, so moments and
squared L2 norms are obtained by exact term-by-term integration. Evaluation
itself is done in floating point and is vectorised over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import simpson

from .errors import InvalidParameterError

__all__ = [
    "KernelSpec",
    "TIME_KERNEL",
    "COV_KERNEL",
    "eval_time_kernel",
    "eval_cov_kernel",
    "scaled",
    "product_cov_kernel",
    "moment",
    "l2_norm_squared",
    "quadrature_moment",
    "check_kernel",
]


def _poly_integral(coeffs, lo, hi):
    """Exact integral of sum(c_i u**i) over [lo, hi]."""
    return sum(c * (hi ** (i + 1) - lo ** (i + 1)) / (i + 1) for i, c in enumerate(coeffs))


def _poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


@dataclass(frozen=True)
class KernelSpec:
    """A univariate polynomial kernel restricted to a closed interval.

    Parameters
    ----------
    name : str
        Label used in reports.
    coeffs : tuple of Fraction
        Polynomial coefficients in ascending powers.
    support : tuple of Fraction
        Closed interval ``(lo, hi)`` outside of which the kernel is zero.
    order : int
        Number of vanishing moments (1..order) the kernel is meant to have.
    """

    name: str
    coeffs: tuple
    support: tuple
    order: int = 2

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        lo, hi = float(self.support[0]), float(self.support[1])
        value = np.zeros_like(u)
        for c in reversed(self.coeffs):
            value = value * u + float(c)
        out = np.where((u >= lo) & (u <= hi), value, 0.0)
        return out if out.ndim else float(out)

    def evaluate(self, u):
        return self(u)

    def moment(self, j: int) -> float:
        return float(self.exact_moment(j))

    def exact_moment(self, j: int) -> Fraction:
        if j < 0:
            raise InvalidParameterError(f"moment order must be non-negative, got {j}")
        shifted = (Fraction(0),) * j + tuple(self.coeffs)
        return _poly_integral(shifted, *self.support)

    def l2_norm_squared(self) -> float:
        squared = _poly_mul(list(self.coeffs), list(self.coeffs))
        return float(_poly_integral(squared, *self.support))

    def scaled(self, bandwidth, u):
        return scaled(self, bandwidth, u)


# K(u) = (30u^2 - 36u + 9) on [0, 1]; one-sided, so only past jumps count.
TIME_KERNEL = KernelSpec(
    name="time",
    coeffs=(Fraction(9), Fraction(-36), Fraction(30)),
    support=(Fraction(0), Fraction(1)),
)

# H(u) = 1/2 - 5/8 (3u^2 - 1) = 9/8 - 15/8 u^2 on [-1, 1].
COV_KERNEL = KernelSpec(
    name="covariate",
    coeffs=(Fraction(9, 8), Fraction(0), Fraction(-15, 8)),
    support=(Fraction(-1), Fraction(1)),
)


def eval_time_kernel(u):
    return TIME_KERNEL(u)


def eval_cov_kernel(u):
    return COV_KERNEL(u)


def _check_bandwidth(bandwidth):
    if not bandwidth > 0:
        raise InvalidParameterError(f"bandwidth must be positive, got {bandwidth!r}")


def scaled(kernel: KernelSpec, bandwidth: float, u):
    """Evaluate ``kernel(u / bandwidth) / bandwidth``."""
    _check_bandwidth(bandwidth)
    return kernel(np.asarray(u, dtype=float) / bandwidth) / bandwidth


def product_cov_kernel(v, bandwidth: float, kernel: KernelSpec = COV_KERNEL):
    """Product of scaled covariate kernels over the last axis of ``v``.

    A vector of length zero gives the empty product, 1. A 2-d array of shape
    ``(n, m)`` is reduced row-wise and returns ``n`` values.
    """
    _check_bandwidth(bandwidth)
    v = np.asarray(v, dtype=float)
    if v.shape[-1] == 0:
        out = np.ones(v.shape[:-1])
    else:
        out = np.prod(scaled(kernel, bandwidth, v), axis=-1)
    return out if out.ndim else float(out)


def moment(kernel: KernelSpec, j: int) -> float:
    return kernel.moment(j)


def l2_norm_squared(kernel: KernelSpec) -> float:
    return kernel.l2_norm_squared()


def quadrature_moment(kernel: KernelSpec, j: int, panels: int = 10_000) -> float:
    """Composite Simpson estimate of the j-th moment, as a cross-check."""
    lo, hi = float(kernel.support[0]), float(kernel.support[1])
    u = np.linspace(lo, hi, panels + 1)
    return float(simpson(u**j * kernel(u), x=u))


def check_kernel(kernel: KernelSpec, tol: float = 1e-12) -> dict:
    """Report whether ``kernel`` integrates to one with vanishing moments."""
    moments = {j: kernel.moment(j) for j in range(kernel.order + 1)}
    ok = abs(moments[0] - 1.0) <= tol and all(
        abs(moments[j]) <= tol for j in range(1, kernel.order + 1)
    )
    return {"name": kernel.name, "moments": moments, "l2_norm_squared": kernel.l2_norm_squared(), "ok": ok}
