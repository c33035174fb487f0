"""
Shared numerical kernels: finite-difference stencils, one-step flow
integration and composite Simpson quadrature with a Richardson error bar.
"""

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np

from .core.errors import ConfigError, NumericError
from .core.logging import get_logger
from .models.schemas import GridSpec

logger = get_logger(__name__)

PointFunction = Callable[[np.ndarray], np.ndarray]

# largest single RK4 step; longer flows are split into equal sub-steps
MAX_FLOW_STEP = 1e-2


def _finite(values: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise NumericError(f"non-finite samples in {what}")
    return values


def _shifted(pt: np.ndarray, axis: int, offset: float) -> np.ndarray:
    out = np.array(pt, dtype=float, copy=True)
    out[axis] = out[axis] + offset
    return out


def central_diff_4(f: PointFunction, pt: np.ndarray, axis: int, h: float) -> np.ndarray:
    """(-f(+2h) + 8f(+h) - 8f(-h) + f(-2h)) / 12h along one coordinate axis.

    f maps a point array of shape (4, *batch) to values of any shape ending in
    the batch shape; the stencil is applied elementwise.
    """
    if not h > 0:
        raise NumericError(f"finite-difference step must be positive, got {h}")
    pt = np.asarray(pt, dtype=float)
    samples = [
        _finite(np.asarray(f(_shifted(pt, axis, k * h)), dtype=float), "central_diff_4")
        for k in (2, 1, -1, -2)
    ]
    return (-samples[0] + 8.0 * samples[1] - 8.0 * samples[2] + samples[3]) / (12.0 * h)


def gradient_4(f: PointFunction, pt: np.ndarray, h: float) -> np.ndarray:
    """Stack of central_diff_4 over the four axes, shape (4, *value_shape)."""
    return np.stack([central_diff_4(f, pt, axis, h) for axis in range(4)])


def _rk4_step(X: PointFunction, pt: np.ndarray, dt: float) -> np.ndarray:
    k1 = np.asarray(X(pt), dtype=float)
    k2 = np.asarray(X(pt + 0.5 * dt * k1), dtype=float)
    k3 = np.asarray(X(pt + 0.5 * dt * k2), dtype=float)
    k4 = np.asarray(X(pt + dt * k3), dtype=float)
    return pt + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_flow(X: PointFunction, pt: np.ndarray, t: float) -> np.ndarray:
    """Flow of the vector field X for parameter time t by classical RK4."""
    out = np.asarray(pt, dtype=float)
    steps = max(1, math.ceil(abs(t) / MAX_FLOW_STEP))
    dt = t / steps
    for _ in range(steps):
        out = _finite(_rk4_step(X, out, dt), "rk4_flow")
    return out


def simpson_weights(n: int, h: float) -> np.ndarray:
    """Composite Simpson weights (1, 4, 2, ..., 4, 1) * h / 3 for odd n."""
    if n < 3 or n % 2 == 0:
        raise ConfigError(f"Simpson rule needs an odd count >= 3, got {n}")
    w = np.full(n, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * h / 3.0


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    richardson_error: float
    coarse_value: float


def _tensor_sum(values: np.ndarray, weights: Sequence[np.ndarray]) -> float:
    weighted = values
    for axis, w in enumerate(weights):
        shape = [1] * values.ndim
        shape[axis] = w.size
        weighted = weighted * w.reshape(shape)
    # correctly rounded sum: independent of traversal order
    return math.fsum(weighted.ravel().tolist())


def simpson_nodes(grid: GridSpec) -> Tuple[np.ndarray, ...]:
    if grid.extents is None:
        raise ConfigError("grid extents are not set")
    if len(grid.extents) != len(grid.counts):
        raise ConfigError("grid extents and counts differ in length")
    return tuple(np.linspace(lo, hi, n) for (lo, hi), n in zip(grid.extents, grid.counts))


def simpson_sampled(values: np.ndarray, spacing: Sequence[float]) -> QuadratureResult:
    """Tensor-product composite Simpson over values already sampled on a uniform grid.

    The error bar compares with the half-resolution grid: |I_h - I_2h| / 15.
    """
    values = _finite(np.asarray(values, dtype=float), "simpson")
    if values.ndim != len(spacing):
        raise ConfigError(f"{values.ndim}-d samples with {len(spacing)} spacings")
    fine = _tensor_sum(values, [simpson_weights(n, h) for n, h in zip(values.shape, spacing)])
    coarse_values = values[tuple(slice(None, None, 2) for _ in spacing)]
    coarse = _tensor_sum(
        coarse_values,
        [simpson_weights(n // 2 + 1, 2.0 * h) for n, h in zip(values.shape, spacing)],
    )
    return QuadratureResult(value=fine, richardson_error=abs(fine - coarse) / 15.0, coarse_value=coarse)


def grid_mesh(grid: GridSpec) -> Tuple[np.ndarray, ...]:
    """Sparse ij-indexed coordinate arrays of the grid nodes."""
    return tuple(np.meshgrid(*simpson_nodes(grid), indexing="ij", sparse=True))


def simpson_box(f: Callable[..., np.ndarray], grid: GridSpec) -> QuadratureResult:
    """Tensor-product composite Simpson over the grid box.

    f is called once with broadcastable coordinate arrays (one per axis, in
    `numpy.meshgrid(..., indexing="ij", sparse=True)` layout).
    """
    mesh = grid_mesh(grid)
    values = np.broadcast_to(np.asarray(f(*mesh), dtype=float), tuple(grid.counts))
    return simpson_sampled(values, grid.spacing())


def simpson_1d(values: np.ndarray, h: float) -> QuadratureResult:
    """Simpson over already sampled values on a uniform 1D grid."""
    return simpson_sampled(np.asarray(values, dtype=float), (h,))
