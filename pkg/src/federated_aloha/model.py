"""
Federated linear-regression model.

This module provides:
- synthetic instance generation (one noiseless sample per user),
- the squared-error loss and the one-step gradient-descent local update,
- the significance norm a user attaches to its local update,
- server-side aggregation and the error metric.

Weight vectors are 1-D float64 numpy arrays of a fixed length L.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
import numpy.typing as npt

WeightVector = npt.NDArray[np.float64]


class ModelError(ValueError):
    """Raised when a model operation receives invalid arguments."""
    pass


class DimensionMismatchError(ModelError):
    """Raised when vector lengths do not agree."""
    pass


class SignificanceMode(str, Enum):
    """How a user measures the size of its local update."""
    WEIGHT_NORM = "weight-norm"
    DELTA_NORM = "delta-norm"
    GRADIENT_NORM = "gradient-norm"


class AggregationMode(str, Enum):
    """How the base station combines received local updates."""
    MEAN = "mean"
    SUM_GRADIENT = "sum-gradient"


@dataclass(frozen=True)
class UserDataset:
    """One user's data set: input vector x and scalar output y."""
    x: WeightVector
    y: float


@dataclass(frozen=True)
class ModelInstance:
    """
    A generated regression problem.

    Attributes:
        w_true: The weight vector used to generate every output.
        x: Input matrix of shape (K, L); row k belongs to user k.
        y: Output vector of shape (K,), y[k] = x[k] . w_true.
    """
    w_true: WeightVector
    x: npt.NDArray[np.float64]
    y: npt.NDArray[np.float64]

    @property
    def num_users(self) -> int:
        return self.x.shape[0]

    def dataset(self, k: int) -> UserDataset:
        """Return the data set of user k."""
        return UserDataset(x=self.x[k], y=float(self.y[k]))

    @property
    def datasets(self) -> list[UserDataset]:
        return [self.dataset(k) for k in range(self.num_users)]


def row_dot(x: npt.NDArray[np.float64], w: WeightVector) -> npt.NDArray[np.float64]:
    """
    x . w along the last axis.

    All residuals go through this kernel. A row gives the same bits whether it
    is reduced alone or as part of a batch.
    """
    return np.sum(x * w, axis=-1)


def _check_same_length(a: WeightVector, b: WeightVector) -> None:
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"Vector shapes differ: {a.shape} vs {b.shape}"
        )


def generate_instance(K: int, L: int, rng: np.random.Generator) -> ModelInstance:
    """
    Draw w_true and every x_k i.i.d. standard normal and set y_k = x_k . w_true.

    w_true is drawn first, then X row by row. y goes through `row_dot`, so the
    loss of every user at w_true is exactly zero.

    Raises:
        ModelError: If K or L is less than 1.
    """
    if K < 1:
        raise ModelError(f"Number of users K must be at least 1, got {K}")
    if L < 1:
        raise ModelError(f"Dimension L must be at least 1, got {L}")

    w_true = rng.standard_normal(L)
    x = rng.standard_normal((K, L))
    y = row_dot(x, w_true)
    return ModelInstance(w_true=w_true, x=x, y=y)


def loss(w: WeightVector, d: UserDataset) -> float:
    """Squared-error loss 1/2 |x.w - y|^2 of one user."""
    _check_same_length(w, d.x)
    residual = row_dot(d.x, w) - d.y
    return 0.5 * float(residual * residual)


def local_update(w: WeightVector, d: UserDataset, h: float) -> WeightVector:
    """
    One gradient-descent step on the user's loss: w - h (x.w - y) x.

    Raises:
        ModelError: If h is not positive.
        DimensionMismatchError: If w and x differ in length.
    """
    if not h > 0:
        raise ModelError(f"Step size must be positive, got {h}")
    _check_same_length(w, d.x)
    return w - h * (row_dot(d.x, w) - d.y) * d.x


def significance(
    w_old: WeightVector,
    w_new: WeightVector,
    mode: SignificanceMode = SignificanceMode.DELTA_NORM,
    *,
    available: bool = True,
    step_size: float | None = None,
) -> float:
    """
    Size of a local update, used to prioritize channel access.

    - weight-norm:   ||w_new||
    - delta-norm:    ||w_new - w_old||
    - gradient-norm: ||w_new - w_old|| / step_size

    A user that could not compute its update reports 0.
    """
    _check_same_length(w_old, w_new)
    if not available:
        return 0.0

    mode = SignificanceMode(mode)
    if mode is SignificanceMode.WEIGHT_NORM:
        return float(np.linalg.norm(w_new))

    delta = float(np.linalg.norm(w_new - w_old))
    if mode is SignificanceMode.DELTA_NORM:
        return delta
    if step_size is None or not step_size > 0:
        raise ModelError("gradient-norm significance needs a positive step_size")
    return delta / step_size


def residual_gradient_norms(
    w: WeightVector, x: npt.NDArray[np.float64], y: npt.NDArray[np.float64]
) -> npt.NDArray[np.float64]:
    """Per-row norm of the loss gradient, |x_k.w - y_k| * ||x_k||."""
    if x.shape[1] != w.shape[0]:
        raise DimensionMismatchError(
            f"Inputs have {x.shape[1]} columns but w has length {w.shape[0]}"
        )
    return np.abs(row_dot(x, w) - y) * np.linalg.norm(x, axis=1)


def significances(
    w: WeightVector,
    x: npt.NDArray[np.float64],
    y: npt.NDArray[np.float64],
    h: float,
    mode: SignificanceMode,
    available: npt.NDArray[np.bool_],
) -> npt.NDArray[np.float64]:
    """
    Batch form of `significance` for every row of (x, y) at the global w.

    Rows where `available` is false get 0.
    """
    mode = SignificanceMode(mode)
    if mode is SignificanceMode.WEIGHT_NORM:
        residuals = row_dot(x, w) - y
        values = np.linalg.norm(w - h * residuals[:, None] * x, axis=1)
    else:
        values = residual_gradient_norms(w, x, y)
        if mode is SignificanceMode.DELTA_NORM:
            values = h * values
    return np.where(available, values, 0.0)


def aggregate(
    w_prev: WeightVector,
    received: Sequence[WeightVector],
    mode: AggregationMode = AggregationMode.MEAN,
) -> WeightVector:
    """
    Combine the received local updates into the next global weight vector.

    mean:         arithmetic mean of the received vectors
    sum-gradient: w_prev + sum(w_k - w_prev)

    An empty reception leaves w_prev unchanged.
    """
    for w_k in received:
        _check_same_length(w_prev, w_k)
    if not received:
        return w_prev.copy()

    stacked = np.stack(received)
    if AggregationMode(mode) is AggregationMode.MEAN:
        return stacked.mean(axis=0)
    return w_prev + (stacked - w_prev).sum(axis=0)


def error_norm(w: WeightVector, w_true: WeightVector) -> float:
    """Euclidean distance ||w - w_true||."""
    _check_same_length(w, w_true)
    return float(np.linalg.norm(w - w_true))
