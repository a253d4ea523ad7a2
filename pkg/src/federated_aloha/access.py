"""
Access-probability policies for uploading local updates.

This module provides:
- the equal access probability of multichannel ALOHA and its throughput,
- exact per-user success probabilities under collisions,
- the error bound and its constrained minimizer (clipped water-filling on
  q_k, with the Lagrange multiplier found by bisection),
- the distributed rule p_k = [e ln a_k - psi] clipped to [0, 1] and the
  dual-ascent update of the feedback psi,
- the two single-uploader baselines: cyclic order and largest gradient.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
import numpy.typing as npt
from scipy.optimize import bisect

from .model import ModelInstance, WeightVector, residual_gradient_norms

logger = logging.getLogger(__name__)

E_INV = math.exp(-1.0)

# Bisection on ln(lambda)
BISECTION_XTOL = 1e-14
BISECTION_MAX_ITER = 200


class AccessError(ValueError):
    """Raised when an access operation receives invalid arguments."""
    pass


class InfeasibleProblemError(AccessError):
    """Raised when the success budget M/e cannot be met."""
    pass


class Policy(str, Enum):
    """Upload discipline; values are the config-file spellings."""
    POLLING = "polling"
    EQUAL_ALOHA = "equal"
    ADAPTIVE_ALOHA = "adaptive"
    CCD = "ccd"
    GENIE_MAX_NORM = "genie"

    @property
    def single_uploader(self) -> bool:
        return self in (Policy.CCD, Policy.GENIE_MAX_NORM)


@dataclass
class FeedbackSignal:
    """The feedback psi broadcast by the base station; one writer, the run loop."""
    psi: float = 0.0

    def update(self, P_hat: int, M: int, mu: float) -> None:
        self.psi = dual_ascent_update(self.psi, P_hat, M, mu)


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise AccessError(f"{name} must be in [0, 1], got {value}")


def equal_access_probability(K: int, M: int, p_comp: float) -> float:
    """Common access probability min(M/K, p_comp)."""
    if K < 1 or M < 1:
        raise AccessError(f"K and M must be at least 1, got K={K}, M={M}")
    _check_probability("p_comp", p_comp)
    return min(M / K, p_comp)


def conditional_transmit_probability(K: int, M: int, p_comp: float) -> float:
    """
    Probability that an available user transmits under equal ALOHA.

    Availability times this coin gives the unconditional min(M/K, p_comp).
    """
    if p_comp == 0.0:
        return 0.0
    return equal_access_probability(K, M, p_comp) / p_comp


def expected_successes(K: int, M: int, p: float) -> float:
    """Average number of received updates, K p (1 - p/M)^(K-1)."""
    _check_probability("p", p)
    if M < 1:
        raise AccessError(f"M must be at least 1, got {M}")
    return K * p * (1.0 - p / M) ** (K - 1)


def success_probability(p_all: Sequence[float], k: int, M: int) -> float:
    """Probability that user k is received: p_k * prod_{n != k} (1 - p_n/M)."""
    p = np.asarray(p_all, dtype=np.float64)
    if not 0 <= k < p.size:
        raise AccessError(f"User index {k} out of range for {p.size} users")
    if np.any((p < 0.0) | (p > 1.0)):
        raise AccessError("All access probabilities must be in [0, 1]")
    if M < 1:
        raise AccessError(f"M must be at least 1, got {M}")
    others = np.delete(p, k)
    return float(p[k] * np.prod(1.0 - others / M))


def total_success_probability(p_all: Sequence[float], M: int) -> float:
    """Expected number of received updates, Q = sum_k q_k."""
    return sum(success_probability(p_all, k, M) for k in range(len(p_all)))


def error_bound(a: Sequence[float], q: Sequence[float]) -> float:
    """Upper bound sum_k a_k exp(-q_k) on the aggregation error."""
    a_arr = np.asarray(a, dtype=np.float64)
    q_arr = np.asarray(q, dtype=np.float64)
    if a_arr.shape != q_arr.shape:
        raise AccessError(f"a and q differ in length: {a_arr.size} vs {q_arr.size}")
    return float(np.sum(a_arr * np.exp(-q_arr)))


def solve_centralized(a: Sequence[float], M: int) -> npt.NDArray[np.float64]:
    """
    Minimize sum_k a_k exp(-q_k) subject to sum_k q_k = M/e and 0 <= q_k <= 1/e.

    The minimizer is q_k = clip(ln a_k - ln lambda, 0, 1/e); ln lambda is found
    by bisection on the budget, which is continuous and nonincreasing in it.
    Users with a_k = 0 get q_k = 0.

    Raises:
        AccessError: If some a_k is negative or not finite, or M < 1.
        InfeasibleProblemError: If fewer than M users have a_k > 0.
    """
    a_arr = np.asarray(a, dtype=np.float64)
    if M < 1:
        raise AccessError(f"M must be at least 1, got {M}")
    if not np.all(np.isfinite(a_arr)) or np.any(a_arr < 0.0):
        raise AccessError("Significances must be finite and nonnegative")

    positive = a_arr > 0.0
    num_positive = int(np.count_nonzero(positive))
    if num_positive < M:
        raise InfeasibleProblemError(
            f"Budget M/e needs at least M={M} users with positive significance, "
            f"got {num_positive}"
        )

    log_a = np.log(a_arr[positive])
    budget = M * E_INV

    def excess(log_lambda: float) -> float:
        return float(np.clip(log_a - log_lambda, 0.0, E_INV).sum() - budget)

    lower = float(log_a.min()) - 1.0
    upper = float(log_a.max()) + 1.0
    if excess(lower) <= 0.0:
        # Exactly M positive users: every one of them is capped.
        log_lambda = lower
    else:
        log_lambda, result = bisect(
            excess,
            lower,
            upper,
            xtol=BISECTION_XTOL,
            maxiter=BISECTION_MAX_ITER,
            full_output=True,
            disp=False,
        )
        if not result.converged:
            logger.warning(
                "Bisection on ln(lambda) stopped after %d iterations (budget off by %.3g)",
                result.iterations,
                excess(log_lambda),
            )
    logger.debug("solve_centralized: K=%d M=%d ln(lambda)=%.12g", a_arr.size, M, log_lambda)

    q = np.zeros_like(a_arr)
    q[positive] = np.clip(log_a - log_lambda, 0.0, E_INV)
    return q


def q_from_p(p: float) -> float:
    """Success probability q = p/e under the balanced load P = M."""
    _check_probability("p", p)
    return p * E_INV


def p_from_q(q: float) -> float:
    """Access probability p = q e; inverse of `q_from_p`."""
    if q < 0.0 or q > E_INV:
        raise AccessError(f"q must be in [0, 1/e], got {q}")
    return min(q * math.e, 1.0)


def adaptive_probability(a_k: float, psi: float) -> float:
    """Access probability clip(e ln a_k - psi, 0, 1); 0 when a_k = 0."""
    if a_k < 0.0:
        raise AccessError(f"Significance must be nonnegative, got {a_k}")
    if a_k == 0.0:
        return 0.0
    return min(max(math.e * math.log(a_k) - psi, 0.0), 1.0)


def adaptive_probabilities(a: npt.NDArray[np.float64], psi: float) -> npt.NDArray[np.float64]:
    """Vectorized `adaptive_probability`."""
    positive = a > 0.0
    raw = np.full(a.shape, -np.inf)
    raw[positive] = math.e * np.log(a[positive]) - psi
    return np.clip(raw, 0.0, 1.0)


def dual_ascent_update(psi: float, P_hat: int, M: int, mu: float) -> float:
    """psi + mu (P_hat - M): raise psi when too many users transmitted."""
    return psi + mu * (P_hat - M)


def ccd_select(t: int, K: int) -> int:
    """Cyclic order: user t mod K uploads at iteration t."""
    if K < 1:
        raise AccessError(f"K must be at least 1, got {K}")
    return t % K


def genie_select(instance: ModelInstance, w: WeightVector) -> int:
    """User with the largest local gradient norm; lowest index on ties."""
    norms = residual_gradient_norms(w, instance.x, instance.y)
    return int(np.argmax(norms))
