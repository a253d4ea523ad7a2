"""
Simulation loop: federated learning over the uplink for one upload policy.

Each iteration:
1. draw availability, channel choices and access coins (K each, in that order),
2. let the policy pick who transmits (polling, equal or adaptive ALOHA,
   cyclic or max-norm single uploader),
3. resolve collisions,
4. aggregate the received local updates into the new global weights,
5. update the feedback psi (adaptive ALOHA only, applied next iteration),
6. record a RoundReport.

`run_many` repeats a run over derived seeds and averages the curves.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Sequence

import numpy as np
import numpy.typing as npt

from .. import access, channel, model
from ..access import FeedbackSignal, Policy
from .config import SimConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RoundReport:
    """
    Metrics of one upload round.

    Attributes:
        t: Round number, 1..T.
        error: ||w(t) - w_true|| after this round's aggregation.
        successes: Local updates received.
        active: Users that transmitted, collided ones included.
        psi: Feedback value applied in this round (0 for non-adaptive policies).
        collisions: Transmissions lost to collisions.
    """
    t: int
    error: float
    successes: int
    active: int
    psi: float
    collisions: int


@dataclass(frozen=True, eq=False)
class Trajectory:
    """All round reports of one run and the final global weights."""
    reports: List[RoundReport]
    final_w: model.WeightVector
    seed: int

    def column(self, name: str) -> npt.NDArray[np.float64]:
        """Values of one RoundReport field across rounds."""
        return np.array([getattr(r, name) for r in self.reports], dtype=np.float64)

    @property
    def final_error(self) -> float:
        return self.reports[-1].error


@dataclass(frozen=True, eq=False)
class RunSummary:
    """
    Pointwise statistics over several runs of one config.

    Standard deviations are sample standard deviations (0 for a single run).
    """
    config: SimConfig
    seeds: List[int]
    t: npt.NDArray[np.int64]
    error_mean: npt.NDArray[np.float64]
    error_std: npt.NDArray[np.float64]
    successes_mean: npt.NDArray[np.float64]
    successes_std: npt.NDArray[np.float64]
    active_mean: npt.NDArray[np.float64]
    psi_mean: npt.NDArray[np.float64]
    collisions_mean: npt.NDArray[np.float64]
    trajectories: List[Trajectory] = field(repr=False)

    @property
    def runs(self) -> int:
        return len(self.seeds)

    @property
    def final_error_mean(self) -> float:
        return float(self.error_mean[-1])

    @property
    def final_error_std(self) -> float:
        return float(self.error_std[-1])


def _select_uploaders(
    config: SimConfig,
    t: int,
    w: model.WeightVector,
    instance: model.ModelInstance,
    available: npt.NDArray[np.bool_],
    channels: npt.NDArray[np.int64],
    coins: npt.NDArray[np.float64],
    psi: float,
) -> channel.SlotResolution:
    """Decide who transmits this round under the configured policy and resolve the slot."""
    policy = config.policy

    if policy is Policy.POLLING:
        polled = np.array(channel.poll_schedule(t, config.K, config.M), dtype=np.int64)
        uploaders = polled[available[polled]]
        return channel.SlotResolution(uploaders, active=int(uploaders.size), collided=0)

    if policy.single_uploader:
        if policy is Policy.CCD:
            k = access.ccd_select(t, config.K)
        else:
            k = access.genie_select(instance, w)
        uploaders = np.array([k] if available[k] else [], dtype=np.int64)
        return channel.SlotResolution(uploaders, active=int(uploaders.size), collided=0)

    if policy is Policy.EQUAL_ALOHA:
        coin = access.conditional_transmit_probability(config.K, config.M, config.p_comp)
        p = np.where(available, coin, 0.0)
    else:
        a = model.significances(
            w, instance.x, instance.y, config.mu1, config.significance_mode, available
        )
        p = access.adaptive_probabilities(a, psi)

    transmitters = np.flatnonzero(available & (coins < p))
    return channel.resolve_channels(transmitters, channels[transmitters], config.M)


def run(config: SimConfig) -> Trajectory:
    """
    Simulate one run of `config`. Deterministic given config.seed.

    The generator produces the instance first (w_true, then X), then per
    iteration K availability uniforms, K channel indices and K access
    uniforms. Every policy consumes all three, so runs of different policies
    with the same seed share the instance and the availability sequence.
    """
    rng = np.random.default_rng(config.seed)
    instance = model.generate_instance(config.K, config.L, rng)
    w = np.zeros(config.L)
    feedback = FeedbackSignal()
    reports: List[RoundReport] = []

    for t in range(config.T):
        available = channel.draw_availability(config.K, config.p_comp, rng)
        channels = channel.choose_channels(config.M, config.K, rng)
        coins = rng.random(config.K)

        psi = feedback.psi
        slot = _select_uploaders(config, t, w, instance, available, channels, coins, psi)
        received = [
            model.local_update(w, instance.dataset(k), config.mu1)
            for k in slot.successful_users
        ]
        w = model.aggregate(w, received, config.aggregation_mode)

        if config.policy is Policy.ADAPTIVE_ALOHA:
            feedback.update(slot.active, config.M, config.mu)

        reports.append(RoundReport(
            t=t + 1,
            error=model.error_norm(w, instance.w_true),
            successes=len(received),
            active=slot.active,
            psi=psi,
            collisions=slot.collided,
        ))

    logger.debug(
        "run policy=%s seed=%d final error=%.6g",
        config.policy.value, config.seed, reports[-1].error,
    )
    return Trajectory(reports=reports, final_w=w, seed=config.seed)


def derive_seeds(base_seed: int, runs: int) -> List[int]:
    """Seed of run r is base_seed XOR r."""
    return [base_seed ^ r for r in range(runs)]


def _sample_std(values: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    if values.shape[0] < 2:
        return np.zeros(values.shape[1])
    return values.std(axis=0, ddof=1)


def summarize(config: SimConfig, trajectories: Sequence[Trajectory]) -> RunSummary:
    """Pointwise mean and standard deviation of the report columns."""
    def stack(name: str) -> npt.NDArray[np.float64]:
        return np.stack([traj.column(name) for traj in trajectories])

    errors = stack("error")
    successes = stack("successes")
    return RunSummary(
        config=config,
        seeds=[traj.seed for traj in trajectories],
        t=np.arange(1, errors.shape[1] + 1),
        error_mean=errors.mean(axis=0),
        error_std=_sample_std(errors),
        successes_mean=successes.mean(axis=0),
        successes_std=_sample_std(successes),
        active_mean=stack("active").mean(axis=0),
        psi_mean=stack("psi").mean(axis=0),
        collisions_mean=stack("collisions").mean(axis=0),
        trajectories=list(trajectories),
    )


def run_many(config: SimConfig, runs: int | None = None, workers: int = 1) -> RunSummary:
    """
    Run `config` `runs` times (default `config.runs`) and average the curves.

    Args:
        config: Experiment description; its seed is the base seed.
        runs: Number of runs; run r uses seed config.seed ^ r.
        workers: Processes to use; results do not depend on this.
    """
    runs = config.runs if runs is None else runs
    if runs < 1:
        raise ValueError(f"runs must be at least 1, got {runs}")

    configs = [replace(config, seed=seed) for seed in derive_seeds(config.seed, runs)]
    if workers > 1 and runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            trajectories = list(executor.map(run, configs))
    else:
        trajectories = [run(c) for c in configs]

    summary = summarize(config, trajectories)
    logger.info(
        "run_many policy=%s runs=%d final error mean=%.6g std=%.3g",
        config.policy.value, runs, summary.final_error_mean, summary.final_error_std,
    )
    return summary
