"""
Uplink medium: user availability, multichannel slotted ALOHA and polling.

A slot is resolved per channel: no attempt leaves the channel idle, exactly
one attempt is received, two or more attempts collide and are all lost.
The scalar operations take and return small value objects; the `*_channels`
twins work on numpy arrays and are what the simulation loop calls.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import numpy.typing as npt


class ChannelError(ValueError):
    """Raised when a channel operation receives invalid arguments."""
    pass


@dataclass(frozen=True)
class TransmissionAttempt:
    """User `user` transmits its local update on channel `channel`."""
    user: int
    channel: int


@dataclass(frozen=True)
class Idle:
    """No user chose the channel."""
    pass


@dataclass(frozen=True)
class Success:
    """Exactly one user chose the channel; its update is received."""
    user: int


@dataclass(frozen=True)
class Collision:
    """`count` users (at least two) chose the channel; all are lost."""
    count: int


ChannelState = Union[Idle, Success, Collision]


@dataclass(frozen=True)
class ChannelOutcome:
    """Resolution of one slot, one state per channel."""
    states: tuple[ChannelState, ...]

    @property
    def successful_users(self) -> list[int]:
        return [s.user for s in self.states if isinstance(s, Success)]

    @property
    def num_successes(self) -> int:
        return sum(1 for s in self.states if isinstance(s, Success))

    @property
    def num_collided(self) -> int:
        """Number of attempts lost to collisions."""
        return sum(s.count for s in self.states if isinstance(s, Collision))


@dataclass(frozen=True)
class SlotResolution:
    """Array form of a resolved slot, as used by the simulation loop."""
    successful_users: npt.NDArray[np.int64]
    active: int
    collided: int


def draw_availability(K: int, p_comp: float, rng: np.random.Generator) -> npt.NDArray[np.bool_]:
    """
    Draw which of the K users can compute a local update this iteration.

    Consumes exactly K uniforms from `rng`.

    Raises:
        ChannelError: If p_comp is outside [0, 1].
    """
    if not 0.0 <= p_comp <= 1.0:
        raise ChannelError(f"p_comp must be in [0, 1], got {p_comp}")
    return rng.random(K) < p_comp


def choose_channel(M: int, rng: np.random.Generator) -> int:
    """Pick one of M channels uniformly at random."""
    if M < 1:
        raise ChannelError(f"Number of channels M must be at least 1, got {M}")
    return int(rng.integers(M))


def choose_channels(M: int, size: int, rng: np.random.Generator) -> npt.NDArray[np.int64]:
    """Pick `size` independent uniform channels in one draw."""
    if M < 1:
        raise ChannelError(f"Number of channels M must be at least 1, got {M}")
    return rng.integers(0, M, size=size)


def resolve_channels(
    users: npt.NDArray[np.int64],
    channels: npt.NDArray[np.int64],
    M: int,
) -> SlotResolution:
    """
    Resolve a slot given parallel arrays of transmitting users and their channels.

    Arguments are not validated.
    """
    counts = np.bincount(channels, minlength=M)
    alone = counts[channels] == 1
    return SlotResolution(
        successful_users=users[alone],
        active=int(users.size),
        collided=int(np.count_nonzero(~alone)),
    )


def resolve_slot(attempts: Sequence[TransmissionAttempt], M: int) -> ChannelOutcome:
    """
    Resolve one slot of multichannel ALOHA.

    Raises:
        ChannelError: If a channel id is outside [0, M) or a user appears twice.
    """
    if M < 1:
        raise ChannelError(f"Number of channels M must be at least 1, got {M}")

    seen: set[int] = set()
    for attempt in attempts:
        if not 0 <= attempt.channel < M:
            raise ChannelError(
                f"User {attempt.user} chose channel {attempt.channel}, "
                f"valid channels are 0..{M - 1}"
            )
        if attempt.user in seen:
            raise ChannelError(f"User {attempt.user} transmits more than once")
        seen.add(attempt.user)

    users = np.array([a.user for a in attempts], dtype=np.int64)
    channels = np.array([a.channel for a in attempts], dtype=np.int64)
    counts = np.bincount(channels, minlength=M)
    owner = {a.channel: a.user for a in attempts if counts[a.channel] == 1}

    states: list[ChannelState] = []
    for m in range(M):
        if counts[m] == 0:
            states.append(Idle())
        elif counts[m] == 1:
            states.append(Success(owner[m]))
        else:
            states.append(Collision(int(counts[m])))
    return ChannelOutcome(tuple(states))


def poll_schedule(t: int, K: int, M: int) -> list[int]:
    """
    Users polled at iteration t: (t*M + i) mod K for i = 0..M-1.

    Raises:
        ChannelError: Unless 1 <= M <= K.
    """
    if M < 1:
        raise ChannelError(f"Number of channels M must be at least 1, got {M}")
    if M > K:
        raise ChannelError(f"Polling needs M <= K, got M={M}, K={K}")
    return [(t * M + i) % K for i in range(M)]


def count_active(attempts: Sequence[TransmissionAttempt]) -> int:
    """Number of transmitting users, colliding ones included."""
    return len(attempts)
