"""Score-walking decision process with one-hot state features.

A state is (cf, cn, nn, index): the finger and pitch just played and the
pitch due next.  An action picks the finger for ``nn``; an episode walks
the score left to right, so a score of L notes is exactly L-1 decisions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .reward import RewardModel
from .score import PITCH_MAX, PITCH_MIN, MelodicRange, Score, melodic_range


class EncodingError(ValueError):
    """A pitch falls outside the encoder's window."""


class FingerState(NamedTuple):
    cf: int         # finger holding the current note
    cn: int         # current note pitch
    nn: int         # next note pitch
    index: int = 0  # position of the current note in the score


@dataclass(frozen=True)
class StateEncoding:
    """One-hot layout: 5 finger slots, then two pitch blocks of ``width``."""

    min_pitch: int
    width: int

    @classmethod
    def full_piano(cls) -> "StateEncoding":
        return cls(PITCH_MIN, PITCH_MAX - PITCH_MIN + 1)

    @classmethod
    def for_range(cls, rng: MelodicRange) -> "StateEncoding":
        return cls(rng.min_pitch, rng.size)

    @classmethod
    def for_score(cls, score: Score) -> "StateEncoding":
        return cls.for_range(melodic_range(score))

    @property
    def dim(self) -> int:
        return 5 + 2 * self.width

    def pitch_index(self, pitch: int) -> int:
        i = pitch - self.min_pitch
        if not 0 <= i < self.width:
            raise EncodingError(
                f"pitch {pitch} outside encoding window "
                f"[{self.min_pitch}, {self.min_pitch + self.width - 1}]"
            )
        return i


def encode_state(state: FingerState, encoding: StateEncoding) -> np.ndarray:
    """Concatenated one-hots [finger | current pitch | next pitch]."""
    vec = np.zeros(encoding.dim)
    vec[state.cf - 1] = 1.0
    vec[5 + encoding.pitch_index(state.cn)] = 1.0
    vec[5 + encoding.width + encoding.pitch_index(state.nn)] = 1.0
    return vec


@dataclass(frozen=True)
class StepOutcome:
    next_state: Optional[FingerState]   # None once the last note is assigned
    reward: float
    done: bool


class FingeringEnv:
    """Walks one score under one reward model.

    The walker is stateless: ``reset`` hands out the initial state and
    ``step`` maps (state, action) to an outcome, so independent episodes
    can share one instance.  An infeasible action is penalized but the
    episode continues with the chosen finger.
    """

    def __init__(self, score: Score, reward_model: Optional[RewardModel] = None,
                 encoding: Optional[StateEncoding] = None):
        self.score = score
        self.reward_model = reward_model if reward_model is not None else RewardModel()
        self.encoding = encoding if encoding is not None else StateEncoding.full_piano()
        for p in score.pitches:
            self.encoding.pitch_index(p)   # fail fast if the window cannot hold the score
        self._pitches = score.pitches

    @property
    def n_steps(self) -> int:
        return len(self._pitches) - 1

    @property
    def input_dim(self) -> int:
        return self.encoding.dim

    def reset(self) -> FingerState:
        return FingerState(self.score.first_finger, self._pitches[0], self._pitches[1], 0)

    def step(self, state: FingerState, action: int) -> StepOutcome:
        if state is None:
            raise ValueError("cannot step a terminal state")
        if action not in (1, 2, 3, 4, 5):
            raise ValueError(f"action must be a finger in 1..5, got {action}")
        r = self.reward_model.reward(state, action)
        nxt = state.index + 1
        if nxt + 1 < len(self._pitches):
            return StepOutcome(
                FingerState(action, self._pitches[nxt], self._pitches[nxt + 1], nxt), r, False
            )
        return StepOutcome(None, r, True)

    def encode(self, state: FingerState) -> np.ndarray:
        return encode_state(state, self.encoding)
