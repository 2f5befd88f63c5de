"""W-UCB and baseline policies.

The module-level functions are the reference implementation of each
decision rule. The policy classes wrap them behind a common
``select(lam) / update(arm, observed, lam)`` interface used by the
step-by-step simulation loop; the compiled fast path in :mod:`wucb.sim`
mirrors the same arithmetic in the same order.

Time convention: ``state.t`` counts completed pulls, so the decision being
made is for slot ``t + 1`` and its padding uses ``log(t + 1)`` together with
the pull counts accumulated before that slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .env import InstanceSummary
from .errors import DimensionMismatch, OutOfRangeObservation, UnknownPreference

POLICY_NAMES = ("wucb", "oracle", "ucb1", "random")


@dataclass
class WucbState:
    """Running pull counts and per-arm coordinate sums of observed states."""

    counts: np.ndarray
    sums: np.ndarray
    t: int = 0

    @classmethod
    def fresh(cls, K: int, d: int) -> "WucbState":
        return cls(np.zeros(K, dtype=np.int64), np.zeros((K, d)))

    @property
    def K(self) -> int:
        return len(self.counts)

    @property
    def d(self) -> int:
        return self.sums.shape[1]

    def sample_means(self) -> np.ndarray:
        return self.sums / np.maximum(self.counts, 1)[:, None]


def padding(t: int, n: int) -> float:
    """UCB width sqrt(2 ln t / n) for a decision at slot ``t`` after ``n`` pulls."""
    return math.sqrt(2.0 * math.log(t) / n)


def wucb_select(state: WucbState, lam) -> int:
    """Pick argmax_i lam . xhat_i + u_i, pulling every arm once first.

    Ties go to the lowest arm index.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (state.d,):
        raise DimensionMismatch(f"preference has shape {lam.shape}, expected ({state.d},)")
    if state.t < state.K:
        return state.t
    slot = state.t + 1
    best, best_val = 0, -math.inf
    for i in range(state.K):
        n = state.counts[i]
        val = 0.0
        for k in range(state.d):
            val += lam[k] * (state.sums[i, k] / n)
        val += padding(slot, n)
        if val > best_val:
            best, best_val = i, val
    return best


def wucb_update(state: WucbState, arm: int, observed) -> WucbState:
    """Fold one observed state vector into ``state`` (in place) and return it."""
    observed = np.asarray(observed, dtype=float)
    if observed.shape != (state.d,):
        raise DimensionMismatch(f"observation has shape {observed.shape}, expected ({state.d},)")
    if np.any(observed < 0.0) or np.any(observed > 1.0):
        raise OutOfRangeObservation(f"observation {observed} leaves [0,1]^d")
    state.counts[arm] += 1
    state.sums[arm] += observed
    state.t += 1
    return state


@dataclass
class ScalarUcbState:
    """Per-arm scalar reward statistics for the context-blind UCB1 baseline."""

    counts: np.ndarray
    reward_sums: np.ndarray
    t: int = 0

    @classmethod
    def fresh(cls, K: int) -> "ScalarUcbState":
        return cls(np.zeros(K, dtype=np.int64), np.zeros(K))

    @property
    def K(self) -> int:
        return len(self.counts)


def ucb1_select(state: ScalarUcbState, lam=None) -> int:
    # lam is accepted for interface symmetry and ignored
    if state.t < state.K:
        return state.t
    slot = state.t + 1
    best, best_val = 0, -math.inf
    for i in range(state.K):
        n = state.counts[i]
        val = state.reward_sums[i] / n + padding(slot, n)
        if val > best_val:
            best, best_val = i, val
    return best


def ucb1_update(state: ScalarUcbState, arm: int, reward: float) -> ScalarUcbState:
    if not 0.0 <= reward <= 1.0:
        raise OutOfRangeObservation(f"reward {reward} leaves [0,1]")
    state.counts[arm] += 1
    state.reward_sums[arm] += reward
    state.t += 1
    return state


def oracle_select(summary: InstanceSummary, lam) -> int:
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (summary.support.shape[1],):
        raise DimensionMismatch(f"preference has shape {lam.shape}")
    hits = np.flatnonzero(np.all(np.abs(summary.support - lam) <= 1e-12, axis=1))
    if hits.size == 0:
        raise UnknownPreference(f"{lam} is not in the preference support")
    return summary.optimal_arm_of[int(hits[0])]


def random_select(K: int, rng: np.random.Generator) -> int:
    """Uniform arm; consumes exactly one U[0,1) variate."""
    return min(int(rng.random() * K), K - 1)


class Policy:
    name: str

    def select(self, lam: np.ndarray) -> int:
        raise NotImplementedError

    def update(self, arm: int, observed: np.ndarray, lam: np.ndarray) -> None:
        raise NotImplementedError


@dataclass
class WUCB(Policy):
    state: WucbState
    name: str = field(default="wucb", init=False)

    def select(self, lam):
        return wucb_select(self.state, lam)

    def update(self, arm, observed, lam):
        wucb_update(self.state, arm, observed)


@dataclass
class UCB1(Policy):
    state: ScalarUcbState
    name: str = field(default="ucb1", init=False)

    def select(self, lam):
        return ucb1_select(self.state, lam)

    def update(self, arm, observed, lam):
        reward = 0.0
        for k in range(len(lam)):
            reward += lam[k] * observed[k]
        ucb1_update(self.state, arm, min(max(reward, 0.0), 1.0))


@dataclass
class Oracle(Policy):
    summary: InstanceSummary
    name: str = field(default="oracle", init=False)

    def select(self, lam):
        return oracle_select(self.summary, lam)

    def update(self, arm, observed, lam):
        pass


@dataclass
class RandomPolicy(Policy):
    K: int
    rng: np.random.Generator
    name: str = field(default="random", init=False)

    def select(self, lam):
        return random_select(self.K, self.rng)

    def update(self, arm, observed, lam):
        pass


def make_policy(name: str, K: int, d: int, summary: InstanceSummary,
                rng: np.random.Generator | None = None) -> Policy:
    if name == "wucb":
        return WUCB(WucbState.fresh(K, d))
    if name == "ucb1":
        return UCB1(ScalarUcbState.fresh(K))
    if name == "oracle":
        return Oracle(summary)
    if name == "random":
        if rng is None:
            raise ValueError("random policy needs a generator")
        return RandomPolicy(K, rng)
    raise ValueError(f"unknown policy {name!r}; expected one of {POLICY_NAMES}")
