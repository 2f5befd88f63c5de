"""Single-path simulation and multi-path experiments.

Each path owns four random streams, seeded from ``(path_seed, tag)``:
preferences, states of the pulled arm, states used only for realized-regret
accounting, and the random baseline's choices. A stream advances by a fixed
amount per step whatever the policy does, so the same path seed gives the
same preferences and the same underlying state table for every policy and
every arm scaling.

Two loops implement the same protocol. ``run_path`` runs a compiled kernel
over blocks of pre-drawn randomness; ``run_path_reference`` goes step by
step through the policy objects of :mod:`wucb.policy`. They are expected to
produce bit-identical traces.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .env import ProblemInstance, InstanceSummary, summarize
from .errors import HorizonTooShort
from .policy import POLICY_NAMES, make_policy

PREF, STATE, ACCOUNT, POLICY = 0, 1, 2, 3
CHUNK = 4096
_CODES = {name: code for code, name in enumerate(POLICY_NAMES)}
_WUCB, _ORACLE, _UCB1, _RANDOM = (_CODES[n] for n in ("wucb", "oracle", "ucb1", "random"))


def stream(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng([seed, tag])


@dataclass
class PathTrace:
    checkpoints: np.ndarray
    cum_realized_regret: np.ndarray
    cum_pseudo_regret: np.ndarray
    n_i: np.ndarray
    n_super_j: np.ndarray
    n_i_j: np.ndarray  # [pulled arm, optimal arm]
    seed: int
    policy: str = ""
    per_step_pseudo: np.ndarray | None = field(default=None, repr=False)
    per_step_realized: np.ndarray | None = field(default=None, repr=False)

    @property
    def T(self) -> int:
        return int(self.n_i.sum())


@dataclass
class AggregateCurve:
    checkpoints: np.ndarray
    mean_pseudo: np.ndarray
    std_pseudo: np.ndarray
    mean_realized: np.ndarray
    std_realized: np.ndarray
    paths: int


@dataclass
class ExperimentResult:
    curve: AggregateCurve
    traces: list[PathTrace]


def checkpoint_grid(T: int, stride: int) -> np.ndarray:
    if stride < 1:
        raise ValueError("checkpoint_stride must be positive")
    grid = list(range(stride, T + 1, stride))
    if not grid or grid[-1] != T:
        grid.append(T)
    return np.asarray(grid, dtype=np.int64)


@njit(cache=True)
def _run_block(code, lam, opt_arm, mu_table, pref_idx, states, acc_states, pol_u,
               t0, counts, sums, rsums, n_i_j, totals, out_pseudo, out_real):
    K = counts.shape[0]
    d = lam.shape[1]
    t = t0
    for s in range(pref_idx.shape[0]):
        m = pref_idx[s]
        if code == _ORACLE:
            a = opt_arm[m]
        elif code == _RANDOM:
            a = min(int(pol_u[s] * K), K - 1)
        elif t < K:
            a = t
        else:
            slot = t + 1
            logt = math.log(slot)
            a = 0
            best = -math.inf
            for i in range(K):
                n = counts[i]
                if code == _WUCB:
                    val = 0.0
                    for k in range(d):
                        val += lam[m, k] * (sums[i, k] / n)
                else:
                    val = rsums[i] / n
                val += math.sqrt(2.0 * logt / n)
                if val > best:
                    best = val
                    a = i
        j = opt_arm[m]

        counts[a] += 1
        if code == _WUCB:
            for k in range(d):
                sums[a, k] += states[s, a, k]
        elif code == _UCB1:
            r = 0.0
            for k in range(d):
                r += lam[m, k] * states[s, a, k]
            rsums[a] += min(max(r, 0.0), 1.0)
        n_i_j[a, j] += 1

        if a != j:
            totals[0] += mu_table[m, j] - mu_table[m, a]
            gap = 0.0
            for k in range(d):
                gap += lam[m, k] * (acc_states[s, j, k] - states[s, a, k])
            totals[1] += gap
        out_pseudo[s] = totals[0]
        out_real[s] = totals[1]
        t += 1
    return t


def _finish(policy, T, seed, stride, pseudo, real, n_i, n_i_j, store_all):
    grid = checkpoint_grid(T, stride)
    return PathTrace(
        checkpoints=grid,
        cum_realized_regret=real[grid - 1].copy(),
        cum_pseudo_regret=pseudo[grid - 1].copy(),
        n_i=n_i,
        n_super_j=n_i_j.sum(axis=0),
        n_i_j=n_i_j,
        seed=seed,
        policy=policy,
        per_step_pseudo=pseudo if store_all else None,
        per_step_realized=real if store_all else None,
    )


def _check_args(instance: ProblemInstance, policy: str, T: int) -> None:
    if policy not in _CODES:
        raise ValueError(f"unknown policy {policy!r}; expected one of {POLICY_NAMES}")
    if T < instance.K:
        raise HorizonTooShort(f"horizon {T} is shorter than the {instance.K}-pull initialization")


def run_path(
    instance: ProblemInstance,
    policy: str,
    T: int,
    seed: int,
    checkpoint_stride: int = 100,
    store_all: bool = False,
    summary: InstanceSummary | None = None,
) -> PathTrace:
    """Simulate one path of ``T`` steps and record regret and pull counters."""
    _check_args(instance, policy, T)
    summary = summary or summarize(instance)
    K, d = instance.K, instance.d
    lam = np.ascontiguousarray(instance.preferences.support)
    opt_arm = np.asarray(summary.optimal_arm_of, dtype=np.int64)
    mu_table = np.ascontiguousarray(instance.mean_rewards())
    rngs = [stream(seed, tag) for tag in (PREF, STATE, ACCOUNT, POLICY)]

    counts = np.zeros(K, dtype=np.int64)
    sums = np.zeros((K, d))
    rsums = np.zeros(K)
    n_i_j = np.zeros((K, K), dtype=np.int64)
    totals = np.zeros(2)
    pseudo = np.empty(T)
    real = np.empty(T)
    code = _CODES[policy]
    B = instance.block_width

    t = 0
    while t < T:
        n = min(CHUNK, T - t)
        pref_idx = instance.preferences.sample_indices(rngs[PREF], n).astype(np.int64)
        states = instance.states_from_uniforms(rngs[STATE].random((n, B)))
        acc_states = instance.states_from_uniforms(rngs[ACCOUNT].random((n, B)))
        pol_u = rngs[POLICY].random(n)
        t = _run_block(code, lam, opt_arm, mu_table, pref_idx, states, acc_states, pol_u,
                       t, counts, sums, rsums, n_i_j, totals,
                       pseudo[t:t + n], real[t:t + n])
    return _finish(policy, T, seed, checkpoint_stride,
                   pseudo, real, counts, n_i_j, store_all)


def run_path_reference(
    instance: ProblemInstance,
    policy: str,
    T: int,
    seed: int,
    checkpoint_stride: int = 100,
    store_all: bool = False,
) -> PathTrace:
    """Step-by-step twin of :func:`run_path` built on the policy objects."""
    _check_args(instance, policy, T)
    summary = summarize(instance)
    prefs = instance.preferences
    mu_table = instance.mean_rewards()
    B = instance.block_width
    pref_rng, state_rng, acc_rng, pol_rng = (stream(seed, tag) for tag in (PREF, STATE, ACCOUNT, POLICY))
    agent = make_policy(policy, instance.K, instance.d, summary, pol_rng)

    n_i_j = np.zeros((instance.K, instance.K), dtype=np.int64)
    pseudo = np.empty(T)
    real = np.empty(T)
    cum_pseudo = cum_real = 0.0
    for step in range(T):
        m = int(prefs.sample_indices(pref_rng, 1)[0])
        lam = prefs.support[m]
        state_row = state_rng.random(B)
        acc_row = acc_rng.random(B)
        a = agent.select(lam)
        j = summary.optimal_arm_of[m]
        x = instance.arm_state_from_uniforms(a, state_row)
        agent.update(a, x, lam)
        n_i_j[a, j] += 1
        if a != j:
            cum_pseudo += mu_table[m, j] - mu_table[m, a]
            x_opt = instance.arm_state_from_uniforms(j, acc_row)
            gap = 0.0
            for k in range(instance.d):
                gap += lam[k] * (x_opt[k] - x[k])
            cum_real += gap
        pseudo[step] = cum_pseudo
        real[step] = cum_real
    return _finish(policy, T, seed, checkpoint_stride,
                   pseudo, real, n_i_j.sum(axis=1), n_i_j, store_all)


def verify_counters(trace: PathTrace, T: int) -> dict[str, bool]:
    """Itemized check of the pull/preference counting identities."""
    return {
        "sum_n_i": int(trace.n_i.sum()) == T,
        "sum_n_super_j": int(trace.n_super_j.sum()) == T,
        "column_sums_n_i_j": bool(np.array_equal(trace.n_i_j.sum(axis=0), trace.n_super_j)),
    }


def aggregate(traces: list[PathTrace]) -> AggregateCurve:
    pseudo = np.vstack([tr.cum_pseudo_regret for tr in traces])
    real = np.vstack([tr.cum_realized_regret for tr in traces])
    n = len(traces)

    def std(a):
        return a.std(axis=0, ddof=1) if n > 1 else np.zeros(a.shape[1])

    return AggregateCurve(
        checkpoints=traces[0].checkpoints,
        mean_pseudo=pseudo.mean(axis=0),
        std_pseudo=std(pseudo),
        mean_realized=real.mean(axis=0),
        std_realized=std(real),
        paths=n,
    )


def _path_task(args):
    instance, policy, T, seed, stride = args
    return run_path(instance, policy, T, seed, stride)


def run_experiment(
    instance: ProblemInstance,
    policy_names,
    T: int,
    n_paths: int = 20,
    base_seed: int = 0,
    checkpoint_stride: int = 100,
    workers: int = 1,
) -> dict[str, ExperimentResult]:
    """Run ``n_paths`` paths per policy; path ``p`` uses seed ``base_seed + p``.

    Output does not depend on ``workers``: traces are collected and folded
    in path-index order.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be at least 1")
    for name in policy_names:
        _check_args(instance, name, T)
    tasks = [(instance, name, T, base_seed + p, checkpoint_stride)
             for name in policy_names for p in range(n_paths)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(_path_task, tasks))
    else:
        traces = [_path_task(t) for t in tasks]

    results = {}
    for q, name in enumerate(policy_names):
        chunk = traces[q * n_paths:(q + 1) * n_paths]
        results[name] = ExperimentResult(aggregate(chunk), chunk)
    return results
