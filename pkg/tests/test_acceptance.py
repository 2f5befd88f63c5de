"""Acceptance suite: one test per criterion, each recorded as PASS/FAIL.

Run with ``pytest tests/test_acceptance.py -s`` (or ``python tests/test_acceptance.py``)
to see the criterion table. Figure presets run once per module at the full
horizon (T = 1e5, 20 paths, base seed 0) and are shared across criteria.
"""
import math

import numpy as np
import pytest

from wucb.bounds import (
    BoundInputs,
    alt_environment,
    check_alt_swap,
    kl_product,
    lemma34_rhs,
    theorem1_coefficient,
)
from wucb.env import ProductCategorical, build_synthetic, categorical_companion, summarize
from wucb.experiments import run_preset
from wucb.policy import WucbState, wucb_select, wucb_update
from wucb.sim import run_experiment, verify_counters

T_FULL = 100_000
PATHS = 20
SEED = 0


@pytest.fixture(scope="module")
def presets(tmp_path_factory):
    out = {}
    for name in ("fig1a", "fig1b", "fig1c"):
        directory = tmp_path_factory.mktemp(name)
        out[name] = run_preset(name, SEED, directory, horizon=T_FULL, paths=PATHS)
    return out


def final_mean(preset, label):
    return float(preset["results"][label]["wucb"].curve.mean_pseudo[-1])


def mean_at(preset, label, t):
    curve = preset["results"][label]["wucb"].curve
    return float(curve.mean_pseudo[np.searchsorted(curve.checkpoints, t)])


# 1 -----------------------------------------------------------------------------------------
def test_c01_counter_identities(presets, acceptance):
    checked, bad = 0, []
    extra = run_experiment(build_synthetic(10, 0.7), ["oracle", "ucb1", "random"], 20_000, 5, 3)
    runs = [(f"{n}/{lab}", res) for n, p in presets.items() for lab, res in p["results"].items()]
    runs.append(("extra", extra))
    for label, results in runs:
        for policy, res in results.items():
            for tr in res.traces:
                checked += 1
                if not all(verify_counters(tr, int(tr.checkpoints[-1])).values()):
                    bad.append(f"{label}/{policy}/seed{tr.seed}")
    acceptance(1, "counter identities", not bad, f"{checked} paths checked, violations={bad[:5]}")


# 2 -----------------------------------------------------------------------------------------
def test_c02_oracle_zero_regret(acceptance):
    worst = 0.0
    for inst in (build_synthetic(5), build_synthetic(10), build_synthetic(20, 0.5),
                 build_synthetic(5, 1.0, range(1, 3)), categorical_companion(build_synthetic(10))):
        res = run_experiment(inst, ["oracle"], 20_000, 5, 0)["oracle"]
        worst = max(worst, max(float(np.abs(tr.cum_pseudo_regret).max()) for tr in res.traces))
    acceptance(2, "oracle pseudo-regret exactly 0", worst == 0.0, f"max |R| = {worst}")


# 3 -----------------------------------------------------------------------------------------
def independent_index(history, K, lam):
    """Scores computed from the raw list of (arm, observation) pairs."""
    t = len(history)
    if t < K:
        return t
    best, best_score = None, -math.inf
    for i in range(K):
        obs = [x for a, x in history if a == i]
        mean = [sum(col) / len(obs) for col in zip(*obs)]
        score = sum(l * m for l, m in zip(lam, mean)) + math.sqrt(2 * math.log(t + 1) / len(obs))
        if score > best_score:
            best, best_score = i, score
    return best


def test_c03_brute_force_equivalence(acceptance):
    rng = np.random.default_rng(3)
    agree = 0
    for _ in range(1000):
        K, d, t = int(rng.integers(1, 5)), int(rng.integers(1, 4)), int(rng.integers(0, 21))
        arms = list(range(min(K, t))) + [int(a) for a in rng.integers(0, K, size=max(0, t - K))]
        history = [(a, [float(v) for v in rng.random(d)]) for a in arms]
        lam = [float(v) for v in rng.dirichlet(np.ones(d))]
        state = WucbState.fresh(K, d)
        for a, x in history:
            wucb_update(state, a, x)
        agree += wucb_select(state, lam) == independent_index(history, K, lam)
    acceptance(3, "brute-force index equivalence", agree == 1000, f"{agree}/1000 agree")


# 4 -----------------------------------------------------------------------------------------
def test_c04_constancy_without_s2(presets, acceptance):
    a = presets["fig1a"]
    inc5 = mean_at(a, "K5", T_FULL) - mean_at(a, "K5", 50_000)
    inc10 = mean_at(a, "K10", T_FULL) - mean_at(a, "K10", 50_000)
    ratio = inc5 / inc10
    acceptance(4, "synthetic-5 regret flattens", ratio <= 0.05,
               f"increase K5={inc5:.3f}, K10={inc10:.3f}, ratio={ratio:.4f} (<= 0.05)")


# 5 -----------------------------------------------------------------------------------------
def test_c05_monotone_in_k(presets, acceptance):
    finals = [final_mean(presets["fig1a"], f"K{k}") for k in (5, 10, 15, 20)]
    ok = all(x < y for x, y in zip(finals, finals[1:]))
    acceptance(5, "regret increases with K", ok, "K=5,10,15,20: " + ", ".join(f"{v:.1f}" for v in finals))


# 6 -----------------------------------------------------------------------------------------
def test_c06_log_growth(presets, acceptance):
    curve = presets["fig1a"]["results"]["K10"]["wucb"].curve
    mask = (curve.checkpoints >= 1_000) & (curve.checkpoints <= T_FULL)
    x, y = np.log(curve.checkpoints[mask]), curve.mean_pseudo[mask]
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    r2 = 1 - float(resid @ resid) / float(((y - y.mean()) ** 2).sum())
    envelope = theorem1_coefficient(BoundInputs.from_summary(summarize(presets["fig1a"]["instances"]["K10"]),
                                                             5, T_FULL))
    ok = r2 >= 0.95 and slope <= envelope
    acceptance(6, "log-linear fit on synthetic-10", ok,
               f"R^2={r2:.4f} (>= 0.95), slope={slope:.1f} (<= {envelope:.1f})")


# 7 -----------------------------------------------------------------------------------------
def test_c07_mistaken_pulls_dominated(presets, acceptance):
    inst = presets["fig1a"]["instances"]["K10"]
    s = summarize(inst)
    rhs = lemma34_rhs(BoundInputs.from_summary(s, inst.d, T_FULL))
    traces = presets["fig1a"]["results"]["K10"]["wucb"].traces
    s1 = sorted(s.s1)
    means = {i: float(np.mean([tr.n_i_j[i, s1].sum() for tr in traces])) for i in sorted(s.s2)}
    ok = all(v <= rhs for v in means.values())
    acceptance(7, "S2 pulls within the mistaken-pull bound", ok,
               f"max mean={max(means.values()):.1f} <= {rhs:.1f}")


# 8 -----------------------------------------------------------------------------------------
def test_c08_scaling_order(presets, acceptance):
    finals = {g: final_mean(presets["fig1b"], f"gamma{g}") for g in (0.5, 0.7, 1.0)}
    ok = finals[0.5] > finals[0.7] > finals[1.0]
    acceptance(8, "regret grows as gamma shrinks", ok,
               ", ".join(f"gamma={g}: {v:.1f}" for g, v in finals.items()) + " (need 0.5 > 0.7 > 1.0)")


# 9 -----------------------------------------------------------------------------------------
def test_c09_diversity_order(presets, acceptance):
    finals = [final_mean(presets["fig1c"], f"S1_{s}") for s in (2, 3, 4, 5)]
    ok = all(x > y for x, y in zip(finals, finals[1:]))
    acceptance(9, "regret falls as |S1| grows", ok, "|S1|=2..5: " + ", ".join(f"{v:.1f}" for v in finals))


# 10 ----------------------------------------------------------------------------------------
def test_c10_alternative_swap(synth10, acceptance):
    s = summarize(synth10)
    total, good = 0, 0
    for j in sorted(s.s1):
        for i in sorted(s.s2):
            for frac in (0.1, 0.5, 0.9):
                total += 1
                good += check_alt_swap(synth10, alt_environment(synth10, j, i, frac * s.l), j, i)
    acceptance(10, "alternative environment swaps exactly one region", good == total, f"{good}/{total}")


# 11 ----------------------------------------------------------------------------------------
def test_c11_kl(acceptance):
    def bern(*ps):
        return ProductCategorical(tuple((0.0, 1.0) for _ in ps), tuple((1 - p, p) for p in ps))

    self_kl = abs(kl_product(bern(0.3, 0.6), bern(0.3, 0.6)))
    example = abs(kl_product(bern(0.5), bern(0.75)) - 0.5 * math.log(4 / 3))
    additive = abs(kl_product(bern(0.5, 0.2), bern(0.75, 0.4))
                   - kl_product(bern(0.5), bern(0.75)) - kl_product(bern(0.2), bern(0.4)))
    ok = self_kl <= 1e-12 and example <= 1e-9 and additive <= 1e-12
    acceptance(11, "KL oracle", ok, f"self={self_kl:.1e}, example err={example:.1e}, additivity err={additive:.1e}")


# 12 ----------------------------------------------------------------------------------------
def test_c12_determinism(presets, tmp_path, acceptance):
    mismatched = []
    for name, first in presets.items():
        again = run_preset(name, SEED, tmp_path / name, horizon=T_FULL, paths=PATHS, workers=2)
        for a, b in zip(first["files"], again["files"]):
            if a.suffix == ".csv" and a.read_bytes() != b.read_bytes():
                mismatched.append(a.name)
    acceptance(12, "presets byte-identical across runs and workers", not mismatched,
               f"mismatched={mismatched}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-rN"]))
