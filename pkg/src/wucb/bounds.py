"""Closed-form regret bounds and the lower-bound alternative environment.

All logarithms are natural. The Lemma 2 / 3.3 / 3.4 and Theorem 1
expressions are stated for uniform region probabilities
(rho_j = 1/|S_1| on S_1); on other instances they are evaluated as written
but carry no guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .env import (
    Affine,
    InstanceSummary,
    ProblemInstance,
    ProductCategorical,
    optimal_arm,
    summarize,
)
from .errors import (
    BelowThreshold,
    EpsOutOfRange,
    NonpositiveKL,
    NotInS1,
    NotInS2,
    SupportMismatch,
)


@dataclass(frozen=True)
class BoundInputs:
    K: int
    d: int
    s1_size: int
    s2_size: int
    l: float
    h: float
    T: float
    alpha: float = 0.5
    C_alpha: float = 1.0

    def __post_init__(self):
        if self.s1_size + self.s2_size != self.K:
            raise ValueError("s1_size + s2_size must equal K")
        if self.K >= 2 and not 0 < self.l <= self.h:
            raise ValueError(f"need 0 < l <= h, got l={self.l}, h={self.h}")

    @property
    def rho_lemma(self) -> float:
        """The constant 1 / (4 (K-1) |S_1|) used inside Lemmas 2 and 3.3."""
        if self.K < 2:
            raise ValueError("rho_lemma needs K >= 2")
        return 1.0 / (4.0 * (self.K - 1) * self.s1_size)

    @classmethod
    def from_summary(cls, summary: InstanceSummary, d: int, T: float,
                     alpha: float = 0.5, C_alpha: float = 1.0) -> "BoundInputs":
        return cls(K=summary.K, d=d, s1_size=len(summary.s1), s2_size=len(summary.s2),
                   l=summary.l, h=summary.h, T=T, alpha=alpha, C_alpha=C_alpha)


def theorem1_coefficient(inp: BoundInputs) -> float:
    """8 h |S_1| |S_2| / l^2, the multiplier of log T in the upper bound."""
    if inp.s2_size == 0:
        return 0.0
    return 8.0 * inp.h * inp.s1_size * inp.s2_size / inp.l ** 2


def theorem1_leading(inp: BoundInputs) -> float:
    """Log-T term of the W-UCB upper bound; the additive constant is unspecified."""
    return theorem1_coefficient(inp) * math.log(inp.T)


def lemma2_threshold(inp: BoundInputs) -> float:
    return (4.0 * (inp.K - 1) * inp.s1_size) ** 2 * (8.0 / inp.l ** 2 + 1.0) ** 2


def lemma2_tail(inp: BoundInputs, t: float) -> float:
    """Bound on P[N_j^j(t) < t / (4|S_1|)]; undefined below the threshold."""
    threshold = lemma2_threshold(inp)
    if t < threshold:
        raise BelowThreshold(f"t={t} is below the lemma threshold {threshold:.6g}")
    rho = inp.rho_lemma
    return (math.exp(-t / (2.0 * inp.s1_size ** 2))
            + 2.0 * inp.d * inp.K * ((1.0 - rho) * t + 1.0) / (rho * t) ** 3)


def lemma33_rhs(inp: BoundInputs) -> float:
    s1, K, d, l = inp.s1_size, inp.K, inp.d, inp.l
    rho = inp.rho_lemma
    return (1024.0 * (K - 1) ** 2 * s1 ** 2 / l ** 4 + 2.0 * s1 ** 2
            + 6.0 * d * K / rho ** 3 + 3.0 * d) / s1


def lemma34_rhs(inp: BoundInputs) -> float:
    return 8.0 * math.log(inp.T) / inp.l ** 2 + 3.0 * inp.d


def theorem2_lower(inp: BoundInputs, kl_min_per_arm: Mapping[int, float]) -> float:
    """Lower bound on expected regret of any alpha-consistent policy.

    ``kl_min_per_arm[i]`` is min over j in S_1 of KL(nu_i || nu_j), one entry
    per strictly sub-optimal arm i.
    """
    numer = 2.0 * (1.0 - inp.alpha) * math.log(inp.T) + 2.0 * math.log(16.0 * inp.C_alpha * inp.s1_size)
    total = 0.0
    for i, kl in kl_min_per_arm.items():
        if not kl > 0 or not math.isfinite(kl):
            raise NonpositiveKL(f"arm {i}: KL must be positive and finite, got {kl}")
        total += numer / kl * inp.l
    return total


def theorem2_crossover(inp: BoundInputs) -> int:
    """Smallest integer T0 with exp(-2T/(9|S_1|^2)) < 8 C T^(alpha-1) |S_1| for all T >= T0.

    The lower bound is only claimed for T beyond this point.
    """
    s1, C, a = inp.s1_size, inp.C_alpha, inp.alpha

    def excess(T: float) -> float:
        # log LHS - log RHS; concave in T with its peak at T = 9 s1^2 (1-a) / 2
        return -2.0 * T / (9.0 * s1 ** 2) - math.log(8.0 * C * s1) + (1.0 - a) * math.log(T)

    peak = max(1.0, 4.5 * s1 ** 2 * (1.0 - a))
    if excess(peak) < 0:
        return 1
    lo, hi = peak, 2.0 * peak
    while excess(hi) >= 0:
        lo, hi = hi, 2.0 * hi
    while hi - lo > 0.5:
        mid = 0.5 * (lo + hi)
        if excess(mid) >= 0:
            lo = mid
        else:
            hi = mid
    T0 = math.ceil(lo)
    while excess(T0) >= 0:
        T0 += 1
    return T0


def kl_product(p, q) -> float:
    """KL(p || q) between product-of-categorical arm distributions."""
    if not isinstance(p, ProductCategorical) or not isinstance(q, ProductCategorical):
        raise SupportMismatch("KL is only evaluated between finite-support product arms")
    if p.d != q.d:
        raise SupportMismatch(f"dimensions differ: {p.d} vs {q.d}")
    total = 0.0
    for k in range(p.d):
        if p.points[k] != q.points[k]:
            raise SupportMismatch(f"coordinate {k}: support points differ")
        for pv, qv in zip(p.probs[k], q.probs[k]):
            if pv == 0.0:
                continue
            if qv == 0.0:
                raise SupportMismatch(f"coordinate {k}: q vanishes where p does not")
            total += pv * math.log(pv / qv)
    return total


def kl_min_per_arm(instance: ProblemInstance, summary: InstanceSummary | None = None) -> dict[int, float]:
    summary = summary or summarize(instance)
    return {
        i: min(kl_product(instance.arms[i], instance.arms[j]) for j in sorted(summary.s1))
        for i in sorted(summary.s2)
    }


def alt_environment(instance: ProblemInstance, j: int, i: int, eps: float,
                    summary: InstanceSummary | None = None) -> ProblemInstance:
    """Replace arm ``i`` (in S_2) by (1-eps) * nu_j + eps * 1 for ``j`` in S_1.

    The new arm is optimal exactly on the region of ``j``; every other
    preference keeps its optimal arm.
    """
    summary = summary or summarize(instance)
    if j not in summary.s1:
        raise NotInS1(f"arm {j} is not optimal for any preference")
    if i not in summary.s2:
        raise NotInS2(f"arm {i} is optimal for some preference")
    if not 0.0 < eps < summary.l:
        raise EpsOutOfRange(f"eps must lie in (0, l={summary.l:.6g}), got {eps}")
    return instance.replace_arm(i, Affine(instance.arms[j], eps))


def check_alt_swap(original: ProblemInstance, alt: ProblemInstance, j: int, i: int) -> bool:
    """Enumerate the preference support: ``i`` wins on j's region, nothing else moves."""
    before = summarize(original).optimal_arm_of
    for m, lam in enumerate(alt.preferences.support):
        expected = i if before[m] == j else before[m]
        if optimal_arm(alt, lam) != expected:
            return False
    return True


def bound_report(instance: ProblemInstance, T: float, alpha: float = 0.5,
                 C_alpha: float = 1.0, summary: InstanceSummary | None = None) -> dict:
    """Every evaluable bound for ``instance`` at horizon ``T`` as a JSON-ready dict."""
    summary = summary or summarize(instance)
    inp = BoundInputs.from_summary(summary, instance.d, T, alpha, C_alpha)
    report: dict = {
        "T": T,
        "K": inp.K,
        "d": inp.d,
        "s1": sorted(summary.s1),
        "s2": sorted(summary.s2),
        "l": summary.l if inp.K >= 2 else None,
        "h": summary.h if inp.K >= 2 else None,
        "rho": summary.rho.tolist(),
        "uniform_rho": bool(np.allclose(summary.rho[sorted(summary.s1)], 1.0 / inp.s1_size)),
        "theorem1_coefficient": theorem1_coefficient(inp),
        "theorem1_leading": theorem1_leading(inp),
        "theorem1_constant": "unspecified",
    }
    if inp.K >= 2:
        report["rho_lemma"] = inp.rho_lemma
        report["lemma2_threshold"] = lemma2_threshold(inp)
        report["lemma2_tail_at_T"] = lemma2_tail(inp, T) if T >= report["lemma2_threshold"] else None
        report["lemma33_rhs"] = lemma33_rhs(inp)
        report["lemma34_rhs"] = lemma34_rhs(inp)
    lower = None
    if summary.s2:
        try:
            kls = kl_min_per_arm(instance, summary)
            lower = {
                "alpha": alpha,
                "C": C_alpha,
                "kl_min_per_arm": {str(k): v for k, v in kls.items()},
                "value": theorem2_lower(inp, kls),
                "valid_from_T": theorem2_crossover(inp),
            }
        except SupportMismatch as exc:
            lower = {"alpha": alpha, "C": C_alpha, "value": None, "reason": str(exc)}
    report["theorem2_lower"] = lower
    return report
