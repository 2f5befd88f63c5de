"""Problem instances: arm state distributions, preference models, and the
derived preference-space partition.

Arm and preference indices are 0-based throughout the Python API. The JSON
instance description (``to_dict`` / ``arm_from_dict``) keeps the same
0-based ``base_index``; only the experiment config's ``active_preferences``
uses the 1-based labels of the synthetic construction.

Every arm draws its state from a fixed-width block of i.i.d. U[0, 1)
variates (``n_uniforms`` per draw) through ``transform``. Simulation streams
generate these blocks in bulk, so two instances whose arms consume the same
uniforms (e.g. the same arms under different scaling) see identical
underlying randomness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import AmbiguousOptimum, DimensionMismatch, InvalidGamma

TIE_TOL = 1e-12
SUM_TOL = 1e-12

#: weight vector permuted to build the mixed arms of the synthetic instance
PI0 = (0.0, 0.1, 0.2, 0.3, 0.4)
SYNTHETIC_D = 5


def _check_weights(w: np.ndarray, what: str) -> None:
    if np.any(w < 0):
        raise ValueError(f"{what} must be nonnegative")
    if abs(w.sum() - 1.0) > SUM_TOL:
        raise ValueError(f"{what} must sum to 1 (got {w.sum()!r})")


class ArmDistribution:
    """Distribution of one arm's state vector on [0, 1]^d."""

    kind: str = ""
    d: int
    mean: np.ndarray

    @property
    def n_uniforms(self) -> int:
        raise NotImplementedError

    @property
    def support_max(self) -> np.ndarray:
        """Coordinate-wise upper end of the support."""
        raise NotImplementedError

    def transform(self, u: np.ndarray) -> np.ndarray:
        """Map an ``(n, n_uniforms)`` array of U[0,1) draws to ``(n, d)`` states."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return self.transform(rng.random((1, self.n_uniforms)))[0]

    def to_dict(self) -> dict[str, Any]:
        raise NotImplementedError

    def _check_mean(self) -> None:
        if self.mean.shape != (self.d,):
            raise DimensionMismatch(f"mean has shape {self.mean.shape}, expected ({self.d},)")
        if not np.all((self.mean > 0) & (self.mean < 1)):
            raise ValueError(f"{self.kind} arm mean must lie in (0,1)^d, got {self.mean}")


@dataclass(frozen=True, eq=False)
class ShiftedUniform(ArmDistribution):
    """x = (1/5)1 + (1/5)e_i + n*1 with a single shared n ~ U[1/5, 3/5]."""

    base_index: int
    d: int = SYNTHETIC_D
    mean: np.ndarray = field(init=False, repr=False)
    kind = "shifted_uniform"

    def __post_init__(self):
        if not 0 <= self.base_index < self.d:
            raise ValueError(f"base_index {self.base_index} out of range for d={self.d}")
        offset = np.full(self.d, 0.2)
        offset[self.base_index] += 0.2
        object.__setattr__(self, "_offset", offset)
        object.__setattr__(self, "mean", offset + 0.4)
        self._check_mean()

    @property
    def n_uniforms(self) -> int:
        return 1

    @property
    def support_max(self) -> np.ndarray:
        return self._offset + 0.6

    def transform(self, u):
        noise = 0.2 + 0.4 * u[:, :1]
        return self._offset + noise

    def to_dict(self):
        return {"kind": self.kind, "base_index": self.base_index, "d": self.d}


@dataclass(frozen=True, eq=False)
class Mixed(ArmDistribution):
    """Weighted combination of fresh, independent draws from component arms."""

    weights: tuple[float, ...]
    components: tuple[ArmDistribution, ...]
    d: int = field(init=False)
    mean: np.ndarray = field(init=False, repr=False)
    kind = "mixed"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(self.components) == 0 or w.shape != (len(self.components),):
            raise ValueError("mixed arm needs one weight per component")
        _check_weights(w, "mixing weights")
        dims = {c.d for c in self.components}
        if len(dims) != 1:
            raise DimensionMismatch(f"mixed components have dimensions {sorted(dims)}")
        object.__setattr__(self, "weights", tuple(float(x) for x in w))
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "d", dims.pop())
        mean = np.zeros(self.d)
        for wi, comp in zip(w, self.components):
            mean += wi * comp.mean
        object.__setattr__(self, "mean", mean)
        self._check_mean()

    @property
    def n_uniforms(self) -> int:
        return sum(c.n_uniforms for c in self.components)

    @property
    def support_max(self) -> np.ndarray:
        return sum(w * c.support_max for w, c in zip(self.weights, self.components))

    def transform(self, u):
        out = np.zeros((u.shape[0], self.d))
        start = 0
        for w, comp in zip(self.weights, self.components):
            stop = start + comp.n_uniforms
            # zero-weight components still consume their uniforms
            if w != 0.0:
                out += w * comp.transform(u[:, start:stop])
            start = stop
        return out

    def to_dict(self):
        return {
            "kind": self.kind,
            "weights": list(self.weights),
            "components": [c.to_dict() for c in self.components],
        }


@dataclass(frozen=True, eq=False)
class ProductCategorical(ArmDistribution):
    """Independent coordinates, each on its own finite set of support points."""

    points: tuple[tuple[float, ...], ...]
    probs: tuple[tuple[float, ...], ...]
    d: int = field(init=False)
    mean: np.ndarray = field(init=False, repr=False)
    kind = "product_categorical"

    def __post_init__(self):
        if len(self.points) != len(self.probs) or len(self.points) == 0:
            raise DimensionMismatch("need one support list and one probability list per coordinate")
        pts = tuple(tuple(float(v) for v in p) for p in self.points)
        prs = tuple(tuple(float(v) for v in p) for p in self.probs)
        for k, (v, p) in enumerate(zip(pts, prs)):
            if len(v) != len(p) or len(v) == 0:
                raise DimensionMismatch(f"coordinate {k}: points and probs differ in length")
            if min(v) < 0 or max(v) > 1:
                raise ValueError(f"coordinate {k}: support points must lie in [0,1]")
            _check_weights(np.asarray(p), f"coordinate {k} probabilities")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "probs", prs)
        object.__setattr__(self, "d", len(pts))
        object.__setattr__(self, "_cdf", [np.cumsum(p) for p in prs])
        object.__setattr__(self, "mean", np.array([np.dot(v, p) for v, p in zip(pts, prs)]))
        self._check_mean()

    @property
    def n_uniforms(self) -> int:
        return self.d

    @property
    def support_max(self) -> np.ndarray:
        return np.array([max(v) for v, p in zip(self.points, self.probs)])

    def transform(self, u):
        out = np.empty((u.shape[0], self.d))
        for k, (v, cdf) in enumerate(zip(self.points, self._cdf)):
            idx = np.searchsorted(cdf, u[:, k], side="right")
            out[:, k] = np.asarray(v)[np.minimum(idx, len(v) - 1)]
        return out

    def to_dict(self):
        return {
            "kind": self.kind,
            "points": [list(v) for v in self.points],
            "probs": [list(p) for p in self.probs],
        }


@dataclass(frozen=True, eq=False)
class Scaled(ArmDistribution):
    """State of ``inner`` multiplied by a constant factor in (0, 1]."""

    inner: ArmDistribution
    factor: float
    d: int = field(init=False)
    mean: np.ndarray = field(init=False, repr=False)
    kind = "scaled"

    def __post_init__(self):
        if not 0.0 < self.factor <= 1.0:
            raise InvalidGamma(f"scaling factor must lie in (0,1], got {self.factor}")
        if np.any(self.factor * self.inner.support_max > 1.0 + SUM_TOL):
            raise InvalidGamma("scaled support leaves [0,1]^d")
        object.__setattr__(self, "d", self.inner.d)
        object.__setattr__(self, "mean", self.factor * self.inner.mean)
        self._check_mean()

    @property
    def n_uniforms(self) -> int:
        return self.inner.n_uniforms

    @property
    def support_max(self) -> np.ndarray:
        return self.factor * self.inner.support_max

    def transform(self, u):
        return self.factor * self.inner.transform(u)

    def to_dict(self):
        return {"kind": self.kind, "factor": self.factor, "inner": self.inner.to_dict()}


@dataclass(frozen=True, eq=False)
class Affine(ArmDistribution):
    """(1 - eps) * (draw from ``inner``) + eps * 1."""

    inner: ArmDistribution
    eps: float
    d: int = field(init=False)
    mean: np.ndarray = field(init=False, repr=False)
    kind = "affine"

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"eps must lie in (0,1), got {self.eps}")
        object.__setattr__(self, "d", self.inner.d)
        object.__setattr__(self, "mean", (1.0 - self.eps) * self.inner.mean + self.eps)
        self._check_mean()

    @property
    def n_uniforms(self) -> int:
        return self.inner.n_uniforms

    @property
    def support_max(self) -> np.ndarray:
        return (1.0 - self.eps) * self.inner.support_max + self.eps

    def transform(self, u):
        return (1.0 - self.eps) * self.inner.transform(u) + self.eps

    def to_dict(self):
        return {"kind": self.kind, "eps": self.eps, "inner": self.inner.to_dict()}


def arm_from_dict(doc: dict[str, Any]) -> ArmDistribution:
    kind = doc.get("kind")
    if kind == "shifted_uniform":
        return ShiftedUniform(int(doc["base_index"]), int(doc.get("d", SYNTHETIC_D)))
    if kind == "mixed":
        return Mixed(tuple(doc["weights"]), tuple(arm_from_dict(c) for c in doc["components"]))
    if kind == "product_categorical":
        return ProductCategorical(tuple(map(tuple, doc["points"])), tuple(map(tuple, doc["probs"])))
    if kind == "scaled":
        return Scaled(arm_from_dict(doc["inner"]), float(doc["factor"]))
    if kind == "affine":
        return Affine(arm_from_dict(doc["inner"]), float(doc["eps"]))
    raise ValueError(f"unknown arm kind {kind!r}")


@dataclass(frozen=True, eq=False)
class PreferenceModel:
    """Finite-support distribution over preference vectors."""

    support: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        support = np.atleast_2d(np.asarray(self.support, dtype=float))
        probs = np.asarray(self.probabilities, dtype=float)
        if probs.shape != (support.shape[0],):
            raise DimensionMismatch("need one probability per support vector")
        if np.any(support <= 0):
            raise ValueError("preference vectors must be strictly positive in every coordinate")
        if np.any(np.abs(support.sum(axis=1) - 1.0) > SUM_TOL):
            raise ValueError("preference vectors must have unit L1 norm")
        _check_weights(probs, "preference probabilities")
        support.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probabilities", probs)
        object.__setattr__(self, "_cdf", np.cumsum(probs))

    @property
    def d(self) -> int:
        return self.support.shape[1]

    @property
    def size(self) -> int:
        return self.support.shape[0]

    def sample_indices(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw ``n`` support indices; one U[0,1) variate per draw."""
        idx = np.searchsorted(self._cdf, rng.random(n), side="right")
        return np.minimum(idx, self.size - 1)

    def index_of(self, lam: np.ndarray) -> int | None:
        hits = np.flatnonzero(np.all(np.abs(self.support - lam) <= TIE_TOL, axis=1))
        return int(hits[0]) if hits.size else None

    def to_dict(self):
        return {"support": self.support.tolist(), "probabilities": self.probabilities.tolist()}

    @classmethod
    def uniform(cls, support: Sequence[Sequence[float]]) -> "PreferenceModel":
        m = len(support)
        return cls(np.asarray(support, dtype=float), np.full(m, 1.0 / m))


def sample_preference(model: PreferenceModel, rng: np.random.Generator) -> np.ndarray:
    return model.support[model.sample_indices(rng, 1)[0]]


def sample_state(arm: ArmDistribution, rng: np.random.Generator) -> np.ndarray:
    return arm.sample(rng)


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    arms: tuple[ArmDistribution, ...]
    preferences: PreferenceModel

    def __post_init__(self):
        arms = tuple(self.arms)
        if len(arms) == 0:
            raise ValueError("instance needs at least one arm")
        dims = {a.d for a in arms} | {self.preferences.d}
        if len(dims) != 1:
            raise DimensionMismatch(f"arms and preferences disagree on dimension: {sorted(dims)}")
        object.__setattr__(self, "arms", arms)
        means = np.vstack([a.mean for a in arms])
        means.setflags(write=False)
        object.__setattr__(self, "means", means)
        widths = [a.n_uniforms for a in arms]
        object.__setattr__(self, "_offsets", np.concatenate([[0], np.cumsum(widths)]))
        for m in range(self.preferences.size):
            optimal_arm(self, self.preferences.support[m])

    @property
    def K(self) -> int:
        return len(self.arms)

    @property
    def d(self) -> int:
        return self.preferences.d

    @property
    def block_width(self) -> int:
        """Uniform variates consumed per time step to draw every arm's state."""
        return int(self._offsets[-1])

    def states_from_uniforms(self, u: np.ndarray) -> np.ndarray:
        """``(n, block_width)`` uniforms -> ``(n, K, d)`` independent arm states."""
        out = np.empty((u.shape[0], self.K, self.d))
        for i, arm in enumerate(self.arms):
            out[:, i, :] = arm.transform(u[:, self._offsets[i]:self._offsets[i + 1]])
        return out

    def arm_state_from_uniforms(self, i: int, row: np.ndarray) -> np.ndarray:
        """State of arm ``i`` given one block row of uniforms."""
        return self.arms[i].transform(row[None, self._offsets[i]:self._offsets[i + 1]])[0]

    def mean_rewards(self) -> np.ndarray:
        """``(M, K)`` table of lambda_m . mu_i over the preference support."""
        return self.preferences.support @ self.means.T

    def replace_arm(self, i: int, arm: ArmDistribution) -> "ProblemInstance":
        arms = list(self.arms)
        arms[i] = arm
        return ProblemInstance(tuple(arms), self.preferences)

    def to_dict(self):
        return {"arms": [a.to_dict() for a in self.arms], "preferences": self.preferences.to_dict()}

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "ProblemInstance":
        prefs = doc["preferences"]
        return cls(
            tuple(arm_from_dict(a) for a in doc["arms"]),
            PreferenceModel(np.asarray(prefs["support"], dtype=float),
                            np.asarray(prefs["probabilities"], dtype=float)),
        )


@dataclass(frozen=True)
class InstanceSummary:
    optimal_arm_of: tuple[int, ...]
    rho: np.ndarray = field(compare=False)
    s1: frozenset[int]
    s2: frozenset[int]
    l: float
    h: float
    support: np.ndarray = field(compare=False, repr=False)

    @property
    def K(self) -> int:
        return len(self.rho)


def optimal_arm(instance: ProblemInstance, lam: Iterable[float]) -> int:
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (instance.means.shape[1],):
        raise DimensionMismatch(f"preference has shape {lam.shape}, expected ({instance.means.shape[1]},)")
    values = instance.means @ lam
    best = int(np.argmax(values))
    rivals = np.delete(values, best)
    if rivals.size and np.max(rivals) >= values[best] - TIE_TOL:
        raise AmbiguousOptimum(f"preference {lam} has more than one optimal arm")
    return best


def summarize(instance: ProblemInstance) -> InstanceSummary:
    """Optimal-arm map, arm-region probabilities, S_1/S_2 and the gap range [l, h]."""
    prefs = instance.preferences
    K = instance.K
    opt = tuple(optimal_arm(instance, lam) for lam in prefs.support)
    rho = np.zeros(K)
    for m, j in enumerate(opt):
        rho[j] += prefs.probabilities[m]
    table = instance.mean_rewards()
    gaps = []
    for m, j in enumerate(opt):
        if prefs.probabilities[m] <= 0:
            continue
        gaps.extend(table[m, j] - np.delete(table[m], j))
    l = float(min(gaps)) if gaps else float("nan")
    h = float(max(gaps)) if gaps else float("nan")
    s1 = frozenset(int(j) for j in np.flatnonzero(rho > 0))
    return InstanceSummary(
        optimal_arm_of=opt,
        rho=rho,
        s1=s1,
        s2=frozenset(range(K)) - s1,
        l=l,
        h=h,
        support=prefs.support,
    )


def synthetic_preference(i: int, d: int = SYNTHETIC_D) -> np.ndarray:
    """(1/8)1 + (3/8)e_i, 0-based ``i``."""
    lam = np.full(d, 1.0 / 8.0)
    lam[i] += 3.0 / 8.0
    return lam


def build_synthetic(
    k_total: int,
    gamma: float = 1.0,
    active_preferences: Iterable[int] = (1, 2, 3, 4, 5),
    mix_seed: int = 0,
) -> ProblemInstance:
    """Five shifted-uniform base arms plus ``k_total - 5`` mixtures of them.

    ``active_preferences`` holds 1-based labels of the preference vectors
    (1/8)1 + (3/8)e_i kept in the uniform preference model. Mixture weights
    are random permutations of (0, 0.1, 0.2, 0.3, 0.4) drawn from
    ``mix_seed``; arm ``5 + r`` always gets the r-th permutation, so larger
    instances extend smaller ones with the same seed.
    """
    if not 0.0 < gamma <= 1.0:
        raise InvalidGamma(f"gamma must lie in (0,1], got {gamma}")
    if k_total < SYNTHETIC_D:
        raise ValueError(f"k_total must be at least {SYNTHETIC_D}")
    active = sorted(set(int(a) for a in active_preferences))
    if not active or active[0] < 1 or active[-1] > SYNTHETIC_D:
        raise ValueError(f"active_preferences must be a nonempty subset of 1..{SYNTHETIC_D}")

    base = tuple(ShiftedUniform(i) for i in range(SYNTHETIC_D))
    rng = np.random.default_rng(mix_seed)
    arms: list[ArmDistribution] = list(base)
    for _ in range(k_total - SYNTHETIC_D):
        arms.append(Mixed(tuple(rng.permutation(PI0)), base))
    if gamma < 1.0:
        arms = [Scaled(a, gamma) for a in arms]
    prefs = PreferenceModel.uniform([synthetic_preference(a - 1) for a in active])
    return ProblemInstance(tuple(arms), prefs)


def categorical_companion(instance: ProblemInstance) -> ProblemInstance:
    """Same means and preferences, but every coordinate is Bernoulli on {0, 1}.

    Arms of the shifted-uniform family have mutually singular laws, so their
    KL divergences are infinite; this companion keeps the mean structure
    (hence S_1, S_2, l, h) while giving every pair of arms finite KL.
    """
    arms = tuple(
        ProductCategorical(
            tuple((0.0, 1.0) for _ in range(instance.d)),
            tuple((1.0 - m, m) for m in arm.mean),
        )
        for arm in instance.arms
    )
    return ProblemInstance(arms, instance.preferences)
