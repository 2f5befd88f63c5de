"""Experiment configuration: JSON schema, defaults and validation."""

from __future__ import annotations

import json
from typing import Annotated, Any, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .env import ProblemInstance, build_synthetic
from .errors import ConfigValidationError, SchemaError

PolicyName = Literal["wucb", "oracle", "ucb1", "random"]

# pydantic error types that mean "wrong shape" rather than "bad value"
_SCHEMA_ERROR_TYPES = {
    "missing", "extra_forbidden", "json_invalid", "json_type", "model_type", "model_attributes_type",
    "union_tag_invalid", "union_tag_not_found", "dict_type", "list_type", "string_type",
    "int_type", "float_type", "bool_type", "int_parsing", "float_parsing", "bool_parsing",
    "int_from_float", "string_sub_type",
}


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SyntheticInstanceConfig(_Strict):
    kind: Literal["synthetic"]
    k_total: int = Field(ge=5)
    gamma: float = Field(1.0, gt=0.0, le=1.0)
    active_preferences: list[int] = Field(default_factory=lambda: [1, 2, 3, 4, 5])
    mix_seed: int = Field(0, ge=0)

    @field_validator("active_preferences")
    @classmethod
    def _labels(cls, v: list[int]) -> list[int]:
        labels = sorted(set(v))
        if not labels or labels[0] < 1 or labels[-1] > 5:
            raise ValueError("must be a nonempty subset of 1..5")
        return labels

    @property
    def n_arms(self) -> int:
        return self.k_total

    def build(self) -> ProblemInstance:
        return build_synthetic(self.k_total, self.gamma, self.active_preferences, self.mix_seed)


class ExplicitInstanceConfig(_Strict):
    kind: Literal["explicit"]
    arms: list[dict[str, Any]]
    preferences: dict[str, Any]

    @model_validator(mode="after")
    def _buildable(self):
        try:
            self.build()
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed instance description: {exc!r}") from None
        return self

    @property
    def n_arms(self) -> int:
        return len(self.arms)

    def build(self) -> ProblemInstance:
        return ProblemInstance.from_dict({"arms": self.arms, "preferences": self.preferences})


class RunConfig(_Strict):
    horizon: int = Field(ge=1)
    paths: int = Field(20, ge=1)
    base_seed: int = Field(0, ge=0)
    checkpoint_stride: int = Field(100, ge=1)
    workers: int = Field(1, ge=1)


class OutputConfig(_Strict):
    curves_path: str = "curves.csv"
    summary_path: str = "summary.json"
    counters: bool = True


class BoundsConfig(_Strict):
    alpha: float = Field(0.5, gt=0.0, lt=1.0)
    C: float = Field(1.0, gt=0.0)


class ExperimentConfig(_Strict):
    instance: Annotated[Union[SyntheticInstanceConfig, ExplicitInstanceConfig], Field(discriminator="kind")]
    run: RunConfig
    policies: list[PolicyName] = Field(default_factory=lambda: ["wucb"], min_length=1)
    output: OutputConfig = Field(default_factory=OutputConfig)
    bounds: BoundsConfig = Field(default_factory=BoundsConfig)

    @model_validator(mode="after")
    def _horizon_covers_init(self):
        if self.run.horizon < self.instance.n_arms:
            raise ValueError(f"run.horizon ({self.run.horizon}) must be at least the number of arms "
                             f"({self.instance.n_arms})")
        return self


def _describe(err: dict) -> str:
    path = ".".join(str(p) for p in err["loc"] if not isinstance(p, str) or p not in ("synthetic", "explicit"))
    return f"{path or '<root>'}: {err['msg']}"


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a JSON experiment config, filling defaults."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"<root>: invalid JSON ({exc})") from None
    try:
        return ExperimentConfig.model_validate(doc)
    except ValidationError as exc:
        errors = exc.errors()
        message = "; ".join(_describe(e) for e in errors)
        if any(e["type"] in _SCHEMA_ERROR_TYPES for e in errors):
            raise SchemaError(message) from None
        raise ConfigValidationError(message) from None


def serialize_config(cfg: ExperimentConfig) -> str:
    return cfg.model_dump_json(indent=2)
