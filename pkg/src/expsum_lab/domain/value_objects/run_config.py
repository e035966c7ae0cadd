"""Experiment configuration.

A run is described by one JSON document validated by ``RunConfig``; CLI flags
override individual fields through ``RunConfig.with_overrides``.
"""

import hashlib
import json
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from expsum_lab.domain.errors import ConfigError
from expsum_lab.domain.value_objects.window import WindowSpec

Command = Literal["lattice", "geometry", "predict", "zeros", "mean", "weyl", "transversal", "verify"]
COMMANDS: tuple[str, ...] = ("lattice", "geometry", "predict", "zeros", "mean", "weyl", "transversal", "verify")

FrequencyInput = Union[str, int, float, list[Union[str, int, float]]]
ComplexInput = Union[int, float, str, list[float]]


def parse_complex(value: ComplexInput) -> complex:
    """Coefficient from a JSON number, a ``[re, im]`` pair or a string like ``"1-2j"``."""
    if isinstance(value, bool):
        raise ValueError("Boolean is not a coefficient")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list):
        if len(value) != 2:
            raise ValueError("Complex pairs are written [re, im]")
        return complex(float(value[0]), float(value[1]))
    try:
        return complex(value.replace(" ", ""))
    except ValueError as exc:
        raise ValueError(f"Cannot read {value!r} as a complex number") from exc


class TermSpec(BaseModel):
    """One term c·exp(2π α·z)."""

    model_config = ConfigDict(extra="forbid")

    coef: ComplexInput = 1
    freq: FrequencyInput

    @field_validator("coef")
    @classmethod
    def _check_coef(cls, value: ComplexInput) -> ComplexInput:
        parse_complex(value)
        return value

    @property
    def coefficient(self) -> complex:
        return parse_complex(self.coef)


class TrigTermSpec(BaseModel):
    """c·cos 2π⟨·⟩ + d·sin 2π⟨·⟩ with a real frequency ``freq`` or torus vector ``m``."""

    model_config = ConfigDict(extra="forbid")

    c: float = 1.0
    d: float = 0.0
    freq: Optional[FrequencyInput] = None
    m: Optional[list[int]] = None

    @model_validator(mode="after")
    def _one_frequency(self) -> "TrigTermSpec":
        if (self.freq is None) == (self.m is None):
            raise ValueError("A trigonometric term needs exactly one of 'freq' or 'm'")
        if self.c == 0 and self.d == 0:
            raise ValueError("A trigonometric term needs (c, d) ≠ (0, 0)")
        return self


class ClauseSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    equations: list[list[TrigTermSpec]] = Field(default_factory=list)
    inequalities: list[list[TrigTermSpec]] = Field(default_factory=list)


class WindowConfig(BaseModel):
    """Box [lo, hi] or ball (center, radius) plus the λ schedule."""

    model_config = ConfigDict(extra="forbid")

    shape: Literal["box", "ball"] = "box"
    lo: Optional[list[float]] = None
    hi: Optional[list[float]] = None
    center: Optional[list[float]] = None
    radius: Optional[float] = Field(default=None, gt=0)
    lambda0: float = Field(default=10.0, gt=0)
    ratio: float = Field(default=2.0, gt=1)
    steps: int = Field(default=6, ge=0)

    @model_validator(mode="after")
    def _shape_fields(self) -> "WindowConfig":
        if self.shape == "box" and (self.lo is None or self.hi is None):
            raise ValueError("Box windows need 'lo' and 'hi'")
        if self.shape == "ball" and (self.center is None or self.radius is None):
            raise ValueError("Ball windows need 'center' and 'radius'")
        return self

    def to_window(self) -> WindowSpec:
        schedule = {"lambda0": self.lambda0, "ratio": self.ratio, "steps": self.steps}
        if self.shape == "box":
            assert self.lo is not None and self.hi is not None
            return WindowSpec.box(self.lo, self.hi, **schedule)
        assert self.center is not None and self.radius is not None
        return WindowSpec.ball(self.center, self.radius, **schedule)


class TorusConfig(BaseModel):
    """Torus-side experiment: lattice generators plus torus data in m-coordinates.

    ``m`` vectors refer to the lattice basis reported in ``lattice.json``, which
    is the list of generators itself when they are independent.
    """

    model_config = ConfigDict(extra="forbid")

    frequencies: list[FrequencyInput]
    f: list[TrigTermSpec] = Field(default_factory=list)
    equations: list[list[TrigTermSpec]] = Field(default_factory=list)
    inequalities: list[list[TrigTermSpec]] = Field(default_factory=list)
    T: list[TrigTermSpec] = Field(default_factory=list)
    base_point: Optional[list[float]] = None
    check_lambda: Optional[float] = Field(default=None, gt=0)


class RealSetConfig(BaseModel):
    """Semitrigonometric set in x ∈ ℝⁿ with the weight T."""

    model_config = ConfigDict(extra="forbid")

    clauses: list[ClauseSpec]
    T: list[TrigTermSpec] = Field(default_factory=list)


class RunConfig(BaseModel):
    """Validated experiment configuration."""

    model_config = ConfigDict(extra="forbid")

    command: Command = "verify"
    name: Optional[str] = None
    system: list[list[TermSpec]] = Field(default_factory=list)
    G: list[TermSpec] = Field(default_factory=list)
    window: Optional[WindowConfig] = None
    k: Optional[dict[str, int]] = None
    k_file: Optional[str] = None
    min_multiplicity: int = Field(default=1, ge=1)
    collar: float = Field(default=0.0, ge=0)
    torus: Optional[TorusConfig] = None
    real_set: Optional[RealSetConfig] = None

    seed: Optional[int] = None
    threads: Optional[int] = Field(default=None, ge=1)
    tol_residual: Optional[float] = Field(default=None, gt=0)
    tol_compare: Optional[float] = Field(default=None, gt=0)
    tol_frequency: Optional[float] = Field(default=None, gt=0)
    relation_bound: Optional[int] = Field(default=None, ge=1)
    out_dir: Optional[str] = None
    cache: bool = True

    @model_validator(mode="after")
    def _command_inputs(self) -> "RunConfig":
        if self.command in ("weyl", "transversal"):
            if self.torus is None:
                raise ValueError(f"Command '{self.command}' needs a 'torus' section")
            return self
        if self.command == "mean" and self.real_set is not None:
            if self.window is None:
                raise ValueError("Real mean values need a 'window'")
            return self
        if not self.system:
            raise ValueError(f"Command '{self.command}' needs a 'system'")
        if any(not comp for comp in self.system):
            raise ValueError("Every system component needs at least one term")
        if self.command in ("zeros", "mean", "verify") and self.window is None:
            raise ValueError(f"Command '{self.command}' needs a 'window'")
        return self

    @classmethod
    def load(cls, data: dict[str, Any]) -> "RunConfig":
        """Validate a config document.

        Raises:
            ConfigError: schema violation, with one entry per failing field path.
        """
        try:
            return cls.model_validate(data)
        except ValidationError as exc:
            raise ConfigError(
                "Invalid config",
                errors=[{"loc": ".".join(str(p) for p in e["loc"]), "msg": e["msg"]} for e in exc.errors()],
            ) from exc

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """Copy with non-None overrides applied and revalidated."""
        data = self.model_dump()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig.load(data)

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        """First 12 hex digits of the SHA-256 of the canonical config."""
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()[:12]
