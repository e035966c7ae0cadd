"""Averaging windows λΩ."""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Literal

import numpy as np
from scipy.special import gamma

BOUNDARY_SLACK = 1e-12


@dataclass(frozen=True)
class WindowSpec:
    """A box or ball Ω plus the geometric schedule λ₀·rʲ, j = 0…J.

    Attributes:
        shape: "box" or "ball"
        center: center of Ω
        half_extents: half side lengths (box) or the radius repeated (ball)
        lambda0: first scale
        ratio: schedule ratio r > 1
        steps: J, the schedule has J + 1 scales
    """

    shape: Literal["box", "ball"]
    center: tuple[float, ...]
    half_extents: tuple[float, ...]
    lambda0: float = 10.0
    ratio: float = 2.0
    steps: int = 6

    def __post_init__(self) -> None:
        if self.shape not in ("box", "ball"):
            raise ValueError(f"Unsupported window shape {self.shape!r}; use 'box' or 'ball'")
        if len(self.center) != len(self.half_extents):
            raise ValueError("center and half_extents must have the same length")
        if not self.center:
            raise ValueError("A window needs at least one dimension")
        if any(h <= 0 for h in self.half_extents):
            raise ValueError("Window must have positive volume")
        if self.shape == "ball" and len(set(self.half_extents)) != 1:
            raise ValueError("A ball has a single radius")
        if self.lambda0 <= 0 or self.ratio <= 1 or self.steps < 0:
            raise ValueError("Schedule needs λ₀ > 0, r > 1 and J ≥ 0")

    @classmethod
    def box(cls, lo: float | list[float], hi: float | list[float], **schedule: Any) -> "WindowSpec":
        """Box [lo, hi] (per coordinate) as center/half-extents."""
        lo_v = np.atleast_1d(np.asarray(lo, dtype=float))
        hi_v = np.atleast_1d(np.asarray(hi, dtype=float))
        return cls(
            shape="box",
            center=tuple(float(x) for x in (lo_v + hi_v) / 2),
            half_extents=tuple(float(x) for x in (hi_v - lo_v) / 2),
            **schedule,
        )

    @classmethod
    def ball(cls, center: list[float], radius: float, **schedule: Any) -> "WindowSpec":
        return cls(
            shape="ball",
            center=tuple(float(x) for x in center),
            half_extents=(float(radius),) * len(center),
            **schedule,
        )

    @property
    def n(self) -> int:
        return len(self.center)

    @cached_property
    def schedule(self) -> tuple[float, ...]:
        return tuple(self.lambda0 * self.ratio**j for j in range(self.steps + 1))

    @property
    def unit_volume(self) -> float:
        if self.shape == "box":
            return float(np.prod([2 * h for h in self.half_extents]))
        r = self.half_extents[0]
        return float(math.pi ** (self.n / 2) / gamma(self.n / 2 + 1) * r**self.n)

    def volume(self, lam: float) -> float:
        return self.unit_volume * lam**self.n

    def bounds(self, lam: float) -> tuple[np.ndarray, np.ndarray]:
        """Bounding box of λΩ."""
        c = lam * np.asarray(self.center)
        h = lam * np.asarray(self.half_extents)
        return c - h, c + h

    def contains(self, points: np.ndarray, lam: float) -> np.ndarray:
        """Membership of real points (shape (P, n)) in the closed window λΩ.

        The boundary is widened by ``BOUNDARY_SLACK`` relative to the window's
        scale so points computed on ∂(λΩ) count as inside.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        c = lam * np.asarray(self.center)
        h = lam * np.asarray(self.half_extents)
        slack = BOUNDARY_SLACK * (1.0 + float(np.max(np.abs(c))) + float(np.max(h)))
        if self.shape == "box":
            return np.all(np.abs(pts - c) <= h + slack, axis=1)
        return np.linalg.norm(pts - c, axis=1) <= h[0] + slack

    def boundary_distance(self, points: np.ndarray, lam: float) -> np.ndarray:
        """Distance from interior points to ∂(λΩ); negative outside."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        c = lam * np.asarray(self.center)
        h = lam * np.asarray(self.half_extents)
        if self.shape == "box":
            return np.min(h - np.abs(pts - c), axis=1)
        return h[0] - np.linalg.norm(pts - c, axis=1)

    def diameter(self, lam: float) -> float:
        h = lam * np.asarray(self.half_extents)
        return float(2 * (np.linalg.norm(h) if self.shape == "box" else h[0]))

    def with_schedule(self, lambda0: float, ratio: float, steps: int) -> "WindowSpec":
        return WindowSpec(self.shape, self.center, self.half_extents, lambda0, ratio, steps)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary."""
        return {
            "shape": self.shape,
            "center": list(self.center),
            "half_extents": list(self.half_extents),
            "lambda0": self.lambda0,
            "ratio": self.ratio,
            "steps": self.steps,
            "schedule": list(self.schedule),
        }
