"""Problem configuration, coordinate records and domain validation."""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

TWO_PI = 2.0 * math.pi

# distance guard around the centers and the excluded half-line
DELTA_DOM = 1e-8


class TaubNutError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(TaubNutError, ValueError):
    pass


class EmptyCenters(ConfigError):
    pass


class DuplicateCenter(ConfigError):
    pass


class NegativeEpsilon(ConfigError):
    pass


class DomainError(TaubNutError, ValueError):
    pass


class TooCloseToCenter(DomainError):
    pass


class TooCloseToAxisCut(DomainError):
    pass


class DegenerateAtBoundary(DomainError):
    pass


class LogDomain(DomainError):
    pass


class OutsideImage(DomainError):
    pass


class ChartSingular(DomainError):
    pass


class NegativeDiscriminant(DomainError):
    pass


class PoleAt1PlusEpsR(DomainError):
    pass


class StencilOutOfDomain(DomainError):
    pass


def normalize_angle(theta: float) -> float:
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    # fmod can land exactly on 2π after the shift for tiny negative inputs
    return 0.0 if t >= TWO_PI else t


@dataclass(frozen=True)
class GeometryConfig:
    epsilon: float
    centers: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "centers", tuple(float(c) for c in self.centers))
        if not self.centers:
            raise EmptyCenters("at least one center is required")
        for a, b in zip(self.centers, self.centers[1:]):
            if b == a:
                raise DuplicateCenter(f"center {a} appears twice")
            if b < a:
                raise ConfigError("centers must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.centers)

    @property
    def a(self) -> float:
        """The positive parameter a = -epsilon (only meaningful for epsilon < 0)."""
        return -self.epsilon

    def with_epsilon(self, epsilon: float) -> "GeometryConfig":
        return GeometryConfig(epsilon, self.centers)

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "centers": list(self.centers)}


def validate_config(raw: Sequence[float], epsilon: float) -> GeometryConfig:
    """Build a config from an arbitrary list of heights, sorting them first."""
    values = [float(c) for c in raw]
    if not values:
        raise EmptyCenters("at least one center is required")
    if any(not math.isfinite(c) for c in values) or not math.isfinite(float(epsilon)):
        raise ConfigError("centers and epsilon must be finite")
    values.sort()
    for a, b in zip(values, values[1:]):
        if a == b:
            raise DuplicateCenter(f"center {a} appears twice")
    return GeometryConfig(epsilon, tuple(values))


def config_from_dict(doc: dict) -> GeometryConfig:
    if not isinstance(doc, dict) or "epsilon" not in doc or "centers" not in doc:
        raise ConfigError('config must be an object with "epsilon" and "centers"')
    centers = doc["centers"]
    if not isinstance(centers, list):
        raise ConfigError('"centers" must be a list of heights')
    for c in centers:
        # points in R^3 are rejected: centers live on the z-axis
        if isinstance(c, (list, tuple, dict)) or isinstance(c, bool):
            raise ConfigError("centers are z-heights (numbers), not points")
    return validate_config(centers, doc["epsilon"])


def load_config(path: str | Path) -> GeometryConfig:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return config_from_dict(doc)


@dataclass(frozen=True)
class RealChartPoint:
    phi: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        object.__setattr__(self, "phi", normalize_angle(float(self.phi)))
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def rho(self) -> float:
        return math.hypot(self.x, self.y)

    @property
    def theta(self) -> float:
        return normalize_angle(math.atan2(self.y, self.x))

    @property
    def xyz(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def as_array(self):
        import numpy as np

        return np.array([self.phi, self.x, self.y, self.z])

    @classmethod
    def from_cylindrical(cls, rho: float, z: float, theta: float = 0.0,
                         phi: float = 0.0) -> "RealChartPoint":
        return cls(phi, rho * math.cos(theta), rho * math.sin(theta), z)


@dataclass(frozen=True)
class SymplecticPoint:
    mu1: float
    mu2: float
    theta1: float = 0.0
    theta2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta1", normalize_angle(float(self.theta1)))
        object.__setattr__(self, "theta2", normalize_angle(float(self.theta2)))


Z_CHART = "Z"


@dataclass(frozen=True)
class HolomorphicPoint:
    """A point in the (z1, z2) chart (``chart == "Z"``) or in chart i with (alpha_i, beta_i)."""

    chart: int | str
    alpha: complex
    beta: complex

    def __post_init__(self):
        if self.chart != Z_CHART and not (isinstance(self.chart, int) and self.chart >= 1):
            raise ValueError(f"chart must be a positive integer or {Z_CHART!r}")


class Phase(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class PhaseLabel:
    phase: Phase
    delta: float = 1e-9
    value: float = field(default=math.nan, compare=False)

    @classmethod
    def from_value(cls, v: float, delta: float) -> "PhaseLabel":
        if delta <= 0:
            raise ValueError("delta must be positive")
        if v > delta:
            return cls(Phase.PLUS, delta, v)
        if v < -delta:
            return cls(Phase.MINUS, delta, v)
        return cls(Phase.BOUNDARY, delta, v)


def in_domain_U(config: GeometryConfig, point: RealChartPoint) -> bool:
    """True unless the point sits on the half-line x = y = 0, z >= c_1."""
    return (point.x, point.y) != (0.0, 0.0) or point.z < config.centers[0]


def check_domain(config: GeometryConfig, x: float, y: float, z: float,
                 delta: float = DELTA_DOM, cut: bool = True) -> None:
    """Raise if (x, y, z) is within ``delta`` of a center or (optionally) of the cut."""
    rho2 = x * x + y * y
    for c in config.centers:
        if math.sqrt(rho2 + (z - c) ** 2) < delta:
            raise TooCloseToCenter(f"point within {delta} of center at z={c}")
    if cut and z >= config.centers[0] - delta and math.sqrt(rho2) < delta:
        raise TooCloseToAxisCut("point on the excluded half-line x=y=0, z>=c_1")
