"""
Pydantic models for run configuration.
"""

import hashlib
import math
from enum import Enum
from pathlib import Path
from typing import List, Literal, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..core.errors import ConfigError

SUITE_NAMES: Tuple[str, ...] = (
    "duality",
    "eq1",
    "eq2",
    "exterior",
    "frame",
    "frobenius",
    "solutions",
    "strain",
)


class TolerancePolicy(BaseModel):
    """Tolerances used by identity checks."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    algebraic_tol: float = Field(default=1e-12, gt=0, description="Pure algebra on closed-form data")
    jet_oracle_tol: float = Field(default=1e-6, gt=0, description="Analytic jet vs finite differences")
    fd_divergence_tol: float = Field(default=1e-6, gt=0, description="Mutual agreement of divergence forms")
    quadrature_rel_tol: float = Field(default=1e-3, gt=0, description="Relative tolerance of integrals")
    phase_floor: float = Field(default=1e-14, gt=0, description="phi^2 below which the phase is undefined")
    eom_tol: float = Field(default=1e-10, gt=0, description="Equation-of-motion and flux residuals")
    conservation_tol: float = Field(default=1e-8, gt=0, description="FD divergence of T on solutions")
    flow_oracle_tol: float = Field(default=1e-5, gt=0, description="Lie derivative vs flow pull-back")


class GridSpec(BaseModel):
    """Uniform Simpson grid.

    Every count is odd, at least 5, and (count - 1) is divisible by 4 so that
    the half-resolution grid used for the Richardson estimate is itself a
    Simpson grid. Without explicit extents the grid is fitted to the support.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    counts: Tuple[int, ...] = Field(default=(65, 65, 65), description="Points per spatial axis")
    xi_counts: int = Field(default=9, description="Points along xi for 4-volume integrals")
    extents: Optional[Tuple[Tuple[float, float], ...]] = Field(
        default=None, description="Per-axis (lo, hi); fitted to the support when omitted"
    )

    @staticmethod
    def _check_count(n: int) -> int:
        if n < 5 or n % 2 == 0 or (n - 1) % 4 != 0:
            raise ValueError(f"grid count {n} must be >= 5 with (count - 1) divisible by 4")
        return n

    @field_validator("counts")
    @classmethod
    def validate_counts(cls, v: Tuple[int, ...]) -> Tuple[int, ...]:
        if not v:
            raise ValueError("at least one axis is required")
        return tuple(cls._check_count(n) for n in v)

    @field_validator("xi_counts")
    @classmethod
    def validate_xi_counts(cls, v: int) -> int:
        return cls._check_count(v)

    @field_validator("extents")
    @classmethod
    def validate_extents(cls, v):
        if v is not None:
            for lo, hi in v:
                if not hi > lo:
                    raise ValueError(f"extent ({lo}, {hi}) is empty")
        return v

    def spacing(self) -> Tuple[float, ...]:
        if self.extents is None:
            raise ConfigError("grid extents are not set")
        return tuple((hi - lo) / (n - 1) for (lo, hi), n in zip(self.extents, self.counts))


class AmplitudeKind(str, Enum):
    PRODUCT_MOLLIFIER = "product-mollifier"
    TRUNCATED_GAUSSIAN = "truncated-gaussian"


class AmplitudeSpec(BaseModel):
    """Amplitude phi(x, y, s) with s = xi + eps*z."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: AmplitudeKind = Field(default=AmplitudeKind.PRODUCT_MOLLIFIER)
    phi0: float = Field(default=1.0, ge=0, description="Peak amplitude")
    r0: float = Field(default=1.0, gt=0, description="Transverse support radius")
    s0: float = Field(default=math.pi, gt=0, description="Longitudinal half-width")
    s_center: float = Field(default=0.0, description="Longitudinal centre")
    helix_radius: float = Field(default=0.0, ge=0, description="Radius of the helix carrying the tube axis")
    gaussian_cutoff: float = Field(default=6.0, gt=0, description="Truncation, in widths, of the gaussian kind")


class PhLOConfig(BaseModel):
    """Parameters of the helical solution family."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    epsilon: Literal[-1, 1] = Field(default=1, description="Propagation direction along z")
    kappa: Literal[-1, 1] = Field(default=1, description="Rotation orientation")
    l0: float = Field(default=1.0, gt=0, description="Length parameter of the rotation")
    phase_const: float = Field(default=0.0, description="Constant phase offset")
    c_light: float = Field(default=1.0, gt=0, description="Speed of light; xi = c*t")
    amplitude: AmplitudeSpec = Field(default_factory=AmplitudeSpec)
    grid: GridSpec = Field(default_factory=GridSpec)
    tolerances: TolerancePolicy = Field(default_factory=TolerancePolicy)

    @property
    def period(self) -> float:
        """T = 2*pi*l0/c."""
        return 2.0 * math.pi * self.l0 / self.c_light

    @property
    def frequency(self) -> float:
        return 1.0 / self.period


class SweepSpec(BaseModel):
    """Sizes of the randomized sweeps."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    field_pairs: int = Field(default=20, ge=1, description="Random field pairs")
    points: int = Field(default=100, ge=1, description="Random points per field pair")
    bridge_samples: int = Field(default=1000, ge=1, description="(field, point, eps) samples for bridge signs")
    solution_points: int = Field(default=1000, ge=1, description="Support points per solution config")


class OutputSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    report: Optional[Path] = None
    sample: Optional[Path] = None


class RunConfig(BaseModel):
    """Top-level document of a run configuration file."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    phlo: PhLOConfig = Field(default_factory=PhLOConfig)
    suites: List[str] = Field(default_factory=lambda: list(SUITE_NAMES))
    seed: Optional[int] = Field(default=None, description="Seed for randomized sweeps")
    sweep: SweepSpec = Field(default_factory=SweepSpec)
    output: OutputSpec = Field(default_factory=OutputSpec)

    @field_validator("suites")
    @classmethod
    def validate_suites(cls, v: List[str]) -> List[str]:
        if not v:
            raise ValueError("at least one suite must be selected")
        unknown = sorted(set(v) - set(SUITE_NAMES))
        if unknown:
            raise ValueError(f"unknown suites: {unknown}")
        return sorted(set(v))

    @classmethod
    def from_yaml(cls, path: Path) -> Tuple["RunConfig", str]:
        """Parse and validate a YAML config; returns the config and the file's sha256."""
        try:
            raw = Path(path).read_bytes()
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        try:
            data = yaml.safe_load(raw.decode("utf-8")) or {}
        except (yaml.YAMLError, UnicodeDecodeError) as e:
            raise ConfigError(f"malformed config {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must be a mapping")
        try:
            config = cls.model_validate(data)
        except ValidationError as e:
            raise ConfigError(f"invalid config {path}: {e}") from e
        return config, hashlib.sha256(raw).hexdigest()
