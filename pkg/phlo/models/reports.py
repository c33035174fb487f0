"""
Pydantic models for verification and energy reports.
"""

import json
from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class CheckResult(BaseModel):
    """Outcome of one identity check."""

    name: str = Field(description="Check identifier")
    residual: float = Field(description="Worst residual observed")
    tolerance: float = Field(description="Tolerance the residual is compared against")
    passed: bool = Field(description="residual <= tolerance")
    detail: Optional[str] = Field(default=None, description="Extra information (bridge sign, exception, ...)")

    @classmethod
    def compare(cls, name: str, residual: float, tolerance: float, detail: Optional[str] = None) -> "CheckResult":
        residual = float(residual)
        return cls(name=name, residual=residual, tolerance=tolerance, passed=residual <= tolerance, detail=detail)

    @classmethod
    def flag(cls, name: str, ok: bool, detail: Optional[str] = None) -> "CheckResult":
        """Boolean check reported as residual 0 / 1."""
        return cls(name=name, residual=0.0 if ok else 1.0, tolerance=0.0, passed=bool(ok), detail=detail)


class SuiteReport(BaseModel):
    """All checks of one suite."""

    name: str
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def worst(self) -> Optional[CheckResult]:
        failing = [c for c in self.checks if not c.passed]
        return failing[0] if failing else None


class VerificationReport(BaseModel):
    """Deterministic report of a `verify` run."""

    seed: int
    config_sha256: Optional[str] = None
    bridge_signs: Dict[str, int] = Field(default_factory=dict)
    sections: Dict[str, SuiteReport] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.sections.values())

    def to_json(self, indent: int = 2) -> str:
        payload = self.model_dump()
        payload["passed"] = self.passed
        for name, section in self.sections.items():
            payload["sections"][name]["passed"] = section.passed
        return json.dumps(payload, sort_keys=True, indent=indent) + "\n"


class EnergyReport(BaseModel):
    """Energy, period and one-period action of a solution."""

    energy: float
    energy_error: float
    period: float
    frequency: float
    action: float
    action_error: float
    action_star: float = Field(description="Action computed from dA* ^ A* ^ zeta")
    ratio: Optional[float] = Field(default=None, description="action / (E*T); None when E vanishes")
    expected_ratio: int = Field(description="eps*kappa")
    momentum_square: Optional[float] = Field(default=None, description="P_mu P^mu of the integral momentum")
    passed: bool

    def to_text(self) -> str:
        rows = [
            ("E", self.energy),
            ("E_error", self.energy_error),
            ("T", self.period),
            ("nu", self.frequency),
            ("action", self.action),
            ("action_error", self.action_error),
            ("action_star", self.action_star),
            ("ratio", "undefined" if self.ratio is None else self.ratio),
            ("expected_ratio", self.expected_ratio),
            ("momentum_square", "undefined" if self.momentum_square is None else self.momentum_square),
            ("passed", str(self.passed).lower()),
        ]
        return "".join(
            f"{key} = {value!r}\n" if isinstance(value, float) else f"{key} = {value}\n"
            for key, value in rows
        )
