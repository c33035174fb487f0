"""
Energy service for the integral energy, period and one-period action.
"""

from ..core.logging import get_logger
from ..models.reports import EnergyReport
from ..models.schemas import PhLOConfig
from ..physics.solutions import action_integral, build_solution, integral_momentum

logger = get_logger(__name__)


class EnergyService:
    """Service for energy/action integrals of one solution config."""

    def __init__(self, config: PhLOConfig):
        self.config = config
        self.solution = build_solution(config)

    def compute(self, xi0: float = 0.0) -> EnergyReport:
        """Integrate E and the action; passes when action / (E T) is within tolerance of eps*kappa."""
        result = action_integral(self.solution, xi0)
        energy = result.energy
        momentum_square = None
        if energy.value > 0.0:
            momentum_square = integral_momentum(self.solution, xi0).square

        tolerances = self.config.tolerances
        passed = (
            result.ratio is not None
            and abs(result.ratio - result.expected_ratio) < tolerances.quadrature_rel_tol
            and result.star_agreement <= tolerances.eom_tol
        )

        logger.info(
            "Computed energy and action",
            energy=energy.value,
            action=result.action,
            ratio=result.ratio,
            star_agreement=result.star_agreement,
            passed=passed,
        )
        if result.ratio is None:
            logger.warning("Energy vanishes, action ratio undefined", energy=energy.value)

        return EnergyReport(
            energy=energy.value,
            energy_error=energy.richardson_error,
            period=self.config.period,
            frequency=self.config.frequency,
            action=result.action,
            action_error=result.action_error,
            action_star=result.action_star,
            ratio=result.ratio,
            expected_ratio=result.expected_ratio,
            momentum_square=momentum_square,
            passed=passed,
        )
