"""
Frobenius curvature R of the Pfaff systems (A, zeta), (A*, zeta) and the
integrability 4-forms. Everything here is built from wedge and d only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..forms.exterior import wedge_all
from ..forms.fields import DEFAULT_PHASE_FLOOR, FieldPair, build_frame_jets, phase_jet, zeta, zeta_bar
from .strain import frobenius_R


@dataclass(frozen=True)
class CurvatureSample:
    R: np.ndarray
    phi2: np.ndarray
    lie_psi: np.ndarray
    defined: np.ndarray

    def consistency_residual(self) -> float:
        """max |R - phi^2 L(psi)| over points where the phase is defined."""
        if not np.any(self.defined):
            return 0.0
        return float(np.max(np.abs(self.R - self.phi2 * self.lie_psi)[self.defined]))


def curvature_R(fp: FieldPair, pt, phase_floor: float = DEFAULT_PHASE_FLOOR) -> CurvatureSample:
    """R = u(p_xi - eps p_z) - p(u_xi - eps u_z) and L_zeta_bar psi where phi^2 > floor."""
    jets = build_frame_jets(fp, pt)
    psi, defined = phase_jet(jets.u, jets.p, phase_floor)
    lie_psi = np.where(defined, psi.directional(zeta_bar(fp.epsilon)), np.nan)
    return CurvatureSample(
        R=frobenius_R(jets),
        phi2=jets.u.value**2 + jets.p.value**2,
        lie_psi=lie_psi,
        defined=defined,
    )


@dataclass(frozen=True)
class IntegrabilityForms:
    """omega_o coefficients of the four integrability 4-forms."""

    dA_A_Astar: np.ndarray
    dAstar_Astar_A: np.ndarray
    dA_A_zeta: np.ndarray
    dAstar_Astar_zeta: np.ndarray
    scale: np.ndarray

    @property
    def integrable_residual(self) -> np.ndarray:
        return np.maximum(np.abs(self.dA_A_Astar), np.abs(self.dAstar_Astar_A))


def integrability_4forms(fp: FieldPair, pt) -> IntegrabilityForms:
    jets = build_frame_jets(fp, pt)
    z = zeta(fp.epsilon)
    A, Astar = jets.A.value, jets.Astar.value
    dA, dAstar = jets.dA, jets.dAstar
    # the expressions are cubic in the field data
    magnitude = np.maximum.reduce([
        np.max(np.abs(jets.u.grad), axis=0), np.max(np.abs(jets.p.grad), axis=0),
        np.abs(jets.u.value), np.abs(jets.p.value),
    ])
    return IntegrabilityForms(
        dA_A_Astar=wedge_all(dA, A, Astar).components[0],
        dAstar_Astar_A=wedge_all(dAstar, Astar, A).components[0],
        dA_A_zeta=wedge_all(dA, A, z).components[0],
        dAstar_Astar_zeta=wedge_all(dAstar, Astar, z).components[0],
        scale=(1.0 + magnitude) ** 3,
    )
