"""
Stress-energy-momentum tensor of a 2-form pair (F, *F), its null structure,
the three computable forms of its divergence and the duality relations.

Mixed tensors are stored as arrays of shape (4, 4, *batch) with the row
index lower (mu) and the column index upper (nu).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..core.errors import InvariantViolation
from ..core.logging import get_logger
from ..forms.exterior import MINKOWSKI, KForm, MetricSignature, hodge, interior_2_3, raise_index, raise_tensor
from ..forms.fields import FieldPair, NullFrame, build_frame_jets, build_null_frame, exterior_derivative, zeta_bar
from ..numerics import gradient_4

logger = get_logger(__name__)


@dataclass(frozen=True)
class EnergyTensor:
    """T_mu^nu, shape (4, 4, *batch)."""

    mixed: np.ndarray

    @property
    def trace(self) -> np.ndarray:
        return np.einsum("mm...->...", self.mixed)

    @property
    def energy_density(self) -> np.ndarray:
        """T_4^4."""
        return self.mixed[3, 3]

    def lowered(self, metric: MetricSignature = MINKOWSKI) -> np.ndarray:
        """T_{mu nu} = T_mu^sigma eta_{sigma nu}."""
        return np.einsum("ms...,sn->mn...", self.mixed, metric.matrix)

    def act(self, v) -> np.ndarray:
        """v^mu T_mu^nu."""
        v = np.asarray(v, dtype=float)
        v = v.reshape(v.shape[:1] + (1,) * (self.mixed.ndim - 1 - v.ndim)) if v.ndim < self.mixed.ndim - 1 else v
        return np.einsum("m...,mn...->n...", v, self.mixed)


def _half_square(F: KForm, metric: MetricSignature) -> np.ndarray:
    # -1/2 F_{mu sigma} F^{nu sigma}
    f = F.to_tensor()
    return -0.5 * np.einsum("ms...,ns...->mn...", f, raise_tensor(f, 2, metric))


def energy_parts(F: KForm, starF: KForm, metric: MetricSignature = MINKOWSKI) -> Tuple[np.ndarray, np.ndarray]:
    """The F and *F contributions to T_mu^nu."""
    return _half_square(F, metric), _half_square(starF, metric)


def energy_tensor(F: KForm, starF: Optional[KForm] = None, metric: MetricSignature = MINKOWSKI) -> EnergyTensor:
    """T_mu^nu = -1/2 [F_{mu s} F^{nu s} + (*F)_{mu s} (*F)^{nu s}].

    A supplied *F must equal hodge(F); it is recomputed otherwise.
    """
    expected = hodge(F, metric)
    if starF is None:
        starF = expected
    elif not starF.is_close(expected, 1e-12 * (1.0 + F.norm_inf())):
        raise InvariantViolation("supplied *F differs from hodge(F)")
    f_part, s_part = energy_parts(F, starF, metric)
    return EnergyTensor(f_part + s_part)


def frame_energy_tensor(frame: NullFrame) -> EnergyTensor:
    return energy_tensor(frame.F, frame.starF)


def null_reference(frame: NullFrame) -> np.ndarray:
    """phi^2 zeta_mu zeta_bar^nu."""
    z = frame.zeta.components
    zb = zeta_bar(frame.epsilon)
    return np.multiply.outer(z, zb).reshape((4, 4) + (1,) * np.ndim(frame.phi2)) * frame.phi2


def isotropy_invariants(F: KForm, starF: Optional[KForm] = None,
                        metric: MetricSignature = MINKOWSKI) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(T_{mu nu} T^{mu nu}, I1 = 1/2 F_{mu nu} F^{mu nu}, I2 = 1/2 F_{mu nu} (*F)^{mu nu})."""
    starF = hodge(F, metric) if starF is None else starF
    T = energy_tensor(F, starF, metric).mixed
    f = F.to_tensor()
    s_up = raise_tensor(starF.to_tensor(), 2, metric)
    tt = np.einsum("mn...,nm...->...", T, T)
    i1 = 0.5 * np.einsum("mn...,mn...->...", f, raise_tensor(f, 2, metric))
    i2 = 0.5 * np.einsum("mn...,mn...->...", f, s_up)
    return tt, i1, i2


def eigen_residuals(T: EnergyTensor, frame: NullFrame) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """|T zeta_bar|, |T A_bar|, |T A*_bar| (max-norm over the four components)."""
    vectors = (zeta_bar(frame.epsilon), raise_index(frame.A), raise_index(frame.Astar))
    return tuple(np.max(np.abs(T.act(v)), axis=0) for v in vectors)  # type: ignore[return-value]


def rank_one_residual(T: EnergyTensor) -> np.ndarray:
    """Largest 2x2 minor of the mixed tensor."""
    m = T.mixed
    minors = np.einsum("ac...,bd...->abcd...", m, m) - np.einsum("ad...,bc...->abcd...", m, m)
    return np.max(np.abs(minors.reshape((-1,) + m.shape[2:])), axis=0)


def equal_sharing_residual(frame: NullFrame) -> np.ndarray:
    """Max over entries of |F-part - T/2| and |*F-part - T/2|."""
    f_part, s_part = energy_parts(frame.F, frame.starF)
    half = 0.5 * (f_part + s_part)
    flat = lambda a: np.abs(a).reshape((-1,) + a.shape[2:])  # noqa: E731
    return np.maximum(np.max(flat(f_part - half), axis=0), np.max(flat(s_part - half), axis=0))


@dataclass(frozen=True)
class DivergenceReport:
    """Divergence of T in three forms plus the four exchange 1-forms."""

    direct: np.ndarray
    via_dF: np.ndarray
    via_codiff: np.ndarray
    exchange: Tuple[KForm, KForm, KForm, KForm]

    @property
    def exchange_sum(self) -> np.ndarray:
        """i(F^)dF + i(*F^)d*F."""
        return (self.exchange[0] + self.exchange[1]).components

    def disagreement(self) -> float:
        return float(max(
            np.max(np.abs(self.direct - self.via_dF)),
            np.max(np.abs(self.direct - self.via_codiff)),
            np.max(np.abs(self.via_dF - self.via_codiff)),
        ))

    def internal_residual(self) -> float:
        return float(np.max(np.abs(self.via_dF - self.exchange_sum)))


def divergence_report(fp: FieldPair, pt, h: float = 1e-3) -> DivergenceReport:
    """d_nu T_mu^nu by finite differences, and from the jets of F and *F."""
    pt = np.asarray(pt, dtype=float)

    def mixed_at(q: np.ndarray) -> np.ndarray:
        return frame_energy_tensor(build_null_frame(fp, q)).mixed

    grad = gradient_4(mixed_at, pt, h)  # (nu-derivative, mu, nu, *batch)
    direct = np.einsum("nmn...->m...", grad)

    jets = build_frame_jets(fp, pt)
    F, S = jets.F.value, jets.starF.value
    dF, dS = jets.dF, jets.dstarF

    # full double sums over (alpha, beta)
    def full_sum(K: KForm, G: KForm) -> np.ndarray:
        return np.einsum("ab...,abm...->m...", raise_tensor(K.to_tensor(), 2), G.to_tensor())

    via_dF = 0.5 * (full_sum(F, dF) + full_sum(S, dS))

    # delta = *d* composed literally; *S = **F
    delta_F = hodge(dS)
    delta_S = hodge(exterior_derivative(jets.starF.hodge()))
    via_codiff = (
        np.einsum("mn...,n...->m...", F.to_tensor(), raise_index(delta_F))
        + np.einsum("mn...,n...->m...", S.to_tensor(), raise_index(delta_S))
    )

    exchange = (interior_2_3(F, dF), interior_2_3(S, dS), interior_2_3(S, dF), interior_2_3(F, dS))
    return DivergenceReport(direct=direct, via_dF=via_dF, via_codiff=via_codiff, exchange=exchange)


def duality_identity_residual(F: KForm, metric: MetricSignature = MINKOWSKI) -> np.ndarray:
    """|1/2 F_{mu nu} F^{mu nu} delta_a^b - F_{mu a} F^{mu b} + (*F)_{mu a} (*F)^{mu b}|, max over (a, b)."""
    S = hodge(F, metric)
    f, s = F.to_tensor(), S.to_tensor()
    f_up, s_up = raise_tensor(f, 2, metric), raise_tensor(s, 2, metric)
    i1 = 0.5 * np.einsum("mn...,mn...->...", f, f_up)
    rhs = np.einsum("ma...,mb...->ab...", f, f_up) - np.einsum("ma...,mb...->ab...", s, s_up)
    lhs = np.einsum("ab,...->ab...", np.eye(4), i1)
    return np.max(np.abs(lhs - rhs).reshape((16,) + f.shape[2:]), axis=0)


@dataclass(frozen=True)
class DualityRotation:
    F: KForm
    starF: KForm
    residual: np.ndarray


def duality_rotation(F: KForm, starF: KForm, angle: float) -> DualityRotation:
    """F' = F cos f + *F sin f, *F' = hodge(F'); residual is |T(F') - T(F)|."""
    rotated = F * np.cos(angle) + starF * np.sin(angle)
    rotated_star = hodge(rotated)
    before = energy_tensor(F, starF).mixed
    after = energy_tensor(rotated, rotated_star).mixed
    residual = np.max(np.abs(after - before).reshape((16,) + before.shape[2:]), axis=0)
    return DualityRotation(F=rotated, starF=rotated_star, residual=residual)
