"""
Strain tensors: Lie derivatives of the flat metric along the eigen vector
fields zeta_bar, A_bar and A*_bar, their contractions with zeta_bar, Lie
brackets and the strain-flux 1-forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import InvariantViolation
from ..core.logging import get_logger
from ..forms.exterior import DIM, MINKOWSKI, KForm, MetricSignature, hodge, interior_2_3, wedge
from ..forms.fields import (
    FieldPair,
    FormJet,
    FrameJets,
    Polynomial,
    ScalarField,
    ScalarJet,
    as_point,
    build_frame_jets,
    sigma_star,
    zeta,
    zeta_bar,
)
from ..numerics import gradient_4, rk4_flow

logger = get_logger(__name__)


@dataclass(frozen=True)
class VectorJet:
    """Contravariant components X^mu and their derivatives, grad[mu, nu] = d_mu X^nu."""

    value: np.ndarray
    grad: np.ndarray

    @classmethod
    def constant(cls, v, batch_shape: Tuple[int, ...] = ()) -> "VectorJet":
        v = np.asarray(v, dtype=float).reshape((DIM,) + (1,) * len(batch_shape))
        value = np.broadcast_to(v, (DIM,) + tuple(batch_shape)).copy()
        return cls(value, np.zeros((DIM, DIM) + tuple(batch_shape)))


class VectorField:
    """A vector field given by four scalar component fields."""

    def __init__(self, components: Sequence[ScalarField]):
        if len(components) != DIM:
            raise ValueError(f"a vector field needs {DIM} components, got {len(components)}")
        self.components = tuple(components)

    @classmethod
    def constant(cls, v) -> "VectorField":
        return cls([Polynomial.constant(float(c)) for c in v])

    @classmethod
    def random_polynomial(cls, rng: np.random.Generator, degree: int = 2, n_terms: int = 4) -> "VectorField":
        return cls([Polynomial.random(rng, degree, n_terms) for _ in range(DIM)])

    def eval(self, pt) -> np.ndarray:
        return np.stack([c.eval(pt) for c in self.components])

    def jet(self, pt) -> VectorJet:
        jets = [c.jet(pt) for c in self.components]
        return VectorJet(np.stack([j.value for j in jets]), np.stack([j.grad for j in jets], axis=1))


def raise_form_jet(jet: FormJet, metric: MetricSignature = MINKOWSKI) -> VectorJet:
    """The eta-corresponding vector field of a 1-form jet."""
    inv = metric.inverse
    value = np.einsum("ij,j...->i...", inv, jet.value.components)
    grad = np.einsum("ij,mj...->mi...", inv, jet.grad)
    return VectorJet(value, grad)


@dataclass(frozen=True)
class StrainTensor:
    """(L_X eta)_{mu nu}, shape (4, 4, *batch)."""

    cov: np.ndarray

    def contract(self, X, Y) -> np.ndarray:
        """D(X, Y) = D_{mu nu} X^mu Y^nu."""
        return np.einsum("mn...,m...,n...->...", self.cov, _vec(X, self.cov), _vec(Y, self.cov))

    def one_form(self, Y) -> KForm:
        """D(Y) = D_{mu nu} Y^nu dx^mu."""
        return KForm(1, np.einsum("mn...,n...->m...", self.cov, _vec(Y, self.cov)))

    def is_symmetric(self, atol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.cov - np.swapaxes(self.cov, 0, 1)) <= atol))


def _vec(v, cov: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    missing = cov.ndim - 2 - (v.ndim - 1)
    return v.reshape(v.shape[:1] + (1,) * missing + v.shape[1:]) if missing > 0 else v


def lie_metric(X: VectorJet, metric: MetricSignature = MINKOWSKI) -> StrainTensor:
    """(L_X eta)_{mu nu} = d_mu X_nu + d_nu X_mu with X_nu = eta_{nu s} X^s."""
    lowered = np.einsum("ns,ms...->mn...", metric.matrix, X.grad)
    return StrainTensor(lowered + np.swapaxes(lowered, 0, 1))


def lie_metric_flow_oracle(
    X: VectorField,
    pt,
    t_step: float = 1e-3,
    h: float = 1e-3,
    metric: MetricSignature = MINKOWSKI,
) -> StrainTensor:
    """(phi_t^* eta - phi_{-t}^* eta) / 2t from the RK4 flow and its FD Jacobian."""
    if not t_step > 0:
        raise ValueError(f"flow step must be positive, got {t_step}")
    pt = as_point(pt)

    def pullback(t: float) -> np.ndarray:
        # jac[a, mu] = d phi_t^mu / d x^a
        jac = gradient_4(lambda q: rk4_flow(X.eval, q, t), pt, h)
        return np.einsum("am...,mn,bn...->ab...", jac, metric.matrix, jac)

    return StrainTensor((pullback(t_step) - pullback(-t_step)) / (2.0 * t_step))


def strain_D(fp: FieldPair, pt) -> StrainTensor:
    """L_{A_bar} eta."""
    return lie_metric(raise_form_jet(build_frame_jets(fp, pt).A))


def strain_Dstar(fp: FieldPair, pt) -> StrainTensor:
    """L_{A*_bar} eta."""
    return lie_metric(raise_form_jet(build_frame_jets(fp, pt).Astar))


def _derivative_matrix(u: ScalarJet, p: ScalarJet) -> Dict[str, np.ndarray]:
    names = ("x", "y", "z", "xi")
    out = {f"u_{n}": u.grad[i] for i, n in enumerate(names)}
    out.update({f"p_{n}": p.grad[i] for i, n in enumerate(names)})
    return out


def printed_D_reference(fp: FieldPair, pt) -> np.ndarray:
    """The printed D matrix, built entry by entry from u and p derivatives."""
    jets = build_frame_jets(fp, pt)
    d = _derivative_matrix(jets.u, jets.p)
    zero = np.zeros_like(d["u_x"])
    return np.array([
        [2 * d["u_x"], d["u_y"] + d["p_x"], d["u_z"], d["u_xi"]],
        [d["u_y"] + d["p_x"], 2 * d["p_y"], d["p_z"], d["p_xi"]],
        [d["u_z"], d["p_z"], zero, zero],
        [d["u_xi"], d["p_xi"], zero, zero],
    ])


def printed_Dstar_reference(fp: FieldPair, pt) -> np.ndarray:
    """The printed D* matrix, including its (1,2) entry -eps(p_y + u_x)."""
    jets = build_frame_jets(fp, pt)
    d = _derivative_matrix(jets.u, jets.p)
    e = float(fp.epsilon)
    zero = np.zeros_like(d["u_x"])
    off = -e * (d["p_y"] + d["u_x"])
    return np.array([
        [-2 * e * d["p_x"], off, -e * d["p_z"], -e * d["p_xi"]],
        [off, 2 * e * d["u_y"], e * d["u_z"], e * d["u_xi"]],
        [-e * d["p_z"], e * d["u_z"], zero, zero],
        [-e * d["p_xi"], e * d["u_xi"], zero, zero],
    ])


@dataclass(frozen=True)
class DstarComparison:
    """strain_Dstar against the printed matrix: -1 times it away from the (1,2) entry."""

    sign: int
    residual: float
    entry_12_computed: np.ndarray
    entry_12_printed: np.ndarray

    @property
    def entry_12_matches(self) -> bool:
        return bool(np.allclose(self.sign * self.entry_12_printed, self.entry_12_computed, atol=1e-12))


def compare_Dstar(fp: FieldPair, pt) -> DstarComparison:
    computed = strain_Dstar(fp, pt).cov
    printed = printed_Dstar_reference(fp, pt)
    sign = -1
    mask = np.ones((DIM, DIM), dtype=bool)
    mask[0, 1] = mask[1, 0] = False
    diff = (computed - sign * printed)[mask]
    return DstarComparison(
        sign=sign,
        residual=float(np.max(np.abs(diff))),
        entry_12_computed=computed[0, 1],
        entry_12_printed=printed[0, 1],
    )


def lie_bracket(X: VectorJet, Y: VectorJet) -> np.ndarray:
    """[X, Y]^mu = X^nu d_nu Y^mu - Y^nu d_nu X^mu."""
    return np.einsum("n...,nm...->m...", X.value, Y.grad) - np.einsum("n...,nm...->m...", Y.value, X.grad)


def lie_zeta_bar(jet: ScalarJet, epsilon: int) -> np.ndarray:
    """L_zeta_bar f = f_xi - eps f_z."""
    return jet.directional(zeta_bar(epsilon))


def frobenius_R(jets: FrameJets) -> np.ndarray:
    """R = u L(p) - p L(u) along zeta_bar."""
    return jets.u.value * lie_zeta_bar(jets.p, jets.epsilon) - jets.p.value * lie_zeta_bar(jets.u, jets.epsilon)


def lie_phi2(jets: FrameJets) -> np.ndarray:
    return lie_zeta_bar(jets.u * jets.u + jets.p * jets.p, jets.epsilon)


@dataclass(frozen=True)
class ContractRelations:
    """Contractions of D and D* with zeta_bar, A_bar and A*_bar."""

    D_zeta_zeta: np.ndarray
    Dstar_zeta_zeta: np.ndarray
    D_A_zeta: np.ndarray
    Dstar_Astar_zeta: np.ndarray
    D_Astar_zeta: np.ndarray
    Dstar_A_zeta: np.ndarray
    lie_phi2: np.ndarray
    R: np.ndarray
    epsilon: int


def contract_relations(fp: FieldPair, pt) -> ContractRelations:
    jets = build_frame_jets(fp, pt)
    A_bar = raise_form_jet(jets.A)
    Astar_bar = raise_form_jet(jets.Astar)
    D = lie_metric(A_bar)
    Dstar = lie_metric(Astar_bar)
    zb = zeta_bar(fp.epsilon)
    return ContractRelations(
        D_zeta_zeta=D.contract(zb, zb),
        Dstar_zeta_zeta=Dstar.contract(zb, zb),
        D_A_zeta=D.contract(A_bar.value, zb),
        Dstar_Astar_zeta=Dstar.contract(Astar_bar.value, zb),
        D_Astar_zeta=D.contract(Astar_bar.value, zb),
        Dstar_A_zeta=Dstar.contract(A_bar.value, zb),
        lie_phi2=lie_phi2(jets),
        R=frobenius_R(jets),
        epsilon=fp.epsilon,
    )


@dataclass(frozen=True)
class StrainFluxes:
    """The strain 1-forms along zeta_bar, their flux 1-forms and the interior products."""

    D_zeta: KForm
    Dstar_zeta: KForm
    D_A: KForm  # *[D(zeta_bar) ^ A ^ zeta]
    Dstar_Astar: KForm  # *[D*(zeta_bar) ^ A* ^ zeta]
    D_Astar: KForm  # *[D(zeta_bar) ^ A* ^ zeta]
    Dstar_A: KForm  # *[D*(zeta_bar) ^ A ^ zeta]
    iF_dF: KForm
    iS_dS: KForm
    iS_dF: KForm
    iF_dS: KForm
    lie_phi2: np.ndarray
    R: np.ndarray
    epsilon: int


def strain_flux_forms(fp: FieldPair, pt) -> StrainFluxes:
    jets = build_frame_jets(fp, pt)
    zb = zeta_bar(fp.epsilon)
    z = zeta(fp.epsilon)
    D_zeta = lie_metric(raise_form_jet(jets.A)).one_form(zb)
    Dstar_zeta = lie_metric(raise_form_jet(jets.Astar)).one_form(zb)
    A, Astar = jets.A.value, jets.Astar.value
    F, S = jets.F.value, jets.starF.value
    dF, dS = jets.dF, jets.dstarF

    def flux(strain: KForm, potential: KForm) -> KForm:
        return hodge(wedge(wedge(strain, potential), z))

    return StrainFluxes(
        D_zeta=D_zeta,
        Dstar_zeta=Dstar_zeta,
        D_A=flux(D_zeta, A),
        Dstar_Astar=flux(Dstar_zeta, Astar),
        D_Astar=flux(D_zeta, Astar),
        Dstar_A=flux(Dstar_zeta, A),
        iF_dF=interior_2_3(F, dF),
        iS_dS=interior_2_3(S, dS),
        iS_dF=interior_2_3(S, dF),
        iF_dS=interior_2_3(F, dS),
        lie_phi2=lie_phi2(jets),
        R=frobenius_R(jets),
        epsilon=fp.epsilon,
    )


def wedge_independence(fp: FieldPair, pt) -> KForm:
    """D(zeta_bar) ^ D*(zeta_bar), a multiple of dx ^ dy."""
    fluxes = strain_flux_forms(fp, pt)
    return wedge(fluxes.D_zeta, fluxes.Dstar_zeta)


@dataclass(frozen=True)
class BridgeSigns:
    """Constant signs between the strict-convention values and the printed relations.

    s46:         D(A*_bar, zeta_bar) = s46 * (-eps R)
    s8:          *[D(zeta_bar) ^ A* ^ zeta] = s8 * 1/2 L(phi^2) zeta
    sigma_star:  hodge(A ^ zeta) = sigma_star * (A* ^ zeta)
    s_indep:     D(zeta_bar) ^ D*(zeta_bar) = s_indep * eps (L(u)^2 + L(p)^2) dx ^ dy
    """

    s46: int
    s8: int
    sigma_star: int
    s_indep: int
    samples: int = 0

    def as_dict(self) -> Dict[str, int]:
        return {"s46": self.s46, "s8": self.s8, "sigma_star": self.sigma_star, "s_indep": self.s_indep}


def _ratio_signs(numerator: np.ndarray, denominator: np.ndarray, floor: float = 1e-8) -> set:
    numerator, denominator = np.ravel(numerator), np.ravel(denominator)
    usable = np.abs(denominator) > floor
    return set(np.sign(numerator[usable] / denominator[usable]).astype(int).tolist())


def _freeze(name: str, signs: set) -> int:
    if len(signs) != 1:
        raise InvariantViolation(f"bridge sign {name} is not constant: {sorted(signs)}")
    return signs.pop()


def measure_bridge_signs(
    rng: np.random.Generator,
    samples: int = 1000,
    field_factory: Optional[Callable[[np.random.Generator], Tuple[ScalarField, ScalarField]]] = None,
    points_per_field: int = 50,
) -> BridgeSigns:
    """Measure each bridge sign over random (field, point, eps) samples and require it constant."""
    if field_factory is None:
        field_factory = lambda r: (Polynomial.random(r), Polynomial.random(r))  # noqa: E731
    found: Dict[str, set] = {"s46": set(), "s8": set(), "s_indep": set()}
    taken = 0
    while taken < samples:
        batch = min(points_per_field, samples - taken)
        u, p = field_factory(rng)
        eps = int(rng.choice([-1, 1]))
        fp = FieldPair(u, p, eps)
        pts = rng.uniform(-1.0, 1.0, size=(DIM, batch))

        rel = contract_relations(fp, pts)
        found["s46"] |= _ratio_signs(rel.D_Astar_zeta, -eps * rel.R)
        found["s46"] |= _ratio_signs(rel.Dstar_A_zeta, eps * rel.R)

        fluxes = strain_flux_forms(fp, pts)
        # every flux is a multiple of zeta, whose xi component is 1
        found["s8"] |= _ratio_signs(fluxes.D_Astar.components[3], 0.5 * fluxes.lie_phi2)
        found["s8"] |= _ratio_signs(-fluxes.Dstar_A.components[3], 0.5 * fluxes.lie_phi2)

        jets = build_frame_jets(fp, pts)
        squares = lie_zeta_bar(jets.u, eps) ** 2 + lie_zeta_bar(jets.p, eps) ** 2
        coefficient = wedge(fluxes.D_zeta, fluxes.Dstar_zeta).components[0]
        found["s_indep"] |= _ratio_signs(coefficient, eps * squares)
        taken += batch

    signs = BridgeSigns(
        s46=_freeze("s46", found["s46"]),
        s8=_freeze("s8", found["s8"]),
        sigma_star=sigma_star(),
        s_indep=_freeze("s_indep", found["s_indep"]),
        samples=taken,
    )
    logger.info("Bridge signs measured", samples=taken, **signs.as_dict())
    return signs
