"""
Verification service: runs the identity suites and assembles the report.
"""

from typing import Callable, Dict, List, Optional

import numpy as np

from ..core.config import settings
from ..core.logging import get_logger
from ..forms.exterior import (
    DIM,
    MINKOWSKI,
    KForm,
    hodge,
    interior_2_3,
    lower_index,
    metric_pairing,
    raise_index,
    random_kform,
    star_table,
    unit_volume,
    wedge,
)
from ..forms.fields import (
    FieldPair,
    Polynomial,
    PlaneWaveProfile,
    build_frame_jets,
    build_null_frame,
    exterior_derivative,
    fd_form_jet,
    fd_jet,
    random_field_pair,
    sigma_star,
    zeta,
    zeta_bar,
)
from ..models.reports import CheckResult, SuiteReport, VerificationReport
from ..models.schemas import SUITE_NAMES, AmplitudeKind, PhLOConfig, RunConfig
from ..physics.frobenius import curvature_R, integrability_4forms
from ..physics.solutions import (
    action_integral,
    build_solution,
    covering_grid,
    energy_integral,
    eom_residuals,
    integral_momentum,
    nonlinear_equation_check,
    support_geometry,
    support_points,
)
from ..physics.strain import (
    BridgeSigns,
    VectorField,
    VectorJet,
    compare_Dstar,
    contract_relations,
    lie_bracket,
    lie_metric,
    lie_metric_flow_oracle,
    lie_zeta_bar,
    measure_bridge_signs,
    printed_D_reference,
    raise_form_jet,
    strain_D,
    strain_flux_forms,
)
from ..physics.stress_energy import (
    divergence_report,
    duality_identity_residual,
    duality_rotation,
    eigen_residuals,
    energy_tensor,
    equal_sharing_residual,
    frame_energy_tensor,
    isotropy_invariants,
    null_reference,
    rank_one_residual,
)

logger = get_logger(__name__)

# stream index of the generator that measures bridge signs
BRIDGE_STREAM = len(SUITE_NAMES)


def _worst(*values) -> float:
    worst = 0.0
    for v in values:
        arr = np.abs(np.asarray(v, dtype=float))
        if arr.size:
            worst = max(worst, float(np.nanmax(arr)))
    return worst


def _jet_scale(fp: FieldPair, pts: np.ndarray) -> float:
    """1 + largest |u|, |p| or first derivative over the points."""
    u, p = fp.u.jet(pts), fp.p.jet(pts)
    return 1.0 + _worst(u.value, p.value, u.grad, p.grad)


def _constant_pair(u: float, p: float, epsilon: int) -> FieldPair:
    return FieldPair(Polynomial.constant(u), Polynomial.constant(p), epsilon)


def _linear_pair() -> FieldPair:
    """u = xi, p = z, eps = +1."""
    return FieldPair(Polynomial.coordinate(3), Polynomial.coordinate(2), 1)


def _plane_wave_pair(epsilon: int) -> FieldPair:
    return FieldPair(
        PlaneWaveProfile(epsilon, 1.0, 1.3, 0.2, 0.9),
        PlaneWaveProfile(epsilon, 0.7, 1.3, 1.1, 0.9),
        epsilon,
    )


class VerificationService:
    """Runs the selected suites for one run configuration."""

    def __init__(self, run: RunConfig, seed: Optional[int] = None, config_sha256: Optional[str] = None):
        self.run = run
        self.config: PhLOConfig = run.phlo
        self.tol = run.phlo.tolerances
        self.seed = seed if seed is not None else (run.seed if run.seed is not None else settings.DEFAULT_SEED)
        self.config_sha256 = config_sha256
        self.h = settings.FD_STEP
        self._bridge: Optional[BridgeSigns] = None
        self.suites: Dict[str, Callable[[np.random.Generator], SuiteReport]] = {
            "duality": self.suite_duality,
            "eq1": self.suite_eq1,
            "eq2": self.suite_eq2,
            "exterior": self.suite_exterior,
            "frame": self.suite_frame,
            "frobenius": self.suite_frobenius,
            "solutions": self.suite_solutions,
            "strain": self.suite_strain,
        }

    def rng(self, stream: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, stream])

    @property
    def bridge_signs(self) -> BridgeSigns:
        if self._bridge is None:
            self._bridge = measure_bridge_signs(self.rng(BRIDGE_STREAM), self.run.sweep.bridge_samples)
        return self._bridge

    def _sweep(self, rng: np.random.Generator):
        for _ in range(self.run.sweep.field_pairs):
            fp = random_field_pair(rng)
            pts = rng.uniform(-1.0, 1.0, size=(DIM, self.run.sweep.points))
            yield fp, pts

    def run_suites(self, names: Optional[List[str]] = None) -> VerificationReport:
        """Run suites in sorted order; each draws from its own seeded stream."""
        names = sorted(names if names is not None else self.run.suites)
        sections: Dict[str, SuiteReport] = {}
        for name in names:
            report = self.suites[name](self.rng(SUITE_NAMES.index(name)))
            sections[name] = report
            worst = report.worst
            logger.info(
                "Suite finished",
                suite=name,
                checks=len(report.checks),
                passed=report.passed,
                first_failure=worst.name if worst else None,
            )
        return VerificationReport(
            seed=self.seed,
            config_sha256=self.config_sha256,
            bridge_signs=self.bridge_signs.as_dict(),
            sections=sections,
        )

    # exterior algebra

    def suite_exterior(self, rng: np.random.Generator) -> SuiteReport:
        tol = self.tol.algebraic_tol
        checks = []

        n = max(1, settings.STAR_TABLE_CHECK_SAMPLES // (DIM + 1))
        defining = []
        for grade in range(DIM + 1):
            a = random_kform(rng, grade, (n,))
            b = random_kform(rng, grade, (n,))
            rhs = unit_volume() * (MINKOWSKI.volume_sign * metric_pairing(a, b))
            defining.append((wedge(a, hodge(b)) - rhs).norm_inf())
        checks.append(CheckResult.compare(
            "hodge_defining_relation", max(defining), tol, detail=f"{n * (DIM + 1)} random pairs"
        ))

        table = star_table()
        double = all(
            table.double_star_sign(k) == (-1) ** (k * (DIM - k) + 1) for k in range(DIM + 1)
        )
        checks.append(CheckResult.flag("double_star_sign", double, detail="(-1)^(k(4-k)+1) per grade"))

        dxdy = hodge(KForm.basis((0, 1))).is_close(KForm.basis((2, 3), -1.0), 0.0)
        star_one = hodge(KForm(0, [1.0])).is_close(-unit_volume(), 0.0)
        star_vol = hodge(unit_volume()).is_close(KForm(0, [1.0]), 0.0)
        star_dxdydz = hodge(KForm.basis((0, 1, 2))).is_close(KForm.basis((3,)), 0.0)
        checks.append(CheckResult.flag("star_basis_examples", dxdy and star_one and star_vol and star_dxdydz))

        points = self.run.sweep.points
        anti, assoc = [], []
        for ga in range(DIM + 1):
            for gb in range(DIM + 1 - ga):
                a = random_kform(rng, ga, (points,))
                b = random_kform(rng, gb, (points,))
                anti.append((wedge(a, b) - wedge(b, a) * float((-1) ** (ga * gb))).norm_inf())
                for gc in range(DIM + 1 - ga - gb):
                    c = random_kform(rng, gc, (points,))
                    assoc.append((wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).norm_inf())
        checks.append(CheckResult.compare("wedge_graded_anticommutativity", max(anti), tol))
        checks.append(CheckResult.compare("wedge_associativity", max(assoc), tol))

        one_forms = random_kform(rng, 1, (points,))
        vectors = rng.uniform(-1.0, 1.0, size=(DIM, points))
        musical = (
            lower_index(raise_index(one_forms)).is_close(one_forms, 0.0)
            and np.array_equal(raise_index(lower_index(vectors)), vectors)
        )
        checks.append(CheckResult.flag("raise_lower_identity", musical))

        interior = (
            interior_2_3(KForm.basis((0, 2)), KForm.basis((0, 2, 3))).is_close(KForm.basis((3,)), 0.0)
            and interior_2_3(KForm.basis((0, 3)), KForm.basis((0, 3, 1))).is_close(KForm.basis((1,), -1.0), 0.0)
        )
        checks.append(CheckResult.flag("interior_product_examples", interior))
        return SuiteReport(name="exterior", checks=checks)

    # null frame

    def suite_frame(self, rng: np.random.Generator) -> SuiteReport:
        tol = self.tol
        pairings, degeneracy, star_bridge, oracle, phase, d_squared = [], [], [], [], [], []
        s_star = sigma_star()
        for fp, pts in self._sweep(rng):
            frame = build_null_frame(fp, pts, tol.phase_floor)
            scale = 1.0 + _worst(frame.phi2)
            pairings.append(_worst(
                metric_pairing(frame.zeta, frame.zeta),
                metric_pairing(frame.A, frame.zeta),
                metric_pairing(frame.Astar, frame.zeta),
                metric_pairing(frame.A, frame.Astar),
                metric_pairing(frame.A, frame.A) + frame.phi2,
                metric_pairing(frame.Astar, frame.Astar) + frame.phi2,
            ) / scale)
            degeneracy.append(_worst(metric_pairing(frame.F, frame.F), metric_pairing(frame.F, frame.starF)) / scale)
            star_bridge.append((frame.starF - wedge(frame.Astar, frame.zeta) * float(s_star)).norm_inf() / scale)

            for f in (fp.u, fp.p):
                oracle.append(_worst(f.jet(pts).grad - fd_jet(f.eval, pts, self.h).grad))

            u, p = fp.u.eval(pts), fp.p.eval(pts)
            phi = np.sqrt(frame.phi2)
            defined = frame.phase_defined
            phase.append(_worst((phi * np.cos(frame.psi) - u)[defined], (phi * np.sin(frame.psi) - p)[defined]))

            dd_A = exterior_derivative(fd_form_jet(lambda q: build_frame_jets(fp, q).dA, pts, self.h))
            dd_S = exterior_derivative(fd_form_jet(lambda q: build_frame_jets(fp, q).dstarF, pts, self.h))
            d_squared.append(max(dd_A.norm_inf(), dd_S.norm_inf()))

        return SuiteReport(name="frame", checks=[
            CheckResult.compare("null_frame_pairings", max(pairings), tol.algebraic_tol),
            CheckResult.compare("null_field_degeneracy", max(degeneracy), tol.algebraic_tol),
            CheckResult.compare(
                "star_F_equals_sigma_Astar_zeta", max(star_bridge), tol.algebraic_tol, detail=f"sigma_star={s_star}"
            ),
            CheckResult.compare("analytic_jet_vs_fd", max(oracle), tol.jet_oracle_tol, detail=f"h={self.h}"),
            CheckResult.compare("phase_reconstruction", max(phase), tol.algebraic_tol * 10),
            CheckResult.compare("d_squared_vanishes", max(d_squared), tol.jet_oracle_tol),
            CheckResult.flag("sigma_star_constant", s_star in (-1, 1), detail=f"sigma_star={s_star}"),
        ])

    # stress-energy tensor

    def suite_eq1(self, rng: np.random.Generator) -> SuiteReport:
        tol = self.tol.algebraic_tol
        rank_one, trace, invariants, eigen, minors, density, sharing = [], [], [], [], [], [], []
        for fp, pts in self._sweep(rng):
            frame = build_null_frame(fp, pts)
            T = frame_energy_tensor(frame)
            scale = 1.0 + _worst(frame.phi2)
            rank_one.append(_worst(T.mixed - null_reference(frame)) / scale)
            tt, i1, i2 = isotropy_invariants(frame.F, frame.starF)
            invariants.append(max(_worst(tt) / scale**2, _worst(i1, i2) / scale))
            eigen.append(_worst(*eigen_residuals(T, frame)) / scale**2)
            minors.append(_worst(rank_one_residual(T)) / scale**2)
            density.append(_worst(T.energy_density - frame.phi2) / scale)
            sharing.append(_worst(equal_sharing_residual(frame)) / scale)

            generic = random_kform(rng, 2, pts.shape[1:])
            trace.append(max(_worst(T.trace) / scale, _worst(energy_tensor(generic).trace)))

        example = energy_tensor(build_null_frame(_constant_pair(1.0, 0.0, 1), np.zeros(DIM)).F).mixed
        expected = np.zeros((DIM, DIM))
        expected[3, 3], expected[2, 2], expected[2, 3], expected[3, 2] = 1.0, -1.0, 1.0, -1.0

        return SuiteReport(name="eq1", checks=[
            CheckResult.compare("rank_one_law", max(rank_one), tol),
            CheckResult.compare("traceless", max(trace), tol),
            CheckResult.compare("isotropy_invariants_vanish", max(invariants), tol),
            CheckResult.compare("eigen_residuals", max(eigen), tol),
            CheckResult.compare("rank_one_minors", max(minors), tol),
            CheckResult.compare("energy_density_is_phi2", max(density), tol),
            CheckResult.compare("equal_sharing", max(sharing), tol),
            CheckResult.compare("constant_frame_example", _worst(example - expected), tol),
        ])

    # divergence of T

    def suite_eq2(self, rng: np.random.Generator) -> SuiteReport:
        tol = self.tol
        agreement, internal, limits = [], [], []
        for fp, pts in self._sweep(rng):
            report = divergence_report(fp, pts, self.h)
            scale = _jet_scale(fp, pts)
            limits.append(max(tol.fd_divergence_tol, self.h**4 * scale**2))
            agreement.append(report.disagreement() / limits[-1] * tol.fd_divergence_tol)
            internal.append(report.internal_residual() / scale**2)

        linear = divergence_report(_linear_pair(), rng.uniform(-1.0, 1.0, size=(DIM, 10)), self.h)
        constant = divergence_report(_constant_pair(0.3, -0.8, 1), rng.uniform(-1.0, 1.0, size=(DIM, 10)), self.h)
        constant_zero = not (np.any(constant.direct) or np.any(constant.via_dF) or np.any(constant.via_codiff))

        sol = build_solution(self.config)
        sol_pts = support_points(self.config, rng, self.run.sweep.solution_points)
        conservation = divergence_report(sol.pair, sol_pts, self.h)

        return SuiteReport(name="eq2", checks=[
            CheckResult.compare("three_forms_agree", max(agreement), tol.fd_divergence_tol),
            CheckResult.compare("via_dF_equals_exchange_sum", max(internal), tol.algebraic_tol),
            CheckResult.compare("linear_field_via_dF_vs_direct", _worst(linear.via_dF - linear.direct),
                                tol.fd_divergence_tol),
            CheckResult.flag("constant_field_divergence_zero", constant_zero),
            CheckResult.compare("solution_conservation", _worst(conservation.direct), tol.conservation_tol),
        ])

    # duality

    def suite_duality(self, rng: np.random.Generator) -> SuiteReport:
        tol = self.tol.algebraic_tol
        points = self.run.sweep.points
        generic = random_kform(rng, 2, (points,))
        identity = _worst(duality_identity_residual(generic)) / (1.0 + generic.norm_inf()) ** 2

        rotation = []
        for fp, pts in self._sweep(rng):
            frame = build_null_frame(fp, pts)
            angles = rng.uniform(0.0, 2.0 * np.pi, pts.shape[1:])
            rotated = duality_rotation(frame.F, frame.starF, angles)
            rotation.append(_worst(rotated.residual) / (1.0 + _worst(frame.phi2)))
        generic_rotation = duality_rotation(generic, hodge(generic), float(rng.uniform(0.0, 2.0 * np.pi)))
        rotation.append(_worst(generic_rotation.residual) / (1.0 + generic.norm_inf()) ** 2)

        still = duality_rotation(generic, hodge(generic), 0.0)
        unchanged = still.F.is_close(generic, 0.0) and still.starF.is_close(hodge(generic), 0.0)
        return SuiteReport(name="duality", checks=[
            CheckResult.compare("formal_identity", identity, tol, detail=f"{points} random 2-forms"),
            CheckResult.compare("rotation_invariance", max(rotation), tol),
            CheckResult.flag("zero_angle_identity", unchanged),
        ])

    # strain tensors

    def suite_strain(self, rng: np.random.Generator) -> SuiteReport:
        tol = self.tol
        signs = self.bridge_signs
        zb_metric = lie_metric(VectorJet.constant(zeta_bar(1)))
        zb_metric_minus = lie_metric(VectorJet.constant(zeta_bar(-1)))
        zeta_isometry = not (np.any(zb_metric.cov) or np.any(zb_metric_minus.cov))

        printed_D, dstar, dstar_12 = [], [], []
        zeta_contractions, antisym, magnitude, s46, anchor, brackets = [], [], [], [], [], []
        self_fluxes, cross_fluxes, interiors, independence = [], [], [], []
        for fp, pts in self._sweep(rng):
            eps = fp.epsilon
            scale = _jet_scale(fp, pts) ** 2
            printed_D.append(_worst(strain_D(fp, pts).cov - printed_D_reference(fp, pts)) / scale)
            cmp = compare_Dstar(fp, pts)
            dstar.append(cmp.residual / scale)
            dstar_12.append(cmp.entry_12_matches)

            rel = contract_relations(fp, pts)
            half = 0.5 * rel.lie_phi2
            zeta_contractions.append(_worst(rel.D_zeta_zeta, rel.Dstar_zeta_zeta, rel.D_A_zeta + half, rel.Dstar_Astar_zeta + half)
                         / scale)
            antisym.append(_worst(rel.D_Astar_zeta + rel.Dstar_A_zeta) / scale)
            magnitude.append(_worst(np.abs(rel.D_Astar_zeta) - np.abs(rel.R)) / scale)
            s46.append(_worst(rel.D_Astar_zeta - signs.s46 * (-eps * rel.R)) / scale)

            curv = curvature_R(fp, pts, 1e-10)
            anchor.append(curv.consistency_residual() / scale)

            jets = build_frame_jets(fp, pts)
            zb = VectorJet.constant(zeta_bar(eps), pts.shape[1:])
            fluxes = strain_flux_forms(fp, pts)
            brackets.append(_worst(
                raise_index(fluxes.D_zeta) + lie_bracket(raise_form_jet(jets.A), zb),
                raise_index(fluxes.Dstar_zeta) + lie_bracket(raise_form_jet(jets.Astar), zb),
            ) / scale)

            z = zeta(eps)
            eps_R_zeta = z * (eps * fluxes.R)
            half_zeta = z * (0.5 * fluxes.lie_phi2)
            self_fluxes.append(max(
                (fluxes.D_A + eps_R_zeta).norm_inf(),
                (fluxes.Dstar_Astar + eps_R_zeta).norm_inf(),
            ) / scale)
            cross_fluxes.append(max(
                (fluxes.D_Astar - half_zeta * float(signs.s8)).norm_inf(),
                (fluxes.Dstar_A + half_zeta * float(signs.s8)).norm_inf(),
            ) / scale)
            interiors.append(max(
                (fluxes.iF_dF - half_zeta).norm_inf(),
                (fluxes.iS_dS - half_zeta).norm_inf(),
                (fluxes.iS_dF + eps_R_zeta * float(signs.sigma_star)).norm_inf(),
                (fluxes.iF_dS - eps_R_zeta * float(signs.sigma_star)).norm_inf(),
            ) / scale)
            squares = lie_zeta_bar(jets.u, eps) ** 2 + lie_zeta_bar(jets.p, eps) ** 2
            coefficient = wedge(fluxes.D_zeta, fluxes.Dstar_zeta).components[0]
            independence.append(_worst(coefficient - signs.s_indep * eps * squares) / scale)

        flow = []
        flow_points = min(self.run.sweep.points, 50)
        for _ in range(self.run.sweep.field_pairs):
            X = VectorField.random_polynomial(rng)
            pts = rng.uniform(-0.5, 0.5, size=(DIM, flow_points))
            flow.append(_worst(lie_metric_flow_oracle(X, pts, t_step=1e-4).cov - lie_metric(X.jet(pts)).cov))

        mismatched = sum(1 for ok in dstar_12 if not ok)
        return SuiteReport(name="strain", checks=[
            CheckResult.compare("D_matches_printed_matrix", max(printed_D), tol.algebraic_tol),
            CheckResult.compare(
                "Dstar_is_minus_printed_matrix", max(dstar), tol.algebraic_tol,
                detail=f"entry (1,2) excluded: printed -eps(p_y+u_x) vs computed eps(p_y-u_x); "
                       f"differs on {mismatched}/{len(dstar_12)} sweeps",
            ),
            CheckResult.flag("zeta_bar_is_isometry", zeta_isometry),
            CheckResult.compare("lie_metric_vs_flow_oracle", max(flow), tol.flow_oracle_tol),
            CheckResult.compare("strain_zeta_contractions", max(zeta_contractions), tol.eom_tol),
            CheckResult.compare("antisymmetric_pairing", max(antisym), tol.algebraic_tol),
            CheckResult.compare("cross_contraction_magnitude", max(magnitude), tol.eom_tol),
            CheckResult.compare("cross_contraction_bridge_sign", max(s46), tol.eom_tol, detail=f"s46={signs.s46}"),
            CheckResult.compare("R_equals_phi2_lie_psi", max(anchor), tol.eom_tol),
            CheckResult.compare("strain_equals_minus_bracket", max(brackets), tol.algebraic_tol),
            CheckResult.compare("strain_flux_self", max(self_fluxes), tol.eom_tol),
            CheckResult.compare("strain_flux_cross", max(cross_fluxes), tol.eom_tol, detail=f"s8={signs.s8}"),
            CheckResult.compare(
                "interior_products", max(interiors), tol.eom_tol, detail=f"sigma_star={signs.sigma_star}"
            ),
            CheckResult.compare(
                "wedge_independence", max(independence), tol.eom_tol, detail=f"s_indep={signs.s_indep}"
            ),
            CheckResult.flag(
                "bridge_signs_constant", True,
                detail=f"{signs.samples} samples: " + ", ".join(f"{k}={v}" for k, v in sorted(signs.as_dict().items())),
            ),
        ])

    # Frobenius curvature

    def suite_frobenius(self, rng: np.random.Generator) -> SuiteReport:
        tol = self.tol
        integrable, curvature = [], []
        for fp, pts in self._sweep(rng):
            forms = integrability_4forms(fp, pts)
            eps_R = fp.epsilon * curvature_R(fp, pts).R
            integrable.append(_worst(forms.integrable_residual / forms.scale))
            curvature.append(_worst(
                (forms.dA_A_zeta - eps_R) / forms.scale,
                (forms.dAstar_Astar_zeta - eps_R) / forms.scale,
            ))

        sol = build_solution(self.config)
        pts = support_points(self.config, rng, self.run.sweep.solution_points)
        forms = integrability_4forms(sol.pair, pts)
        curv = curvature_R(sol.pair, pts, tol.phase_floor)
        eps = self.config.epsilon
        sol_R = _worst(curv.R - curv.phi2 * sol.expected_lie_psi)
        sol_forms = _worst(
            forms.integrable_residual / forms.scale,
            (forms.dA_A_zeta - eps * curv.R) / forms.scale,
            (forms.dAstar_Astar_zeta - eps * curv.R) / forms.scale,
        )
        rotating = np.abs(curv.R) > 0.0
        turning = np.abs(np.nan_to_num(curv.lie_psi)) > 0.0
        equivalence = bool(np.array_equal(rotating[curv.defined], turning[curv.defined]))

        plane = curvature_R(_plane_wave_pair(eps), pts)
        plane_forms = integrability_4forms(_plane_wave_pair(eps), pts)

        return SuiteReport(name="frobenius", checks=[
            CheckResult.compare("A_Astar_integrable", max(integrable), tol.algebraic_tol),
            CheckResult.compare("dA_A_zeta_equals_eps_R", max(curvature), tol.eom_tol),
            CheckResult.compare("solution_R_equals_phi2_kappa_over_l0", sol_R, tol.eom_tol),
            CheckResult.compare("solution_4forms", sol_forms, tol.eom_tol),
            CheckResult.compare("curvature_phase_consistency", curv.consistency_residual(), tol.eom_tol),
            CheckResult.flag("nonintegrability_iff_rotation", equivalence),
            CheckResult.compare(
                "plane_wave_integrable",
                _worst(plane.R, plane_forms.dA_A_zeta, plane_forms.dAstar_Astar_zeta), tol.eom_tol,
            ),
        ])

    # solution family

    def variant_configs(self) -> List[PhLOConfig]:
        """The four (eps, kappa) sign choices plus a longer l0 and the other amplitude kind."""
        base = self.config
        other = (
            AmplitudeKind.TRUNCATED_GAUSSIAN
            if base.amplitude.kind == AmplitudeKind.PRODUCT_MOLLIFIER
            else AmplitudeKind.PRODUCT_MOLLIFIER
        )
        variants = [
            base.model_copy(update={"epsilon": e, "kappa": k}) for e in (1, -1) for k in (1, -1)
        ]
        variants.append(base.model_copy(update={"l0": 2.5}))
        variants.append(base.model_copy(update={"amplitude": base.amplitude.model_copy(update={"kind": other})}))
        return variants

    def suite_solutions(self, rng: np.random.Generator) -> SuiteReport:
        tol = self.tol
        checks = []
        for i, cfg in enumerate(self.variant_configs()):
            sol = build_solution(cfg)
            pts = support_points(cfg, rng, self.run.sweep.solution_points)
            eom = eom_residuals(sol, pts)
            nonlinear = nonlinear_equation_check(sol.pair, pts)
            inside = support_geometry(cfg, pts)
            label = f"eps={cfg.epsilon} kappa={cfg.kappa} l0={cfg.l0} kind={cfg.amplitude.kind.value}"
            checks.append(CheckResult.compare(f"eom_lie_phi2[{i}]", eom.lie_phi2, tol.eom_tol, detail=label))
            checks.append(CheckResult.compare(f"eom_lie_psi[{i}]", eom.lie_psi, tol.eom_tol, detail=label))
            checks.append(CheckResult.compare(
                f"nonlinear_equations[{i}]", max(nonlinear.iF_dF, nonlinear.iS_dS, nonlinear.cross),
                tol.eom_tol, detail=label,
            ))
            checks.append(CheckResult.flag(
                f"non_maxwell_witness[{i}]", nonlinear.max_dF > 0.0, detail=f"max|dF|={nonlinear.max_dF!r}"
            ))
            phi2 = sol.pair.u.eval(pts) ** 2 + sol.pair.p.eval(pts) ** 2
            checks.append(CheckResult.flag(f"support_contains_field[{i}]", bool(np.all(inside[phi2 > 0.0]))))

        sol = build_solution(self.config)
        action = action_integral(sol)
        ratio_error = abs(action.ratio - action.expected_ratio) if action.ratio is not None else float("inf")
        checks.append(CheckResult.compare(
            "action_equals_eps_kappa_E_T", ratio_error, tol.quadrature_rel_tol,
            detail=f"ratio={action.ratio!r} richardson={action.action_error!r}",
        ))
        checks.append(CheckResult.compare("action_star_agrees", action.star_agreement, tol.eom_tol))

        # both slices on one box, so the field meets different nodes
        xi1 = 0.37 * self.config.l0
        shared = covering_grid(self.config, [0.0, xi1])
        e0 = energy_integral(sol, 0.0, shared)
        e1 = energy_integral(sol, xi1, shared)
        allowance = max(2.0 * max(e0.richardson_error, e1.richardson_error), 1e-12 * abs(e0.value))
        checks.append(CheckResult.compare(
            "energy_xi_invariance", abs(e0.value - e1.value), allowance, detail=f"E={e0.value!r}"
        ))
        momentum = integral_momentum(sol)
        null_momentum = abs(momentum.square) / e0.value**2 if e0.value > 0 else 0.0
        checks.append(CheckResult.compare("integral_momentum_null", null_momentum, tol.quadrature_rel_tol))
        return SuiteReport(name="solutions", checks=checks)
