import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from phlo.core.errors import ConfigError, CoverageError
from phlo.forms.fields import FieldPair, Polynomial, Trigonometric, fd_jet
from phlo.models.schemas import AmplitudeKind, AmplitudeSpec, GridSpec, PhLOConfig
from phlo.physics.solutions import (
    GAUSSIAN_SAMPLE_WIDTHS,
    HelicalAmplitude,
    SolutionField,
    action_integral,
    build_solution,
    covering_grid,
    energy_integral,
    eom_residuals,
    frequency,
    integral_momentum,
    nonlinear_equation_check,
    period,
    support_box,
    support_geometry,
    support_points,
)

SIGNS = [(1, 1), (1, -1), (-1, 1), (-1, -1)]


def quick(**kwargs) -> PhLOConfig:
    return PhLOConfig(grid=GridSpec(counts=(17, 17, 17), xi_counts=5), **kwargs)


def gaussian(**kwargs) -> AmplitudeSpec:
    return AmplitudeSpec(kind=AmplitudeKind.TRUNCATED_GAUSSIAN, **kwargs)


class TestSolutionField:
    def test_amplitude_and_phase(self, default_config):
        """u squared plus p squared is the amplitude squared."""
        sol = build_solution(default_config)
        pts = np.array([[0.1, 0.3], [0.2, -0.1], [0.5, 1.0], [0.0, 0.4]])
        u, p = sol.pair.u.eval(pts), sol.pair.p.eval(pts)
        assert_allclose(u**2 + p**2, sol.amplitude.eval(pts) ** 2, atol=1e-15)
        assert_allclose(np.arctan2(p, u), -pts[2], atol=1e-14)

    def test_expected_lie_psi(self):
        """The expected phase derivative follows kappa and l0."""
        assert build_solution(PhLOConfig(kappa=-1, l0=4.0)).expected_lie_psi == -0.25

    def test_peak_amplitude(self):
        """The amplitude peaks at the centre."""
        cfg = PhLOConfig(amplitude=AmplitudeSpec(phi0=2.5))
        assert_allclose(build_solution(cfg).amplitude.eval(np.zeros(4)), 2.5)

    def test_helical_amplitude_jet(self, rng):
        """Amplitude jet matches finite differences."""
        spec = AmplitudeSpec(helix_radius=0.2, s_center=0.3)
        for kind in AmplitudeKind:
            amp = HelicalAmplitude(spec.model_copy(update={"kind": kind}), -1, 1, 1.5)
            pts = rng.uniform(-0.25, 0.25, size=(4, 20))
            assert_allclose(amp.jet(pts).grad, fd_jet(amp.eval, pts, 1e-3).grad, atol=1e-6)

    def test_amplitude_is_a_plane_wave_profile(self, rng):
        """The amplitude has zero frame derivative."""
        amp = HelicalAmplitude(AmplitudeSpec(helix_radius=0.2), 1, -1, 1.0)
        grad = amp.jet(rng.uniform(-0.5, 0.5, size=(4, 20))).grad
        assert_allclose(grad[3] - grad[2], 0.0, atol=1e-15)

    def test_period_and_frequency(self):
        """Period and frequency follow from l0 and c."""
        cfg = PhLOConfig(l0=2.0, c_light=0.5)
        assert_allclose(period(cfg), 8.0 * math.pi)
        assert_allclose(frequency(cfg), 1.0 / (8.0 * math.pi))


class TestSupport:
    def test_default_box(self, default_config):
        """Default support box at the zero slice."""
        box = support_box(default_config, 0.0)
        assert_allclose(box, [(-1.0, 1.0), (-1.0, 1.0), (-math.pi, math.pi)])

    def test_box_follows_the_slice(self):
        """The box moves with the slice."""
        cfg = PhLOConfig(epsilon=-1)
        (_, _, (lo, hi)) = support_box(cfg, 1.0)
        assert_allclose((lo, hi), (1.0 - math.pi, 1.0 + math.pi))

    def test_gaussian_box_uses_cutoff(self):
        """The gaussian box spans the cutoff."""
        cfg = PhLOConfig(amplitude=AmplitudeSpec(kind=AmplitudeKind.TRUNCATED_GAUSSIAN, r0=0.5, gaussian_cutoff=4.0))
        assert_allclose(support_box(cfg, 0.0)[0], (-2.0, 2.0))

    def test_geometry(self, default_config):
        """Support geometry flags points inside the box."""
        pts = np.array([[0.0, 1.5, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 4.0], [0.0, 0.0, 0.0]])
        assert support_geometry(default_config, pts).tolist() == [True, False, False]

    def test_points_lie_in_support(self, rng):
        """Sampled points fall inside the support."""
        cfg = PhLOConfig(epsilon=-1, amplitude=AmplitudeSpec(helix_radius=0.5))
        pts = support_points(cfg, rng, 200)
        assert pts.shape == (4, 200)
        assert np.all(support_geometry(cfg, pts))
        assert np.all((pts[3] >= 0.0) & (pts[3] <= cfg.l0))

    def test_gaussian_is_cut_at_the_box(self):
        """The gaussian is zero past the cutoff."""
        cfg = PhLOConfig(amplitude=gaussian())
        amp = build_solution(cfg).amplitude
        outside = np.array([6.5, 0.0, 0.0, 0.0])
        inside = np.array([5.9, 0.0, 0.0, 0.0])
        assert amp.eval(outside) == 0.0
        assert not support_geometry(cfg, outside)
        assert amp.eval(inside) > 0.0
        assert support_geometry(cfg, inside)

    def test_gaussian_jet_vanishes_past_cutoff(self):
        """The gaussian jet is zero past the cutoff."""
        cfg = PhLOConfig(amplitude=gaussian(gaussian_cutoff=2.0))
        jet = build_solution(cfg).amplitude.jet(np.array([0.0, 0.0, 7.0, 0.0]))
        assert jet.value == 0.0
        assert not np.any(jet.grad)

    @pytest.mark.parametrize("kind", list(AmplitudeKind))
    def test_field_lives_inside_support(self, kind, rng):
        """Both amplitude kinds vanish outside the box."""
        cfg = PhLOConfig(epsilon=-1, amplitude=AmplitudeSpec(kind=kind, helix_radius=0.4, gaussian_cutoff=2.5))
        box = np.array([[-4.0], [-4.0], [-10.0], [0.0]])
        pts = rng.uniform(-1.0, 1.0, size=(4, 4000)) * np.abs(box) + np.array([[0.0], [0.0], [0.0], [0.5]])
        sol = build_solution(cfg)
        phi2 = sol.pair.u.eval(pts) ** 2 + sol.pair.p.eval(pts) ** 2
        assert np.any(phi2 > 0.0)
        assert np.any(phi2 == 0.0)
        assert np.all(support_geometry(cfg, pts)[phi2 > 0.0])

    def test_gaussian_points_stay_in_the_core(self, rng):
        """Gaussian samples stay within three widths."""
        cfg = PhLOConfig(amplitude=gaussian(r0=0.5, s0=1.0))
        pts = support_points(cfg, rng, 300)
        assert np.all(np.hypot(pts[0], pts[1]) <= GAUSSIAN_SAMPLE_WIDTHS * 0.5 + 1e-12)
        assert np.all(np.abs(pts[3] + pts[2]) <= GAUSSIAN_SAMPLE_WIDTHS * 1.0 + 1e-12)

    def test_gaussian_points_respect_a_small_cutoff(self, rng):
        """A cutoff under three widths bounds the samples."""
        cfg = PhLOConfig(amplitude=gaussian(gaussian_cutoff=1.5))
        pts = support_points(cfg, rng, 300)
        assert np.all(support_geometry(cfg, pts))


class TestEquationsOfMotion:
    @pytest.mark.parametrize("eps,kappa", SIGNS)
    def test_residuals_vanish(self, eps, kappa, rng):
        """Solutions have zero equation residuals."""
        cfg = PhLOConfig(epsilon=eps, kappa=kappa, l0=0.7, amplitude=AmplitudeSpec(helix_radius=0.3))
        res = eom_residuals(build_solution(cfg), support_points(cfg, rng, 200))
        assert res.lie_phi2 < 1e-12
        assert res.lie_psi < 1e-10
        assert res.phase_points > 0

    def test_nonlinear_equations_hold(self, default_config, rng):
        """The nonlinear equations hold on solutions."""
        sol = build_solution(default_config)
        check = nonlinear_equation_check(sol.pair, support_points(default_config, rng, 100))
        assert check.iF_dF < 1e-12
        assert check.iS_dS < 1e-12
        assert check.cross < 1e-12
        assert check.max_dF > 0.1

    def test_linear_pair_is_not_a_solution(self, linear_pair):
        """The linear pair fails the nonlinear check."""
        check = nonlinear_equation_check(linear_pair, np.array([0.0, 0.0, 1.0, 2.0]))
        assert_allclose(check.iF_dF, 1.0)

    def test_unit_helix(self, unit_helix, rng):
        """The unit helix satisfies the equations."""
        res = eom_residuals(unit_helix, rng.uniform(-1.0, 1.0, size=(4, 20)))
        assert res.lie_phi2 < 1e-14
        assert res.lie_psi < 1e-14
        assert res.phase_points == 20

    def test_zero_field(self):
        """A zero field has zero residuals."""
        sol = build_solution(quick(amplitude=AmplitudeSpec(phi0=0.0)))
        pts = np.array([[0.0, 0.3], [0.0, -0.2], [0.5, 1.0], [0.0, 0.4]])
        res = eom_residuals(sol, pts)
        assert (res.lie_phi2, res.lie_psi, res.phase_points) == (0.0, 0.0, 0)
        check = nonlinear_equation_check(sol.pair, pts)
        assert (check.iF_dF, check.iS_dS, check.cross, check.max_dF) == (0.0, 0.0, 0.0, 0.0)

    @pytest.mark.parametrize("eps", [1, -1])
    def test_maxwell_plane_wave(self, eps, rng):
        """A Maxwell plane wave has zero residuals."""
        k = [0.0, 0.0, eps * 1.5, 1.5]
        fp = FieldPair(Trigonometric(1.0, k, 0.2, kind="cos"), Trigonometric(1.0, k, 0.2, kind="sin"), eps)
        check = nonlinear_equation_check(fp, rng.uniform(-2.0, 2.0, size=(4, 30)))
        assert check.max_dF < 1e-14
        assert check.iF_dF < 1e-14
        assert check.iS_dS < 1e-14
        assert check.cross < 1e-14

    def test_linear_pair_residuals(self, linear_pair):
        """Residuals of u = xi, p = z."""
        sol = SolutionField(
            config=PhLOConfig(), amplitude=Polynomial.constant(1.0), phase=Polynomial.constant(0.0), pair=linear_pair
        )
        res = eom_residuals(sol, np.array([[0.0], [0.0], [1.0], [2.0]]))
        assert_allclose(res.lie_phi2, 2.0)
        assert_allclose(res.lie_psi, 1.6)
        assert res.phase_points == 1
        check = nonlinear_equation_check(linear_pair, np.array([[0.0], [0.0], [1.0], [2.0]]))
        assert check.max_dF > 0.0


class TestIntegrals:
    def test_energy_is_positive(self, small_config):
        """Energy is positive for a non-zero field."""
        energy = energy_integral(build_solution(small_config))
        assert energy.value > 0.0
        assert energy.richardson_error < 5e-2 * energy.value

    def test_energy_scales_with_amplitude_squared(self):
        """Energy scales with the amplitude squared."""
        base = energy_integral(build_solution(quick())).value
        double = energy_integral(build_solution(quick(amplitude=AmplitudeSpec(phi0=2.0)))).value
        assert_allclose(double, 4.0 * base, rtol=1e-12)

    def test_energy_is_direction_independent(self):
        """Energy does not depend on epsilon."""
        forward = energy_integral(build_solution(quick(epsilon=1))).value
        backward = energy_integral(build_solution(quick(epsilon=-1))).value
        assert_allclose(forward, backward, rtol=1e-12)

    def test_energy_is_conserved_across_slices(self, small_config):
        """Energy agrees between slices on a shared grid."""
        sol = build_solution(small_config)
        shared = covering_grid(small_config, [0.0, 0.7])
        first = energy_integral(sol, 0.0, shared)
        second = energy_integral(sol, 0.7, shared)
        assert first.value != second.value
        allowance = 2.0 * max(first.richardson_error, second.richardson_error)
        assert abs(first.value - second.value) <= allowance

    def test_covering_grid_spans_every_slice(self, default_config):
        """The covering grid holds every slice's box."""
        grid = covering_grid(default_config, [0.0, 0.5, -1.0])
        assert grid.counts == default_config.grid.counts
        assert_allclose(grid.extents[0], (-1.0, 1.0))
        assert_allclose(grid.extents[2], (-math.pi - 0.5, math.pi + 1.0))

    def test_covering_grid_keeps_explicit_extents(self):
        """Configured extents are kept when they cover."""
        extents = ((-2.0, 2.0), (-2.0, 2.0), (-5.0, 5.0))
        cfg = PhLOConfig(grid=GridSpec(extents=extents))
        assert covering_grid(cfg, [0.0, 1.0]).extents == extents
        with pytest.raises(CoverageError):
            covering_grid(cfg, [0.0, 3.0])

    def test_given_grid_must_cover_the_slice(self, small_config):
        """A grid missing the slice raises CoverageError."""
        sol = build_solution(small_config)
        with pytest.raises(CoverageError):
            energy_integral(sol, 2.0, covering_grid(small_config, [0.0]))

    def test_momentum_is_null(self, small_config):
        """Momentum is null."""
        sol = build_solution(small_config)
        E = energy_integral(sol).value
        mom = integral_momentum(sol)
        assert_allclose(mom.P[:2], 0.0, atol=1e-12)
        assert_allclose(mom.P[2], small_config.epsilon * E, rtol=1e-12)
        assert_allclose(mom.P[3], E, rtol=1e-12)
        assert abs(mom.square) < 1e-10 * E**2

    @pytest.mark.parametrize("eps,kappa", SIGNS)
    def test_action_ratio(self, eps, kappa):
        """S over E T equals epsilon kappa."""
        result = action_integral(build_solution(quick(epsilon=eps, kappa=kappa, l0=1.3)))
        assert result.expected_ratio == eps * kappa
        assert result.ratio is not None
        assert abs(result.ratio - eps * kappa) < 1e-8
        assert result.star_agreement < 1e-10
        assert_allclose(result.period, 2.0 * math.pi * 1.3)

    @pytest.mark.parametrize("phase_const", [0.0, 0.7, 2.1])
    @pytest.mark.parametrize("xi0", [0.0, 0.3, -1.1])
    def test_action_ignores_phase_and_start(self, phase_const, xi0):
        """The ratio does not depend on phase or start."""
        result = action_integral(build_solution(quick(epsilon=-1, phase_const=phase_const)), xi0)
        assert result.expected_ratio == -1
        assert result.ratio is not None
        assert abs(result.ratio + 1.0) < 1e-8

    def test_gaussian_energy_converges_at_fourth_order(self):
        """Gaussian energy converges at fourth order."""
        def energy(n: int) -> float:
            cfg = PhLOConfig(amplitude=gaussian(), grid=GridSpec(counts=(n, n, n), xi_counts=5))
            return energy_integral(build_solution(cfg)).value

        reference = energy(65)
        coarse = abs(energy(17) - reference)
        fine = abs(energy(33) - reference)
        assert coarse > 0.0
        assert fine * 16.0 <= coarse
        assert fine < 1e-3 * reference

    def test_action_of_zero_amplitude(self):
        """Zero amplitude gives zero action and no ratio."""
        result = action_integral(build_solution(quick(amplitude=AmplitudeSpec(phi0=0.0))))
        assert result.action == 0.0
        assert result.ratio is None
        assert result.star_agreement == 0.0

    def test_grid_must_cover_support(self):
        """Extents missing the support raise CoverageError."""
        cfg = PhLOConfig(grid=GridSpec(counts=(9, 9, 9), extents=((-0.5, 0.5), (-1.0, 1.0), (-4.0, 4.0))))
        with pytest.raises(CoverageError):
            energy_integral(build_solution(cfg))

    def test_explicit_extents_covering_support(self):
        """Covering extents give the fitted result."""
        extents = ((-1.0, 1.0), (-1.0, 1.0), (-math.pi, math.pi))
        fitted = energy_integral(build_solution(quick())).value
        cfg = PhLOConfig(grid=GridSpec(counts=(17, 17, 17), xi_counts=5, extents=extents))
        explicit = energy_integral(build_solution(cfg)).value
        assert_allclose(explicit, fitted, rtol=1e-12)

    def test_spatial_integrals_need_three_axes(self):
        """Spatial integrals need three counts."""
        cfg = PhLOConfig(grid=GridSpec(counts=(5, 5)))
        with pytest.raises(ConfigError):
            energy_integral(build_solution(cfg))
