import numpy as np
import pytest
from numpy.testing import assert_allclose

from phlo.core.errors import InvariantViolation
from phlo.forms.exterior import raise_index
from phlo.forms.fields import FieldPair, PlaneWaveProfile, Polynomial, build_frame_jets, zeta, zeta_bar
from phlo.physics.strain import (
    VectorField,
    VectorJet,
    compare_Dstar,
    contract_relations,
    lie_bracket,
    lie_metric,
    lie_metric_flow_oracle,
    measure_bridge_signs,
    printed_D_reference,
    raise_form_jet,
    strain_D,
    strain_Dstar,
    strain_flux_forms,
    wedge_independence,
)
from phlo.physics.strain import _freeze

ANCHOR = np.array([0.0, 0.0, 1.0, 2.0])


def stretch_x() -> VectorField:
    """X = (x, 0, 0, 0)."""
    zero = Polynomial.constant(0.0)
    return VectorField([Polynomial.coordinate(0), zero, zero, zero])


class TestLieMetric:
    """L_X eta from jets and from the flow."""

    def test_zeta_bar_is_isometry(self):
        """The null frame vector is a Killing field."""
        for eps in (1, -1):
            assert not np.any(lie_metric(VectorJet.constant(zeta_bar(eps))).cov)

    def test_stretch(self):
        """Lie derivative of the metric along a stretch."""
        pt = np.array([0.7, 0.1, 0.0, 0.0])
        expected = np.zeros((4, 4))
        expected[0, 0] = -2.0
        assert_allclose(lie_metric(stretch_x().jet(pt)).cov, expected)

    def test_constant_field(self):
        """A constant field has zero strain."""
        X = VectorField.constant([0.3, -1.0, 2.0, 0.5])
        assert not np.any(lie_metric(X.jet(np.zeros(4))).cov)

    def test_flow_oracle_stretch(self):
        """The flow oracle matches the stretch strain."""
        cov = lie_metric_flow_oracle(stretch_x(), np.array([1.0, 0.0, 0.0, 0.0]), t_step=1e-3).cov
        assert_allclose(cov[0, 0], -2.0, atol=1e-5)
        cov[0, 0] = 0.0
        assert_allclose(cov, 0.0, atol=1e-8)

    def test_flow_oracle_null_translation(self):
        """The flow oracle gives zero along the null vector."""
        X = VectorField.constant(zeta_bar(1))
        assert_allclose(lie_metric_flow_oracle(X, np.array([0.2, -0.3, 0.4, 0.1])).cov, 0.0, atol=1e-8)

    def test_flow_oracle_matches_jets(self, linear_pair, rng):
        """Flow and jet strains agree on random fields."""
        zero = Polynomial.constant(0.0)
        A_bar = VectorField([Polynomial.coordinate(3, -1.0), Polynomial.coordinate(2, -1.0), zero, zero])
        pts = rng.uniform(-0.5, 0.5, size=(4, 5))
        jets = raise_form_jet(build_frame_jets(linear_pair, pts).A)
        assert_allclose(lie_metric_flow_oracle(A_bar, pts).cov, lie_metric(jets).cov, atol=1e-5)

    def test_flow_step_must_be_positive(self):
        """A non-positive flow step is rejected."""
        with pytest.raises(ValueError):
            lie_metric_flow_oracle(stretch_x(), np.zeros(4), t_step=0.0)

    def test_random_fields_symmetric(self, rng):
        """Strain is symmetric."""
        X = VectorField.random_polynomial(rng)
        assert lie_metric(X.jet(rng.uniform(-1.0, 1.0, size=(4, 10)))).is_symmetric()


class TestStrainMatrices:
    """D = L_{A_bar} eta and D* = L_{A*_bar} eta."""

    def test_linear_pair(self, linear_pair):
        """D and D* of the linear pair."""
        D = strain_D(linear_pair, ANCHOR).cov
        expected = np.zeros((4, 4))
        expected[0, 3] = expected[3, 0] = expected[1, 2] = expected[2, 1] = 1.0
        assert_allclose(D, expected)

    def test_gradient_pair(self):
        """Strain of a gradient pair."""
        fp = FieldPair(Polynomial.coordinate(0), Polynomial.coordinate(1), 1)
        assert_allclose(strain_D(fp, np.zeros(4)).cov, np.diag([2.0, 2.0, 0.0, 0.0]))

    def test_constant_pair(self):
        """A constant pair has zero strain."""
        fp = FieldPair(Polynomial.constant(0.4), Polynomial.constant(1.2), -1)
        assert not np.any(strain_D(fp, np.zeros(4)).cov)
        assert not np.any(strain_Dstar(fp, np.zeros(4)).cov)

    def test_D_matches_printed_matrix(self, random_pair, rng):
        """D agrees with the printed matrix."""
        pts = rng.uniform(-1.0, 1.0, size=(4, 20))
        assert_allclose(strain_D(random_pair, pts).cov, printed_D_reference(random_pair, pts), atol=1e-12)

    def test_Dstar_is_minus_printed_away_from_entry_12(self, random_pair, rng):
        """D* is minus the printed matrix off entry (1,2)."""
        cmp = compare_Dstar(random_pair, rng.uniform(-1.0, 1.0, size=(4, 20)))
        assert cmp.sign == -1
        assert cmp.residual < 1e-12

    def test_entry_12(self, linear_pair):
        """Entry (1,2) of D* is compared on its own."""
        # p_y = u_x = 0: both readings vanish
        assert compare_Dstar(linear_pair, ANCHOR).entry_12_matches
        fp = FieldPair(Polynomial.coordinate(0), Polynomial.constant(0.0), 1)
        cmp = compare_Dstar(fp, np.zeros(4))
        assert_allclose(cmp.entry_12_computed, -1.0)
        assert_allclose(cmp.entry_12_printed, -1.0)
        assert not cmp.entry_12_matches


class TestBrackets:
    """Lie brackets against the strain 1-forms."""

    def test_self_bracket(self):
        """A field brackets to zero with itself."""
        zb = VectorJet.constant(zeta_bar(1))
        assert not np.any(lie_bracket(zb, zb))

    def test_linear_pair(self, linear_pair):
        """Lie brackets of the linear pair."""
        jets = build_frame_jets(linear_pair, ANCHOR)
        bracket = lie_bracket(raise_form_jet(jets.A), VectorJet.constant(zeta_bar(1)))
        assert_allclose(bracket, [1.0, -1.0, 0.0, 0.0])
        D_zeta = strain_flux_forms(linear_pair, ANCHOR).D_zeta
        assert_allclose(raise_index(D_zeta), [-1.0, 1.0, 0.0, 0.0])

    def test_strain_is_minus_bracket(self, random_pair, rng):
        """The strain contraction equals minus the bracket."""
        pts = rng.uniform(-1.0, 1.0, size=(4, 20))
        jets = build_frame_jets(random_pair, pts)
        zb = VectorJet.constant(zeta_bar(random_pair.epsilon), (20,))
        fluxes = strain_flux_forms(random_pair, pts)
        assert_allclose(raise_index(fluxes.D_zeta), -lie_bracket(raise_form_jet(jets.A), zb), atol=1e-12)
        assert_allclose(raise_index(fluxes.Dstar_zeta), -lie_bracket(raise_form_jet(jets.Astar), zb), atol=1e-12)


class TestContractions:
    """D and D* contracted with zeta_bar."""

    def test_linear_pair_at_anchor(self, linear_pair):
        """Contractions of the linear pair at the anchor."""
        rel = contract_relations(linear_pair, ANCHOR)
        assert_allclose(rel.lie_phi2, 2.0)
        assert_allclose(rel.D_A_zeta, -1.0)
        assert_allclose(rel.R, -3.0)
        assert_allclose(rel.D_Astar_zeta, -3.0)
        assert_allclose(rel.Dstar_A_zeta, 3.0)

    def test_constant_pair(self):
        """Contractions vanish on a constant pair."""
        rel = contract_relations(FieldPair(Polynomial.constant(1.0), Polynomial.constant(2.0), 1), np.zeros(4))
        for value in (rel.D_A_zeta, rel.Dstar_Astar_zeta, rel.D_Astar_zeta, rel.Dstar_A_zeta):
            assert value == 0.0

    def test_relations_on_random_pairs(self, random_pair, rng):
        """Contraction relations hold on random pairs."""
        rel = contract_relations(random_pair, rng.uniform(-1.0, 1.0, size=(4, 30)))
        half = 0.5 * rel.lie_phi2
        assert_allclose(rel.D_zeta_zeta, 0.0, atol=1e-12)
        assert_allclose(rel.Dstar_zeta_zeta, 0.0, atol=1e-12)
        assert_allclose(rel.D_A_zeta, -half, atol=1e-10)
        assert_allclose(rel.Dstar_Astar_zeta, -half, atol=1e-10)
        assert_allclose(rel.D_Astar_zeta, -rel.Dstar_A_zeta, atol=1e-12)
        assert_allclose(rel.D_Astar_zeta, rel.epsilon * rel.R, atol=1e-10)


class TestFluxes:
    """Strain fluxes and interior products."""

    def test_unit_helix(self, unit_helix):
        """Flux values on the unit helix."""
        fluxes = strain_flux_forms(unit_helix.pair, np.zeros(4))
        assert_allclose(fluxes.R, 1.0)
        assert fluxes.D_A.is_close(-zeta(1), 1e-12)
        assert fluxes.iF_dF.norm_inf() < 1e-12

    def test_unit_helix_wedge_independence(self, unit_helix):
        """Flux wedge independence on the unit helix."""
        out = wedge_independence(unit_helix.pair, np.zeros(4))
        assert_allclose(abs(out[(0, 1)]), 1.0)
        assert_allclose(np.delete(out.components, 0), 0.0, atol=1e-15)

    def test_linear_pair_wedge_independence(self, linear_pair):
        """Flux wedge independence on the linear pair."""
        assert_allclose(wedge_independence(linear_pair, ANCHOR)[(0, 1)], -2.0)

    def test_plane_wave_fluxes_vanish(self, rng):
        """Plane waves carry no flux."""
        profile = PlaneWaveProfile(1, 1.0, 1.5, 0.2, 0.9)
        fluxes = strain_flux_forms(FieldPair(profile, profile, 1), rng.uniform(-1.0, 1.0, size=(4, 10)))
        for form in (fluxes.D_A, fluxes.Dstar_Astar, fluxes.D_Astar, fluxes.Dstar_A):
            assert form.norm_inf() < 1e-14
        assert_allclose(fluxes.R, 0.0, atol=1e-14)

    def test_interior_products_on_random_pairs(self, random_pair, rng):
        """Interior product identities on random pairs."""
        fluxes = strain_flux_forms(random_pair, rng.uniform(-1.0, 1.0, size=(4, 20)))
        z = zeta(fluxes.epsilon)
        half = z * (0.5 * fluxes.lie_phi2)
        eps_R = z * (fluxes.epsilon * fluxes.R)
        assert fluxes.iF_dF.is_close(half, 1e-10)
        assert fluxes.iS_dS.is_close(half, 1e-10)
        assert fluxes.iS_dF.is_close(eps_R, 1e-10)
        assert fluxes.iF_dS.is_close(-eps_R, 1e-10)
        assert fluxes.D_A.is_close(-eps_R, 1e-10)
        assert fluxes.D_Astar.is_close(-half, 1e-10)


class TestBridgeSigns:
    """Signs measured over random samples."""

    def test_measured_signs(self, rng):
        """All bridge signs measure -1."""
        signs = measure_bridge_signs(rng, samples=200)
        assert signs.as_dict() == {"s46": -1, "s8": -1, "sigma_star": -1, "s_indep": -1}
        assert signs.samples == 200

    def test_non_constant_sign_rejected(self):
        """A sign that changes between samples raises."""
        with pytest.raises(InvariantViolation):
            _freeze("s8", {1, -1})
