import csv
import io

import numpy as np
import pytest
from numpy.testing import assert_allclose

from phlo.core.config import settings
from phlo.models.schemas import SUITE_NAMES, AmplitudeSpec, GridSpec, PhLOConfig, RunConfig
from phlo.services.energy_service import EnergyService
from phlo.services.sampling_service import SAMPLE_HEADER, SamplingService, parse_grid
from phlo.services.verification_service import VerificationService


def failures(report) -> list:
    return [f"{name}:{c.name}" for name, s in report.sections.items() for c in s.checks if not c.passed]


class TestVerificationService:
    def test_full_run_passes(self, small_run):
        """Every suite passes and all bridge signs are -1."""
        report = VerificationService(small_run).run_suites()
        assert sorted(report.sections) == sorted(SUITE_NAMES)
        assert report.passed, failures(report)
        assert report.bridge_signs == {"s46": -1, "s8": -1, "sigma_star": -1, "s_indep": -1}

    def test_suite_selection(self, small_run):
        """Only the requested suites run."""
        report = VerificationService(small_run).run_suites(["strain", "frame"])
        assert list(report.sections) == ["frame", "strain"]
        assert all(section.checks for section in report.sections.values())

    def test_configured_suites(self, small_config, small_sweep):
        """Suites from the config are honoured."""
        run = RunConfig(phlo=small_config, sweep=small_sweep, suites=["eq1"], seed=3)
        assert list(VerificationService(run).run_suites().sections) == ["eq1"]

    def test_same_seed_same_report(self, small_run):
        """One seed gives one report."""
        first = VerificationService(small_run, config_sha256="00" * 32).run_suites(["exterior", "frobenius"])
        second = VerificationService(small_run, config_sha256="00" * 32).run_suites(["exterior", "frobenius"])
        assert first.to_json() == second.to_json()

    def test_seed_precedence(self, small_run):
        """Explicit seed beats config seed beats default."""
        assert VerificationService(small_run).seed == 1234
        assert VerificationService(small_run, seed=9).seed == 9
        assert VerificationService(RunConfig()).seed == settings.DEFAULT_SEED

    def test_suites_use_independent_streams(self, small_run):
        """Each suite draws from its own random stream."""
        service = VerificationService(small_run)
        assert service.rng(0).uniform() != service.rng(1).uniform()
        assert service.rng(2).uniform() == VerificationService(small_run).rng(2).uniform()

    def test_variant_configs(self, small_run):
        """Variants cover all four sign pairs and both amplitude kinds."""
        variants = VerificationService(small_run).variant_configs()
        signs = {(cfg.epsilon, cfg.kappa) for cfg in variants}
        assert signs == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
        assert len({cfg.amplitude.kind for cfg in variants}) == 2


class TestEnergyService:
    def test_compute(self, small_config):
        """The default config passes with positive energy."""
        report = EnergyService(small_config).compute()
        assert report.passed
        assert report.energy > 0.0
        assert report.expected_ratio == 1
        assert report.ratio == pytest.approx(1.0, abs=1e-8)
        assert report.period == pytest.approx(2.0 * np.pi)
        assert abs(report.momentum_square) < 1e-10 * report.energy**2

    def test_negative_orientation(self, small_config):
        """Negative kappa flips the ratio sign."""
        cfg = small_config.model_copy(update={"kappa": -1})
        report = EnergyService(cfg).compute(xi0=0.25)
        assert report.expected_ratio == -1
        assert report.ratio == pytest.approx(-1.0, abs=1e-8)
        assert report.passed

    def test_zero_amplitude(self):
        """Zero amplitude gives zero energy and no ratio."""
        cfg = PhLOConfig(amplitude=AmplitudeSpec(phi0=0.0), grid=GridSpec(counts=(9, 9, 9), xi_counts=5))
        report = EnergyService(cfg).compute()
        assert report.ratio is None
        assert report.momentum_square is None
        assert not report.passed
        assert "ratio = undefined" in report.to_text()


class TestParseGrid:
    def test_valid(self):
        """Grid strings parse to three counts."""
        assert parse_grid("3,4,5") == (3, 4, 5)

    @pytest.mark.parametrize("text", ["3,4", "a,b,c", "3,0,3", "", "1,2,3,4"])
    def test_invalid(self, text):
        """Malformed grid strings raise ValueError."""
        with pytest.raises(ValueError):
            parse_grid(text)


class TestSamplingService:
    def test_row_order(self, default_config):
        """x varies fastest along the rows."""
        pts = SamplingService(default_config).grid_points((3, 3, 3), 0.0)
        assert pts.shape == (4, 27)
        assert_allclose(pts[:, 0], [-1.0, -1.0, -np.pi, 0.0])
        assert_allclose(pts[:, 1], [0.0, -1.0, -np.pi, 0.0])
        assert_allclose(pts[:, 3], [-1.0, 0.0, -np.pi, 0.0])
        assert np.all(pts[2, :9] == pts[2, 0])

    def test_single_count_uses_midpoint(self, default_config):
        """A count of one samples the axis midpoint."""
        pts = SamplingService(default_config).grid_points((1, 1, 1), 0.0)
        assert_allclose(pts[:, 0], [0.0, 0.0, 0.0, 0.0], atol=1e-15)

    def test_explicit_extents(self):
        """Configured extents bound the samples."""
        cfg = PhLOConfig(grid=GridSpec(extents=((0.0, 2.0), (0.0, 1.0), (-1.0, 1.0))))
        pts = SamplingService(cfg).grid_points((3, 2, 1), 0.5)
        assert_allclose(pts[0, :3], [0.0, 1.0, 2.0])
        assert_allclose(pts[1, :6], [0.0, 0.0, 0.0, 1.0, 1.0, 1.0])
        assert np.all(pts[3] == 0.5)

    def test_sample_at_centre(self, default_config):
        """Centre sample carries the peak amplitude."""
        row = SamplingService(default_config).sample((1, 1, 1), 0.0)[0]
        assert_allclose(row, [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0], atol=1e-14)

    def test_psi_is_nan_outside_support(self, default_config):
        """psi is NaN where the field vanishes."""
        samples = SamplingService(default_config).sample((3, 3, 3), 0.0)
        corner = samples[0]
        assert corner[6] == 0.0
        assert np.isnan(corner[7])

    def test_write_csv(self, default_config):
        """CSV has a header and one row per point."""
        stream = io.StringIO()
        rows = SamplingService(default_config).write_csv(stream, (3, 3, 3), 0.0)
        assert rows == 27
        lines = stream.getvalue().splitlines()
        assert len(lines) == 28
        parsed = list(csv.reader(lines))
        assert tuple(parsed[0]) == SAMPLE_HEADER
        assert all(len(row) == len(SAMPLE_HEADER) for row in parsed[1:])
        assert float(parsed[1][2]) == -np.pi

    def test_write_file(self, default_config, tmp_path):
        """CSV is written to a path."""
        path = tmp_path / "samples.csv"
        assert SamplingService(default_config).write_file(path, (3, 1, 1), 0.0) == 3
        assert path.read_text(encoding="utf-8").count("\n") == 4
