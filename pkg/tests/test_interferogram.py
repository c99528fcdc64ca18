import math

import numpy as np
import pytest

from src.common.config import DEFAULTS
from src.common.errors import DegenerateImageError, InvalidParameterError
from src.interferogram.fitting import fit_interferogram, initial_guess, wrap_phase
from src.interferogram.profile import (
    CameraGrid,
    InterferogramParams,
    default_grid,
    default_params,
    density_profile,
    fringe_wavelength,
    pixel_integrated_profile,
)
from src.interferogram.sampling import CameraImage, bin_to_image, sample_atoms, synthesize_image

WAVELENGTH = fringe_wavelength(10e-3, 7.26, 1.44316060e-25)


def params(**changes):
    base = InterferogramParams(
        amplitude=1.0, z_com=0.0, sigma_z=12.0, visibility=0.8, wavelength=WAVELENGTH, z_ref=0.0, phase=1.0
    )
    return base.replace(**changes)


class TestProfile:
    def test_fringe_wavelength_for_rubidium(self):
        assert WAVELENGTH == pytest.approx(6.324, rel=1e-3)

    def test_fringe_wavelength_rejects_non_positive_inputs(self):
        with pytest.raises(InvalidParameterError):
            fringe_wavelength(0.0, 7.26, 1e-25)

    @pytest.mark.parametrize(
        "changes", [{"sigma_z": 0.0}, {"wavelength": -1.0}, {"visibility": 1.2}, {"amplitude": -1.0}]
    )
    def test_invalid_params(self, changes):
        with pytest.raises(InvalidParameterError):
            params(**changes)

    def test_profile_peaks_at_envelope_maximum(self):
        p = params(visibility=0.0, background=2.0)
        assert density_profile(p, 0.0) == pytest.approx(3.0)
        assert density_profile(p, 1e3) == pytest.approx(2.0)

    def test_vector_round_trip_keeps_values(self):
        p = params(background=0.5)
        assert InterferogramParams.from_vector(p.as_vector()) == p

    def test_pixel_average_matches_point_value_on_fine_pixels(self):
        p = params()
        grid = CameraGrid.centered(pixel_size=0.01, n_pixels=2000)
        np.testing.assert_allclose(pixel_integrated_profile(p, grid), density_profile(p, grid.centers), atol=1e-4)

    def test_pixel_average_integrates_exactly(self):
        p = params(visibility=0.0)
        grid = CameraGrid.centered(pixel_size=1.0, n_pixels=128)
        total = pixel_integrated_profile(p, grid).sum() * grid.pixel_size
        assert total == pytest.approx(12.0 * math.sqrt(2 * math.pi), rel=1e-6)

    def test_default_params_wrap_phase(self):
        p = default_params(DEFAULTS, 0.5, 3 * math.pi + 0.1)
        assert p.phase == pytest.approx(-math.pi + 0.1)
        assert p.wavelength == pytest.approx(WAVELENGTH)


class TestCameraGrid:
    def test_centered_grid(self):
        grid = CameraGrid.centered(1.0, 128)
        assert grid.span == 128.0
        assert grid.edges[0] == -64.0
        assert grid.edges[-1] == 64.0
        assert len(grid.centers) == 128

    def test_too_few_pixels(self):
        with pytest.raises(InvalidParameterError):
            CameraGrid(1.0, 8, 0.0)

    def test_coverage_needs_four_sigma(self):
        grid = CameraGrid.centered(1.0, 32)
        with pytest.raises(InvalidParameterError):
            grid.check_coverage(params(sigma_z=12.0))

    def test_coverage_needs_centre_inside(self):
        grid = default_grid(DEFAULTS)
        with pytest.raises(InvalidParameterError):
            grid.check_coverage(params(z_com=500.0))


class TestSampling:
    def test_same_seed_same_atoms(self):
        a = sample_atoms(params(), 1000, seed=7)
        b = sample_atoms(params(), 1000, seed=7)
        np.testing.assert_array_equal(a, b)

    def test_different_seeds_differ(self):
        assert not np.array_equal(sample_atoms(params(), 1000, seed=7), sample_atoms(params(), 1000, seed=8))

    def test_sample_moments(self):
        z = sample_atoms(params(visibility=0.0), 20000, seed=1)
        assert abs(z.mean()) < 5 * 12.0 / math.sqrt(20000)
        assert z.std() == pytest.approx(12.0, rel=0.03)

    def test_requires_atoms(self):
        with pytest.raises(InvalidParameterError):
            sample_atoms(params(), 0)

    def test_binning_accounts_for_every_atom(self):
        grid = CameraGrid.centered(1.0, 32)
        positions = np.array([-20.0, -3.2, 0.1, 0.4, 15.9, 40.0])
        image = bin_to_image(positions, grid)
        assert image.total == 4
        assert image.dropped == 2
        assert image.counts[16] == 2

    def test_synthesized_image_holds_all_atoms(self):
        grid = default_grid(DEFAULTS)
        image = synthesize_image(params(), 5000, grid, seed=3)
        assert image.total + image.dropped == 5000
        assert image.dropped == 0

    def test_frame_recovers_grid(self):
        grid = CameraGrid.centered(0.5, 64, center=3.0)
        image = CameraImage(np.arange(64, dtype=float), grid)
        back = CameraImage.from_frame(image.to_frame())
        assert back.grid.n_pixels == 64
        assert back.grid.pixel_size == pytest.approx(0.5)
        assert back.grid.origin == pytest.approx(grid.origin)
        np.testing.assert_array_equal(back.counts, image.counts)

    def test_frame_needs_columns(self):
        import pandas as pd

        with pytest.raises(InvalidParameterError):
            CameraImage.from_frame(pd.DataFrame({"counts": [1, 2, 3]}))


class TestFitting:
    grid = CameraGrid.centered(1.0, 128)

    def test_wrap_phase_range(self):
        wrapped = wrap_phase(np.array([math.pi, -math.pi, 3 * math.pi / 2, 0.2]))
        np.testing.assert_allclose(wrapped, [math.pi, math.pi, -math.pi / 2, 0.2])

    def test_flat_image_is_degenerate(self):
        with pytest.raises(DegenerateImageError):
            fit_interferogram(np.full(128, 5.0), self.grid, wavelength=WAVELENGTH)

    def test_empty_image_is_degenerate(self):
        with pytest.raises(DegenerateImageError):
            initial_guess(np.zeros(128), self.grid, WAVELENGTH)

    def test_wavelength_required_without_start(self):
        with pytest.raises(InvalidParameterError):
            fit_interferogram(np.arange(128.0), self.grid)

    def test_unknown_fixed_parameter(self):
        with pytest.raises(InvalidParameterError):
            fit_interferogram(np.arange(128.0), self.grid, fixed={"colour"}, wavelength=WAVELENGTH)

    @pytest.mark.parametrize("phase", [-2.5, 0.3, 2.0])
    def test_recovers_noiseless_phase(self, phase):
        truth = params(amplitude=100.0, phase=phase, background=1.0)
        counts = pixel_integrated_profile(truth, self.grid)
        fit = fit_interferogram(counts, self.grid, wavelength=WAVELENGTH)
        assert fit.converged
        assert wrap_phase(fit.phase - phase) == pytest.approx(0.0, abs=1e-4)
        assert fit.params.visibility == pytest.approx(0.8, abs=1e-4)
        assert fit.free == ("amplitude", "z_com", "sigma_z", "visibility", "phase", "background")

    def test_poisson_image_phase_within_reported_error(self):
        truth = params(visibility=1.0, phase=0.3)
        image = synthesize_image(truth, 5000, self.grid, seed=11)
        fit = fit_interferogram(image.counts, self.grid, wavelength=WAVELENGTH, weighted=True)
        assert fit.converged
        assert math.isfinite(fit.phase_error)
        assert abs(wrap_phase(fit.phase - 0.3)) < 5 * fit.phase_error
        assert fit.phase_error == pytest.approx(1 / math.sqrt(5000), rel=0.5)

    def test_fit_with_explicit_start_and_free_wavelength(self):
        truth = params(amplitude=100.0, phase=0.7)
        counts = pixel_integrated_profile(truth, self.grid)
        start = truth.replace(phase=0.5, wavelength=WAVELENGTH * 1.01)
        fit = fit_interferogram(counts, self.grid, init=start, fixed={"z_ref"})
        assert fit.n_starts == 1
        assert fit.params.wavelength == pytest.approx(WAVELENGTH, rel=1e-5)
        assert fit.phase == pytest.approx(0.7, abs=1e-4)

    def test_record_is_json_ready(self):
        truth = params(amplitude=100.0)
        fit = fit_interferogram(pixel_integrated_profile(truth, self.grid), self.grid, wavelength=WAVELENGTH)
        record = fit.to_record()
        assert set(record) == {"params", "param_errors", "chi2", "converged", "free", "n_starts", "message"}
        assert record["converged"] is True
