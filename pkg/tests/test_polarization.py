import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from twocrystal_opo.exceptions import NumericError
from twocrystal_opo.physics.cavity import ReducedParams, steady_state
from twocrystal_opo.physics.noise import SpectralMatrix, spectral_grid, spectral_matrix
from twocrystal_opo.physics.polarization import (
    StokesCombination,
    StokesSpectra,
    epr_criterion,
    evaluate_criteria,
    heisenberg_bound,
    mancini_raw,
    printed_stokes_spectra,
    product_criterion,
    stokes_fluctuation_spectra,
    stokes_means,
    sum_criterion,
)


@pytest.fixture
def locked_state():
    return steady_state(ReducedParams.working_point(0.01, 0.001, 0.0, sigma=2.0))


class TestStokesMeans:
    def test_right_circular_state(self, locked_state):
        for beam in stokes_means(locked_state):
            assert beam.s0 == pytest.approx(2e4)
            assert beam.s3 == pytest.approx(2e4)
            assert beam.s1 == pytest.approx(0.0, abs=1e-9)
            assert beam.s2 == pytest.approx(0.0, abs=1e-9)
            assert beam.polarization_defect == pytest.approx(0.0, abs=1e-3)

    def test_heisenberg_bound(self, locked_state):
        assert heisenberg_bound(locked_state) == pytest.approx(4e8)

    def test_mancini_bound(self, locked_state):
        product, bound = mancini_raw(0.5, 0.5, locked_state)
        assert bound == pytest.approx(8e4)
        assert product == pytest.approx(16e8 * 0.25)


class TestStokesSpectra:
    def test_combination_vectors(self):
        assert StokesCombination.S1_PLUS @ StokesCombination.S1_PLUS == 4
        assert StokesCombination.S2_MINUS @ StokesCombination.S2_MINUS == 4
        assert_allclose(StokesCombination.S2_B, [0, 0, 0, 0, 0, -1, 0, 1])

    def test_sample_point(self):
        spec = stokes_fluctuation_spectra(spectral_matrix(1.0, 1.0, 0.0))
        assert spec.S_S1p == pytest.approx(0.5, rel=1e-12)
        assert spec.S_S2m == pytest.approx(0.5, rel=1e-12)

    @pytest.mark.parametrize("sigma", [1.0, 1.3, 2.0])
    @pytest.mark.parametrize("c", [0.0, 0.2, 1.0])
    def test_matches_closed_form(self, omega_grid, sigma, c):
        for S in spectral_grid(omega_grid, sigma, c):
            spec = stokes_fluctuation_spectra(S)
            s1p, s2m = printed_stokes_spectra(S.omega, sigma, c)
            assert spec.S_S1p == pytest.approx(s1p, rel=1e-9, abs=0.0)
            assert spec.S_S2m == pytest.approx(s2m, rel=1e-9, abs=0.0)

    @pytest.mark.parametrize("c", [0.0, 0.2, 1.0])
    def test_amplitude_sum_independent_of_pump(self, c):
        for omega in (0.05, 1.0, 20.0):
            values = [stokes_fluctuation_spectra(spectral_matrix(omega, sigma, c)).S_S1p
                      for sigma in (1.0, 1.3, 2.0)]
            assert max(values) - min(values) < 1e-10

    def test_low_frequency_entanglement(self):
        spec = stokes_fluctuation_spectra(spectral_matrix(1e-4, 1.0, 0.0))
        assert spec.S_S1p < 1e-7
        assert spec.S_S2m < 1e-7

    @pytest.mark.parametrize("omega", [1e-4, 1e-3, 0.01])
    def test_low_frequency_precision(self, omega):
        spec = stokes_fluctuation_spectra(spectral_matrix(omega, 1.0, 0.0))
        w2 = omega ** 2
        assert spec.S_S1p == pytest.approx(w2 / (1 + w2), rel=1e-9, abs=0.0)
        assert spec.S_S2m == pytest.approx(w2 / (1 + w2), rel=1e-9, abs=0.0)

    def test_high_frequency_shot_noise(self):
        spec = stokes_fluctuation_spectra(spectral_matrix(1e3, 1.5, 0.2))
        assert spec.S_S1p == pytest.approx(1.0, abs=1e-3)
        assert spec.S_S2m == pytest.approx(1.0, abs=1e-3)


class TestCriteria:
    def test_sum_and_product(self):
        assert sum_criterion(0.4, 0.6) == (0.5, True)
        assert product_criterion(1.0, 1.0) == (1.0, True)
        assert product_criterion(2.0, 1.5).entangled is False

    def test_epr_perfect_correlation(self):
        spec = StokesSpectra(omega=1.0, S_S1p=0.0, S_S2m=0.0,
                             V_S1a=1.0, V_S1b=1.0, C_S1ab=1.0,
                             V_S2a=2.0, V_S2b=2.0, C_S2ab=-1.0)
        result = epr_criterion(spec)
        assert result.value == pytest.approx(0.0)
        assert result.entangled

    def test_epr_degenerate_variance(self):
        spec = StokesSpectra(omega=1.0, S_S1p=1.0, S_S2m=1.0,
                             V_S1a=1.0, V_S1b=0.0, C_S1ab=0.0,
                             V_S2a=1.0, V_S2b=1.0, C_S2ab=0.0)
        with pytest.raises(NumericError):
            epr_criterion(spec)

    def test_degenerate_point_is_reported(self):
        S = SpectralMatrix(block=np.zeros((8, 8), dtype=complex), omega=0.5, sigma=1.2, c=0.3)
        with pytest.raises(NumericError) as excinfo:
            evaluate_criteria(S)
        assert excinfo.value.point == (0.5, 1.2, 0.3)

    def test_vacuum_calibration(self):
        record = evaluate_criteria(SpectralMatrix.vacuum())
        assert record.sum_value == 1.0
        assert record.product_value == 1.0
        assert record.epr_value == 1.0
        assert not record.sum_entangled
        assert not record.epr_violation

    def test_sample_values_at_threshold(self):
        record = evaluate_criteria(spectral_matrix(1.0, 1.0, 0.0))
        assert record.sum_value == pytest.approx(0.5, rel=1e-9)
        assert record.half_product == pytest.approx(0.125, rel=1e-9)
        assert record.sum_value == pytest.approx(record.S_S1p, rel=1e-12)

    def test_zero_coupling_entangled_at_low_frequency(self, omega_grid):
        for S in spectral_grid(omega_grid[omega_grid <= 1.0], 1.0, 0.0):
            record = evaluate_criteria(S)
            assert record.sum_value < 1.0
            assert record.epr_value < 1.0

    def test_epr_value_at_threshold(self):
        # conditional variance 2 / (S_p + S_r) for each Stokes pair at c = 0
        omega = 0.1
        S = spectral_matrix(omega, 1.0, 0.0)
        w2 = omega ** 2
        s_p = 1 + 1 / (2 * w2) + (1 + w2) / (2 * (w2 + w2 ** 2))
        s_r = w2 / (1 + w2)
        expected = (2.0 / (s_p + s_r)) ** 2
        assert evaluate_criteria(S).epr_value == pytest.approx(expected, rel=1e-9)

    def test_coupling_shifts_sum_minimum(self):
        omegas = np.logspace(-2, 2, 401)
        values = [evaluate_criteria(S).sum_value for S in spectral_grid(omegas, 1.0, 1.0)]
        best = omegas[int(np.argmin(values))]
        assert 0.5 <= best <= 2.0
        assert best == pytest.approx(math.sqrt(2.0), rel=0.02)
        assert min(values) == pytest.approx(2.0 / 3.0, rel=1e-3)
