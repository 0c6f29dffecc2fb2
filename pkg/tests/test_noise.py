import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from twocrystal_opo.exceptions import ParameterError
from twocrystal_opo.physics.noise import (
    COMBINATIONS,
    QuadratureBasis,
    SpectraGrid,
    SpectralMatrix,
    build_blocks,
    build_drift,
    combination_spectrum,
    cross_spectrum,
    physical_drift,
    printed_spectra,
    quadrature_vector,
    reconciled_spectra,
    spectral_grid,
    spectral_matrix,
    transfer_functions,
    validate_spectra,
)
from twocrystal_opo.utils.performance_monitor import get_counter

SIGMAS = [1.0, 1.25, 1.5, 2.0]
COUPLINGS = [0.0, 0.2, 1.0, 2.0]


def spectra_alpha(S):
    return tuple(combination_spectrum(S, COMBINATIONS[name])
                 for name in ("p_alpha", "q_alpha", "r_alpha", "s_alpha"))


class TestDrift:
    @pytest.mark.parametrize("sigma", SIGMAS)
    @pytest.mark.parametrize("c", COUPLINGS)
    def test_block_decomposition(self, sigma, c):
        blocks = build_blocks(sigma, c)
        t = blocks.transform
        assert_allclose(t @ t.T, np.eye(8), atol=1e-15)
        rotated = t @ build_drift(sigma, c).matrix @ t.T
        assert np.max(np.abs(rotated - blocks.block_diagonal())) < 1e-12

    def test_physical_drift_scales_with_kappa(self):
        kappa, eps, sigma = 0.02, 0.01, 1.3
        assert_allclose(physical_drift(kappa, eps, sigma) / kappa,
                        build_drift(sigma, eps / kappa).matrix, atol=1e-14)

    def test_below_threshold_rejected(self):
        with pytest.raises(ParameterError):
            build_drift(0.9, 0.0)

    def test_negative_coupling_rejected(self):
        with pytest.raises(ParameterError):
            build_drift(1.0, -0.1)

    def test_named_combination(self):
        assert_allclose(quadrature_vector("r_beta"), COMBINATIONS["r_beta"])
        with pytest.raises(ParameterError):
            quadrature_vector("t_alpha")

    def test_quadrature_index(self):
        assert QuadratureBasis.index("a1", "q") == 1
        assert QuadratureBasis.index("b2", "p") == 6
        with pytest.raises(ParameterError):
            QuadratureBasis.index("c1", "p")


class TestSpectralMatrix:
    def test_sample_point_at_threshold(self):
        S = spectral_matrix(1.0, 1.0, 0.0)
        assert_allclose(spectra_alpha(S), (2.0, 0.5, 0.5, 2.0), rtol=1e-12)
        assert S.matrix[0, 0].real == pytest.approx(1.25)

    def test_hermitian(self):
        S = spectral_matrix(0.7, 1.3, 0.4)
        assert_allclose(S.matrix, S.matrix.conj().T, atol=1e-14)

    def test_vacuum_calibration(self):
        S = SpectralMatrix.vacuum()
        for vector in COMBINATIONS.values():
            assert combination_spectrum(S, vector) == 1.0

    def test_zero_combination_rejected(self):
        with pytest.raises(ParameterError):
            combination_spectrum(SpectralMatrix.vacuum(), np.zeros(8))

    def test_zero_frequency_rejected(self):
        with pytest.raises(ParameterError):
            spectral_matrix(0.0, 1.0, 0.0)

    def test_high_frequency_transfer(self):
        t_in, t_pump = transfer_functions(1e6, 1.5, 1.0)
        assert_allclose(t_in, -np.eye(8), atol=1e-5)
        assert np.max(np.abs(t_pump)) < 1e-5

    def test_no_pump_coupling_at_threshold(self):
        _, t_pump = transfer_functions(0.3, 1.0, 0.5)
        assert not t_pump.any()

    def test_high_frequency_limit(self):
        S = spectral_matrix(1e3, 1.2, 0.2)
        assert_allclose(spectra_alpha(S), np.ones(4), atol=1e-3)

    @pytest.mark.parametrize("sigma,c", [(1.2, 0.2), (2.0, 2.0)])
    def test_vacuum_at_high_frequency(self, sigma, c):
        assert_allclose(spectral_matrix(1e3, sigma, c).matrix, np.eye(8), atol=1e-3)

    @pytest.mark.parametrize("sigma", SIGMAS)
    @pytest.mark.parametrize("c", [0.0, 1.0])
    def test_positive_semidefinite(self, omega_grid, sigma, c):
        for S in spectral_grid(omega_grid, sigma, c):
            eigenvalues = np.linalg.eigvalsh(S.matrix)
            assert eigenvalues[0] >= -1e-12 * max(1.0, eigenvalues[-1])

    @pytest.mark.parametrize("c", [0.0, 0.5])
    def test_difference_sector_independent_of_pump(self, c):
        for omega in (0.01, 1.0, 100.0):
            reference = spectral_matrix(omega, 1.0, c).block[4:, 4:]
            for sigma in (1.5, 2.0):
                assert_allclose(spectral_matrix(omega, sigma, c).block[4:, 4:], reference,
                                rtol=1e-14, atol=0)

    def test_cross_spectrum(self):
        u, w = COMBINATIONS["p_alpha"], COMBINATIONS["r_alpha"]
        assert cross_spectrum(SpectralMatrix.vacuum(), u, w) == pytest.approx(0.0, abs=1e-15)
        S = spectral_matrix(0.8, 1.3, 0.5)
        assert cross_spectrum(S, u, u) == pytest.approx(combination_spectrum(S, u), rel=1e-12)
        assert cross_spectrum(S, u, w) == pytest.approx(cross_spectrum(S, w, u), rel=1e-12, abs=1e-15)

    def test_difference_channels_at_zero_coupling(self, omega_grid):
        for S in spectral_grid(omega_grid, 1.4, 0.0):
            w2 = S.omega ** 2
            assert combination_spectrum(S, COMBINATIONS["r_alpha"]) == pytest.approx(w2 / (1 + w2), rel=1e-9)
            assert combination_spectrum(S, COMBINATIONS["s_beta"]) == pytest.approx(1 + 1 / w2, rel=1e-9)

    @pytest.mark.parametrize("variance,expected", [(2.0, 0.6), (1.0, 0.4)])
    def test_phase_sum_pump_variance(self, variance, expected):
        S = spectral_matrix(0.5, 1.5, 0.0, pump_variance=variance)
        assert combination_spectrum(S, COMBINATIONS["q_alpha"]) == pytest.approx(expected, rel=1e-12)

    def test_pump_decoupled_at_threshold(self):
        for omega in (0.01, 1.0, 100.0):
            v1 = spectral_matrix(omega, 1.0, 0.2, pump_variance=1.0)
            v2 = spectral_matrix(omega, 1.0, 0.2, pump_variance=2.0)
            assert_array_equal(v1.matrix, v2.matrix)

    def test_grid_independent_of_workers(self, omega_grid):
        serial = spectral_grid(omega_grid, 1.1, 0.2, max_workers=1, chunk_size=32)
        parallel = spectral_grid(omega_grid, 1.1, 0.2, max_workers=4, chunk_size=32)
        assert [S.omega for S in serial] == list(omega_grid)
        for a, b in zip(serial, parallel):
            assert_array_equal(a.matrix, b.matrix)


class TestClosedForms:
    def test_printed_phase_sum_sample(self):
        assert printed_spectra(1.0, 1.0, 0.0)[1] == pytest.approx(0.25)
        assert reconciled_spectra(1.0, 1.0, 0.0)[1] == pytest.approx(0.5)

    def test_printed_difference_at_resonant_coupling(self):
        assert printed_spectra(1.0, 1.0, 1.0)[2] == pytest.approx(0.75)

    def test_printed_and_reconciled_share_other_spectra(self):
        printed = printed_spectra(0.3, 1.2, 0.7)
        reconciled = reconciled_spectra(0.3, 1.2, 0.7)
        for idx in (0, 2, 3):
            assert printed[idx] == reconciled[idx]

    def test_closed_form_needs_positive_frequency(self):
        with pytest.raises(ParameterError):
            printed_spectra(1e-9, 1.0, 0.0)

    @pytest.mark.parametrize("omega", [0.01, 0.0125, 0.02])
    def test_low_frequency_threshold_precision(self, omega):
        S = spectral_matrix(omega, 1.0, 0.0)
        reference = reconciled_spectra(omega, 1.0, 0.0)
        for name, expected in zip(("p_alpha", "q_alpha", "r_alpha", "s_alpha"), reference):
            assert combination_spectrum(S, COMBINATIONS[name]) == pytest.approx(expected, rel=1e-10, abs=0.0)

    def test_difference_sector_isolated_from_pump_sector(self):
        S = spectral_matrix(1e-3, 1.4, 0.3)
        assert not S.block[:4, 4:].any()
        assert not S.block[4:, :4].any()

    def test_validation_threshold_regime(self):
        grid = SpectraGrid.log_spaced(0.01, 100, 200, sigmas=[1.0], cs=[0.0, 0.2, 1.0])
        report = validate_spectra(grid, pump_variance=2.0)
        assert report.passed, report.mismatches[:5]
        assert report.points == 600
        for errors in report.max_errors.values():
            assert max(errors.values()) < 1e-9

    def test_validation_above_threshold(self):
        grid = SpectraGrid.log_spaced(0.01, 100, 50, sigmas=[1.1, 1.5], cs=[0.0, 0.2, 1.0])
        report = validate_spectra(grid, pump_variance=2.0, max_workers=2)
        assert report.passed, report.mismatches[:5]
        assert report.printed_q_errors["sigma>1,c=0"] > 1e-3

    def test_validation_unit_pump_variance_deviates(self):
        before = get_counter("validation_mismatches")
        grid = SpectraGrid.log_spaced(0.01, 100, 20, sigmas=[1.1], cs=[0.0])
        report = validate_spectra(grid, pump_variance=1.0)
        assert not report.passed
        assert {m.spectrum for m in report.mismatches} <= {"S_p", "S_q"}
        assert report.regimes_with_mismatches() == ["sigma>1,c=0"]
        assert get_counter("validation_mismatches") == before + len(report.mismatches)
