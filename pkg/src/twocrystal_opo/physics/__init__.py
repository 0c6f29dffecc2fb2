"""
Physics Module

This module contains the cavity model, the quantum noise engine and the
polarization entanglement analysis of the two-crystal OPO.
"""

from .cavity import (
    ComplexMatrix4,
    OpticalConstants,
    ReducedParams,
    FieldState,
    PumpRegime,
    element_matrices,
    round_trip_exact,
    round_trip_reduced,
    reduced_parameters,
    stationarity_residual,
    is_stationary,
    locking_scan,
    threshold_branches,
    threshold_intensity,
    steady_state,
    output_power,
    sigma_from_pump,
    depletion_residual,
)
from .noise import (
    QuadratureBasis,
    DriftMatrix8,
    PumpInjectionMap,
    BlockDecomposition,
    SpectralMatrix,
    SpectraGrid,
    ValidationReport,
    COMBINATIONS,
    quadrature_vector,
    build_drift,
    physical_drift,
    pump_injection,
    build_blocks,
    transfer_functions,
    transfer_function_batch,
    block_transfer_batch,
    spectral_matrix,
    spectral_grid,
    combination_spectrum,
    cross_spectrum,
    normalized_covariance,
    printed_spectra,
    reconciled_spectra,
    validate_spectra,
)
from .polarization import (
    StokesMean,
    StokesCombination,
    StokesSpectra,
    CriteriaRecord,
    stokes_means,
    stokes_fluctuation_spectra,
    stokes_spectra_from_covariance,
    printed_stokes_spectra,
    sum_criterion,
    product_criterion,
    epr_criterion,
    mancini_raw,
    heisenberg_bound,
    evaluate_criteria,
    criteria_from_spectra,
)
