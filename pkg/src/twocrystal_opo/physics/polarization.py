"""
Polarization Module

This module maps the classical steady state and the output spectral
covariance onto Stokes operator means and fluctuation spectra, and evaluates
the sum, product and EPR entanglement criteria between the two beams.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

from ..exceptions import NumericError, ParameterError
from .cavity import FieldState
from .noise import (
    OMEGA_MIN,
    SpectralMatrix,
    normalized_covariance,
    spectral_denominator,
)

logger = logging.getLogger(__name__)

SUM_THRESHOLD = 1.0
PRODUCT_THRESHOLD = 2.0
EPR_THRESHOLD = 1.0


@dataclass(frozen=True)
class StokesMean:
    """Mean Stokes parameters of one beam, in photon-number units."""

    s0: float
    s1: float
    s2: float
    s3: float

    @property
    def polarization_defect(self) -> float:
        """S0^2 - (S1^2 + S2^2 + S3^2); zero for a fully polarized beam."""
        return self.s0 ** 2 - (self.s1 ** 2 + self.s2 ** 2 + self.s3 ** 2)


class StokesCombination:
    """Stokes fluctuations (divided by |J|) as quadrature coefficient vectors."""

    S1_A = np.array([1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    S2_A = np.array([0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0])
    S1_B = np.array([0.0, 0.0, 0.0, 0.0, 1.0, 0.0, -1.0, 0.0])
    S2_B = np.array([0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0])
    S1_PLUS = S1_A + S1_B
    S2_MINUS = S2_A - S2_B
    ALL = np.vstack([S1_PLUS, S2_MINUS, S1_A, S1_B, S2_A, S2_B])


@dataclass(frozen=True)
class StokesSpectra:
    """Shot-noise normalized Stokes fluctuation spectra at one frequency."""

    omega: float
    S_S1p: float
    S_S2m: float
    V_S1a: float
    V_S1b: float
    C_S1ab: float
    V_S2a: float
    V_S2b: float
    C_S2ab: float


class CriterionResult(NamedTuple):
    value: float
    entangled: bool


@dataclass(frozen=True)
class CriteriaRecord:
    """Entanglement criteria at one analysis frequency."""

    omega: float
    S_S1p: float
    S_S2m: float
    sum_value: float
    product_value: float
    epr_value: float
    sum_entangled: bool
    product_entangled: bool
    epr_violation: bool

    @property
    def half_product(self) -> float:
        """Product criterion in the plotted form (S_S1p * S_S2m) / 2."""
        return 0.5 * self.product_value


def _beam_stokes(x: complex, y: complex) -> StokesMean:
    cross = np.conj(x) * y
    return StokesMean(
        s0=float(abs(x) ** 2 + abs(y) ** 2),
        s1=float(abs(x) ** 2 - abs(y) ** 2),
        s2=float(2.0 * cross.real),
        s3=float(-2.0 * cross.imag),
    )


def stokes_means(state: FieldState) -> Tuple[StokesMean, StokesMean]:
    """
    Mean Stokes parameters of beam a (a1, a2) and beam b (b1, b2).

    S3 is taken as i(a_x^+ a_y - a_y^+ a_x), positive for the right-circular
    locked state, so S3 = S0 = 2|J|^2 on both beams.
    """
    a1, b2_conj, a2, b1_conj = state.vector
    beam_a = _beam_stokes(a1, a2)
    beam_b = _beam_stokes(np.conj(b1_conj), np.conj(b2_conj))
    return beam_a, beam_b


def stokes_spectra_from_covariance(omega: float, cov: np.ndarray) -> StokesSpectra:
    """Unpack the normalized covariance of StokesCombination.ALL, in row order."""
    return StokesSpectra(
        omega=omega,
        S_S1p=float(cov[0, 0]),
        S_S2m=float(cov[1, 1]),
        V_S1a=float(cov[2, 2]),
        V_S1b=float(cov[3, 3]),
        C_S1ab=float(cov[2, 3]),
        V_S2a=float(cov[4, 4]),
        V_S2b=float(cov[5, 5]),
        C_S2ab=float(cov[4, 5]),
    )


def stokes_fluctuation_spectra(S: SpectralMatrix) -> StokesSpectra:
    """
    Normalized spectra of the Stokes fluctuations.

    Two-beam combinations are normalized by 4|J|^2 and per-beam spectra by
    2|J|^2 (unit-norm coefficient vectors), so coherent beams give 1.
    """
    return stokes_spectra_from_covariance(S.omega, normalized_covariance(S, StokesCombination.ALL))


def printed_stokes_spectra(omega: float, sigma: float, c: float) -> Tuple[float, float]:
    """Closed-form (S_S1+, S_S2-); S_S1+ does not depend on sigma."""
    if omega < OMEGA_MIN:
        raise ParameterError(f"closed-form spectra need omega >= {OMEGA_MIN}, got {omega}")
    w2 = omega ** 2
    s1_plus = 1.0 - (w2 - c ** 2) / (w2 + (w2 - c ** 2) ** 2)
    s2_minus = 1.0 - ((w2 - c ** 2) + (sigma - 1.0) ** 2) / spectral_denominator(omega, sigma, c)
    return s1_plus, s2_minus


def sum_criterion(S_S1p: float, S_S2m: float) -> CriterionResult:
    """Sum criterion (S_S1+ + S_S2-) / 2 < 1."""
    value = (S_S1p + S_S2m) / 2.0
    return CriterionResult(value, value < SUM_THRESHOLD)


def product_criterion(S_S1p: float, S_S2m: float) -> CriterionResult:
    """Normalized product criterion S_S1+ * S_S2- < 2."""
    value = S_S1p * S_S2m
    return CriterionResult(value, value < PRODUCT_THRESHOLD)


def mancini_raw(S_S1p: float, S_S2m: float, state: FieldState) -> Tuple[float, float]:
    """
    Unnormalized product criterion.

    Returns:
        tuple: (Var(S1a + S1b) * Var(S2a - S2b), 2 (|<S3a>| + |<S3b>|))
    """
    intensity = state.intensity
    beam_a, beam_b = stokes_means(state)
    product = (4.0 * intensity * S_S1p) * (4.0 * intensity * S_S2m)
    bound = 2.0 * (abs(beam_a.s3) + abs(beam_b.s3))
    return product, bound


def _conditional_variance(v_a: float, v_b: float, cross: float) -> float:
    return v_a * (1.0 - cross ** 2 / (v_a * v_b))


def epr_criterion(spectra: StokesSpectra,
                  point: Optional[Tuple[float, float, float]] = None) -> CriterionResult:
    """
    Product of the conditional variances of S1 and S2 of beam a given beam b.

    Args:
        spectra: Stokes fluctuation spectra
        point: (omega, sigma, c) reported with a failure

    Raises:
        NumericError: If a conditioning variance vanishes
    """
    for name in ("V_S1a", "V_S1b", "V_S2a", "V_S2b"):
        if getattr(spectra, name) <= 0.0:
            raise NumericError(f"EPR criterion needs a positive {name}, got {getattr(spectra, name)}",
                               point)
    cond1 = _conditional_variance(spectra.V_S1a, spectra.V_S1b, spectra.C_S1ab)
    cond2 = _conditional_variance(spectra.V_S2a, spectra.V_S2b, spectra.C_S2ab)
    value = cond1 * cond2
    return CriterionResult(value, value < EPR_THRESHOLD)


def heisenberg_bound(state: FieldState) -> float:
    """|<S3>|^2 of one beam, the lower bound on Var(S1) Var(S2)."""
    return (2.0 * state.intensity) ** 2


def evaluate_criteria(S: SpectralMatrix) -> CriteriaRecord:
    """All three criteria from one spectral matrix."""
    return criteria_from_spectra(stokes_fluctuation_spectra(S), point=(S.omega, S.sigma, S.c))


def criteria_from_spectra(spectra: StokesSpectra,
                          point: Optional[Tuple[float, float, float]] = None) -> CriteriaRecord:
    """All three criteria from already projected Stokes spectra."""
    total = sum_criterion(spectra.S_S1p, spectra.S_S2m)
    product = product_criterion(spectra.S_S1p, spectra.S_S2m)
    epr = epr_criterion(spectra, point=point)
    return CriteriaRecord(
        omega=spectra.omega,
        S_S1p=spectra.S_S1p,
        S_S2m=spectra.S_S2m,
        sum_value=total.value,
        product_value=product.value,
        epr_value=epr.value,
        sum_entangled=total.entangled,
        product_entangled=product.entangled,
        epr_violation=epr.entangled,
    )
