"""
Sweep Row Transformer Module

This module flattens a spectral covariance matrix and its entanglement
criteria into the fixed-column SweepRow used by the CSV and SVG emitters.
"""

import logging
import math
from dataclasses import dataclass, fields
from typing import Tuple

import numpy as np

from ..exceptions import NumericError
from ..physics.noise import SpectralMatrix, normalized_covariance, quadrature_vector
from ..physics.polarization import (
    CriteriaRecord,
    StokesCombination,
    criteria_from_spectra,
    stokes_spectra_from_covariance,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SweepRow:
    omega: float
    c: float
    sigma: float
    S_p: float
    S_q: float
    S_r: float
    S_s: float
    S_S1p: float
    S_S2m: float
    sum_crit: float
    prod_crit: float
    epr_crit: float

    def values(self) -> Tuple[float, ...]:
        return tuple(getattr(self, name) for name in COLUMNS)


COLUMNS: Tuple[str, ...] = tuple(f.name for f in fields(SweepRow))
# Quadrature spectra in the first four rows, Stokes combinations after.
ROW_VECTORS = np.vstack([quadrature_vector(name) for name in ("p_alpha", "q_alpha", "r_alpha", "s_alpha")]
                        + [StokesCombination.ALL])


def flatten_point(S: SpectralMatrix) -> SweepRow:
    """
    Flatten one spectral matrix into a SweepRow.

    The quadrature spectra are those of the first crystal's pair (a1, b2);
    the second crystal's pair gives the same values.

    Raises:
        NumericError: If any value is not finite
    """
    point = (S.omega, S.sigma, S.c)
    cov = normalized_covariance(S, ROW_VECTORS)
    spectra = cov.diagonal()
    stokes = stokes_spectra_from_covariance(S.omega, cov[4:, 4:])
    criteria: CriteriaRecord = criteria_from_spectra(stokes, point)
    row = SweepRow(
        omega=float(S.omega),
        c=float(S.c),
        sigma=float(S.sigma),
        S_p=float(spectra[0]),
        S_q=float(spectra[1]),
        S_r=float(spectra[2]),
        S_s=float(spectra[3]),
        S_S1p=criteria.S_S1p,
        S_S2m=criteria.S_S2m,
        sum_crit=criteria.sum_value,
        prod_crit=criteria.product_value,
        epr_crit=criteria.epr_value,
    )
    if not all(math.isfinite(value) for value in row.values()):
        raise NumericError("non-finite value in sweep row", point=point)
    return row
