"""
Cavity Model Module

This module provides the classical description of the two-crystal OPO ring
cavity: Jones-type transfer matrices for every intracavity element, the exact
and first-order round-trip matrices, the oscillation thresholds of the locked
regimes and the above-threshold steady state.

All matrices act on the field basis (a1, b2*, a2, b1*).
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from scipy.linalg import lu_factor

from ..exceptions import ParameterError

logger = logging.getLogger(__name__)

# 4x4 complex transfer matrix over BASIS.
ComplexMatrix4 = np.ndarray

BASIS = ("a1", "b2*", "a2", "b1*")
IDENTITY4 = np.eye(4, dtype=complex)
# Locked steady-state eigenvector (right circular polarization on both beams).
LOCKED_MODE = np.array([1.0, 1.0, -1.0j, -1.0j], dtype=complex)
STATIONARITY_RTOL = 1e-9


@dataclass(frozen=True)
class OpticalConstants:
    """Physical constants of the cavity elements (SI lengths, rad/m wave vectors)."""

    k_a: float
    k_b: float
    k_0: float
    n: float
    n_0: float
    n_1: float
    n_2: float
    e: float
    l: float
    L: float
    rho: float
    r: float
    g: float

    def __post_init__(self):
        if not 0.0 < self.r <= 1.0:
            raise ParameterError(f"mirror reflectivity r must lie in (0, 1], got {self.r}")
        for name in ("e", "l", "L"):
            if getattr(self, name) <= 0.0:
                raise ParameterError(f"length {name} must be positive, got {getattr(self, name)}")
        for name in ("n", "n_0", "n_1", "n_2"):
            if getattr(self, name) < 1.0:
                raise ParameterError(f"refractive index {name} must be >= 1, got {getattr(self, name)}")

    @property
    def epsilon0(self) -> float:
        """Plate coupling sin(2 rho)."""
        return math.sin(2.0 * self.rho)


@dataclass(frozen=True)
class ReducedParams:
    """Dimensionless operating point of the first-order cavity model."""

    kappa: float
    g: float
    epsilon0: float = 0.0
    delta_a: float = 0.0
    delta_b: float = 0.0
    psi: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.kappa < 1.0:
            raise ParameterError(f"kappa must lie in (0, 1), got {self.kappa}")
        if self.sigma < 0.0:
            raise ParameterError(f"sigma must be non-negative, got {self.sigma}")

    @property
    def c(self) -> float:
        """Normalized coupling epsilon0 / kappa."""
        return self.epsilon0 / self.kappa

    @classmethod
    def working_point(cls, kappa: float, g: float, epsilon0: float, sigma: float = 1.0) -> "ReducedParams":
        """Lowest-threshold locked point: delta_a = delta_b = epsilon0, psi = 0."""
        return cls(kappa=kappa, g=g, epsilon0=epsilon0, delta_a=epsilon0,
                   delta_b=epsilon0, psi=0.0, sigma=sigma)


@dataclass(frozen=True)
class FieldState:
    """Classical intracavity steady state J * (1, 1, -i, -i)."""

    J: complex
    phi1: float
    vector: np.ndarray = field(repr=False, compare=False)

    @property
    def intensity(self) -> float:
        """|J|^2, photon number per mode."""
        return abs(self.J) ** 2


class ElementMatrices(NamedTuple):
    l1: ComplexMatrix4
    c_alpha: ComplexMatrix4
    c_beta: ComplexMatrix4
    l2: ComplexMatrix4
    prop: ComplexMatrix4


class PumpRegime(Enum):
    """The two locked solutions of det(M_rt - I) = 0."""

    LOWER = "lower"
    UPPER = "upper"


def _wrap_phase(phase: float) -> float:
    """Wrap a phase to (-pi, pi]."""
    wrapped = math.remainder(phase, 2.0 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def element_matrices(constants: OpticalConstants, pump: complex) -> ElementMatrices:
    """
    Build the transfer matrices of the five intracavity elements.

    The pump is split equally between the crystals (a0x = a0y = a0 / sqrt 2)
    and the crystals are taken to first order in g.

    Args:
        constants: Optical constants of the cavity
        pump: Intracavity pump amplitude a0

    Returns:
        ElementMatrices: (M_l1, M_c_alpha, M_c_beta, M_l2, M_prop)
    """
    k_a, k_b = constants.k_a, constants.k_b
    n, e, l = constants.n, constants.e, constants.l
    n_1, n_2 = constants.n_1, constants.n_2
    g = constants.g
    pump_x = pump_y = pump / math.sqrt(2.0)

    plate_a = cmath.exp(1j * k_a * n * e)
    plate_b = cmath.exp(-1j * k_b * n * e)

    m_l1 = np.diag([1j * plate_a, -1j * plate_b, 1j * plate_a, -1j * plate_b])

    a_n1 = cmath.exp(1j * k_a * n_1 * l)
    a_n2 = cmath.exp(1j * k_a * n_2 * l)
    b_n1 = cmath.exp(-1j * k_b * n_1 * l)
    b_n2 = cmath.exp(-1j * k_b * n_2 * l)

    m_c_alpha = np.array([
        [a_n1, g * pump_x * a_n1, 0, 0],
        [g * pump_x.conjugate() * b_n2, b_n2, 0, 0],
        [0, 0, a_n2, 0],
        [0, 0, 0, b_n1],
    ], dtype=complex)

    m_c_beta = np.array([
        [a_n2, 0, 0, 0],
        [0, b_n1, 0, 0],
        [0, 0, a_n1, g * pump_y * a_n1],
        [0, 0, g * pump_y.conjugate() * b_n2, b_n2],
    ], dtype=complex)

    # Half-wave plate rotated by rho: a rotation between the two polarizations.
    cos_2rho = math.cos(2.0 * constants.rho)
    sin_2rho = constants.epsilon0
    m_l2 = np.array([
        [-1j * plate_a * cos_2rho, 0, -1j * plate_a * sin_2rho, 0],
        [0, 1j * plate_b * cos_2rho, 0, -1j * plate_b * sin_2rho],
        [1j * plate_a * sin_2rho, 0, -1j * plate_a * cos_2rho, 0],
        [0, 1j * plate_b * sin_2rho, 0, 1j * plate_b * cos_2rho],
    ], dtype=complex)

    prop_a = cmath.exp(1j * k_a * constants.L)
    prop_b = cmath.exp(-1j * k_b * constants.L)
    m_prop = constants.r * np.diag([prop_a, prop_b, prop_a, prop_b])

    return ElementMatrices(m_l1, m_c_alpha, m_c_beta, m_l2, m_prop)


def round_trip_exact(constants: OpticalConstants, pump: complex) -> ComplexMatrix4:
    """Round-trip matrix M_prop . M_l2 . M_c_beta . M_c_alpha . M_l1."""
    m = element_matrices(constants, pump)
    return m.prop @ m.l2 @ m.c_beta @ m.c_alpha @ m.l1


def reduced_parameters(constants: OpticalConstants, pump: complex,
                       sigma: float = 1.0) -> Tuple[ReducedParams, complex]:
    """
    Map exact optical constants onto the first-order parameters.

    Args:
        constants: Optical constants of the cavity
        pump: Intracavity pump amplitude a0 as seen by round_trip_exact
        sigma: Reduced pump parameter to record on the result

    Returns:
        tuple: (ReducedParams, reduced pump) where the reduced pump absorbs the
        phase the pump acquires between the crystals, -a0 exp(-i(k_a+k_b)ne)
    """
    optical_length = constants.L + 2.0 * constants.n * constants.e + constants.l * (constants.n_1 + constants.n_2)
    params = ReducedParams(
        kappa=1.0 - constants.r,
        g=constants.g,
        epsilon0=constants.epsilon0,
        delta_a=_wrap_phase(constants.k_a * optical_length),
        delta_b=_wrap_phase(constants.k_b * optical_length),
        psi=_wrap_phase((constants.k_b * constants.n_1 + constants.k_a * constants.n_2) * constants.l),
        sigma=sigma,
    )
    pump_shift = (constants.k_a + constants.k_b) * constants.n * constants.e
    return params, -pump * cmath.exp(-1j * pump_shift)


def round_trip_reduced(params: ReducedParams, pump: complex) -> ComplexMatrix4:
    """
    First-order round-trip matrix in delta, g, kappa and epsilon0.

    Args:
        params: Reduced operating point (sigma is not used here)
        pump: Intracavity pump amplitude a0

    Returns:
        ComplexMatrix4: round-trip matrix
    """
    kappa, eps = params.kappa, params.epsilon0
    gain = complex(params.g * pump / math.sqrt(2.0))
    gain_conj = gain.conjugate()
    psi_phase = cmath.exp(1j * params.psi)
    diag_a = 1.0 + 1j * params.delta_a - kappa
    diag_b = 1.0 - 1j * params.delta_b - kappa
    return np.array([
        [diag_a, gain, eps, 0],
        [gain_conj, diag_b, 0, -eps],
        [-eps, 0, diag_a, gain / psi_phase],
        [0, eps, gain_conj * psi_phase, diag_b],
    ], dtype=complex)


def _lu_determinant(matrix: ComplexMatrix4) -> Tuple[complex, float]:
    """Determinant by LU with partial pivoting, plus the product of |pivots|."""
    lu, piv = lu_factor(matrix, check_finite=True)
    pivots = np.diag(lu)
    swaps = int(np.count_nonzero(piv != np.arange(len(piv))))
    sign = -1.0 if swaps % 2 else 1.0
    return sign * np.prod(pivots), float(np.prod(np.abs(pivots)))


def stationarity_residual(params: ReducedParams, pump: complex) -> float:
    """|det(M_rt - I4)| of the first-order round-trip matrix."""
    det, _ = _lu_determinant(round_trip_reduced(params, pump) - IDENTITY4)
    return float(abs(det))


def is_stationary(params: ReducedParams, pump: complex, rtol: float = STATIONARITY_RTOL) -> bool:
    """
    Check the stationarity condition against a tolerance relative to the
    product of the diagonal magnitudes of M_rt - I4.
    """
    shifted = round_trip_reduced(params, pump) - IDENTITY4
    det, _ = _lu_determinant(shifted)
    scale = float(np.prod(np.abs(np.diag(shifted))))
    if scale == 0.0:
        return abs(det) == 0.0
    return abs(det) <= rtol * scale


def locking_scan(delta_a_values: Sequence[float], delta_b_values: Sequence[float],
                 epsilon0: float, kappa: float, g: float, pump: complex,
                 psi: float = 0.0) -> np.ndarray:
    """
    Evaluate the stationarity residual over a (delta_a, delta_b) grid.

    Returns:
        np.ndarray: residuals with shape (len(delta_a_values), len(delta_b_values))
    """
    residuals = np.empty((len(delta_a_values), len(delta_b_values)))
    for i, delta_a in enumerate(delta_a_values):
        for j, delta_b in enumerate(delta_b_values):
            params = ReducedParams(kappa=kappa, g=g, epsilon0=epsilon0,
                                   delta_a=delta_a, delta_b=delta_b, psi=psi)
            residuals[i, j] = stationarity_residual(params, pump)
    logger.debug(f"Locking scan over {residuals.size} points, min residual {residuals.min():.3e}")
    return residuals


def threshold_branches(delta: float, epsilon0: float, kappa: float, g: float) -> Tuple[float, float]:
    """
    Pump intensities |a0|^2 at which the locked cavity starts oscillating.

    Args:
        delta: Common round-trip detuning delta_a = delta_b
        epsilon0: Plate coupling
        kappa: Mirror loss
        g: Nonlinear coupling

    Returns:
        tuple: (lower branch, upper branch)
    """
    if g == 0.0:
        raise ParameterError("g must be non-zero: no parametric gain without nonlinearity")
    if kappa <= 0.0:
        raise ParameterError(f"kappa must be positive, got {kappa}")
    minus = 2.0 / g ** 2 * (kappa ** 2 + (delta - epsilon0) ** 2)
    plus = 2.0 / g ** 2 * (kappa ** 2 + (delta + epsilon0) ** 2)
    return (min(minus, plus), max(minus, plus))


def threshold_intensity(params: ReducedParams, regime: PumpRegime = PumpRegime.LOWER) -> float:
    """Threshold pump intensity of one regime at the params' common detuning delta_a."""
    lower, upper = threshold_branches(params.delta_a, params.epsilon0, params.kappa, params.g)
    return lower if regime is PumpRegime.LOWER else upper


def steady_state(params: ReducedParams, phi1: float = 0.0) -> FieldState:
    """
    Above-threshold steady state at the lowest-threshold working point.

    Args:
        params: Operating point (delta = epsilon0, psi = 0 assumed)
        phi1: Free phase of J

    Returns:
        FieldState: J = sqrt(kappa (sigma - 1) / g^2) exp(i phi1), or zero below threshold
    """
    if params.sigma < 0.0:
        raise ParameterError(f"sigma must be non-negative, got {params.sigma}")
    if params.g == 0.0:
        raise ParameterError("g must be non-zero")
    if params.sigma >= 1.0:
        J = math.sqrt(params.kappa * (params.sigma - 1.0) / params.g ** 2) * cmath.exp(1j * phi1)
    else:
        J = 0j
    return FieldState(J=J, phi1=phi1, vector=J * LOCKED_MODE)


def output_power(params: ReducedParams) -> float:
    """Total intracavity photon number 2|J|^2 of the locked state."""
    return 2.0 * steady_state(params).intensity


def sigma_from_pump(pump_intensity_in: float, kappa: float, g: float) -> float:
    """
    Reduced pump parameter sigma = sqrt(I0_in / (2 kappa^2 / g^2)).

    Raises:
        ParameterError: If the intensity is negative or kappa, g are not positive
    """
    if pump_intensity_in < 0.0:
        raise ParameterError(f"pump intensity must be non-negative, got {pump_intensity_in}")
    if kappa <= 0.0 or g <= 0.0:
        raise ParameterError(f"kappa and g must be positive, got kappa={kappa}, g={g}")
    threshold = 2.0 * kappa ** 2 / g ** 2
    return math.sqrt(pump_intensity_in / threshold)


def depletion_residual(pump_intensity_in: float, kappa: float, g: float) -> float:
    """
    Residual of the pump depletion balance (kappa/g + g|J|^2)^2 = I0_in / 2.

    Each crystal sees the pump component a0 / sqrt 2, which is why the balance
    closes on half the input intensity.
    """
    sigma = sigma_from_pump(pump_intensity_in, kappa, g)
    intensity = kappa * max(sigma - 1.0, 0.0) / g ** 2
    return abs((kappa / g + g * intensity) ** 2 - pump_intensity_in / 2.0)
