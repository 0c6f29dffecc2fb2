"""
Noise Engine Module

This module provides the linearized quantum fluctuation analysis of the
locked two-crystal OPO above threshold: the normalized drift matrix, its
splitting into symmetric and antisymmetric blocks, the input-output transfer
functions, and the shot-noise normalized output spectral covariance.

The printed closed-form spectra are evaluated here as well, together with a
cross-check harness comparing them with the numeric spectra.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ..exceptions import NumericError, ParameterError
from ..utils.performance_monitor import increment_counter, start_timer, stop_timer

logger = logging.getLogger(__name__)

OMEGA_MIN = 1e-6
OMEGA_MAX = 1e6
DEFAULT_PUMP_VARIANCE = 2.0
VALIDATION_RTOL = 1e-9
SPECTRUM_NAMES = ("S_p", "S_q", "S_r", "S_s")

_SQRT_HALF = 1.0 / math.sqrt(2.0)


class QuadratureBasis:
    """Fixed ordering of the eight output quadratures."""

    LABELS = ("p_a1", "q_a1", "p_a2", "q_a2", "p_b1", "q_b1", "p_b2", "q_b2")
    SIZE = 8

    @classmethod
    def index(cls, mode: str, quadrature: str) -> int:
        """Position of quadrature 'p' or 'q' of mode 'a1', 'a2', 'b1' or 'b2'."""
        label = f"{quadrature}_{mode}"
        try:
            return cls.LABELS.index(label)
        except ValueError:
            raise ParameterError(f"unknown quadrature {label!r}") from None

    @classmethod
    def vector(cls, weights: Dict[str, float]) -> np.ndarray:
        """Coefficient vector from a {label: weight} mapping."""
        vec = np.zeros(cls.SIZE)
        for label, weight in weights.items():
            if label not in cls.LABELS:
                raise ParameterError(f"unknown quadrature {label!r}")
            vec[cls.LABELS.index(label)] = weight
        return vec


# Symmetric and antisymmetric combinations of the signal/idler pair of each crystal.
COMBINATIONS: Dict[str, np.ndarray] = {
    "p_alpha": QuadratureBasis.vector({"p_a1": _SQRT_HALF, "p_b2": _SQRT_HALF}),
    "q_alpha": QuadratureBasis.vector({"q_a1": _SQRT_HALF, "q_b2": _SQRT_HALF}),
    "r_alpha": QuadratureBasis.vector({"p_a1": _SQRT_HALF, "p_b2": -_SQRT_HALF}),
    "s_alpha": QuadratureBasis.vector({"q_a1": _SQRT_HALF, "q_b2": -_SQRT_HALF}),
    "p_beta": QuadratureBasis.vector({"p_a2": _SQRT_HALF, "p_b1": _SQRT_HALF}),
    "q_beta": QuadratureBasis.vector({"q_a2": _SQRT_HALF, "q_b1": _SQRT_HALF}),
    "r_beta": QuadratureBasis.vector({"p_a2": -_SQRT_HALF, "p_b1": _SQRT_HALF}),
    "s_beta": QuadratureBasis.vector({"q_a2": -_SQRT_HALF, "q_b1": _SQRT_HALF}),
}


def quadrature_vector(name: str) -> np.ndarray:
    """Coefficient vector of a named combination such as 'q_alpha' or 'r_beta'."""
    try:
        return COMBINATIONS[name].copy()
    except KeyError:
        raise ParameterError(f"unknown combination {name!r}, expected one of {sorted(COMBINATIONS)}") from None


# Row order of the block transform: (p_a, p_b, q_a, q_b | r_a, r_b, s_a, s_b).
BLOCK_ORDER = ("p_alpha", "p_beta", "q_alpha", "q_beta",
               "r_alpha", "r_beta", "s_alpha", "s_beta")
BLOCK_TRANSFORM = np.vstack([COMBINATIONS[name] for name in BLOCK_ORDER])


@dataclass(frozen=True)
class DriftMatrix8:
    """Normalized drift matrix M' over the quadrature basis."""

    matrix: np.ndarray = field(repr=False)
    sigma: float
    c: float


@dataclass(frozen=True)
class PumpInjectionMap:
    """Maps pump quadratures (p0x, q0x, p0y, q0y) onto the 8 cavity quadratures."""

    matrix: np.ndarray = field(repr=False)
    variance: float = DEFAULT_PUMP_VARIANCE

    def __post_init__(self):
        if self.variance <= 0.0:
            raise ParameterError(f"pump variance must be positive, got {self.variance}")


@dataclass(frozen=True)
class BlockDecomposition:
    """Orthogonal transform onto the +/- combinations and the resulting 4x4 blocks."""

    transform: np.ndarray = field(repr=False)
    m_plus: np.ndarray = field(repr=False)
    m_minus: np.ndarray = field(repr=False)

    def block_diagonal(self) -> np.ndarray:
        """diag(M+, M-) as an 8x8 matrix."""
        out = np.zeros((8, 8))
        out[:4, :4] = self.m_plus
        out[4:, 4:] = self.m_minus
        return out


@dataclass(frozen=True)
class SpectralMatrix:
    """
    Shot-noise normalized 8x8 output spectral covariance at one frequency.

    The covariance is held in the block basis (rows of BLOCK_TRANSFORM), where
    the sum and difference sectors are exactly uncoupled. At threshold the sum
    sector grows like 1/Omega^2 at low frequency; projections are taken in
    this basis so the small difference spectra keep full relative precision.
    """

    block: np.ndarray = field(repr=False)
    omega: float
    sigma: float
    c: float
    pump_variance: float = DEFAULT_PUMP_VARIANCE

    @property
    def matrix(self) -> np.ndarray:
        """Covariance over the quadrature basis (QuadratureBasis.LABELS order)."""
        return BLOCK_TRANSFORM.T @ self.block @ BLOCK_TRANSFORM

    @classmethod
    def vacuum(cls, omega: float = 1.0) -> "SpectralMatrix":
        """Spectral matrix of uncorrelated coherent (vacuum) fluctuations."""
        return cls(block=np.eye(8, dtype=complex), omega=omega, sigma=1.0, c=0.0)


def _check_drive(sigma: float, c: float):
    if sigma < 1.0:
        raise ParameterError(f"sigma must be >= 1 for the above-threshold linearization, got {sigma}")
    if c < 0.0:
        raise ParameterError(f"normalized coupling c must be >= 0, got {c}")


def _check_omega(omegas: np.ndarray):
    if np.any(~np.isfinite(omegas)) or np.any(omegas < OMEGA_MIN) or np.any(omegas > OMEGA_MAX):
        raise ParameterError(f"analysis frequencies must lie in [{OMEGA_MIN}, {OMEGA_MAX}]")


def build_drift(sigma: float, c: float) -> DriftMatrix8:
    """
    Build the normalized drift matrix M'.

    The cross-crystal amplitude coupling is -(sigma - 2), which is what M / kappa
    gives for the -kappa (sigma - 2) entries of the unnormalized matrix.

    Args:
        sigma: Reduced pump parameter (>= 1)
        c: Normalized coupling epsilon0 / kappa (>= 0)

    Returns:
        DriftMatrix8: the 8x8 real drift matrix
    """
    _check_drive(sigma, c)
    s, x = sigma, -(sigma - 2.0)
    matrix = np.array([
        [-s, -c, 0, c, 0, 0, x, 0],
        [c, -s, -c, 0, 0, 0, 0, -s],
        [0, c, -s, -c, x, 0, 0, 0],
        [-c, 0, c, -s, 0, -s, 0, 0],
        [0, 0, x, 0, -s, -c, 0, c],
        [0, 0, 0, -s, c, -s, -c, 0],
        [x, 0, 0, 0, 0, c, -s, -c],
        [0, -s, 0, 0, -c, 0, c, -s],
    ], dtype=float)
    return DriftMatrix8(matrix=matrix, sigma=sigma, c=c)


def physical_drift(kappa: float, epsilon0: float, sigma: float) -> np.ndarray:
    """Unnormalized drift matrix M (per round trip) with kappa explicit."""
    if kappa <= 0.0:
        raise ParameterError(f"kappa must be positive, got {kappa}")
    k, e = kappa, epsilon0
    d, x = -k * sigma, -k * (sigma - 2.0)
    return np.array([
        [d, -e, 0, e, 0, 0, x, 0],
        [e, d, -e, 0, 0, 0, 0, d],
        [0, e, d, -e, x, 0, 0, 0],
        [-e, 0, e, d, 0, d, 0, 0],
        [0, 0, x, 0, d, -e, 0, e],
        [0, 0, 0, d, e, d, -e, 0],
        [x, 0, 0, 0, 0, e, d, -e],
        [0, d, 0, 0, -e, 0, e, d],
    ], dtype=float)


def pump_injection(variance: float = DEFAULT_PUMP_VARIANCE) -> PumpInjectionMap:
    """Pump source pattern (p0x, q0x, p0y, q0y, p0y, q0y, p0x, q0x)."""
    matrix = np.zeros((8, 4))
    for row, col in enumerate((0, 1, 2, 3, 2, 3, 0, 1)):
        matrix[row, col] = 1.0
    return PumpInjectionMap(matrix=matrix, variance=variance)


def build_blocks(sigma: float, c: float) -> BlockDecomposition:
    """
    Transform onto the symmetric/antisymmetric combinations of each crystal's
    signal/idler pair. The sums and differences evolve independently.

    Returns:
        BlockDecomposition: transform T with rows in BLOCK_ORDER, M+ and M-
    """
    _check_drive(sigma, c)
    transform = BLOCK_TRANSFORM.copy()
    m_plus = np.array([
        [-2.0 * (sigma - 1.0), 0, -c, c],
        [0, -2.0 * (sigma - 1.0), c, -c],
        [c, -c, -2.0 * sigma, 0],
        [-c, c, 0, -2.0 * sigma],
    ], dtype=float)
    m_minus = np.array([
        [-2.0, 0, -c, -c],
        [0, -2.0, -c, -c],
        [c, c, 0, 0],
        [c, c, 0, 0],
    ], dtype=float)
    return BlockDecomposition(transform=transform, m_plus=m_plus, m_minus=m_minus)


def transfer_function_batch(omegas: Sequence[float], sigma: float, c: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Input-output transfer functions on a frequency grid.

    Solves (2i Omega - M') X = [2 I | sqrt(2 (sigma - 1)) P] by LU with partial
    pivoting for every frequency. kappa cancels and does not appear.

    Args:
        omegas: Normalized analysis frequencies
        sigma: Reduced pump parameter
        c: Normalized coupling

    Returns:
        tuple: (T_in with shape (n, 8, 8), T_pump with shape (n, 8, 4))
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    _check_omega(omegas)
    drift = build_drift(sigma, c).matrix
    injection = pump_injection().matrix

    system = 2j * omegas[:, None, None] * np.eye(8) - drift[None, :, :]
    rhs = np.hstack([2.0 * np.eye(8), math.sqrt(2.0 * (sigma - 1.0)) * injection]).astype(complex)
    rhs = np.broadcast_to(rhs, (len(omegas), 8, 12))
    try:
        solution = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"singular system 2i Omega - M': {exc}",
                           (float(omegas[0]), sigma, c)) from exc
    if not np.all(np.isfinite(solution)):
        bad = int(np.argmax(~np.all(np.isfinite(solution), axis=(1, 2))))
        raise NumericError("non-finite transfer function", (float(omegas[bad]), sigma, c))
    increment_counter("linear_solves", len(omegas))

    t_in = solution[:, :, :8] - np.eye(8)
    t_pump = solution[:, :, 8:]
    return t_in, t_pump


def transfer_functions(omega: float, sigma: float, c: float) -> Tuple[np.ndarray, np.ndarray]:
    """Transfer functions (T_in 8x8, T_pump 8x4) at a single frequency."""
    t_in, t_pump = transfer_function_batch([omega], sigma, c)
    return t_in[0], t_pump[0]


def block_transfer_batch(omegas: Sequence[float], sigma: float, c: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Transfer functions in the block basis, inputs rotated by the same transform.

    Each 4x4 block (2i Omega - M+-) is solved on its own, so the difference
    sector never picks up roundoff from the diverging sum sector. The pump
    reaches the sum sector only.

    Returns:
        tuple: (G_in with shape (n, 8, 8), G_pump with shape (n, 8, 4))
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    _check_omega(omegas)
    blocks = build_blocks(sigma, c)
    pump = BLOCK_TRANSFORM @ pump_injection().matrix
    pump_gain = math.sqrt(2.0 * (sigma - 1.0))
    n = len(omegas)

    g_in = np.zeros((n, 8, 8), dtype=complex)
    g_pump = np.zeros((n, 8, 4), dtype=complex)
    for rows, drift in ((slice(0, 4), blocks.m_plus), (slice(4, 8), blocks.m_minus)):
        system = 2j * omegas[:, None, None] * np.eye(4) - drift[None, :, :]
        rhs = np.hstack([2.0 * np.eye(4), pump_gain * pump[rows]]).astype(complex)
        try:
            solution = np.linalg.solve(system, np.broadcast_to(rhs, (n, 4, 8)))
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"singular block system 2i Omega - M: {exc}",
                               (float(omegas[0]), sigma, c)) from exc
        g_in[:, rows, rows] = solution[:, :, :4] - np.eye(4)
        g_pump[:, rows, :] = solution[:, :, 4:]
    if not np.all(np.isfinite(g_in)) or not np.all(np.isfinite(g_pump)):
        finite = np.all(np.isfinite(g_in), axis=(1, 2)) & np.all(np.isfinite(g_pump), axis=(1, 2))
        bad = int(np.argmax(~finite))
        raise NumericError("non-finite transfer function", (float(omegas[bad]), sigma, c))
    increment_counter("linear_solves", 2 * n)
    return g_in, g_pump


def spectral_matrix_batch(omegas: Sequence[float], sigma: float, c: float,
                          pump_variance: float = DEFAULT_PUMP_VARIANCE) -> List[SpectralMatrix]:
    """Spectral covariance matrices on a frequency grid, in input order."""
    if pump_variance <= 0.0:
        raise ParameterError(f"pump variance must be positive, got {pump_variance}")
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    g_in, g_pump = block_transfer_batch(omegas, sigma, c)
    spectra = g_in @ np.conj(np.swapaxes(g_in, 1, 2))
    spectra = spectra + pump_variance * (g_pump @ np.conj(np.swapaxes(g_pump, 1, 2)))
    spectra = 0.5 * (spectra + np.conj(np.swapaxes(spectra, 1, 2)))
    return [
        SpectralMatrix(block=spectra[k], omega=float(omegas[k]), sigma=sigma, c=c,
                       pump_variance=pump_variance)
        for k in range(len(omegas))
    ]


def spectral_matrix(omega: float, sigma: float, c: float,
                    pump_variance: float = DEFAULT_PUMP_VARIANCE) -> SpectralMatrix:
    """
    Output spectral covariance S = T_in T_in^H + v T_pump T_pump^H.

    Mirror inputs and pump quadratures are independent white noises, mirror
    inputs at the vacuum level 1 and pump quadratures at variance v.
    """
    return spectral_matrix_batch([omega], sigma, c, pump_variance)[0]


def spectral_grid(omegas: Sequence[float], sigma: float, c: float,
                  pump_variance: float = DEFAULT_PUMP_VARIANCE,
                  max_workers: int = 1, chunk_size: int = 256) -> List[SpectralMatrix]:
    """
    Spectral matrices over a frequency grid, optionally split across threads.

    Every frequency is solved independently, so the result does not depend on
    max_workers or chunk_size.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    chunks = [omegas[i:i + chunk_size] for i in range(0, len(omegas), chunk_size)]
    if max_workers <= 1 or len(chunks) == 1:
        results = [spectral_matrix_batch(chunk, sigma, c, pump_variance) for chunk in chunks]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            results = list(executor.map(
                lambda chunk: spectral_matrix_batch(chunk, sigma, c, pump_variance), chunks))
    return [matrix for chunk in results for matrix in chunk]


def normalized_covariance(S: SpectralMatrix, vectors: Sequence[Sequence[float]]) -> np.ndarray:
    """
    Symmetrized covariances u_i^T Re(S) u_j / (|u_i| |u_j|) of several real
    quadrature combinations at once.

    The diagonal holds the combination spectra (1 for vacuum), the
    off-diagonal entries the cross spectra.

    Args:
        S: Spectral matrix
        vectors: Coefficient vectors over QuadratureBasis.LABELS, one per row

    Returns:
        np.ndarray: (k, k) real matrix
    """
    coeffs = np.atleast_2d(np.asarray(vectors, dtype=float))
    rotated = coeffs @ BLOCK_TRANSFORM.T
    norms = np.diag(rotated @ rotated.T).copy()
    if np.any(norms == 0.0):
        raise ParameterError("combination coefficients must not all be zero")
    gram = rotated @ S.block.real @ rotated.T
    scale = np.sqrt(norms)
    out = gram / np.outer(scale, scale)
    out[np.diag_indices_from(out)] = np.diag(gram) / norms
    return out


def combination_spectrum(S: SpectralMatrix, coeffs: Sequence[float]) -> float:
    """
    Spectrum of a real linear combination of output quadratures, normalized by
    the squared norm of the coefficients (1 for vacuum).
    """
    return float(normalized_covariance(S, [coeffs])[0, 0])


def cross_spectrum(S: SpectralMatrix, u: Sequence[float], w: Sequence[float]) -> float:
    """Symmetrized cross spectrum u^T Re(S) w of two unit-normalized combinations."""
    return float(normalized_covariance(S, [u, w])[0, 1])


def spectral_denominator(omega: float, sigma: float, c: float) -> float:
    """Common denominator of the pump-sector spectra."""
    w2 = omega ** 2
    return (c ** 2 + sigma * (sigma - 1.0)) ** 2 + w2 - 2.0 * (c ** 2 - sigma * (sigma - 1.0)) * w2 + w2 ** 2


def _check_closed_form_omega(omega: float):
    if omega < OMEGA_MIN:
        raise ParameterError(f"closed-form spectra need omega >= {OMEGA_MIN}, got {omega}")


def printed_spectra(omega: float, sigma: float, c: float) -> Tuple[float, float, float, float]:
    """
    Closed-form spectra (S_p, S_q, S_r, S_s), identical for both crystals.

    S_q is the expression as published; see reconciled_spectra for the form
    that agrees with the linearized equations.
    """
    _check_closed_form_omega(omega)
    w2 = omega ** 2
    d = spectral_denominator(omega, sigma, c)
    g_minus = w2 + (w2 - c ** 2) ** 2
    s_p = 1.0 + 1.0 / (2.0 * (w2 + (sigma - 1.0) ** 2)) + (sigma ** 2 + w2 - c ** 2) / (2.0 * d)
    s_q = 1.0 - 1.0 / (w2 + sigma ** 2) - ((sigma - 1.0) ** 2 + w2 - c ** 2) / (2.0 * d)
    s_r = 1.0 - 1.0 / (2.0 * (1.0 + w2)) - (w2 - c ** 2) / (2.0 * g_minus)
    s_s = 1.0 + 1.0 / (2.0 * w2) + (1.0 + w2 - c ** 2) / (2.0 * g_minus)
    return s_p, s_q, s_r, s_s


def reconciled_spectra(omega: float, sigma: float, c: float) -> Tuple[float, float, float, float]:
    """
    Closed-form spectra with the phase-sum spectrum carrying the halved
    symmetric-mode term 1 / (2 (Omega^2 + sigma^2)).

    The phase sum q_u splits evenly between a mode damped at rate 2 sigma and
    the pump-driven difference sector, which gives the factor 1/2.
    """
    s_p, _, s_r, s_s = printed_spectra(omega, sigma, c)
    w2 = omega ** 2
    d = spectral_denominator(omega, sigma, c)
    s_q = 1.0 - 1.0 / (2.0 * (w2 + sigma ** 2)) - ((sigma - 1.0) ** 2 + w2 - c ** 2) / (2.0 * d)
    return s_p, s_q, s_r, s_s


@dataclass(frozen=True)
class SpectraGrid:
    """Sweep of operating points for the closed-form cross-check."""

    omegas: Tuple[float, ...]
    sigmas: Tuple[float, ...]
    cs: Tuple[float, ...]

    @classmethod
    def log_spaced(cls, omega_min: float, omega_max: float, points: int,
                   sigmas: Sequence[float], cs: Sequence[float]) -> "SpectraGrid":
        omegas = np.logspace(math.log10(omega_min), math.log10(omega_max), points)
        return cls(tuple(float(w) for w in omegas), tuple(sigmas), tuple(cs))


@dataclass
class Mismatch:
    """One closed-form vs numeric disagreement above tolerance."""

    spectrum: str
    crystal: str
    omega: float
    sigma: float
    c: float
    numeric: float
    closed_form: float

    @property
    def relative_error(self) -> float:
        return abs(self.numeric - self.closed_form) / max(abs(self.closed_form), 1e-300)


@dataclass
class ValidationReport:
    """Outcome of validate_spectra."""

    pump_variance: float
    tolerance: float
    max_errors: Dict[str, Dict[str, float]] = field(default_factory=dict)
    printed_q_errors: Dict[str, float] = field(default_factory=dict)
    mismatches: List[Mismatch] = field(default_factory=list)
    points: int = 0

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def regimes_with_mismatches(self) -> List[str]:
        return sorted({regime_label(m.sigma, m.c) for m in self.mismatches})


def regime_label(sigma: float, c: float) -> str:
    """Regime key used by the validation report, e.g. 'sigma>1,c=0'."""
    sigma_part = "sigma=1" if sigma == 1.0 else "sigma>1"
    c_part = "c=0" if c == 0.0 else "c>0"
    return f"{sigma_part},{c_part}"


def _relative_error(numeric: float, reference: float) -> float:
    return abs(numeric - reference) / max(abs(reference), 1e-300)


def validate_spectra(grid: SpectraGrid, pump_variance: float = DEFAULT_PUMP_VARIANCE,
                     tolerance: float = VALIDATION_RTOL, max_workers: int = 1) -> ValidationReport:
    """
    Compare numeric combination spectra of both crystals with the closed forms.

    Every (Omega, sigma, c) point is checked for the alpha and beta sets of
    (p, q, r, s) against reconciled_spectra. The deviation of the published
    S_q is tracked separately in printed_q_errors. Mismatches are report
    content, never exceptions.

    Returns:
        ValidationReport: maximum relative errors per regime and spectrum
    """
    timer_id = start_timer("validate_spectra")
    report = ValidationReport(pump_variance=pump_variance, tolerance=tolerance)
    sets = {
        "alpha": ("p_alpha", "q_alpha", "r_alpha", "s_alpha"),
        "beta": ("p_beta", "q_beta", "r_beta", "s_beta"),
    }
    logger.info(f"Validating closed-form spectra: {len(grid.omegas)} frequencies x "
                f"{len(grid.sigmas)} sigma x {len(grid.cs)} c, pump variance {pump_variance}")

    for sigma in grid.sigmas:
        for c in grid.cs:
            regime = regime_label(sigma, c)
            errors = report.max_errors.setdefault(regime, {name: 0.0 for name in SPECTRUM_NAMES})
            matrices = spectral_grid(grid.omegas, sigma, c, pump_variance, max_workers=max_workers)
            for S in matrices:
                reference = reconciled_spectra(S.omega, sigma, c)
                printed_q = printed_spectra(S.omega, sigma, c)[1]
                for crystal, names in sets.items():
                    for spectrum, combo, ref in zip(SPECTRUM_NAMES, names, reference):
                        numeric = combination_spectrum(S, COMBINATIONS[combo])
                        err = _relative_error(numeric, ref)
                        errors[spectrum] = max(errors[spectrum], err)
                        if err > tolerance:
                            report.mismatches.append(Mismatch(spectrum, crystal, S.omega, sigma, c, numeric, ref))
                        if spectrum == "S_q":
                            q_err = _relative_error(numeric, printed_q)
                            report.printed_q_errors[regime] = max(report.printed_q_errors.get(regime, 0.0), q_err)
                report.points += 1
            logger.debug(f"Validated sigma={sigma}, c={c}: {errors}")

    increment_counter("validation_points", report.points)
    increment_counter("validation_mismatches", len(report.mismatches))
    stop_timer(timer_id)
    if report.passed:
        logger.info(f"Closed-form validation passed on {report.points} points")
    else:
        logger.warning(f"Closed-form validation found {len(report.mismatches)} mismatches "
                       f"in regimes {report.regimes_with_mismatches()}")
    return report
