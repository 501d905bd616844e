"""Truncated Fock-basis states for a single optical mode.

Kets and density matrices live on photon numbers ``0..d-1``. Constructors
renormalize over the truncated support and keep the population that fell
beyond the cutoff (``tail``) so callers can judge whether ``d`` is large
enough.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np
from scipy.special import gammainc, gammaln

from .errors import DomainError, TruncationWarning

DEFAULT_DIM = 12
TRUNCATION_THRESHOLD = 1e-3

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"

    @property
    def bit(self) -> int:
        """Photon-number residue mod 2 carried by the parity sector."""
        return 0 if self is Parity.EVEN else 1

    @property
    def sign(self) -> int:
        return 1 if self is Parity.EVEN else -1

    @property
    def flipped(self) -> "Parity":
        return Parity.ODD if self is Parity.EVEN else Parity.EVEN


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FockKet:
    """Normalized pure state ``sum_n c_n |n>`` on ``n < dim``.

    ``tail`` is the population beyond ``dim - 1`` of the untruncated state,
    measured before renormalization (0 when unknown).
    """

    amps: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amps))
        object.__setattr__(self, "amps", amps)
        if amps.size < 2:
            raise DomainError(f"Fock dimension must be >= 2, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise DomainError("ket amplitudes must be finite")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"ket is not normalized (norm^2 = {norm!r})")

    @property
    def dim(self) -> int:
        return self.amps.size

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace operator in the Fock basis."""

    elements: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        rho = _frozen(self.elements)
        object.__setattr__(self, "elements", rho)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise DomainError(f"density matrix must be square, got shape {rho.shape}")
        if rho.shape[0] < 2:
            raise DomainError(f"Fock dimension must be >= 2, got {rho.shape[0]}")
        if not np.all(np.isfinite(rho)):
            raise DomainError("density matrix has non-finite entries")
        herm = float(np.max(np.abs(rho - rho.conj().T)))
        if herm > HERMITIAN_TOL:
            raise DomainError(f"density matrix is not Hermitian (residual {herm:.3g})")
        tr = float(np.trace(rho).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise DomainError(f"density matrix trace is {tr!r}, expected 1")
        lam_min = float(np.linalg.eigvalsh(rho)[0])
        if lam_min < -PSD_TOL:
            raise DomainError(f"density matrix is not PSD (min eigenvalue {lam_min:.3g})")

    @classmethod
    def from_array(cls, rho, tail: float = 0.0) -> "DensityMatrix":
        """Build from a float-noisy array: symmetrize and fix the trace first."""
        rho = np.asarray(rho, dtype=complex)
        rho = 0.5 * (rho + rho.conj().T)
        return cls(rho / np.trace(rho).real, tail=tail)

    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    @property
    def populations(self) -> np.ndarray:
        return np.clip(np.diag(self.elements).real, 0.0, None)

    def purity(self) -> float:
        rho = self.elements
        return float(np.einsum("ij,ji->", rho, rho).real)


def as_matrix(state) -> np.ndarray:
    """Density-matrix array for a ket, DensityMatrix or raw square array."""
    if isinstance(state, DensityMatrix):
        return state.elements
    if isinstance(state, FockKet):
        return np.outer(state.amps, state.amps.conj())
    return np.asarray(state, dtype=complex)


def ket_to_density(ket: FockKet) -> DensityMatrix:
    rho = np.outer(ket.amps, ket.amps.conj())
    return DensityMatrix(rho, tail=ket.tail)


def basis_ket(n: int, d: int = DEFAULT_DIM) -> FockKet:
    if not 0 <= n < d:
        raise DomainError(f"photon number {n} outside 0..{d - 1}")
    amps = np.zeros(d, dtype=complex)
    amps[n] = 1.0
    return FockKet(amps)


def fock_density(n: int, d: int = DEFAULT_DIM) -> DensityMatrix:
    return ket_to_density(basis_ket(n, d))


def annihilation(d: int) -> np.ndarray:
    """Truncated ladder operator with ``a[n-1, n] = sqrt(n)``."""
    return np.diag(np.sqrt(np.arange(1, d, dtype=float)), 1)


def number_operator(d: int) -> np.ndarray:
    return np.diag(np.arange(d, dtype=float))


def mean_photon_number(state) -> float:
    rho = as_matrix(state)
    return float(np.dot(np.arange(rho.shape[0]), np.diag(rho).real))


def _check_dim(d: int) -> int:
    if int(d) != d or d < 2:
        raise DomainError(f"Fock dimension must be an integer >= 2, got {d!r}")
    return int(d)


def _warn_tail(tail: float, d: int, threshold: float = TRUNCATION_THRESHOLD) -> None:
    if tail > threshold:
        limit = np.format_float_scientific(threshold, trim="-", exp_digits=1)
        warnings.warn(
            f"tail mass exceeds {limit}: {tail:.3e} of the population lies above "
            f"photon number {d - 1}",
            TruncationWarning,
            stacklevel=3,
        )


def _renormalized(amps: np.ndarray, tail: float, d: int) -> FockKet:
    amps = amps / np.linalg.norm(amps)
    _warn_tail(tail, d)
    return FockKet(amps, tail=float(tail))


def coherent_ket(alpha: complex, d: int = DEFAULT_DIM) -> FockKet:
    """Coherent state |alpha>, c_n ~ alpha^n / sqrt(n!), renormalized on n < d."""
    d = _check_dim(d)
    if not np.isfinite(alpha):
        raise DomainError(f"coherent amplitude must be finite, got {alpha!r}")
    r = abs(alpha)
    amps = np.zeros(d, dtype=complex)
    if r == 0:
        amps[0] = 1.0
        return FockKet(amps)
    n = np.arange(d)
    logmag = -0.5 * r * r + n * math.log(r) - 0.5 * gammaln(n + 1)
    amps = np.exp(logmag) * np.exp(1j * n * np.angle(alpha))
    # Poisson survival function P(N >= d).
    tail = float(gammainc(d, r * r))
    return _renormalized(amps, tail, d)


def _cat_log_weights(alpha: float, n: np.ndarray) -> np.ndarray:
    return 2 * n * math.log(alpha) - gammaln(n + 1)


def _cat_log_norm(alpha: float, parity: Parity) -> float:
    """log(cosh a^2) for even, log(sinh a^2) for odd."""
    a2 = alpha * alpha
    e = math.exp(-2 * a2)
    if parity is Parity.EVEN:
        return a2 - math.log(2) + math.log1p(e)
    return a2 - math.log(2) + math.log(-math.expm1(-2 * a2))


def cat_tail(alpha: float, parity: Parity | str, d: int) -> float:
    """Population of the ideal cat above photon number d-1, summed directly."""
    parity = Parity(parity)
    if alpha == 0:
        return 0.0
    start = d if d % 2 == parity.bit else d + 1
    stop = start + 2 * (int(alpha * alpha) + 200)
    n = np.arange(start, stop, 2)
    return float(np.sum(np.exp(_cat_log_weights(alpha, n) - _cat_log_norm(alpha, parity))))


@dataclass(frozen=True)
class CatSpec:
    """Ideal cat (|alpha> +/- |-alpha>) / sqrt(N+/-) truncated to dimension ``dim``."""

    alpha: float
    parity: Parity = Parity.ODD
    dim: int = DEFAULT_DIM
    threshold: float = TRUNCATION_THRESHOLD

    def __post_init__(self):
        object.__setattr__(self, "parity", Parity(self.parity))
        object.__setattr__(self, "dim", _check_dim(self.dim))
        if not math.isfinite(self.alpha) or self.alpha < 0:
            raise DomainError(f"cat amplitude must be finite and >= 0, got {self.alpha!r}")
        if self.parity is Parity.ODD and self.alpha == 0:
            raise DomainError("odd cat with alpha = 0 has zero norm")

    @cached_property
    def tail_mass(self) -> float:
        return cat_tail(self.alpha, self.parity, self.dim)


def cat_ket(spec: CatSpec) -> FockKet:
    d = spec.dim
    amps = np.zeros(d, dtype=complex)
    if spec.alpha == 0:
        amps[0] = 1.0
        return FockKet(amps)
    n = np.arange(spec.parity.bit, d, 2)
    # Scale by the largest weight so huge alpha does not overflow before renormalizing.
    logw = 0.5 * _cat_log_weights(spec.alpha, n)
    amps[n] = np.exp(logw - logw.max())
    tail = spec.tail_mass
    _warn_tail(tail, d, spec.threshold)
    return FockKet(amps / np.linalg.norm(amps), tail=tail)


def cat_density(alpha: float, parity: Parity | str = Parity.ODD, d: int = DEFAULT_DIM) -> DensityMatrix:
    return ket_to_density(cat_ket(CatSpec(alpha, Parity(parity), d)))


def db_to_squeezing(db: float) -> float:
    """Squeezing parameter r for a quadrature-variance change of ``db`` decibels.

    Uses e^{-2r} = 10^{-|dB|/10}; -3 dB and 3 dB give the same r.
    """
    return abs(db) * math.log(10) / 20


@dataclass(frozen=True)
class SqueezeSpec:
    r: float
    dim: int = DEFAULT_DIM

    def __post_init__(self):
        object.__setattr__(self, "dim", _check_dim(self.dim))
        if not math.isfinite(self.r) or self.r < 0:
            raise DomainError(f"squeezing parameter must be finite and >= 0, got {self.r!r}")

    @classmethod
    def from_db(cls, db: float, dim: int = DEFAULT_DIM) -> "SqueezeSpec":
        return cls(db_to_squeezing(db), dim)

    @property
    def variance_ratio(self) -> float:
        """Squeezed-quadrature variance relative to vacuum."""
        return math.exp(-2 * self.r)


def squeezed_vacuum_ket(spec: SqueezeSpec) -> FockKet:
    """Squeezed vacuum with the x quadrature squeezed.

    c_{2m} = (-tanh r)^m sqrt((2m)!) / (2^m m!) / sqrt(cosh r).
    """
    d = spec.dim
    amps = np.zeros(d, dtype=complex)
    if spec.r == 0:
        amps[0] = 1.0
        return FockKet(amps)
    t = math.tanh(spec.r)
    m = np.arange(0, d // 2 + 4000)
    logmag = (
        0.5 * gammaln(2 * m + 1)
        - m * math.log(2)
        - gammaln(m + 1)
        + m * math.log(t)
        - 0.5 * math.log(math.cosh(spec.r))
    )
    inside = 2 * m < d
    amps[2 * m[inside]] = np.exp(logmag[inside]) * (-1.0) ** m[inside]
    tail = float(np.sum(np.exp(2 * logmag[~inside])))
    return _renormalized(amps, tail, d)


def rotate(state, theta: float) -> DensityMatrix:
    """Phase-space rotation exp(i theta n) rho exp(-i theta n)."""
    rho = as_matrix(state)
    phase = np.exp(1j * theta * np.arange(rho.shape[0]))
    tail = getattr(state, "tail", 0.0)
    return DensityMatrix.from_array(phase[:, None] * rho * phase.conj()[None, :], tail=tail)


def photon_subtract(rho) -> DensityMatrix:
    """Heralded single-photon subtraction a rho a^dagger / Tr[a rho a^dagger].

    The top Fock level empties, so the result keeps dimension d with a zero
    last row and column.
    """
    mat = as_matrix(rho)
    a = annihilation(mat.shape[0])
    out = a @ mat @ a.conj().T
    prob = float(np.trace(out).real)
    if prob <= 1e-14:
        raise DomainError("zero subtraction probability: input has no photons")
    return DensityMatrix.from_array(out / prob)


def tail_mass(state, cutoff: int | None = None) -> float:
    """Population above photon number ``cutoff``.

    Includes the pre-normalization tail stored on the state when there is one,
    so ``cutoff = dim - 1`` reports exactly what the constructor dropped.
    """
    if isinstance(state, FockKet):
        pops, stored = state.populations, state.tail
    elif isinstance(state, DensityMatrix):
        pops, stored = state.populations, state.tail
    else:
        pops, stored = np.clip(np.diag(as_matrix(state)).real, 0, None), 0.0
    d = pops.size
    if cutoff is None:
        cutoff = d - 1
    if not 0 <= cutoff < d:
        raise DomainError(f"cutoff must lie in 0..{d - 1}, got {cutoff}")
    return float(stored + (1.0 - stored) * pops[cutoff + 1:].sum())


def validate_density(rho) -> DensityMatrix:
    """Coerce to a checked DensityMatrix (raises DomainError on violations)."""
    if isinstance(rho, DensityMatrix):
        return rho
    if isinstance(rho, FockKet):
        return ket_to_density(rho)
    return DensityMatrix(np.asarray(rho, dtype=complex))


__all__ = [
    "DEFAULT_DIM",
    "TRUNCATION_THRESHOLD",
    "Parity",
    "FockKet",
    "DensityMatrix",
    "CatSpec",
    "SqueezeSpec",
    "as_matrix",
    "annihilation",
    "basis_ket",
    "cat_density",
    "cat_ket",
    "cat_tail",
    "coherent_ket",
    "db_to_squeezing",
    "fock_density",
    "ket_to_density",
    "mean_photon_number",
    "number_operator",
    "photon_subtract",
    "rotate",
    "squeezed_vacuum_ket",
    "tail_mass",
    "validate_density",
]
