"""Pure-loss (beam splitter to vacuum) channel on truncated Fock space."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .errors import DomainError
from .fock import DEFAULT_DIM, DensityMatrix, Parity, as_matrix, cat_density


@dataclass(frozen=True)
class LossSpec:
    """Intensity transmission ``eta`` of the lossy channel."""

    eta: float

    def __post_init__(self):
        if not (math.isfinite(self.eta) and 0.0 <= self.eta <= 1.0):
            raise DomainError(f"transmission efficiency must lie in [0, 1], got {self.eta!r}")


def _eta(loss: LossSpec | float) -> float:
    if isinstance(loss, LossSpec):
        return loss.eta
    return LossSpec(float(loss)).eta


def kraus_operators(loss: LossSpec | float, d: int) -> np.ndarray:
    """Stack of Kraus operators A_k, k = 0..d-1, with shape (d, d, d).

    <n-k| A_k |n> = sqrt(C(n, k) eta^(n-k) (1-eta)^k): k photons leak to the
    environment.
    """
    eta = _eta(loss)
    k, n = np.divmod(np.arange(d * d), d)
    keep = n >= k
    k, n = k[keep], n[keep]
    A = np.zeros((d, d, d))
    A[k, n - k, n] = np.sqrt(binom.pmf(k, n, 1.0 - eta))
    return A


def _vacuum(d: int) -> DensityMatrix:
    rho = np.zeros((d, d), dtype=complex)
    rho[0, 0] = 1.0
    return DensityMatrix(rho)


def loss_channel(rho, loss: LossSpec | float) -> DensityMatrix:
    """Apply the pure-loss channel sum_k A_k rho A_k^dagger."""
    eta = _eta(loss)
    mat = as_matrix(rho)
    d = mat.shape[0]
    if eta == 0.0:
        return _vacuum(d)
    if eta == 1.0:
        return DensityMatrix.from_array(mat)
    A = kraus_operators(eta, d)
    out = (A @ mat @ A.transpose(0, 2, 1)).sum(axis=0)
    return DensityMatrix.from_array(out)


def dual_loss_on_operator(op, loss: LossSpec | float) -> np.ndarray:
    """Heisenberg-picture loss sum_k A_k^dagger op A_k.

    Satisfies Tr[op L(rho)] = Tr[L^dagger(op) rho] and maps identity to identity.
    """
    eta = _eta(loss)
    op = np.asarray(op, dtype=complex)
    if eta == 1.0:
        return op.copy()
    A = kraus_operators(eta, op.shape[0])
    return (A.transpose(0, 2, 1) @ op @ A).sum(axis=0)


def _norm_factor(x: float, sign: int) -> float:
    """N+/-(x) = 2 (1 +/- exp(-2 x^2)), written to stay accurate for small x."""
    if sign > 0:
        return 2.0 * (1.0 + math.exp(-2 * x * x))
    return -2.0 * math.expm1(-2 * x * x)


def conversion_probability(alpha: float, parity: Parity | str, loss: LossSpec | float) -> float:
    """Probability that loss flips the cat's photon-number parity.

    P = N_flipped(sqrt(eta) alpha) / (2 N_same(alpha)) * (1 - exp(-2 (1 - eta) alpha^2)).
    """
    eta = _eta(loss)
    parity = Parity(parity)
    if not (math.isfinite(alpha) and alpha > 0):
        raise DomainError(f"cat amplitude must be > 0, got {alpha!r}")
    beta = math.sqrt(eta) * alpha
    flip = _norm_factor(beta, parity.flipped.sign) / (2 * _norm_factor(alpha, parity.sign))
    return flip * -math.expm1(-2 * (1 - eta) * alpha * alpha)


def cat_loss_analytic(
    alpha: float,
    parity: Parity | str,
    loss: LossSpec | float,
    d: int = DEFAULT_DIM,
) -> DensityMatrix:
    """Closed-form lossy cat: (1 - P) rho_same(sqrt(eta) alpha) + P rho_flipped(sqrt(eta) alpha).

    Each component is the truncated cat renormalized on n < d, so the mixture
    has unit trace and no coherence between the parity sectors.
    """
    eta = _eta(loss)
    parity = Parity(parity)
    p_flip = conversion_probability(alpha, parity, eta)
    if eta == 0.0:
        return _vacuum(d)
    beta = math.sqrt(eta) * alpha
    same = cat_density(beta, parity, d)
    rho = (1.0 - p_flip) * same.elements
    tail = (1.0 - p_flip) * same.tail
    if p_flip > 0.0:
        flipped = cat_density(beta, parity.flipped, d)
        rho = rho + p_flip * flipped.elements
        tail += p_flip * flipped.tail
    return DensityMatrix.from_array(rho, tail=tail)


def trace_distance(rho, sigma) -> float:
    diff = as_matrix(rho) - as_matrix(sigma)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))


__all__ = [
    "LossSpec",
    "cat_loss_analytic",
    "conversion_probability",
    "dual_loss_on_operator",
    "kraus_operators",
    "loss_channel",
    "trace_distance",
]
