"""Coherence, fidelity and negativity quantifiers in the Fock basis.

Entropies are in bits. Matrix-level measures work on any density matrix;
the ``cat_*`` and ``*_analytic`` functions are closed forms for ideal cats
used to cross-check them.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import gammaln

from .channels import LossSpec, _eta, _norm_factor, conversion_probability
from .errors import DomainError
from .fock import DEFAULT_DIM, Parity, as_matrix, cat_density

EIG_CLAMP = 1e-10
COHERENCE_CLAMP = 1e-9


def _hermitian(rho) -> np.ndarray:
    mat = as_matrix(rho)
    return 0.5 * (mat + mat.conj().T)


def _shannon_bits(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def _spectrum(rho) -> np.ndarray:
    lam = np.linalg.eigvalsh(_hermitian(rho))
    if lam[0] < -EIG_CLAMP:
        raise DomainError(f"state is not positive semidefinite (eigenvalue {lam[0]:.3g})")
    return np.clip(lam, 0.0, None)


def von_neumann_entropy(rho) -> float:
    """S(rho) = -Tr[rho log2 rho] with 0 log 0 = 0."""
    return _shannon_bits(_spectrum(rho))


def _clamp_nonneg(value: float, what: str) -> float:
    if value < -COHERENCE_CLAMP:
        raise DomainError(f"{what} came out negative ({value:.3g})")
    return max(value, 0.0)


def rel_entropy_coherence(rho) -> float:
    """Relative entropy of coherence S(rho_diag) - S(rho), in bits."""
    mat = _hermitian(rho)
    diag = np.clip(np.diag(mat).real, 0.0, None)
    return _clamp_nonneg(_shannon_bits(diag) - von_neumann_entropy(mat), "relative entropy of coherence")


def l1_coherence(rho) -> float:
    """Sum of |rho_mn| over off-diagonal entries."""
    mat = as_matrix(rho)
    return float(np.sum(np.abs(mat)) - np.sum(np.abs(np.diag(mat))))


def _truncated_cat_weights(alpha: float, parity: Parity, d: int, renormalize: bool) -> np.ndarray:
    """Photon-number distribution of the cat restricted to n < d.

    With ``renormalize=False`` the weights alpha^{2n}/n! are divided by the
    untruncated cosh/sinh(alpha^2) and do not sum to one.
    """
    n = np.arange(parity.bit, d, 2)
    logw = 2 * n * math.log(alpha) - gammaln(n + 1)
    if renormalize:
        w = np.exp(logw - logw.max())
        return w / w.sum()
    a2 = alpha * alpha
    lognorm = a2 - math.log(2) + (math.log1p(math.exp(-2 * a2)) if parity is Parity.EVEN
                                  else math.log(-math.expm1(-2 * a2)))
    return np.exp(logw - lognorm)


def cat_rel_entropy_truncated(alpha: float, parity: Parity | str, d: int = DEFAULT_DIM,
                              renormalize: bool = True) -> float:
    """Relative entropy of coherence of an ideal cat in d dimensions (bits).

    For a pure state this is the Shannon entropy of the populations,
    -sum_n p_n log2 p_n with p_n = (alpha^{2n}/n!) / Z on the parity support.
    ``renormalize=False`` uses Z = cosh/sinh(alpha^2) instead of the truncated sum.
    """
    parity = Parity(parity)
    if alpha == 0:
        return 0.0
    p = _truncated_cat_weights(alpha, parity, d, renormalize)
    return float(-np.sum(p * np.log2(p)))


def cat_l1_truncated(alpha: float, parity: Parity | str, d: int = DEFAULT_DIM,
                     renormalize: bool = True) -> float:
    """l1 coherence of an ideal cat in d dimensions: sum_{m != n} sqrt(p_m p_n)."""
    parity = Parity(parity)
    if alpha == 0:
        return 0.0
    p = _truncated_cat_weights(alpha, parity, d, renormalize)
    return float(np.sum(np.sqrt(p)) ** 2 - np.sum(p))


@dataclass(frozen=True)
class CoherenceReport:
    c_rel_ent: float
    c_l1: float
    dim: int
    basis: str = "Fock"

    def to_dict(self) -> dict:
        return {"c_rel_ent": self.c_rel_ent, "c_l1": self.c_l1, "dim": self.dim}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def coherence_report(rho) -> CoherenceReport:
    mat = as_matrix(rho)
    return CoherenceReport(rel_entropy_coherence(mat), l1_coherence(mat), mat.shape[0])


def lossy_cat_coherence(alpha: float, parity: Parity | str, loss: LossSpec | float,
                        d: int = DEFAULT_DIM) -> CoherenceReport:
    """Coherence of an ideal cat after loss, from the two-component mixture.

    C(alpha, eta) = (1 - P) C_same(sqrt(eta) alpha) + P C_flipped(sqrt(eta) alpha).
    Exact because the two components occupy orthogonal parity sectors.
    """
    parity = Parity(parity)
    eta = _eta(loss)
    p_flip = conversion_probability(alpha, parity, eta)
    beta = math.sqrt(eta) * alpha
    rel = l1 = 0.0
    for weight, par in ((1.0 - p_flip, parity), (p_flip, parity.flipped)):
        if weight == 0.0:
            continue
        rel += weight * cat_rel_entropy_truncated(beta, par, d)
        l1 += weight * cat_l1_truncated(beta, par, d)
    return CoherenceReport(rel, l1, d)


def fidelity_to_cat(rho, alpha_ref: float, parity: Parity | str = Parity.ODD) -> float:
    """Overlap Tr[rho rho_cat(alpha_ref)] with the ideal cat at the same dimension."""
    mat = as_matrix(rho)
    parity = Parity(parity)
    if alpha_ref == 0 and parity is Parity.ODD:
        # Limit of the odd cat as alpha -> 0 is |1>.
        return float(mat[1, 1].real)
    cat = cat_density(alpha_ref, parity, mat.shape[0]).elements
    return float(np.einsum("ij,ji->", mat, cat).real)


def fidelity_loss_analytic(alpha: float, loss: LossSpec | float) -> float:
    """Fidelity of the lossy odd cat to the odd cat of amplitude sqrt(eta) alpha.

    F = cosh(-alpha^2 (1 - eta)) sinh(eta alpha^2) / sinh(alpha^2).
    """
    eta = _eta(loss)
    if not alpha > 0:
        raise DomainError(f"cat amplitude must be > 0, got {alpha!r}")
    a2 = alpha * alpha
    return math.cosh(-a2 * (1 - eta)) * math.sinh(eta * a2) / math.sinh(a2)


def wigner_origin_analytic(alpha: float, loss: LossSpec | float) -> float:
    """W(0, 0) of the lossy odd cat, (1/(pi N-)) e^{-2 a^2 eta} (2 - 2 e^{-2 a^2 (1 - 2 eta)})."""
    eta = _eta(loss)
    if not alpha > 0:
        raise DomainError(f"cat amplitude must be > 0, got {alpha!r}")
    a2 = alpha * alpha
    n_minus = _norm_factor(alpha, -1)
    return math.exp(-2 * a2 * eta) * (2 - 2 * math.exp(-2 * a2 * (1 - 2 * eta))) / (math.pi * n_minus)


def negativity_analytic(alpha: float, loss: LossSpec | float) -> float:
    """Wigner negativity min{0, W(0,0)} of the lossy odd cat."""
    return min(0.0, wigner_origin_analytic(alpha, loss))


@dataclass(frozen=True)
class DecoherenceCurvePoint:
    eta: float
    c_rel_ent: float
    c_l1: float
    fidelity: float
    negativity: float

    def to_dict(self) -> dict:
        return asdict(self)


def ideal_curve_point(alpha: float, eta: float, d: int = DEFAULT_DIM) -> DecoherenceCurvePoint:
    """All four decoherence quantities for the ideal odd cat from closed forms."""
    coh = lossy_cat_coherence(alpha, Parity.ODD, eta, d)
    return DecoherenceCurvePoint(
        eta=eta,
        c_rel_ent=coh.c_rel_ent,
        c_l1=coh.c_l1,
        fidelity=fidelity_loss_analytic(alpha, eta),
        negativity=negativity_analytic(alpha, eta),
    )


__all__ = [
    "CoherenceReport",
    "DecoherenceCurvePoint",
    "cat_l1_truncated",
    "cat_rel_entropy_truncated",
    "coherence_report",
    "fidelity_loss_analytic",
    "fidelity_to_cat",
    "ideal_curve_point",
    "l1_coherence",
    "lossy_cat_coherence",
    "negativity_analytic",
    "rel_entropy_coherence",
    "von_neumann_entropy",
    "wigner_origin_analytic",
]
