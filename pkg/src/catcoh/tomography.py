"""Homodyne sampling and iterative maximum-likelihood state reconstruction.

Detector inefficiency is folded into the POVM with the dual loss map, so the
reconstructed state is the one *before* detection loss.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import dual_loss_on_operator, loss_channel
from .errors import DomainError
from .fock import DensityMatrix, as_matrix, validate_density
from .wigner import quadrature_marginal, quadrature_wavefunctions

GENERATOR_NOTE = "numpy PCG64, SeedSequence(seed, spawn_key=(phase_index,))"
COMPLETENESS_ERROR = 1e-2
COMPLETENESS_REQUIRED = 1e-3


class POVMIncompleteError(DomainError):
    pass


@dataclass(frozen=True)
class QuadratureRecord:
    """Homodyne samples: phase ``thetas[i]`` in [0, pi) and outcome ``xs[i]``."""

    thetas: np.ndarray
    xs: np.ndarray
    seed: int | None = None
    source_note: str = ""

    def __post_init__(self):
        thetas = np.asarray(self.thetas, dtype=float).ravel()
        xs = np.asarray(self.xs, dtype=float).ravel()
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "xs", xs)
        if thetas.size == 0:
            raise DomainError("quadrature record is empty")
        if thetas.shape != xs.shape:
            raise DomainError("theta and x columns differ in length")
        if not (np.all(np.isfinite(thetas)) and np.all(np.isfinite(xs))):
            raise DomainError("quadrature record contains non-finite values")
        if np.any(thetas < 0) or np.any(thetas >= math.pi):
            raise DomainError("phases must lie in [0, pi)")

    def __len__(self) -> int:
        return self.xs.size


@dataclass(frozen=True)
class TomoConfig:
    cutoff: int = 11
    eta_det: float = 0.8
    n_phase_bins: int = 12
    n_x_bins: int = 200
    x_range: tuple[float, float] = (-6.0, 6.0)
    max_iters: int = 2000
    loglik_tol: float = 1e-9
    prob_floor: float = 1e-12

    def __post_init__(self):
        if self.cutoff < 1:
            raise DomainError("cutoff must be >= 1")
        if not 0.0 < self.eta_det <= 1.0:
            raise DomainError("detection efficiency must lie in (0, 1]")
        if self.n_phase_bins < 1 or self.n_x_bins < 4:
            raise DomainError("need at least one phase bin and four x bins")
        if self.max_iters < 1:
            raise DomainError("max_iters must be >= 1")
        lo, hi = self.x_range
        if not lo < hi:
            raise DomainError("x_range must be increasing")

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    @property
    def phases(self) -> np.ndarray:
        return np.arange(self.n_phase_bins) * math.pi / self.n_phase_bins

    @property
    def x_edges(self) -> np.ndarray:
        return np.linspace(*self.x_range, self.n_x_bins + 1)


@dataclass
class TomoResult:
    rho_hat: DensityMatrix
    iterations: int
    final_loglik: float
    converged: bool
    loglik_trace: list[float] = field(default_factory=list)
    dropped_samples: int = 0

    def sidecar(self) -> dict:
        return {
            "iterations": self.iterations,
            "final_loglik": self.final_loglik,
            "converged": self.converged,
        }


def _phase_list(phases, n: int) -> np.ndarray:
    if isinstance(phases, str):
        if phases != "uniform":
            raise DomainError(f"unknown phase scheme {phases!r}")
        return np.arange(n) * math.pi / n
    arr = np.asarray(phases, dtype=float).ravel()
    if arr.size == 0 or np.any(arr < 0) or np.any(arr >= math.pi):
        raise DomainError("phases must be a nonempty list in [0, pi)")
    return arr


def sample_homodyne(
    rho,
    n: int,
    phases="uniform",
    eta_det: float = 1.0,
    seed: int = 0,
    n_phases: int = 12,
    x_extent: float = 8.0,
    table_points: int = 8001,
) -> QuadratureRecord:
    """Draw ``n`` homodyne outcomes by inverse-CDF sampling of pr(x | theta).

    The state is first sent through ``loss_channel(rho, eta_det)``. Samples are
    split evenly over the phases (the first ``n % len(phases)`` phases get one
    extra); phase k uses its own stream spawned from ``seed``, so results do not
    depend on evaluation order.
    """
    if n < 1:
        raise DomainError("need at least one sample")
    degraded = loss_channel(validate_density(rho), eta_det)
    phase_list = _phase_list(phases, n_phases)
    counts = np.full(phase_list.size, n // phase_list.size)
    counts[: n % phase_list.size] += 1
    grid = np.linspace(-x_extent, x_extent, table_points)
    thetas, xs = [], []
    for k, (theta, m) in enumerate(zip(phase_list, counts)):
        if m == 0:
            continue
        pdf = quadrature_marginal(degraded, theta, grid)
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(grid))])
        cdf /= cdf[-1]
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))
        xs.append(np.interp(rng.random(m), cdf, grid))
        thetas.append(np.full(m, theta))
    return QuadratureRecord(
        np.concatenate(thetas),
        np.concatenate(xs),
        seed=seed,
        source_note=f"{GENERATOR_NOTE}; eta_det={eta_det!r}",
    )


def _bin_overlaps(edges: np.ndarray, d: int, order: int = 12) -> np.ndarray:
    """O[b, m, n] = integral over bin b of psi_m psi_n dx (Gauss-Legendre per bin)."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    pts = (0.5 * (hi + lo))[:, None] + half[:, None] * nodes[None, :]
    psi = quadrature_wavefunctions(pts.ravel(), d).reshape(d, *pts.shape)
    w = half[:, None] * weights[None, :]
    return np.einsum("mbq,nbq,bq->bmn", psi, psi, w)


def completeness_residual(povm: np.ndarray) -> float:
    """Largest spectral-norm deviation of sum_bins Pi from identity over phases."""
    d = povm.shape[-1]
    sums = povm.sum(axis=1) - np.eye(d)
    return float(max(np.linalg.norm(s, 2) for s in sums))


def build_povm(config: TomoConfig, phases=None) -> np.ndarray:
    """Loss-smeared binned quadrature projectors, shape (n_phase, n_x, d, d).

    Pi[k, b] = L^dagger_{eta_det}( integral_bin |x_theta_k><x_theta_k| dx ) with
    <m|x_theta> = e^{i m theta} psi_m(x).
    """
    d = config.dim
    phases = config.phases if phases is None else np.atleast_1d(np.asarray(phases, dtype=float))
    overlaps = _bin_overlaps(config.x_edges, d)
    if config.eta_det < 1.0:
        overlaps = np.stack([dual_loss_on_operator(o, config.eta_det).real for o in overlaps])
    m = np.arange(d)
    rot = np.exp(1j * np.outer(phases, m))
    povm = np.einsum("km,bmn,kn->kbmn", rot, overlaps, rot.conj())
    residual = completeness_residual(povm)
    if residual > COMPLETENESS_ERROR:
        raise POVMIncompleteError(
            f"POVM completeness residual {residual:.3g} exceeds {COMPLETENESS_ERROR:g}; widen x_range"
        )
    return povm


def bin_record(record: QuadratureRecord, config: TomoConfig) -> tuple[np.ndarray, int]:
    """Histogram samples into (phase bin, x bin) counts; returns (counts, dropped).

    A phase rounds to the nearest k pi / n_phase; phases that round up to pi wrap
    to 0 with x negated, since x_{theta + pi} = -x_theta.
    """
    nph = config.n_phase_bins
    k = np.rint(record.thetas * nph / math.pi).astype(int)
    xs = np.where(k == nph, -record.xs, record.xs)
    k = k % nph
    edges = config.x_edges
    b = np.searchsorted(edges, xs, side="right") - 1
    b = np.where(xs == edges[-1], config.n_x_bins - 1, b)
    inside = (b >= 0) & (b < config.n_x_bins)
    counts = np.zeros((nph, config.n_x_bins))
    np.add.at(counts, (k[inside], b[inside]), 1.0)
    return counts, int(np.count_nonzero(~inside))


def loglikelihood(rho, counts: np.ndarray, povm: np.ndarray, prob_floor: float = 1e-12) -> float:
    """sum_j f_j ln Tr[Pi_j rho] over occupied bins (f_j = raw counts)."""
    mat = as_matrix(rho)
    d = mat.shape[0]
    f = np.asarray(counts, dtype=float).ravel()
    occ = f > 0
    pi_flat = povm.reshape(-1, d * d)[occ]
    probs = (pi_flat @ mat.T.ravel()).real
    return float(np.sum(f[occ] * np.log(np.maximum(probs, prob_floor))))


def _check_iterate(rho: np.ndarray) -> None:
    DensityMatrix(rho)


def maxlik_reconstruct(record: QuadratureRecord, config: TomoConfig | None = None,
                       povm: np.ndarray | None = None) -> TomoResult:
    """R rho R fixed-point iteration, R = sum_j (f_j / N) / Tr[Pi_j rho] Pi_j.

    If a full step would lower the likelihood (beyond 1e-9), the step is diluted,
    rho <- (1 + e R) rho (1 + e R) / Tr, halving e until it climbs again.
    """
    config = config or TomoConfig()
    if povm is None:
        povm = build_povm(config)
    residual = completeness_residual(povm)
    if residual > COMPLETENESS_REQUIRED:
        raise POVMIncompleteError(
            f"POVM completeness residual {residual:.3g} exceeds {COMPLETENESS_REQUIRED:g}"
        )
    counts, dropped = bin_record(record, config)
    d = config.dim
    f = counts.ravel()
    occ = f > 0
    if not occ.any():
        raise DomainError("no samples fall inside x_range")
    f_occ = f[occ]
    freqs = f_occ / f_occ.sum()
    pi_flat = povm.reshape(-1, d * d)[occ]
    floor = config.prob_floor
    eye = np.eye(d)

    def probs_of(rho):
        return np.maximum((pi_flat @ rho.T.ravel()).real, floor)

    def loglik_of(p):
        return float(np.sum(f_occ * np.log(p)))

    rho = eye / d
    p = probs_of(rho)
    ll = loglik_of(p)
    trace = [ll]
    converged = False
    it = 0
    for it in range(1, config.max_iters + 1):
        R = ((freqs / p) @ pi_flat).reshape(d, d)
        R = 0.5 * (R + R.conj().T)
        step = 1.0
        while True:
            G = R if step == 1.0 else eye + step * R
            cand = G @ rho @ G.conj().T
            cand = 0.5 * (cand + cand.conj().T)
            cand /= np.trace(cand).real
            p_new = probs_of(cand)
            ll_new = loglik_of(p_new)
            if ll_new >= ll - 1e-9 or step < 1e-6:
                break
            step = 0.5 if step == 1.0 else 0.5 * step
        gain = ll_new - ll
        rho, p, ll = cand, p_new, ll_new
        trace.append(ll)
        if it % 10 == 0:
            _check_iterate(rho)
        if gain < config.loglik_tol:
            converged = True
            break
    return TomoResult(
        rho_hat=DensityMatrix.from_array(rho),
        iterations=it,
        final_loglik=ll,
        converged=converged,
        loglik_trace=trace,
        dropped_samples=dropped,
    )


__all__ = [
    "POVMIncompleteError",
    "QuadratureRecord",
    "TomoConfig",
    "TomoResult",
    "bin_record",
    "build_povm",
    "completeness_residual",
    "loglikelihood",
    "maxlik_reconstruct",
    "sample_homodyne",
]
