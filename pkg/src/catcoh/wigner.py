"""Wigner functions and quadrature distributions of Fock-basis states.

Convention: x = (a + a^dagger)/sqrt(2), p = (a - a^dagger)/(i sqrt(2)), so the
vacuum has quadrature variance 1/2 and W_vac(x, p) = exp(-x^2 - p^2) / pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError
from .fock import as_matrix, validate_density

DEFAULT_EXTENT = 5.0
DEFAULT_POINTS = 201


def default_axis(extent: float = DEFAULT_EXTENT, points: int = DEFAULT_POINTS) -> np.ndarray:
    return np.linspace(-extent, extent, points)


def quadrature_wavefunctions(xs, d: int) -> np.ndarray:
    """Harmonic-oscillator eigenfunctions psi_n(x), n < d, shape (d, len(xs)).

    Three-term recurrence psi_n = sqrt(2/n) x psi_{n-1} - sqrt((n-1)/n) psi_{n-2}.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    psi = np.empty((d, xs.size))
    psi[0] = math.pi ** -0.25 * np.exp(-0.5 * xs * xs)
    if d > 1:
        psi[1] = math.sqrt(2.0) * xs * psi[0]
    for n in range(2, d):
        psi[n] = math.sqrt(2.0 / n) * xs * psi[n - 1] - math.sqrt((n - 1) / n) * psi[n - 2]
    return psi


def quadrature_marginal(rho, theta: float, xs) -> np.ndarray:
    """Homodyne probability density pr(x | theta) = sum_mn rho_mn e^{i(n-m)theta} psi_m psi_n."""
    mat = as_matrix(rho)
    d = mat.shape[0]
    v = quadrature_wavefunctions(xs, d) * np.exp(1j * theta * np.arange(d))[:, None]
    pdf = np.einsum("mp,mn,np->p", v.conj(), mat, v).real
    return np.clip(pdf, 0.0, None)


def _wigner_values(mat: np.ndarray, x: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Laguerre expansion of W at points (x, p) (any matching shapes)."""
    d = mat.shape[0]
    a = (x + 1j * p) / math.sqrt(2.0)
    b = 2.0 * (x * x + p * p)
    total = np.zeros(x.shape, dtype=complex)
    two_a = 2.0 * a
    power = np.ones(x.shape, dtype=complex)
    for k in range(d):
        # s_k = sum_n rho[n, n+k] (-1)^n sqrt(n!/(n+k)!) L_n^(k)(b)
        s = np.zeros(x.shape, dtype=complex)
        l_prev = np.zeros(x.shape)
        l_cur = np.ones(x.shape)
        for n in range(d - k):
            if n == 1:
                l_prev, l_cur = l_cur, 1.0 + k - b
            elif n > 1:
                l_prev, l_cur = l_cur, ((2 * n - 1 + k - b) * l_cur - (n - 1 + k) * l_prev) / n
            coeff = (-1) ** n * math.exp(0.5 * (gammaln(n + 1) - gammaln(n + k + 1)))
            s += mat[n, n + k] * coeff * l_cur
        total += (1.0 if k == 0 else 2.0) * power * s
        power = power * two_a
    return np.exp(-0.5 * b) * total.real / math.pi


def wigner_point(rho, x: float, p: float) -> float:
    mat = validate_density(rho).elements
    return float(_wigner_values(mat, np.array([float(x)]), np.array([float(p)]))[0])


@dataclass(frozen=True)
class WignerGrid:
    """W sampled on xs x ps; ``values[i, j] = W(xs[i], ps[j])``."""

    xs: np.ndarray
    ps: np.ndarray
    values: np.ndarray

    def integral(self) -> float:
        return float(np.trapezoid(np.trapezoid(self.values, self.ps, axis=1), self.xs))

    def minimum(self) -> float:
        return float(self.values.min())

    def argmin(self) -> tuple[float, float]:
        i, j = np.unravel_index(np.argmin(self.values), self.values.shape)
        return float(self.xs[i]), float(self.ps[j])

    def x_marginal(self) -> np.ndarray:
        """Integral over p, i.e. the theta = 0 homodyne density."""
        return np.trapezoid(self.values, self.ps, axis=1)

    def rows(self):
        for i, x in enumerate(self.xs):
            for j, p in enumerate(self.ps):
                yield float(x), float(p), float(self.values[i, j])


def _axis(values, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.size == 0:
        raise DomainError(f"{name} grid is empty")
    if arr.size > 1 and np.any(np.diff(arr) <= 0):
        raise DomainError(f"{name} grid must be strictly ascending")
    return arr


def wigner_grid(rho, xs=None, ps=None) -> WignerGrid:
    mat = validate_density(rho).elements
    xs = default_axis() if xs is None else _axis(xs, "x")
    ps = default_axis() if ps is None else _axis(ps, "p")
    X, P = np.meshgrid(xs, ps, indexing="ij")
    return WignerGrid(xs, ps, _wigner_values(mat, X, P))


def wigner_negativity_grid(rho, grid: WignerGrid | None = None) -> float:
    """min{0, min W} over a grid that covers at least [-5, 5]^2.

    Given a WignerGrid, its values are used as-is (``rho`` may then be None).
    """
    if grid is None:
        grid = wigner_grid(rho)
    for axis in (grid.xs, grid.ps):
        if axis[0] > -DEFAULT_EXTENT or axis[-1] < DEFAULT_EXTENT:
            raise DomainError("negativity search grid must cover [-5, 5] in x and p")
    return min(0.0, grid.minimum())


__all__ = [
    "WignerGrid",
    "default_axis",
    "quadrature_marginal",
    "quadrature_wavefunctions",
    "wigner_grid",
    "wigner_negativity_grid",
    "wigner_point",
]
