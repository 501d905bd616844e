"""Model of the cat-state preparation and the figure-reproduction sweeps."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .channels import cat_loss_analytic, loss_channel
from .errors import DomainError, TruncationWarning
from .fock import (
    DEFAULT_DIM,
    DensityMatrix,
    Parity,
    SqueezeSpec,
    as_matrix,
    ket_to_density,
    photon_subtract,
    rotate,
    squeezed_vacuum_ket,
)
from .measures import (
    cat_l1_truncated,
    cat_rel_entropy_truncated,
    coherence_report,
    fidelity_to_cat,
    ideal_curve_point,
)
from .wigner import quadrature_marginal, wigner_grid, wigner_negativity_grid


@dataclass(frozen=True)
class PipelineSpec:
    """Photon-subtracted squeezed vacuum with loss before the subtraction.

    ``tap`` (the subtraction beam splitter's transmissivity toward the photon
    counter) is metadata only: subtraction is modeled as an ideal a rho a^dagger.
    """

    squeeze_db: float = -3.0
    prep_loss: float = 0.2
    tap: float = 0.05
    dim: int = DEFAULT_DIM

    def __post_init__(self):
        if not 0.0 <= self.prep_loss < 1.0:
            raise DomainError(f"prep_loss must lie in [0, 1), got {self.prep_loss!r}")
        if not 0.0 < self.tap < 1.0:
            raise DomainError(f"tap must lie in (0, 1), got {self.tap!r}")
        if not math.isfinite(self.squeeze_db):
            raise DomainError("squeeze_db must be finite")


@dataclass(frozen=True)
class SweepSpec:
    alphas: tuple[float, ...]
    etas: tuple[float, ...]
    dims: tuple[int, ...] = (12, 16)
    output_path: str = ""

    def __post_init__(self):
        if not (self.alphas and self.etas and self.dims):
            raise DomainError("sweep lists must be nonempty")
        if any(not 0.0 <= e <= 1.0 for e in self.etas):
            raise DomainError("etas must lie in [0, 1]")


def pipeline_state(spec: PipelineSpec) -> DensityMatrix:
    """State heralded by one photon-counter click.

    The squeezed vacuum is rotated by pi/2 first so the resulting cat lies
    along x with real, positive amplitude (a choice of local-oscillator phase).
    """
    sq = squeezed_vacuum_ket(SqueezeSpec.from_db(spec.squeeze_db, spec.dim))
    rho = rotate(ket_to_density(sq), math.pi / 2)
    rho = loss_channel(rho, 1.0 - spec.prep_loss)
    return photon_subtract(rho)


def best_fit_cat(rho, parity: Parity | str = Parity.ODD, alpha_max: float = 3.0,
                 scan_points: int = 301) -> tuple[float, float]:
    """Real amplitude maximizing Tr[rho rho_cat(alpha)]; returns (alpha, fidelity).

    A coarse scan over (0, alpha_max] picks the basin, a bounded 1-D search refines it.
    """
    parity = Parity(parity)
    mat = as_matrix(rho)
    grid = np.linspace(alpha_max / scan_points, alpha_max, scan_points)
    with warnings.catch_warnings():
        # Large trial amplitudes overflow the cutoff; they simply fit badly.
        warnings.simplefilter("ignore", TruncationWarning)
        fids = np.array([fidelity_to_cat(mat, a, parity) for a in grid])
        i = int(np.argmax(fids))
        lo = grid[max(i - 1, 0)] if i > 0 else grid[0] * 1e-3
        hi = grid[min(i + 1, grid.size - 1)]
        res = minimize_scalar(lambda a: -fidelity_to_cat(mat, a, parity), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-10})
    if -res.fun >= fids[i]:
        return float(res.x), float(-res.fun)
    return float(grid[i]), float(fids[i])


def state_summary(rho) -> dict:
    grid = wigner_grid(rho)
    coh = coherence_report(rho)
    return {
        "c_rel_ent": coh.c_rel_ent,
        "c_l1": coh.c_l1,
        "dim": coh.dim,
        "wigner_min": grid.minimum(),
        "negativity": wigner_negativity_grid(None, grid),
    }


def pipeline_report(spec: PipelineSpec) -> dict:
    rho = pipeline_state(spec)
    alpha, fid = best_fit_cat(rho)
    return {
        "squeeze_db": spec.squeeze_db,
        "r": SqueezeSpec.from_db(spec.squeeze_db, spec.dim).r,
        "prep_loss": spec.prep_loss,
        "tap": spec.tap,
        "alpha_fit": alpha,
        "fidelity": fid,
        **state_summary(rho),
    }


def _map(fn, items, workers: int):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


FIG4_IDEAL = ("eta", "c_rel_ideal", "c_l1_ideal", "f_ideal", "neg_ideal")
FIG4_MODEL = ("c_rel_model", "c_l1_model", "f_model", "neg_model")


def fig4_rows(alpha: float, etas, d: int = DEFAULT_DIM, pipeline: PipelineSpec | None = None,
              workers: int = 1) -> tuple[tuple[str, ...], list[tuple[float, ...]]]:
    """Decoherence curves versus transmission.

    Ideal columns come from closed forms; model columns propagate the pipeline
    state through the Kraus channel and compare with the odd cat of amplitude
    sqrt(eta) alpha_fit.
    """
    etas = [float(e) for e in etas]

    def ideal(eta):
        pt = ideal_curve_point(alpha, eta, d)
        return (eta, pt.c_rel_ent, pt.c_l1, pt.fidelity, pt.negativity)

    rows = _map(ideal, etas, workers)
    if pipeline is None:
        return FIG4_IDEAL, rows
    rho0 = pipeline_state(pipeline)
    alpha_fit, _ = best_fit_cat(rho0)

    def model(eta):
        rho = loss_channel(rho0, eta)
        coh = coherence_report(rho)
        fid = fidelity_to_cat(rho, math.sqrt(eta) * alpha_fit, Parity.ODD)
        return (coh.c_rel_ent, coh.c_l1, fid, wigner_negativity_grid(rho))

    extra = _map(model, etas, workers)
    return FIG4_IDEAL + FIG4_MODEL, [a + b for a, b in zip(rows, extra)]


FIG5_HEADER = ("alpha", "c_rel_d12", "c_rel_d16", "c_l1_d12", "c_l1_d16")


def fig5_rows(alphas, dims=(12, 16)) -> tuple[tuple[str, ...], list[tuple[float, ...]]]:
    """Odd-cat coherence versus amplitude for two truncation dimensions."""
    d_small, d_large = dims
    header = ("alpha", f"c_rel_d{d_small}", f"c_rel_d{d_large}", f"c_l1_d{d_small}", f"c_l1_d{d_large}")
    rows = []
    for a in alphas:
        a = float(a)
        if not 0.0 < a <= 3.0:
            raise DomainError(f"amplitudes must lie in (0, 3], got {a!r}")
        rows.append((
            a,
            cat_rel_entropy_truncated(a, Parity.ODD, d_small),
            cat_rel_entropy_truncated(a, Parity.ODD, d_large),
            cat_l1_truncated(a, Parity.ODD, d_small),
            cat_l1_truncated(a, Parity.ODD, d_large),
        ))
    return header, rows


def fig1a_states(alpha: float = 1.0, eta: float = 0.5, d: int = 20) -> dict[str, DensityMatrix]:
    """Ideal odd cat before and after the lossy channel."""
    return {
        "before": cat_loss_analytic(alpha, Parity.ODD, 1.0, d),
        "after": cat_loss_analytic(alpha, Parity.ODD, eta, d),
    }


FIG2_ETAS = (1.0, 0.8, 0.6, 0.4)


def fig2_states(pipeline: PipelineSpec, etas=FIG2_ETAS) -> dict[float, DensityMatrix]:
    """Model state after each channel transmission (Wigner, projections, |rho_mn|)."""
    rho0 = pipeline_state(pipeline)
    return {float(eta): loss_channel(rho0, eta) for eta in etas}


def marginal_rows(rho, thetas=(0.0, math.pi / 2), xs=None) -> list[tuple[float, float, float]]:
    xs = np.linspace(-6.0, 6.0, 241) if xs is None else np.asarray(xs, dtype=float)
    rows = []
    for theta in thetas:
        pdf = quadrature_marginal(rho, theta, xs)
        rows.extend((float(theta), float(x), float(v)) for x, v in zip(xs, pdf))
    return rows


def svg_line_chart(x, series: dict, title: str = "", xlabel: str = "", width: int = 480,
                   height: int = 320) -> str:
    """Minimal SVG polyline chart; no styling beyond a frame and a legend."""
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    pad = 40
    all_y = np.concatenate(list(ys.values()))
    y_lo, y_hi = float(all_y.min()), float(all_y.max())
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    x_lo, x_hi = float(x.min()), float(x.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0

    def sx(v):
        return pad + (v - x_lo) / (x_hi - x_lo) * (width - 2 * pad)

    def sy(v):
        return height - pad - (v - y_lo) / (y_hi - y_lo) * (height - 2 * pad)

    colors = ["#c0392b", "#2c3e50", "#2980b9", "#27ae60", "#8e44ad", "#d35400", "#7f8c8d", "#16a085"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        'fill="none" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{pad / 2:.1f}" text-anchor="middle">{title}</text>',
        f'<text x="{width / 2:.1f}" y="{height - 8}" text-anchor="middle">{xlabel}</text>',
        f'<text x="4" y="{pad:.1f}">{y_hi:.3g}</text>',
        f'<text x="4" y="{height - pad:.1f}">{y_lo:.3g}</text>',
    ]
    for i, (name, y) in enumerate(ys.items()):
        color = colors[i % len(colors)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        parts.append(f'<polyline fill="none" stroke="{color}" points="{pts}"/>')
        parts.append(f'<text x="{width - pad + 4}" y="{pad + 14 * (i + 1)}" fill="{color}" '
                     f'font-size="10">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


__all__ = [
    "FIG2_ETAS",
    "PipelineSpec",
    "SweepSpec",
    "best_fit_cat",
    "fig1a_states",
    "fig2_states",
    "fig4_rows",
    "fig5_rows",
    "marginal_rows",
    "pipeline_report",
    "pipeline_state",
    "state_summary",
    "svg_line_chart",
]
