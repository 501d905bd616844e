"""Acceptance gate: one PASS/FAIL line per criterion.

Run under pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""
import math
import time
import warnings

import numpy as np

from catcoh.channels import cat_loss_analytic, loss_channel, trace_distance
from catcoh.errors import TruncationWarning
from catcoh.experiment import PipelineSpec, best_fit_cat, pipeline_state
from catcoh.fock import cat_density
from catcoh.measures import (
    cat_l1_truncated,
    cat_rel_entropy_truncated,
    coherence_report,
    fidelity_loss_analytic,
    fidelity_to_cat,
    lossy_cat_coherence,
    negativity_analytic,
)
from catcoh.tomography import TomoConfig, maxlik_reconstruct, sample_homodyne
from catcoh.wigner import wigner_negativity_grid

VERDICTS: list[str] = []

ALPHAS = (0.5, 1.06, 2.0)
ETAS = tuple(round(0.1 * k, 1) for k in range(1, 11))
# Large enough that truncation stays below 1e-13 for alpha <= 2.
WIDE_DIM = 40

# Regression constants for alpha = 1.06, eta = 0.4, d = 12, frozen from the closed
# forms; test_measures rederives them from an independent oracle.
ROBUST_C_REL = 0.35520620949534737
ROBUST_C_L1 = 0.565392508353053
ROBUST_F = 0.4176181043857345

PAPER_C_REL = 0.63
PAPER_C_L1 = 1.67


def verdict(number: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    VERDICTS.append(line)
    print(line)
    assert ok, line


def test_criterion_1_kraus_vs_closed_form():
    t0 = time.perf_counter()
    worst = 0.0
    for alpha in ALPHAS:
        for parity in ("even", "odd"):
            rho = cat_density(alpha, parity, WIDE_DIM)
            for eta in ETAS:
                dist = trace_distance(loss_channel(rho, eta), cat_loss_analytic(alpha, parity, eta, WIDE_DIM))
                worst = max(worst, dist)
    elapsed = time.perf_counter() - t0
    verdict(1, worst < 1e-10 and elapsed < 1.0,
            f"max trace distance {worst:.2e} (< 1e-10), {elapsed:.2f} s (< 1 s)")


def test_criterion_2_fidelity_law():
    t0 = time.perf_counter()
    worst = 0.0
    worst_half = 0.0
    for alpha in ALPHAS:
        rho = cat_density(alpha, "odd", WIDE_DIM)
        for eta in ETAS:
            f_matrix = fidelity_to_cat(loss_channel(rho, eta), math.sqrt(eta) * alpha, "odd")
            worst = max(worst, abs(f_matrix - fidelity_loss_analytic(alpha, eta)))
        worst_half = max(worst_half, abs(fidelity_loss_analytic(alpha, 0.5) - 0.5))
    elapsed = time.perf_counter() - t0
    verdict(2, worst < 1e-8 and worst_half < 1e-12 and elapsed < 1.0,
            f"matrix vs closed form {worst:.2e} (< 1e-8), |F(0.5) - 0.5| {worst_half:.2e} (< 1e-12), "
            f"{elapsed:.2f} s (< 1 s)")


def test_criterion_3_negativity_law():
    t0 = time.perf_counter()
    worst = 0.0
    at_one = []
    below_half = []
    for alpha in ALPHAS:
        d = 30 if alpha > 1.5 else 20
        for eta in ETAS:
            neg = wigner_negativity_grid(cat_loss_analytic(alpha, "odd", eta, d))
            worst = max(worst, abs(neg - negativity_analytic(alpha, eta)))
            if eta == 1.0:
                at_one.append(abs(neg + 1 / math.pi))
            if eta <= 0.5:
                below_half.append(abs(neg))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-6 and max(at_one) < 1e-4 and max(below_half) < 1e-6 and elapsed < 30
    verdict(3, ok, f"grid vs min(0, W00) {worst:.2e} (< 1e-6), eta=1 vs -1/pi {max(at_one):.2e} (< 1e-4), "
                   f"max |W_N| for eta <= 0.5 {max(below_half):.2e}, {elapsed:.2f} s (< 30 s)")


def test_criterion_4_mixture_exactness():
    t0 = time.perf_counter()
    worst_rel = worst_l1 = 0.0
    for alpha in ALPHAS:
        for eta in ETAS:
            mix = lossy_cat_coherence(alpha, "odd", eta, WIDE_DIM)
            mat = coherence_report(cat_loss_analytic(alpha, "odd", eta, WIDE_DIM))
            worst_rel = max(worst_rel, abs(mix.c_rel_ent - mat.c_rel_ent))
            worst_l1 = max(worst_l1, abs(mix.c_l1 - mat.c_l1))
    elapsed = time.perf_counter() - t0
    verdict(4, worst_rel < 1e-9 and worst_l1 < 1e-9 and elapsed < 5,
            f"rel-ent gap {worst_rel:.2e}, l1 gap {worst_l1:.2e} (< 1e-9), {elapsed:.2f} s (< 5 s)")


def test_criterion_5_truncation_study():
    t0 = time.perf_counter()
    alphas = np.linspace(0.05, 2.0, 40)
    rel_gap = [abs(cat_rel_entropy_truncated(a, "odd", 12) - cat_rel_entropy_truncated(a, "odd", 16)) for a in alphas]
    l1_gap = [abs(cat_l1_truncated(a, "odd", 12) - cat_l1_truncated(a, "odd", 16)) for a in alphas]
    elapsed = time.perf_counter() - t0
    rel_bad = [a for a, g in zip(alphas, rel_gap) if g >= 1e-3]
    l1_bad = [a for a, g in zip(alphas, l1_gap) if g >= 1e-3]
    detail = (f"max |C12 - C16| rel-ent {max(rel_gap):.2e}, l1 {max(l1_gap):.2e} (< 1e-3); "
              f"l1 exceeds from alpha {min(l1_bad):.2f}, rel-ent from {min(rel_bad):.2f}" if l1_bad and rel_bad
              else f"max |C12 - C16| rel-ent {max(rel_gap):.2e}, l1 {max(l1_gap):.2e} (< 1e-3)")
    verdict(5, not rel_bad and not l1_bad and elapsed < 5, f"{detail}, {elapsed:.2f} s (< 5 s)")


def test_criterion_6_robustness():
    alpha, eta = 1.06, 0.4
    rep = lossy_cat_coherence(alpha, "odd", eta, 12)
    fid = fidelity_loss_analytic(alpha, eta)
    neg = negativity_analytic(alpha, eta)
    lossy = loss_channel(cat_density(alpha, "odd", 12), eta)
    neg_grid = wigner_negativity_grid(lossy)
    frozen = (abs(rep.c_rel_ent - ROBUST_C_REL) < 1e-9 and abs(rep.c_l1 - ROBUST_C_L1) < 1e-9
              and abs(fid - ROBUST_F) < 1e-12)
    ok = neg == 0 and neg_grid == 0 and fid < 0.5 and rep.c_rel_ent > 0.1 and rep.c_l1 > 0.2 and frozen
    verdict(6, ok, f"W_N {neg:g} (grid {neg_grid:g}), F {fid:.5f} < 0.5, C_rel {rep.c_rel_ent:.5f} > 0.1, "
                   f"C_l1 {rep.c_l1:.5f} > 0.2, regression constants {'match' if frozen else 'DRIFT'}")


def test_criterion_7_reference_values():
    rho = cat_density(1.06, "odd", 12)
    rep = coherence_report(rho)
    rel_ok = abs(rep.c_rel_ent - 0.750) <= 0.002
    l1_ok = abs(rep.c_l1 - 1.075) <= 0.002
    order_ok = PAPER_C_REL < rep.c_rel_ent and rep.c_l1 < PAPER_C_L1
    verdict(7, rel_ok and l1_ok and order_ok,
            f"C_rel {rep.c_rel_ent:.5f} vs 0.750 +/- 0.002 ({'ok' if rel_ok else 'off'}), "
            f"C_l1 {rep.c_l1:.5f} vs 1.075 +/- 0.002 ({'ok' if l1_ok else 'off'}), "
            f"orderings 0.63 < C_rel and C_l1 < 1.67 ({'ok' if order_ok else 'off'})")


def test_criterion_8_tomography_round_trip():
    t0 = time.perf_counter()
    rho = cat_density(1.06, "odd", 12)
    record = sample_homodyne(rho, 50_000, eta_det=0.8, seed=7)
    result = maxlik_reconstruct(record, TomoConfig(cutoff=11, eta_det=0.8))
    elapsed = time.perf_counter() - t0
    fid = fidelity_to_cat(result.rho_hat, 1.06, "odd")
    worst_step = float(np.min(np.diff(result.loglik_trace)))
    ok = fid >= 0.98 and worst_step >= -1e-9 and elapsed < 60
    verdict(8, ok, f"fidelity {fid:.4f} (>= 0.98), smallest loglik step {worst_step:.2e} (>= -1e-9), "
                   f"{result.iterations} iterations, {elapsed:.1f} s (< 60 s)")


def test_criterion_9_pipeline_plausibility():
    t0 = time.perf_counter()
    hits = []
    scan = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        for loss in np.linspace(0.15, 0.30, 16):
            _, fid = best_fit_cat(pipeline_state(PipelineSpec(prep_loss=float(loss))))
            scan.append((float(loss), fid))
            if 0.63 <= fid <= 0.73:
                hits.append((float(loss), fid))
    elapsed = time.perf_counter() - t0
    detail = (f"prep_loss {hits[0][0]:.2f}..{hits[-1][0]:.2f} gives F in [0.63, 0.73]" if hits
              else f"no prep_loss hits; F ranges {scan[-1][1]:.3f}..{scan[0][1]:.3f}")
    verdict(9, bool(hits) and elapsed < 10, f"{detail}, {elapsed:.2f} s (< 10 s)")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
