"""Command-line entry point: ``catcoh <command> ...``.

Exit codes: 0 success, 1 invalid physics parameters, 2 unreadable or malformed input.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io
from .channels import cat_loss_analytic, loss_channel
from .errors import DomainError, StateFileError, TruncationWarning
from .experiment import (
    FIG2_ETAS,
    PipelineSpec,
    fig1a_states,
    fig2_states,
    fig4_rows,
    fig5_rows,
    marginal_rows,
    pipeline_report,
    pipeline_state,
    state_summary,
    svg_line_chart,
)
from .fock import (
    DEFAULT_DIM,
    CatSpec,
    Parity,
    SqueezeSpec,
    cat_ket,
    coherent_ket,
    ket_to_density,
    squeezed_vacuum_ket,
    tail_mass,
)
from .measures import fidelity_to_cat
from .tomography import TomoConfig, maxlik_reconstruct, sample_homodyne
from .wigner import default_axis, wigner_grid

EXIT_DOMAIN = 1
EXIT_IO = 2


def default_dim() -> int:
    raw = os.environ.get("CATCOH_DEFAULT_DIM")
    if not raw:
        return DEFAULT_DIM
    try:
        d = int(raw)
    except ValueError:
        raise DomainError(f"CATCOH_DEFAULT_DIM must be an integer, got {raw!r}") from None
    if d < 2:
        raise DomainError("CATCOH_DEFAULT_DIM must be >= 2")
    return d


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


# -- state ------------------------------------------------------------------

def cmd_state(args) -> int:
    d = args.dim or default_dim()
    ket = None
    report = {"kind": args.kind, "dim": d}
    if args.kind == "coherent":
        ket = coherent_ket(args.alpha, d)
        report["alpha"] = args.alpha
    elif args.kind == "cat":
        spec = CatSpec(args.alpha, Parity(args.parity), d)
        report.update(alpha=args.alpha, parity=spec.parity.value)
        if args.eta is None or args.eta == 1.0:
            ket = cat_ket(spec)
        else:
            report["eta"] = args.eta
            rho = cat_loss_analytic(args.alpha, spec.parity, args.eta, d)
    elif args.kind == "squeezed":
        spec = SqueezeSpec(args.r, d) if args.r is not None else SqueezeSpec.from_db(args.squeeze_db, d)
        report["r"] = spec.r
        ket = squeezed_vacuum_ket(spec)
    else:
        pspec = PipelineSpec(args.squeeze_db, args.prep_loss, args.tap, d)
        report.update(squeeze_db=pspec.squeeze_db, prep_loss=pspec.prep_loss, tap=pspec.tap)
        rho = pipeline_state(pspec)
    if ket is not None:
        rho = ket_to_density(ket)
        if args.ket_out:
            io.write_ket(args.ket_out, ket)
    report["tail_mass"] = tail_mass(rho)
    text = io.dumps(io.density_to_dict(rho), indent=1) + "\n"
    if args.out:
        _emit(text, args.out)
        print(io.dumps(report))
    else:
        sys.stdout.write(text)
        print(io.dumps(report), file=sys.stderr)
    return 0


def cmd_channel(args) -> int:
    rho = io.read_density(args.input)
    io.write_density(args.out, loss_channel(rho, args.eta))
    return 0


# -- measure ----------------------------------------------------------------

MEASURE_FIELDS = ("c_rel_ent", "c_l1", "fidelity", "negativity", "wigner_min", "dim")


def measure_state(rho, alpha_ref: float | None = None, parity: str = "odd", fields=None) -> dict:
    summary = state_summary(rho)
    if alpha_ref is not None:
        summary["fidelity"] = fidelity_to_cat(rho, alpha_ref, parity)
    fields = fields or MEASURE_FIELDS
    return {k: summary[k] for k in fields if k in summary}


def cmd_measure(args) -> int:
    rho = io.read_density(args.input)
    fields = args.fields.split(",") if args.fields else None
    if fields:
        unknown = set(fields) - set(MEASURE_FIELDS)
        if unknown:
            raise DomainError(f"unknown measure fields: {', '.join(sorted(unknown))}")
        if "fidelity" in fields and args.alpha_ref is None:
            raise DomainError("fidelity needs --alpha-ref")
    print(io.dumps(measure_state(rho, args.alpha_ref, args.parity, fields)))
    return 0


def cmd_wigner(args) -> int:
    rho = io.read_density(args.input)
    axis = default_axis(args.extent, args.points)
    io.write_wigner_grid(args.grid_out, wigner_grid(rho, axis, axis))
    if args.marginal_out:
        io.write_marginals(args.marginal_out, marginal_rows(rho))
    return 0


# -- reproduce --------------------------------------------------------------

def _pipeline_from(args) -> PipelineSpec:
    return PipelineSpec(args.squeeze_db, args.prep_loss, args.tap, args.dim or default_dim())


def _write_svg(path, header, rows, title) -> None:
    data = np.array(rows, dtype=float)
    series = {name: data[:, i] for i, name in enumerate(header) if i > 0}
    Path(path).write_text(svg_line_chart(data[:, 0], series, title, header[0]), encoding="utf-8")


def cmd_fig4(args) -> int:
    etas = args.etas if args.etas else list(np.linspace(0.0, 1.0, args.points))
    pipeline = _pipeline_from(args) if args.model else None
    header, rows = fig4_rows(args.alpha, etas, args.dim or default_dim(), pipeline, args.workers)
    io.write_csv(args.out, header, rows)
    if args.svg:
        _write_svg(args.svg, header, rows, f"alpha = {args.alpha:g}")
    return 0


def cmd_fig5(args) -> int:
    alphas = args.alphas if args.alphas else list(np.linspace(0.05, args.alpha_max, args.points))
    header, rows = fig5_rows(alphas, tuple(args.dims))
    io.write_csv(args.out, header, rows)
    if args.svg:
        _write_svg(args.svg, header, rows, "odd cat coherence vs amplitude")
    return 0


def cmd_fig1a(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    axis = default_axis(args.extent, args.points)
    for name, rho in fig1a_states(args.alpha, args.eta).items():
        io.write_density(outdir / f"fig1a_{name}.json", rho)
        io.write_wigner_grid(outdir / f"fig1a_{name}_wigner.csv", wigner_grid(rho, axis, axis))
    return 0


def cmd_fig2(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    axis = default_axis(args.extent, args.points)
    summary = {}
    for eta, rho in fig2_states(_pipeline_from(args), args.etas or FIG2_ETAS).items():
        tag = f"eta{int(round(eta * 100)):03d}"
        io.write_density(outdir / f"fig2_{tag}_density.json", rho)
        d = rho.dim
        io.write_csv(outdir / f"fig3_{tag}_abs.csv", ("m", "n", "abs"),
                     ((m, n, abs(rho.elements[m, n])) for m in range(d) for n in range(d)))
        io.write_wigner_grid(outdir / f"fig2_{tag}_wigner.csv", wigner_grid(rho, axis, axis))
        io.write_marginals(outdir / f"fig2_{tag}_marginals.csv", marginal_rows(rho))
        summary[tag] = state_summary(rho)
    io.write_json(outdir / "fig2_summary.json", summary)
    return 0


def cmd_svg(args) -> int:
    try:
        with open(args.csv, encoding="utf-8", newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except (OSError, UnicodeDecodeError) as exc:
        raise StateFileError(f"cannot read {args.csv}: {exc}") from exc
    if len(rows) < 2:
        raise StateFileError(f"{args.csv}: empty table")
    names = [h.strip() for h in rows[0]]
    try:
        data = np.array(rows[1:], dtype=float)
    except ValueError as exc:
        raise StateFileError(f"{args.csv}: non-numeric or ragged rows") from exc
    if data.ndim != 2 or data.shape[1] != len(names) or len(names) < 2:
        raise StateFileError(f"{args.csv}: need a header and at least two columns")
    series = {n: data[:, i] for i, n in enumerate(names) if i > 0}
    Path(args.out).write_text(svg_line_chart(data[:, 0], series, args.title, names[0]),
                              encoding="utf-8")
    return 0


# -- tomography -------------------------------------------------------------

def cmd_tomo_simulate(args) -> int:
    rho = io.read_density(args.state)
    record = sample_homodyne(rho, args.n, "uniform", args.eta_det, args.seed, n_phases=args.phases)
    io.write_quadratures(args.out, record)
    return 0


def cmd_tomo_reconstruct(args) -> int:
    record = io.read_quadratures(args.data)
    config = TomoConfig(
        cutoff=args.cutoff,
        eta_det=args.eta_det,
        n_phase_bins=args.phase_bins,
        n_x_bins=args.x_bins,
        x_range=(args.x_min, args.x_max),
        max_iters=args.max_iters,
        loglik_tol=args.tol,
    )
    result = maxlik_reconstruct(record, config)
    sidecar = args.sidecar or str(Path(args.out).with_suffix("")) + ".meta.json"
    io.write_tomo_result(args.out, sidecar, result)
    return 0


def cmd_pipeline_report(args) -> int:
    print(io.dumps(pipeline_report(_pipeline_from(args)), indent=1))
    return 0


# -- parser -----------------------------------------------------------------

def _add_pipeline_args(p) -> None:
    p.add_argument("--squeeze-db", type=float, default=-3.0)
    p.add_argument("--prep-loss", type=float, default=0.2)
    p.add_argument("--tap", type=float, default=0.05)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catcoh", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", help="construct a state and write its density JSON")
    p.add_argument("kind", choices=("coherent", "cat", "squeezed", "pipeline"))
    p.add_argument("--alpha", type=float, default=1.06)
    p.add_argument("--parity", choices=("even", "odd"), default="odd")
    p.add_argument("--eta", type=float, default=None, help="closed-form loss for cat states")
    p.add_argument("--r", type=float, default=None, help="squeezing parameter (overrides --squeeze-db)")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--ket-out", default=None)
    _add_pipeline_args(p)
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("channel", help="send a state through the loss channel")
    p.add_argument("input")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("measure", help="coherence, fidelity and negativity of a state file")
    p.add_argument("input")
    p.add_argument("--alpha-ref", type=float, default=None)
    p.add_argument("--parity", choices=("even", "odd"), default="odd")
    p.add_argument("--fields", default=None, help=f"comma list from {','.join(MEASURE_FIELDS)}")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("wigner", help="Wigner grid CSV (and quadrature marginals)")
    p.add_argument("input")
    p.add_argument("--grid-out", required=True)
    p.add_argument("--marginal-out", default=None)
    p.add_argument("--extent", type=float, default=5.0)
    p.add_argument("--points", type=int, default=201)
    p.set_defaults(func=cmd_wigner)

    rep = sub.add_parser("reproduce", help="figure data products").add_subparsers(
        dest="figure", required=True)

    p = rep.add_parser("fig4", help="decoherence curves versus transmission")
    p.add_argument("--alpha", type=float, default=1.06)
    p.add_argument("--etas", type=_float_list, default=None)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--model", action="store_true", help="add columns for the pipeline state")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None)
    _add_pipeline_args(p)
    p.set_defaults(func=cmd_fig4)

    p = rep.add_parser("fig5", help="coherence versus amplitude for d = 12 and 16")
    p.add_argument("--alphas", type=_float_list, default=None)
    p.add_argument("--points", type=int, default=60)
    p.add_argument("--alpha-max", type=float, default=3.0)
    p.add_argument("--dims", type=int, nargs=2, default=(12, 16))
    p.add_argument("--out", required=True)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_fig5)

    p = rep.add_parser("fig1a", help="ideal odd cat Wigner before/after loss")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--eta", type=float, default=0.5)
    p.add_argument("--extent", type=float, default=5.0)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_fig1a)

    p = rep.add_parser("fig2", help="model state Wigner, projections and |rho_mn| per transmission")
    p.add_argument("--etas", type=_float_list, default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--extent", type=float, default=5.0)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--outdir", required=True)
    _add_pipeline_args(p)
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("svg", help="line chart of a CSV (first column on x)")
    p.add_argument("csv")
    p.add_argument("--out", required=True)
    p.add_argument("--title", default="")
    p.set_defaults(func=cmd_svg)

    tomo = sub.add_parser("tomo", help="homodyne simulation and MaxLik reconstruction").add_subparsers(
        dest="tomo_command", required=True)
    p = tomo.add_parser("simulate")
    p.add_argument("--state", required=True)
    p.add_argument("--n", type=int, default=50000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eta-det", type=float, default=0.8)
    p.add_argument("--phases", type=int, default=12)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tomo_simulate)

    p = tomo.add_parser("reconstruct")
    p.add_argument("--data", required=True)
    p.add_argument("--cutoff", type=int, default=11)
    p.add_argument("--eta-det", type=float, default=0.8)
    p.add_argument("--phase-bins", type=int, default=12)
    p.add_argument("--x-bins", type=int, default=200)
    p.add_argument("--x-min", type=float, default=-6.0)
    p.add_argument("--x-max", type=float, default=6.0)
    p.add_argument("--max-iters", type=int, default=2000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", required=True)
    p.add_argument("--sidecar", default=None)
    p.set_defaults(func=cmd_tomo_reconstruct)

    p = sub.add_parser("pipeline-report", help="best-fit cat amplitude and fidelity of the model state")
    p.add_argument("--dim", type=int, default=None)
    _add_pipeline_args(p)
    p.set_defaults(func=cmd_pipeline_report)
    return parser


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    with warnings.catch_warnings():
        warnings.simplefilter("always", TruncationWarning)
        warnings.showwarning = _show_warning
        try:
            return args.func(args)
        except StateFileError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        except DomainError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DOMAIN
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
