"""File formats: state JSON, quadrature/grid CSV, report JSON.

Floats are written with 17 significant digits so every value round-trips.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import DomainError, StateFileError
from .fock import DensityMatrix, FockKet, ket_to_density
from .tomography import QuadratureRecord, TomoResult
from .wigner import WignerGrid


def fmt(v) -> str:
    return format(float(v), ".17g")


def dumps(obj, indent: int = 0, _level: int = 0) -> str:
    """JSON text with floats formatted by ``fmt``; key order is preserved."""
    pad = " " * indent
    nl = "\n" if indent else ""
    inner = pad * (_level + 1)
    outer = pad * _level
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            raise ValueError(f"cannot serialize non-finite value {obj!r}")
        return fmt(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        sep = ",\n" if indent else ", "
        return "{" + nl + sep.join(items) + nl + outer + "}" if items else "{}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        # Number arrays stay on one line.
        return "[" + ", ".join(dumps(v, 0) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def density_to_dict(rho: DensityMatrix) -> dict:
    return {
        "dim": rho.dim,
        "re": rho.elements.real.ravel(),
        "im": rho.elements.imag.ravel(),
    }


def ket_to_dict(ket: FockKet) -> dict:
    return {"dim": ket.dim, "amps_re": ket.amps.real, "amps_im": ket.amps.imag}


def _write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def write_density(path, rho: DensityMatrix) -> None:
    _write_text(path, dumps(density_to_dict(rho), indent=1) + "\n")


def write_ket(path, ket: FockKet) -> None:
    _write_text(path, dumps(ket_to_dict(ket), indent=1) + "\n")


def _load_json(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise StateFileError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise StateFileError(f"{path}: expected a JSON object")
    return data


def _array(data: dict, key: str, size: int, path) -> np.ndarray:
    try:
        arr = np.asarray(data[key], dtype=float)
    except KeyError:
        raise StateFileError(f"{path}: missing field {key!r}") from None
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"{path}: field {key!r} is not a number array") from exc
    if arr.shape != (size,):
        raise StateFileError(f"{path}: field {key!r} has {arr.size} entries, expected {size}")
    return arr


def density_from_dict(data: dict, path="<state>") -> DensityMatrix:
    """Parse the density schema, or a ket schema (converted to |psi><psi|)."""
    try:
        d = int(data["dim"])
    except (KeyError, TypeError, ValueError):
        raise StateFileError(f"{path}: missing or invalid 'dim'") from None
    if d < 2:
        raise StateFileError(f"{path}: 'dim' must be >= 2")
    if "amps_re" in data:
        amps = _array(data, "amps_re", d, path) + 1j * _array(data, "amps_im", d, path)
        return ket_to_density(FockKet(amps))
    re = _array(data, "re", d * d, path)
    im = _array(data, "im", d * d, path)
    return DensityMatrix((re + 1j * im).reshape(d, d))


def read_density(path) -> DensityMatrix:
    return density_from_dict(_load_json(path), path)


def write_csv(path, header, rows) -> None:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    _write_text(path, buf.getvalue())


def write_quadratures(path, record: QuadratureRecord) -> None:
    write_csv(path, ("theta", "x"), zip(record.thetas, record.xs))


def read_quadratures(path) -> QuadratureRecord:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["theta", "x"]:
                raise StateFileError(f"{path}: expected header 'theta,x'")
            rows = [r for r in reader if r]
    except (OSError, UnicodeDecodeError) as exc:
        raise StateFileError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise StateFileError(f"{path}: no quadrature samples")
    try:
        data = np.array(rows, dtype=float)
    except ValueError as exc:
        raise StateFileError(f"{path}: non-numeric sample row") from exc
    if data.ndim != 2 or data.shape[1] != 2:
        raise StateFileError(f"{path}: every row needs exactly two columns")
    try:
        return QuadratureRecord(data[:, 0], data[:, 1], source_note=str(path))
    except DomainError as exc:
        raise StateFileError(f"{path}: {exc}") from exc


def write_wigner_grid(path, grid: WignerGrid) -> None:
    write_csv(path, ("x", "p", "w"), grid.rows())


def write_marginals(path, rows) -> None:
    write_csv(path, ("theta", "x", "pdf"), rows)


def write_json(path, obj) -> None:
    _write_text(path, dumps(obj, indent=1) + "\n")


def write_tomo_result(path, sidecar_path, result: TomoResult) -> None:
    write_density(path, result.rho_hat)
    write_json(sidecar_path, result.sidecar())


__all__ = [
    "density_from_dict",
    "density_to_dict",
    "dumps",
    "fmt",
    "ket_to_dict",
    "read_density",
    "read_quadratures",
    "write_csv",
    "write_density",
    "write_json",
    "write_ket",
    "write_marginals",
    "write_quadratures",
    "write_tomo_result",
    "write_wigner_grid",
]
