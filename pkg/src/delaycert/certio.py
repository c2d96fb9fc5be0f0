"""Certificate (de)serialisation.

Field order is fixed and every real is written with 17 significant digits,
so a write/read cycle reproduces each matrix entry bit for bit.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .assembly import DelaySystem, LKFVariables
from .feasibility import Margins, StabilityCertificate
from .systems import DescriptionError, parse_json

_MATRIX_ORDER = ("P", "Q1", "Q2", "R1", "R2", "S1", "S2", "X")


def _real(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.17g" % x


def _emit(obj, indent: int = 0) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{k}": {_emit(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj):
            return "[" + ", ".join(str(x) if isinstance(x, int) else _real(x) for x in obj) + "]"
        return "[\n" + ",\n".join(inner + _emit(x, indent + 1) for x in obj) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _real(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _matrix(M: np.ndarray) -> dict:
    return {"rows": int(M.shape[0]), "cols": int(M.shape[1]), "data": [float(x) for x in M.ravel()]}


def certificate_to_dict(cert: StabilityCertificate) -> dict:
    s = cert.system
    return {
        "system": {"name": cert.name, "n": s.n, "A": _matrix(s.A), "Ad": _matrix(s.Ad)},
        "h1": s.h1,
        "h2": s.h2,
        "x_structure": cert.x_structure,
        "matrices": None if cert.vars is None else {k: _matrix(getattr(cert.vars, k)) for k in _MATRIX_ORDER},
        "margins": None if cert.margins is None else cert.margins.as_dict(),
        "verified": bool(cert.verified),
        "solver_status": cert.solver_status,
    }


def dumps(cert: StabilityCertificate) -> str:
    return _emit(certificate_to_dict(cert)) + "\n"


def write_certificate(cert: StabilityCertificate, path) -> None:
    Path(path).write_text(dumps(cert))


def _read_matrix(d, what: str) -> np.ndarray:
    try:
        rows, cols, data = int(d["rows"]), int(d["cols"]), d["data"]
    except (KeyError, TypeError, ValueError):
        raise DescriptionError(f"matrix {what} needs rows, cols and data") from None
    if len(data) != rows * cols:
        raise DescriptionError(f"matrix {what}: {len(data)} entries for a {rows}x{cols} shape")
    return np.array(data, dtype=float).reshape(rows, cols)


def certificate_from_dict(d) -> StabilityCertificate:
    try:
        sysd = d["system"]
        system = DelaySystem(_read_matrix(sysd["A"], "A"), _read_matrix(sysd["Ad"], "Ad"), d["h1"], d["h2"])
        mats = d["matrices"]
        v = None
        if mats is not None:
            v = LKFVariables(**{k: _read_matrix(mats[k], k) for k in _MATRIX_ORDER},
                             x_structure=d["x_structure"])
        margins = None if d.get("margins") is None else Margins.from_dict(d["margins"])
        return StabilityCertificate(system, v, margins, bool(d["verified"]), str(d["solver_status"]),
                                    name=str(sysd.get("name", "")))
    except (KeyError, TypeError) as exc:
        raise DescriptionError(f"certificate is missing or has a malformed field: {exc}") from None
    except ValueError as exc:
        raise DescriptionError(f"invalid certificate: {exc}") from None


def loads(text: str, source: str = "<certificate>") -> StabilityCertificate:
    return certificate_from_dict(parse_json(text, source))


def read_certificate(path) -> StabilityCertificate:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DescriptionError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text, str(path))
