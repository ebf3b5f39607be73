"""Pencil files and deterministic JSON reports.

A pencil file is a JSON object with ``m``, ``k``, ``A0`` (``m x m``) and
``A`` (``k`` matrices).  Optional ``Y0`` and ``Y`` hold imaginary parts and
make the file a Hermitian pencil.
"""
from __future__ import annotations

import json
import logging
import math
from importlib import resources
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ParseError, SpectraError
from .pencil import HermitianPencil, SymmetricPencil, symmetrize_hermitian
from .tolerances import DEFAULT_TOL, Tolerances

log = logging.getLogger(__name__)

EXAMPLES = ("interval", "square", "disk", "ball3", "segment", "singleton")


def _matrix(value, field: str, m: int) -> np.ndarray:
    try:
        a = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"field {field!r} is not numeric", field=field) from exc
    if a.shape != (m, m):
        raise ParseError(f"field {field!r} has shape {a.shape}, expected ({m}, {m})", field=field)
    return a


def pencil_from_dict(data: dict, tol: Tolerances = DEFAULT_TOL) -> Union[SymmetricPencil, HermitianPencil]:
    if not isinstance(data, dict):
        raise ParseError("pencil file must hold a JSON object", field="<root>")
    for key in ("m", "k", "A0", "A"):
        if key not in data:
            raise ParseError(f"missing field {key!r}", field=key)
    m, k = data["m"], data["k"]
    if not (isinstance(m, int) and isinstance(k, int) and m >= 1 and k >= 0):
        raise ParseError("fields 'm' and 'k' must be integers with m >= 1, k >= 0", field="m/k")
    if not isinstance(data["A"], list) or len(data["A"]) != k:
        raise ParseError(f"field 'A' must list {k} matrices", field="A")
    A0 = _matrix(data["A0"], "A0", m)
    A = [_matrix(a, f"A[{i}]", m) for i, a in enumerate(data["A"])]
    if "Y0" in data or "Y" in data:
        Y0 = _matrix(data.get("Y0", np.zeros((m, m)).tolist()), "Y0", m)
        Ys = data.get("Y", [np.zeros((m, m)).tolist()] * k)
        if not isinstance(Ys, list) or len(Ys) != k:
            raise ParseError(f"field 'Y' must list {k} matrices", field="Y")
        Y = [_matrix(a, f"Y[{i}]", m) for i, a in enumerate(Ys)]
        return HermitianPencil(np.stack([A0, *A]), np.stack([Y0, *Y]), tol)
    return SymmetricPencil(A0, np.stack(A) if A else np.zeros((0, m, m)), tol)


def parse_pencil_text(text: str, tol: Tolerances = DEFAULT_TOL, source: str = "<string>"):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
                         line=exc.lineno, column=exc.colno) from exc
    return pencil_from_dict(data, tol)


def parse_pencil(path, tol: Tolerances = DEFAULT_TOL, *, real: bool = False):
    """Read a pencil file, or a bundled example by name.

    With ``real`` a Hermitian pencil is doubled into an equivalent real one.
    """
    path = str(path)
    if not Path(path).exists() and Path(path).stem in EXAMPLES and "/" not in path:
        text = example_text(Path(path).stem)
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc.strerror}", field="path") from exc
    p = parse_pencil_text(text, tol, source=path)
    if real and isinstance(p, HermitianPencil):
        log.info("doubling Hermitian %dx%d pencil to a real %dx%d pencil", p.m, p.m, 2 * p.m, 2 * p.m)
        p = symmetrize_hermitian(p)
    return p


def example_text(name: str) -> str:
    if name not in EXAMPLES:
        raise ParseError(f"unknown example {name!r}", field="name")
    return resources.files("spectracert").joinpath("data", f"{name}.json").read_text()


def load_example(name: str, tol: Tolerances = DEFAULT_TOL, *, real: bool = True):
    """Bundled example pencil; Hermitian examples are doubled unless ``real=False``."""
    p = parse_pencil_text(example_text(name), tol, source=name)
    if real and isinstance(p, HermitianPencil):
        p = symmetrize_hermitian(p)
    return p


def write_pencil(p, path) -> None:
    Path(path).write_text(dumps(p.to_dict()))


# -- reports ---------------------------------------------------------------------

def plain(obj):
    """Recursively convert numpy values to JSON-ready Python values.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
    """
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, np.generic):
        return plain(obj.item())
    if isinstance(obj, SpectraError):
        return plain(obj.to_dict())
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if hasattr(obj, "value") and hasattr(obj, "name") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"
