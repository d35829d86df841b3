"""JSON encoding of scalars, vectors, instances, kernels and reports.

Scalars are JSON numbers, or the strings ``"-inf"`` (𝟘) and ``"+inf"`` (⊤).

Instance file (a semimodule)::

    {"semiring": "rmax-complete", "ground_set": ["a", "b"],
     "generators": [[0, "-inf"], [-1, 0]], "closure": "b-closed-span"}

A semimetric file uses ``"matrix"`` in place of ``"generators"``; a kernel
file has ``"domain"``, ``"codomain"`` and ``"entries"``.  A tabulated
operator adds ``"values"`` (one row per generator) to an instance file.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .operator import IntegralOperator, TabulatedOperator
from .semimetric import Semimetric
from .semimodule import B_CLOSED, CLOSURES, GroundSet, Semimodule
from .semiring import RMAX, Semiring, SemiringError, format_scalar, get_semiring, parse_scalar


class FormatError(ValueError):
    """Input file is not valid JSON or does not follow the schema."""


def encode(obj: Any) -> Any:
    """Make ``obj`` JSON-serialisable, mapping infinities to strings."""
    if isinstance(obj, np.ndarray):
        return encode(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating, int, np.integer)):
        return format_scalar(float(obj))
    if isinstance(obj, GroundSet):
        return list(obj.labels)
    if isinstance(obj, Semiring):
        return obj.name
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(encode(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(obj: Any, path: str | Path | None) -> str:
    text = dumps(obj)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def load_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from exc


def decode_matrix(rows, semiring: Semiring | str, where: str) -> np.ndarray:
    semiring = get_semiring(semiring)
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise FormatError(f"{where}: expected a list of rows")
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise FormatError(f"{where}: rows have different lengths")
    try:
        return np.array([[parse_scalar(v, semiring) for v in r] for r in rows],
                        dtype=float).reshape(len(rows), widths.pop() if widths else 0)
    except (SemiringError, ValueError, TypeError) as exc:
        raise FormatError(f"{where}: {exc}") from exc


def decode_vector(values, semiring: Semiring | str = RMAX, where: str = "vector") -> np.ndarray:
    if not isinstance(values, list):
        raise FormatError(f"{where}: expected a list of scalars")
    return decode_matrix([values], semiring, where)[0]


def _ground(doc: dict, n: int, where: str) -> GroundSet:
    labels = doc.get("ground_set")
    if labels is None:
        return GroundSet.range(n)
    if not isinstance(labels, list) or len(labels) != n:
        raise FormatError(f"{where}: ground_set must list {n} labels")
    return GroundSet(tuple(str(v) for v in labels))


def _semiring(doc: dict, where: str) -> Semiring:
    try:
        return get_semiring(doc.get("semiring", RMAX.name))
    except SemiringError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def _object(doc, where: str) -> dict:
    if not isinstance(doc, dict):
        raise FormatError(f"{where}: expected a JSON object")
    return doc


def semimodule_from_json(doc, where: str = "instance") -> Semimodule:
    doc = _object(doc, where)
    sr = _semiring(doc, where)
    if "generators" not in doc:
        raise FormatError(f"{where}: missing 'generators'")
    gens = decode_matrix(doc["generators"], sr, f"{where}.generators")
    n = gens.shape[1] if gens.size else len(doc.get("ground_set", []))
    closure = doc.get("closure", B_CLOSED)
    if closure not in CLOSURES:
        raise FormatError(f"{where}: closure must be one of {CLOSURES}")
    return Semimodule(gens.reshape(-1, n), _ground(doc, n, where), closure, sr)


def semimetric_from_json(doc, where: str = "semimetric") -> Semimetric:
    doc = _object(doc, where)
    sr = _semiring(doc, where)
    if "matrix" not in doc:
        raise FormatError(f"{where}: missing 'matrix'")
    m = decode_matrix(doc["matrix"], sr, f"{where}.matrix")
    return Semimetric(m, _ground(doc, m.shape[0], where), sr)


def matrix_from_json(doc, where: str = "matrix") -> tuple[np.ndarray, GroundSet, Semiring]:
    """Square matrix under ``matrix`` (or ``entries``) without semimetric validation."""
    doc = _object(doc, where)
    sr = _semiring(doc, where)
    key = "matrix" if "matrix" in doc else "entries"
    if key not in doc:
        raise FormatError(f"{where}: missing 'matrix'")
    m = decode_matrix(doc[key], sr, f"{where}.{key}")
    if m.shape[0] != m.shape[1]:
        raise FormatError(f"{where}: matrix must be square")
    return m, _ground(doc, m.shape[0], where), sr


def kernel_from_json(doc, where: str = "kernel") -> IntegralOperator:
    doc = _object(doc, where)
    sr = _semiring(doc, where)
    if "entries" not in doc:
        raise FormatError(f"{where}: missing 'entries'")
    k = decode_matrix(doc["entries"], sr, f"{where}.entries")
    dom = doc.get("domain")
    cod = doc.get("codomain")
    domain = GroundSet(tuple(map(str, dom))) if dom is not None else None
    codomain = GroundSet(tuple(map(str, cod))) if cod is not None else None
    try:
        return IntegralOperator(k, domain, codomain, sr)
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def operator_from_json(doc, V: Semimodule, where: str = "operator"):
    """A kernel file, or a tabulated operator given by ``values`` on V's generators."""
    doc = _object(doc, where)
    if "entries" in doc:
        return kernel_from_json(doc, where)
    if "values" not in doc:
        raise FormatError(f"{where}: expected 'entries' (kernel) or 'values' (tabulated)")
    if _semiring(doc, where) != V.semiring:
        raise FormatError(f"{where}: semiring differs from the module's")
    vals = decode_matrix(doc["values"], V.semiring, f"{where}.values")
    probes = doc.get("probe_coefficients")
    probes = decode_matrix(probes, V.semiring, f"{where}.probe_coefficients") if probes else None
    try:
        return TabulatedOperator(V, vals, probe_coefficients=probes)
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def semimodule_to_json(V: Semimodule) -> dict:
    return {"semiring": V.semiring.name, "ground_set": list(V.ground.labels),
            "generators": encode(V.generators), "closure": V.closure}


def semimetric_to_json(d: Semimetric) -> dict:
    return {"semiring": d.semiring.name, "ground_set": list(d.ground.labels),
            "matrix": encode(d.matrix)}


def kernel_to_json(kernel, domain: GroundSet, codomain: GroundSet) -> dict:
    return {"domain": list(domain.labels), "codomain": list(codomain.labels),
            "entries": encode(np.asarray(kernel))}


def tabulated_to_json(A: TabulatedOperator) -> dict:
    doc = semimodule_to_json(A.domain)
    doc["values"] = encode(A.values)
    if len(A.probe_coefficients):
        doc["probe_coefficients"] = encode(A.probe_coefficients)
    return doc
