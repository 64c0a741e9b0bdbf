"""JSON interchange: algebra files and run reports.

Algebra files use 1-based indices and store only bracket pairs with i < j
(antisymmetry is implied).  Floating values in emitted documents are written
with 17 significant digits, which round-trips IEEE doubles exactly; emission
is fully deterministic (fixed key order, no timestamps in the payload).
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

import numpy as np

from . import __version__
from .algebra import MetricLieAlgebra, validate
from .extension import ExtensionResult
from .reports import VerificationReport
from .soliton import SolitonCertificate


class SchemaError(ValueError):
    """The document does not follow the algebra-file schema."""


class AlgebraValidationError(ValueError):
    """The file parsed but its contents fail the metric Lie algebra axioms."""

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


def _fmt_float(x: float) -> str:
    if not np.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x!r}")
    return format(float(x), ".17g")


def dumps_canonical(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON with fixed float formatting and insertion key order."""

    def emit(o: Any, depth: int) -> str:
        pad = " " * (indent * depth)
        pad_in = " " * (indent * (depth + 1))
        if o is None:
            return "null"
        if isinstance(o, bool):
            return "true" if o else "false"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _fmt_float(float(o))
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, np.ndarray):
            return emit(o.tolist(), depth)
        if isinstance(o, (list, tuple)):
            if len(o) == 0:
                return "[]"
            items = [emit(v, depth + 1) for v in o]
            return "[\n" + ",\n".join(pad_in + s for s in items) + "\n" + pad + "]"
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{json.dumps(str(k))}: {emit(v, depth + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(pad_in + s for s in items) + "\n" + pad + "}"
        raise TypeError(f"cannot serialise object of type {type(o)!r}")

    return emit(obj, 0) + "\n"


def algebra_to_dict(alg: MetricLieAlgebra) -> dict:
    brackets = []
    n = alg.dim
    for i in range(n):
        for j in range(i + 1, n):
            coeffs = {str(k + 1): float(alg.c[i, j, k]) for k in range(n) if alg.c[i, j, k] != 0.0}
            if coeffs:
                brackets.append({"i": i + 1, "j": j + 1, "coeffs": coeffs})
    doc: dict[str, Any] = {"name": alg.name, "dim": n, "brackets": brackets}
    if not np.array_equal(alg.gram, np.eye(n)):
        doc["gram"] = alg.gram.tolist()
    if alg.basis_labels is not None:
        doc["labels"] = list(alg.basis_labels)
    return doc


def save(alg: MetricLieAlgebra, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(algebra_to_dict(alg)))


def _expect(cond: bool, msg: str) -> None:
    if not cond:
        raise SchemaError(msg)


def algebra_from_dict(doc) -> MetricLieAlgebra:
    _expect(isinstance(doc, dict), "top-level document must be a JSON object")
    _expect("name" in doc and isinstance(doc["name"], str), "'name' must be a string")
    _expect("dim" in doc and isinstance(doc["dim"], int) and not isinstance(doc["dim"], bool),
            "'dim' must be an integer")
    n = doc["dim"]
    _expect(n >= 1, "'dim' must be positive")
    allowed = {"name", "dim", "brackets", "gram", "labels"}
    unknown = set(doc) - allowed
    _expect(not unknown, f"unknown keys: {sorted(unknown)}")
    _expect("brackets" in doc and isinstance(doc["brackets"], list), "'brackets' must be a list")
    c = np.zeros((n, n, n))
    for pos, entry in enumerate(doc["brackets"]):
        where = f"brackets[{pos}]"
        _expect(isinstance(entry, dict), f"{where} must be an object")
        _expect(set(entry) == {"i", "j", "coeffs"}, f"{where} must have exactly keys i, j, coeffs")
        i, j = entry["i"], entry["j"]
        _expect(isinstance(i, int) and isinstance(j, int), f"{where}: i and j must be integers")
        _expect(1 <= i <= n and 1 <= j <= n, f"{where}: indices out of range 1..{n}")
        _expect(i < j, f"{where}: need i < j (antisymmetry is implied), got i={i}, j={j}")
        _expect(isinstance(entry["coeffs"], dict) and entry["coeffs"], f"{where}: coeffs must be a non-empty object")
        for key, val in entry["coeffs"].items():
            try:
                k = int(key)
            except (TypeError, ValueError):
                raise SchemaError(f"{where}: coefficient key {key!r} is not an integer index") from None
            _expect(1 <= k <= n, f"{where}: coefficient index {k} out of range 1..{n}")
            _expect(isinstance(val, (int, float)) and not isinstance(val, bool),
                    f"{where}: coefficient for index {k} must be a number")
            _expect(c[i - 1, j - 1, k - 1] == 0.0, f"{where}: duplicate coefficient for index {k}")
            c[i - 1, j - 1, k - 1] = float(val)
            c[j - 1, i - 1, k - 1] = -float(val)
    if "gram" in doc:
        gram = np.asarray(doc["gram"], dtype=float)
        _expect(gram.shape == (n, n), f"'gram' must be a {n}x{n} array")
    else:
        gram = np.eye(n)
    labels = None
    if "labels" in doc:
        _expect(isinstance(doc["labels"], list) and len(doc["labels"]) == n
                and all(isinstance(s, str) for s in doc["labels"]),
                f"'labels' must be a list of {n} strings")
        labels = tuple(doc["labels"])
    alg = MetricLieAlgebra(name=doc["name"], dim=n, c=c, gram=gram, basis_labels=labels)
    report = validate(alg)
    if not report.valid:
        raise AlgebraValidationError(
            f"algebra '{alg.name}' fails validation: {report.summary()}", report
        )
    return alg


def load(path) -> MetricLieAlgebra:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    return algebra_from_dict(doc)


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def report_to_dict(report: VerificationReport) -> dict:
    return {
        "verdict": report.verdict,
        "checks": [
            {
                "name": c.name,
                "residual": c.residual,
                "raw": c.raw,
                "tolerance": c.tolerance,
                "pass": c.passed,
                "detail": c.detail,
            }
            for c in report.checks
        ],
    }


def certificate_to_dict(cert: SolitonCertificate) -> dict:
    return {
        "lambda": cert.lam,
        "kind": cert.kind,
        "residual": cert.residual,
        "normal_defect": cert.normal_defect,
        "D": cert.D.matrix.tolist(),
        "S": cert.S.matrix.tolist(),
        "A": cert.A.matrix.tolist(),
    }


def extension_to_dict(result: ExtensionResult) -> dict:
    return {
        "mode": result.mode,
        "source": result.source,
        "xi_index": result.xi_index + 1,  # 1-based at the file boundary
        "alpha": result.alpha,
        "L": result.L,
        "m": result.m,
        "lambda": result.lam,
        "algebra": algebra_to_dict(result.ext),
    }


def run_report(payload: dict, input_path=None, tolerances: dict | None = None) -> dict:
    """Wrap a payload with provenance (excluded from the determinism contract)."""
    provenance: dict[str, Any] = {"tool": "solitonforge", "version": __version__}
    if input_path is not None:
        provenance["input"] = {"path": str(input_path), "sha256": file_sha256(input_path)}
    if tolerances:
        provenance["tolerances"] = dict(tolerances)
    return {"provenance": provenance, "result": payload}


def write_json_report(path, payload: dict, input_path=None, tolerances: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(run_report(payload, input_path=input_path, tolerances=tolerances)))
