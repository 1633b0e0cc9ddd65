"""JSON file formats for moment sequences and atomic measures.

Moment file:

    {"degree": 5,
     "moments": [{"i": 0, "j": 0, "re": 6.0, "im": 0.0}, ...]}

where (i, j) are the conjugate and plain powers of gamma_ij. Entries may
cover only one of each conjugate pair; the loader mirrors the rest.

Measure file:

    {"atoms": [{"re": 1.0, "im": 0.0, "weight": 1.0}, ...]}
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import BadAtomSpec, ParseError
from .extraction import AtomicMeasure
from .moments import MomentSequence, MonomialIndex, validate_sequence


def _finite(x, what: str) -> float:
    try:
        val = float(x)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{what} is not a number: {x!r}") from exc
    if not math.isfinite(val):
        raise ParseError(f"{what} must be finite, got {val}")
    return val


def _load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    return data


def load_moments(path, tol_sym: float = 1e-9) -> MomentSequence:
    """Read and validate a moment file."""
    data = _load_json(path)
    if "degree" not in data or "moments" not in data:
        raise ParseError(f"{path}: expected keys 'degree' and 'moments'")
    degree = data["degree"]
    if not isinstance(degree, int) or degree < 0:
        raise ParseError(f"{path}: degree must be a nonnegative integer")
    rows = data["moments"]
    if not isinstance(rows, list):
        raise ParseError(f"{path}: 'moments' must be a list")
    table: dict[MonomialIndex, complex] = {}
    for k, row in enumerate(rows):
        if not isinstance(row, dict):
            raise ParseError(f"{path}: moment entry {k} must be an object")
        try:
            i, j = int(row["i"]), int(row["j"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(
                f"{path}: moment entry {k} needs integer fields 'i' and 'j'"
            ) from exc
        if i < 0 or j < 0:
            raise ParseError(f"{path}: negative exponents in entry {k}")
        re = _finite(row.get("re", 0.0), f"entry {k} field 're'")
        im = _finite(row.get("im", 0.0), f"entry {k} field 'im'")
        idx = MonomialIndex(i, j)
        if idx in table:
            raise ParseError(f"{path}: duplicate moment gamma_{i}{j}")
        table[idx] = complex(re, im)
    return validate_sequence(table, degree, tol_sym)


def save_moments(seq: MomentSequence, path) -> None:
    """Write the full moment table, sorted in degree-lexicographic order."""
    rows = []
    for idx in sorted(seq.entries, key=lambda m: m.position):
        val = seq.entries[idx]
        rows.append(
            {
                "i": idx.conj_power,
                "j": idx.power,
                "re": float(val.real),
                "im": float(val.imag),
            }
        )
    payload = {"degree": seq.degree, "moments": rows}
    Path(path).write_text(json.dumps(payload, indent=2, allow_nan=False) + "\n")


def load_measure(path) -> AtomicMeasure:
    """Read an atomic measure file."""
    data = _load_json(path)
    if "atoms" not in data or not isinstance(data["atoms"], list):
        raise ParseError(f"{path}: expected a list under key 'atoms'")
    atoms: list[complex] = []
    weights: list[float] = []
    for k, row in enumerate(data["atoms"]):
        if not isinstance(row, dict):
            raise ParseError(f"{path}: atom entry {k} must be an object")
        re = _finite(row.get("re", 0.0), f"atom {k} field 're'")
        im = _finite(row.get("im", 0.0), f"atom {k} field 'im'")
        if "weight" not in row:
            raise ParseError(f"{path}: atom {k} is missing its weight")
        w = _finite(row["weight"], f"atom {k} weight")
        atoms.append(complex(re, im))
        weights.append(w)
    try:
        return AtomicMeasure(tuple(atoms), tuple(weights))
    except ValueError as exc:
        raise BadAtomSpec(str(exc)) from exc


def save_measure(mu: AtomicMeasure, path) -> None:
    rows = [
        {"re": float(z.real), "im": float(z.imag), "weight": float(w)}
        for z, w in zip(mu.atoms, mu.weights)
    ]
    Path(path).write_text(
        json.dumps({"atoms": rows}, indent=2, allow_nan=False) + "\n"
    )
