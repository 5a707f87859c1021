"""JSON encodings for matrices, functionals, worlds, algebras and channels.

A matrix is ``{"dim": n, "entries": [[re, im], ...]}`` with the n*n entries
in row-major order. Rectangular matrices (Kraus operators) use
``"rows"``/``"cols"`` in place of ``"dim"``. Floats are written with
``repr``, which round-trips float64 exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    Functional,
    StarAlgebra,
    World,
    block_algebra,
    diagonal_algebra,
    full_matrix_algebra,
    generate_algebra,
)
from .cloner import Channel
from .errors import OpalgError


class FormatError(OpalgError):
    """Malformed input; ``where`` locates the problem (JSON path or line:col)."""

    def __init__(self, where: str, message: str):
        self.where = where
        super().__init__(f"{where}: {message}")


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    entries = [[float(z.real), float(z.imag)] for z in m.reshape(-1)]
    if m.shape[0] == m.shape[1]:
        return {"dim": m.shape[0], "entries": entries}
    return {"rows": m.shape[0], "cols": m.shape[1], "entries": entries}


def matrix_from_json(obj, where: str = "$") -> np.ndarray:
    if not isinstance(obj, dict):
        raise FormatError(where, "expected an object with 'dim' and 'entries'")
    if "dim" in obj:
        rows = cols = obj["dim"]
        key = "dim"
    elif "rows" in obj and "cols" in obj:
        rows, cols, key = obj["rows"], obj["cols"], "rows"
    else:
        raise FormatError(where, "missing 'dim'")
    for v in (rows, cols):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise FormatError(f"{where}.{key}", "must be a positive integer")
    entries = obj.get("entries")
    if not isinstance(entries, list):
        raise FormatError(f"{where}.entries", "missing or not a list")
    if len(entries) != rows * cols:
        raise FormatError(f"{where}.entries", f"expected {rows * cols} entries, found {len(entries)}")
    out = np.empty(rows * cols, dtype=complex)
    for i, e in enumerate(entries):
        if (
            not isinstance(e, list)
            or len(e) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in e)
        ):
            raise FormatError(f"{where}.entries[{i}]", "expected a [re, im] pair of numbers")
        out[i] = complex(e[0], e[1])
    if not np.all(np.isfinite(out)):
        raise FormatError(f"{where}.entries", "non-finite value")
    return out.reshape(rows, cols)


def read_json(path) -> object:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _field(obj, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(where, f"missing '{key}'")
    return obj[key]


def load_matrix(path) -> np.ndarray:
    return matrix_from_json(read_json(path), str(path))


def save_matrix(m, path) -> None:
    write_json(matrix_to_json(m), path)


def functional_from_json(obj, where: str = "$") -> Functional:
    m = matrix_from_json(_field(obj, "pairing", where), f"{where}.pairing")
    if m.shape[0] != m.shape[1]:
        raise FormatError(f"{where}.pairing", "must be square")
    return Functional.from_pairing(m)


def functional_to_json(f) -> dict:
    return {"pairing": matrix_to_json(f.pairing)}


def world_from_json(obj, where: str = "$", tol: float = DEFAULT_TOL) -> World:
    m = matrix_from_json(_field(obj, "basis_matrix", where), f"{where}.basis_matrix")
    return World(m.shape[0], m, tol)


def world_to_json(w: World) -> dict:
    return {"basis_matrix": matrix_to_json(w.basis_matrix)}


def algebra_from_json(obj, where: str = "$") -> StarAlgebra:
    """Accepts an explicit basis, a generator list, or a named family."""
    if not isinstance(obj, dict):
        raise FormatError(where, "expected an object")
    if "kind" in obj:
        kind = obj["kind"]
        if kind == "full":
            return full_matrix_algebra(int(_field(obj, "dim", where)))
        if kind == "diagonal":
            return diagonal_algebra(int(_field(obj, "dim", where)))
        if kind == "blocks":
            return block_algebra([int(s) for s in _field(obj, "sizes", where)])
        raise FormatError(f"{where}.kind", f"unknown algebra kind {kind!r}")
    if "generators" in obj:
        gens = [matrix_from_json(g, f"{where}.generators[{i}]") for i, g in enumerate(obj["generators"])]
        return generate_algebra(gens)
    basis = [matrix_from_json(b, f"{where}.basis[{i}]") for i, b in enumerate(_field(obj, "basis", where))]
    n = int(_field(obj, "ambient_dim", where))
    return StarAlgebra(n, np.array(basis))


def algebra_to_json(A: StarAlgebra) -> dict:
    return {"ambient_dim": A.ambient_dim, "basis": [matrix_to_json(b) for b in A.basis]}


def channel_from_json(obj, where: str = "$") -> Channel:
    kraus = [matrix_from_json(k, f"{where}.kraus[{i}]") for i, k in enumerate(_field(obj, "kraus", where))]
    if not kraus:
        raise FormatError(f"{where}.kraus", "empty Kraus list")
    in_dim, out_dim = int(_field(obj, "in_dim", where)), int(_field(obj, "out_dim", where))
    for i, k in enumerate(kraus):
        if k.shape != (out_dim, in_dim):
            raise FormatError(f"{where}.kraus[{i}]", f"shape {k.shape} != ({out_dim}, {in_dim})")
    return Channel(np.array(kraus))


def channel_to_json(ch: Channel) -> dict:
    return {"in_dim": ch.in_dim, "out_dim": ch.out_dim, "kraus": [matrix_to_json(k) for k in ch.kraus]}


def grid_from_json(obj, where: str = "$") -> list[np.ndarray]:
    pts = obj.get("points") if isinstance(obj, dict) else obj
    if not isinstance(pts, list) or not pts:
        raise FormatError(where, "expected a nonempty list of [q, p] points")
    out = []
    for i, p in enumerate(pts):
        if not isinstance(p, list) or len(p) != 2:
            raise FormatError(f"{where}[{i}]", "expected [q, p]")
        out.append(np.array(p, dtype=float))
    return out
