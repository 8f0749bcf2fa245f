"""Canonical JSON encoding of instances, states, and reports.

All writers emit the same canonical form: sorted keys, two-space indent,
LF newlines, floats at 17 significant digits. Re-serializing a parsed
document reproduces it byte for byte, which is what makes seeded runs
diff-able.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .errors import SchemaError
from .hamiltonians import LocalHamiltonianInstance
from .marginals import AlphaVector, ConsistencyInstance, ConsistencyPrimeInstance
from .paulis import local_pauli_set
from .states import validate_density


def _fmt_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    xf = float(x)
    if not math.isfinite(xf):
        raise SchemaError(f"non-finite number {xf!r} is not serializable")
    return format(xf, ".17g")


def _emit(obj, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj)
        for pos, key in enumerate(keys):
            if not isinstance(key, str):
                raise SchemaError(f"non-string key {key!r}")
            out.append(inner + json.dumps(key) + ": ")
            _emit(obj[key], indent + 1, out)
            out.append(",\n" if pos < len(keys) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)):
        if len(obj) == 0:
            out.append("[]")
            return
        out.append("[\n")
        for pos, item in enumerate(obj):
            out.append(inner)
            _emit(item, indent + 1, out)
            out.append(",\n" if pos < len(obj) - 1 else "\n")
        out.append(pad + "]")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, (bool, int, float, np.integer, np.floating)):
        out.append(_fmt_number(obj))
    else:
        raise SchemaError(f"cannot serialize {type(obj).__name__}")


def canonical_dumps(obj) -> str:
    out: list[str] = []
    _emit(obj, 0, out)
    out.append("\n")
    return "".join(out)


def write_canonical(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canonical_dumps(obj))


def load_document(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from exc


def _expect(doc: dict, key: str, typ, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise SchemaError(f"{where}: missing key {key!r}")
    val = doc[key]
    if typ is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise SchemaError(f"{where}.{key}: expected number, got {type(val).__name__}")
        return float(val)
    if typ is int:
        if isinstance(val, bool) or not isinstance(val, int):
            raise SchemaError(f"{where}.{key}: expected integer, got {type(val).__name__}")
        return val
    if not isinstance(val, typ):
        raise SchemaError(
            f"{where}.{key}: expected {typ.__name__}, got {type(val).__name__}"
        )
    return val


def encode_matrix(M: np.ndarray) -> dict:
    M = np.asarray(M)
    dim = M.shape[0]
    n = dim.bit_length() - 1
    entries = [[float(v.real), float(v.imag)] for v in M.ravel()]
    return {"qubits": n, "entries": entries}


def decode_matrix(doc: dict, where: str = "matrix") -> np.ndarray:
    n = _expect(doc, "qubits", int, where)
    entries = _expect(doc, "entries", list, where)
    dim = 2**n
    if len(entries) != dim * dim:
        raise SchemaError(
            f"{where}: expected {dim * dim} entries for {n} qubits, got {len(entries)}"
        )
    flat = np.empty(dim * dim, dtype=complex)
    for idx, pair in enumerate(entries):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in pair)
        ):
            raise SchemaError(f"{where}.entries[{idx}]: expected [re, im]")
        flat[idx] = complex(pair[0], pair[1])
    return flat.reshape(dim, dim)


def _decode_subsets(doc: dict, n: int, where: str) -> tuple[tuple[int, ...], ...]:
    raw = _expect(doc, "subsets", list, where)
    subsets = []
    for i, sub in enumerate(raw):
        if not isinstance(sub, list) or not sub:
            raise SchemaError(f"{where}.subsets[{i}]: expected a nonempty list")
        for q in sub:
            if isinstance(q, bool) or not isinstance(q, int) or not 1 <= q <= n:
                raise SchemaError(f"{where}.subsets[{i}]: qubit {q!r} outside 1..{n}")
        subsets.append(tuple(sorted(set(sub))))
    return tuple(subsets)


def encode_consistency(inst: ConsistencyInstance) -> dict:
    return {
        "n": inst.n,
        "subsets": [list(C) for C in inst.layout],
        "marginals": [encode_matrix(rho.matrix) for rho in inst.marginals],
        "beta": inst.beta,
    }


def decode_consistency(doc: dict, where: str = "instance") -> ConsistencyInstance:
    n = _expect(doc, "n", int, where)
    beta = _expect(doc, "beta", float, where)
    subsets = _decode_subsets(doc, n, where)
    raw = _expect(doc, "marginals", list, where)
    if len(raw) != len(subsets):
        raise SchemaError(f"{where}: {len(subsets)} subsets but {len(raw)} marginals")
    marginals = tuple(
        validate_density(decode_matrix(mdoc, f"{where}.marginals[{i}]"))
        for i, mdoc in enumerate(raw)
    )
    return ConsistencyInstance(n=n, layout=subsets, marginals=marginals, beta=beta)


def encode_prime(p: ConsistencyPrimeInstance) -> dict:
    alphas = {
        pauli.factors: float(p.alphas.values[i])
        for i, pauli in enumerate(p.basis.elements)
    }
    return {
        "n": p.n,
        "subsets": [list(C) for C in p.layout],
        "alphas": alphas,
        "beta_prime": p.beta_prime,
    }


def decode_prime(doc: dict, where: str = "instance") -> ConsistencyPrimeInstance:
    n = _expect(doc, "n", int, where)
    beta_prime = _expect(doc, "beta_prime", float, where)
    subsets = _decode_subsets(doc, n, where)
    raw = _expect(doc, "alphas", dict, where)
    basis = local_pauli_set(subsets, n)
    expected = {p.factors for p in basis.elements}
    given = set(raw)
    if given != expected:
        missing = sorted(expected - given)[:3]
        extra = sorted(given - expected)[:3]
        raise SchemaError(
            f"{where}.alphas: keys do not match the local basis"
            + (f"; missing {missing}" if missing else "")
            + (f"; unexpected {extra}" if extra else "")
        )
    values = np.empty(basis.d)
    for i, pauli in enumerate(basis.elements):
        v = raw[pauli.factors]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SchemaError(f"{where}.alphas[{pauli.factors}]: expected number")
        values[i] = float(v)
    return ConsistencyPrimeInstance(
        n=n,
        basis=basis,
        alphas=AlphaVector(basis=basis, values=values),
        beta_prime=beta_prime,
    )


def encode_lh(lh: LocalHamiltonianInstance) -> dict:
    return {
        "n": lh.n,
        "terms": [
            {"subset": list(C), "matrix": encode_matrix(H)} for C, H in lh.terms
        ],
        "a": lh.a,
        "b": lh.b,
    }


def decode_lh(doc: dict, where: str = "instance") -> LocalHamiltonianInstance:
    n = _expect(doc, "n", int, where)
    a = _expect(doc, "a", float, where)
    b = _expect(doc, "b", float, where)
    raw = _expect(doc, "terms", list, where)
    terms = []
    for i, tdoc in enumerate(raw):
        if not isinstance(tdoc, dict):
            raise SchemaError(f"{where}.terms[{i}]: expected an object")
        sub = _expect(tdoc, "subset", list, f"{where}.terms[{i}]")
        for q in sub:
            if isinstance(q, bool) or not isinstance(q, int) or not 1 <= q <= n:
                raise SchemaError(f"{where}.terms[{i}].subset: qubit {q!r} outside 1..{n}")
        M = decode_matrix(
            _expect(tdoc, "matrix", dict, f"{where}.terms[{i}]"),
            f"{where}.terms[{i}].matrix",
        )
        terms.append((tuple(sorted(set(sub))), M))
    return LocalHamiltonianInstance(n=n, terms=tuple(terms), a=a, b=b)


def instance_kind(doc: dict) -> str:
    """Classify a parsed document by its discriminating key."""
    if not isinstance(doc, dict):
        raise SchemaError("document is not a JSON object")
    if "terms" in doc:
        return "lh"
    if "alphas" in doc:
        return "prime"
    if "marginals" in doc:
        return "consistency"
    raise SchemaError("document has none of the keys terms/alphas/marginals")
