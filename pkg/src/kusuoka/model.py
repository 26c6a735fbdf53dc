"""JSON model files describing a unitary and a POVM.

Complex numbers are ``[re, im]`` pairs. Example::

    {
      "dimension": 3,
      "unitary": [[[1, 0], [0, 0], [0, 0]], ...],
      "povm": {"kind": "pvm_basis_split", "basis": [...], "block_sizes": [2, 1]},
      "tolerances": {"tol_rank": 1e-9}
    }

``povm.kind`` is one of ``elements``, ``rank1_vectors`` or ``pvm_basis_split``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import KusuokaError, ValidationError
from .pifs import Pifs
from .quantum import Povm, Unitary, pvm_from_basis, rank_one_povm, validate_povm
from .tolerances import Tolerances


class ModelError(ValidationError):
    """Problem in a model file; ``pointer`` is a JSON pointer to the offending value."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


class ParseError(ModelError):
    pass


class SchemaError(ModelError):
    pass


@dataclass(frozen=True, eq=False)
class Model:
    unitary: Unitary
    povm: Povm
    tolerances: Tolerances
    raw: dict

    @property
    def digest(self) -> str:
        return model_digest(self.raw)

    def pifs(self, tol: Tolerances | None = None) -> Pifs:
        return Pifs.build(self.unitary, self.povm, tol or self.tolerances)


def model_digest(raw: dict) -> str:
    """SHA-256 of the canonical (sorted keys, no whitespace) JSON form."""
    canon = json.dumps(raw, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _complex(x, ptr: str) -> complex:
    if isinstance(x, bool):
        raise SchemaError("expected a number or [re, im] pair", ptr)
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(
        isinstance(c, (int, float)) and not isinstance(c, bool) for c in x
    ):
        return complex(x[0], x[1])
    raise SchemaError("expected a number or [re, im] pair", ptr)


def _vector(x, d: int, ptr: str) -> np.ndarray:
    if not isinstance(x, list) or len(x) != d:
        raise SchemaError(f"expected a list of {d} complex numbers", ptr)
    return np.array([_complex(c, f"{ptr}/{i}") for i, c in enumerate(x)])


def _matrix(x, d: int, ptr: str) -> np.ndarray:
    if not isinstance(x, list) or len(x) != d:
        raise SchemaError(f"expected {d} rows", ptr)
    return np.array([_vector(row, d, f"{ptr}/{i}") for i, row in enumerate(x)])


def _wrap(fn, ptr: str):
    try:
        return fn()
    except ModelError:
        raise
    except KusuokaError as exc:
        idx = getattr(exc, "index", None)
        raise ModelError(str(exc), ptr if idx is None else f"{ptr}/{idx}") from exc


def parse_model(raw) -> Model:
    if not isinstance(raw, dict):
        raise SchemaError("model must be a JSON object", "")
    tol = Tolerances()
    if "tolerances" in raw:
        t = raw["tolerances"]
        if not isinstance(t, dict):
            raise SchemaError("tolerances must be an object", "/tolerances")
        for name, val in t.items():
            if name not in Tolerances.names():
                raise SchemaError(f"unknown tolerance {name!r}", f"/tolerances/{name}")
            if not isinstance(val, (int, float)) or isinstance(val, bool) or val < 0:
                raise SchemaError("tolerance must be a nonnegative number", f"/tolerances/{name}")
        tol = tol.replace(**t)
    d = raw.get("dimension")
    if not isinstance(d, int) or isinstance(d, bool):
        raise SchemaError("dimension must be an integer", "/dimension")
    if d < 2:
        raise ModelError("dimension must be >= 2", "/dimension")
    if "unitary" not in raw:
        raise SchemaError("missing unitary", "/unitary")
    u_arr = _matrix(raw["unitary"], d, "/unitary")
    u = _wrap(lambda: Unitary.from_array(u_arr, tol), "/unitary")
    pv = raw.get("povm")
    if not isinstance(pv, dict):
        raise SchemaError("povm must be an object", "/povm")
    kind = pv.get("kind")
    if kind == "elements":
        els = pv.get("elements")
        if not isinstance(els, list) or not els:
            raise SchemaError("elements must be a nonempty list", "/povm/elements")
        mats = [_matrix(e, d, f"/povm/elements/{i}") for i, e in enumerate(els)]
        povm = _wrap(lambda: validate_povm(mats, tol), "/povm/elements")
    elif kind == "rank1_vectors":
        vs = pv.get("vectors")
        if not isinstance(vs, list) or not vs:
            raise SchemaError("vectors must be a nonempty list", "/povm/vectors")
        vecs = [_vector(v, d, f"/povm/vectors/{i}") for i, v in enumerate(vs)]
        povm = _wrap(lambda: rank_one_povm(vecs, tol), "/povm/vectors")
    elif kind == "pvm_basis_split":
        basis = _matrix(pv.get("basis"), d, "/povm/basis")
        sizes = pv.get("block_sizes")
        if not isinstance(sizes, list) or not all(isinstance(s, int) and not isinstance(s, bool) for s in sizes):
            raise SchemaError("block_sizes must be a list of integers", "/povm/block_sizes")
        povm = _wrap(lambda: pvm_from_basis(basis, sizes, tol), "/povm")
    else:
        raise SchemaError("kind must be elements, rank1_vectors or pvm_basis_split", "/povm/kind")
    return Model(u, povm, tol, raw)


def load_model(path) -> Model:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return parse_model(raw)


def _num(x: float):
    # repr of a float is the shortest string that round-trips exactly (<= 17 digits)
    x = float(x)
    return int(x) if x.is_integer() and abs(x) < 2**53 else x


def _encode_matrix(m) -> list:
    return [[[_num(c.real), _num(c.imag)] for c in row] for row in np.asarray(m, dtype=complex)]


def model_to_dict(u, povm_elements, tolerances: dict | None = None) -> dict:
    u = np.asarray(u, dtype=complex)
    raw = {
        "dimension": int(u.shape[0]),
        "unitary": _encode_matrix(u),
        "povm": {"kind": "elements", "elements": [_encode_matrix(e) for e in povm_elements]},
    }
    if tolerances:
        raw["tolerances"] = dict(tolerances)
    return raw


def dump_model(path, u, povm_elements, tolerances: dict | None = None) -> dict:
    raw = model_to_dict(u, povm_elements, tolerances)
    Path(path).write_text(json.dumps(raw, indent=1), encoding="utf-8")
    return raw
