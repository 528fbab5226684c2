"""File formats: tensors, decompositions, controlled systems, trajectories, reports.

Tensor documents (``mlds-tensor/1``)::

    {"format": "mlds-tensor/1", "order": k, "dim": n, "entries": [...]}

with ``n**k`` entries in canonical first-index-fastest order, or the sparse
form::

    {"format": "mlds-tensor/1", "order": k, "dim": n,
     "sparse": [{"idx": [j1, ..., jk], "val": x}, ...], "symmetrize": true}

where indices are 1-based and unlisted entries are zero. With
``"symmetrize": true`` the tensor is permutation-averaged at load instead
of being checked for symmetry.

Decomposition documents (``mlds-decomposition/1``)::

    {"format": "mlds-decomposition/1", "order": k, "lambda": [...],
     "factors": [[...], ...], "residual": x, "norm": y}

``factors`` lists the unit vectors ``v_r``. System documents for the
reachability test are ``{"tensor": <tensor document or path>, "B": [[col], ...]}``
with ``B`` given as a list of columns.
"""

from __future__ import annotations

import csv
import io as _io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, InputError
from .spectral import OdecoDecomposition
from .tensor import SymTensor, certify_symmetric, symmetrize

__all__ = [
    "TENSOR_FORMAT",
    "DECOMPOSITION_FORMAT",
    "FormatError",
    "load_json",
    "tensor_from_doc",
    "tensor_to_doc",
    "load_tensor",
    "save_tensor",
    "decomposition_from_doc",
    "decomposition_to_doc",
    "load_decomposition",
    "save_decomposition",
    "load_system",
    "trajectory_csv",
    "write_atomic",
    "dumps",
]

TENSOR_FORMAT = "mlds-tensor/1"
DECOMPOSITION_FORMAT = "mlds-decomposition/1"


class FormatError(InputError):
    """A file does not parse or does not follow its documented schema."""


def load_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"{path}: cannot read: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc


def _require(doc, key, where):
    if key not in doc:
        raise FormatError(f"{where}: missing key {key!r}")
    return doc[key]


def tensor_from_doc(doc: dict, sym_tol: float | None = None, where: str = "<tensor>") -> SymTensor:
    if not isinstance(doc, dict):
        raise FormatError(f"{where}: tensor document must be a JSON object")
    fmt = doc.get("format", TENSOR_FORMAT)
    if fmt != TENSOR_FORMAT:
        raise FormatError(f"{where}: unsupported format {fmt!r}, expected {TENSOR_FORMAT!r}")
    if "sparse" in doc:
        items = doc["sparse"]
        if not isinstance(items, list):
            raise FormatError(f"{where}: 'sparse' must be a list")
        for i, it in enumerate(items):
            if not (isinstance(it, dict) and isinstance(it.get("idx"), list) and "val" in it):
                raise FormatError(f"{where}: sparse[{i}] needs 'idx' (list) and 'val'")
        if not items and ("order" not in doc or "dim" not in doc):
            raise FormatError(f"{where}: empty sparse tensor needs 'order' and 'dim'")
        k = int(doc.get("order", len(items[0]["idx"]) if items else 0))
        n = int(doc.get("dim", max((max(it["idx"]) for it in items), default=0)))
        data = np.zeros((n,) * k)
        for i, it in enumerate(items):
            idx = it["idx"]
            if len(idx) != k or not all(isinstance(j, int) and 1 <= j <= n for j in idx):
                raise FormatError(f"{where}: sparse[{i}] index {idx} outside order {k}, dim {n}")
            data[tuple(j - 1 for j in idx)] += float(it["val"])
        if doc.get("symmetrize", False):
            data = symmetrize(data)
        return certify_symmetric(data, k, n, sym_tol)
    k = int(_require(doc, "order", where))
    n = int(_require(doc, "dim", where))
    entries = _require(doc, "entries", where)
    try:
        arr = np.asarray(entries, dtype=float).ravel()
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{where}: entries must be a flat list of numbers: {exc}") from exc
    return certify_symmetric(arr, k, n, sym_tol)


def tensor_to_doc(T: SymTensor) -> dict:
    return {
        "format": TENSOR_FORMAT,
        "order": T.order,
        "dim": T.dim,
        "entries": T.entries.tolist(),
    }


def load_tensor(path, sym_tol: float | None = None) -> SymTensor:
    return tensor_from_doc(load_json(path), sym_tol, where=str(path))


def save_tensor(path, T: SymTensor):
    write_atomic(path, dumps(tensor_to_doc(T)))


def decomposition_to_doc(dec: OdecoDecomposition) -> dict:
    return {
        "format": DECOMPOSITION_FORMAT,
        "order": dec.order,
        "lambda": dec.eigenvalues.tolist(),
        "factors": dec.factors.T.tolist(),
        "residual": dec.residual,
        "norm": dec.norm,
        "odeco": dec.is_odeco,
    }


def decomposition_from_doc(doc: dict, where: str = "<decomposition>") -> OdecoDecomposition:
    lam = np.asarray(_require(doc, "lambda", where), dtype=float)
    factors = np.asarray(_require(doc, "factors", where), dtype=float)
    if factors.ndim != 2 or factors.shape[0] != lam.size:
        raise FormatError(f"{where}: need one factor per eigenvalue")
    k = int(_require(doc, "order", where))
    residual = float(doc.get("residual", 0.0))
    norm = float(doc.get("norm", np.sqrt(np.sum(lam**2))))
    return OdecoDecomposition(lam, factors.T.copy(), k, residual, norm)


def load_decomposition(path) -> OdecoDecomposition:
    return decomposition_from_doc(load_json(path), where=str(path))


def save_decomposition(path, dec: OdecoDecomposition):
    write_atomic(path, dumps(decomposition_to_doc(dec)))


def load_system(path, sym_tol: float | None = None):
    """Read a controlled-system document; returns ``(tensor, B)`` with ``B`` as ``n x m``."""
    doc = load_json(path)
    where = str(path)
    tdoc = _require(doc, "tensor", where)
    if isinstance(tdoc, str):
        tpath = Path(tdoc)
        if not tpath.is_absolute():
            tpath = Path(path).parent / tpath
        A = load_tensor(tpath, sym_tol)
    else:
        A = tensor_from_doc(tdoc, sym_tol, where=f"{where}:tensor")
    cols = np.asarray(_require(doc, "B", where), dtype=float)
    if cols.ndim != 2 or cols.shape[1] != A.dim:
        raise DimensionMismatch(f"{where}: B must be a list of columns of length {A.dim}")
    return A, cols.T.copy()


def trajectory_csv(traj) -> str:
    """CSV text with header ``t,x_1,...,x_n,norm`` and 17 significant digits."""
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n = traj.states.shape[1]
    w.writerow(["t", *(f"x_{i + 1}" for i in range(n)), "norm"])
    for t, x, nx in zip(traj.steps, traj.states, traj.norms):
        w.writerow([int(t), *(format(v, ".17g") for v in x), format(nx, ".17g")])
    return buf.getvalue()


def dumps(obj) -> str:
    """Deterministic JSON text; floats use the shortest exact round-trip form."""
    return json.dumps(obj, indent=2, allow_nan=False, default=_default) + "\n"


def _default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def write_atomic(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
