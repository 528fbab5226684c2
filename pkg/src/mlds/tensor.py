"""Dense supersymmetric tensors and the multilinear algebra built on them.

Conventions
-----------
* Modes are numbered ``1..k`` in every public function.
* The canonical flat order of a tensor's entries is first-index-fastest
  (the column-major generalisation, ``numpy`` order ``"F"``). Entry
  ``(j_1, ..., j_k)`` (1-based) sits at flat position
  ``(j_1 - 1) + (j_2 - 1) n + ... + (j_k - 1) n^(k-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadMode, DimensionMismatch, OddOrder, SymmetryViolation

__all__ = [
    "SymTensor",
    "certify_symmetric",
    "symmetrize",
    "mode_product",
    "apply_system",
    "multilinear_form",
    "inner_product",
    "frobenius_norm",
    "unfold_even",
    "matricize",
    "mode_singular_values",
    "odeco_tensor",
]


@dataclass(frozen=True, eq=False)
class SymTensor:
    """Certified supersymmetric cubical tensor of order ``k`` and dimension ``n``.

    Instances are created by :func:`certify_symmetric`; the stored array is
    read-only.
    """

    data: np.ndarray
    sym_tol: float = 0.0
    max_deviation: float = 0.0

    @property
    def order(self) -> int:
        return self.data.ndim

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def entries(self) -> np.ndarray:
        """Entries in canonical (first-index-fastest) flat order."""
        return self.data.ravel(order="F")

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __repr__(self):
        return f"SymTensor(order={self.order}, dim={self.dim}, norm={frobenius_norm(self):.6g})"


def _as_array(T) -> np.ndarray:
    if isinstance(T, SymTensor):
        return T.data
    return np.asarray(T, dtype=float)


def _symmetric_groups(shape):
    """Label every flat (C-order) position by the multiset of its indices."""
    k = len(shape)
    idx = np.indices(shape).reshape(k, -1)
    return np.ravel_multi_index(np.sort(idx, axis=0), shape)


def _symmetrize_with_deviation(data: np.ndarray):
    """Exact permutation average plus the largest within-orbit spread.

    Averaging over the orbit of each index multiset equals averaging over all
    ``k!`` axis permutations, without enumerating them.
    """
    if data.ndim <= 1:
        return data.copy(), 0.0
    flat = data.ravel()
    key = _symmetric_groups(data.shape)
    size = flat.size
    counts = np.bincount(key, minlength=size)
    sums = np.bincount(key, weights=flat, minlength=size)
    hi = np.full(size, -np.inf)
    lo = np.full(size, np.inf)
    np.maximum.at(hi, key, flat)
    np.minimum.at(lo, key, flat)
    used = counts > 0
    spread = hi[used] - lo[used]
    deviation = float(spread.max()) if spread.size else 0.0
    mean = np.zeros(size)
    mean[used] = sums[used] / counts[used]
    # keep orbits that were already constant bit-for-bit
    exact = np.zeros(size, dtype=bool)
    exact[used] = spread == 0
    out = np.where(exact[key], flat, mean[key])
    return out.reshape(data.shape), deviation


def symmetrize(T) -> np.ndarray:
    """Return the permutation-averaged copy of a cubical array."""
    data = _as_array(T)
    _check_cubical(data)
    return _symmetrize_with_deviation(data)[0]


def _check_cubical(data: np.ndarray):
    if data.ndim < 1 or len(set(data.shape)) != 1:
        raise DimensionMismatch(f"tensor must be cubical, got shape {data.shape}")


def certify_symmetric(entries, k: int | None = None, n: int | None = None,
                      sym_tol: float | None = None) -> SymTensor:
    """Validate supersymmetry and return an immutable :class:`SymTensor`.

    Parameters
    ----------
    entries : array_like
        Either a flat sequence of ``n**k`` reals in canonical order (``k``
        and ``n`` required), or a cubical array of shape ``(n,)*k``.
    k, n : int, optional
        Order and dimension. Inferred from a cubical array when omitted.
    sym_tol : float, optional
        Largest tolerated ``|T[j] - T[sigma(j)]|`` over all permutations.
        Defaults to ``1e-9 * max|T|``.

    Returns
    -------
    SymTensor
        Holds the permutation-symmetrised average of the input and the
        maximum pre-symmetrisation deviation.

    Raises
    ------
    DimensionMismatch
        Length or shape inconsistent with ``(k, n)``, or non-finite entries.
    SymmetryViolation
        Deviation larger than ``sym_tol``.
    """
    arr = np.asarray(entries, dtype=float)
    if arr.ndim <= 1 and k is not None and n is not None:
        if k < 2 or n < 1:
            raise DimensionMismatch(f"need k >= 2 and n >= 1, got k={k}, n={n}")
        if arr.size != n**k:
            raise DimensionMismatch(f"expected {n}**{k} = {n**k} entries, got {arr.size}")
        data = arr.reshape((n,) * k, order="F")
    else:
        data = arr
        _check_cubical(data)
        if k is not None and data.ndim != k:
            raise DimensionMismatch(f"expected order {k}, got {data.ndim}")
        if n is not None and data.shape[0] != n:
            raise DimensionMismatch(f"expected dimension {n}, got {data.shape[0]}")
        if data.ndim < 2:
            raise DimensionMismatch("order must be at least 2")
    if not np.all(np.isfinite(data)):
        raise DimensionMismatch("tensor entries must be finite")
    if sym_tol is None:
        sym_tol = 1e-9 * float(np.abs(data).max(initial=0.0))
    if sym_tol < 0:
        raise ValueError("sym_tol must be nonnegative")
    sym, deviation = _symmetrize_with_deviation(data)
    if deviation > sym_tol:
        raise SymmetryViolation(deviation, sym_tol)
    sym.flags.writeable = False
    return SymTensor(sym, float(sym_tol), deviation)


def mode_product(T, p: int, v) -> np.ndarray:
    """Contract mode ``p`` (1-based) of ``T`` against vector ``v``.

    The result has order one less than ``T``; remaining modes keep their
    relative order.
    """
    data = _as_array(T)
    v = np.asarray(v, dtype=float)
    if not 1 <= p <= data.ndim:
        raise BadMode(f"mode {p} outside 1..{data.ndim}")
    if v.ndim != 1 or v.shape[0] != data.shape[p - 1]:
        raise DimensionMismatch(
            f"vector of length {v.shape} cannot contract mode {p} of size {data.shape[p - 1]}"
        )
    return np.tensordot(data, v, axes=([p - 1], [0]))


def multilinear_form(T, *vectors) -> np.ndarray:
    """Contract the trailing modes of ``T`` against ``vectors`` (last vector first).

    For supersymmetric tensors the contraction order is immaterial.
    """
    out = _as_array(T)
    for v in reversed(vectors):
        out = out @ v
    return out


def apply_system(A, x) -> np.ndarray:
    """One step of the multilinear map: ``A x^(k-1)``, a length-``n`` vector."""
    data = _as_array(A)
    x = np.asarray(x, dtype=float)
    if x.shape != (data.shape[0],):
        raise DimensionMismatch(f"state of shape {x.shape} does not match dimension {data.shape[0]}")
    out = data
    for _ in range(data.ndim - 1):
        out = out @ x
    return out


def inner_product(T, S) -> float:
    a, b = _as_array(T), _as_array(S)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return float(np.dot(a.ravel(), b.ravel()))


def frobenius_norm(T) -> float:
    return float(np.linalg.norm(_as_array(T).ravel()))


def unfold_even(A) -> np.ndarray:
    """Square unfolding of an even-order tensor.

    Indices are read in interleaved pairs ``(j_1 i_1 j_2 i_2 ...)``; the row
    index is built from the ``j`` digits and the column index from the ``i``
    digits, both first-digit-fastest. The result is ``N x N`` with
    ``N = n**(k/2)``; for ``k = 2`` it is the matrix itself.
    """
    data = _as_array(A)
    k = data.ndim
    if k % 2:
        raise OddOrder(f"unfolding needs an even order, got {k}")
    n = data.shape[0]
    N = n ** (k // 2)
    rows = tuple(range(0, k, 2))
    cols = tuple(range(1, k, 2))
    return data.transpose(rows + cols).reshape(N, N, order="F")


def matricize(A, p: int) -> np.ndarray:
    """Mode-``p`` flattening: an ``n x n**(k-1)`` matrix whose rows are indexed by mode ``p``."""
    data = _as_array(A)
    if not 1 <= p <= data.ndim:
        raise BadMode(f"mode {p} outside 1..{data.ndim}")
    n = data.shape[p - 1]
    return np.moveaxis(data, p - 1, 0).reshape(n, -1, order="F")


def mode_singular_values(A, p: int) -> np.ndarray:
    """Singular values of the mode-``p`` matricization, descending.

    Computed from the eigenvalues of the small ``n x n`` Gram matrix.
    """
    M = matricize(A, p)
    gram = M @ M.T
    ev = np.linalg.eigvalsh((gram + gram.T) / 2)
    return np.sqrt(np.clip(ev, 0.0, None))[::-1]


def odeco_tensor(eigenvalues, factors, k: int) -> np.ndarray:
    """Dense ``sum_r lambda_r v_r o ... o v_r`` with ``k`` copies of each column of ``factors``."""
    lam = np.asarray(eigenvalues, dtype=float)
    V = np.asarray(factors, dtype=float)
    n = V.shape[0]
    out = np.zeros((n,) * k)
    for r in range(V.shape[1]):
        term = np.asarray(lam[r])
        for _ in range(k):
            term = np.multiply.outer(term, V[:, r])
        out += term
    return out
