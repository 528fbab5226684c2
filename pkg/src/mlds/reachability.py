"""Reachable-subspace growth for ``x_{t+1} = A x_t^(k-1) + B u_t`` (experimental).

The rank test implemented here is an unproven conjecture for even ``k``:
full dimension of the grown subspace is *conjectured* to be equivalent to
reachability. Results always carry that caveat.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .tensor import SymTensor, _as_array, multilinear_form

__all__ = [
    "ControlledSystem",
    "ReachabilitySubspace",
    "ReachabilityResult",
    "grow_subspace",
    "reachability_test",
    "CONJECTURE_CAVEAT",
]

CONJECTURE_CAVEAT = (
    "experimental: the equivalence between full subspace dimension and "
    "reachability is an unproven conjecture for even k"
)
ODD_ORDER_CAVEAT = "odd k lies outside the conjecture's hypothesis; the dimension is reported only"


@dataclass(frozen=True, eq=False)
class ControlledSystem:
    A: SymTensor | np.ndarray
    B: np.ndarray

    def __post_init__(self):
        data = _as_array(self.A)
        B = np.asarray(self.B, dtype=float)
        if B.ndim == 1:
            B = B[:, None]
        if B.shape[0] != data.shape[0]:
            raise DimensionMismatch(f"B must have n = {data.shape[0]} rows, got shape {B.shape}")
        if B.shape[1] < 1:
            raise DimensionMismatch("B needs at least one column")
        object.__setattr__(self, "B", B)

    @property
    def order(self) -> int:
        return _as_array(self.A).ndim

    @property
    def dim(self) -> int:
        return _as_array(self.A).shape[0]


@dataclass
class ReachabilitySubspace:
    """Nested orthonormal bases; ``stages[q]`` spans the q-th subspace."""

    stages: list[np.ndarray]
    saturated_at: int
    tuples_evaluated: int = 0

    @property
    def final_dim(self) -> int:
        return self.stages[-1].shape[1]

    @property
    def basis(self) -> np.ndarray:
        return self.stages[-1]


def _extend(basis, y, rank_tol):
    """Append the part of ``y`` orthogonal to ``basis`` when it clears the threshold."""
    w = np.array(y, dtype=float)
    ny = np.linalg.norm(w)
    for _ in range(2):
        for b in basis:
            w -= (b @ w) * b
    nw = np.linalg.norm(w)
    if nw > rank_tol * (ny + 1.0):
        basis.append(w / nw)
        return True
    return False


def grow_subspace(sys: ControlledSystem, rank_tol: float = 1e-8,
                  tuple_budget: int = 1_000_000) -> ReachabilitySubspace:
    """Grow ``span(B)`` by images of the multilinear map until it stops growing.

    Each stage evaluates ``A q_{i_1} ... q_{i_{k-1}}`` on non-decreasing
    multi-indices of the current orthonormal basis (multilinearity and
    symmetry make these span the whole image set); tuples drawn entirely
    from the previous basis are skipped since their images are already
    included.
    """
    data = _as_array(sys.A)
    n, k = sys.dim, sys.order
    basis = []
    for col in sys.B.T:
        _extend(basis, col, rank_tol)
    stages = [np.column_stack(basis) if basis else np.zeros((n, 0))]
    evaluated = 0
    old = 0
    while 0 < len(basis) < n:
        d = len(basis)
        count = math.comb(d + k - 2, k - 1)
        if count > tuple_budget:
            warnings.warn(
                f"stage {len(stages)} evaluates {count} tuples (budget {tuple_budget})",
                RuntimeWarning, stacklevel=2,
            )
        Q = np.column_stack(basis)
        for idx in itertools.combinations_with_replacement(range(d), k - 1):
            if idx[-1] < old:
                continue
            evaluated += 1
            y = multilinear_form(data, *(Q[:, i] for i in idx))
            _extend(basis, y, rank_tol)
            if len(basis) == n:
                break
        if len(basis) == d:
            break
        old = d
        stages.append(np.column_stack(basis))
    return ReachabilitySubspace(stages, len(stages) - 1, evaluated)


@dataclass
class ReachabilityResult:
    reachable: bool
    dim: int
    n: int
    stage_dims: list[int]
    saturated_at: int
    in_conjecture_scope: bool
    caveat: str
    subspace: ReachabilitySubspace = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "reachable": self.reachable,
            "dim": self.dim,
            "n": self.n,
            "stages": self.stage_dims,
            "saturated_at": self.saturated_at,
            "in_conjecture_scope": self.in_conjecture_scope,
            "caveat": self.caveat,
            "basis": self.subspace.basis.T.tolist(),
        }


def reachability_test(sys: ControlledSystem, rank_tol: float = 1e-8) -> ReachabilityResult:
    """Conjectured reachability: the grown subspace has dimension ``n``."""
    sub = grow_subspace(sys, rank_tol)
    in_scope = sys.order % 2 == 0
    caveat = CONJECTURE_CAVEAT if in_scope else f"{CONJECTURE_CAVEAT}; {ODD_ORDER_CAVEAT}"
    return ReachabilityResult(
        reachable=sub.final_dim == sys.dim,
        dim=sub.final_dim,
        n=sys.dim,
        stage_dims=[s.shape[1] for s in sub.stages],
        saturated_at=sub.saturated_at,
        in_conjecture_scope=in_scope,
        caveat=caveat,
        subspace=sub,
    )
