"""Orthogonal decomposition, Z-eigenpairs and Z-spectral-radius bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    NoConvergence,
    NotOdeco,
    NotPositive,
    NotUnitVector,
    OrderError,
    ResidualTooLarge,
)
from .tensor import (
    _as_array,
    apply_system,
    frobenius_norm,
    mode_singular_values,
    odeco_tensor,
    unfold_even,
)

__all__ = [
    "ODECO_RTOL",
    "OdecoDecomposition",
    "ZEigenpair",
    "BoundReport",
    "odeco_decompose",
    "certify_zeigenpair",
    "zscan_2d",
    "unfolding_bound",
    "positive_tensor_bound",
    "positive_bound_terms",
    "zspectral_radius_estimate",
    "bound_report",
]

#: residual <= ODECO_RTOL * ||A|| declares a decomposition odeco
ODECO_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class OdecoDecomposition:
    """``A ~ sum_r eigenvalues[r] * factors[:, r]^{o k}``.

    ``eigenvalues`` are sorted descending; ``factors`` holds the unit vectors
    as columns. ``residual`` is the Frobenius norm of the reconstruction
    error and ``norm`` the Frobenius norm of the decomposed tensor.
    """

    eigenvalues: np.ndarray
    factors: np.ndarray
    order: int
    residual: float
    norm: float

    @property
    def dim(self) -> int:
        return self.factors.shape[0]

    @property
    def is_odeco(self) -> bool:
        return self.residual <= ODECO_RTOL * self.norm

    def reconstruct(self) -> np.ndarray:
        return odeco_tensor(self.eigenvalues, self.factors, self.order)

    def require_odeco(self):
        if not self.is_odeco:
            raise NotOdeco(
                f"reconstruction residual {self.residual:.3g} exceeds "
                f"{ODECO_RTOL:g} x ||A|| = {ODECO_RTOL * self.norm:.3g}"
            )


@dataclass(frozen=True)
class ZEigenpair:
    eigenvalue: float
    vector: np.ndarray
    residual: float


def _random_unit(rng, n):
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _power_iterate(R, v, tol, max_iter, shift=0.0):
    """Run ``v <- (R v^(k-1) + shift v) / ||.||`` until two iterates agree up to sign."""
    for _ in range(max_iter):
        w = apply_system(R, v) + shift * v
        nw = np.linalg.norm(w)
        if nw == 0.0 or not np.isfinite(nw):
            return None
        w = w / nw
        if np.linalg.norm(w - v) < tol:
            return w
        if np.linalg.norm(w + v) < tol:
            # negative eigenvalue with an even-power map: iterates alternate sign
            return w
        v = w
    return None


def _complete_basis(vectors, n):
    """Extend orthonormal ``vectors`` to a basis of R^n by Gram-Schmidt on e_1..e_n."""
    basis = [np.asarray(v, dtype=float) for v in vectors]
    for e in np.eye(n):
        if len(basis) == n:
            break
        w = e.copy()
        for _ in range(2):
            for b in basis:
                w -= (b @ w) * b
        nw = np.linalg.norm(w)
        if nw > 1e-8:
            basis.append(w / nw)
    return basis


def odeco_decompose(A, restarts: int | None = None, tol: float = 1e-12,
                    max_iter: int = 2000, seed: int = 0, rng=None) -> OdecoDecomposition:
    """Orthogonal decomposition by tensor power iteration with deflation.

    For each of the ``n`` factors, ``restarts`` random unit starts are
    iterated with ``v <- A v^(k-1) / ||A v^(k-1)||``; among the converged
    starts the one with the largest ``|lambda|`` is kept and
    ``lambda v o ... o v`` is subtracted. If no plain start converges the
    starts are retried with a shifted map, which converges monotonically.

    The result always carries the reconstruction residual; check
    :attr:`OdecoDecomposition.is_odeco` before relying on it.

    Raises
    ------
    OrderError
        ``k < 3``.
    NoConvergence
        Every start failed for some factor. The exception carries the
        factors found so far.
    """
    data = _as_array(A)
    k, n = data.ndim, data.shape[0]
    if k < 3:
        raise OrderError(f"orthogonal decomposition needs order >= 3, got {k}")
    if rng is None:
        rng = np.random.default_rng(seed)
    if restarts is None:
        restarts = 5 * n
    norm = frobenius_norm(data)
    zero_cut = 1e-12 * norm

    R = np.array(data, dtype=float)
    lams, vecs = [], []
    for _ in range(n):
        if frobenius_norm(R) <= zero_cut:
            break
        best = None
        for shift in (0.0, (k - 1) * frobenius_norm(R)):
            for _ in range(restarts):
                v = _power_iterate(R, _random_unit(rng, n), tol, max_iter, shift)
                if v is None:
                    continue
                lam = float(v @ apply_system(R, v))
                if best is None or abs(lam) > abs(best[0]):
                    best = (lam, v)
            if best is not None:
                break
        if best is None:
            raise NoConvergence(
                f"power iteration failed for factor {len(lams) + 1} of {n} "
                f"after {restarts} restarts x {max_iter} iterations",
                lams, vecs,
            )
        lam, v = best
        lams.append(lam)
        vecs.append(v)
        R = R - odeco_tensor([lam], v[:, None], k)

    if len(vecs) < n:
        full = _complete_basis(vecs, n)
        lams.extend([0.0] * (len(full) - len(vecs)))
        vecs = full
    order = np.argsort(-np.asarray(lams), kind="stable")
    eigenvalues = np.asarray(lams)[order]
    factors = np.column_stack(vecs)[:, order]
    residual = frobenius_norm(data - odeco_tensor(eigenvalues, factors, k))
    return OdecoDecomposition(eigenvalues, factors, k, residual, norm)


def certify_zeigenpair(A, eigenvalue: float, vector, tol: float = 1e-8) -> ZEigenpair:
    """Accept ``(eigenvalue, vector)`` iff ``||A v^(k-1) - eigenvalue v|| <= tol``.

    ``vector`` must be within ``1e-6`` of unit length and is renormalised.
    """
    v = np.asarray(vector, dtype=float)
    nv = np.linalg.norm(v)
    if abs(nv - 1.0) > 1e-6:
        raise NotUnitVector(f"vector norm {nv:.9g} is not 1")
    v = v / nv
    residual = float(np.linalg.norm(apply_system(A, v) - eigenvalue * v))
    if residual > tol:
        raise ResidualTooLarge(residual, tol)
    return ZEigenpair(float(eigenvalue), v, residual)


def zscan_2d(A, grid_size: int = 4096, refine_tol: float = 1e-14) -> list[ZEigenpair]:
    """All real eigenpairs of a 2-dimensional tensor found by an angle scan.

    With ``v = (cos t, sin t)`` the pair is an eigenpair exactly when the
    component of ``A v^(k-1)`` orthogonal to ``v`` vanishes. That function is
    sampled on ``grid_size`` angles in ``[0, 2 pi)``; each sign change is
    refined by bisection down to ``refine_tol``. Tangential (double) roots
    can be missed; an identically vanishing function yields no pairs.
    """
    data = _as_array(A)
    if data.shape[0] != 2:
        raise DimensionMismatch(f"angle scan needs n = 2, got {data.shape[0]}")

    def g(t):
        c, s = math.cos(t), math.sin(t)
        w = apply_system(data, np.array([c, s]))
        return -s * w[0] + c * w[1]

    thetas = np.linspace(0.0, 2 * math.pi, grid_size, endpoint=False)
    vals = np.array([g(t) for t in thetas])
    scale = max(np.abs(vals).max(), frobenius_norm(data))
    if scale == 0.0 or np.abs(vals).max() <= 1e-14 * scale:
        return []

    roots = []
    for i in range(grid_size):
        a, b = thetas[i], thetas[i + 1] if i + 1 < grid_size else 2 * math.pi
        ga, gb = vals[i], vals[(i + 1) % grid_size]
        if ga == 0.0:
            roots.append(a)
            continue
        if gb == 0.0 or ga * gb > 0:
            continue
        while b - a > refine_tol:
            m = 0.5 * (a + b)
            gm = g(m)
            if gm == 0.0:
                a = b = m
                break
            if ga * gm < 0:
                b = m
            else:
                a, ga = m, gm
        roots.append(0.5 * (a + b))

    pairs = []
    for t in sorted(r % (2 * math.pi) for r in roots):
        if pairs and abs(t - pairs[-1][0]) < 1e-9:
            continue
        pairs.append((t, None))
    if len(pairs) > 1 and (pairs[0][0] + 2 * math.pi - pairs[-1][0]) < 1e-9:
        pairs.pop()
    out = []
    for t, _ in pairs:
        v = np.array([math.cos(t), math.sin(t)])
        w = apply_system(data, v)
        lam = float(w @ v)
        out.append(ZEigenpair(lam, v, float(np.linalg.norm(w - lam * v))))
    return out


def unfolding_bound(A) -> float:
    """Spectral radius of the square unfolding (even order only)."""
    M = unfold_even(A)
    ev = np.linalg.eigvalsh((M + M.T) / 2)
    return float(np.abs(ev).max(initial=0.0))


def positive_bound_terms(A):
    """``(l, r, R)``: minimum entry and the min/max first-mode slice sums."""
    data = _as_array(A)
    if not np.all(data > 0):
        raise NotPositive("bound requires a tensor with strictly positive entries")
    sums = data.reshape(data.shape[0], -1).sum(axis=1)
    return float(data.min()), float(sums.min()), float(sums.max())


def positive_tensor_bound(A) -> float:
    """Z-spectral-radius bound ``R - l (1 - (r/R)^(1/k))`` for entrywise-positive tensors."""
    l, r, R = positive_bound_terms(A)
    k = _as_array(A).ndim
    return R - l * (1.0 - (r / R) ** (1.0 / k))


def zspectral_radius_estimate(dec: OdecoDecomposition) -> float:
    """``max(|lambda_1|, |lambda_n|)`` from an accepted decomposition.

    This is an estimate, not a certified radius: the decomposition
    eigenvalues need not exhaust the Z-spectrum. It is, however, always a
    lower bound on the true radius.
    """
    dec.require_odeco()
    lam = dec.eigenvalues
    return float(max(abs(lam[0]), abs(lam[-1])))


@dataclass
class BoundReport:
    """Upper bounds on the Z-spectral radius, each ``None`` when not applicable."""

    frobenius: float
    mode_norms: list[float]
    unfolding: float | None = None
    positive: float | None = None
    positive_terms: dict | None = None
    zspectral_estimate: float | None = None
    estimate_source: str | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "frobenius": self.frobenius,
            "mode_norms": list(self.mode_norms),
            "unfolding": self.unfolding,
            "positive": self.positive,
            "positive_terms": self.positive_terms,
            "zspectral_estimate": self.zspectral_estimate,
            "estimate_source": self.estimate_source,
            "notes": list(self.notes),
        }


def bound_report(A, dec: OdecoDecomposition | None = None,
                 scan_grid: int = 4096) -> BoundReport:
    """Collect every applicable bound for ``A``.

    ``mode_norms[p-1]`` is the square root of the summed squared mode-``p``
    singular values. The radius estimate comes from an accepted
    decomposition, else from the angle scan when ``n = 2``.
    """
    data = _as_array(A)
    k, n = data.ndim, data.shape[0]
    rep = BoundReport(
        frobenius=frobenius_norm(data),
        mode_norms=[float(np.sqrt(np.sum(mode_singular_values(data, p) ** 2)))
                    for p in range(1, k + 1)],
    )
    if k % 2 == 0:
        rep.unfolding = unfolding_bound(data)
    else:
        rep.notes.append("unfolding bound needs an even order")
    if np.all(data > 0):
        l, r, R = positive_bound_terms(data)
        rep.positive = positive_tensor_bound(data)
        rep.positive_terms = {"l": l, "r": r, "R": R}
    else:
        rep.notes.append("positive-tensor bound needs strictly positive entries")
    if dec is not None and dec.is_odeco:
        rep.zspectral_estimate = zspectral_radius_estimate(dec)
        rep.estimate_source = "decomposition"
    elif n == 2:
        pairs = zscan_2d(data, grid_size=scan_grid)
        rep.zspectral_estimate = max((abs(p.eigenvalue) for p in pairs), default=0.0)
        rep.estimate_source = "angle-scan"
    return rep
