"""Stability verdicts, regions of attraction and the analysis orchestrator.

Verdicts depend on the initial state as well as on the tensor: for order
``k >= 3`` there is no state-independent notion of a stable system.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import modal_coordinates
from .errors import NoConvergence, OddOrder, OrderError
from .spectral import (
    BoundReport,
    OdecoDecomposition,
    bound_report,
    odeco_decompose,
    zspectral_radius_estimate,
)
from .tensor import _as_array, mode_singular_values

__all__ = [
    "Label",
    "Method",
    "StabilityVerdict",
    "AttractionRegion",
    "AnalysisConfig",
    "AnalysisReport",
    "certificates",
    "classify",
    "exact_region",
    "ball_region",
    "contains",
    "sufficient_radius_test",
    "sufficient_unfolding_test",
    "sufficient_frobenius_test",
    "sufficient_singular_test",
    "sufficient_positive_test",
    "analyze",
]


class Label(str, enum.Enum):
    STABLE = "stable"
    ASYMPTOTICALLY_STABLE = "asymptotically stable"
    UNSTABLE = "unstable"
    INCONCLUSIVE = "inconclusive"


class Method(str, enum.Enum):
    EXACT = "exact-odeco"
    ZSPECTRAL = "zspectral-radius"
    UNFOLDING = "unfolding-radius"
    POSITIVE = "positive-tensor-bound"
    FROBENIUS = "frobenius-norm"
    SINGULAR = "mode-singular-values"


STABLE_CAVEAT = (
    "boundary case: every modal certificate is within boundary_tol of 1; the "
    "trajectory stays bounded but this is not a Lyapunov-stability claim for "
    "nearby initial states"
)


@dataclass
class StabilityVerdict:
    """Outcome of one stability test.

    For the exact test ``certificates[r] = |c_r| |lambda_r|^(1/(k-2))`` and
    ``value`` is their maximum; sufficient tests set ``value`` to the tested
    product and leave ``certificates`` empty.
    """

    label: Label
    method: Method
    value: float
    certificates: np.ndarray | None = None
    decisive_mode: int | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "label": self.label.value,
            "method": self.method.value,
            "value": self.value,
            "certificates": None if self.certificates is None else self.certificates.tolist(),
            "decisive_mode": self.decisive_mode,
            "note": self.note,
        }


def _check_order(k):
    if k < 3:
        raise OrderError(f"stability criteria need order k >= 3, got {k}")


def certificates(dec: OdecoDecomposition, x0) -> np.ndarray:
    """Per-mode values ``|c_r| |lambda_r|^(1/(k-2))``."""
    _check_order(dec.order)
    c = modal_coordinates(dec, x0)
    return np.abs(c) * np.abs(dec.eigenvalues) ** (1.0 / (dec.order - 2))


def classify(dec: OdecoDecomposition, x0, boundary_tol: float = 1e-9) -> StabilityVerdict:
    """Exact trichotomy for an odeco system started at ``x0``.

    Unstable when some certificate exceeds ``1 + boundary_tol``,
    asymptotically stable when all are below ``1 - boundary_tol``, stable in
    between.
    """
    dec.require_odeco()
    m = certificates(dec, x0)
    r = int(np.argmax(m))
    top = float(m[r])
    note = ""
    if top > 1 + boundary_tol:
        label = Label.UNSTABLE
    elif top < 1 - boundary_tol:
        label = Label.ASYMPTOTICALLY_STABLE
    else:
        label = Label.STABLE
        note = STABLE_CAVEAT
    return StabilityVerdict(label, Method.EXACT, top, m, r, note)


@dataclass(frozen=True, eq=False)
class AttractionRegion:
    """Either the exact odeco region (a box in factor coordinates) or a ball.

    Exact regions carry ``basis`` (factors as columns) and per-mode ``radii``
    (``inf`` for zero eigenvalues); balls carry ``ball_radius``.
    """

    kind: str
    source: Method
    basis: np.ndarray | None = None
    radii: np.ndarray | None = None
    ball_radius: float | None = None

    def to_dict(self) -> dict:
        def num(x):
            return None if x is None or math.isinf(x) else float(x)

        return {
            "kind": self.kind,
            "source": self.source.value,
            "radii": None if self.radii is None else [num(r) for r in self.radii],
            "ball_radius": num(self.ball_radius),
        }


def _radius(bound, k):
    if bound == 0:
        return math.inf
    return abs(bound) ** (-1.0 / (k - 2))


def exact_region(dec: OdecoDecomposition) -> AttractionRegion:
    dec.require_odeco()
    _check_order(dec.order)
    radii = np.array([_radius(lam, dec.order) for lam in dec.eigenvalues])
    return AttractionRegion("exact", Method.EXACT, dec.factors, radii)


def ball_region(bound: float, k: int, source: Method) -> AttractionRegion:
    """Conservative ball ``||x|| < bound^(-1/(k-2))``."""
    _check_order(k)
    return AttractionRegion("ball", source, ball_radius=_radius(bound, k))


def contains(region: AttractionRegion, x) -> tuple[bool, float]:
    """Membership and margin (distance to the boundary in the region's own coordinates)."""
    x = np.asarray(x, dtype=float)
    if region.kind == "exact":
        c = np.abs(region.basis.T @ x)
        margin = float(np.min(region.radii - c))
        return bool(np.all(c < region.radii)), margin
    margin = region.ball_radius - float(np.linalg.norm(x))
    return margin > 0, margin


def _sufficient(bound, x0, k, method):
    _check_order(k)
    value = abs(bound) ** (1.0 / (k - 2)) * float(np.linalg.norm(np.asarray(x0, dtype=float)))
    label = Label.ASYMPTOTICALLY_STABLE if value < 1 else Label.INCONCLUSIVE
    return StabilityVerdict(label, method, value)


def sufficient_radius_test(zspectral_radius, x0, k) -> StabilityVerdict:
    """Asymptotically stable if ``lambda^(1/(k-2)) ||x0|| < 1``; odeco systems only."""
    return _sufficient(zspectral_radius, x0, k, Method.ZSPECTRAL)


def sufficient_unfolding_test(mu, x0, k) -> StabilityVerdict:
    if k % 2:
        raise OddOrder(f"unfolding test needs an even order, got {k}")
    return _sufficient(mu, x0, k, Method.UNFOLDING)


def sufficient_positive_test(bound, x0, k) -> StabilityVerdict:
    return _sufficient(bound, x0, k, Method.POSITIVE)


def sufficient_frobenius_test(norm, x0, k) -> StabilityVerdict:
    return _sufficient(norm, x0, k, Method.FROBENIUS)


def sufficient_singular_test(singular_values, x0, k) -> StabilityVerdict:
    """Same test as the Frobenius one, fed by one mode's singular values.

    The summed squares equal ``||A||^2``, so the tested quantity is their
    square root.
    """
    gamma = np.asarray(singular_values, dtype=float)
    return _sufficient(math.sqrt(float(np.sum(gamma**2))), x0, k, Method.SINGULAR)


@dataclass
class AnalysisConfig:
    power_tol: float = 1e-12
    max_iter: int = 2000
    restarts: int | None = None
    boundary_tol: float = 1e-9
    scan_grid: int = 4096
    seed: int = 0


@dataclass
class AnalysisReport:
    headline: StabilityVerdict
    exact: StabilityVerdict | None
    sufficient: list[StabilityVerdict]
    bounds: BoundReport
    decomposition: OdecoDecomposition | None
    odeco: bool
    regions: list[AttractionRegion] = field(default_factory=list)
    region_membership: dict = field(default_factory=dict)
    x0: np.ndarray | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        dec = self.decomposition
        return {
            "x0": None if self.x0 is None else self.x0.tolist(),
            "headline": self.headline.to_dict(),
            "exact": None if self.exact is None else self.exact.to_dict(),
            "sufficient": [v.to_dict() for v in self.sufficient],
            "odeco": self.odeco,
            "decomposition": None if dec is None else {
                "lambda": dec.eigenvalues.tolist(),
                "factors": dec.factors.T.tolist(),
                "residual": dec.residual,
            },
            "bounds": self.bounds.to_dict(),
            "regions": [
                dict(r.to_dict(), contains_x0=self.region_membership.get(i))
                for i, r in enumerate(self.regions)
            ],
            "notes": list(self.notes),
        }


def analyze(A, x0, config: AnalysisConfig | None = None,
            decomposition: OdecoDecomposition | None = None) -> AnalysisReport:
    """Run every applicable test for ``A`` started at ``x0``.

    The exact verdict (available when the decomposition is accepted as
    odeco) takes precedence; otherwise the headline is asymptotically
    stable if any sufficient test says so, and inconclusive otherwise.
    Sufficient tests never produce an unstable headline.
    """
    cfg = config or AnalysisConfig()
    data = _as_array(A)
    k = data.ndim
    _check_order(k)
    x0 = np.asarray(x0, dtype=float)
    notes = []

    dec = decomposition
    if dec is None:
        try:
            dec = odeco_decompose(data, restarts=cfg.restarts, tol=cfg.power_tol,
                                  max_iter=cfg.max_iter, seed=cfg.seed)
        except NoConvergence as exc:
            notes.append(f"decomposition failed: {exc}")
    odeco = dec is not None and dec.is_odeco
    if dec is not None and not odeco:
        notes.append(
            f"not odeco: reconstruction residual {dec.residual:.3g} relative to "
            f"||A|| = {dec.norm:.3g}; using sufficient tests only"
        )

    bounds = bound_report(data, dec, scan_grid=cfg.scan_grid)
    regions = []
    exact = None
    if odeco:
        exact = classify(dec, x0, cfg.boundary_tol)
        regions.append(exact_region(dec))

    tests = []
    if odeco:
        tests.append(sufficient_radius_test(zspectral_radius_estimate(dec), x0, k))
        if bounds.positive is not None:
            tests.append(sufficient_positive_test(bounds.positive, x0, k))
    if bounds.unfolding is not None:
        tests.append(sufficient_unfolding_test(bounds.unfolding, x0, k))
        regions.append(ball_region(bounds.unfolding, k, Method.UNFOLDING))
    tests.append(sufficient_frobenius_test(bounds.frobenius, x0, k))
    regions.append(ball_region(bounds.frobenius, k, Method.FROBENIUS))
    tests.append(sufficient_singular_test(mode_singular_values(data, 1), x0, k))

    if exact is not None:
        headline = exact
    else:
        passed = [t for t in tests if t.label is Label.ASYMPTOTICALLY_STABLE]
        if passed:
            headline = min(passed, key=lambda t: t.value)
        else:
            best = min(tests, key=lambda t: t.value)
            headline = StabilityVerdict(Label.INCONCLUSIVE, best.method, best.value,
                                        note="no exact criterion for non-odeco tensors")
    membership = {i: contains(r, x0)[0] for i, r in enumerate(regions)}
    return AnalysisReport(headline, exact, tests, bounds, dec, odeco, regions,
                          membership, x0, notes)
