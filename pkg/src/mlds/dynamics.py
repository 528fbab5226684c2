"""Trajectories of ``x_{t+1} = A x_t^(k-1)``: direct iteration and the odeco closed form."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DivergentTerm, OrderError
from .spectral import OdecoDecomposition
from .tensor import _as_array, apply_system

__all__ = [
    "Status",
    "Trajectory",
    "SolutionExponents",
    "simulate",
    "modal_coordinates",
    "solution_exponents",
    "explicit_solution",
]

_LOG_MAX = math.log(np.finfo(float).max)
_LOG_TINY = math.log(np.finfo(float).smallest_subnormal)


class Status(str, enum.Enum):
    CONVERGED = "converged"
    DIVERGED = "diverged"
    HORIZON = "horizon"


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded states of a simulation.

    ``steps[i]`` is the time index of ``states[i]``; with ``stride=1`` these
    are ``0..T``. ``stop_step`` is the step at which the run terminated.
    """

    steps: np.ndarray
    states: np.ndarray
    norms: np.ndarray
    status: Status
    stop_step: int
    non_finite: bool
    horizon: int
    conv_eps: float
    div_cap: float


def _norm(x) -> float:
    """Euclidean norm that stays finite for finite vectors near the double limit."""
    s = float(np.abs(x).max(initial=0.0))
    if s == 0.0 or not math.isfinite(s):
        return s
    return s * float(np.linalg.norm(x / s))


def simulate(A, x0, horizon: int = 100, conv_eps: float = 1e-9,
             div_cap: float = 1e12, stride: int = 1) -> Trajectory:
    """Iterate the multilinear map from ``x0``.

    Stops when ``||x_t|| < conv_eps`` (converged), ``||x_t|| > div_cap`` or a
    non-finite state appears (diverged), or ``t == horizon``. Every
    ``stride``-th state is recorded, plus the final one.
    """
    data = _as_array(A)
    x = np.asarray(x0, dtype=float)
    if x.shape != (data.shape[0],):
        raise DimensionMismatch(f"initial state of shape {x.shape} does not match dimension {data.shape[0]}")
    if horizon < 1 or conv_eps <= 0 or div_cap <= conv_eps or stride < 1:
        raise ValueError("need horizon >= 1, stride >= 1 and 0 < conv_eps < div_cap")

    steps, states, norms = [], [], []
    status, non_finite = Status.HORIZON, False
    t = 0
    while True:
        finite = bool(np.all(np.isfinite(x)))
        with np.errstate(over="ignore", invalid="ignore"):
            nx = _norm(x) if finite else math.inf
        if not finite:
            status, non_finite = Status.DIVERGED, True
        elif nx < conv_eps:
            status = Status.CONVERGED
        elif nx > div_cap:
            status = Status.DIVERGED
        done = status is not Status.HORIZON or t == horizon
        if t % stride == 0 or done:
            steps.append(t)
            states.append(x)
            norms.append(nx if finite else math.inf)
        if done:
            break
        with np.errstate(over="ignore", invalid="ignore"):
            x = apply_system(data, x)
        t += 1
    return Trajectory(
        np.asarray(steps), np.asarray(states), np.asarray(norms),
        status, t, non_finite, horizon, conv_eps, div_cap,
    )


def modal_coordinates(dec: OdecoDecomposition, x0) -> np.ndarray:
    """Coefficients ``c_r = <x0, v_r>`` of ``x0`` in the factor basis."""
    return dec.factors.T @ np.asarray(x0, dtype=float)


@dataclass(frozen=True)
class SolutionExponents:
    """Exact exponents of the closed form after ``q`` steps.

    ``alpha = sum_{j<q} (k-1)^j`` applies to the eigenvalue and
    ``beta = (k-1)^q`` to the modal coefficient.
    """

    k: int
    q: int
    alpha: int
    beta: int


def solution_exponents(k: int, q: int) -> SolutionExponents:
    if k < 3 or q < 0:
        raise OrderError(f"need k >= 3 and q >= 0, got k={k}, q={q}")
    alpha, beta = 0, 1
    for _ in range(q):
        alpha = (k - 1) * alpha + 1
        beta = (k - 1) * beta
    return SolutionExponents(k, q, alpha, beta)


def explicit_solution(dec: OdecoDecomposition, x0, q: int) -> np.ndarray:
    """State after ``q`` steps from the closed form ``sum_r lambda_r^alpha c_r^beta v_r``.

    Each term is evaluated as ``sign * exp(alpha ln|lambda_r| + beta ln|c_r|)``
    so the doubly exponential powers neither overflow early nor lose their
    exponents; underflowing terms become 0.

    Raises
    ------
    NotOdeco
        The decomposition is not accepted as odeco.
    DivergentTerm
        Some term exceeds the double range.
    """
    dec.require_odeco()
    x0 = np.asarray(x0, dtype=float)
    if q == 0:
        return x0.copy()
    e = solution_exponents(dec.order, q)
    c = modal_coordinates(dec, x0)
    out = np.zeros(dec.dim)
    for r, (lam, cr) in enumerate(zip(dec.eigenvalues, c)):
        if lam == 0.0 or abs(cr) < 1e-300:
            continue
        logmag = e.alpha * math.log(abs(lam)) + e.beta * math.log(abs(cr))
        if logmag > _LOG_MAX:
            raise DivergentTerm(r, logmag)
        if logmag < _LOG_TINY:
            continue
        sign = 1.0
        if lam < 0 and e.alpha % 2:
            sign = -sign
        if cr < 0 and e.beta % 2:
            sign = -sign
        out += sign * math.exp(logmag) * dec.factors[:, r]
    return out
