#!/usr/bin/env python3
"""Rebuild the bundled example tensors at full double precision.

The published examples print their factor matrix (example 1) and tensor
slices (example 2) to four decimals. Trajectories of these systems grow or
shrink doubly exponentially, so four decimals are not enough to reproduce
the published trajectory norms. This script recovers exact odeco systems
that are consistent with every printed digit.

Example 1
    The factor matrix is parametrised as ``V0 @ expm(K)`` with ``V0`` the
    nearest orthogonal matrix to the printed one and ``K`` skew-symmetric
    (three parameters). The fit uses only published trajectory norms that
    the reproduction checks do *not* compare against (IC a for t = 5..8,
    IC c for t = 1..5, IC d for t = 1..9), weighted by their printing
    precision. Two constraints are added: every entry must round to the
    printed matrix, and IC c must sit on the stability boundary (its modal
    certificate is published as exactly 1). The remaining published norms
    are then an out-of-sample check.

Example 2
    With eigenvalues (0.5, 0.4) and factors ``(cos t, sin t)``,
    ``(-sin t, cos t)``, the angle ``t`` is fitted by least squares to the
    printed entries. The script asserts that the result rounds back to
    every printed entry.

Run from the repository root::

    python scripts/calibrate_fixtures.py
"""

from pathlib import Path

import numpy as np
from scipy.linalg import expm
from scipy.optimize import least_squares, minimize_scalar

from mlds.fixtures import (
    EXAMPLE1_ICS,
    EXAMPLE1_LAMBDA,
    EXAMPLE1_V_PRINTED,
    EXAMPLE2_LAMBDA,
    REPORTED,
    example2_printed_entries,
)
from mlds.io import decomposition_to_doc, dumps, tensor_to_doc, write_atomic
from mlds.spectral import OdecoDecomposition
from mlds.tensor import certify_symmetric, frobenius_norm, odeco_tensor

DATA = Path(__file__).resolve().parents[1] / "src" / "mlds" / "data"
PRINT_HALF_WIDTH = 5e-5
HELD_OUT = {"a": [5, 6, 7, 8], "c": [1, 2, 3, 4, 5], "d": list(range(1, 10))}
CHECKED = {"a": [0, 1, 2, 3, 4], "c": [6], "d": [10]}


def _skew(w):
    return np.array([[0, -w[0], -w[1]], [w[0], 0, -w[2]], [w[1], w[2], 0]])


def _modal_norms(V, lam, x, steps):
    c = V.T @ x
    out = []
    for _ in range(steps + 1):
        out.append(np.linalg.norm(c))
        c = lam * c**2
    return np.array(out)


def calibrate_example1():
    U, _, Wt = np.linalg.svd(EXAMPLE1_V_PRINTED)
    V0 = U @ Wt
    lam = EXAMPLE1_LAMBDA
    norms = REPORTED["example1"]["norms"]
    xc = EXAMPLE1_ICS["c"]
    box = PRINT_HALF_WIDTH - 1e-7

    def V_of(w):
        return V0 @ expm(_skew(w))

    def residuals(w):
        V = V_of(w)
        res = []
        for ic, ts in HELD_OUT.items():
            model = _modal_norms(V, lam, EXAMPLE1_ICS[ic], max(ts))
            res.extend((model[t] - norms[ic][t]) / PRINT_HALF_WIDTH for t in ts)
        outside = np.maximum(np.abs(V - EXAMPLE1_V_PRINTED) - box, 0.0).ravel()
        boundary = abs(V[:, 1] @ xc) * lam[1] - 1.0
        return np.concatenate([res, 1e9 * outside, [1e12 * boundary]])

    fit = least_squares(residuals, np.zeros(3), x_scale=1e-5, xtol=1e-15, ftol=1e-15, gtol=1e-15)
    V = V_of(fit.x)
    assert np.array_equal(np.round(V, 4), EXAMPLE1_V_PRINTED), "fit left the rounding box"
    assert np.abs(V.T @ V - np.eye(3)).max() < 1e-14

    print("example 1: out-of-sample check against published norms")
    for ic, ts in CHECKED.items():
        model = _modal_norms(V, lam, EXAMPLE1_ICS[ic], max(ts))
        for t in ts:
            print(f"  IC {ic} t={t:2d}: model {model[t]:.6f}  published {norms[ic][t]}")

    A = certify_symmetric(odeco_tensor(lam, V, 3), sym_tol=1e-15)
    residual = frobenius_norm(A.data - odeco_tensor(lam, V, 3))
    dec = OdecoDecomposition(lam.copy(), V, 3, residual, frobenius_norm(A))
    return A, dec


def calibrate_example2():
    target = example2_printed_entries()
    lam = EXAMPLE2_LAMBDA

    def build(t):
        V = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
        return odeco_tensor(lam, V, 4)

    fit = minimize_scalar(lambda t: np.sum((build(t) - target) ** 2),
                          bounds=(0.0, np.pi / 2), method="bounded", options={"xatol": 1e-14})
    A = build(fit.x)
    assert np.array_equal(np.round(A, 4), target), "reconstruction does not round to the printed slices"
    print(f"example 2: angle {fit.x:.15f}, max |A - printed| = {np.abs(A - target).max():.2e}")
    return certify_symmetric(A, sym_tol=1e-15)


def main():
    A1, dec1 = calibrate_example1()
    write_atomic(DATA / "example1_tensor.json", dumps(tensor_to_doc(A1)))
    write_atomic(DATA / "example1_decomposition.json", dumps(decomposition_to_doc(dec1)))
    A2 = calibrate_example2()
    write_atomic(DATA / "example2_tensor.json", dumps(tensor_to_doc(A2)))
    diag = certify_symmetric(odeco_tensor([5.0, 2.0, 1.0], np.eye(3), 3), sym_tol=0.0)
    write_atomic(DATA / "diag521_tensor.json", dumps(tensor_to_doc(diag)))
    print(f"wrote fixtures to {DATA}")


if __name__ == "__main__":
    main()
