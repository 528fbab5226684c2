import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_orthogonal, random_symmetric
from mlds.errors import DimensionMismatch
from mlds.reachability import (
    CONJECTURE_CAVEAT,
    ControlledSystem,
    grow_subspace,
    reachability_test,
)
from mlds.tensor import certify_symmetric, multilinear_form, symmetrize


def growth_example():
    raw = np.zeros((2, 2, 2, 2))
    raw[1, 0, 0, 0] = 1.0  # e_2 o e_1 o e_1 o e_1
    return certify_symmetric(symmetrize(raw))


def brute_dims(A, B, tol=1e-9):
    """Span growth using every (k-1)-tuple of an SVD basis, no shortcuts."""
    A = np.asarray(A)
    k = A.ndim
    vecs = np.asarray(B, float).reshape(A.shape[0], -1)
    dims = []
    while True:
        U, s, _ = np.linalg.svd(vecs, full_matrices=False)
        r = int(np.sum(s > tol * max(1.0, s.max(initial=0.0))))
        if dims and r == dims[-1]:
            return dims
        dims.append(r)
        Q = U[:, :r]
        images = [multilinear_form(A, *(Q[:, i] for i in idx))
                  for idx in itertools.product(range(r), repeat=k - 1)]
        vecs = np.column_stack([Q] + images) if images else Q


class TestExamples:
    def test_identity_input(self):
        res = reachability_test(ControlledSystem(growth_example(), np.eye(2)))
        assert res.reachable and res.dim == 2 and res.saturated_at == 0
        assert res.stage_dims == [2]

    def test_zero_tensor_deficient_input(self):
        res = reachability_test(ControlledSystem(np.zeros((2, 2, 2, 2)), np.array([[1.0], [0.0]])))
        assert not res.reachable and res.dim == 1

    def test_zero_tensor_m_columns(self):
        B = np.eye(4)[:, :2]
        res = reachability_test(ControlledSystem(np.zeros((4,) * 4), B))
        assert not res.reachable and res.dim == 2

    def test_growth(self):
        A = growth_example()
        np.testing.assert_allclose(multilinear_form(A, *[np.array([1.0, 0.0])] * 3), [0.0, 0.25])
        sub = grow_subspace(ControlledSystem(A, np.array([1.0, 0.0])))
        assert [s.shape[1] for s in sub.stages] == [1, 2]
        assert abs(sub.stages[1][1, 1]) > 0.5
        res = reachability_test(ControlledSystem(A, np.array([1.0, 0.0])))
        assert res.reachable and res.dim == 2
        assert res.caveat == CONJECTURE_CAVEAT and res.in_conjecture_scope

    def test_odd_order_flagged(self):
        A = np.zeros((2, 2, 2))
        res = reachability_test(ControlledSystem(A, np.eye(2)[:, :1]))
        assert not res.in_conjecture_scope and "odd" in res.caveat

    def test_bad_input_matrix(self):
        with pytest.raises(DimensionMismatch):
            ControlledSystem(np.zeros((2, 2, 2, 2)), np.ones((3, 1)))


class TestProperties:
    def test_monotone_and_orthonormal(self, rng):
        for _ in range(20):
            A = random_symmetric(rng, 4, 4)
            A = certify_symmetric(A.data * (np.abs(A.data) > 1.2))  # sparse so growth is gradual
            sub = grow_subspace(ControlledSystem(A, rng.standard_normal((4, 1))))
            dims = [s.shape[1] for s in sub.stages]
            assert all(a < b for a, b in zip(dims, dims[1:]))
            assert dims[-1] <= 4
            Q = sub.basis
            np.testing.assert_allclose(Q.T @ Q, np.eye(Q.shape[1]), atol=1e-10)
            for s0, s1 in zip(sub.stages, sub.stages[1:]):
                np.testing.assert_array_equal(s1[:, : s0.shape[1]], s0)

    def test_matches_brute_force(self, rng):
        for trial in range(30):
            n, k = [(3, 4), (4, 4), (3, 3)][trial % 3]
            D = np.zeros((n,) * k)
            for idx in rng.integers(0, n, size=(2, k)):
                D[tuple(idx)] = rng.standard_normal()
            A = certify_symmetric(symmetrize(D))
            B = np.eye(n)[:, [trial % n]]
            dims = [s.shape[1] for s in grow_subspace(ControlledSystem(A, B)).stages]
            assert dims == brute_dims(A, B)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), m=st.integers(1, 2))
    def test_basis_invariance(self, seed, m):
        rng = np.random.default_rng(seed)
        raw = np.zeros((4,) * 4)
        for idx in rng.integers(0, 4, size=(2, 4)):
            raw[tuple(idx)] = 1.0
        A = certify_symmetric(symmetrize(raw))
        B = rng.standard_normal((4, m))
        rotated = B @ random_orthogonal(rng, m)
        d0 = reachability_test(ControlledSystem(A, B)).dim
        assert reachability_test(ControlledSystem(A, rotated)).dim == d0

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), c=st.floats(0.01, 100) | st.floats(-100, -0.01))
    def test_scaling_invariance(self, seed, c):
        rng = np.random.default_rng(seed)
        raw = np.zeros((3,) * 4)
        for idx in rng.integers(0, 3, size=(2, 4)):
            raw[tuple(idx)] = rng.standard_normal()
        A = certify_symmetric(symmetrize(raw))
        B = np.eye(3)[:, :1]
        d0 = reachability_test(ControlledSystem(A, B)).dim
        assert reachability_test(ControlledSystem(certify_symmetric(c * A.data), B)).dim == d0

    def test_budget_warning(self):
        A = np.zeros((3,) * 4)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            grow_subspace(ControlledSystem(A, np.eye(3)[:, :2]), tuple_budget=1)
        assert any(issubclass(w.category, RuntimeWarning) for w in caught)
