import logging

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_odeco, random_orthogonal, random_symmetric
from mlds.errors import NotOdeco, NotPositive, NotUnitVector, OddOrder, ResidualTooLarge
from mlds.fixtures import EXAMPLE1_LAMBDA, EXAMPLE1_V_PRINTED, example1, example1_decomposition, example2
from mlds.spectral import (
    ODECO_RTOL,
    OdecoDecomposition,
    bound_report,
    certify_zeigenpair,
    odeco_decompose,
    positive_bound_terms,
    positive_tensor_bound,
    unfolding_bound,
    zscan_2d,
    zspectral_radius_estimate,
)
from mlds.tensor import apply_system, certify_symmetric, frobenius_norm, odeco_tensor

log = logging.getLogger(__name__)


def match_factors(V_found, V_true, atol):
    """Columns agree up to sign."""
    for r in range(V_true.shape[1]):
        s = np.sign(V_found[:, r] @ V_true[:, r]) or 1.0
        np.testing.assert_allclose(s * V_found[:, r], V_true[:, r], atol=atol)


class TestDecompose:
    def test_example1(self):
        dec = odeco_decompose(example1())
        np.testing.assert_allclose(dec.eigenvalues, EXAMPLE1_LAMBDA, atol=1e-6)
        match_factors(dec.factors, EXAMPLE1_V_PRINTED, atol=1e-4)
        assert dec.is_odeco

    def test_diagonal(self):
        D = certify_symmetric(odeco_tensor([5.0, 2.0, 1.0], np.eye(3), 3))
        dec = odeco_decompose(D)
        np.testing.assert_allclose(dec.eigenvalues, [5, 2, 1], atol=1e-10)
        match_factors(dec.factors, np.eye(3), atol=1e-8)

    def test_non_odeco_flagged(self, rng):
        tol = 1e-12
        A = random_symmetric(rng, 2, 3)
        dec = odeco_decompose(A, tol=tol)
        direct = frobenius_norm(A.data - odeco_tensor(dec.eigenvalues, dec.factors, 3))
        assert dec.residual == pytest.approx(direct, rel=1e-12)
        assert dec.residual > 10 * tol
        assert not dec.is_odeco
        with pytest.raises(NotOdeco):
            dec.require_odeco()

    def test_invariants(self, rng):
        A, lam, V = random_odeco(rng, 4, 4)
        dec = odeco_decompose(A)
        F = dec.factors
        np.testing.assert_allclose(np.linalg.norm(F, axis=0), 1.0, atol=1e-10)
        off = F.T @ F - np.eye(4)
        assert np.abs(off).max() < 1e-8
        assert np.all(np.diff(dec.eigenvalues) <= 0)

    def test_factors_are_certified_eigenpairs(self, rng):
        tol = 1e-12
        for k in (3, 4):
            A, _, _ = random_odeco(rng, 3, k)
            dec = odeco_decompose(A, tol=tol)
            for r in range(3):
                certify_zeigenpair(A, dec.eigenvalues[r], dec.factors[:, r], tol=100 * tol * max(1, abs(dec.eigenvalues[r])))

    def test_zero_eigenvalue_completed(self):
        V = random_orthogonal(np.random.default_rng(3), 3)
        A = certify_symmetric(odeco_tensor([1.0, 0.5, 0.0], V, 3))
        dec = odeco_decompose(A)
        np.testing.assert_allclose(dec.eigenvalues, [1.0, 0.5, 0.0], atol=1e-9)
        np.testing.assert_allclose(dec.factors.T @ dec.factors, np.eye(3), atol=1e-10)

    def test_negative_eigenvalues_even_order(self, rng):
        A, lam, V = random_odeco(rng, 3, 4, lam=np.array([0.8, -0.3, -1.2]))
        dec = odeco_decompose(A)
        np.testing.assert_allclose(dec.eigenvalues, [0.8, -0.3, -1.2], atol=1e-9)

    def test_seed_determinism(self, rng):
        A, _, _ = random_odeco(rng, 3, 3)
        d1, d2 = odeco_decompose(A, seed=7), odeco_decompose(A, seed=7)
        assert np.array_equal(d1.eigenvalues, d2.eigenvalues)
        assert np.array_equal(d1.factors, d2.factors)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), k=st.sampled_from([3, 4]),
           c=st.floats(0.1, 10) | st.floats(-10, -0.1))
    def test_scaling(self, seed, k, c):
        rng = np.random.default_rng(seed)
        lam = np.array([1.5, 1.0, 0.4])
        A, _, V = random_odeco(rng, 3, k, lam=lam)
        dec = odeco_decompose(certify_symmetric(c * A.data))
        if k % 2 == 1 and c < 0:
            # (lambda, v) ~ (-lambda, -v) for odd order: magnitudes scale by |c|
            np.testing.assert_allclose(dec.eigenvalues, np.abs(c) * lam, rtol=1e-8)
        else:
            np.testing.assert_allclose(dec.eigenvalues, np.sort(c * lam)[::-1], rtol=1e-8)
        found = np.abs(dec.factors.T @ V)
        np.testing.assert_allclose(np.sort(found.max(axis=1)), 1.0, atol=1e-8)


class TestCertifyPair:
    def test_example1_first_factor(self):
        dec = example1_decomposition()
        pair = certify_zeigenpair(example1(), 0.9, dec.factors[:, 0], tol=1e-6)
        assert pair.residual < 1e-6

    def test_zero_tensor(self):
        v = np.array([0.6, 0.8])
        assert certify_zeigenpair(np.zeros((2, 2, 2)), 0.0, v).residual == 0.0

    def test_example1_wrong_pairing(self):
        A, dec = example1(), example1_decomposition()
        v = dec.factors[:, 1]
        expected = np.linalg.norm(apply_system(A, v) - 0.9 * v)
        with pytest.raises(ResidualTooLarge) as info:
            certify_zeigenpair(A, 0.9, v)
        assert info.value.residual == pytest.approx(expected)
        assert expected == pytest.approx(0.8, abs=1e-9)

    def test_not_unit(self):
        with pytest.raises(NotUnitVector):
            certify_zeigenpair(example1(), 0.9, [1.0, 1.0, 0.0])

    def test_renormalises(self):
        D = odeco_tensor([2.0, 1.0], np.eye(2), 3)
        pair = certify_zeigenpair(D, 2.0, [1.0 + 5e-7, 0.0])
        assert np.linalg.norm(pair.vector) == pytest.approx(1.0, abs=1e-15)


class TestZScan:
    def test_diagonal_axes(self):
        a, b = 3.0, 1.5
        pairs = zscan_2d(odeco_tensor([a, b], np.eye(2), 3))
        found = {(round(p.eigenvalue, 9), tuple(np.round(p.vector, 9))) for p in pairs}
        assert (a, (1.0, 0.0)) in found
        assert (b, (0.0, 1.0)) in found

    def test_equal_axis_eigenvalues(self):
        A = odeco_tensor([1.0, 1.0], np.eye(2), 3)
        pairs = zscan_2d(A)
        axis = [p for p in pairs if np.isclose(abs(p.vector).max(), 1.0)]
        assert len(axis) >= 2
        for p in axis:
            certify_zeigenpair(A, p.eigenvalue, p.vector, tol=1e-10)

    def test_example2_within_unfolding_bound(self):
        pairs = zscan_2d(example2())
        assert max(abs(p.eigenvalue) for p in pairs) <= 0.5 + 1e-6
        assert any(abs(p.eigenvalue - 0.5) < 1e-9 for p in pairs)
        assert any(abs(p.eigenvalue - 0.4) < 1e-9 for p in pairs)

    def test_residuals_small(self, rng):
        A = random_symmetric(rng, 2, 4)
        for p in zscan_2d(A):
            assert p.residual < 1e-10

    def test_zero_tensor(self):
        assert zscan_2d(np.zeros((2, 2, 2))) == []


class TestBounds:
    def test_unfolding_example2(self):
        assert unfolding_bound(example2()) == pytest.approx(0.5, abs=1e-6)

    def test_unfolding_zero(self):
        assert unfolding_bound(np.zeros((3, 3, 3, 3))) == 0.0

    def test_unfolding_diagonal(self):
        D = odeco_tensor([0.7, -2.5, 1.0], np.eye(3), 4)
        assert unfolding_bound(D) == pytest.approx(2.5)

    def test_unfolding_odd(self):
        with pytest.raises(OddOrder):
            unfolding_bound(example1())

    def test_positive_example2(self):
        assert positive_tensor_bound(example2()) == pytest.approx(1.0263, abs=1e-3)

    def test_positive_all_ones(self):
        assert positive_bound_terms(np.ones((2, 2, 2))) == (1.0, 4.0, 4.0)
        assert positive_tensor_bound(np.ones((2, 2, 2))) == 4.0

    @pytest.mark.parametrize("c", [0.1, 1.0, 3.7])
    def test_positive_constant_order4(self, c):
        assert positive_tensor_bound(np.full((2,) * 4, c)) == pytest.approx(8 * c)

    def test_positive_rejects_nonpositive(self):
        with pytest.raises(NotPositive):
            positive_tensor_bound(example1())

    def test_estimate(self):
        dec = OdecoDecomposition(np.array([0.9, 0.1, 0.02]), np.eye(3), 3, 0.0, 1.0)
        assert zspectral_radius_estimate(dec) == 0.9
        dec = OdecoDecomposition(np.array([1.0, -3.0]), np.eye(2), 3, 0.0, 1.0)
        assert zspectral_radius_estimate(dec) == 3.0

    def test_estimate_requires_odeco(self):
        dec = OdecoDecomposition(np.array([1.0]), np.eye(1), 3, 1.0, 1.0)
        with pytest.raises(NotOdeco):
            zspectral_radius_estimate(dec)

    def test_report_example2(self):
        rep = bound_report(example2(), odeco_decompose(example2()))
        assert rep.unfolding == pytest.approx(0.5, abs=1e-6)
        assert rep.positive == pytest.approx(1.0263, abs=1e-3)
        assert rep.zspectral_estimate == pytest.approx(0.5, abs=1e-9)
        assert rep.estimate_source == "decomposition"
        assert rep.frobenius == pytest.approx(np.hypot(0.5, 0.4))
        for b in (rep.unfolding, rep.positive, rep.frobenius, *rep.mode_norms):
            assert b >= rep.zspectral_estimate - 1e-8

    def test_report_scan_fallback(self, rng):
        rep = bound_report(random_symmetric(rng, 2, 3))
        assert rep.estimate_source == "angle-scan"
        assert rep.unfolding is None and rep.positive is None
        assert rep.frobenius >= rep.zspectral_estimate - 1e-8

    def test_estimate_vs_scan(self):
        """The radius estimate against the scan oracle; disagreements are logged only."""
        rng = np.random.default_rng(2024)
        counterexamples = 0
        for trial in range(60):
            k = [3, 4][trial % 2]
            A, _, _ = random_odeco(rng, 2, k)
            est = zspectral_radius_estimate(odeco_decompose(A))
            scanned = max(abs(p.eigenvalue) for p in zscan_2d(A))
            if est > scanned + 1e-6:
                counterexamples += 1
                log.warning("estimate %.9g exceeds scanned radius %.9g (trial %d)", est, scanned, trial)
            if abs(est - scanned) > 1e-6:
                log.info("estimate %.9g differs from scanned radius %.9g (trial %d)", est, scanned, trial)
        log.info("estimate-vs-scan counterexamples: %d", counterexamples)

    def test_odeco_threshold_constant(self):
        assert ODECO_RTOL == 1e-6
