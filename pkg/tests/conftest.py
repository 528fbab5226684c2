import numpy as np
import pytest

from mlds.tensor import certify_symmetric, odeco_tensor


def random_orthogonal(rng, n):
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def random_odeco(rng, n, k, lam=None, lam_range=(0.05, 2.0), signed=True):
    """Odeco tensor with random orthonormal factors; returns ``(A, lam, V)``."""
    V = random_orthogonal(rng, n)
    if lam is None:
        lam = rng.uniform(*lam_range, size=n)
        if signed:
            lam *= rng.choice([-1.0, 1.0], size=n)
        lam = np.sort(lam)[::-1]
    A = certify_symmetric(odeco_tensor(lam, V, k), sym_tol=1e-12)
    return A, np.asarray(lam, dtype=float), V


def random_symmetric(rng, n, k, positive=False):
    raw = rng.uniform(0.05, 1.0, size=(n,) * k) if positive else rng.standard_normal((n,) * k)
    from mlds.tensor import symmetrize
    return certify_symmetric(symmetrize(raw))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# --- acceptance summary -----------------------------------------------------

ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, title, detail = ACCEPTANCE_RESULTS[key]
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
