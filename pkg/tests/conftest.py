import numpy as np
import pytest

S0 = np.eye(2, dtype=complex)
S1 = np.array([[0, 1], [1, 0]], dtype=complex)
S2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
S3 = np.array([[1, 0], [0, -1]], dtype=complex)


def taylor_expm(a, terms=30):
    """Oracle: scaled Taylor series, then repeated squaring."""
    a = np.asarray(a, dtype=complex)
    norm = np.abs(a).sum(axis=1).max()
    k = max(0, int(np.ceil(np.log2(norm + 1e-300))) + 1) if norm > 0.5 else 0
    b = a / 2**k
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for n in range(1, terms):
        term = term @ b / n
        out = out + term
    for _ in range(k):
        out = out @ out
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
