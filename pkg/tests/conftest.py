import math

import numpy as np
import pytest

from catspec.core import ModelParams


def ladder_ops(n_max):
    """Annihilation operators a, b on the (n_max+1)^2 two-mode Fock space."""
    d = n_max + 1
    a1 = np.diag(np.sqrt(np.arange(1, d)), 1)
    eye = np.eye(d)
    return np.kron(a1, eye), np.kron(eye, a1)


def dense_hamiltonian(n, u0, u1, lam):
    """Second-quantized two-mode Hamiltonian restricted to n atoms.

    Built from ladder operators only; basis ordered by the A occupation m.
    """
    a, b = ladder_ops(n)
    ad, bd = a.T, b.T
    h = 0.5 * u0 * (ad @ ad @ a @ a + bd @ bd @ b @ b) + u1 * (ad @ a) @ (bd @ b) - lam * (ad @ b + bd @ a)
    d = n + 1
    idx = [m * d + (n - m) for m in range(n + 1)]
    return h[np.ix_(idx, idx)]


def product_state(n, alpha, beta):
    """Fock coefficients of (alpha a^dag + beta b^dag)^N |0> / sqrt(N! N^N)."""
    m = np.arange(n + 1)
    logc = 0.5 * (math.lgamma(n + 1) - np.array([math.lgamma(k + 1) + math.lgamma(n - k + 1) for k in m]))
    c = np.exp(logc) * (alpha / math.sqrt(n)) ** m * (beta / math.sqrt(n)) ** (n - m)
    return c


def lab_field_params(tilde=None):
    u0 = 4 * math.pi * 50 / 3000
    return ModelParams(1000, u0, 3 * u0, 0.0, tilde)


@pytest.fixture
def lab_params():
    return lab_field_params()


# criterion number -> (status, title, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        status, title, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d} {status}: {title} ({detail})")
