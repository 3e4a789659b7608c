import numpy as np
import pytest

from eigenrac import Eigenvalue, eigen

S2, S6 = np.sqrt(2), np.sqrt(6)
P1, M1, PJ, MJ = Eigenvalue.PLUS_ONE, Eigenvalue.MINUS_ONE, Eigenvalue.PLUS_J, Eigenvalue.MINUS_J
FULL_SEL = (P1, M1, PJ, MJ)

# Reference invariant sequences for N=6 and N=8, written symbolically.
REFERENCE = {
    6: {
        P1: [2 + 2 * S6 / 3, 1 + S6 / 2, S6 / 6, 0, S6 / 6, 1 + S6 / 2],
        M1: [-2, 1 + S6 / 6, S6 / 2, 2 * S6 / 3, S6 / 2, 1 + S6 / 6],
        PJ: [0, 1 - S2 / 2, -S2 / 2, 0, S2 / 2, -1 + S2 / 2],
        MJ: [0, 1 + S2 / 2, S2 / 2, 0, -S2 / 2, -1 - S2 / 2],
    },
    8: {
        P1: [2 + S2, (3 + S2) / 2, S2 / 2, (-1 + S2) / 2, 0, (-1 + S2) / 2, S2 / 2, (3 + S2) / 2],
        M1: [-2, (1 + S2) / 2, S2 / 2, (1 + S2) / 2, S2, (1 + S2) / 2, S2 / 2, (1 + S2) / 2],
        PJ: [0, 1 / 2, -S2 / 2, -1 / 2, 0, 1 / 2, S2 / 2, -1 / 2],
        MJ: [0, 3 / 2, S2 / 2, 1 / 2, 0, -1 / 2, -S2 / 2, -3 / 2],
    },
}


def direct_dft(x):
    """Double-loop reference transform, independent of the library."""
    n = len(x)
    out = []
    for k in range(n):
        acc = 0j
        for i in range(n):
            acc += complex(x[i]) * np.exp(-2j * np.pi * i * k / n)
        out.append(acc / np.sqrt(n))
    return np.array(out)


def rel_err(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_invariant(rng, n, lam, real=False):
    x = rng.standard_normal(n) if real else crandn(rng, n)
    g = eigen.project(x, lam)
    assert not g.zero
    return g


@pytest.fixture
def rng():
    return np.random.default_rng(20241019)


_ACCEPTANCE = []


@pytest.fixture
def report(request):
    """Record one PASS/FAIL line for an acceptance criterion."""

    def _report(label, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip()
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
