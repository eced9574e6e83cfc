import numpy as np
import pytest

from xlingmap.normalize import unit_normalize


def brute_csls(a, b, k):
    """Exhaustive CSLS argmax with both penalties, written with plain loops."""
    n_a, n_b = len(a), len(b)
    sim = [[float(np.dot(a[i], b[j])) for j in range(n_b)] for i in range(n_a)]
    pen_a = [float(np.mean(sorted(row, reverse=True)[:min(k, n_b)])) for row in sim]
    pen_b = [float(np.mean(sorted((sim[i][j] for i in range(n_a)), reverse=True)[:min(k, n_a)]))
             for j in range(n_b)]
    out = []
    for i in range(n_a):
        best, best_j = -np.inf, -1
        for j in range(n_b):
            v = 2 * sim[i][j] - pen_a[i] - pen_b[j]
            if v > best:
                best, best_j = v, j
        out.append(best_j)
    return np.array(out)


def brute_nn(a, b):
    out = []
    for i in range(len(a)):
        best, best_j = -np.inf, -1
        for j in range(len(b)):
            v = float(np.dot(a[i], b[j]))
            if v > best:
                best, best_j = v, j
        out.append(best_j)
    return np.array(out)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_unit(rng, n, d):
    return unit_normalize(rng.standard_normal((n, d)))


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line with the measured values, then assert."""
    def _verdict(criterion, ok, detail):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}")
        assert ok, f"{criterion}: {detail}"
    return _verdict


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
