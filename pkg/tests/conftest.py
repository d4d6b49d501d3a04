import numpy as np
import pytest

from tridens import make_rng

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return make_rng(20240601, 0)


@pytest.fixture
def report():
    """Record one acceptance line; printed in the terminal summary."""

    def _report(label, ok, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {label}" + (f" -- {detail}" if detail else ""))
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_tridiagonal(rng, n, scale=1.0):
    from tridens import TridiagonalMatrix

    return TridiagonalMatrix(scale * rng.uniform(-1, 1, n), scale * rng.uniform(0.05, 1, n - 1))


@pytest.fixture
def random_tri():
    return random_tridiagonal


def random_measure(rng, n, min_gap=1e-6):
    """n atoms in roughly [-1, 1] with gaps >= min_gap and Dirichlet(1) weights."""
    from tridens import DiscreteMeasure

    gaps = min_gap + rng.uniform(0.0, 2.0 / n, n - 1)
    atoms = np.concatenate([[0.0], np.cumsum(gaps)]) - 1.0
    w = rng.exponential(size=n)
    return DiscreteMeasure(atoms, w / w.sum())
