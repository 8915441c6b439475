import numpy as np
import pytest

from mixcit.data import ColumnKind, Dataset

C, DN, CAT = ColumnKind.CONTINUOUS, ColumnKind.DISCRETE_NUMERIC, ColumnKind.CATEGORICAL


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def mixed_dataset(rng, n=200, n_classes=3, ties=False):
    """x continuous, y continuous, z1 continuous, z2 categorical."""
    z1 = rng.standard_normal(n)
    if ties:
        z1 = np.round(z1, 1)
    z2 = rng.integers(0, n_classes, n)
    x = z1 + 0.5 * z2 + rng.standard_normal(n)
    y = z1 - 0.3 * z2 + rng.standard_normal(n)
    return Dataset.from_arrays([x, y, z1, z2], [C, C, C, CAT], ["x", "y", "z1", "z2"])


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
