import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ordr2.estimation import Dataset  # noqa: E402


def random_ordinal_dataset(rng: np.random.Generator, n: int, p: int, r: int, scale: float = 1.0) -> Dataset:
    """Latent-normal data cut at sample quantiles so every category occurs."""
    X = rng.normal(size=(n, p))
    beta = rng.normal(scale=scale, size=p)
    latent = X @ beta + rng.normal(size=n)
    order = np.argsort(latent, kind="stable")
    y = np.empty(n, dtype=int)
    y[order] = np.arange(n) * r // n + 1
    return Dataset(tuple(f"x{j + 1}" for j in range(p)), X, y)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
