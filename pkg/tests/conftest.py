import numpy as np
import pytest

from rmshift.config import ExperimentConfig
from rmshift.densities import NoiseModel
from rmshift.shapes import ShapeFunction


def riemann(fn, a=-0.5, b=0.5, n=10**6):
    """Midpoint-rule oracle on a vectorised integrand."""
    x = a + (b - a) * (np.arange(n) + 0.5) / n
    return float(np.sum(fn(x)) * (b - a) / n)


def canonical_config(**overrides) -> ExperimentConfig:
    cfg = ExperimentConfig(
        theta_true=0.1, sign_f1=1, shape=ShapeFunction.cosine(1.0),
        noise=NoiseModel("gaussian", 0.5), n_steps=100_000, n_reps=400,
        seed=20240601, record_points=(100, 1000, 10_000, 100_000), trajectory_reps=0)
    return cfg.with_overrides(**overrides) if overrides else cfg


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion and assert it."""
    def record(label, ok, detail):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        assert ok, f"{label}: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
