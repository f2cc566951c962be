import numpy as np
import pytest

from memlin import DesignConfig, ExperimentConfig, NonlinearityKind


@pytest.fixture(scope="session")
def small_cfg():
    """Reduced-scale experiment used by the fast structural tests."""
    return ExperimentConfig(
        seed=90210,
        ensemble_size=6,
        signal_length=1024,
        design=DesignConfig(n_branches=6, q_grid=5),
        n_validation=2,
        branch_sweep=(2, 4, 6),
        hammerstein_sweep=(2, 3),
        kinds=(NonlinearityKind.ABS, NonlinearityKind.RELU),
    )


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(42)
