import pytest

from ceapost.core import PsaDataset, new_analysis

# Canonical 3-simulation, 2-arm fixture; every derived value was verified
# against the naive enumeration oracle before being frozen into tests.
TINY_EFFECTS = [[1.0, 2.0], [1.0, 3.0], [1.0, 1.0]]
TINY_COSTS = [[10.0, 25.0], [10.0, 35.0], [10.0, 15.0]]
TINY_LABELS = ("Status quo", "New")


@pytest.fixture
def tiny_dataset():
    return PsaDataset(TINY_EFFECTS, TINY_COSTS, TINY_LABELS)


@pytest.fixture
def tiny_analysis(tiny_dataset):
    # grid {0, 5, 10, 15, 20, 25, 30}: contains the break-even value exactly
    return new_analysis(tiny_dataset, ref=1, kmax=30.0, grid_points=7)


def random_dataset(rng, n_sim=None, n_int=None, cost_scale=100.0):
    """Random PSA dataset with effects in [0, 1) and costs in [0, cost_scale)."""
    n_sim = n_sim if n_sim is not None else int(rng.integers(2, 50))
    n_int = n_int if n_int is not None else int(rng.integers(2, 6))
    effects = rng.random((n_sim, n_int))
    costs = rng.random((n_sim, n_int)) * cost_scale
    return PsaDataset(effects, costs)
