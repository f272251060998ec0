import numpy as np
import pytest

from bayesloss.posterior import PosteriorDraws
from bayesloss.sampler import SamplerConfig, fit_logistic
from bayesloss.synthetic import conflict_dataset


@pytest.fixture(scope="session")
def normal_sample():
    """10,000 draws from Normal(-0.5, 0.5)."""
    return np.random.default_rng(2020).normal(-0.5, 0.5, 10_000)


@pytest.fixture(scope="session")
def normal_draws(normal_sample):
    return PosteriorDraws.from_array(normal_sample, "theta", n_chains=4)


@pytest.fixture(scope="session")
def analog_data():
    return conflict_dataset(seed=11)


@pytest.fixture(scope="session")
def analog_fit(analog_data):
    return fit_logistic(analog_data, SamplerConfig(seed=11))
