import numpy as np
import pytest

from lisim import Scenario, build_channel, sample_users


def random_complex(rng, rows, cols):
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def random_hermitian(rng, n):
    a = random_complex(rng, n, n)
    return 0.5 * (a + a.conj().T)


def random_psd(rng, n, boost=0.0):
    a = random_complex(rng, n, n)
    return a @ a.conj().T + boost * np.eye(n)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def desk_scenario():
    """256-antenna surface (0.6 m at 4 GHz), 16 users."""
    return Scenario(lis_width_m=0.6, lis_height_m=0.6, num_users=16)


@pytest.fixture(scope="session")
def desk_channel(desk_scenario):
    users = sample_users(desk_scenario, seed=42)
    return build_channel(desk_scenario, users, 16)
