import numpy as np
import pytest

from runshift import make_eta

ZETA3 = 1.2020569031595942
ZETA2 = 1.6449340668482264


@pytest.fixture(scope="session")
def power3():
    return make_eta("power", {"gamma": 3.0}, 12000)


@pytest.fixture(scope="session")
def stretched_half():
    return make_eta("stretched", {"theta": 0.5}, 40000)


@pytest.fixture(scope="session")
def geometric_half():
    return make_eta("geometric", {"ratio": 0.5}, 512)


def brute_double_tail(eta_at, q, terms=100000):
    """Independent double-sum oracle: sum_{m>q} (m-q) eta_m, truncated."""
    m = np.arange(q + 1, q + terms + 1, dtype=float)
    return float(np.sum(((m - q) * eta_at(m))[::-1]))
