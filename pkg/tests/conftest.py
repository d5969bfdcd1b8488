import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nilsym import gallery

settings.register_profile(
    "nilsym", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("nilsym")

DATA_SET_NAMES = ["heis3-timelike", "boost3", "su2-mixed", "heis3-riemannian"]


@pytest.fixture(params=DATA_SET_NAMES)
def gallery_data_set(request):
    return gallery.get_example(request.param)


@pytest.fixture(scope="session")
def random_data_sets():
    rng = np.random.default_rng(20240611)
    return [gallery.random_lorentzian_data_set(rng, max_dim=16) for _ in range(12)]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
