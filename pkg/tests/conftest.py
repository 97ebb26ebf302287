import pytest

from pfloc.rfmap import Landmark, Map, Point2
from pfloc.sim import default_scenario


@pytest.fixture
def two_landmark_map():
    return Map(
        area_length=10.0,
        area_width=10.0,
        ap_ids=("ap0", "ap1"),
        landmarks=(
            Landmark(0, Point2(0.0, 0.0), (-40.0, -60.0)),
            Landmark(1, Point2(10.0, 10.0), (-60.0, -40.0)),
        ),
    )


@pytest.fixture(scope="session")
def stock_scenario():
    return default_scenario(n_particles=300, seed=0)


@pytest.fixture(scope="session")
def stock_map(stock_scenario):
    return stock_scenario.fmap
