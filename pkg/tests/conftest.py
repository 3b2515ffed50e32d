import pytest

from rollstock.instance import canonical


@pytest.fixture
def two_trip():
    return canonical("TwoTrip")


@pytest.fixture
def situation1():
    return canonical("Situation1")


@pytest.fixture
def situation2():
    return canonical("Situation2")


@pytest.fixture
def flow_gap():
    return canonical("FlowConstraintGap")
