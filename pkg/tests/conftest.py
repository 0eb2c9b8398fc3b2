import pytest

from gaborlattice import SeriesControl, SignalModel, nome_from_tau


@pytest.fixture
def ctrl():
    return SeriesControl()


@pytest.fixture
def params_tau1():
    return nome_from_tau(1.0)


@pytest.fixture
def unit_gaussian():
    return SignalModel.gaussian([(1.0, 0.0, 0.0)])


@pytest.fixture
def two_component():
    # shifted+modulated pair used across the round-trip tests
    return SignalModel.gaussian([(1.0, 0.7, 2.0), (1.0, -1.0, 0.0)])
