import pytest

import pumpsim as ps


@pytest.fixture(scope="session")
def default_scenario():
    return ps.load_scenario("default")


@pytest.fixture(scope="session")
def params(default_scenario):
    return default_scenario.params


@pytest.fixture(scope="session")
def drive(default_scenario):
    return default_scenario.drive


@pytest.fixture(scope="session")
def base_config(default_scenario):
    return default_scenario.sim_config()


@pytest.fixture(scope="session")
def base_trace(base_config):
    return ps.simulate(base_config)


@pytest.fixture(scope="session")
def pumped_config(default_scenario):
    return default_scenario.sim_config(
        pump=ps.PumpScenario(p_pump=1.6e-3, eps_opt=0.1)
    )


@pytest.fixture(scope="session")
def pumped_trace(pumped_config):
    return ps.simulate(pumped_config)
