import pytest

from epispread import load_config, run_experiment


@pytest.fixture(scope="session")
def model1_cfg():
    return load_config("model1")


@pytest.fixture(scope="session")
def model2_cfg():
    return load_config("model2")


@pytest.fixture(scope="session")
def rate1_cfg():
    return load_config("rate1")


def _run(cfg):
    return run_experiment(cfg.params, cfg.init, cfg.integration, seed=cfg.seed)


@pytest.fixture(scope="session")
def model1_run(model1_cfg):
    """Full pipeline on the shipped Model 1 configuration (master seed)."""
    return _run(model1_cfg)


@pytest.fixture(scope="session")
def model2_run(model2_cfg):
    return _run(model2_cfg)


@pytest.fixture(scope="session")
def rate1_run(rate1_cfg):
    return _run(rate1_cfg)
