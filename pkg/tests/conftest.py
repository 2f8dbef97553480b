import warnings

import pytest

from anscy.cli.presets import PRESETS
from anscy.core import OutageConstraints, SystemConfig


@pytest.fixture
def fig2_cfg() -> SystemConfig:
    return PRESETS["fig2-co-validate"].base


@pytest.fixture
def fig4_cfg() -> SystemConfig:
    return PRESETS["fig4-so-validate"].base


@pytest.fixture
def fig6_cfg() -> SystemConfig:
    return PRESETS["fig6-mu-vs-phi"].base


@pytest.fixture
def constraints() -> OutageConstraints:
    return OutageConstraints(sigma=0.1, epsilon=0.01)


@pytest.fixture(autouse=True)
def _quiet_degenerate():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=RuntimeWarning)
        yield
