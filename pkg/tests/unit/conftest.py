import contextlib
import random
import string
from unittest import mock

import pytest

from shardgame.libs.game_core import FollowerSpec, ShardSpec
from shardgame.libs.scenario_config import ScenarioConfig


def rand_str():
    length = random.randint(1, 127)
    return ''.join(random.choices(string.ascii_letters + string.digits, k=length))


def figure_config(figure):
    return ScenarioConfig.from_file(ScenarioConfig.figure_scenario_path(figure))


def contest_config(unit_costs, payments_alphas=(1.0,), capacity=1e4, br_tolerance=1e-9, **changes):
    followers = [FollowerSpec(str(n + 1), capacity, cost) for n, cost in enumerate(unit_costs)]
    shards = [ShardSpec(str(m + 1), alpha) for m, alpha in enumerate(payments_alphas)]
    return ScenarioConfig(followers, shards, br_tolerance=br_tolerance, **changes)


@pytest.fixture
def figure2_config():
    return figure_config(2)


@pytest.fixture
def figure3_config():
    return figure_config(3)


@pytest.fixture
def figure4_config():
    return figure_config(4)


@pytest.fixture
def figure5_config():
    return figure_config(5)


@pytest.fixture
def mock_input_file():
    @contextlib.contextmanager
    def make_mock_input_file(contents):
        file_name = rand_str()
        with mock.patch('os.path.exists', lambda p: p == file_name):
            with mock.patch('builtins.open', mock.mock_open(read_data=contents)):
                yield file_name

    return make_mock_input_file
