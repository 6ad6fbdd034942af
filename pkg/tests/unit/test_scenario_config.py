import json

import numpy as np
import pytest

from shardgame.libs.game_core import LeaderVariant
from shardgame.libs.scenario_config import ScenarioConfig, ScenarioError


def scenario(**changes):
    document = {
        "followers": [{"id": "a", "capacity": 100, "unit_cost": 0.2},
                      {"id": "b", "capacity": 200, "unit_cost": 0.1}],
        "shards": [{"id": "s1", "alpha": 4}, {"id": "s2", "alpha": 6}],
    }
    document.update(changes)
    return document


def test_load_scenario_invalid_path():
    with pytest.raises(FileNotFoundError):
        ScenarioConfig.from_file("/invalidpath")


def test_load_scenario_invalid_json(mock_input_file):
    with mock_input_file('{\n  "followers": [,\n}') as scenario_file:
        with pytest.raises(ScenarioError) as exception_info:
            ScenarioConfig.from_file(scenario_file)
    assert "line 2" in str(exception_info.value)


def test_load_scenario_defaults(mock_input_file):
    with mock_input_file(json.dumps(scenario())) as scenario_file:
        config = ScenarioConfig.from_file(scenario_file)

    assert config.num_followers == 2
    assert config.num_shards == 2
    assert config.leader_variant == LeaderVariant.LOG
    assert config.epsilon_grain == 1e-6
    assert config.br_tolerance == pytest.approx(1e-6 * 200)
    assert config.max_sweeps == 1000
    assert config.payment_grid_max == 100
    assert config.payments is None
    assert config.rng_seed == 0
    assert config.alpha_factors == (1.0, 1.5, 2.0, 2.5, 3.0)


def test_load_scenario_with_every_section(mock_input_file):
    document = scenario(payments=[10, 20], solver={"br_tolerance": 1e-8, "max_sweeps": 50, "epsilon_grain": 1e-4},
                        leader={"variant": "linear", "payment_grid_max": 30},
                        payout={"shares_per_unit": 2.5, "rounds": 500}, alpha_factors=[1, 2], seed=9)
    with mock_input_file(json.dumps(document)) as scenario_file:
        config = ScenarioConfig.from_file(scenario_file)

    assert config.payments.tolist() == [10, 20]
    assert config.br_tolerance == 1e-8
    assert config.max_sweeps == 50
    assert config.epsilon_grain == 1e-4
    assert config.leader_variant == LeaderVariant.LINEAR
    assert config.payment_grid_max == 30
    assert config.shares_per_unit == 2.5
    assert config.payout_rounds == 500
    assert config.alpha_factors == (1, 2)
    assert config.rng_seed == 9


def test_negative_capacity_names_the_follower():
    document = scenario()
    document["followers"][1]["capacity"] = -5
    with pytest.raises(ScenarioError) as exception_info:
        ScenarioConfig.from_dict(document)
    assert "followers[1] (id 'b')" in str(exception_info.value)
    assert "capacity must be > 0" in str(exception_info.value)


def test_missing_field_is_reported():
    document = scenario()
    del document["shards"][0]["alpha"]
    with pytest.raises(ScenarioError) as exception_info:
        ScenarioConfig.from_dict(document)
    assert "shards[0] (id 's1') does not contain 'alpha' field" in str(exception_info.value)


@pytest.mark.parametrize("changes", [
    dict(followers=[]),
    dict(shards="s1"),
    dict(payments=[1, 2, 3]),
    dict(payments=[1, -2]),
    dict(opponents_totals=["x", 1]),
    dict(leader={"variant": "quadratic"}),
    dict(leader={"payment_grid_max": 0}),
    dict(solver={"max_sweeps": 2.5}),
    dict(solver={"br_tolerance": 0}),
    dict(alpha_factors=[1, -1]),
    dict(seed="one"),
    dict(solver=[]),
])
def test_invalid_scenarios_are_rejected(changes):
    with pytest.raises(ScenarioError):
        ScenarioConfig.from_dict(scenario(**changes))


def test_duplicate_ids_are_rejected():
    document = scenario()
    document["followers"][1]["id"] = "a"
    with pytest.raises(ScenarioError) as exception_info:
        ScenarioConfig.from_dict(document)
    assert "duplicate id 'a'" in str(exception_info.value)


def test_ids_default_to_positions():
    document = scenario()
    for entry in document["followers"]:
        del entry["id"]
    config = ScenarioConfig.from_dict(document)
    assert [f.id for f in config.followers] == ["1", "2"]


def test_scenario_errors_are_value_errors():
    assert issubclass(ScenarioError, ValueError)


def test_with_alphas_and_seed_leave_the_original_untouched():
    config = ScenarioConfig.from_dict(scenario(seed=1))
    scaled = config.with_alphas(config.alphas * 2).with_seed(4)

    assert scaled.alphas.tolist() == [8, 12]
    assert scaled.rng_seed == 4
    assert config.alphas.tolist() == [4, 6]
    assert config.rng_seed == 1
    assert [s.id for s in scaled.shards] == ["s1", "s2"]


@pytest.mark.parametrize("figure", [2, 3, 4, 5])
def test_bundled_figure_scenarios_load(figure):
    config = ScenarioConfig.from_file(ScenarioConfig.figure_scenario_path(figure))
    assert config.num_shards == 2
    assert config.rng_seed == figure


def test_figure5_doubles_and_a_half_the_figure4_priorities():
    fig4 = ScenarioConfig.from_file(ScenarioConfig.figure_scenario_path(4))
    fig5 = ScenarioConfig.from_file(ScenarioConfig.figure_scenario_path(5))
    assert np.allclose(fig5.alphas, 2.5 * fig4.alphas)


def test_integral_floats_are_stored_as_integers():
    document = scenario(solver={"max_sweeps": 50.0}, leader={"payment_grid_max": 1e2}, payout={"rounds": 20000.0})
    config = ScenarioConfig.from_dict(document)

    assert config.max_sweeps == 50 and isinstance(config.max_sweeps, int)
    assert config.payment_grid_max == 100 and isinstance(config.payment_grid_max, int)
    assert config.payout_rounds == 20000 and isinstance(config.payout_rounds, int)
