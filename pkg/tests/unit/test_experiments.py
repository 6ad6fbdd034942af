import numpy as np
import pandas as pd
import pytest

from shardgame.libs import experiments
from shardgame.libs.commands import run_scenario
from shardgame.libs.scenario_config import ScenarioConfig, ScenarioError


def test_figure2_surface_and_argmax(tmp_path):
    paths = experiments.reproduce_figure(2, str(tmp_path), grid_points=21, show_progress=False)

    assert [p.rsplit("/", 1)[-1] for p in paths] == ["figure2_surface.csv", "figure2_argmax.csv"]
    surface = pd.read_csv(tmp_path / "figure2_surface.csv")
    assert len(surface) == 21 * 21
    argmax = pd.read_csv(tmp_path / "figure2_argmax.csv")
    assert argmax["r_1"][0] == pytest.approx(41.42, abs=0.01)
    assert argmax["r_2"][0] == pytest.approx(46.41, abs=0.01)
    assert argmax["utility"][0] == pytest.approx(121.68, abs=0.01)
    assert argmax["multiplier"][0] == 0
    assert surface[surface["feasible"]]["utility"].max() <= argmax["utility"][0] + 1e-9


def test_figure3_trajectory_ends_at_the_equilibrium(tmp_path):
    experiments.reproduce_figure(3, str(tmp_path), show_progress=False)
    run_scenario(ScenarioConfig.figure_scenario_path(3), "equilibrium", str(tmp_path))

    trajectory = pd.read_csv(tmp_path / "figure3_trajectory.csv", dtype=str)
    allocation = pd.read_csv(tmp_path / "equilibrium_allocation.csv", dtype=str)
    final = trajectory[trajectory["sweep"] == trajectory["sweep"].iloc[-1]]

    assert final["follower_id"].tolist() == ["1", "2", "3", "4"]
    assert final["r_1"].tolist() == allocation["r_1"].tolist()
    assert final["r_2"].tolist() == allocation["r_2"].tolist()
    assert trajectory["sweep"].iloc[0] == "0"


def test_figure_csvs_are_reproducible(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    first.mkdir()
    second.mkdir()
    experiments.reproduce_figure(3, str(first), show_progress=False)
    experiments.reproduce_figure(3, str(second), show_progress=False)

    assert (first / "figure3_trajectory.csv").read_bytes() == (second / "figure3_trajectory.csv").read_bytes()


def test_figure4_surface_and_search(tmp_path):
    config = ScenarioConfig.from_file(ScenarioConfig.figure_scenario_path(4)).replace(payment_grid_max=10)
    experiments.reproduce_figure(4, str(tmp_path), config=config, grid_points=10, workers=2, show_progress=False)

    surface = pd.read_csv(tmp_path / "figure4_surface.csv")
    assert len(surface) == 100
    assert surface["converged"].all()
    argmax = pd.read_csv(tmp_path / "figure4_argmax.csv")
    assert abs(argmax["P_1"][0] - 4) <= 1
    assert abs(argmax["P_2"][0] - 6) <= 1
    assert 19.9 <= argmax["leader_utility"][0] <= 20.6

    search = pd.read_csv(tmp_path / "figure4_search.csv")
    best = search[search["accepted"]].iloc[-1]
    assert [best["P_1"], best["P_2"]] == [argmax["P_1"][0], argmax["P_2"][0]]


def test_figure5_search(tmp_path):
    config = ScenarioConfig.from_file(ScenarioConfig.figure_scenario_path(5)).replace(payment_grid_max=20)
    experiments.reproduce_figure(5, str(tmp_path), config=config, grid_points=5, show_progress=False)

    search = pd.read_csv(tmp_path / "figure5_search.csv")
    best = search[search["accepted"]].iloc[-1]
    assert abs(best["P_1"] - 11) <= 1
    assert abs(best["P_2"] - 15) <= 1


def test_payment_grid_is_integer_and_bounded():
    config = ScenarioConfig.from_file(ScenarioConfig.figure_scenario_path(4))
    grid = experiments.payment_grid(config, 30)

    assert grid[0] == 1
    assert grid[-1] == 100
    assert np.all(np.diff(grid) > 0)
    assert grid.dtype.kind == "i"


def test_unknown_figure():
    with pytest.raises(ValueError):
        experiments.reproduce_figure(6, ".")


def test_follower_surface_needs_one_follower():
    config = ScenarioConfig.from_file(ScenarioConfig.figure_scenario_path(3))
    with pytest.raises(ScenarioError):
        experiments.follower_surface(config)
