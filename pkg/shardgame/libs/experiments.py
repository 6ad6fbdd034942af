import concurrent.futures
import logging
import os

import numpy as np
import pandas as pd
from tqdm import tqdm

from shardgame.libs.equilibrium_engine import solve_followers_equilibrium
from shardgame.libs.follower_solver import BestResponseInput, best_response_with_multiplier
from shardgame.libs.leader_optimizer import algorithm1_search
from shardgame.libs.scenario_config import ScenarioConfig, ScenarioError

FLOAT_FORMAT = "%.9g"
DEFAULT_GRID_POINTS = 100
FIGURES = (2, 3, 4, 5)


def write_csv(frame, output_dir, name):
    path = os.path.join(output_dir, name)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logging.info(f"Wrote {path}")
    return path


def shard_columns(prefix, config):
    return [f"{prefix}_{shard.id}" for shard in config.shards]


def allocation_frame(config, result):
    frame = pd.DataFrame({
        "follower_id": [f.id for f in config.followers],
        "capacity": config.capacities,
        "unit_cost": config.unit_costs,
    })
    for column, values in zip(shard_columns("r", config), result.allocation.T):
        frame[column] = values
    frame["total"] = result.allocation.sum(axis=1)
    frame["utility"] = result.follower_utilities
    frame["at_capacity"] = result.at_capacity
    return frame


def equilibrium_summary_frame(config, result):
    row = {"sweeps": result.sweeps, "converged": result.converged, "residual": result.residual,
           "leader_utility": result.leader_utility}
    row.update(zip(shard_columns("P", config), result.payments))
    return pd.DataFrame([row])


def trace_frame(config, search):
    rows = []
    for index, entry in enumerate(search.trace):
        row = {"evaluation": index}
        row.update(zip(shard_columns("P", config), entry.payments))
        row.update(leader_utility=entry.leader_utility, converged=entry.converged, accepted=entry.accepted)
        rows.append(row)
    return pd.DataFrame(rows)


def ledger_frame(config, ledger):
    rows = []
    for n, follower_id in enumerate(_row_ids(config, ledger.expected_tokens.shape[0])):
        for m, shard in enumerate(config.shards):
            rows.append({"follower_id": follower_id, "shard_id": shard.id,
                         "expected_tokens": ledger.expected_tokens[n, m],
                         "simulated_tokens": ledger.simulated_tokens[n, m],
                         "shares_observed": ledger.shares_observed[n, m],
                         "relative_error": ledger.relative_error[n, m]})
    return pd.DataFrame(rows)


def _row_ids(config, rows):
    ids = [f.id for f in config.followers]
    return ids if rows == len(ids) else ids + ["opponents"]


def alpha_sweep_frame(config, points):
    rows = []
    for point in points:
        row = {"factor": point.factor}
        row.update(zip(shard_columns("alpha", config), point.alphas))
        row.update(zip(shard_columns("P", config), point.search.best_payments))
        row.update(leader_utility=point.search.best_utility, total_resources=point.total_resources)
        rows.append(row)
    return pd.DataFrame(rows)


def single_follower_input(config):
    """The one-follower-against-fixed-opponents setting of a scenario."""
    if config.num_followers != 1 or config.opponents_totals is None or config.payments is None:
        raise ScenarioError("this run needs exactly one follower plus 'payments' and 'opponents_totals'")
    follower = config.followers[0]
    return BestResponseInput(config.payments, config.opponents_totals, follower.unit_cost, follower.capacity,
                             config.epsilon_grain, config.br_tolerance)


def follower_surface(config, grid_points=DEFAULT_GRID_POINTS):
    """Utility of the single follower over a grid of its two shard contributions."""
    inp = single_follower_input(config)
    if config.num_shards != 2:
        raise ScenarioError("the utility surface needs exactly two shards")
    axis = np.linspace(0.0, inp.capacity, grid_points)
    r1, r2 = np.meshgrid(axis, axis, indexing="ij")
    rows = np.column_stack([r1.ravel(), r2.ravel()])
    surface = pd.DataFrame({
        "r_1": rows[:, 0],
        "r_2": rows[:, 1],
        "feasible": rows.sum(axis=1) <= inp.capacity,
        "utility": [inp.utility(row) for row in rows],
    })

    response = best_response_with_multiplier(inp)
    argmax = pd.DataFrame([{
        "r_1": response.allocation[0],
        "r_2": response.allocation[1],
        "utility": inp.utility(response.allocation),
        "multiplier": response.multiplier,
        "budget_slack": inp.capacity - response.total,
    }])
    return surface, argmax


def payment_grid(config, grid_points=DEFAULT_GRID_POINTS):
    return np.unique(np.round(np.linspace(1, config.payment_grid_max, grid_points)).astype(int))


def leader_surface(config, grid_points=DEFAULT_GRID_POINTS, workers=1, show_progress=True):
    """Leader utility at the followers' equilibrium for every point of a two-shard payment grid."""
    if config.num_shards != 2:
        raise ScenarioError("the leader utility surface needs exactly two shards")
    axis = payment_grid(config, grid_points)
    points = [(p1, p2) for p1 in axis for p2 in axis]

    rows = []
    with tqdm(total=len(points), unit="solve", disable=not show_progress) as pbar:
        def solve(point):
            result = solve_followers_equilibrium(config, np.array(point, dtype=float))
            pbar.update(1)
            return result

        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            for point, result in zip(points, executor.map(solve, points)):
                rows.append({"P_1": point[0], "P_2": point[1], "leader_utility": result.leader_utility,
                             "converged": result.converged, "total_resources": result.total_resources})

    surface = pd.DataFrame(rows)
    converged = surface[surface["converged"]]
    if converged.empty:
        argmax = converged
    else:
        argmax = converged.loc[[converged["leader_utility"].idxmax()]]
    return surface, argmax


def trajectory_frame(config, result):
    rows = []
    for sweep, allocation in enumerate(result.trajectory):
        for follower, values in zip(config.followers, allocation):
            row = {"sweep": sweep, "follower_id": follower.id}
            row.update(zip(shard_columns("r", config), values))
            row["total"] = values.sum()
            rows.append(row)
    return pd.DataFrame(rows)


def reproduce_figure(figure, output_dir, config=None, grid_points=DEFAULT_GRID_POINTS, workers=1,
                     show_progress=True):
    """Write the CSV data behind one of the four experiment figures; returns the written paths."""
    if figure not in FIGURES:
        raise ValueError(f"figure must be one of {FIGURES}, got {figure}")
    if config is None:
        config = ScenarioConfig.from_file(ScenarioConfig.figure_scenario_path(figure))
    logging.info(f"Reproducing figure {figure} into {output_dir}")

    if figure == 2:
        surface, argmax = follower_surface(config, grid_points)
        return [write_csv(surface, output_dir, "figure2_surface.csv"),
                write_csv(argmax, output_dir, "figure2_argmax.csv")]

    if figure == 3:
        if config.payments is None:
            raise ScenarioError("figure 3 needs fixed 'payments' in the scenario")
        result = solve_followers_equilibrium(config, config.payments, record_trajectory=True)
        return [write_csv(trajectory_frame(config, result), output_dir, "figure3_trajectory.csv")]

    surface, argmax = leader_surface(config, grid_points, workers, show_progress)
    search = algorithm1_search(config)
    return [write_csv(surface, output_dir, f"figure{figure}_surface.csv"),
            write_csv(argmax, output_dir, f"figure{figure}_argmax.csv"),
            write_csv(trace_frame(config, search), output_dir, f"figure{figure}_search.csv")]
