import logging
import sys

import numpy as np
import pandas as pd

from shardgame.libs import experiments
from shardgame.libs.equilibrium_engine import (solve_followers_equilibrium, concavity_check, rosen_dsc_check,
                                               uniqueness_probe)
from shardgame.libs.experiments import write_csv
from shardgame.libs.follower_solver import best_response_with_multiplier, projected_gradient_oracle
from shardgame.libs.leader_optimizer import algorithm1_search, alpha_sweep, analytic_interior_benchmark
from shardgame.libs.payout_sim import simulate_pay_per_share
from shardgame.libs.pretty_printing import (pretty_print_equilibrium, pretty_print_search, pretty_print_checks,
                                            pretty_print_ledger, pretty_print_alpha_sweep)
from shardgame.libs.scenario_config import ScenarioConfig, ScenarioError
from shardgame.libs.utils import verify_output_dir

EXIT_OK = 0
EXIT_VALIDATION_ERROR = 1
EXIT_NOT_CONVERGED = 2
EXIT_IO_ERROR = 3

COMMANDS = ("equilibrium", "stackelberg", "verify", "payout", "figure", "alpha-sweep", "best-response")

CONCAVITY_SAMPLES = 100
ROSEN_SAMPLES = 100
UNIQUENESS_SEEDS = 10


class NonConvergenceError(RuntimeError):
    pass


def execute_subcommand(args):
    exit_code = run_scenario(args.scenario, args.subcommand, args.out,
                             seed=args.seed,
                             figure=getattr(args, "figure", None),
                             grid_points=getattr(args, "grid_points", experiments.DEFAULT_GRID_POINTS),
                             workers=args.workers,
                             show_progress=not args.no_progress)
    if exit_code != EXIT_OK:
        sys.exit(exit_code)


def run_scenario(scenario_path, command, output_dir, seed=None, figure=None,
                 grid_points=experiments.DEFAULT_GRID_POINTS, workers=1, show_progress=True):
    try:
        output_dir = verify_output_dir(output_dir)
        if command == "figure":
            if scenario_path is None:
                config = None
            else:
                config = _load(scenario_path, seed)
            experiments.reproduce_figure(figure, output_dir, config, grid_points, workers, show_progress)
            return EXIT_OK

        if scenario_path is None:
            raise ScenarioError(f"the {command} command needs --scenario")
        config = _load(scenario_path, seed)

        if command == "equilibrium":
            run_equilibrium(config, output_dir)
        elif command == "stackelberg":
            run_stackelberg(config, output_dir)
        elif command == "verify":
            run_verify(config, output_dir, workers)
        elif command == "payout":
            run_payout(config, output_dir, workers)
        elif command == "alpha-sweep":
            run_alpha_sweep(config, output_dir, workers)
        elif command == "best-response":
            run_best_response(config, output_dir)
        else:
            raise ValueError(f"unknown command {command!r}, expected one of {COMMANDS}")
    except NonConvergenceError as error:
        logging.error(f"The solver did not converge: {error}")
        return EXIT_NOT_CONVERGED
    except RuntimeError as error:
        logging.error(f"Numerical failure: {error}")
        return EXIT_NOT_CONVERGED
    except ValueError as error:
        logging.error(f"Invalid scenario: {error}")
        return EXIT_VALIDATION_ERROR
    except OSError as error:
        logging.error(f"Could not read the scenario or write the reports: {error}")
        return EXIT_IO_ERROR
    return EXIT_OK


def _load(scenario_path, seed):
    config = ScenarioConfig.from_file(scenario_path)
    return config if seed is None else config.with_seed(seed)


def _fixed_payments(config, command):
    if config.payments is None:
        raise ScenarioError(f"the {command} command needs fixed 'payments' in the scenario")
    return config.payments


def _converged_equilibrium(config, command):
    result = solve_followers_equilibrium(config, _fixed_payments(config, command))
    if not result.converged:
        raise NonConvergenceError(f"no equilibrium within {config.max_sweeps} sweeps "
                                  f"(residual {result.residual:.3g})")
    return result


def run_equilibrium(config, output_dir):
    result = solve_followers_equilibrium(config, _fixed_payments(config, "equilibrium"))
    write_csv(experiments.allocation_frame(config, result), output_dir, "equilibrium_allocation.csv")
    write_csv(experiments.equilibrium_summary_frame(config, result), output_dir, "equilibrium_summary.csv")
    pretty_print_equilibrium(config, result)
    if not result.converged:
        raise NonConvergenceError(f"no equilibrium within {config.max_sweeps} sweeps "
                                  f"(residual {result.residual:.3g})")


def run_stackelberg(config, output_dir):
    search = algorithm1_search(config)
    write_csv(experiments.trace_frame(config, search), output_dir, "stackelberg_trace.csv")
    if search.equilibrium is None:
        raise NonConvergenceError("no payment vector on the search path reached a followers' equilibrium")
    write_csv(experiments.allocation_frame(config, search.equilibrium), output_dir, "stackelberg_allocation.csv")
    pretty_print_search(config, search)

    benchmark = analytic_interior_benchmark(config.shards, config.followers)
    if benchmark.applicable:
        logging.info(f"Interior benchmark: P = {benchmark.payments.tolist()}, "
                     f"X = {np.round(benchmark.shard_totals, 6).tolist()}, U_L = {benchmark.leader_utility:.4f}")
    else:
        logging.info(f"Interior benchmark not applicable: {benchmark.reason}")


def run_verify(config, output_dir, workers=1):
    payments = _fixed_payments(config, "verify")
    checks = [concavity_check(config, payments, CONCAVITY_SAMPLES),
              rosen_dsc_check(config, payments, num_samples=ROSEN_SAMPLES)]
    uniqueness = uniqueness_probe(config, payments, UNIQUENESS_SEEDS, workers)

    rows = [{"check": check.name, "value": check.max_eigenvalue, "passed": check.passed,
             "detail": "degenerate" if check.degenerate else f"{check.samples} samples"} for check in checks]
    rows.append({"check": "uniqueness", "value": uniqueness.max_deviation, "passed": uniqueness.non_converged == 0,
                 "detail": f"{uniqueness.runs} seeds, {uniqueness.non_converged} not converged"})
    write_csv(pd.DataFrame(rows), output_dir, "verification.csv")
    pretty_print_checks(checks, uniqueness)


def _single_follower_profile(config):
    inp = experiments.single_follower_input(config)
    row = best_response_with_multiplier(inp).allocation
    return np.vstack([row, inp.opponents_totals])


def run_payout(config, output_dir, workers=1):
    if config.opponents_totals is not None:
        allocation = _single_follower_profile(config)
    else:
        allocation = _converged_equilibrium(config, "payout").allocation
    ledger = simulate_pay_per_share(allocation, config.payments, config.shares_per_unit, config.payout_rounds,
                                    config.rng_seed, workers=workers)
    write_csv(experiments.ledger_frame(config, ledger), output_dir, "payout_ledger.csv")
    pretty_print_ledger(config, ledger)


def run_alpha_sweep(config, output_dir, workers=1):
    points = alpha_sweep(config, workers=workers)
    write_csv(experiments.alpha_sweep_frame(config, points), output_dir, "alpha_sweep.csv")
    pretty_print_alpha_sweep(points)
    if any(point.search.equilibrium is None for point in points):
        raise NonConvergenceError("some alpha factors never reached a followers' equilibrium")


def run_best_response(config, output_dir):
    inp = experiments.single_follower_input(config)
    response = best_response_with_multiplier(inp)
    rows = [{"method": "closed_form", **dict(zip(experiments.shard_columns("r", config), response.allocation)),
             "utility": inp.utility(response.allocation), "converged": True}]
    if np.all(inp.opponents_totals > 0):
        oracle = projected_gradient_oracle(inp)
        rows.append({"method": "projected_gradient",
                     **dict(zip(experiments.shard_columns("r", config), oracle.allocation)),
                     "utility": inp.utility(oracle.allocation), "converged": oracle.converged})
    write_csv(pd.DataFrame(rows), output_dir, "best_response.csv")
    for row in rows:
        logging.info(f"{row['method']:20} utility {row['utility']:.4f}")
    logging.info(f"Budget slack = {inp.capacity - response.total:.4f} (multiplier {response.multiplier:.6g})")
