import logging


def pretty_print_equilibrium(config, result):
    """Print a table of the followers' allocation at an equilibrium"""
    shard_headers = [f"r[{shard.id}]" for shard in config.shards]
    format_string = "{:15} {:>10} {:>8} " + "{:>12} " * len(shard_headers) + "{:>12} {:>12} {:>5}"

    logging.info(format_string.format("Follower", "Capacity", "Cost", *shard_headers, "Total", "Utility", "Full"))
    for follower, row, utility, full in zip(config.followers, result.allocation, result.follower_utilities,
                                            result.at_capacity):
        logging.info(format_string.format(follower.id, f"{follower.capacity:g}", f"{follower.unit_cost:g}",
                                          *[f"{value:.4f}" for value in row], f"{row.sum():.4f}",
                                          f"{utility:.4f}", "yes" if full else "no"))
    logging.info('-' * 80)
    status = "converged" if result.converged else "NOT converged"
    logging.info(f"Payments {result.payments.tolist()}: {status} after {result.sweeps} sweeps "
                 f"(residual {result.residual:.3g})")
    logging.info(f"Leader utility ({config.leader_variant.value}) = {result.leader_utility:.4f}")


def pretty_print_search(config, search):
    logging.info(f"Leader search evaluated {search.evaluations} payment vectors")
    logging.info(f"Best payments P* = {search.best_payments.tolist()}")
    logging.info(f"Best leader utility U_L* = {search.best_utility:.4f}")
    if search.equilibrium is not None:
        logging.info(f"Total resources attracted = {search.equilibrium.total_resources:.4f}")
        pretty_print_equilibrium(config, search.equilibrium)


def pretty_print_checks(checks, uniqueness):
    format_string = "{:20} {:>16} {:>8}"
    logging.info(format_string.format("Check", "Value", "Passed"))
    for check in checks:
        logging.info(format_string.format(check.name, f"{check.max_eigenvalue:.6g}", str(check.passed)))
    logging.info(format_string.format("uniqueness", f"{uniqueness.max_deviation:.6g}",
                                      str(uniqueness.non_converged == 0)))


def pretty_print_ledger(config, ledger):
    logging.info(f"Pay-per-share payouts over {config.payout_rounds} rounds "
                 f"({config.shares_per_unit:g} shares per resource unit)")
    logging.info(f"Worst relative error versus proportional payoff: {ledger.max_relative_error:.4%}")
    logging.info(f"Worst per-round prize conservation error: {ledger.max_conservation_error:.3g}")


def pretty_print_alpha_sweep(points):
    format_string = "{:>8} {:>24} {:>24} {:>12} {:>16}"
    logging.info(format_string.format("Factor", "Alpha", "P*", "U_L*", "Resources"))
    for point in points:
        logging.info(format_string.format(f"{point.factor:g}", str([round(a, 4) for a in point.alphas]),
                                          str(point.search.best_payments.tolist()),
                                          f"{point.search.best_utility:.4f}", f"{point.total_resources:.4f}"))
