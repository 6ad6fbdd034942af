#!/usr/bin/env python3

import argparse
import logging
import logging.handlers
import os
import platform
import sys

from os.path import join, abspath, dirname

import psutil

from shardgame.libs.commands import execute_subcommand
from shardgame.libs.experiments import DEFAULT_GRID_POINTS, FIGURES
from shardgame.libs.utils import default_workers

base_dir = abspath(dirname(__file__))
VERSION = open(join(base_dir, 'VERSION')).read().strip()
logging_level = logging.INFO


def main():
    parser = argparse.ArgumentParser(description="Stackelberg equilibrium of the shard incentive game between a "
                                                 "service provider and its users. Version: " + VERSION)
    parser.add_argument("-d", "--debug", action="store_true", help="Extra debugging messages")
    parser.add_argument("-v", "--version", action="store_true", help="Displays the version number. Please note, "
                                                                     "this aborts any additional actions.")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", "-s", default=None,
                        help="JSON scenario file with followers, shards and solver settings")
    common.add_argument("--out", "-o", default=os.getcwd(),
                        help="Output directory. The CSV reports will be saved into this directory. Must exist. "
                             "Default: the current working directory.")
    common.add_argument("--seed", type=int, default=None, help="Override the scenario's random seed")
    common.add_argument("--workers", "-w", type=int, default=default_workers(),
                        help="Number of threads for independent solves (default: physical CPU count)")
    common.add_argument("--no-progress", action="store_true", help="Do not show progress bars")

    subparsers = parser.add_subparsers(dest="subcommand", help="subcommands")

    subparsers.add_parser("equilibrium", parents=[common],
                          help="Followers' equilibrium at the scenario's fixed payments")
    subparsers.add_parser("stackelberg", parents=[common],
                          help="Search the leader's payments for the Stackelberg equilibrium")
    subparsers.add_parser("verify", parents=[common],
                          help="Numerical concavity, diagonal strict concavity and uniqueness checks")
    subparsers.add_parser("payout", parents=[common],
                          help="Simulate pay-per-share payouts at the equilibrium")
    subparsers.add_parser("alpha-sweep", parents=[common],
                          help="Repeat the leader search with the shard priorities scaled")
    subparsers.add_parser("best-response", parents=[common],
                          help="One follower's best response against fixed opponents")

    parser_figure = subparsers.add_parser("figure", parents=[common],
                                          help="Reproduce the data behind one of the experiment figures")
    parser_figure.add_argument("--figure", "-f", type=int, required=True, choices=FIGURES,
                               help="Figure to reproduce")
    parser_figure.add_argument("--grid-points", "-g", type=int, default=DEFAULT_GRID_POINTS,
                               help=f"Points per axis of the utility surfaces (default: {DEFAULT_GRID_POINTS})")

    args = parser.parse_args()
    if args.debug:
        global logging_level
        logging_level = logging.DEBUG

    logging.basicConfig(level=logging_level,
                        format='%(asctime)s %(message)s',
                        datefmt='[%Y-%m-%d %H:%M:%S %z]',
                        handlers=[
                            logging.handlers.RotatingFileHandler("shardgame_output.log",
                                                                 maxBytes=5 * 1024 * 1024,
                                                                 backupCount=1),
                            logging.StreamHandler(sys.stdout)
                        ])

    logging.info("")
    logging.info(f"shardgame - shard incentive game solver version {VERSION}")

    if args.version:
        sys.exit()

    if args.subcommand is None:
        parser.print_help()
        sys.exit(1)

    logging.info(f"Python version : {platform.python_version()}")
    logging.info(f"OS version : {platform.system()} {platform.version()}")
    logging.info(f"CPUs : {psutil.cpu_count(logical=False)} physical, {psutil.cpu_count()} logical")
    logging.info(f"Available memory : {psutil.virtual_memory().available / (2 ** 30):.2f} GiB")

    execute_subcommand(args)


if __name__ == "__main__":
    main()
