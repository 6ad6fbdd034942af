import json
import logging
import os

import numpy as np

from shardgame.libs.game_core import FollowerSpec, ShardSpec, LeaderVariant


class ScenarioError(ValueError):
    """A scenario file or scenario object that does not describe a valid game."""


class ScenarioConfig:
    DEFAULT_EPSILON_GRAIN = 1e-6
    DEFAULT_RELATIVE_TOLERANCE = 1e-6
    DEFAULT_MAX_SWEEPS = 1000
    DEFAULT_PAYMENT_GRID_MAX = 100
    DEFAULT_SHARES_PER_UNIT = 10.0
    DEFAULT_PAYOUT_ROUNDS = 100_000
    DEFAULT_ALPHA_FACTORS = (1.0, 1.5, 2.0, 2.5, 3.0)

    def __init__(self, followers, shards, leader_variant=LeaderVariant.LOG,
                 epsilon_grain=DEFAULT_EPSILON_GRAIN,
                 br_tolerance=None,
                 max_sweeps=DEFAULT_MAX_SWEEPS,
                 payment_grid_max=DEFAULT_PAYMENT_GRID_MAX,
                 rng_seed=0,
                 payments=None,
                 opponents_totals=None,
                 shares_per_unit=DEFAULT_SHARES_PER_UNIT,
                 payout_rounds=DEFAULT_PAYOUT_ROUNDS,
                 alpha_factors=DEFAULT_ALPHA_FACTORS):
        self.followers = list(followers)
        self.shards = list(shards)
        self.leader_variant = LeaderVariant(leader_variant)
        self.epsilon_grain = epsilon_grain
        if br_tolerance is None and self.followers:
            br_tolerance = self.DEFAULT_RELATIVE_TOLERANCE * max(f.capacity for f in self.followers)
        self.br_tolerance = br_tolerance
        self.max_sweeps = max_sweeps
        self.payment_grid_max = payment_grid_max
        self.rng_seed = rng_seed
        self.payments = None if payments is None else np.asarray(payments, dtype=float)
        self.opponents_totals = None if opponents_totals is None else np.asarray(opponents_totals, dtype=float)
        self.shares_per_unit = shares_per_unit
        self.payout_rounds = payout_rounds
        self.alpha_factors = tuple(alpha_factors)
        self.validate()

    @property
    def num_followers(self):
        return len(self.followers)

    @property
    def num_shards(self):
        return len(self.shards)

    @property
    def capacities(self):
        return np.array([f.capacity for f in self.followers], dtype=float)

    @property
    def unit_costs(self):
        return np.array([f.unit_cost for f in self.followers], dtype=float)

    @property
    def alphas(self):
        return np.array([s.alpha for s in self.shards], dtype=float)

    def validate(self):
        if not self.followers:
            raise ScenarioError("followers: at least one follower is required")
        if not self.shards:
            raise ScenarioError("shards: at least one shard is required")
        _check_unique("followers", [f.id for f in self.followers])
        _check_unique("shards", [s.id for s in self.shards])
        for name in ("epsilon_grain", "br_tolerance", "shares_per_unit"):
            value = getattr(self, name)
            if not value > 0:
                raise ScenarioError(f"{name} must be > 0, got {value}")
        for name in ("max_sweeps", "payment_grid_max", "payout_rounds"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ScenarioError(f"{name} must be a positive integer, got {value}")
            setattr(self, name, int(value))
        if any(not factor > 0 for factor in self.alpha_factors):
            raise ScenarioError(f"alpha_factors must all be > 0, got {list(self.alpha_factors)}")
        for name in ("payments", "opponents_totals"):
            vector = getattr(self, name)
            if vector is None:
                continue
            if vector.shape != (self.num_shards,):
                raise ScenarioError(f"{name} must list {self.num_shards} values (one per shard), "
                                    f"got {vector.tolist()}")
            if np.any(vector < 0):
                raise ScenarioError(f"{name} must be non-negative, got {vector.tolist()}")

    def replace(self, **changes):
        settings = dict(followers=self.followers, shards=self.shards, leader_variant=self.leader_variant,
                        epsilon_grain=self.epsilon_grain, br_tolerance=self.br_tolerance,
                        max_sweeps=self.max_sweeps, payment_grid_max=self.payment_grid_max,
                        rng_seed=self.rng_seed, payments=self.payments, opponents_totals=self.opponents_totals,
                        shares_per_unit=self.shares_per_unit, payout_rounds=self.payout_rounds,
                        alpha_factors=self.alpha_factors)
        settings.update(changes)
        return ScenarioConfig(**settings)

    def with_seed(self, seed):
        return self.replace(rng_seed=seed)

    def with_alphas(self, alphas):
        shards = [ShardSpec(shard.id, float(alpha)) for shard, alpha in zip(self.shards, alphas)]
        return self.replace(shards=shards)

    @staticmethod
    def scenarios_dir():
        root_dir = os.path.split(os.path.realpath(__file__))[0]
        return os.path.join(root_dir, "../config", "scenarios")

    @staticmethod
    def figure_scenario_path(figure):
        return os.path.join(ScenarioConfig.scenarios_dir(), f"figure{figure}.json")

    @staticmethod
    def from_file(filepath):
        """Load and validate a scenario from a JSON file"""
        filepath = os.path.expanduser(filepath)
        if not os.path.exists(filepath):
            raise FileNotFoundError(f"{filepath} does not exist")

        with open(filepath, encoding="utf-8") as f:
            text = f.read()

        try:
            document = json.loads(text)
        except ValueError as error:
            raise ScenarioError(f"{filepath}: invalid JSON at line {error.lineno}, column {error.colno}: "
                                f"{error.msg}") from error

        config = ScenarioConfig.from_dict(document, source=filepath)
        logging.debug(f"Loaded scenario {filepath}: {config.num_followers} followers, {config.num_shards} shards")
        return config

    @staticmethod
    def from_dict(document, source="scenario"):
        if not isinstance(document, dict):
            raise ScenarioError(f"{source}: top level must be an object")

        def section(key):
            value = document.get(key, {})
            if not isinstance(value, dict):
                raise ScenarioError(f"{source}: '{key}' must be an object")
            return value

        def vector(key):
            value = document.get(key)
            if value is None:
                return None
            if not isinstance(value, list) or not all(_is_number(v) for v in value):
                raise ScenarioError(f"{source}: '{key}' must be a list of numbers")
            return value

        followers = [_parse_follower(source, i, entry) for i, entry in enumerate(_list(source, document, "followers"))]
        shards = [_parse_shard(source, i, entry) for i, entry in enumerate(_list(source, document, "shards"))]

        solver = section("solver")
        leader = section("leader")
        payout = section("payout")

        variant = leader.get("variant", LeaderVariant.LOG.value)
        if variant not in [v.value for v in LeaderVariant]:
            raise ScenarioError(f"{source}: leader.variant must be 'log' or 'linear', got {variant!r}")

        seed = document.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ScenarioError(f"{source}: 'seed' must be an integer, got {seed!r}")

        alpha_factors = vector("alpha_factors")

        try:
            return ScenarioConfig(
                followers, shards,
                leader_variant=variant,
                epsilon_grain=solver.get("epsilon_grain", ScenarioConfig.DEFAULT_EPSILON_GRAIN),
                br_tolerance=solver.get("br_tolerance"),
                max_sweeps=solver.get("max_sweeps", ScenarioConfig.DEFAULT_MAX_SWEEPS),
                payment_grid_max=leader.get("payment_grid_max", ScenarioConfig.DEFAULT_PAYMENT_GRID_MAX),
                rng_seed=seed,
                payments=vector("payments"),
                opponents_totals=vector("opponents_totals"),
                shares_per_unit=payout.get("shares_per_unit", ScenarioConfig.DEFAULT_SHARES_PER_UNIT),
                payout_rounds=payout.get("rounds", ScenarioConfig.DEFAULT_PAYOUT_ROUNDS),
                alpha_factors=alpha_factors if alpha_factors is not None else ScenarioConfig.DEFAULT_ALPHA_FACTORS)
        except TypeError as error:
            raise ScenarioError(f"{source}: {error}") from error
        except ScenarioError as error:
            raise ScenarioError(f"{source}: {error}") from error


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _list(source, document, key):
    entries = document.get(key)
    if not isinstance(entries, list) or not entries:
        raise ScenarioError(f"{source}: '{key}' must be a non-empty list")
    return entries


def _check_unique(key, ids):
    seen = set()
    for item_id in ids:
        if item_id in seen:
            raise ScenarioError(f"{key}: duplicate id {item_id!r}")
        seen.add(item_id)


def _parse_follower(source, index, entry):
    where = f"{source}: followers[{index}]"
    if not isinstance(entry, dict):
        raise ScenarioError(f"{where} must be an object")
    follower_id = str(entry.get("id", index + 1))
    where += f" (id '{follower_id}')"
    for key in ("capacity", "unit_cost"):
        if key not in entry:
            raise ScenarioError(f"{where} does not contain '{key}' field")
        if not _is_number(entry[key]):
            raise ScenarioError(f"{where}: {key} must be a number, got {entry[key]!r}")
        if not entry[key] > 0:
            raise ScenarioError(f"{where}: {key} must be > 0, got {entry[key]}")
    return FollowerSpec(follower_id, float(entry["capacity"]), float(entry["unit_cost"]))


def _parse_shard(source, index, entry):
    where = f"{source}: shards[{index}]"
    if not isinstance(entry, dict):
        raise ScenarioError(f"{where} must be an object")
    shard_id = str(entry.get("id", index + 1))
    where += f" (id '{shard_id}')"
    if "alpha" not in entry:
        raise ScenarioError(f"{where} does not contain 'alpha' field")
    if not _is_number(entry["alpha"]) or not entry["alpha"] > 0:
        raise ScenarioError(f"{where}: alpha must be a number > 0, got {entry['alpha']!r}")
    return ShardSpec(shard_id, float(entry["alpha"]))
