"""Flat key-value experiment configuration.

Config files are plain text, one ``key = value`` per line, ``#`` starts a
comment. Unknown keys are rejected. Values are typed per key; lists are
comma separated. The parsed config is validated against the simulation
preconditions before any computation starts, and every problem is
reported with its field name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

from .channel import Scenario
from .costs import ACCOUNTINGS, CostParams
from .tree import ALGORITHMS, TreeTopology


class ConfigError(Exception):
    """Invalid experiment configuration; message lists field-level issues."""


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_float_list(text: str) -> tuple:
    return tuple(float(part) for part in text.split(",") if part.strip())


@dataclass
class ExperimentConfig:
    """Everything one experiment run needs, with sensible defaults.

    Defaults reproduce the standard simulation scenario: a 1.2 m square
    surface at 4 GHz in front of a 10 x 10 x 3 m user volume with 64
    users. Panel output dimensionality comes from ``panel_outputs`` or,
    when that is unset, from ``beta_p``. ``beta_b`` gives the per-level
    reduction factors (a single value is replicated); with
    ``cdsp_dim_k`` the top level's output is forced to K.
    """

    # scenario
    lis_width_m: float = 1.2
    lis_height_m: float = 1.2
    volume_depth_m: float = 10.0
    volume_width_m: float = 10.0
    volume_height_m: float = 3.0
    standoff_offset_m: float = 0.0
    carrier_hz: float = 4e9
    num_users: int = 64
    snr_rho: float = 10.0
    antenna_spacing: float | None = None
    # topology
    panel_antennas: int = 16
    panel_outputs: int | None = None
    beta_p: float | None = None
    beta_b: tuple = (1.0,)
    cdsp_dim_k: bool = False
    # algorithm
    algorithm: str = "iic"
    passes: int = 1
    # execution
    num_realizations: int = 100
    seed: int = 0
    workers: int | None = None
    out: str = "results.csv"
    accounting: str = "all-levels"
    # sweeps
    sweep: str = "none"
    snr_db_start: float = -30.0
    snr_db_stop: float = 30.0
    snr_db_step: float = 5.0
    beta_p_grid: tuple | None = None
    beta_b1_grid: tuple | None = None
    size_grid_m: tuple | None = None
    # cost model
    bandwidth_hz: float = 100e6
    bit_width: int = 12
    num_prb: int = 275
    alpha: float = 0.1
    clock_period_s: float = 1e-9
    num_proc: int = 100
    num_paral: int = 100
    link_latency_local_s: float = 100e-9
    link_latency_global_s: float = 300e-9
    chain_panels: int | None = None


_PARSERS = {
    float: float,
    int: int,
    str: lambda s: s,
    bool: _parse_bool,
}

# key -> (attribute, parser); attribute types follow the dataclass fields
_KEY_TYPES = {}
for f in fields(ExperimentConfig):
    t = f.type
    if t in ("float", "float | None"):
        _KEY_TYPES[f.name] = float
    elif t in ("int", "int | None"):
        _KEY_TYPES[f.name] = int
    elif t == "bool":
        _KEY_TYPES[f.name] = bool
    elif t == "str":
        _KEY_TYPES[f.name] = str
    elif t in ("tuple", "tuple | None"):
        _KEY_TYPES[f.name] = "float_list"
    else:  # pragma: no cover - guards against new unhandled field types
        raise TypeError(f"unhandled config field type {t!r} for {f.name}")


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse config text; raises ConfigError listing all problems found."""
    values = {}
    errors = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEY_TYPES:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in values:
            errors.append(f"line {lineno}: duplicate key {key!r}")
            continue
        kind = _KEY_TYPES[key]
        try:
            if kind == "float_list":
                values[key] = _parse_float_list(value)
            else:
                values[key] = _PARSERS[kind](value)
        except ValueError as exc:
            errors.append(f"{key}: {exc}")
    if errors:
        raise ConfigError("; ".join(errors))
    cfg = ExperimentConfig(**values)
    validate_config(cfg)
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def scenario_from_config(cfg: ExperimentConfig) -> Scenario:
    return Scenario(
        lis_width_m=cfg.lis_width_m,
        lis_height_m=cfg.lis_height_m,
        volume_depth_m=cfg.volume_depth_m,
        volume_width_m=cfg.volume_width_m,
        volume_height_m=cfg.volume_height_m,
        standoff_offset_m=cfg.standoff_offset_m,
        carrier_hz=cfg.carrier_hz,
        num_users=cfg.num_users,
        snr_rho=cfg.snr_rho,
        antenna_spacing=cfg.antenna_spacing,
    )


def _tree_depth(num_panels: int, arity: int = 4) -> int:
    levels = 0
    p = num_panels
    while p > 1 and p % arity == 0:
        p //= arity
        levels += 1
    if p != 1:
        raise ValueError(f"panel count {num_panels} is not a power of {arity}")
    return levels


def resolve_panel_outputs(cfg: ExperimentConfig) -> int:
    if cfg.panel_outputs is not None:
        return cfg.panel_outputs
    if cfg.beta_p is not None:
        return max(_round_half_up(cfg.beta_p * cfg.panel_antennas), 0)
    return 2


def topology_from_config(cfg: ExperimentConfig, scenario: Scenario) -> TreeTopology:
    """Build the tree topology implied by the config and scenario geometry."""
    m = scenario.num_antennas
    if m % cfg.panel_antennas != 0:
        raise ValueError(f"panel_antennas={cfg.panel_antennas} does not divide M={m}")
    num_panels = m // cfg.panel_antennas
    levels = _tree_depth(num_panels)
    np_out = resolve_panel_outputs(cfg)
    betas = cfg.beta_b
    if len(betas) == 1 and levels != 1:
        betas = betas * levels
    if len(betas) != levels:
        raise ValueError(f"beta_b needs 1 or {levels} entries, got {len(betas)}")
    node_outputs = []
    prev = np_out
    for beta in betas:
        nb = _round_half_up(beta * 4 * prev)
        node_outputs.append(nb)
        prev = nb
    if cfg.cdsp_dim_k and levels >= 1:
        node_outputs[-1] = cfg.num_users
    return TreeTopology(num_panels, cfg.panel_antennas, np_out, tuple(node_outputs))


def cost_params_from_config(cfg: ExperimentConfig) -> CostParams:
    return CostParams(
        num_users=cfg.num_users,
        bandwidth_hz=cfg.bandwidth_hz,
        bit_width=cfg.bit_width,
        num_prb=cfg.num_prb,
        alpha=cfg.alpha,
        clock_period_s=cfg.clock_period_s,
        num_proc=cfg.num_proc,
        num_paral=cfg.num_paral,
        link_latency_local_s=cfg.link_latency_local_s,
        link_latency_global_s=cfg.link_latency_global_s,
        chain_panels=cfg.chain_panels,
    )


def validate_config(cfg: ExperimentConfig) -> None:
    """Check the whole config against module preconditions.

    Raises ConfigError with one message per offending field. Sweep grids
    are validated structurally here; per-cell feasibility is decided (and
    marked) at run time.
    """
    errors = []
    scenario = None
    try:
        scenario = scenario_from_config(cfg)
    except ValueError as exc:
        errors.append(str(exc))
    if cfg.algorithm.lower() not in ALGORITHMS:
        errors.append(f"algorithm: must be one of {ALGORITHMS}, got {cfg.algorithm!r}")
    if cfg.accounting not in ACCOUNTINGS:
        errors.append(f"accounting: must be one of {ACCOUNTINGS}, got {cfg.accounting!r}")
    if cfg.passes < 1:
        errors.append("passes: must be >= 1")
    if cfg.num_realizations < 1:
        errors.append("num_realizations: must be >= 1")
    if cfg.seed < 0:
        errors.append("seed: must be >= 0")
    if cfg.workers is not None and cfg.workers < 1:
        errors.append("workers: must be >= 1")
    if cfg.sweep not in ("none", "snr", "beta", "size"):
        errors.append(f"sweep: must be none, snr, beta or size, got {cfg.sweep!r}")
    if cfg.panel_outputs is not None and cfg.beta_p is not None:
        errors.append("panel_outputs / beta_p: set at most one of them")
    if scenario is not None and cfg.sweep != "beta":
        try:
            topology_from_config(cfg, scenario)
        except ValueError as exc:
            errors.append(f"topology: {exc}")
    if cfg.sweep == "snr":
        if cfg.snr_db_step <= 0:
            errors.append("snr_db_step: must be > 0")
        if cfg.snr_db_stop < cfg.snr_db_start:
            errors.append("snr_db_stop: must be >= snr_db_start")
    if cfg.sweep == "beta":
        if not cfg.beta_p_grid:
            errors.append("beta_p_grid: required for sweep = beta")
        if not cfg.beta_b1_grid:
            errors.append("beta_b1_grid: required for sweep = beta")
        for name, grid in (("beta_p_grid", cfg.beta_p_grid), ("beta_b1_grid", cfg.beta_b1_grid)):
            for b in grid or ():
                if not 0.0 < b <= 1.0:
                    errors.append(f"{name}: entries must be in (0, 1], got {b}")
        if scenario is not None:
            m = scenario.num_antennas
            if m % cfg.panel_antennas == 0:
                try:
                    if _tree_depth(m // cfg.panel_antennas) < 2:
                        errors.append("sweep = beta needs a tree with at least 2 levels")
                except ValueError as exc:
                    errors.append(f"topology: {exc}")
    if cfg.sweep == "size" and not cfg.size_grid_m:
        errors.append("size_grid_m: required for sweep = size")
    try:
        cost_params_from_config(cfg)
    except ValueError as exc:
        errors.append(f"cost params: {exc}")
    if errors:
        raise ConfigError("; ".join(errors))
