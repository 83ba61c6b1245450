"""Experiment driver: Monte Carlo runs, sweeps, and the cost table report.

Per realization the driver samples users, builds the channel, formulates a
plan and evaluates capacities and bounds. Output is a CSV with a fixed
schema plus a JSON sidecar holding the cost reports under both accounting
conventions. Files are written atomically and only on success; reruns with
the same config and seed are byte-identical. Realizations can execute in a
process pool; row order is fixed by (sweep point, realization id) no matter
how work is scheduled.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .capacity import capacity_of_plan
from .channel import Scenario, build_channel, sample_users
from .config import (
    ConfigError,
    ExperimentConfig,
    cost_params_from_config,
    scenario_from_config,
    topology_from_config,
)
from .costs import ACCOUNTINGS, CostParams, evaluate_costs
from .tree import TreeTopology, formulate_lis

CSV_COLUMNS = (
    "realization",
    "rho_db",
    "beta_p",
    "beta_b1",
    "c_antenna",
    "c_z",
    "c_cdsp",
    "c_ub1",
    "c_ub2",
    "normalized",
)

AGGREGATE_ID = -1

# published reference costs for the 1024-antenna, 16-panel, 50-user design
# point: (algorithm, metric) -> value in the unit used by CostReport
TABLE1_PUBLISHED = {
    ("iic", "c_form_mac"): 3.1e9,
    ("rmf", "c_form_mac"): 0.02e9,
    ("iic", "c_filt_mac_s"): 2.3e12,
    ("rmf", "c_filt_mac_s"): 2.3e12,
    ("iic", "r_inter_bps"): 1.0e12,
    ("rmf", "r_inter_bps"): 1.0e12,
    ("iic", "r_intra_bps"): 5.4e12,
    ("rmf", "r_intra_bps"): 5.4e12,
    ("iic", "l_form_s"): 110.2e-6,
    ("rmf", "l_form_s"): 1.2e-6,
    ("iic", "l_filt_s"): 1.0e-6,
    ("rmf", "l_filt_s"): 1.0e-6,
}


@dataclass(frozen=True)
class ResultRow:
    """One CSV row; ``realization`` is -1 for per-point averages."""

    realization: int
    rho_db: float
    beta_p: float
    beta_b1: float
    c_antenna: float
    c_z: float
    c_cdsp: float
    c_ub1: float
    c_ub2: float
    normalized: float

    def as_csv(self) -> str:
        vals = [str(self.realization)] + [
            str(float(getattr(self, name))) for name in CSV_COLUMNS[1:]
        ]
        return ",".join(vals)


@dataclass(frozen=True)
class Task:
    """One (sweep point, topology, algorithm, rho) evaluation."""

    rho_db: float
    beta_p: float
    beta_b1: float
    topology: TreeTopology
    algorithm: str
    passes: int
    rho: float


def realization_seed(seed: int, realization: int) -> int:
    """Deterministic per-realization seed derived from the master seed."""
    return int(np.random.SeedSequence([int(seed), int(realization)]).generate_state(1, np.uint64)[0])


def _realize_rows(args) -> list:
    scenario, num_panels, tasks, seed, realization = args
    users = sample_users(scenario, realization_seed(seed, realization))
    channel = build_channel(scenario, users, num_panels)
    out = []
    for idx, task in enumerate(tasks):
        plan = formulate_lis(channel, task.topology, task.algorithm, task.rho, task.passes)
        rep = capacity_of_plan(plan, task.rho)
        out.append(
            (
                idx,
                realization,
                rep.c_antenna,
                rep.c_z,
                rep.c_cdsp,
                rep.c_ub1,
                rep.c_ub2,
                rep.normalized,
            )
        )
    return out


def _run_tasks(
    scenario: Scenario,
    num_panels: int,
    tasks: list,
    seed: int,
    num_realizations: int,
    workers: int,
) -> dict:
    """Evaluate all tasks over all realizations; returns {task_idx: [tuples]}."""
    payloads = [
        (scenario, num_panels, tuple(tasks), seed, r) for r in range(num_realizations)
    ]
    if workers > 1 and num_realizations > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_realize_rows, payloads))
    else:
        chunks = [_realize_rows(p) for p in payloads]
    by_task: dict = {i: [] for i in range(len(tasks))}
    for chunk in chunks:
        for tup in chunk:
            by_task[tup[0]].append(tup)
    for rows in by_task.values():
        rows.sort(key=lambda t: t[1])
    return by_task


def _rows_for_task(task: Task, tuples) -> list:
    rows = [
        ResultRow(r, task.rho_db, task.beta_p, task.beta_b1, ca, cz, cc, u1, u2, nm)
        for (_, r, ca, cz, cc, u1, u2, nm) in tuples
    ]
    if rows:
        means = [
            float(np.mean([getattr(row, name) for row in rows])) for name in CSV_COLUMNS[4:]
        ]
        rows.append(
            ResultRow(AGGREGATE_ID, task.rho_db, task.beta_p, task.beta_b1, *means)
        )
    return rows


def infeasible_row(rho_db: float, beta_p: float, beta_b1: float) -> ResultRow:
    """Marker row for sweep cells that cannot be realized."""
    nan = float("nan")
    return ResultRow(AGGREGATE_ID, rho_db, beta_p, beta_b1, nan, nan, nan, nan, nan, nan)


def write_csv(path, rows) -> None:
    """Atomic CSV write; nothing is left behind on failure."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(row.as_csv() + "\n")
    os.replace(tmp, path)


def _cost_entries(topologies, params: CostParams, algorithms) -> list:
    entries = []
    for label, topo in topologies:
        for algorithm in algorithms:
            for accounting in ACCOUNTINGS:
                rep = evaluate_costs(topo, params, algorithm, accounting)
                entry = {"point": label}
                entry.update(dataclasses.asdict(rep))
                entry["l_tot_s"] = rep.l_tot_s
                entries.append(entry)
    return entries


def write_costs_json(path, entries) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(entries, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def _sidecar_path(out_path: str, suffix: str) -> str:
    stem, _ = os.path.splitext(out_path)
    return f"{stem}{suffix}"


def _topology_coords(topo: TreeTopology) -> tuple:
    beta_b1 = topo.beta_b[0] if topo.num_levels else float("nan")
    return topo.beta_p, beta_b1


def _default_workers(cfg: ExperimentConfig) -> int:
    if cfg.workers is not None:
        return cfg.workers
    env = os.environ.get("LISIM_WORKERS")
    if env:
        try:
            return max(int(env), 1)
        except ValueError:
            raise ConfigError(f"LISIM_WORKERS: expected an integer, got {env!r}")
    return 1


def run(cfg: ExperimentConfig) -> list:
    """Single-point experiment; writes the CSV and cost sidecar."""
    scenario = scenario_from_config(cfg)
    topo = topology_from_config(cfg, scenario)
    beta_p, beta_b1 = _topology_coords(topo)
    rho_db = 10.0 * math.log10(cfg.snr_rho)
    task = Task(rho_db, beta_p, beta_b1, topo, cfg.algorithm.lower(), cfg.passes, cfg.snr_rho)
    by_task = _run_tasks(
        scenario, topo.num_panels, [task], cfg.seed, cfg.num_realizations, _default_workers(cfg)
    )
    rows = _rows_for_task(task, by_task[0])
    write_csv(cfg.out, rows)
    params = cost_params_from_config(cfg)
    entries = _cost_entries([("run", topo)], params, [cfg.algorithm.lower()])
    write_costs_json(_sidecar_path(cfg.out, "_costs.json"), entries)
    return rows


def sweep_snr(cfg: ExperimentConfig) -> list:
    """SNR sweep over a dB grid with shared channel realizations."""
    scenario = scenario_from_config(cfg)
    topo = topology_from_config(cfg, scenario)
    beta_p, beta_b1 = _topology_coords(topo)
    steps = int(round((cfg.snr_db_stop - cfg.snr_db_start) / cfg.snr_db_step))
    dbs = [cfg.snr_db_start + i * cfg.snr_db_step for i in range(steps + 1)]
    tasks = [
        Task(db, beta_p, beta_b1, topo, cfg.algorithm.lower(), cfg.passes, 10.0 ** (db / 10.0))
        for db in dbs
    ]
    by_task = _run_tasks(
        scenario, topo.num_panels, tasks, cfg.seed, cfg.num_realizations, _default_workers(cfg)
    )
    rows = []
    for idx, task in enumerate(tasks):
        rows.extend(_rows_for_task(task, by_task[idx]))
    write_csv(cfg.out, rows)
    params = cost_params_from_config(cfg)
    entries = _cost_entries([("sweep-snr", topo)], params, [cfg.algorithm.lower()])
    write_costs_json(_sidecar_path(cfg.out, "_costs.json"), entries)
    return rows


def _rmf_feasible(topo: TreeTopology, num_users: int) -> bool:
    if topo.panel_outputs > min(topo.panel_antennas, num_users):
        return False
    return all(nb <= num_users for nb in topo.node_outputs)


def beta_cell_topology(
    cfg: ExperimentConfig, scenario: Scenario, beta_p: float, beta_b1: float
) -> TreeTopology:
    """Topology for one sweep cell with the CDSP dimensionality pinned to K.

    The first level follows ``beta_b1``; the remaining levels share one
    reduction factor chosen so the top output equals K (intermediate
    dimensions interpolate geometrically, then round).
    """
    m = scenario.num_antennas
    if m % cfg.panel_antennas != 0:
        raise ValueError(f"panel_antennas={cfg.panel_antennas} does not divide M={m}")
    num_panels = m // cfg.panel_antennas
    k = cfg.num_users
    np_out = int(math.floor(beta_p * cfg.panel_antennas + 0.5))
    nb1 = int(math.floor(beta_b1 * 4 * np_out + 0.5))
    if np_out < 1 or nb1 < 1:
        raise ValueError(f"cell ({beta_p}, {beta_b1}) rounds to empty dimensions")
    levels = 0
    p = num_panels
    while p > 1 and p % 4 == 0:
        p //= 4
        levels += 1
    if p != 1 or levels < 2:
        raise ValueError("beta sweep needs a power-of-4 panel count with >= 2 levels")
    node_outputs = [nb1]
    for n in range(2, levels):
        frac = (n - 1) / (levels - 1)
        node_outputs.append(int(math.floor(nb1 * (k / nb1) ** frac + 0.5)))
    node_outputs.append(k)
    return TreeTopology(num_panels, cfg.panel_antennas, np_out, tuple(node_outputs))


def sweep_beta(cfg: ExperimentConfig) -> dict:
    """Reduction-factor grid, evaluated for both algorithms on paired channels.

    Writes one CSV per algorithm (suffix _iic / _rmf). Cells whose
    dimensions cannot be realized are marked with a NaN aggregate row
    instead of being dropped.
    """
    scenario = scenario_from_config(cfg)
    if not cfg.beta_p_grid or not cfg.beta_b1_grid:
        raise ConfigError("beta_p_grid and beta_b1_grid are required for sweep_beta")
    rho = cfg.snr_rho
    rho_db = 10.0 * math.log10(rho)
    cells = [(bp, bb1) for bp in sorted(cfg.beta_p_grid) for bb1 in sorted(cfg.beta_b1_grid)]
    tasks = []
    cell_state: dict = {}
    for bp, bb1 in cells:
        try:
            topo = beta_cell_topology(cfg, scenario, bp, bb1)
        except ValueError:
            cell_state[(bp, bb1)] = {"iic": None, "rmf": None}
            continue
        state = {}
        for algorithm in ("iic", "rmf"):
            feasible = algorithm == "iic" or _rmf_feasible(topo, cfg.num_users)
            feasible = feasible and topo.num_panels * topo.panel_outputs >= cfg.num_users
            if feasible:
                task = Task(rho_db, bp, bb1, topo, algorithm, cfg.passes, rho)
                state[algorithm] = (len(tasks), task, topo)
                tasks.append(task)
            else:
                state[algorithm] = None
        cell_state[(bp, bb1)] = state
    num_panels = scenario.num_antennas // cfg.panel_antennas
    by_task = _run_tasks(
        scenario, num_panels, tasks, cfg.seed, cfg.num_realizations, _default_workers(cfg)
    )
    out_rows = {"iic": [], "rmf": []}
    cost_topologies = {"iic": [], "rmf": []}
    for bp, bb1 in cells:
        state = cell_state[(bp, bb1)]
        for algorithm in ("iic", "rmf"):
            slot = state.get(algorithm) if isinstance(state, dict) else None
            if slot is None:
                out_rows[algorithm].append(infeasible_row(rho_db, bp, bb1))
            else:
                idx, task, topo = slot
                out_rows[algorithm].extend(_rows_for_task(task, by_task[idx]))
                cost_topologies[algorithm].append((f"beta_p={bp},beta_b1={bb1}", topo))
    params = cost_params_from_config(cfg)
    cost_entries = []
    for algorithm in ("iic", "rmf"):
        path = _sidecar_path(cfg.out, f"_{algorithm}.csv")
        write_csv(path, out_rows[algorithm])
        cost_entries.extend(_cost_entries(cost_topologies[algorithm], params, [algorithm]))
    write_costs_json(_sidecar_path(cfg.out, "_costs.json"), cost_entries)
    return out_rows


def sweep_size(cfg: ExperimentConfig) -> dict:
    """Run the configured experiment at several square surface sizes.

    Each size writes its own CSV (suffix _m<antennas>) so every file keeps
    the fixed schema.
    """
    if not cfg.size_grid_m:
        raise ConfigError("size_grid_m is required for sweep_size")
    results = {}
    entries = []
    params = cost_params_from_config(cfg)
    for size in cfg.size_grid_m:
        sub = dataclasses.replace(cfg, lis_width_m=size, lis_height_m=size, sweep="none")
        scenario = scenario_from_config(sub)
        try:
            topo = topology_from_config(sub, scenario)
        except ValueError as exc:
            raise ConfigError(f"size_grid_m={size}: {exc}")
        beta_p, beta_b1 = _topology_coords(topo)
        rho_db = 10.0 * math.log10(cfg.snr_rho)
        task = Task(rho_db, beta_p, beta_b1, topo, cfg.algorithm.lower(), cfg.passes, cfg.snr_rho)
        by_task = _run_tasks(
            scenario, topo.num_panels, [task], cfg.seed, cfg.num_realizations, _default_workers(cfg)
        )
        rows = _rows_for_task(task, by_task[0])
        m = scenario.num_antennas
        write_csv(_sidecar_path(cfg.out, f"_m{m}.csv"), rows)
        entries.extend(_cost_entries([(f"M={m}", topo)], params, [cfg.algorithm.lower()]))
        results[m] = rows
    write_costs_json(_sidecar_path(cfg.out, "_costs.json"), entries)
    return results


def table1_topology() -> TreeTopology:
    """The published cost-table design point: 1024 antennas, 16 panels of 64."""
    return TreeTopology(num_panels=16, panel_antennas=64, panel_outputs=16, node_outputs=(32, 50))


def table1_params() -> CostParams:
    return CostParams(num_users=50)


def report_table1(out_path: str | None = None) -> list:
    """Cost table at the published design point, both accountings side by side.

    Returns a list of dict rows (method, metric, computed values under each
    accounting, published value, relative deviations) and optionally writes
    them as CSV.
    """
    topo = table1_topology()
    params = table1_params()
    metrics = (
        ("c_form_mac", "GMAC", 1e9),
        ("c_filt_mac_s", "TMAC/s", 1e12),
        ("r_inter_bps", "Tb/s", 1e12),
        ("r_intra_bps", "Tb/s", 1e12),
        ("l_form_s", "us", 1e-6),
        ("l_filt_s", "us", 1e-6),
    )
    rows = []
    for algorithm in ("iic", "rmf"):
        reports = {acc: evaluate_costs(topo, params, algorithm, acc) for acc in ACCOUNTINGS}
        for metric, unit, _scale in metrics:
            published = TABLE1_PUBLISHED[(algorithm, metric)]
            row = {"method": algorithm, "metric": metric, "unit": unit, "published": published}
            for acc in ACCOUNTINGS:
                value = getattr(reports[acc], metric)
                key = acc.replace("-", "_")
                row[f"computed_{key}"] = value
                row[f"rel_dev_{key}"] = (value - published) / published
            rows.append(row)
    if out_path is not None:
        cols = (
            "method",
            "metric",
            "unit",
            "computed_all_levels",
            "computed_paper_compat",
            "published",
            "rel_dev_all_levels",
            "rel_dev_paper_compat",
        )
        tmp = f"{out_path}.tmp"
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(cols) + "\n")
            for row in rows:
                fh.write(",".join(str(row[c]) for c in cols) + "\n")
        os.replace(tmp, out_path)
    return rows
