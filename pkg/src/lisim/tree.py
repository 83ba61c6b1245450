"""Aggregation tree: topology, level-by-level formulation, and filtering.

Panels are the leaves of a 4-ary tree. Each node stacks the equivalent
channels of its four children, formulates a reduction filter on that stack
exactly as a panel would (with an identity interference state, since the
state is not exchanged inside the tree), and passes the reduced equivalent
channel upward. Because every filter is semi-unitary, noise stays white at
every interface and each stage sees a plain channel-plus-identity-noise
model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelMatrix
from .formulation import InterferenceState, PanelFilter, iic_chain, iic_panel_step, rmf_filter

ALGORITHMS = ("iic", "rmf")


def _normalize_algorithm(algorithm: str) -> str:
    alg = str(algorithm).lower()
    if alg not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}, expected one of {ALGORITHMS}")
    return alg


@dataclass(frozen=True)
class TreeTopology:
    """Reduction tree dimensions: P leaf panels and per-level output sizes.

    ``node_outputs[n-1]`` is the output dimensionality of a node at level
    n (level 0 is the panel itself). The number of levels is tied to the
    panel count by P = arity**levels.
    """

    num_panels: int
    panel_antennas: int
    panel_outputs: int
    node_outputs: tuple = ()
    arity: int = 4

    def __post_init__(self) -> None:
        object.__setattr__(self, "node_outputs", tuple(int(n) for n in self.node_outputs))
        if self.arity < 2:
            raise ValueError("arity must be >= 2")
        if self.num_panels != self.arity**self.num_levels:
            raise ValueError(
                f"num_panels={self.num_panels} is not arity**levels "
                f"({self.arity}**{self.num_levels})"
            )
        if self.panel_antennas < 1 or self.panel_outputs < 1:
            raise ValueError("panel dimensions must be >= 1")
        if self.panel_outputs > self.panel_antennas:
            raise ValueError("panel_outputs cannot exceed panel_antennas")
        prev = self.panel_outputs
        for n, nb in enumerate(self.node_outputs, start=1):
            if nb < 1:
                raise ValueError(f"level {n} output dimension must be >= 1")
            if nb > self.arity * prev:
                raise ValueError(
                    f"level {n} output {nb} exceeds its input {self.arity}*{prev}"
                )
            prev = nb

    @property
    def num_levels(self) -> int:
        return len(self.node_outputs)

    @property
    def beta_p(self) -> float:
        return self.panel_outputs / self.panel_antennas

    @property
    def beta_b(self) -> tuple:
        out = []
        prev = self.panel_outputs
        for nb in self.node_outputs:
            out.append(nb / (self.arity * prev))
            prev = nb
        return tuple(out)

    @property
    def cdsp_dim(self) -> int:
        return self.node_outputs[-1] if self.node_outputs else self.panel_outputs

    def output_dim(self, level: int) -> int:
        """Output dimensionality at ``level`` (0 = panel)."""
        return self.panel_outputs if level == 0 else self.node_outputs[level - 1]

    def input_dim(self, level: int) -> int:
        """Stacked input dimensionality of a node at ``level`` >= 1."""
        return self.arity * self.output_dim(level - 1)

    def nodes_at_level(self, level: int) -> int:
        return self.num_panels // self.arity**level


def build_tree(
    num_panels: int,
    panel_antennas: int,
    panel_outputs: int,
    betas,
    arity: int = 4,
    strict: bool = False,
) -> TreeTopology:
    """Topology from per-level reduction factors.

    Level n outputs round(beta[n-1] * arity * previous output), rounding
    to nearest with ties up. In ``strict`` mode a non-integer product is
    an error instead of being rounded.
    """
    levels = 0
    p = num_panels
    while p > 1 and p % arity == 0:
        p //= arity
        levels += 1
    if p != 1:
        raise ValueError(f"num_panels={num_panels} is not a power of {arity}")
    betas = [float(b) for b in betas]
    if len(betas) != levels:
        raise ValueError(f"expected {levels} reduction factors, got {len(betas)}")
    node_outputs = []
    prev = panel_outputs
    for n, beta in enumerate(betas, start=1):
        raw = beta * arity * prev
        nearest = int(np.floor(raw + 0.5))
        if strict and abs(raw - round(raw)) > 1e-9:
            raise ValueError(f"level {n}: {beta} * {arity} * {prev} = {raw} is not an integer")
        if nearest < 1:
            raise ValueError(f"level {n} output dimension rounds to {nearest}, must be >= 1")
        node_outputs.append(nearest)
        prev = nearest
    return TreeTopology(num_panels, panel_antennas, panel_outputs, tuple(node_outputs), arity)


@dataclass(frozen=True)
class FilterPlan:
    """All filters and equivalent channels of one formulated realization.

    ``node_filters[n-1][j]`` / ``node_equiv[n-1][j]`` hold the filter and
    the output-side equivalent channel of node j at level n; children of
    node j at level n are nodes (or panels) arity*j .. arity*j+3 of the
    level below.
    """

    channel: ChannelMatrix
    topology: TreeTopology
    algorithm: str
    rho: float
    panel_filters: tuple
    panel_equiv: tuple
    node_filters: tuple = ()
    node_equiv: tuple = ()
    z_state: InterferenceState | None = field(default=None, repr=False)

    @property
    def cdsp_channel(self) -> np.ndarray:
        """Equivalent channel delivered to the central processor."""
        if self.node_equiv:
            return self.node_equiv[-1][0]
        return self.panel_equiv[0]


def formulate_node(
    children_equiv: np.ndarray,
    z: np.ndarray,
    nb_out: int,
    rho: float,
    algorithm: str,
) -> tuple[np.ndarray, np.ndarray]:
    """Formulate one tree node on the stacked children equivalent channel.

    The stack is treated exactly like a panel channel with white input
    noise; ``z`` is the interference state to use (identity inside the
    tree). Returns the node filter and the reduced equivalent channel.
    """
    alg = _normalize_algorithm(algorithm)
    h_eq = np.asarray(children_equiv, dtype=np.complex128)
    if nb_out > h_eq.shape[0]:
        raise ValueError(f"nb_out={nb_out} exceeds stacked input dimension {h_eq.shape[0]}")
    if alg == "iic":
        filt, _ = iic_panel_step(h_eq, InterferenceState(np.asarray(z, dtype=np.complex128)), nb_out, rho)
        w = filt.w
    else:
        w = rmf_filter(h_eq, nb_out).w
    return w, w.conj().T @ h_eq


def formulate_lis(
    channel: ChannelMatrix,
    topology: TreeTopology,
    algorithm: str,
    rho: float,
    passes: int = 1,
) -> FilterPlan:
    """Formulate the whole surface: panels first, then the tree bottom-up.

    Panels use the chain (state passed in index order) under "iic" or
    independent matched filters under "rmf"; nodes always start from an
    identity state. Children of node j are entries arity*j .. arity*j+3
    of the level below, which keeps spatially adjacent tiles grouped.
    """
    alg = _normalize_algorithm(algorithm)
    part = channel.partition
    if part.num_panels != topology.num_panels or part.panel_antennas != topology.panel_antennas:
        raise ValueError("channel partition does not match tree topology")
    blocks = channel.blocks()
    z_state: InterferenceState | None = None
    if alg == "iic":
        filters, z_state = iic_chain(blocks, topology.panel_outputs, rho, passes)
    else:
        filters = [rmf_filter(b, topology.panel_outputs, panel_index=i) for i, b in enumerate(blocks)]
    panel_equiv = tuple(f.w.conj().T @ b for f, b in zip(filters, blocks))

    k = channel.num_users
    eye = np.eye(k, dtype=np.complex128)
    node_filters: list[tuple] = []
    node_equiv: list[tuple] = []
    below = list(panel_equiv)
    for level in range(1, topology.num_levels + 1):
        nb_out = topology.output_dim(level)
        level_filters = []
        level_equiv = []
        for j in range(topology.nodes_at_level(level)):
            stacked = np.vstack(below[topology.arity * j : topology.arity * (j + 1)])
            w, eq = formulate_node(stacked, eye, nb_out, rho, alg)
            level_filters.append(w)
            level_equiv.append(eq)
        node_filters.append(tuple(level_filters))
        node_equiv.append(tuple(level_equiv))
        below = level_equiv
    return FilterPlan(
        channel=channel,
        topology=topology,
        algorithm=alg,
        rho=rho,
        panel_filters=tuple(filters),
        panel_equiv=panel_equiv,
        node_filters=tuple(node_filters),
        node_equiv=tuple(node_equiv),
        z_state=z_state,
    )


def filter_uplink(plan: FilterPlan, y: np.ndarray) -> np.ndarray:
    """Run received samples through the full reduction dataflow.

    ``y`` has length M (or shape (M, batch)); the result is the CDSP-side
    vector of length ``topology.cdsp_dim`` (or a matching batch).
    """
    y = np.asarray(y, dtype=np.complex128)
    squeeze = y.ndim == 1
    if squeeze:
        y = y[:, None]
    if y.shape[0] != plan.channel.num_antennas:
        raise ValueError(f"y must have {plan.channel.num_antennas} rows, got {y.shape[0]}")
    part = plan.channel.partition
    below = [
        f.w.conj().T @ y[np.asarray(part.row_index_sets[i], dtype=np.intp)]
        for i, f in enumerate(plan.panel_filters)
    ]
    arity = plan.topology.arity
    for level_filters in plan.node_filters:
        below = [
            w.conj().T @ np.vstack(below[arity * j : arity * (j + 1)])
            for j, w in enumerate(level_filters)
        ]
    out = below[0]
    return out[:, 0] if squeeze else out


def _block_diag(mats) -> np.ndarray:
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols), dtype=np.complex128)
    r = c = 0
    for m in mats:
        out[r : r + m.shape[0], c : c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def compose_total_filter(plan: FilterPlan) -> np.ndarray:
    """Collapse all stages into one M x cdsp_dim matrix.

    Multiplies the block-diagonal per-level filters together; the result
    is semi-unitary, and applying its conjugate transpose to y reproduces
    ``filter_uplink`` exactly.
    """
    total = _block_diag([f.w for f in plan.panel_filters])
    for level_filters in plan.node_filters:
        total = total @ _block_diag(list(level_filters))
    return total
