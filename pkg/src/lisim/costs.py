"""Analytic hardware cost models: complexity, interconnect rates, latency.

All quantities are exact closed forms over the tree dimensions. One MAC is
one complex multiply-accumulate; an SVD of an M x N matrix is costed at
2*M^2*N.

Two tree-level accounting conventions are supported. "all-levels" counts
the front-end plus every tree level in each sum; "paper-compat" drops the
top level from the tree sums (the hop counts in the latency terms stay
physical either way). Reports can carry both so discrepancies between the
conventions stay visible instead of hidden.
"""

from __future__ import annotations

from dataclasses import dataclass

from .tree import TreeTopology

ACCOUNTINGS = ("all-levels", "paper-compat")


def _check_accounting(accounting: str) -> str:
    if accounting not in ACCOUNTINGS:
        raise ValueError(f"unknown accounting {accounting!r}, expected one of {ACCOUNTINGS}")
    return accounting


@dataclass(frozen=True)
class CostParams:
    """Hardware constants for the cost formulas.

    ``chain_panels`` is the number of panels in the serial formulation
    chain (defaults to all panels); matched-filter formulation always
    behaves as a single-panel chain. ``num_paral`` is carried for
    completeness but the latency model divides by ``num_proc``.
    """

    num_users: int
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

    def __post_init__(self) -> None:
        if self.num_users < 1:
            raise ValueError("num_users must be >= 1")
        for name in ("bandwidth_hz", "alpha", "clock_period_s",
                     "link_latency_local_s", "link_latency_global_s"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("bit_width", "num_prb", "num_proc", "num_paral"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.num_proc > self.num_paral:
            raise ValueError("num_proc cannot exceed num_paral")
        if self.chain_panels is not None and self.chain_panels < 1:
            raise ValueError("chain_panels must be >= 1")


@dataclass(frozen=True)
class CostReport:
    """All cost figures for one topology/algorithm/accounting choice."""

    algorithm: str
    accounting: str
    c_form_mac: float
    c_filt_mac_s: float
    r_inter_bps: float
    r_intra_bps: float
    r_eq_bps: float
    l_form_s: float
    l_filt_s: float
    c_form_per_level: tuple
    c_filt_per_level: tuple
    r_inter_per_level: tuple
    r_intra_per_level: tuple

    @property
    def l_tot_s(self) -> float:
        return self.l_form_s + self.l_filt_s


def _counted_levels(topo: TreeTopology, accounting: str) -> range:
    last = topo.num_levels if accounting == "all-levels" else topo.num_levels - 1
    return range(1, max(last, 0) + 1)


def _filt_unit(topo: TreeTopology, level: int) -> int:
    """Per-SPU filtering MACs for one subcarrier at ``level`` (0 = panel)."""
    if level == 0:
        return topo.panel_antennas * topo.panel_outputs
    return topo.arity * topo.output_dim(level - 1) * topo.output_dim(level)


def _form_unit(topo: TreeTopology, level: int, algorithm: str, k: int) -> int:
    """Per-SPU formulation MACs at ``level`` for the given algorithm."""
    if algorithm == "rmf":
        if level == 0:
            return topo.panel_antennas * k
        return topo.arity * topo.output_dim(level - 1) * k
    mp, np_out = topo.panel_antennas, topo.panel_outputs
    if level == 0:
        d0 = max(k, mp)
        return (2 * k + mp + np_out) * k**2 + np_out * mp * k + 2 * np_out * d0**2
    nb_in = topo.arity * topo.output_dim(level - 1)
    nb = topo.output_dim(level)
    dn = max(k, nb_in)
    return nb_in * nb * k + 2 * nb * dn**2


def filtering_complexity(
    topo: TreeTopology, params: CostParams, accounting: str = "all-levels"
) -> float:
    """Aggregate filtering load in MAC/s across all processing units."""
    _check_accounting(accounting)
    total = topo.num_panels * _filt_unit(topo, 0)
    for n in _counted_levels(topo, accounting):
        total += topo.nodes_at_level(n) * _filt_unit(topo, n)
    return params.bandwidth_hz * total


def formulation_complexity(
    topo: TreeTopology, params: CostParams, algorithm: str, accounting: str = "all-levels"
) -> float:
    """Aggregate filter-formulation cost in MACs (one update per PRB)."""
    _check_accounting(accounting)
    alg = algorithm.lower()
    k = params.num_users
    total = topo.num_panels * _form_unit(topo, 0, alg, k)
    for n in _counted_levels(topo, accounting):
        total += topo.nodes_at_level(n) * _form_unit(topo, n, alg, k)
    return params.num_prb * total


def interconnect_rates(
    topo: TreeTopology, params: CostParams, accounting: str = "all-levels"
) -> tuple[float, float, float]:
    """(inter, intra, cost-equivalent) data-rates in bits/s.

    Inter counts panel-to-node and node-to-node links; intra counts the
    movement between a unit's ports and its processing element. The
    equivalent rate weighs intra by the relative link-cost factor alpha.
    """
    _check_accounting(accounting)
    scale = 2.0 * params.bit_width * params.bandwidth_hz
    inter = topo.num_panels * topo.panel_outputs
    intra = topo.num_panels * (topo.panel_antennas + topo.panel_outputs)
    for n in _counted_levels(topo, accounting):
        nodes = topo.nodes_at_level(n)
        inter += nodes * topo.output_dim(n)
        intra += nodes * (topo.input_dim(n) + topo.output_dim(n))
    r_inter = scale * inter
    r_intra = scale * intra
    return r_inter, r_intra, r_inter + params.alpha * r_intra


def latency(
    topo: TreeTopology, params: CostParams, algorithm: str, accounting: str = "all-levels"
) -> tuple[float, float]:
    """(formulation, filtering) latency in seconds along one tree branch.

    Formulation covers the serial panel chain (length ``chain_panels``
    for the interference-cancelling method, 1 for the matched filter mode)
    plus one node per level; both phases pay one global link hop per tree
    level plus one into the central processor.
    """
    _check_accounting(accounting)
    alg = algorithm.lower()
    k = params.num_users
    if alg == "rmf":
        n_chain = 1
    else:
        n_chain = params.chain_panels if params.chain_panels is not None else topo.num_panels
        if n_chain > topo.num_panels:
            raise ValueError("chain_panels cannot exceed the panel count")
    hops = (topo.num_levels + 1) * params.link_latency_global_s
    form_macs = n_chain * _form_unit(topo, 0, alg, k)
    filt_macs = _filt_unit(topo, 0)
    for n in _counted_levels(topo, accounting):
        form_macs += _form_unit(topo, n, alg, k)
        filt_macs += _filt_unit(topo, n)
    per_mac = params.clock_period_s / params.num_proc
    l_form = form_macs * per_mac + hops
    if alg == "iic":
        l_form += (n_chain - 1) * params.link_latency_local_s
    l_filt = filt_macs * per_mac + hops
    return l_form, l_filt


def evaluate_costs(
    topo: TreeTopology, params: CostParams, algorithm: str, accounting: str = "all-levels"
) -> CostReport:
    """Full cost report with per-level breakdowns (front-end first)."""
    _check_accounting(accounting)
    alg = algorithm.lower()
    k = params.num_users
    levels = list(_counted_levels(topo, accounting))
    c_form_lv = [params.num_prb * topo.num_panels * _form_unit(topo, 0, alg, k)]
    c_filt_lv = [params.bandwidth_hz * topo.num_panels * _filt_unit(topo, 0)]
    scale = 2.0 * params.bit_width * params.bandwidth_hz
    r_inter_lv = [scale * topo.num_panels * topo.panel_outputs]
    r_intra_lv = [scale * topo.num_panels * (topo.panel_antennas + topo.panel_outputs)]
    for n in levels:
        nodes = topo.nodes_at_level(n)
        c_form_lv.append(params.num_prb * nodes * _form_unit(topo, n, alg, k))
        c_filt_lv.append(params.bandwidth_hz * nodes * _filt_unit(topo, n))
        r_inter_lv.append(scale * nodes * topo.output_dim(n))
        r_intra_lv.append(scale * nodes * (topo.input_dim(n) + topo.output_dim(n)))
    r_inter, r_intra, r_eq = interconnect_rates(topo, params, accounting)
    l_form, l_filt = latency(topo, params, alg, accounting)
    return CostReport(
        algorithm=alg,
        accounting=accounting,
        c_form_mac=sum(c_form_lv),
        c_filt_mac_s=sum(c_filt_lv),
        r_inter_bps=r_inter,
        r_intra_bps=r_intra,
        r_eq_bps=r_eq,
        l_form_s=l_form,
        l_filt_s=l_filt,
        c_form_per_level=tuple(c_form_lv),
        c_filt_per_level=tuple(c_filt_lv),
        r_inter_per_level=tuple(r_inter_lv),
        r_intra_per_level=tuple(r_intra_lv),
    )
