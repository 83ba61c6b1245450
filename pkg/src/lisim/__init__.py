"""Simulation library for distributed uplink processing on panelized
large antenna surfaces: near-field LoS channels, per-panel and tree-node
reduction filters, sum-rate capacity with upper bounds, and analytic
hardware cost models.
"""

from .capacity import CapacityReport, capacity_after_filter, capacity_of_plan, channel_capacity, upper_bounds
from .channel import (
    SPEED_OF_LIGHT,
    ChannelMatrix,
    PanelPartition,
    Scenario,
    UserSet,
    antenna_grid,
    build_channel,
    los_channel,
    sample_users,
)
from .config import ConfigError, ExperimentConfig, load_config, parse_config_text
from .costs import (
    CostParams,
    CostReport,
    evaluate_costs,
    filtering_complexity,
    formulation_complexity,
    interconnect_rates,
    latency,
)
from .formulation import (
    InterferenceState,
    PanelFilter,
    identity_state,
    iic_chain,
    iic_panel_step,
    rmf_filter,
)
from .linalg import HermitianEigen, SingularDecomp, eigh, inv_sqrt_psd, logdet_hpd, svd
from .tree import (
    FilterPlan,
    TreeTopology,
    build_tree,
    compose_total_filter,
    filter_uplink,
    formulate_lis,
    formulate_node,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityReport",
    "ChannelMatrix",
    "ConfigError",
    "CostParams",
    "CostReport",
    "ExperimentConfig",
    "FilterPlan",
    "HermitianEigen",
    "InterferenceState",
    "PanelFilter",
    "PanelPartition",
    "Scenario",
    "SingularDecomp",
    "SPEED_OF_LIGHT",
    "TreeTopology",
    "UserSet",
    "antenna_grid",
    "build_channel",
    "build_tree",
    "capacity_after_filter",
    "capacity_of_plan",
    "channel_capacity",
    "compose_total_filter",
    "eigh",
    "evaluate_costs",
    "filter_uplink",
    "filtering_complexity",
    "formulate_lis",
    "formulate_node",
    "formulation_complexity",
    "identity_state",
    "iic_chain",
    "iic_panel_step",
    "interconnect_rates",
    "inv_sqrt_psd",
    "latency",
    "load_config",
    "logdet_hpd",
    "los_channel",
    "parse_config_text",
    "rmf_filter",
    "sample_users",
    "svd",
    "upper_bounds",
]
