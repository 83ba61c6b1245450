import pytest

from lisim import ConfigError, parse_config_text
from lisim.config import (
    cost_params_from_config,
    scenario_from_config,
    topology_from_config,
)

DESK = """
# desk-scale point
lis_width_m = 0.6
lis_height_m = 0.6
num_users = 16
snr_rho = 10
panel_antennas = 16
panel_outputs = 2
beta_b = 1.0
algorithm = iic
num_realizations = 5
seed = 3
"""


class TestParsing:
    def test_round_trip_desk_config(self):
        cfg = parse_config_text(DESK)
        assert cfg.num_users == 16
        assert cfg.panel_outputs == 2
        assert cfg.seed == 3

    def test_comments_and_blank_lines_ignored(self):
        cfg = parse_config_text("# only a comment\n\nnum_users = 8  # inline\n")
        assert cfg.num_users == 8

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config_text("users = 4\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text("num_users = 4\nnum_users = 5\n")

    def test_bad_value_reports_field(self):
        with pytest.raises(ConfigError, match="num_users"):
            parse_config_text("num_users = many\n")

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigError, match="key = value"):
            parse_config_text("num_users 4\n")

    def test_list_value(self):
        cfg = parse_config_text(DESK + "beta_p_grid = 0.25, 0.5, 1.0\nsweep = beta\nbeta_b1_grid = 0.5,1.0\n")
        assert cfg.beta_p_grid == (0.25, 0.5, 1.0)

    def test_bool_value(self):
        cfg = parse_config_text(DESK + "cdsp_dim_k = true\n")
        assert cfg.cdsp_dim_k is True


class TestValidation:
    def test_multiple_errors_all_reported(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text("num_realizations = 0\npasses = 0\nalgorithm = zf\n")
        msg = str(err.value)
        assert "num_realizations" in msg and "passes" in msg and "algorithm" in msg

    def test_both_panel_outputs_and_beta_p_rejected(self):
        with pytest.raises(ConfigError, match="at most one"):
            parse_config_text(DESK.replace("panel_outputs = 2", "panel_outputs = 2\nbeta_p = 0.5"))

    def test_beta_sweep_requires_grids(self):
        with pytest.raises(ConfigError, match="beta_p_grid"):
            parse_config_text(DESK + "sweep = beta\n")

    def test_snr_sweep_step_positive(self):
        with pytest.raises(ConfigError, match="snr_db_step"):
            parse_config_text(DESK + "sweep = snr\nsnr_db_step = -1\n")

    def test_topology_errors_surface(self):
        # 0.6 m surface gives 256 antennas; 15 does not divide that
        with pytest.raises(ConfigError, match="panel_antennas"):
            parse_config_text(DESK.replace("panel_antennas = 16", "panel_antennas = 15"))


class TestBuilders:
    def test_scenario_and_topology(self):
        cfg = parse_config_text(DESK)
        scenario = scenario_from_config(cfg)
        assert scenario.num_antennas == 256
        topo = topology_from_config(cfg, scenario)
        assert topo.num_panels == 16
        assert topo.node_outputs == (8, 32)

    def test_beta_p_resolution(self):
        cfg = parse_config_text(DESK.replace("panel_outputs = 2", "beta_p = 0.25"))
        scenario = scenario_from_config(cfg)
        topo = topology_from_config(cfg, scenario)
        assert topo.panel_outputs == 4

    def test_cdsp_dim_k_pins_top_level(self):
        cfg = parse_config_text(DESK + "cdsp_dim_k = true\n")
        topo = topology_from_config(cfg, scenario_from_config(cfg))
        assert topo.node_outputs[-1] == 16

    def test_explicit_beta_list(self):
        cfg = parse_config_text(DESK.replace("beta_b = 1.0", "beta_b = 0.5, 0.25"))
        topo = topology_from_config(cfg, scenario_from_config(cfg))
        assert topo.node_outputs == (4, 4)

    def test_cost_params(self):
        cfg = parse_config_text(DESK + "alpha = 0.2\nbit_width = 10\n")
        params = cost_params_from_config(cfg)
        assert params.alpha == 0.2
        assert params.bit_width == 10
        assert params.num_users == 16
