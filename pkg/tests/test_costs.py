import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lisim import (
    CostParams,
    TreeTopology,
    evaluate_costs,
    filtering_complexity,
    formulation_complexity,
    interconnect_rates,
    latency,
)

# the 1024-antenna / 16-panel / 50-user design point used throughout
REF_TOPO = TreeTopology(num_panels=16, panel_antennas=64, panel_outputs=16, node_outputs=(32, 50))
REF_PARAMS = CostParams(num_users=50)

# hand-evaluated closed forms for the reference point (front-end + levels):
#   filtering (MAC/subcarrier): 16*64*16 + 4*(4*16*32) + 1*(4*32*50)
#   formulation IIC per panel: (2*50+64+16)*50^2 + 16*64*50 + 2*16*64^2 = 632272
#   formulation IIC level 1: 4*32*16*50 + 2*32*64^2 = 364544 (times 4 nodes)
#   formulation IIC level 2: 4*50*32*50 + 2*50*128^2 = 1958400
HAND_C_FILT_ALL = 1e8 * (16 * 64 * 16 + 4 * (4 * 16 * 32) + 1 * (4 * 32 * 50))
HAND_C_FILT_COMPAT = 1e8 * (16 * 64 * 16 + 4 * (4 * 16 * 32))
HAND_C_FORM_IIC_ALL = 275 * (16 * 632272 + 4 * 364544 + 1958400)
HAND_C_FORM_IIC_COMPAT = 275 * (16 * 632272 + 4 * 364544)
HAND_C_FORM_RMF_ALL = 275 * (16 * 3200 + 4 * 3200 + 6400)
HAND_R_INTER_ALL = 24e8 * (16 * 16 + 4 * 32 + 50)
HAND_R_INTRA_ALL = 24e8 * (16 * 80 + 4 * 96 + 178)
HAND_L_FILT_ALL = (1024 + 2048 + 6400) * 1e-9 / 100 + 3 * 300e-9
HAND_L_FORM_RMF_ALL = 12800 * 1e-9 / 100 + 3 * 300e-9
HAND_L_FORM_IIC_ALL = (16 * 632272 + 364544 + 1958400) * 1e-9 / 100 + 15 * 100e-9 + 3 * 300e-9
HAND_L_FORM_IIC_COMPAT = (16 * 632272 + 364544) * 1e-9 / 100 + 15 * 100e-9 + 3 * 300e-9


class TestFilteringComplexity:
    def test_reference_point_both_accountings(self):
        assert filtering_complexity(REF_TOPO, REF_PARAMS) == pytest.approx(HAND_C_FILT_ALL)
        assert filtering_complexity(REF_TOPO, REF_PARAMS, "paper-compat") == pytest.approx(
            HAND_C_FILT_COMPAT
        )

    def test_zero_bandwidth(self):
        p = dataclasses.replace(REF_PARAMS, bandwidth_hz=0.0)
        assert filtering_complexity(REF_TOPO, p) == 0.0

    def test_single_panel_front_end_only(self):
        topo = TreeTopology(1, 16, 4, ())
        p = CostParams(num_users=4, bandwidth_hz=1e6)
        assert filtering_complexity(topo, p) == 1e6 * 16 * 4

    def test_linear_in_bandwidth(self):
        doubled = dataclasses.replace(REF_PARAMS, bandwidth_hz=2e8)
        assert filtering_complexity(REF_TOPO, doubled) == pytest.approx(2 * HAND_C_FILT_ALL)


class TestFormulationComplexity:
    def test_iic_reference_point(self):
        assert formulation_complexity(REF_TOPO, REF_PARAMS, "iic") == pytest.approx(
            HAND_C_FORM_IIC_ALL
        )
        assert formulation_complexity(REF_TOPO, REF_PARAMS, "iic", "paper-compat") == pytest.approx(
            HAND_C_FORM_IIC_COMPAT
        )

    def test_rmf_reference_point(self):
        assert formulation_complexity(REF_TOPO, REF_PARAMS, "rmf") == pytest.approx(
            HAND_C_FORM_RMF_ALL
        )

    def test_unit_dimensions(self):
        # one panel, all dims 1: (2+1+1)*1 + 1 + 2*1 = 7 MACs per PRB
        topo = TreeTopology(1, 1, 1, ())
        p = CostParams(num_users=1, num_prb=10)
        assert formulation_complexity(topo, p, "iic") == 70

    def test_linear_in_prb_count(self):
        p = dataclasses.replace(REF_PARAMS, num_prb=550)
        assert formulation_complexity(REF_TOPO, p, "iic") == pytest.approx(2 * HAND_C_FORM_IIC_ALL)


class TestInterconnectRates:
    def test_reference_point(self):
        r_inter, r_intra, r_eq = interconnect_rates(REF_TOPO, REF_PARAMS)
        assert r_inter == pytest.approx(HAND_R_INTER_ALL)
        assert r_intra == pytest.approx(HAND_R_INTRA_ALL)
        assert r_eq == pytest.approx(r_inter + 0.1 * r_intra)

    def test_alpha_zero(self):
        p = dataclasses.replace(REF_PARAMS, alpha=0.0)
        r_inter, _, r_eq = interconnect_rates(REF_TOPO, p)
        assert r_eq == r_inter

    def test_linear_in_bit_width_bandwidth(self):
        p = dataclasses.replace(REF_PARAMS, bit_width=24)
        r_inter, _, _ = interconnect_rates(REF_TOPO, p)
        assert r_inter == pytest.approx(2 * HAND_R_INTER_ALL)


class TestLatency:
    def test_reference_filtering_latency(self):
        _, l_filt = latency(REF_TOPO, REF_PARAMS, "iic")
        assert l_filt == pytest.approx(HAND_L_FILT_ALL)

    def test_reference_formulation_latency(self):
        l_form_iic, _ = latency(REF_TOPO, REF_PARAMS, "iic")
        l_form_rmf, _ = latency(REF_TOPO, REF_PARAMS, "rmf")
        assert l_form_iic == pytest.approx(HAND_L_FORM_IIC_ALL)
        assert l_form_rmf == pytest.approx(HAND_L_FORM_RMF_ALL)

    def test_paper_compat_formulation_latency(self):
        l_form, _ = latency(REF_TOPO, REF_PARAMS, "iic", "paper-compat")
        assert l_form == pytest.approx(HAND_L_FORM_IIC_COMPAT)

    def test_rmf_has_no_local_link_term(self):
        p = dataclasses.replace(REF_PARAMS, link_latency_local_s=1.0)
        l_slow, _ = latency(REF_TOPO, p, "rmf")
        l_fast, _ = latency(REF_TOPO, REF_PARAMS, "rmf")
        assert l_slow == l_fast

    def test_vanishing_processing_cost(self):
        p = dataclasses.replace(
            REF_PARAMS,
            num_proc=10**9,
            num_paral=10**9,
            link_latency_local_s=0.0,
            link_latency_global_s=0.0,
        )
        l_form, l_filt = latency(REF_TOPO, p, "iic")
        assert l_form < 1e-6 and l_filt < 1e-9

    def test_chain_longer_than_panels_rejected(self):
        p = dataclasses.replace(REF_PARAMS, chain_panels=17)
        with pytest.raises(ValueError, match="chain"):
            latency(REF_TOPO, p, "iic")


class TestEvaluateCosts:
    def test_report_invariants(self):
        rep = evaluate_costs(REF_TOPO, REF_PARAMS, "iic")
        assert rep.l_tot_s == rep.l_form_s + rep.l_filt_s
        assert rep.r_eq_bps == pytest.approx(rep.r_inter_bps + 0.1 * rep.r_intra_bps)
        assert rep.c_form_mac == sum(rep.c_form_per_level)
        assert rep.c_filt_mac_s == sum(rep.c_filt_per_level)
        assert all(v >= 0 for v in rep.c_form_per_level + rep.c_filt_per_level)

    def test_per_level_breakdown_length(self):
        rep_all = evaluate_costs(REF_TOPO, REF_PARAMS, "iic", "all-levels")
        rep_compat = evaluate_costs(REF_TOPO, REF_PARAMS, "iic", "paper-compat")
        assert len(rep_all.c_filt_per_level) == 3
        assert len(rep_compat.c_filt_per_level) == 2

    def test_unknown_accounting_rejected(self):
        with pytest.raises(ValueError, match="accounting"):
            evaluate_costs(REF_TOPO, REF_PARAMS, "iic", "both")


def _all_costs(topo, params, algorithm):
    rep = evaluate_costs(topo, params, algorithm)
    return np.array(
        [rep.c_form_mac, rep.c_filt_mac_s, rep.r_inter_bps, rep.r_intra_bps,
         rep.r_eq_bps, rep.l_form_s, rep.l_filt_s]
    )


class TestMonotonicity:
    BASE = TreeTopology(16, 16, 4, (8, 16))

    @pytest.mark.parametrize("algorithm", ["iic", "rmf"])
    def test_growing_each_dimension_never_cheapens(self, algorithm):
        params = CostParams(num_users=16)
        base = _all_costs(self.BASE, params, algorithm)
        grown = [
            TreeTopology(16, 25, 4, (8, 16)),          # bigger panels
            TreeTopology(16, 16, 5, (8, 16)),          # more panel outputs
            TreeTopology(16, 16, 4, (9, 16)),          # wider level 1
            TreeTopology(16, 16, 4, (8, 17)),          # wider level 2
        ]
        for topo in grown:
            assert np.all(_all_costs(topo, params, algorithm) >= base - 1e-12)
        more_users = CostParams(num_users=17)
        assert np.all(_all_costs(self.BASE, more_users, algorithm) >= base - 1e-12)

    def test_more_panels_never_cheapens(self):
        params = CostParams(num_users=16)
        base = _all_costs(self.BASE, params, "iic")
        bigger = TreeTopology(64, 16, 4, (8, 16, 16))
        assert np.all(_all_costs(bigger, params, "iic") >= base - 1e-12)


@settings(max_examples=30, deadline=None)
@given(
    st.integers(min_value=1, max_value=6),
    st.integers(min_value=1, max_value=30),
    st.integers(min_value=0, max_value=2**31 - 1),
)
def test_property_costs_nonnegative_and_accounting_bounded(np_out, k, seed):
    rng = np.random.default_rng(seed)
    mp = int(rng.integers(np_out, 40))
    nb1 = int(rng.integers(1, 4 * np_out + 1))
    nb2 = int(rng.integers(1, 4 * nb1 + 1))
    topo = TreeTopology(16, mp, np_out, (nb1, nb2))
    params = CostParams(num_users=k)
    for algorithm in ("iic", "rmf"):
        full = _all_costs(topo, params, algorithm)
        rep_compat = evaluate_costs(topo, params, algorithm, "paper-compat")
        compat = np.array(
            [rep_compat.c_form_mac, rep_compat.c_filt_mac_s, rep_compat.r_inter_bps,
             rep_compat.r_intra_bps, rep_compat.r_eq_bps, rep_compat.l_form_s, rep_compat.l_filt_s]
        )
        assert np.all(full >= 0) and np.all(compat >= 0)
        # dropping the top level from the sums can only reduce cost
        assert np.all(compat <= full + 1e-12)
