"""Sum-rate capacity at any interface, plus closed-form upper bounds.

All capacities are log2-determinant mutual informations in bits/s/Hz,
assuming white Gaussian signaling and identity-covariance noise at the
antennas. For a filter W the relevant quantity is
log2 det(I + rho H^H W (W^H W)^{-1} W^H H), which depends only on the
column span of W; for semi-unitary W the inner inverse is the identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import logdet_hpd
from .tree import FilterPlan

LN2 = math.log(2.0)


@dataclass(frozen=True)
class CapacityReport:
    """Capacities at the main interfaces plus the two upper bounds."""

    c_antenna: float
    c_z: float
    c_cdsp: float
    c_ub1: float
    c_ub2: float
    normalized: float


def _gram(h: np.ndarray) -> np.ndarray:
    g = h.conj().T @ h
    return 0.5 * (g + g.conj().T)


def channel_capacity(h: np.ndarray, rho: float) -> float:
    """Capacity with no filtering: log2 det(I + rho H^H H)."""
    h = np.asarray(h, dtype=np.complex128)
    k = h.shape[1]
    return logdet_hpd(np.eye(k) + rho * _gram(h)) / LN2


def capacity_after_filter(h: np.ndarray, w: np.ndarray, rho: float) -> float:
    """Capacity of the signal seen through filter ``w``.

    ``w`` must have full column rank (checked via its singular values).
    The general correlated-filter form is used unless ``w`` is detected
    to be semi-unitary, in which case the inner inverse is skipped.
    """
    h = np.asarray(h, dtype=np.complex128)
    w = np.asarray(w, dtype=np.complex128)
    sigma = np.linalg.svd(w, compute_uv=False)
    if sigma[0] == 0.0 or sigma[-1] <= 1e-10 * sigma[0]:
        raise ValueError("filter is rank deficient")
    b = w.conj().T @ h
    gw = w.conj().T @ w
    n = w.shape[1]
    if np.linalg.norm(gw - np.eye(n)) <= 1e-10 * math.sqrt(n):
        g = b.conj().T @ b
    else:
        g = b.conj().T @ np.linalg.solve(gw, b)
    k = h.shape[1]
    return logdet_hpd(np.eye(k) + rho * 0.5 * (g + g.conj().T)) / LN2


def upper_bounds(h_blocks, n_out: int, rho: float) -> tuple[float, float]:
    """Two upper bounds on the achievable panel-output capacity.

    The first assumes the per-panel energy of the ``n_out`` strongest
    directions could be spread into equal eigenvalues across all K users;
    the second is the unconstrained single-processor capacity of the full
    channel. Requires P * n_out >= K.
    """
    blocks = [np.asarray(b, dtype=np.complex128) for b in h_blocks]
    if not blocks:
        raise ValueError("need at least one panel block")
    k = blocks[0].shape[1]
    if len(blocks) * n_out < k:
        raise ValueError(f"P*N_p = {len(blocks) * n_out} < K = {k}, bounds require P*N_p >= K")
    s_sel = 0.0
    for b in blocks:
        lam = np.linalg.svd(b, compute_uv=False) ** 2
        s_sel += float(np.sum(lam[:n_out]))
    c_ub1 = k * math.log2(1.0 + rho * s_sel / k)
    sigma_full = np.linalg.svd(np.vstack(blocks), compute_uv=False)
    lam_full = np.zeros(k)
    r = min(k, sigma_full.shape[0])
    lam_full[:r] = sigma_full[:r] ** 2
    c_ub2 = float(np.sum(np.log2(1.0 + rho * lam_full)))
    return c_ub1, c_ub2


def capacity_of_plan(plan: FilterPlan, rho: float) -> CapacityReport:
    """Evaluate a formulated plan at all interfaces.

    The panel-output capacity uses the stored per-panel equivalent
    channels (valid because panel filters are semi-unitary); the CDSP
    capacity treats the final equivalent channel with identity noise,
    which the semi-unitary cascade guarantees.
    """
    h = plan.channel.entries
    k = plan.channel.num_users
    c_antenna = channel_capacity(h, rho)
    g_z = np.zeros((k, k), dtype=np.complex128)
    for eq in plan.panel_equiv:
        g_z += _gram(eq)
    c_z = logdet_hpd(np.eye(k) + rho * 0.5 * (g_z + g_z.conj().T)) / LN2
    c_cdsp = channel_capacity(plan.cdsp_channel, rho)
    c_ub1, c_ub2 = upper_bounds(plan.channel.blocks(), plan.topology.panel_outputs, rho)
    return CapacityReport(
        c_antenna=c_antenna,
        c_z=c_z,
        c_cdsp=c_cdsp,
        c_ub1=c_ub1,
        c_ub2=c_ub2,
        normalized=c_cdsp / c_antenna,
    )
