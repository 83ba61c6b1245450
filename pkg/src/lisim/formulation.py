"""Per-panel reduction filters: reduced matched filter and the sequential
interference-cancelling chain.

Both methods emit semi-unitary filters (W^H W = I), which keeps filtered
noise white so downstream stages can treat their input as a fresh channel
with identity noise covariance. The interference-cancelling method passes
a K x K state matrix Z from panel to panel; each panel whitens its local
channel against the accumulated state, keeps the strongest left singular
directions, and adds its own contribution back into Z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import inv_sqrt_psd, logdet_hpd, svd

ZERO_COLUMN_TOL = 1e-14


@dataclass(frozen=True)
class PanelFilter:
    """Reduction filter of one panel (or tree node).

    ``w`` is the applied filter, ``q`` the semi-unitary basis it was built
    from. The interference-cancelling method uses w = q directly; the
    matched-filter method sets q = w as well once columns are orthonormalized.
    """

    w: np.ndarray
    q: np.ndarray
    panel_index: int = 0


@dataclass(frozen=True)
class InterferenceState:
    """Accumulated K x K interference state, starts at identity."""

    z: np.ndarray

    @property
    def num_users(self) -> int:
        return int(self.z.shape[0])

    def objective_bits(self) -> float:
        """log2 det of the state, the quantity the chain ascends."""
        return logdet_hpd(self.z) / math.log(2.0)


def identity_state(num_users: int) -> InterferenceState:
    return InterferenceState(np.eye(num_users, dtype=np.complex128))


def _qr_positive(a: np.ndarray) -> np.ndarray:
    """Thin QR orthonormal factor with real-positive diagonal of R.

    Preserves column order and span; the first column equals the first
    input column up to positive real scaling.
    """
    q, r = np.linalg.qr(a)
    diag = np.diag(r)
    mags = np.abs(diag)
    phases = np.where(mags > 0.0, diag / np.where(mags > 0.0, mags, 1.0), 1.0)
    return q * phases[None, :]


def rmf_filter(
    h_panel: np.ndarray,
    n_out: int,
    panel_index: int = 0,
    orthonormalize: bool = True,
) -> PanelFilter:
    """Reduced matched filter: keep the strongest user columns.

    Selects the ``n_out`` columns of the panel channel with the largest
    squared norms (ties resolved toward the lower user index), normalizes
    them, and by default orthonormalizes them in selection order so the
    filter is semi-unitary. With ``orthonormalize=False`` the raw
    unit-norm columns are kept instead; capacity evaluation then has to
    account for the correlated filter.
    """
    h = np.asarray(h_panel, dtype=np.complex128)
    m, k = h.shape
    if not 1 <= n_out <= min(m, k):
        raise ValueError(f"n_out must be in [1, min(M_p, K)] = [1, {min(m, k)}], got {n_out}")
    norms2 = np.sum(np.abs(h) ** 2, axis=0)
    order = np.argsort(-norms2, kind="stable")[:n_out]
    norms = np.sqrt(norms2[order])
    if np.any(norms < ZERO_COLUMN_TOL):
        raise ValueError("selected channel column is numerically zero")
    cols = h[:, order] / norms[None, :]
    w = _qr_positive(cols) if orthonormalize else cols
    return PanelFilter(w, w, panel_index)


def iic_panel_step(
    h_panel: np.ndarray,
    z_prev: InterferenceState,
    n_out: int,
    rho: float,
    panel_index: int = 0,
) -> tuple[PanelFilter, InterferenceState]:
    """One panel of the interference-cancelling chain.

    Whitens the local channel against the incoming state, takes the
    ``n_out`` strongest left singular vectors as Q (this maximizes
    det(rho H^H Q Q^H H + Z) over semi-unitary Q), and returns the state
    updated with the panel's contribution. When the whitened channel has
    fewer nonzero singular values than ``n_out``, the remaining columns
    are the deterministic orthonormal complement from the full SVD.
    """
    h = np.asarray(h_panel, dtype=np.complex128)
    m, k = h.shape
    if n_out > m:
        raise ValueError(f"n_out={n_out} exceeds panel dimension {m}")
    if z_prev.z.shape != (k, k):
        raise ValueError("interference state size does not match user count")
    whitener = inv_sqrt_psd(z_prev.z)
    h_white = h @ whitener
    dec = svd(h_white, full_matrices=n_out > min(m, k))
    q = dec.u[:, :n_out]
    g = h.conj().T @ q
    z_new = z_prev.z + rho * (g @ g.conj().T)
    z_new = 0.5 * (z_new + z_new.conj().T)
    return PanelFilter(q, q, panel_index), InterferenceState(z_new)


def iic_chain(
    panels,
    n_out: int,
    rho: float,
    passes: int = 1,
    improvement_tol: float | None = None,
) -> tuple[list[PanelFilter], InterferenceState]:
    """Sequential interference-cancelling chain over all panels.

    Starts from the identity state and visits panels in index order. On
    later passes each panel's previous contribution is removed from the
    state before it re-optimizes, making every step a block-coordinate
    ascent on log det Z, so the objective never decreases. When
    ``improvement_tol`` is set, iteration stops early once a full pass
    improves the objective by less than that relative amount.
    """
    panels = [np.asarray(h, dtype=np.complex128) for h in panels]
    if not panels:
        raise ValueError("need at least one panel")
    if passes < 1:
        raise ValueError("passes must be >= 1")
    k = panels[0].shape[1]
    z = np.eye(k, dtype=np.complex128)
    contributions: list[np.ndarray | None] = [None] * len(panels)
    filters: list[PanelFilter] = [PanelFilter(np.zeros((0, 0)), np.zeros((0, 0)))] * len(panels)
    prev_objective: float | None = None
    for _ in range(passes):
        for i, h in enumerate(panels):
            if contributions[i] is not None:
                z = z - contributions[i]
            filt, state = iic_panel_step(h, InterferenceState(z), n_out, rho, panel_index=i)
            contributions[i] = state.z - z
            filters[i] = filt
            z = state.z
        if improvement_tol is not None:
            objective = logdet_hpd(z) / math.log(2.0)
            if prev_objective is not None and objective - prev_objective <= improvement_tol * max(
                1.0, abs(prev_objective)
            ):
                break
            prev_objective = objective
    return filters, InterferenceState(z)
