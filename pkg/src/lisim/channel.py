"""Scenario geometry, user placement, and the near-field LoS channel.

The antenna surface sits in the z=0 plane, centered at the origin, with
users strictly in front of it (z > 0). Antennas occupy a uniform grid of
half-wavelength cells (configurable spacing) and are ordered panel by
panel: panels tile the surface row-major, and antennas inside a panel are
row-major as well, so the rows of the channel matrix stack per-panel
blocks in index order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class Scenario:
    """Physical description of surface, user volume, carrier and SNR.

    The user volume is an axis-aligned box directly in front of the
    surface, laterally centered on it, starting ``standoff_offset_m``
    away from the z=0 plane.
    """

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

    def __post_init__(self) -> None:
        positive = {
            "lis_width_m": self.lis_width_m,
            "lis_height_m": self.lis_height_m,
            "volume_depth_m": self.volume_depth_m,
            "volume_width_m": self.volume_width_m,
            "volume_height_m": self.volume_height_m,
            "carrier_hz": self.carrier_hz,
            "snr_rho": self.snr_rho,
        }
        for name, value in positive.items():
            if not value > 0.0:
                raise ValueError(f"{name} must be > 0, got {value!r}")
        if self.standoff_offset_m < 0.0:
            raise ValueError("standoff_offset_m must be >= 0")
        if self.num_users < 1:
            raise ValueError("num_users must be >= 1")
        if self.antenna_spacing is not None and not self.antenna_spacing > 0.0:
            raise ValueError("antenna_spacing must be > 0")
        if self.grid_cols < 1 or self.grid_rows < 1:
            raise ValueError("surface too small for even one antenna cell")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    @property
    def spacing(self) -> float:
        return self.antenna_spacing if self.antenna_spacing is not None else self.wavelength / 2.0

    @property
    def grid_cols(self) -> int:
        # number of spacing-sized cells along the width; epsilon guards exact multiples
        return int(math.floor(self.lis_width_m / self.spacing + 1e-9))

    @property
    def grid_rows(self) -> int:
        return int(math.floor(self.lis_height_m / self.spacing + 1e-9))

    @property
    def num_antennas(self) -> int:
        return self.grid_cols * self.grid_rows


@dataclass(frozen=True)
class UserSet:
    """K user positions in meters, all strictly in front of the surface."""

    positions: np.ndarray

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions, dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 1:
            raise ValueError(f"positions must be a (K, 3) array, got {pos.shape}")
        if not np.all(pos[:, 2] > 0.0):
            raise ValueError("all user z coordinates must be > 0")
        object.__setattr__(self, "positions", pos)

    @property
    def num_users(self) -> int:
        return int(self.positions.shape[0])


@dataclass(frozen=True)
class PanelPartition:
    """Row-index partition of the channel matrix into per-panel blocks."""

    num_panels: int
    panel_antennas: int
    row_index_sets: tuple = field(repr=False, default=())

    def __post_init__(self) -> None:
        if len(self.row_index_sets) != self.num_panels:
            raise ValueError("one index set per panel required")
        total = self.num_panels * self.panel_antennas
        seen = np.concatenate([np.asarray(s, dtype=np.intp) for s in self.row_index_sets])
        if seen.size != total or not np.array_equal(np.sort(seen), np.arange(total)):
            raise ValueError("index sets must partition the antenna rows")


@dataclass(frozen=True)
class ChannelMatrix:
    """M x K channel with antenna positions and its panel partition."""

    entries: np.ndarray
    antenna_positions: np.ndarray
    partition: PanelPartition

    def __post_init__(self) -> None:
        m = self.entries.shape[0]
        if self.antenna_positions.shape != (m, 3):
            raise ValueError("antenna_positions must be (M, 3)")
        if self.partition.num_panels * self.partition.panel_antennas != m:
            raise ValueError("partition does not cover all antenna rows")

    @property
    def num_antennas(self) -> int:
        return int(self.entries.shape[0])

    @property
    def num_users(self) -> int:
        return int(self.entries.shape[1])

    def block(self, i: int) -> np.ndarray:
        """Channel rows of panel ``i``."""
        return self.entries[np.asarray(self.partition.row_index_sets[i], dtype=np.intp)]

    def blocks(self) -> list[np.ndarray]:
        return [self.block(i) for i in range(self.partition.num_panels)]


def sample_users(scenario: Scenario, seed: int) -> UserSet:
    """Draw K user positions i.i.d. uniform over the scenario volume.

    Deterministic for a fixed seed (PCG64). Draw order is fixed: for each
    user in turn, x, then y, then z, so results are reproducible across
    implementations consuming the same generator stream.
    """
    rng = np.random.default_rng(seed)
    half_w = scenario.volume_width_m / 2.0
    half_h = scenario.volume_height_m / 2.0
    z0 = scenario.standoff_offset_m
    low = np.array([-half_w, -half_h, z0])
    high = np.array([half_w, half_h, z0 + scenario.volume_depth_m])
    positions = rng.uniform(low, high, size=(scenario.num_users, 3))
    return UserSet(positions)


def los_channel(user, antenna, wavelength: float) -> complex:
    """Line-of-sight channel coefficient between one user and one antenna.

    Spherical-wave model: amplitude sqrt(z_u) / (2 sqrt(pi) d^{3/2}) and
    phase exp(-2 pi j d / wavelength), with d the Euclidean distance.
    On boresight (antenna directly below the user) this reduces to
    |h| = 1 / (2 sqrt(pi) d).
    """
    ux, uy, uz = (float(c) for c in user)
    ax, ay, az = (float(c) for c in antenna)
    if uz <= 0.0:
        raise ValueError("user must be strictly in front of the surface (z > 0)")
    d = math.sqrt((ux - ax) ** 2 + (uy - ay) ** 2 + (uz - az) ** 2)
    if d == 0.0:
        raise ValueError("user and antenna coincide, distance is zero")
    amp = math.sqrt(uz) / (2.0 * math.sqrt(math.pi) * d**1.5)
    return amp * complex(math.cos(2.0 * math.pi * d / wavelength), -math.sin(2.0 * math.pi * d / wavelength))


def antenna_grid(scenario: Scenario, num_panels: int) -> np.ndarray:
    """Antenna positions (M, 3) in panel-major order.

    Panels are square antenna tiles, row-major over the panel grid;
    antennas within a tile are row-major too. Raises when the grid does
    not tile into ``num_panels`` squares.
    """
    cols, rows = scenario.grid_cols, scenario.grid_rows
    m = cols * rows
    if num_panels < 1 or m % num_panels != 0:
        raise ValueError(f"{num_panels} panels do not divide {m} antennas")
    per_panel = m // num_panels
    tile = math.isqrt(per_panel)
    if tile * tile != per_panel:
        raise ValueError(f"panel size {per_panel} is not a square antenna tile")
    if cols % tile != 0 or rows % tile != 0:
        raise ValueError(f"grid {rows}x{cols} cannot be tiled by {tile}x{tile} panels")
    if (cols // tile) * (rows // tile) != num_panels:
        raise ValueError(
            f"grid {rows}x{cols} with tile {tile} yields "
            f"{(cols // tile) * (rows // tile)} panels, expected {num_panels}"
        )
    spacing = scenario.spacing
    xs = (np.arange(cols) - (cols - 1) / 2.0) * spacing
    ys = (np.arange(rows) - (rows - 1) / 2.0) * spacing
    panel_cols = cols // tile
    positions = np.zeros((m, 3))
    idx = 0
    for panel in range(num_panels):
        pr, pc = divmod(panel, panel_cols)
        for r in range(tile):
            for c in range(tile):
                positions[idx, 0] = xs[pc * tile + c]
                positions[idx, 1] = ys[pr * tile + r]
                idx += 1
    return positions


def build_channel(scenario: Scenario, users: UserSet, num_panels: int) -> ChannelMatrix:
    """LoS channel matrix over the scenario's antenna grid, panel-partitioned.

    Entry (m, k) is ``los_channel(user k, antenna m, wavelength)``. Rows are
    in panel-major order, so the partition blocks are contiguous row ranges
    and stacking them in index order reproduces the full matrix.
    """
    if users.num_users != scenario.num_users:
        raise ValueError("user set size does not match scenario")
    apos = antenna_grid(scenario, num_panels)
    upos = users.positions
    diff = upos[None, :, :] - apos[:, None, :]
    dist = np.sqrt(np.sum(diff**2, axis=2))
    if np.any(dist == 0.0):
        raise ValueError("a user coincides with an antenna, distance is zero")
    amp = np.sqrt(upos[:, 2])[None, :] / (2.0 * np.sqrt(np.pi) * dist**1.5)
    entries = amp * np.exp(-2j * np.pi * dist / scenario.wavelength)
    per_panel = apos.shape[0] // num_panels
    sets = tuple(np.arange(i * per_panel, (i + 1) * per_panel) for i in range(num_panels))
    partition = PanelPartition(num_panels, per_panel, sets)
    return ChannelMatrix(entries, apos, partition)
