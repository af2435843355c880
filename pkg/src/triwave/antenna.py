"""Flat-top (sectored) antenna pattern.

The gain model is two-level: a constant main-lobe gain inside the half
beamwidth and a constant floor everywhere else.  That is the standard
tractable stand-in for a phased-array pattern in mmWave system analysis,
and it is what makes the interference conditions in :mod:`triwave.geometry`
exact angle comparisons rather than integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AntennaPattern:
    """Two-level directional gain pattern.

    Attributes:
        beamwidth_deg: full main-lobe width phi (degrees).
        main_gain_dbi: gain inside |offset| <= phi/2.
        side_gain_dbi: gain everywhere else; must be below main_gain_dbi.
    """

    beamwidth_deg: float
    main_gain_dbi: float
    side_gain_dbi: float

    def __post_init__(self):
        if not 0.0 < self.beamwidth_deg < 180.0:
            raise ValueError(
                f"beamwidth_deg must be in (0, 180), got {self.beamwidth_deg}")
        if self.side_gain_dbi >= self.main_gain_dbi:
            raise ValueError(
                "side_gain_dbi must be below main_gain_dbi, got "
                f"{self.side_gain_dbi} >= {self.main_gain_dbi}")

    def gain_at(self, offset_deg: float) -> float:
        """Gain (dBi) at an angular offset from boresight.

        The main lobe is inclusive at exactly phi/2: a receiver sitting on
        the beam edge still collects main-lobe power.
        """
        return (self.main_gain_dbi
                if abs(offset_deg) <= self.beamwidth_deg / 2.0
                else self.side_gain_dbi)

    def gain_array(self, offsets_deg: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`gain_at`."""
        offsets_deg = np.asarray(offsets_deg, dtype=float)
        return np.where(np.abs(offsets_deg) <= self.beamwidth_deg / 2.0,
                        self.main_gain_dbi, self.side_gain_dbi)


# 15-degree beam, 23.18 dBi main lobe. The side floor here is a nominal
# catalogue value; link-budget calibration replaces it with a fitted floor
# (see triwave.calibration) because the delta between main and side gain is
# what the secondary-effect magnitudes actually pin down.
DEFAULT_PATTERN = AntennaPattern(
    beamwidth_deg=15.0,
    main_gain_dbi=23.18,
    side_gain_dbi=2.0,
)


def offset_between(boresight_xy: tuple[float, float],
                   target_xy: tuple[float, float]) -> float:
    """Unsigned angle (degrees) between a boresight vector and a target vector.

    Both arguments are 2-D direction vectors (not points).  Uses
    atan2(|cross|, dot) for numerical stability near 0 and 180 degrees.
    """
    bx, by = boresight_xy
    tx, ty = target_xy
    if bx == 0.0 and by == 0.0:
        raise ValueError("boresight vector must be nonzero")
    if tx == 0.0 and ty == 0.0:
        raise ValueError("target vector must be nonzero")
    cross = bx * ty - by * tx
    dot = bx * tx + by * ty
    return math.degrees(math.atan2(abs(cross), dot))
