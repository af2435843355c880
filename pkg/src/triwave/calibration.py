"""Fit the three free link-budget scalars to reference operating points.

The propagation model has knobs that field measurements pin down only in
combination: the EIRP budget (transmit power through cable and implementation
losses), the effective side-lobe floor of the array, and the effective loss
of a vehicle-roof reflection.  Rather than guess them independently, this
module solves them exactly from three observable targets:

* the interference-free SNR of one serving hop,
* the SINR drop caused by the near side-lobe leak alone, and
* the SINR drop caused by that leak's vehicle-roof echo alone.

The algebra is closed-form because the near leak travels the same distance
as the serving hop: path terms cancel, leaving the drop a function of the
main/side gain split only.  The solved transmit power absorbs every constant
the model does not separate (amplifier, losses, antenna efficiency), so its
absolute value is a fitting constant, not a hardware prediction -- report it
with that caveat.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .antenna import AntennaPattern
from .geometry import Topology
from .link_budget import (RadioParams, db_to_linear, linear_to_db,
                          noise_power_dbm, path_db)


@dataclass(frozen=True)
class CalibrationTargets:
    """Reference operating points the solved scalars must reproduce."""

    baseline_snr_db: float = 41.1808
    near_side_lobe_delta_db: float = 0.5966
    near_vehicle_echo_delta_db: float = 0.3972

    def __post_init__(self):
        if self.near_side_lobe_delta_db <= 0:
            raise ValueError("near_side_lobe_delta_db must be positive, got "
                             f"{self.near_side_lobe_delta_db}")
        if not 0 < self.near_vehicle_echo_delta_db < self.near_side_lobe_delta_db:
            raise ValueError(
                "near_vehicle_echo_delta_db must be in (0, near_side_lobe_delta_db); "
                f"got {self.near_vehicle_echo_delta_db} vs "
                f"{self.near_side_lobe_delta_db} (an echo cannot outpower its source)")


@dataclass(frozen=True)
class CalibratedSystem:
    """Radio and pattern with the solved scalars substituted in."""

    radio: RadioParams              # tx_power_dbm solved
    pattern: AntennaPattern         # side_gain_dbi solved
    roof_echo_loss_db: float        # effective vehicle-roof reflection loss
    targets: CalibrationTargets


def delta_to_interference_dbm(delta_db: float, noise_dbm: float) -> float:
    """Interference power that degrades SNR by delta_db: invert 10log10(1+I/N)."""
    if delta_db <= 0:
        raise ValueError(f"delta_db must be positive, got {delta_db}")
    return noise_dbm + linear_to_db(db_to_linear(delta_db) - 1.0)


def calibrate(topo: Topology, pattern: AntennaPattern, radio: RadioParams,
              targets: CalibrationTargets | None = None) -> CalibratedSystem:
    """Solve transmit power, side-lobe floor and roof-echo loss.

    Solution order (each step one unknown):

    1. tx_power from the baseline SNR: S = P + 2*G_main + path(L).
    2. side gain from the near-leak drop: the leak runs the same distance L
       with side-lobe gain at both ends, so I = P + 2*G_side + path(L).
    3. roof-echo loss as the dB gap between the near leak and its echo.
    """
    if targets is None:
        targets = CalibrationTargets()
    # The step-2 geometry needs the one-hop-ahead offender seen through side
    # lobes at both ends; its offset from boresight is 180 - 2*theta degrees.
    near_offset = 180.0 - 2.0 * topo.theta_deg
    if near_offset <= pattern.beamwidth_deg / 2.0:
        raise ValueError(
            "near offender falls inside the main lobe (offset "
            f"{near_offset:.2f} deg vs half beamwidth "
            f"{pattern.beamwidth_deg / 2.0:.2f} deg); the side-floor solve "
            "assumes side-lobe coupling")

    noise = noise_power_dbm(radio)
    hop_path = path_db(radio, topo.hop_length)

    tx_power = (targets.baseline_snr_db + noise
                - 2.0 * pattern.main_gain_dbi - hop_path)

    i_near = delta_to_interference_dbm(targets.near_side_lobe_delta_db, noise)
    side_gain = (i_near - tx_power - hop_path) / 2.0
    if side_gain >= pattern.main_gain_dbi:
        raise ValueError(
            f"targets imply side gain {side_gain:.2f} dBi at or above the "
            f"main gain {pattern.main_gain_dbi:.2f} dBi; inconsistent targets")

    i_echo = delta_to_interference_dbm(targets.near_vehicle_echo_delta_db, noise)
    roof_loss = i_near - i_echo

    return CalibratedSystem(
        radio=replace(radio, tx_power_dbm=tx_power),
        pattern=replace(pattern, side_gain_dbi=side_gain),
        roof_echo_loss_db=roof_loss,
        targets=targets,
    )
