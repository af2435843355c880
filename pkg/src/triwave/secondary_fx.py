"""Secondary interference paths in a zig-zag relay chain.

With the beam geometry chosen so that no simultaneously active transmitter
puts a *main lobe* on a victim receiver, what is left are second-order
couplings:

* side-lobe leakage from co-slot transmitters (the node one hop ahead of a
  receiver, and the node three hops behind it, are the two strongest);
* copies of those side-lobe paths reflected off vehicle roofs under the
  beam;
* a double bounce off buildings lining the road, which can arrive inside
  the receiver's main lobe when the walls are close.

Every function here works in received power (dBm) against the thermal
noise floor and reports degradation as 10*log10(1 + I/N) -- the drop from
SNR to SINR, which is independent of the serving signal level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .antenna import AntennaPattern, offset_between
from .geometry import Topology
from .link_budget import (RadioParams, db_to_linear, noise_power_dbm,
                          received_power_dbm)


class EffectKind(Enum):
    NEAR_SIDE_LOBE = "near_side_lobe"
    FAR_SIDE_LOBE = "far_side_lobe"
    NEAR_VEHICLE_ECHO = "near_vehicle_echo"
    FAR_VEHICLE_ECHO = "far_vehicle_echo"
    BUILDING_DOUBLE_BOUNCE = "building_double_bounce"


@dataclass(frozen=True)
class EffectScenario:
    """One interference path, identified by where the offender sits.

    ``separation`` counts hops between the victim receiver and the
    interfering transmitter along the chain; ``ahead`` says which way.
    Co-slot transmitters always sit an odd number of hops from the victim
    receiver, so even separations are rejected.  ``reflection_loss_db`` is
    the extra attenuation of a reflected copy (0 for direct side lobes).
    """

    kind: EffectKind
    separation: int
    ahead: bool
    reflection_loss_db: float = 0.0

    def __post_init__(self):
        if self.separation == 0:
            raise ValueError(
                "separation 0 is the serving link's own roof echo; the "
                "path difference is a tiny fraction of a wavelength, the "
                "copy adds constructively and is not an interference path")
        if self.separation < 0 or self.separation % 2 == 0:
            raise ValueError(
                "co-slot transmitters sit an odd number of hops from the "
                f"victim receiver; got separation {self.separation}")
        if self.separation == 1 and not self.ahead:
            raise ValueError(
                "one hop behind the victim receiver is its own serving "
                "transmitter, not an interferer")
        if self.reflection_loss_db < 0:
            raise ValueError(
                f"reflection_loss_db must be >= 0, got {self.reflection_loss_db}")

    @classmethod
    def near_side_lobe(cls) -> "EffectScenario":
        """The transmitter one hop ahead, leaking backwards at hop range."""
        return cls(EffectKind.NEAR_SIDE_LOBE, 1, True)

    @classmethod
    def far_side_lobe(cls) -> "EffectScenario":
        """The transmitter three hops behind, leaking forwards."""
        return cls(EffectKind.FAR_SIDE_LOBE, 3, False)

    @classmethod
    def near_vehicle_echo(cls, roof_loss_db: float) -> "EffectScenario":
        """Roof-reflected copy of the near side-lobe path."""
        return cls(EffectKind.NEAR_VEHICLE_ECHO, 1, True, roof_loss_db)

    @classmethod
    def far_vehicle_echo(cls, roof_loss_db: float) -> "EffectScenario":
        """Roof-reflected copy of the far side-lobe path."""
        return cls(EffectKind.FAR_VEHICLE_ECHO, 3, False, roof_loss_db)


def _lattice_pos(topo: Topology, index: int) -> tuple[float, float]:
    # Planar position on the (possibly extended) alternating lattice.
    return (index * topo.hop_dx,
            0.0 if index % 2 == 0 else topo.road_width)


# Fixed victim pair used to realize scenarios geometrically; the lattice is
# translation invariant, so any interior receiver gives the same answers.
_VICTIM_RX = 3
_VICTIM_TX = 2


def _interferer_index(scenario: EffectScenario) -> int:
    return (_VICTIM_RX + scenario.separation if scenario.ahead
            else _VICTIM_RX - scenario.separation)


def interferer_distance(topo: Topology, scenario: EffectScenario) -> float:
    """Planar distance from the interfering transmitter to the victim RX."""
    rx = _lattice_pos(topo, _VICTIM_RX)
    src = _lattice_pos(topo, _interferer_index(scenario))
    return math.hypot(rx[0] - src[0], rx[1] - src[1])


def interference_offsets(topo: Topology,
                         scenario: EffectScenario) -> tuple[float, float]:
    """Angular offsets (degrees) at the interferer's TX and the victim's RX.

    The interferer aims one hop forward at its own receiver; the victim
    receiver aims back at its serving transmitter.  Both offsets are the
    angle between that boresight and the interference direction.
    """
    rx = _lattice_pos(topo, _VICTIM_RX)
    tx = _lattice_pos(topo, _VICTIM_TX)
    src_i = _interferer_index(scenario)
    src = _lattice_pos(topo, src_i)
    aim = _lattice_pos(topo, src_i + 1)
    tx_off = offset_between((aim[0] - src[0], aim[1] - src[1]),
                            (rx[0] - src[0], rx[1] - src[1]))
    rx_off = offset_between((tx[0] - rx[0], tx[1] - rx[1]),
                            (src[0] - rx[0], src[1] - rx[1]))
    return tx_off, rx_off


def interference_dbm(topo: Topology, pattern: AntennaPattern,
                     radio: RadioParams, scenario: EffectScenario) -> float:
    """Received interference power (dBm) for one scenario.

    Reflected copies are modelled on the straight-path length: the roof
    detour adds a negligible fraction to paths tens of meters long, so the
    reflection loss is the only difference from the direct side-lobe path.
    """
    tx_off, rx_off = interference_offsets(topo, scenario)
    dist = interferer_distance(topo, scenario)
    return (received_power_dbm(radio, dist,
                               pattern.gain_at(tx_off), pattern.gain_at(rx_off))
            - scenario.reflection_loss_db)


def sinr_delta_db(noise_dbm: float, *interference_dbm_terms: float) -> float:
    """SNR-to-SINR degradation 10*log10(1 + sum(I)/N) for given powers."""
    if not interference_dbm_terms:
        raise ValueError("need at least one interference term")
    ratio = sum(db_to_linear(i - noise_dbm) for i in interference_dbm_terms)
    return 10.0 * math.log10(1.0 + ratio)


def scenario_delta_db(topo: Topology, pattern: AntennaPattern,
                      radio: RadioParams, scenario: EffectScenario) -> float:
    """Degradation caused by a single scenario acting alone."""
    return sinr_delta_db(noise_power_dbm(radio),
                         interference_dbm(topo, pattern, radio, scenario))


def baseline_snr_db(topo: Topology, pattern: AntennaPattern,
                    radio: RadioParams) -> float:
    """Interference-free SNR of one serving hop (main lobe both ends)."""
    s = received_power_dbm(radio, topo.hop_length,
                           pattern.main_gain_dbi, pattern.main_gain_dbi)
    return s - noise_power_dbm(radio)


def combined_delta_db(topo: Topology, pattern: AntennaPattern,
                      radio: RadioParams, roof_loss_db: float) -> float:
    """All four canonical secondary paths acting at once.

    Near and far side lobes plus their roof echoes; contributions from
    transmitters five or more hops out repeat the far geometry at longer
    range and are dropped.
    """
    n = noise_power_dbm(radio)
    terms = [
        interference_dbm(topo, pattern, radio, EffectScenario.near_side_lobe()),
        interference_dbm(topo, pattern, radio, EffectScenario.far_side_lobe()),
        interference_dbm(topo, pattern, radio,
                         EffectScenario.near_vehicle_echo(roof_loss_db)),
        interference_dbm(topo, pattern, radio,
                         EffectScenario.far_vehicle_echo(roof_loss_db)),
    ]
    return sinr_delta_db(n, *terms)


def reconfigured_worst_case(topo: Topology, pattern: AntennaPattern,
                            radio: RadioParams,
                            baseline_sinr_db: float = 25.0
                            ) -> tuple[float, float]:
    """Worst alignment after a blockage-triggered re-route.

    When a hop is re-routed around an obstruction, the unlucky receiver can
    face both direct side-lobe leaks (near and far) simultaneously.  Returns
    ``(delta_db, residual_sinr_db)`` against the given baseline; the delta
    itself does not depend on the baseline.
    """
    n = noise_power_dbm(radio)
    delta = sinr_delta_db(
        n,
        interference_dbm(topo, pattern, radio, EffectScenario.near_side_lobe()),
        interference_dbm(topo, pattern, radio, EffectScenario.far_side_lobe()),
    )
    return delta, baseline_sinr_db - delta


# ---------------------------------------------------------------------------
# Building double bounce

# Per-bounce reflection loss of common facade materials, dB.
MATERIAL_REFLECTION_DB = {
    "concrete": 7.5,
    "brick": 14.8,
    "glass": 8.0,
}


def material_reflection_db(name: str) -> float:
    try:
        return MATERIAL_REFLECTION_DB[name.lower()]
    except KeyError:
        known = ", ".join(sorted(MATERIAL_REFLECTION_DB))
        raise ValueError(f"unknown facade material {name!r}; known: {known}") from None


@dataclass(frozen=True)
class BuildingConfig:
    """Facades lining both sides of the road, parallel to it.

    ``setback_d1`` is the gap between a node rail and the wall behind it
    (assumed equal on both sides); ``reflection_db`` is the per-bounce loss.
    """

    setback_d1: float
    reflection_db: float
    bounces: int = 2

    def __post_init__(self):
        if self.setback_d1 <= 0:
            raise ValueError(f"setback_d1 must be positive, got {self.setback_d1}")
        if self.reflection_db < 0:
            raise ValueError(f"reflection_db must be >= 0, got {self.reflection_db}")
        if self.bounces < 1:
            raise ValueError(f"bounces must be >= 1, got {self.bounces}")


def building_unfolded_path(topo: Topology,
                           building: BuildingConfig) -> tuple[float, float]:
    """Mirror-unfolded double-bounce path from 3 hops back, and its offset.

    Unfolding the two wall reflections turns the bent path into a straight
    line: the along-road run stays 3 hops while the lateral legs stack to
    3*road_width + 4*setback.  The returned offset is the angle between
    that line and a hop boresight; by symmetry it applies at both ends.
    """
    run = 3.0 * topo.hop_dx
    lateral = 3.0 * topo.road_width + 4.0 * building.setback_d1
    length = math.hypot(run, lateral)
    offset = math.degrees(math.atan2(lateral, run)) - topo.theta_deg
    return length, offset


def building_interference_dbm(topo: Topology, pattern: AntennaPattern,
                              radio: RadioParams,
                              building: BuildingConfig) -> float:
    """Worst-case double-bounce power at the victim receiver.

    The departure is charged main-lobe gain regardless of the computed
    offset: among all transmitters along the chain there is always one
    whose main lobe illuminates the wall, and we budget for the strongest
    arrival.  The receive side uses the actual pattern at the unfolded
    arrival angle.
    """
    length, offset = building_unfolded_path(topo, building)
    rx_gain = pattern.gain_at(offset)
    power = received_power_dbm(radio, length, pattern.main_gain_dbi, rx_gain)
    return power - building.bounces * building.reflection_db


def building_delta_db(topo: Topology, pattern: AntennaPattern,
                      radio: RadioParams, building: BuildingConfig) -> float:
    """SINR degradation from the double bounce acting alone."""
    return sinr_delta_db(noise_power_dbm(radio),
                         building_interference_dbm(topo, pattern, radio, building))
