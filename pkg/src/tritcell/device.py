"""
Carbon-nanotube FET device model
================================

PURPOSE
    Map a nanotube chirality vector (n1, n2) to the physical and electrical
    properties that the switch-level engine needs: tube diameter, threshold
    voltage, metallic/semiconductor classification, geometry class, on/off
    switch state, and an equivalent on-resistance.

METHOD
    Diameter follows the standard zigzag-normalized form

        D = (a / pi) * sqrt(n1^2 + n2^2 + n1*n2)        [nm]

    with the carbon spacing `a` chosen so that a/pi = 0.0783 nm per index.
    The threshold voltage uses the collapsed inverse-diameter form

        Vt = 0.43 / D                                    [V]

    which agrees with the full (sqrt(3)/3) * a * E_pi / D band-gap expression
    to within a fraction of a percent for the tubes of interest.

    Switching is ideal: an N device conducts iff v_gate > Vt, a P device iff
    (vdd - v_gate) > Vt.  Conduction is compared against the gate voltage
    directly (not gate-to-source), which reproduces the three-level on/off
    matrix exactly and keeps the conduction graph solvable without per-device
    source tracking.  Switches pass ideal levels; there is no threshold drop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "ChiralityVector",
    "PhysicalConstants",
    "DeviceSpec",
    "DEFAULT_CONSTANTS",
    "METALLIC",
    "SEMICONDUCTOR",
    "ZIGZAG",
    "ARMCHAIR",
    "CHIRAL",
    "POLARITY_N",
    "POLARITY_P",
    "ROLE_LOGIC",
    "ROLE_PRECHARGE",
    "diameter",
    "threshold_voltage",
    "classify_conduction",
    "classify_geometry",
    "device_vt",
    "switch_state",
    "on_resistance",
]

# Conduction classes
METALLIC = "metallic"
SEMICONDUCTOR = "semiconductor"

# Geometry classes
ZIGZAG = "zigzag"
ARMCHAIR = "armchair"
CHIRAL = "chiral"

# Device polarity / role tags used throughout the netlist and engine.
POLARITY_N = "n"
POLARITY_P = "p"
ROLE_LOGIC = "logic"
ROLE_PRECHARGE = "precharge"

# nm of diameter per unit of sqrt(n1^2 + n2^2 + n1*n2).
_NM_PER_INDEX = 0.0783

# V*nm: collapsed band-gap constant for Vt = _VT_NUMERATOR / D.
_VT_NUMERATOR = 0.43


@dataclass(frozen=True)
class ChiralityVector:
    """Roll-up vector (n1, n2) of a nanotube; not both indices may be zero."""

    n1: int
    n2: int

    def __post_init__(self) -> None:
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError(f"chirality indices must be non-negative, got ({self.n1},{self.n2})")
        if self.n1 == 0 and self.n2 == 0:
            raise ValueError("chirality (0,0) is not a tube")

    def __str__(self) -> str:
        return f"({self.n1},{self.n2})"


@dataclass(frozen=True)
class PhysicalConstants:
    """Material constants for the diameter / threshold relations.

    a      -- carbon-carbon spacing, nm.  The default is 0.0783*pi so the
              diameter coefficient a/pi is exactly 0.0783 nm per index.
    e_pi   -- C-C bond energy, eV; only used by the full-form threshold
              cross-check, the collapsed 0.43/D form carries its own constant.
    """

    a: float = _NM_PER_INDEX * math.pi  # nm
    e_pi: float = 3.033  # eV

    def __post_init__(self) -> None:
        if self.a <= 0 or self.e_pi <= 0:
            raise ValueError("physical constants must be strictly positive")


DEFAULT_CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class DeviceSpec:
    """One transistor instance inside a netlist.

    gate/drain/source are node-name references resolved by the netlist layer.
    role distinguishes ordinary pass/logic devices from precharge devices,
    which the engine drives by phase instead of by gate voltage.

    vt_override / r_scale / cap_scale are process-variation hooks used by the
    Monte Carlo sampler; they default to the unperturbed device and are not
    part of the serialized netlist format.
    """

    name: str
    polarity: str  # POLARITY_N | POLARITY_P
    chirality: ChiralityVector
    tubes: int
    pitch: float  # nm, center-to-center tube spacing
    gate: str
    drain: str
    source: str
    role: str = ROLE_LOGIC
    vt_override: float | None = field(default=None, compare=False)
    r_scale: float = field(default=1.0, compare=False)
    cap_scale: float = field(default=1.0, compare=False)

    def __post_init__(self) -> None:
        if self.polarity not in (POLARITY_N, POLARITY_P):
            raise ValueError(f"device {self.name}: polarity must be 'n' or 'p'")
        if self.role not in (ROLE_LOGIC, ROLE_PRECHARGE):
            raise ValueError(f"device {self.name}: role must be 'logic' or 'precharge'")
        if self.tubes < 1:
            raise ValueError(f"device {self.name}: tubes must be >= 1")
        if self.pitch <= 0:
            raise ValueError(f"device {self.name}: pitch must be > 0")
        # Note: a metallic chirality is deliberately NOT rejected here; it is
        # reported as a validation diagnostic at the netlist level so that
        # malformed netlists can be constructed and then diagnosed.


def diameter(cv: ChiralityVector, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Tube diameter in nm: (a/pi) * sqrt(n1^2 + n2^2 + n1*n2)."""
    return (consts.a / math.pi) * math.sqrt(cv.n1 * cv.n1 + cv.n2 * cv.n2 + cv.n1 * cv.n2)


def classify_conduction(cv: ChiralityVector) -> str:
    """METALLIC iff (n1 - n2) is a multiple of 3, else SEMICONDUCTOR."""
    return METALLIC if (cv.n1 - cv.n2) % 3 == 0 else SEMICONDUCTOR


def classify_geometry(cv: ChiralityVector) -> str:
    """ZIGZAG iff an index is zero; ARMCHAIR iff n1 == n2; else CHIRAL."""
    if cv.n1 == 0 or cv.n2 == 0:
        return ZIGZAG
    if cv.n1 == cv.n2:
        return ARMCHAIR
    return CHIRAL


def threshold_voltage(cv: ChiralityVector, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Threshold voltage in volts, 0.43/D; metallic tubes have no threshold."""
    if classify_conduction(cv) == METALLIC:
        raise ValueError(f"chirality {cv} is metallic and has no threshold voltage")
    return _VT_NUMERATOR / diameter(cv, consts)


def threshold_voltage_full_form(
    cv: ChiralityVector, consts: PhysicalConstants = DEFAULT_CONSTANTS
) -> float:
    """Band-gap form (sqrt(3)/3) * a * E_pi / D; cross-check for 0.43/D."""
    if classify_conduction(cv) == METALLIC:
        raise ValueError(f"chirality {cv} is metallic and has no threshold voltage")
    return (math.sqrt(3.0) / 3.0) * consts.a * consts.e_pi / diameter(cv, consts)


def device_vt(dev: DeviceSpec, consts: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Effective threshold of a device instance (honors Monte Carlo override)."""
    if dev.vt_override is not None:
        return dev.vt_override
    return threshold_voltage(dev.chirality, consts)


def switch_state(dev: DeviceSpec, v_gate: float, vdd: float) -> bool:
    """True (On) / False (Off) for a logic device at the given gate voltage.

    N: On iff v_gate > Vt.  P: On iff (vdd - v_gate) > Vt.  Precharge-role
    devices ignore this predicate at simulation time (the engine drives them
    by phase); calling this on one still evaluates the plain voltage rule.
    """
    vt = device_vt(dev)
    if dev.polarity == POLARITY_N:
        return v_gate > vt
    return (vdd - v_gate) > vt


def _overdrive(dev: DeviceSpec, v_gate: float, vdd: float) -> float:
    vt = device_vt(dev)
    if dev.role == ROLE_PRECHARGE:
        # Phase-driven switch: modeled as fully enhanced regardless of v_gate.
        return vdd - vt
    if dev.polarity == POLARITY_N:
        return v_gate - vt
    return vdd - v_gate - vt


def on_resistance(dev: DeviceSpec, v_gate: float, vdd: float, tech) -> float:
    """Equivalent channel resistance of a conducting device, ohms.

    R = (r0_per_tube / tubes) * (vdd/2) / max(V_ov, v_ov_floor)

    normalized so that a device at exactly half-supply overdrive has
    R = r0_per_tube / tubes.  Monotone decreasing in both tube count and
    overdrive; the floor keeps barely-on devices finite.
    """
    v_ov = _overdrive(dev, v_gate, vdd)
    if dev.role != ROLE_PRECHARGE and not switch_state(dev, v_gate, vdd):
        raise ValueError(f"device {dev.name} is off at v_gate={v_gate:.3f}; no on-resistance")
    base = tech.r0_per_tube / dev.tubes
    return base * (vdd / 2.0) / max(v_ov, tech.v_ov_floor) / dev.r_scale
