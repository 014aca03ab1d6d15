"""
Circuit representation: nodes, devices, text format, validation, builders
=========================================================================

PURPOSE
    Hold the switch-level circuit graph (rails, inputs, outputs, internal
    nodes, a clock reference, and transistor instances), read and write the
    line-oriented netlist format, validate structural invariants, and build
    the shipped cell fixtures: the two static inverters and the two dynamic
    pass-transistor cells (half adder and 1-trit multiplier).

FORMAT
    One directive per line, '#' starts a comment:

        .name  <identifier>
        .vdd   <volts>
        .default_chirality <n1>,<n2>
        rail   <name> 0|half|vdd
        clock  <name>
        input  <name>
        output <name> [precharge=gnd|half|vdd]
        node   <name> [cap=<femtofarads>f]
        dev <name> pol=n|p [chir=<n1>,<n2>] tubes=<int> pitch=<nm>
            g=<node> d=<node> s=<node> [role=precharge]

    Devices without chir= take the netlist's default chirality.  Outputs
    without precharge= are static (always driven); dynamic outputs declare
    the level they are pre-set to each cycle.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .device import (
    ChiralityVector,
    DeviceSpec,
    METALLIC,
    POLARITY_N,
    POLARITY_P,
    ROLE_LOGIC,
    ROLE_PRECHARGE,
    classify_conduction,
)

__all__ = [
    "KIND_RAIL0",
    "KIND_RAIL_HALF",
    "KIND_RAIL_VDD",
    "KIND_INPUT",
    "KIND_OUTPUT",
    "KIND_INTERNAL",
    "KIND_CLOCK",
    "RAIL_KINDS",
    "Node",
    "PhaseSchedule",
    "TechConfig",
    "Netlist",
    "Diagnostic",
    "NetlistError",
    "NetlistSyntaxError",
    "NetlistValidationError",
    "level_voltage",
    "parse_netlist",
    "emit_netlist",
    "validate",
    "parse_tech",
    "load_tech",
    "build_nti",
    "build_pti",
    "build_tha",
    "build_tmul",
    "wrap_testbench",
    "substitute_chirality",
    "THA_ON_PATHS",
    "TMUL_ON_PATHS",
]

# Node kinds
KIND_RAIL0 = "rail0"
KIND_RAIL_HALF = "rail_half"
KIND_RAIL_VDD = "rail_vdd"
KIND_INPUT = "input"
KIND_OUTPUT = "output"
KIND_INTERNAL = "internal"
KIND_CLOCK = "clock_ref"

RAIL_KINDS = (KIND_RAIL0, KIND_RAIL_HALF, KIND_RAIL_VDD)

# Precharge/rail level symbols used in the text format.
_LEVEL_TO_KIND = {"0": KIND_RAIL0, "gnd": KIND_RAIL0, "half": KIND_RAIL_HALF, "vdd": KIND_RAIL_VDD}
_KIND_TO_LEVEL = {KIND_RAIL0: "0", KIND_RAIL_HALF: "half", KIND_RAIL_VDD: "vdd"}
_PRECHARGE_LEVELS = ("gnd", "half", "vdd")


def level_voltage(level: str, vdd: float) -> float:
    """Voltage of a symbolic level ('gnd'/'0', 'half', 'vdd') at a given vdd."""
    if level in ("gnd", "0"):
        return 0.0
    if level == "half":
        return vdd / 2.0
    if level == "vdd":
        return vdd
    raise ValueError(f"unknown level {level!r}")


@dataclass(frozen=True)
class Node:
    name: str
    kind: str
    precharge: str | None = None  # 'gnd' | 'half' | 'vdd', outputs only
    extra_cap: float = 0.0  # farads of explicit extra load


@dataclass(frozen=True)
class PhaseSchedule:
    """Two-phase discipline: every cycle runs Precharge then Evaluate."""

    phases: tuple[str, str] = ("precharge", "evaluate")
    cycle_period: float = 1e-9  # seconds, 1/f


@dataclass(frozen=True)
class TechConfig:
    """Technology and environment parameters.

    Leakage entries are order-of-magnitude placeholders: absolute static
    power is not a calibration target, only its structure (per-device sum
    plus contention term) is.
    """

    r0_per_tube: float = 30e3  # ohms: single-tube R at half-supply overdrive
    v_ov_floor: float = 0.05  # V: overdrive floor for barely-on devices
    c_gate_per_tube: float = 6e-17  # F per tube of gate terminal
    c_junction: float = 2e-17  # F per drain/source terminal
    c_node_base: float = 1e-16  # F of wiring per node
    oxide_thickness_nominal: float = 4.0  # nm
    i_sub: float = 4e-11  # A per device, subthreshold leakage
    i_gate: float = 1e-11  # A per device, gate leakage
    i_junct: float = 1e-11  # A per device, junction leakage
    f: float = 1e9  # Hz operating frequency
    vdd: float = 0.9  # V supply

    def __post_init__(self) -> None:
        for name in (
            "r0_per_tube",
            "v_ov_floor",
            "c_gate_per_tube",
            "c_junction",
            "c_node_base",
            "oxide_thickness_nominal",
            "f",
            "vdd",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"TechConfig.{name} must be strictly positive")
        for name in ("i_sub", "i_gate", "i_junct"):
            if getattr(self, name) < 0:
                raise ValueError(f"TechConfig.{name} may not be negative")

    @property
    def sti_input_cap(self) -> float:
        """Input capacitance of one standard-inverter load: two gates at the
        default three tubes each."""
        return 2 * 3 * self.c_gate_per_tube


def parse_tech(text: str) -> TechConfig:
    """Parse a flat key=value tech file (floats, '#' comments)."""
    values: dict[str, float] = {}
    valid = {f.name for f in dataclasses.fields(TechConfig)}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"tech file line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in valid:
            raise ValueError(f"tech file line {lineno}: unknown parameter {key!r}")
        try:
            values[key] = float(val.strip())
        except ValueError as exc:
            raise ValueError(f"tech file line {lineno}: bad number {val.strip()!r}") from exc
    return TechConfig(**values)


def load_tech(path: str) -> TechConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_tech(fh.read())


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int | None = None

    def __str__(self) -> str:
        where = f" (line {self.line})" if self.line is not None else ""
        return f"[{self.code}]{where} {self.message}"


class NetlistError(Exception):
    pass


class NetlistSyntaxError(NetlistError):
    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class NetlistValidationError(NetlistError):
    def __init__(self, diagnostics: list[Diagnostic]) -> None:
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class Netlist:
    """Immutable circuit container.  Mutating operations return copies."""

    name: str
    nodes: dict[str, Node]
    devices: tuple[DeviceSpec, ...]
    default_chirality: ChiralityVector
    tech: TechConfig
    vdd: float
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def schedule(self) -> PhaseSchedule:
        return PhaseSchedule(cycle_period=1.0 / self.tech.f)

    def device(self, name: str) -> DeviceSpec:
        for d in self.devices:
            if d.name == name:
                return d
        raise KeyError(name)

    def nodes_of_kind(self, *kinds: str) -> list[Node]:
        return [n for n in self.nodes.values() if n.kind in kinds]

    def input_names(self) -> list[str]:
        return [n.name for n in self.nodes_of_kind(KIND_INPUT)]

    def output_names(self) -> list[str]:
        return [n.name for n in self.nodes_of_kind(KIND_OUTPUT)]

    def distinct_chiralities(self) -> set[ChiralityVector]:
        return {d.chirality for d in self.devices}

    def node_capacitances(self) -> dict[str, float]:
        """Per-node capacitance: base wiring + explicit load + attached gate
        and junction terminals.  Gate terms honor the per-device cap_scale
        hook (oxide-thickness and tube-density variation)."""
        t = self.tech
        caps = {name: t.c_node_base + node.extra_cap for name, node in self.nodes.items()}
        for dev in self.devices:
            caps[dev.gate] += dev.tubes * t.c_gate_per_tube * dev.cap_scale
            caps[dev.drain] += t.c_junction
            caps[dev.source] += t.c_junction
        return caps

    def replace(self, **changes) -> "Netlist":
        return dataclasses.replace(self, **changes)


# ---------------------------------------------------------------------------
# Parser / emitter
# ---------------------------------------------------------------------------


def _parse_chirality(token: str, lineno: int) -> ChiralityVector:
    try:
        n1_s, n2_s = token.split(",")
        return ChiralityVector(int(n1_s), int(n2_s))
    except (ValueError, TypeError) as exc:
        raise NetlistSyntaxError(f"bad chirality {token!r}: {exc}", lineno) from exc


def parse_netlist(text: str, tech: TechConfig | None = None) -> Netlist:
    """Parse the text format; raises on syntax errors and on validation
    diagnostics (unknown node, duplicate device, metallic chirality, ...)."""
    tech = tech or TechConfig()
    name = "circuit"
    vdd: float | None = None
    default_chir = ChiralityVector(19, 0)
    nodes: dict[str, Node] = {}
    devices: list[DeviceSpec] = []
    dev_lines: dict[str, int] = {}

    def add_node(node: Node, lineno: int) -> None:
        if node.name in nodes:
            raise NetlistSyntaxError(f"node {node.name!r} declared twice", lineno)
        nodes[node.name] = node

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        try:
            if head == ".name":
                name = parts[1]
            elif head == ".vdd":
                vdd = float(parts[1])
            elif head == ".default_chirality":
                default_chir = _parse_chirality(parts[1], lineno)
            elif head == "rail":
                _, nname, level = parts
                if level not in _LEVEL_TO_KIND:
                    raise NetlistSyntaxError(f"bad rail level {level!r}", lineno)
                add_node(Node(nname, _LEVEL_TO_KIND[level]), lineno)
            elif head == "clock":
                add_node(Node(parts[1], KIND_CLOCK), lineno)
            elif head == "input":
                add_node(Node(parts[1], KIND_INPUT), lineno)
            elif head == "output":
                nname = parts[1]
                precharge = None
                for opt in parts[2:]:
                    key, _, val = opt.partition("=")
                    if key == "precharge" and val in _PRECHARGE_LEVELS:
                        precharge = val
                    else:
                        raise NetlistSyntaxError(f"bad output option {opt!r}", lineno)
                add_node(Node(nname, KIND_OUTPUT, precharge=precharge), lineno)
            elif head == "node":
                nname = parts[1]
                extra = 0.0
                for opt in parts[2:]:
                    key, _, val = opt.partition("=")
                    if key == "cap" and val.endswith("f"):
                        extra = float(val[:-1]) * 1e-15
                    else:
                        raise NetlistSyntaxError(f"bad node option {opt!r}", lineno)
                add_node(Node(nname, KIND_INTERNAL, extra_cap=extra), lineno)
            elif head == "dev":
                dname = parts[1]
                opts: dict[str, str] = {}
                for opt in parts[2:]:
                    key, eq, val = opt.partition("=")
                    if not eq:
                        raise NetlistSyntaxError(f"bad device option {opt!r}", lineno)
                    opts[key] = val
                missing = {"pol", "tubes", "pitch", "g", "d", "s"} - set(opts)
                if missing:
                    raise NetlistSyntaxError(
                        f"device {dname!r} missing {sorted(missing)}", lineno
                    )
                pol = {"n": POLARITY_N, "p": POLARITY_P}.get(opts["pol"])
                if pol is None:
                    raise NetlistSyntaxError(f"bad polarity {opts['pol']!r}", lineno)
                chir = (
                    _parse_chirality(opts["chir"], lineno) if "chir" in opts else default_chir
                )
                role = ROLE_LOGIC
                if "role" in opts:
                    if opts["role"] != "precharge":
                        raise NetlistSyntaxError(f"bad role {opts['role']!r}", lineno)
                    role = ROLE_PRECHARGE
                devices.append(
                    DeviceSpec(
                        name=dname,
                        polarity=pol,
                        chirality=chir,
                        tubes=int(opts["tubes"]),
                        pitch=float(opts["pitch"]),
                        gate=opts["g"],
                        drain=opts["d"],
                        source=opts["s"],
                        role=role,
                    )
                )
                dev_lines.setdefault(dname, lineno)
            else:
                raise NetlistSyntaxError(f"unknown directive {head!r}", lineno)
        except NetlistSyntaxError:
            raise
        except (IndexError, ValueError) as exc:
            raise NetlistSyntaxError(f"cannot parse {raw.strip()!r}: {exc}", lineno) from exc

    tech = dataclasses.replace(tech, vdd=vdd) if vdd is not None else tech
    nl = Netlist(
        name=name,
        nodes=nodes,
        devices=tuple(devices),
        default_chirality=default_chir,
        tech=tech,
        vdd=tech.vdd,
    )
    diagnostics = validate(nl)
    if diagnostics:
        raise NetlistValidationError(diagnostics)
    return nl


def emit_netlist(nl: Netlist) -> str:
    """Canonical text form; parse(emit(parse(t))) == parse(t)."""
    out = [f".name {nl.name}", f".vdd {nl.vdd:g}"]
    out.append(f".default_chirality {nl.default_chirality.n1},{nl.default_chirality.n2}")
    for node in nl.nodes.values():
        if node.kind in RAIL_KINDS:
            out.append(f"rail {node.name} {_KIND_TO_LEVEL[node.kind]}")
    for node in nl.nodes.values():
        if node.kind == KIND_CLOCK:
            out.append(f"clock {node.name}")
    for node in nl.nodes.values():
        if node.kind == KIND_INPUT:
            out.append(f"input {node.name}")
    for node in nl.nodes.values():
        if node.kind == KIND_OUTPUT:
            suffix = f" precharge={node.precharge}" if node.precharge else ""
            out.append(f"output {node.name}{suffix}")
    for node in nl.nodes.values():
        if node.kind == KIND_INTERNAL:
            suffix = f" cap={node.extra_cap * 1e15:g}f" if node.extra_cap else ""
            out.append(f"node {node.name}{suffix}")
    for d in nl.devices:
        role = " role=precharge" if d.role == ROLE_PRECHARGE else ""
        out.append(
            f"dev {d.name} pol={d.polarity} chir={d.chirality.n1},{d.chirality.n2}"
            f" tubes={d.tubes} pitch={d.pitch:g} g={d.gate} d={d.drain} s={d.source}{role}"
        )
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate(nl: Netlist) -> list[Diagnostic]:
    """Structural invariant check; empty list iff the netlist is well-formed."""
    diags: list[Diagnostic] = []

    seen: set[str] = set()
    for dev in nl.devices:
        if dev.name in seen:
            diags.append(Diagnostic("duplicate-device", f"device name {dev.name!r} reused"))
        seen.add(dev.name)

    for dev in nl.devices:
        for terminal, node_name in (("gate", dev.gate), ("drain", dev.drain), ("source", dev.source)):
            if node_name not in nl.nodes:
                diags.append(
                    Diagnostic(
                        "unknown-node",
                        f"device {dev.name}: {terminal} references unknown node {node_name!r}",
                    )
                )
        if classify_conduction(dev.chirality) == METALLIC:
            diags.append(
                Diagnostic(
                    "metallic-chirality",
                    f"device {dev.name}: chirality {dev.chirality} is metallic and cannot switch",
                )
            )

    # Inputs are ideal sources: no device channel may touch them.
    for dev in nl.devices:
        for node_name in (dev.drain, dev.source):
            node = nl.nodes.get(node_name)
            if node is not None and node.kind == KIND_INPUT:
                diags.append(
                    Diagnostic(
                        "input-driven",
                        f"device {dev.name}: channel terminal on input node {node_name!r}",
                    )
                )

    # Rails are unique per level.
    for kind in RAIL_KINDS:
        rails = [n.name for n in nl.nodes_of_kind(kind)]
        if len(rails) > 1:
            diags.append(Diagnostic("duplicate-rail", f"multiple {kind} rails: {rails}"))

    # Every dynamic output needs a precharge device tied to the declared rail.
    for node in nl.nodes_of_kind(KIND_OUTPUT):
        if node.precharge is None:
            continue
        found = False
        for dev in nl.devices:
            if dev.role != ROLE_PRECHARGE or node.name not in (dev.drain, dev.source):
                continue
            other = dev.source if dev.drain == node.name else dev.drain
            other_kind = nl.nodes[other].kind if other in nl.nodes else None
            if other_kind in RAIL_KINDS:
                found = True
                if _KIND_TO_LEVEL[other_kind].replace("0", "gnd") != node.precharge:
                    diags.append(
                        Diagnostic(
                            "precharge-mismatch",
                            f"output {node.name!r} declares precharge={node.precharge} but "
                            f"{dev.name} ties it to the {_KIND_TO_LEVEL[other_kind]} rail",
                        )
                    )
        if not found:
            diags.append(
                Diagnostic(
                    "missing-precharge",
                    f"output {node.name!r} declares precharge={node.precharge} "
                    "but no precharge device drives it from a rail",
                )
            )

    # Precharge devices must have a rail on one channel side.
    for dev in nl.devices:
        if dev.role != ROLE_PRECHARGE:
            continue
        kinds = {nl.nodes[t].kind for t in (dev.drain, dev.source) if t in nl.nodes}
        if not kinds & set(RAIL_KINDS):
            diags.append(
                Diagnostic(
                    "precharge-unconnected",
                    f"precharge device {dev.name} does not touch any rail",
                )
            )

    return diags


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

_TUBES = 3
_PITCH = 20.0

_C10 = ChiralityVector(10, 0)
_C19 = ChiralityVector(19, 0)
_C28 = ChiralityVector(28, 0)


def _dev(name, pol, chir, g, d, s, role=ROLE_LOGIC) -> DeviceSpec:
    return DeviceSpec(
        name=name, polarity=pol, chirality=chir, tubes=_TUBES, pitch=_PITCH,
        gate=g, drain=d, source=s, role=role,
    )


def _inverter_pair(prefix, pull_up_chir, pull_down_chir, inp, out):
    """Complementary inverter: P pull-up to vdd, N pull-down to gnd."""
    return [
        _dev(f"{prefix}_P", POLARITY_P, pull_up_chir, inp, out, "vdd"),
        _dev(f"{prefix}_N", POLARITY_N, pull_down_chir, inp, out, "gnd"),
    ]


def _base_nodes(outputs: dict[str, str | None], internals: list[str], clocked: bool) -> dict[str, Node]:
    nodes: dict[str, Node] = {
        "gnd": Node("gnd", KIND_RAIL0),
        "half": Node("half", KIND_RAIL_HALF),
        "vdd": Node("vdd", KIND_RAIL_VDD),
    }
    if clocked:
        nodes["clk"] = Node("clk", KIND_CLOCK)
    for inp in ("A", "B")[: 2 if len(outputs) > 1 else 1]:
        nodes[inp] = Node(inp, KIND_INPUT)
    for out, pre in outputs.items():
        nodes[out] = Node(out, KIND_OUTPUT, precharge=pre)
    for name in internals:
        nodes[name] = Node(name, KIND_INTERNAL)
    return nodes


def _finish(name, nodes, devices, default_chir, tech, meta) -> Netlist:
    nl = Netlist(
        name=name,
        nodes=nodes,
        devices=tuple(devices),
        default_chirality=default_chir,
        tech=tech,
        vdd=tech.vdd,
        meta=meta,
    )
    diags = validate(nl)
    if diags:  # builders must construct clean netlists
        raise NetlistValidationError(diags)
    return nl


def build_nti(tech: TechConfig | None = None) -> Netlist:
    """Static negative ternary inverter: low-Vt pull-down, high-Vt pull-up."""
    tech = tech or TechConfig()
    nodes = _base_nodes({"Y": None}, [], clocked=False)
    devices = _inverter_pair("NT", _C10, _C19, "A", "Y")
    return _finish("nti", nodes, devices, _C19, tech, {"title": "negative ternary inverter"})


def build_pti(tech: TechConfig | None = None) -> Netlist:
    """Static positive ternary inverter: low-Vt pull-up, high-Vt pull-down."""
    tech = tech or TechConfig()
    nodes = _base_nodes({"Y": None}, [], clocked=False)
    devices = _inverter_pair("PT", _C19, _C10, "A", "Y")
    return _finish("pti", nodes, devices, _C19, tech, {"title": "positive ternary inverter"})


def build_tha(tech: TechConfig | None = None) -> Netlist:
    """Dynamic ternary half adder (36 devices, 2 chiralities).

    Sum is precharged to vdd/2 each cycle and conditionally re-driven through
    one of six series pass chains; Carry is pre-discharged to 0 and driven to
    vdd/2 when A+B >= 3.  Chains hang off clock-gated rail foots (C18, C19,
    FC) so no rail can fight the precharge devices; the level detectors are
    built from the two usable threshold classes — direct gates for ">=1",
    low-diameter gates for "=2", and NTI/PTI outputs for "=0" / "<=1".
    """
    tech = tech or TechConfig()
    internals = [
        "nA", "pA", "nB", "pB", "sv", "sg",
        "m00", "m02", "m11a", "m11b", "m11c", "m12a", "m12b", "m20", "m21a", "m21b",
        "ch", "k1", "k2", "k3", "k4",
    ]
    nodes = _base_nodes({"Sum": "half", "Carry": "gnd"}, internals, clocked=True)

    devices = [
        # Output precharge
        _dev("C1", POLARITY_P, _C19, "clk", "Sum", "half", role=ROLE_PRECHARGE),
        _dev("C20", POLARITY_N, _C19, "clk", "Carry", "gnd", role=ROLE_PRECHARGE),
        # Clock-gated rail foots (evaluate only)
        _dev("C18", POLARITY_N, _C19, "clk", "sv", "vdd"),
        _dev("C19", POLARITY_N, _C19, "clk", "sg", "gnd"),
        _dev("FC", POLARITY_N, _C19, "clk", "ch", "half"),
        # Sum chain: A=0, B=0 -> '0'
        _dev("C2", POLARITY_N, _C19, "nA", "m00", "sg"),
        _dev("C10", POLARITY_N, _C19, "nB", "Sum", "m00"),
        # Sum chain: A=0, B=2 -> '2'
        _dev("C3", POLARITY_N, _C19, "nA", "m02", "sv"),
        _dev("C11", POLARITY_N, _C10, "B", "Sum", "m02"),
        # Sum chain: A=1, B=1 -> '2'
        _dev("C5", POLARITY_N, _C19, "A", "m11a", "sv"),
        _dev("C7", POLARITY_N, _C19, "pA", "m11b", "m11a"),
        _dev("C12", POLARITY_N, _C19, "B", "m11c", "m11b"),
        _dev("C13", POLARITY_N, _C19, "pB", "Sum", "m11c"),
        # Sum chain: A=1, B=2 -> '0'
        _dev("C4", POLARITY_N, _C19, "A", "m12a", "sg"),
        _dev("C6", POLARITY_N, _C19, "pA", "m12b", "m12a"),
        _dev("C14", POLARITY_N, _C10, "B", "Sum", "m12b"),
        # Sum chain: A=2, B=0 -> '2'
        _dev("C9", POLARITY_N, _C10, "A", "m20", "sv"),
        _dev("C15", POLARITY_N, _C19, "nB", "Sum", "m20"),
        # Sum chain: A=2, B=1 -> '0'
        _dev("C8", POLARITY_N, _C10, "A", "m21a", "sg"),
        _dev("C16", POLARITY_N, _C19, "B", "m21b", "m21a"),
        _dev("C17", POLARITY_N, _C19, "pB", "Sum", "m21b"),
        # Carry chain: A=1, B=2 -> '1'
        _dev("C21", POLARITY_N, _C19, "A", "k1", "ch"),
        _dev("C22", POLARITY_N, _C19, "pA", "k2", "k1"),
        _dev("C24", POLARITY_N, _C10, "B", "Carry", "k2"),
        # Carry chains: A=2, B=1 -> '1' and A=2, B=2 -> '1'
        _dev("C23", POLARITY_N, _C10, "A", "k3", "ch"),
        _dev("C25", POLARITY_N, _C19, "B", "k4", "k3"),
        _dev("C26", POLARITY_N, _C19, "pB", "Carry", "k4"),
        _dev("C27", POLARITY_N, _C10, "B", "Carry", "k3"),
    ]
    # Input inverters: NTI and PTI per input.
    devices += _inverter_pair("NTA", _C10, _C19, "A", "nA")
    devices += _inverter_pair("PTA", _C19, _C10, "A", "pA")
    devices += _inverter_pair("NTB", _C10, _C19, "B", "nB")
    devices += _inverter_pair("PTB", _C19, _C10, "B", "pB")

    return _finish("tha", nodes, devices, _C19, tech, {"title": "dynamic ternary half adder"})


def build_tmul(tech: TechConfig | None = None) -> Netlist:
    """Dynamic ternary 1-trit multiplier (25 devices, 3 chiralities).

    Both outputs are pre-discharged to 0.  Product is driven to vdd/2 for
    {1*1, 2*2} and to vdd for {1*2, 2*1}; Carry is driven to vdd/2 only for
    2*2.  The 1*1 chain detects "x<=1" with complementary P devices gated
    directly by the inputs; the cross terms use PTI outputs instead.  C8 and
    C15 pre-discharge the deep-chain middles to stop charge sharing.
    """
    tech = tech or TechConfig()
    internals = ["pA", "pB", "ph", "pv", "ch",
                 "t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8", "t9"]
    nodes = _base_nodes({"Product": "gnd", "Carry": "gnd"}, internals, clocked=True)

    devices = [
        # Output precharge
        _dev("C1", POLARITY_N, _C19, "clk", "Product", "gnd", role=ROLE_PRECHARGE),
        _dev("C16", POLARITY_N, _C19, "clk", "Carry", "gnd", role=ROLE_PRECHARGE),
        # Internal precharge (charge-sharing mitigation on the deep chains)
        _dev("C8", POLARITY_N, _C19, "clk", "t3", "gnd", role=ROLE_PRECHARGE),
        _dev("C15", POLARITY_N, _C19, "clk", "t8", "gnd", role=ROLE_PRECHARGE),
        # Clock-gated rail foots
        _dev("FP", POLARITY_N, _C28, "clk", "ph", "half"),
        _dev("FV", POLARITY_N, _C28, "clk", "pv", "vdd"),
        _dev("FC", POLARITY_N, _C28, "clk", "ch", "half"),
        # Product chain: 2*2 -> '1'
        _dev("C2", POLARITY_N, _C10, "A", "t1", "ph"),
        _dev("C3", POLARITY_N, _C10, "B", "Product", "t1"),
        # Product chain: 1*1 -> '1'  (A>=1, A<=1, B>=1, B<=1; all direct-gated)
        _dev("C4", POLARITY_N, _C28, "A", "t2", "ph"),
        _dev("C5", POLARITY_P, _C28, "A", "t3", "t2"),
        _dev("C6", POLARITY_N, _C28, "B", "t4", "t3"),
        _dev("C7", POLARITY_P, _C28, "B", "Product", "t4"),
        # Product chain: 2*1 -> '2'
        _dev("C9", POLARITY_N, _C10, "A", "t5", "pv"),
        _dev("C10", POLARITY_N, _C28, "B", "t6", "t5"),
        _dev("C11", POLARITY_N, _C28, "pB", "Product", "t6"),
        # Product chain: 1*2 -> '2'
        _dev("C12", POLARITY_N, _C28, "A", "t7", "pv"),
        _dev("C13", POLARITY_N, _C28, "pA", "t8", "t7"),
        _dev("C14", POLARITY_N, _C10, "B", "Product", "t8"),
        # Carry chain: 2*2 -> '1'
        _dev("C17", POLARITY_N, _C10, "A", "t9", "ch"),
        _dev("C18", POLARITY_N, _C10, "B", "Carry", "t9"),
    ]
    devices += _inverter_pair("PTA", _C28, _C10, "A", "pA")
    devices += _inverter_pair("PTB", _C28, _C10, "B", "pB")

    return _finish(
        "tmul", nodes, devices, _C28, tech, {"title": "dynamic ternary 1-trit multiplier"}
    )


# Expected conducting-set rows for the shipped fixtures, keyed by (A, B).
# Retained outputs contribute their precharge device; driven outputs
# contribute the devices of the conducting rail path (foots excluded).
THA_ON_PATHS: dict[tuple[int, int], frozenset[str]] = {
    (0, 0): frozenset({"C2", "C10", "C20"}),
    (0, 1): frozenset({"C1", "C20"}),
    (0, 2): frozenset({"C3", "C11", "C20"}),
    (1, 0): frozenset({"C1", "C20"}),
    (1, 1): frozenset({"C5", "C7", "C12", "C13", "C20"}),
    (1, 2): frozenset({"C4", "C6", "C14", "C21", "C22", "C24"}),
    (2, 0): frozenset({"C9", "C15", "C20"}),
    (2, 1): frozenset({"C8", "C16", "C17", "C23", "C25", "C26"}),
    (2, 2): frozenset({"C1", "C23", "C27"}),
}

TMUL_ON_PATHS: dict[tuple[int, int], frozenset[str]] = {
    (0, 0): frozenset({"C1", "C16"}),
    (0, 1): frozenset({"C1", "C16"}),
    (0, 2): frozenset({"C1", "C16"}),
    (1, 0): frozenset({"C1", "C16"}),
    (1, 1): frozenset({"C4", "C5", "C6", "C7", "C16"}),
    (1, 2): frozenset({"C12", "C13", "C14", "C16"}),
    (2, 0): frozenset({"C1", "C16"}),
    (2, 1): frozenset({"C9", "C10", "C11", "C16"}),
    (2, 2): frozenset({"C2", "C3", "C17", "C18"}),
}


# ---------------------------------------------------------------------------
# Netlist transformations
# ---------------------------------------------------------------------------


def wrap_testbench(nl: Netlist, fanout: int) -> Netlist:
    """Attach the measurement bench: ideal re-driven sources at the inputs
    (no structural change — inputs are ideal already) and a fanout-of-n
    standard-inverter load as extra capacitance on every output."""
    if fanout not in (1, 2, 4):
        raise ValueError(f"unsupported fanout {fanout}; expected 1, 2, or 4")
    load = fanout * nl.tech.sti_input_cap
    nodes = {
        name: (
            dataclasses.replace(node, extra_cap=node.extra_cap + load)
            if node.kind == KIND_OUTPUT
            else node
        )
        for name, node in nl.nodes.items()
    }
    meta = dict(nl.meta)
    meta["fanout"] = fanout
    return nl.replace(nodes=nodes, meta=meta)


def substitute_chirality(
    nl: Netlist, frm: ChiralityVector, to: ChiralityVector
) -> Netlist:
    """Rewrite every device of chirality `frm` to `to` (must be semiconductor)."""
    if classify_conduction(to) == METALLIC:
        raise ValueError(f"target chirality {to} is metallic")
    devices = tuple(
        dataclasses.replace(d, chirality=to) if d.chirality == frm else d for d in nl.devices
    )
    default = to if nl.default_chirality == frm else nl.default_chirality
    return nl.replace(devices=devices, default_chirality=default)
