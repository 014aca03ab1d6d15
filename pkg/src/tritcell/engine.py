"""
Two-phase switch-level simulator
================================

PURPOSE
    Evaluate dynamic pass-transistor circuits cycle by cycle.  Every cycle
    runs a Precharge phase (clock low: precharge devices on, clock-gated
    foots off) followed by an Evaluate phase (clock high: the reverse), and
    each phase is solved to a conduction fixed point.

METHOD
    A phase solution is the fixed point of: decide each device's switch
    state from current node voltages, group nodes into components connected
    by conducting channels, then re-level each component — a component
    containing exactly one distinct source voltage (rail / input / clock
    reference) takes it; one containing several is a contention event,
    resolved toward the source reachable through the least series
    resistance; one containing none keeps its charge, settling to the
    capacitance-weighted average of its members.  Iteration is bounded by
    twice the device count; circuits that flip forever raise
    OscillationError.
"""

from __future__ import annotations

import heapq
import itertools
import json
from dataclasses import dataclass, field

from .device import DeviceSpec, ROLE_PRECHARGE, device_vt, on_resistance
from .netlist import (
    KIND_CLOCK,
    KIND_INPUT,
    KIND_OUTPUT,
    KIND_RAIL0,
    KIND_RAIL_HALF,
    KIND_RAIL_VDD,
    Netlist,
    RAIL_KINDS,
    level_voltage,
)
from .ternary import (
    TRITS,
    VoltageLevelMap,
    IndeterminateLevel,
    trit_to_voltage,
    voltage_to_trit,
)

__all__ = [
    "PRECHARGE",
    "EVALUATE",
    "SimState",
    "ContentionIncident",
    "CycleRecord",
    "SimTrace",
    "OscillationError",
    "clock_gated_devices",
    "initial_state",
    "solve_phase",
    "run_cycle",
    "run_sequence",
    "VerifyRow",
    "VerifyReport",
    "exhaustive_verify",
    "transition_pattern",
]

PRECHARGE = "precharge"
EVALUATE = "evaluate"

_CONVERGENCE_EPS = 1e-12


def clock_gated_devices(nl: Netlist) -> frozenset[str]:
    """Logic devices whose gate is the clock reference (the rail foots)."""
    return frozenset(
        d.name
        for d in nl.devices
        if d.role != ROLE_PRECHARGE and nl.nodes[d.gate].kind == KIND_CLOCK
    )


class OscillationError(RuntimeError):
    """The phase solver failed to reach a conduction fixed point."""


@dataclass(frozen=True)
class SimState:
    voltages: dict[str, float]
    phase: str = PRECHARGE
    cycle_index: int = 0


@dataclass(frozen=True)
class ContentionIncident:
    """Several sources shorted through conducting channels."""

    cycle_index: int
    phase: str
    nodes: frozenset[str]
    source_levels: tuple[float, ...]  # distinct contending voltages, ascending
    series_resistance: float  # ohms, least rail-to-rail path
    current: float  # amperes, vdd / series_resistance

    def describe(self) -> str:
        levels = "/".join(f"{v:.3g}V" for v in self.source_levels)
        return (
            f"cycle {self.cycle_index} {self.phase}: {levels} shorted across "
            f"{sorted(self.nodes)} ({self.series_resistance:.3g} ohm, "
            f"{self.current * 1e6:.3g} uA)"
        )


@dataclass(frozen=True)
class CycleRecord:
    index: int
    inputs: dict[str, int]
    after_precharge: dict[str, float]
    after_evaluate: dict[str, float]
    outputs: dict[str, int | None]
    conducting: dict[str, frozenset[str]]  # phase -> device names
    active_devices: frozenset[str]  # ON-path + retention devices
    driven_paths: dict[str, tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]]
    swings: tuple[tuple[str, str, float], ...]  # (node, phase, |dV|)
    contentions: tuple[ContentionIncident, ...]
    iterations: dict[str, int]


@dataclass
class SimTrace:
    netlist_name: str
    vdd: float
    cycles: list[CycleRecord] = field(default_factory=list)
    warmup_cycles: int = 0

    def measured(self) -> list[CycleRecord]:
        return self.cycles[self.warmup_cycles :]

    def to_json_lines(self) -> str:
        lines = []
        for c in self.cycles:
            lines.append(
                json.dumps(
                    {
                        "cycle": c.index,
                        "inputs": c.inputs,
                        "outputs": c.outputs,
                        "active": sorted(c.active_devices),
                        "conducting": {p: sorted(s) for p, s in c.conducting.items()},
                        "swings": [[n, p, round(dv, 9)] for n, p, dv in c.swings],
                        "contentions": [i.describe() for i in c.contentions],
                    },
                    sort_keys=True,
                )
            )
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Phase solver
# ---------------------------------------------------------------------------


class _Sim:
    """Precomputed per-netlist context shared across cycles."""

    def __init__(self, nl: Netlist):
        self.nl = nl
        self.vdd = nl.vdd
        self.levels = VoltageLevelMap.for_vdd(nl.vdd)
        self.caps = nl.node_capacitances()
        self.vt = {d.name: device_vt(d) for d in nl.devices}
        self.clock_gated = clock_gated_devices(nl)
        self.rail_voltage = {}
        for node in nl.nodes.values():
            if node.kind == KIND_RAIL0:
                self.rail_voltage[node.name] = 0.0
            elif node.kind == KIND_RAIL_HALF:
                self.rail_voltage[node.name] = nl.vdd / 2.0
            elif node.kind == KIND_RAIL_VDD:
                self.rail_voltage[node.name] = nl.vdd
        self.clock_names = [n.name for n in nl.nodes_of_kind(KIND_CLOCK)]
        self.input_names = nl.input_names()
        self.output_nodes = nl.nodes_of_kind(KIND_OUTPUT)
        self.iteration_bound = max(2 * len(nl.devices), 4)

    def pinned(self, phase: str, inputs: dict[str, int]) -> dict[str, float]:
        pins = dict(self.rail_voltage)
        clock_v = self.vdd if phase == EVALUATE else 0.0
        for name in self.clock_names:
            pins[name] = clock_v
        for name in self.input_names:
            pins[name] = trit_to_voltage(inputs[name], self.levels)
        return pins

    def is_on(self, dev: DeviceSpec, phase: str, v: dict[str, float]) -> bool:
        if dev.role == ROLE_PRECHARGE:
            return phase == PRECHARGE
        vg = v[dev.gate]
        if dev.polarity == "n":
            return vg > self.vt[dev.name]
        return self.vdd - vg > self.vt[dev.name]

    def conducting_set(self, phase: str, v: dict[str, float]) -> list[DeviceSpec]:
        return [d for d in self.nl.devices if self.is_on(d, phase, v)]

    def solve(
        self, phase: str, voltages: dict[str, float], inputs: dict[str, int], cycle_index: int
    ) -> tuple[dict[str, float], frozenset[str], tuple[ContentionIncident, ...], int]:
        pins = self.pinned(phase, inputs)
        v = dict(voltages)
        v.update(pins)

        iterations = 0
        for iterations in range(1, self.iteration_bound + 1):
            conducting = self.conducting_set(phase, v)
            components = _components(self.nl.nodes.keys(), conducting)
            new_v = dict(v)
            new_v.update(pins)
            for comp in components:
                sources = sorted({pins[n] for n in comp if n in pins})
                if len(sources) == 1:
                    for n in comp:
                        if n not in pins:
                            new_v[n] = sources[0]
                elif len(sources) > 1:
                    winner = self._contention_winner(comp, conducting, pins, v)
                    for n in comp:
                        if n not in pins:
                            new_v[n] = winner
                else:
                    total_c = sum(self.caps[n] for n in comp)
                    avg = sum(self.caps[n] * v[n] for n in comp) / total_c
                    for n in comp:
                        new_v[n] = avg
            if max(abs(new_v[n] - v[n]) for n in new_v) < _CONVERGENCE_EPS:
                v = new_v
                break
            v = new_v
        else:
            raise OscillationError(
                f"cycle {cycle_index} {phase}: no conduction fixed point within "
                f"{self.iteration_bound} iterations"
            )

        conducting = self.conducting_set(phase, v)
        incidents = []
        for comp in _components(self.nl.nodes.keys(), conducting):
            sources = sorted({pins[n] for n in comp if n in pins})
            if len(sources) > 1:
                r = self._least_source_resistance(comp, conducting, pins, v)
                incidents.append(
                    ContentionIncident(
                        cycle_index=cycle_index,
                        phase=phase,
                        nodes=frozenset(comp),
                        source_levels=tuple(sources),
                        series_resistance=r,
                        current=self.vdd / r if r > 0 else float("inf"),
                    )
                )
        return v, frozenset(d.name for d in conducting), tuple(incidents), iterations

    def _resistances(
        self, comp: set[str], conducting: list[DeviceSpec], v: dict[str, float]
    ) -> list[tuple[str, str, float]]:
        edges = []
        for d in conducting:
            if d.drain in comp and d.source in comp:
                r = on_resistance(d, v[d.gate], self.vdd, self.nl.tech)
                edges.append((d.drain, d.source, r))
        return edges

    def _dijkstra(self, comp, edges, start_nodes):
        adj: dict[str, list[tuple[str, float]]] = {n: [] for n in comp}
        for a, b, r in edges:
            adj[a].append((b, r))
            adj[b].append((a, r))
        dist = {n: float("inf") for n in comp}
        heap = []
        for s in start_nodes:
            dist[s] = 0.0
            heapq.heappush(heap, (0.0, s))
        while heap:
            d, n = heapq.heappop(heap)
            if d > dist[n]:
                continue
            for m, r in adj[n]:
                nd = d + r
                if nd < dist[m]:
                    dist[m] = nd
                    heapq.heappush(heap, (nd, m))
        return dist

    def _contention_winner(self, comp, conducting, pins, v) -> float:
        """Voltage that non-pinned members of a multi-source component take:
        the level of the source nearest in series resistance (ties toward
        the lower level)."""
        edges = self._resistances(comp, conducting, v)
        best = (float("inf"), float("inf"))
        for level in sorted({pins[n] for n in comp if n in pins}):
            starts = [n for n in comp if pins.get(n) == level]
            dist = self._dijkstra(comp, edges, starts)
            floaters = [n for n in comp if n not in pins]
            reach = min((dist[n] for n in floaters), default=0.0)
            if (reach, level) < best:
                best = (reach, level)
        return best[1]

    def _least_source_resistance(self, comp, conducting, pins, v) -> float:
        """Least series resistance between any two distinct-voltage sources."""
        edges = self._resistances(comp, conducting, v)
        best = float("inf")
        levels = sorted({pins[n] for n in comp if n in pins})
        for level in levels[:-1]:
            starts = [n for n in comp if pins.get(n) == level]
            dist = self._dijkstra(comp, edges, starts)
            for n in comp:
                if n in pins and pins[n] > level:
                    best = min(best, dist[n])
        return best


def _components(node_names, conducting: list[DeviceSpec]) -> list[set[str]]:
    parent: dict[str, str] = {n: n for n in node_names}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for d in conducting:
        ra, rb = find(d.drain), find(d.source)
        if ra != rb:
            parent[ra] = rb
    groups: dict[str, set[str]] = {}
    for n in node_names:
        groups.setdefault(find(n), set()).add(n)
    return list(groups.values())


# ---------------------------------------------------------------------------
# Public stepping API
# ---------------------------------------------------------------------------


def initial_state(nl: Netlist) -> SimState:
    """Cold start: rails at their levels, dynamic outputs at their precharge
    level, everything else discharged."""
    v: dict[str, float] = {}
    for node in nl.nodes.values():
        if node.kind in RAIL_KINDS:
            v[node.name] = {
                KIND_RAIL0: 0.0,
                KIND_RAIL_HALF: nl.vdd / 2.0,
                KIND_RAIL_VDD: nl.vdd,
            }[node.kind]
        elif node.kind == KIND_OUTPUT and node.precharge is not None:
            v[node.name] = level_voltage(node.precharge, nl.vdd)
        else:
            v[node.name] = 0.0
    return SimState(voltages=v, phase=PRECHARGE, cycle_index=0)


def solve_phase(nl: Netlist, state: SimState, inputs: dict[str, int]) -> SimState:
    """Solve one phase from the given state; returns the settled state."""
    sim = _Sim(nl)
    v, _, _, _ = sim.solve(state.phase, state.voltages, inputs, state.cycle_index)
    return SimState(voltages=v, phase=state.phase, cycle_index=state.cycle_index)


def _rail_paths_to(
    sim: _Sim, output: str, conducting: list[DeviceSpec]
) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    """All simple paths from a rail to `output` along conducting channels.
    Each path is returned output-first as (device names, node names)."""
    adj: dict[str, list[tuple[DeviceSpec, str]]] = {}
    for d in conducting:
        adj.setdefault(d.drain, []).append((d, d.source))
        adj.setdefault(d.source, []).append((d, d.drain))
    rails = set(sim.rail_voltage)
    paths = []

    def walk(node, devs, nodes, seen):
        if node in rails:
            paths.append((tuple(devs), tuple(nodes) + (node,)))
            return
        for dev, nxt in adj.get(node, ()):  # deterministic: netlist order
            if nxt in seen:
                continue
            walk(nxt, devs + [dev.name], nodes + [node], seen | {nxt})

    walk(output, [], [], {output})
    return paths


def run_cycle(nl: Netlist, state: SimState, inputs: dict[str, int]) -> tuple[SimState, CycleRecord]:
    sim = _Sim(nl)
    return _run_cycle(sim, state, inputs)


def _run_cycle(sim: _Sim, state: SimState, inputs: dict[str, int]) -> tuple[SimState, CycleRecord]:
    nl = sim.nl
    idx = state.cycle_index
    v_pre, cond_pre, inc_pre, it_pre = sim.solve(PRECHARGE, state.voltages, inputs, idx)
    v_ev, cond_ev, inc_ev, it_ev = sim.solve(EVALUATE, v_pre, inputs, idx)

    swings = []
    for node in nl.nodes.values():
        if node.kind in RAIL_KINDS or node.kind == KIND_CLOCK:
            continue
        dv = abs(v_pre[node.name] - state.voltages[node.name])
        if dv > 1e-9:
            swings.append((node.name, PRECHARGE, dv))
        dv = abs(v_ev[node.name] - v_pre[node.name])
        if dv > 1e-9:
            swings.append((node.name, EVALUATE, dv))

    outputs: dict[str, int | None] = {}
    for node in sim.output_nodes:
        try:
            outputs[node.name] = voltage_to_trit(v_ev[node.name], sim.levels)
        except IndeterminateLevel:
            outputs[node.name] = None

    conducting_ev = [d for d in nl.devices if d.name in cond_ev]
    driven_paths: dict[str, tuple] = {}
    active: set[str] = set()
    for node in sim.output_nodes:
        paths = _rail_paths_to(sim, node.name, conducting_ev)
        if paths:
            driven_paths[node.name] = tuple(paths)
            for devs, _nodes in paths:
                active.update(d for d in devs if d not in sim.clock_gated)
        else:
            # Retained output: its precharge devices hold the cycle's value.
            for d in nl.devices:
                if d.role == ROLE_PRECHARGE and node.name in (d.drain, d.source):
                    active.add(d.name)

    record = CycleRecord(
        index=idx,
        inputs=dict(inputs),
        after_precharge=v_pre,
        after_evaluate=v_ev,
        outputs=outputs,
        conducting={PRECHARGE: cond_pre, EVALUATE: cond_ev},
        active_devices=frozenset(active),
        driven_paths=driven_paths,
        swings=tuple(swings),
        contentions=tuple(inc_pre) + tuple(inc_ev),
        iterations={PRECHARGE: it_pre, EVALUATE: it_ev},
    )
    next_state = SimState(voltages=v_ev, phase=PRECHARGE, cycle_index=idx + 1)
    return next_state, record


def run_sequence(
    nl: Netlist, assignments: list[dict[str, int]], warmup_cycles: int = 0
) -> SimTrace:
    """Run a list of input assignments, one cycle each, threading charge state."""
    sim = _Sim(nl)
    state = initial_state(nl)
    trace = SimTrace(netlist_name=nl.name, vdd=nl.vdd, warmup_cycles=warmup_cycles)
    for inputs in assignments:
        missing = set(sim.input_names) - set(inputs)
        if missing:
            raise ValueError(f"assignment missing inputs {sorted(missing)}")
        state, record = _run_cycle(sim, state, inputs)
        trace.cycles.append(record)
    return trace


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VerifyRow:
    inputs: tuple[int, ...]
    expected: dict[str, int]
    observed: dict[str, int | None]
    outputs_ok: bool
    active: frozenset[str]
    expected_active: frozenset[str] | None
    active_ok: bool | None


@dataclass
class VerifyReport:
    circuit: str
    rows: list[VerifyRow]

    @property
    def outputs_passed(self) -> int:
        return sum(r.outputs_ok for r in self.rows)

    @property
    def active_passed(self) -> int:
        return sum(bool(r.active_ok) for r in self.rows if r.active_ok is not None)

    @property
    def active_total(self) -> int:
        return sum(1 for r in self.rows if r.active_ok is not None)

    @property
    def all_ok(self) -> bool:
        return all(r.outputs_ok for r in self.rows) and all(
            r.active_ok for r in self.rows if r.active_ok is not None
        )

    def summary(self) -> str:
        lines = [
            f"{self.circuit}: outputs {self.outputs_passed}/{len(self.rows)}"
            + (
                f", conducting sets {self.active_passed}/{self.active_total}"
                if self.active_total
                else ""
            )
        ]
        for r in self.rows:
            if not r.outputs_ok:
                lines.append(f"  inputs {r.inputs}: expected {r.expected}, got {r.observed}")
            elif r.active_ok is False:
                lines.append(
                    f"  inputs {r.inputs}: conducting set {sorted(r.active)} != "
                    f"{sorted(r.expected_active or ())}"
                )
        return "\n".join(lines)


def exhaustive_verify(
    nl: Netlist,
    reference,
    expected_active: dict[tuple[int, ...], frozenset[str]] | None = None,
) -> VerifyReport:
    """Drive every input combination through a fresh single-cycle run and
    compare against the reference truth function.

    `reference` maps one trit per input (positionally, in declaration order)
    to a dict of expected output trits.  `expected_active` optionally pins
    the per-combination conducting device sets.
    """
    names = nl.input_names()
    rows = []
    for combo in itertools.product(TRITS, repeat=len(names)):
        trace = run_sequence(nl, [dict(zip(names, combo))])
        record = trace.cycles[0]
        expected = reference(*combo)
        ok = all(record.outputs.get(k) == v for k, v in expected.items()) and set(
            expected
        ) == set(record.outputs)
        exp_act = expected_active.get(combo) if expected_active else None
        act_ok = None if exp_act is None else record.active_devices == exp_act
        rows.append(
            VerifyRow(
                inputs=combo,
                expected=expected,
                observed=record.outputs,
                outputs_ok=ok,
                active=record.active_devices,
                expected_active=exp_act,
                active_ok=act_ok,
            )
        )
    return VerifyReport(circuit=nl.name, rows=rows)


def transition_pattern(input_names: list[str]) -> list[dict[str, int]]:
    """Deterministic input sequence covering every ordered transition between
    input combinations exactly once (self-transitions included): an Eulerian
    circuit over the complete digraph with loops.  For two ternary inputs the
    sequence is 82 assignments long (1 + 9*9 edges)."""
    vertices = sorted(itertools.product(TRITS, repeat=len(input_names)))
    remaining = {u: list(vertices) for u in vertices}
    stack = [vertices[0]]
    circuit_rev = []
    while stack:
        u = stack[-1]
        if remaining[u]:
            stack.append(remaining[u].pop(0))
        else:
            circuit_rev.append(stack.pop())
    circuit = circuit_rev[::-1]
    return [dict(zip(input_names, combo)) for combo in circuit]
