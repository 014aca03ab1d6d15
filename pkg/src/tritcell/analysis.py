"""
Power, timing, and variation analysis
=====================================

PURPOSE
    Turn simulation traces into engineering numbers: switched-capacitance
    dynamic power, leakage-plus-contention static power, lumped-RC critical
    path delay, PDP/EDP figures of merit, supply sweeps, chirality
    substitution studies, and a seeded Monte Carlo over process variation.

METHOD
    Dynamic power charges every recorded voltage swing against the node's
    capacitance (P = f * sum(C * dV^2) / cycles).  Delay walks the conducting
    rail-to-output paths of each measured cycle and accumulates R_j * C_j
    pairwise — each device's on-resistance against the capacitance on its
    output side — taking the worst path over all cycles.  Monte Carlo draws
    per-device diameter, oxide thickness, and tube density from clipped
    normal distributions, re-verifies functionality, and reports the PDP
    spread.
"""

from __future__ import annotations

import dataclasses
import random
import statistics
import warnings
from dataclasses import dataclass

from .device import ROLE_PRECHARGE, device_vt, diameter, on_resistance, switch_state
from .netlist import Netlist
from .engine import (
    SimTrace,
    clock_gated_devices,
    exhaustive_verify,
    run_sequence,
    transition_pattern,
)
from .ternary import TRITS

__all__ = [
    "Metrics",
    "NodeCapModel",
    "FunctionalityAtRisk",
    "MonteCarloConfig",
    "MonteCarloReport",
    "SweepPoint",
    "ScenarioResult",
    "dynamic_power",
    "static_power",
    "critical_path_delay",
    "total_metrics",
    "run_pattern_analysis",
    "sweep_vdd",
    "scenario_compare",
    "monte_carlo",
]


@dataclass(frozen=True)
class NodeCapModel:
    """Frozen per-node capacitance table for a netlist."""

    caps: dict[str, float]

    @classmethod
    def from_netlist(cls, nl: Netlist) -> "NodeCapModel":
        return cls(caps=nl.node_capacitances())

    def __getitem__(self, node: str) -> float:
        return self.caps[node]

    def total(self) -> float:
        return sum(self.caps.values())


@dataclass(frozen=True)
class Metrics:
    circuit: str
    fanout: int
    vdd: float
    avg_power: float  # W, static + dynamic
    static_power: float  # W
    dynamic_power: float  # W
    delay: float  # s, worst measured output transition
    critical_path: tuple[str, ...] = ()  # device names, output first
    contention_current: float = 0.0  # A, cycle-averaged
    cycles: int = 0

    @property
    def pdp(self) -> float:
        """Power-delay product, joules."""
        return self.avg_power * self.delay

    @property
    def edp(self) -> float:
        """Energy-delay product, joule-seconds."""
        return self.pdp * self.delay

    def as_dict(self) -> dict:
        return {
            "circuit": self.circuit,
            "fanout": self.fanout,
            "vdd": self.vdd,
            "avg_power_w": self.avg_power,
            "static_power_w": self.static_power,
            "dynamic_power_w": self.dynamic_power,
            "delay_s": self.delay,
            "pdp_j": self.pdp,
            "edp_js": self.edp,
            "contention_a": self.contention_current,
            "cycles": self.cycles,
        }


class FunctionalityAtRisk(UserWarning):
    """A sweep point where some device's switch behavior departs from its
    baseline-supply behavior at the three nominal levels."""


def dynamic_power(nl: Netlist, trace: SimTrace, caps: NodeCapModel | None = None) -> float:
    """Switched-capacitance power over the measured cycles:
    f * sum(C_node * dV^2) / n_cycles."""
    caps = caps or NodeCapModel.from_netlist(nl)
    measured = trace.measured()
    if not measured:
        return 0.0
    energy = 0.0
    for cyc in measured:
        for node, _phase, dv in cyc.swings:
            energy += caps[node] * dv * dv
    return nl.tech.f * energy / len(measured)


def static_power(nl: Netlist, trace: SimTrace | None = None) -> float:
    """Leakage plus contention: (sum of per-device leakages + average
    contention current) * vdd."""
    t = nl.tech
    leakage = len(nl.devices) * (t.i_sub + t.i_gate + t.i_junct)
    return (leakage + contention_current(nl, trace)) * nl.vdd


def contention_current(nl: Netlist, trace: SimTrace | None) -> float:
    """Cycle-averaged short current: each incident persists for half its
    cycle (one phase)."""
    if trace is None:
        return 0.0
    measured = trace.measured()
    if not measured:
        return 0.0
    total = sum(inc.current for cyc in measured for inc in cyc.contentions)
    return total * 0.5 / len(measured)


def critical_path_delay(
    nl: Netlist, trace: SimTrace, caps: NodeCapModel | None = None
) -> tuple[float, tuple[str, ...]]:
    """Worst lumped-RC delay over every driven output of every measured
    cycle.  A path's delay is sum(R_j * C_j) where R_j is device j's
    on-resistance in that cycle and C_j the capacitance of the node on its
    output side; clock-gated foots contribute no term.  Returns (seconds,
    device names output-first); (0.0, ()) when nothing switches."""
    caps = caps or NodeCapModel.from_netlist(nl)
    foots = clock_gated_devices(nl)
    dev_map = {d.name: d for d in nl.devices}
    worst = 0.0
    worst_path: tuple[str, ...] = ()
    for cyc in trace.measured():
        for output, paths in cyc.driven_paths.items():
            for devs, nodes in paths:
                delay = 0.0
                for j, dev_name in enumerate(devs):
                    if dev_name in foots:
                        continue
                    dev = dev_map[dev_name]
                    v_gate = cyc.after_evaluate[dev.gate]
                    r = on_resistance(dev, v_gate, nl.vdd, nl.tech)
                    delay += r * caps[nodes[j]]
                if delay > worst:
                    worst = delay
                    worst_path = tuple(devs)
    return worst, worst_path


def total_metrics(
    nl: Netlist, trace: SimTrace, caps: NodeCapModel | None = None
) -> Metrics:
    caps = caps or NodeCapModel.from_netlist(nl)
    p_dyn = dynamic_power(nl, trace, caps)
    p_stat = static_power(nl, trace)
    delay, path = critical_path_delay(nl, trace, caps)
    return Metrics(
        circuit=nl.name,
        fanout=int(nl.meta.get("fanout", 0)),
        vdd=nl.vdd,
        avg_power=p_stat + p_dyn,
        static_power=p_stat,
        dynamic_power=p_dyn,
        delay=delay,
        critical_path=path,
        contention_current=contention_current(nl, trace),
        cycles=len(trace.measured()),
    )


def run_pattern_analysis(nl: Netlist, fanout: int = 4) -> tuple[Metrics, SimTrace]:
    """Standard measurement: wrap the cell in its bench, run the full
    transition-covering pattern with one warm-up cycle, report metrics."""
    from .netlist import wrap_testbench

    bench = wrap_testbench(nl, fanout)
    pattern = transition_pattern(bench.input_names())
    trace = run_sequence(bench, pattern, warmup_cycles=1)
    return total_metrics(bench, trace), trace


# ---------------------------------------------------------------------------
# Supply sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepPoint:
    vdd: float
    metrics: Metrics
    at_risk: bool
    risk_devices: tuple[str, ...] = ()


def _switch_matrix(nl: Netlist) -> dict[str, tuple[bool, ...]]:
    """Per-device on/off decisions at the three nominal gate levels."""
    out = {}
    for dev in nl.devices:
        if dev.role == ROLE_PRECHARGE:
            continue
        out[dev.name] = tuple(
            switch_state(dev, t * nl.vdd / 2.0, nl.vdd) for t in TRITS
        )
    return out


def sweep_vdd(nl: Netlist, vdds: list[float], fanout: int = 4) -> list[SweepPoint]:
    """Re-measure at each supply.  Points where any device's nominal-level
    switch behavior differs from the baseline supply are flagged and warned
    as FunctionalityAtRisk."""
    baseline = _switch_matrix(nl)
    points = []
    for v in vdds:
        scaled = nl.replace(tech=dataclasses.replace(nl.tech, vdd=v), vdd=v)
        matrix = _switch_matrix(scaled)
        risky = tuple(sorted(n for n in baseline if matrix[n] != baseline[n]))
        if risky:
            warnings.warn(
                f"vdd={v:g}: switch behavior changes for {list(risky)}",
                FunctionalityAtRisk,
                stacklevel=2,
            )
        metrics, _trace = run_pattern_analysis(scaled, fanout)
        points.append(SweepPoint(vdd=v, metrics=metrics, at_risk=bool(risky), risk_devices=risky))
    return points


# ---------------------------------------------------------------------------
# Chirality scenarios
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioResult:
    label: str
    netlist: Netlist
    metrics: Metrics
    outputs_ok: bool


def scenario_compare(nl: Netlist, scenarios: dict[str, list[tuple]], reference) -> list[ScenarioResult]:
    """Evaluate chirality substitution variants against the unmodified cell.

    `scenarios` maps a label to a list of (from_chirality, to_chirality)
    rewrites applied in order.  Every variant is re-verified exhaustively
    and then measured with the standard pattern."""
    from .netlist import substitute_chirality

    results = []
    for label, subs in scenarios.items():
        variant = nl
        for frm, to in subs:
            variant = substitute_chirality(variant, frm, to)
        report = exhaustive_verify(variant, reference)
        metrics, _ = run_pattern_analysis(variant)
        results.append(
            ScenarioResult(
                label=label, netlist=variant, metrics=metrics, outputs_ok=report.all_ok
            )
        )
    return results


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloConfig:
    iterations: int = 100
    sigma_fraction: float = 0.10 / 3.0  # so +/-3 sigma spans +/-10 percent
    base_seed: int = 20230

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.sigma_fraction < 0:
            raise ValueError("sigma_fraction may not be negative")


@dataclass(frozen=True)
class MonteCarloReport:
    config: MonteCarloConfig
    mean_pdp: float
    sigma_pdp: float
    sigma_over_mean: float
    failures: int
    vt_sigma_over_mean: float
    samples: tuple[float, ...]

    def as_dict(self) -> dict:
        return {
            "iterations": self.config.iterations,
            "mean_pdp": self.mean_pdp,
            "sigma_pdp": self.sigma_pdp,
            "sigma_over_mean": self.sigma_over_mean,
            "failures": self.failures,
            "vt_sigma_over_mean": self.vt_sigma_over_mean,
        }


def _clipped_gauss(rng: random.Random, mean: float, sigma: float) -> float:
    if sigma == 0:
        return mean
    lo, hi = mean - 3 * sigma, mean + 3 * sigma
    return min(max(rng.gauss(mean, sigma), lo), hi)


def _perturb(nl: Netlist, rng: random.Random, sigma_fraction: float) -> Netlist:
    t_nom = nl.tech.oxide_thickness_nominal
    devices = []
    for dev in nl.devices:
        d_nom = diameter(dev.chirality)
        d = _clipped_gauss(rng, d_nom, sigma_fraction * d_nom)
        t_ox = _clipped_gauss(rng, t_nom, sigma_fraction * t_nom)
        density = _clipped_gauss(rng, 1.0, sigma_fraction)
        devices.append(
            dataclasses.replace(
                dev,
                vt_override=0.43 / d,
                r_scale=density,
                cap_scale=density * (t_nom / t_ox),
            )
        )
    return nl.replace(devices=tuple(devices))


def monte_carlo(nl: Netlist, reference, config: MonteCarloConfig | None = None) -> MonteCarloReport:
    """Seeded process-variation study: per-iteration device perturbation,
    functional re-verification, and PDP measurement.  Identical config and
    netlist give an identical report."""
    config = config or MonteCarloConfig()
    nominal_vt = {d.name: device_vt(d) for d in nl.devices}
    samples = []
    vts = []  # per-device Vt normalized by its nominal, pooled over iterations
    failures = 0
    for k in range(config.iterations):
        rng = random.Random(config.base_seed + k)
        variant = _perturb(nl, rng, config.sigma_fraction)
        vts.extend(device_vt(d) / nominal_vt[d.name] for d in variant.devices)
        report = exhaustive_verify(variant, reference)
        if not all(r.outputs_ok for r in report.rows):
            failures += 1
        metrics, _ = run_pattern_analysis(variant)
        samples.append(metrics.pdp)
    mean = statistics.fmean(samples)
    sigma = statistics.pstdev(samples)
    vt_mean = statistics.fmean(vts)
    vt_sigma = statistics.pstdev(vts)
    return MonteCarloReport(
        config=config,
        mean_pdp=mean,
        sigma_pdp=sigma,
        sigma_over_mean=sigma / mean if mean else 0.0,
        failures=failures,
        vt_sigma_over_mean=vt_sigma / vt_mean if vt_mean else 0.0,
        samples=tuple(samples),
    )
