"""Metrics: power, delay, sweeps, scenarios, Monte Carlo."""

import dataclasses
import json

import pytest

from tritcell import analysis, ternary
from tritcell.device import ChiralityVector
from tritcell.engine import CycleRecord, SimTrace, run_sequence, transition_pattern
from tritcell.netlist import TechConfig, build_nti, build_tha, build_tmul, parse_netlist
from tritcell.analysis import (
    FunctionalityAtRisk,
    Metrics,
    MonteCarloConfig,
    NodeCapModel,
    critical_path_delay,
    dynamic_power,
    monte_carlo,
    run_pattern_analysis,
    scenario_compare,
    static_power,
    sweep_vdd,
    total_metrics,
)


def tmul_ref(a, b):
    return dict(zip(("Carry", "Product"), ternary.tmul_ref(a, b)))


def _fake_trace(swings, cycles=1, warmup=0):
    records = [
        CycleRecord(
            index=i,
            inputs={},
            after_precharge={},
            after_evaluate={},
            outputs={},
            conducting={},
            active_devices=frozenset(),
            driven_paths={},
            swings=tuple(swings if i >= warmup else ()),
            contentions=(),
            iterations={},
        )
        for i in range(cycles)
    ]
    return SimTrace(netlist_name="fake", vdd=0.9, cycles=records, warmup_cycles=warmup)


# ---------------------------------------------------------------------------
# Power
# ---------------------------------------------------------------------------


def test_dynamic_power_single_swing():
    # One 1 fF node swinging 0.45 V once per cycle at 1 GHz:
    # 1e9 * 1e-15 * 0.45^2 = 202.5 nW
    nl = build_nti()
    caps = NodeCapModel(caps={"Y": 1e-15})
    trace = _fake_trace([("Y", "evaluate", 0.45)])
    assert dynamic_power(nl, trace, caps) == pytest.approx(202.5e-9, rel=1e-12)


def test_dynamic_power_averages_over_cycles():
    nl = build_nti()
    caps = NodeCapModel(caps={"Y": 1e-15})
    # Same single swing but spread over 4 measured cycles -> a quarter.
    records = _fake_trace([("Y", "evaluate", 0.45)]).cycles
    quiet = _fake_trace([]).cycles
    trace = SimTrace(netlist_name="fake", vdd=0.9, cycles=records + quiet * 3)
    assert dynamic_power(nl, trace, caps) == pytest.approx(202.5e-9 / 4, rel=1e-12)


def test_dynamic_power_excludes_warmup():
    nl = build_nti()
    caps = NodeCapModel(caps={"Y": 1e-15})
    trace = _fake_trace([("Y", "evaluate", 0.45)], cycles=3, warmup=2)
    # Only the last cycle is measured.
    assert dynamic_power(nl, trace, caps) == pytest.approx(202.5e-9, rel=1e-12)


def test_static_power_leakage_only():
    # Per device: (4+1+1)e-11 A; NTI has 2 devices; at 0.9 V.
    nl = build_nti()
    assert static_power(nl, None) == pytest.approx(2 * 6e-11 * 0.9, rel=1e-12)


def test_static_power_tenth_nano_per_device():
    tech = TechConfig(i_sub=8e-11, i_gate=1e-11, i_junct=1e-11)
    nl = build_tha(tech)  # 36 devices at 0.1 nA each
    assert static_power(nl, None) == pytest.approx(36 * 1e-10 * 0.9, rel=1e-12)


def test_static_power_includes_contention():
    shorted = parse_netlist(
        ".name s\n.vdd 0.9\nrail gnd 0\nrail pwr vdd\ninput A\noutput Y\n"
        "dev SHORT pol=n chir=28,0 tubes=1 pitch=20 g=pwr d=pwr s=gnd\n"
        "dev DRIVE pol=n chir=19,0 tubes=3 pitch=20 g=A d=Y s=pwr\n"
    )
    trace = run_sequence(shorted, [{"A": 2}])
    leak_only = static_power(shorted, None)
    with_short = static_power(shorted, trace)
    # two incidents (one per phase), each weighted half a cycle
    i_short = 0.9 / (30e3 * 0.45 / (0.9 - 0.43 / (0.0783 * 28)))
    assert with_short - leak_only == pytest.approx(2 * i_short * 0.5 * 0.9, rel=1e-9)
    assert analysis.contention_current(shorted, trace) == pytest.approx(i_short, rel=1e-9)


# ---------------------------------------------------------------------------
# Delay
# ---------------------------------------------------------------------------


def _two_device_chain(tech_kw=""):
    return parse_netlist(
        ".name chain\n.vdd 0.9\nrail pwr vdd\ninput A\ninput B\noutput O\nnode n1\n"
        "dev D1 pol=n chir=19,0 tubes=3 pitch=20 g=A d=n1 s=pwr\n"
        "dev D2 pol=n chir=10,0 tubes=3 pitch=20 g=B d=O s=n1\n"
    )


def test_delay_pairs_resistance_with_output_side_node():
    # D2 (near the output) sees O's capacitance; D1 sees n1's. With gates at
    # full rail: R(D1) = 1e4*0.45/(0.9-0.43/(0.0783*19)),
    #            R(D2) = 1e4*0.45/(0.9-0.43/(0.0783*10)).
    nl = _two_device_chain()
    trace = run_sequence(nl, [{"A": 2, "B": 2}])
    caps = NodeCapModel(caps={"O": 2e-15, "n1": 1e-15, "A": 0, "B": 0, "pwr": 0})
    delay, path = critical_path_delay(nl, trace, caps)
    r1 = 1e4 * 0.45 / (0.9 - 0.43 / (0.0783 * 19))
    r2 = 1e4 * 0.45 / (0.9 - 0.43 / (0.0783 * 10))
    assert path == ("D2", "D1")
    assert delay == pytest.approx(r2 * 2e-15 + r1 * 1e-15, rel=1e-12)


def test_delay_no_transition_is_zero():
    nl = _two_device_chain()
    trace = run_sequence(nl, [{"A": 0, "B": 0}])
    delay, path = critical_path_delay(nl, trace)
    assert delay == 0.0
    assert path == ()


def test_delay_takes_worst_cycle():
    nl = _two_device_chain()
    # A=1 gives D1 a much smaller overdrive than A=2.
    trace_fast = run_sequence(nl, [{"A": 2, "B": 2}])
    trace_both = run_sequence(nl, [{"A": 2, "B": 2}, {"A": 1, "B": 2}])
    fast, _ = critical_path_delay(nl, trace_fast)
    worst, _ = critical_path_delay(nl, trace_both)
    assert worst > fast


def test_multiplier_worst_path_frozen():
    # Worst case is the 1*1 chain: four devices at half-rail overdrive
    # (0.45 - 0.43/(0.0783*28)) each, against Product + three chain middles.
    metrics, trace = run_pattern_analysis(build_tmul(), fanout=4)
    t = TechConfig()
    r = (30e3 / 3) * 0.45 / (0.45 - 0.43 / (0.0783 * 28))
    c_product = t.c_node_base + 4 * t.sti_input_cap + 5 * t.c_junction
    c_t4 = t.c_node_base + 2 * t.c_junction
    c_t3 = t.c_node_base + 3 * t.c_junction  # extra junction from its precharge device
    c_t2 = t.c_node_base + 2 * t.c_junction
    expected = r * (c_product + c_t4 + c_t3 + c_t2)
    assert metrics.delay == pytest.approx(expected, rel=1e-9)
    assert metrics.critical_path == ("C7", "C6", "C5", "C4", "FP")


def test_foot_contributes_no_delay_term():
    # Scaling the foot's resistance must not change the delay at all: give
    # the foots one tube instead of three (tripling their resistance).
    nl = build_tmul()
    devices = tuple(
        dataclasses.replace(d, tubes=1) if d.name in ("FP", "FV", "FC") else d
        for d in nl.devices
    )
    slow_foot = nl.replace(devices=devices)
    base_metrics, _ = run_pattern_analysis(nl, fanout=4)
    foot_metrics, _ = run_pattern_analysis(slow_foot, fanout=4)
    assert foot_metrics.delay == pytest.approx(base_metrics.delay, rel=1e-12)


# ---------------------------------------------------------------------------
# Metrics identities
# ---------------------------------------------------------------------------


def test_metrics_identities():
    metrics, _ = run_pattern_analysis(build_tha(), fanout=4)
    assert metrics.avg_power == pytest.approx(
        metrics.static_power + metrics.dynamic_power, rel=1e-12
    )
    assert metrics.pdp == pytest.approx(metrics.avg_power * metrics.delay, rel=1e-12)
    assert metrics.edp == pytest.approx(metrics.pdp * metrics.delay, rel=1e-12)
    assert metrics.cycles == 81
    assert metrics.fanout == 4
    assert metrics.contention_current == 0.0


def test_as_dict_schema():
    metrics, _ = run_pattern_analysis(build_tmul(), fanout=1)
    d = metrics.as_dict()
    assert set(d) == {
        "circuit", "fanout", "vdd", "avg_power_w", "static_power_w",
        "dynamic_power_w", "delay_s", "pdp_j", "edp_js", "contention_a", "cycles",
    }
    json.dumps(d)  # serializable


# ---------------------------------------------------------------------------
# Trends: fanout, supply, capacitance scaling
# ---------------------------------------------------------------------------


def test_fanout_monotonicity():
    for build in (build_tha, build_tmul):
        results = [run_pattern_analysis(build(), fanout=f)[0] for f in (1, 2, 4)]
        for lo, hi in zip(results, results[1:]):
            assert hi.avg_power >= lo.avg_power
            assert hi.delay >= lo.delay


def test_supply_trend():
    points = sweep_vdd(build_tmul(), [0.8, 0.9, 1.0])
    for lo, hi in zip(points, points[1:]):
        assert hi.metrics.dynamic_power > lo.metrics.dynamic_power
        assert hi.metrics.delay < lo.metrics.delay
        assert not hi.at_risk


def test_sweep_flags_low_supply():
    with pytest.warns(FunctionalityAtRisk):
        points = sweep_vdd(build_tmul(), [0.5])
    assert points[0].at_risk
    assert points[0].risk_devices  # names the misbehaving devices


def test_capacitance_scaling_law():
    quiet = dict(i_sub=0.0, i_gate=0.0, i_junct=0.0)
    base_tech = TechConfig(**quiet)
    k = 2.0
    scaled_tech = TechConfig(
        c_gate_per_tube=base_tech.c_gate_per_tube * k,
        c_junction=base_tech.c_junction * k,
        c_node_base=base_tech.c_node_base * k,
        **quiet,
    )
    m1, _ = run_pattern_analysis(build_tmul(base_tech), fanout=4)
    mk, _ = run_pattern_analysis(build_tmul(scaled_tech), fanout=4)
    assert mk.avg_power == pytest.approx(k * m1.avg_power, rel=1e-9)
    assert mk.delay == pytest.approx(k * m1.delay, rel=1e-9)
    assert mk.pdp == pytest.approx(k**2 * m1.pdp, rel=1e-9)
    assert mk.edp == pytest.approx(k**3 * m1.edp, rel=1e-9)


# ---------------------------------------------------------------------------
# Scenarios
# ---------------------------------------------------------------------------


def test_scenario_compare_structure():
    c19, c28 = ChiralityVector(19, 0), ChiralityVector(28, 0)
    results = scenario_compare(
        build_tmul(),
        {"proposed": [], "all_19_0": [(c28, c19)], "all_28_0": [(c19, c28)]},
        tmul_ref,
    )
    assert [r.label for r in results] == ["proposed", "all_19_0", "all_28_0"]
    assert all(r.outputs_ok for r in results)
    assert {len(r.netlist.distinct_chiralities()) for r in results} == {3, 2}


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


def test_monte_carlo_deterministic():
    cfg = MonteCarloConfig(iterations=5, base_seed=77)
    a = monte_carlo(build_tmul(), tmul_ref, cfg)
    b = monte_carlo(build_tmul(), tmul_ref, cfg)
    assert a == b
    assert json.dumps(a.as_dict(), sort_keys=True) == json.dumps(b.as_dict(), sort_keys=True)
    c = monte_carlo(build_tmul(), tmul_ref, MonteCarloConfig(iterations=5, base_seed=78))
    assert c.samples != a.samples


def test_monte_carlo_zero_sigma_degenerates():
    cfg = MonteCarloConfig(iterations=4, sigma_fraction=0.0)
    report = monte_carlo(build_tmul(), tmul_ref, cfg)
    assert report.sigma_pdp == 0.0
    assert report.sigma_over_mean == 0.0
    assert report.failures == 0
    assert report.vt_sigma_over_mean == 0.0
    assert len(set(report.samples)) == 1


def test_monte_carlo_counts_failures():
    wrong_ref = lambda a, b: {"Carry": 2, "Product": 2}
    cfg = MonteCarloConfig(iterations=3)
    report = monte_carlo(build_tmul(), wrong_ref, cfg)
    assert report.failures == 3


def test_monte_carlo_config_validation():
    with pytest.raises(ValueError):
        MonteCarloConfig(iterations=0)
    with pytest.raises(ValueError):
        MonteCarloConfig(sigma_fraction=-0.1)


def test_node_cap_model():
    nl = build_tmul()
    model = NodeCapModel.from_netlist(nl)
    assert model.caps == nl.node_capacitances()
    assert model["Product"] > 0
    assert model.total() == pytest.approx(sum(model.caps.values()))
