"""
tritcell: ternary pass-transistor cell library and switch-level simulator
=========================================================================

Diameter-tuned threshold voltages turn carbon-nanotube transistors into
three-level switches; this package models those devices, the dynamic
pass-transistor cells built from them (ternary inverters, a half adder, a
1-trit multiplier), a two-phase switch-level simulation engine, and the
power / delay / variation analyses used to judge them.
"""

from .device import (
    ChiralityVector,
    DeviceSpec,
    PhysicalConstants,
    classify_conduction,
    classify_geometry,
    diameter,
    on_resistance,
    switch_state,
    threshold_voltage,
)
from .ternary import (
    CellCensus,
    IndeterminateLevel,
    ReductionPlan,
    VoltageLevelMap,
    int_to_word,
    max_unsigned,
    multiply_words_behavioral,
    noise_margin,
    nti,
    plan_reduction,
    pti,
    stb,
    sti,
    str_to_word,
    tfa_ref,
    tha_ref,
    tmul_ref,
    trit_to_voltage,
    voltage_to_trit,
    word_to_int,
    word_to_str,
)
from .netlist import (
    Netlist,
    TechConfig,
    build_nti,
    build_pti,
    build_tha,
    build_tmul,
    emit_netlist,
    parse_netlist,
    substitute_chirality,
    validate,
    wrap_testbench,
)
from .engine import (
    OscillationError,
    SimTrace,
    exhaustive_verify,
    run_cycle,
    run_sequence,
    solve_phase,
    transition_pattern,
)
from .analysis import (
    Metrics,
    MonteCarloConfig,
    MonteCarloReport,
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

__version__ = "0.1.0"
