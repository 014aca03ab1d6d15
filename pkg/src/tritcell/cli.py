"""
Command-line front end
======================

Subcommands
    device     physical numbers and switching table for one chirality
    verify     exhaustive truth-table check of a shipped or user cell
    analyze    power / delay / PDP / EDP report for one cell
    sweep      the same report across several supply voltages
    scenarios  chirality substitution study on the multiplier cell
    mc         seeded Monte Carlo process-variation study
    multiply   multiply two ternary words through the behavioral array

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 simulation did not settle.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import analysis, engine, netlist, ternary
from .device import (
    ChiralityVector,
    METALLIC,
    classify_conduction,
    classify_geometry,
    diameter,
    threshold_voltage,
    switch_state,
    DeviceSpec,
)

_CELLS = {
    "nti": (netlist.build_nti, lambda a: {"Y": ternary.nti(a)}, None),
    "pti": (netlist.build_pti, lambda a: {"Y": ternary.pti(a)}, None),
    "tha": (
        netlist.build_tha,
        lambda a, b: dict(zip(("Carry", "Sum"), ternary.tha_ref(a, b))),
        netlist.THA_ON_PATHS,
    ),
    "tmul": (
        netlist.build_tmul,
        lambda a, b: dict(zip(("Carry", "Product"), ternary.tmul_ref(a, b))),
        netlist.TMUL_ON_PATHS,
    ),
}


def _load_cell(args) -> tuple[netlist.Netlist, object, object]:
    tech = netlist.load_tech(args.tech) if getattr(args, "tech", None) else None
    if args.cell in _CELLS:
        build, ref, paths = _CELLS[args.cell]
        return build(tech or netlist.TechConfig()), ref, paths
    # Treat as a netlist file path.  A file that names itself after a shipped
    # cell and exposes the same ports is checked against that cell's truth
    # table (so edited copies of the fixtures stay verifiable); anything else
    # gets functional simulation only.
    with open(args.cell, "r", encoding="utf-8") as fh:
        nl = netlist.parse_netlist(fh.read(), tech)
    if nl.name in _CELLS:
        build, ref, paths = _CELLS[nl.name]
        shipped = build()
        if (
            nl.input_names() == shipped.input_names()
            and nl.output_names() == shipped.output_names()
        ):
            return nl, ref, paths
    return nl, None, None


def _emit_rows(rows: list[dict], fmt: str, out) -> None:
    if not rows:
        return
    keys = list(rows[0].keys())
    if fmt == "json":
        json.dump(rows if len(rows) > 1 else rows[0], out, indent=2, sort_keys=True)
        out.write("\n")
    elif fmt == "csv":
        writer = csv.DictWriter(out, fieldnames=keys)
        writer.writeheader()
        writer.writerows(rows)
    else:
        widths = {k: max(len(str(k)), *(len(_fmt_val(r[k])) for r in rows)) for k in keys}
        out.write("  ".join(k.ljust(widths[k]) for k in keys).rstrip() + "\n")
        for r in rows:
            out.write("  ".join(_fmt_val(r[k]).ljust(widths[k]) for k in keys).rstrip() + "\n")


def _fmt_val(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _open_out(args):
    if getattr(args, "out", None):
        return open(args.out, "w", encoding="utf-8", newline="")
    return sys.stdout


def _maybe_plot(path: str | None, xlabel, ylabel, series: dict[str, tuple[list, list]]):
    """Render simple line/histogram figures next to the delimited output."""
    if not path:
        return
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for label, (xs, ys) in series.items():
        if xs is None:
            ax.hist(ys, bins=20, label=label)
        else:
            ax.plot(xs, ys, marker="o", label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_device(args, out) -> int:
    try:
        n1_s, n2_s = args.chirality.split(",")
        cv = ChiralityVector(int(n1_s), int(n2_s))
    except (ValueError, TypeError) as exc:
        print(f"error: bad chirality {args.chirality!r}: {exc}", file=sys.stderr)
        return 2
    d = diameter(cv)
    rows = [{
        "chirality": f"({cv.n1},{cv.n2})",
        "diameter_nm": round(d, 4),
        "conduction": classify_conduction(cv),
        "geometry": classify_geometry(cv),
    }]
    if classify_conduction(cv) == METALLIC:
        rows[0]["vt_v"] = "-"
        _emit_rows(rows, args.format, out)
        print("warning: metallic tube, not usable as a switch", file=sys.stderr)
        return 0
    vt = threshold_voltage(cv)
    rows[0]["vt_v"] = round(vt, 4)
    vdd = args.vdd
    for pol in ("n", "p"):
        dev = DeviceSpec(
            name=f"probe_{pol}", polarity=pol, chirality=cv, tubes=3, pitch=20.0,
            gate="g", drain="d", source="s",
        )
        rows.append({
            "chirality": f"{pol.upper()}-type gate response at vdd={vdd:g}",
            "diameter_nm": "",
            "conduction": " ".join(
                f"{t * vdd / 2:.3g}V={'on' if switch_state(dev, t * vdd / 2, vdd) else 'off'}"
                for t in ternary.TRITS
            ),
            "geometry": "",
            "vt_v": "",
        })
    _emit_rows(rows, args.format, out)
    return 0


def _cmd_verify(args, out) -> int:
    nl, ref, paths = _load_cell(args)
    if ref is None:
        print("error: no reference truth table for file-loaded circuits", file=sys.stderr)
        return 2
    report = engine.exhaustive_verify(nl, ref, paths if args.check_paths else None)
    print(report.summary(), file=out)
    return 0 if report.all_ok else 1


def _cmd_analyze(args, out) -> int:
    nl, _ref, _paths = _load_cell(args)
    metrics, _trace = analysis.run_pattern_analysis(nl, fanout=args.fanout)
    _emit_rows([metrics.as_dict()], args.format, out)
    return 0


def _cmd_sweep(args, out) -> int:
    nl, _ref, _paths = _load_cell(args)
    if args.fo and args.vdd:
        print("error: sweep over either --vdd or --fo, not both", file=sys.stderr)
        return 2
    if not args.fo and args.vdd is None:
        args.vdd = "0.8,0.9,1.0"
    if args.fo:
        fos = [int(v) for v in args.fo.split(",") if v.strip()]
        if not fos:
            print("error: --fo needs at least one fanout", file=sys.stderr)
            return 2
        points = [analysis.sweep_vdd(nl, [nl.vdd], fanout=f)[0] for f in fos]
        xs, xlabel = fos, "fanout"
    else:
        vdds = [float(v) for v in (args.vdd or "").split(",") if v.strip()]
        if not vdds:
            print("error: --vdd needs at least one supply", file=sys.stderr)
            return 2
        points = analysis.sweep_vdd(nl, vdds, fanout=args.fanout)
        xs, xlabel = vdds, "vdd (V)"
    rows = []
    for p in points:
        row = p.metrics.as_dict()
        row["at_risk"] = p.at_risk
        rows.append(row)
    _emit_rows(rows, args.format, out)
    _maybe_plot(
        args.plot,
        xlabel,
        "delay (s) / power (W)",
        {
            "delay": (xs, [p.metrics.delay for p in points]),
            "avg power": (xs, [p.metrics.avg_power for p in points]),
        },
    )
    return 0


def _cmd_scenarios(args, out) -> int:
    nl, ref, _paths = _load_cell(args)
    if ref is None:
        print("error: scenarios need a shipped cell with a reference", file=sys.stderr)
        return 2
    # (19,0) and (28,0) switch identically at the nominal levels, so swapping
    # one for the other trades speed without changing any truth table.
    c19, c28 = ChiralityVector(19, 0), ChiralityVector(28, 0)
    scenarios = {
        "proposed": [],
        "all_19_0": [(c28, c19)],
        "all_28_0": [(c19, c28)],
    }
    results = analysis.scenario_compare(nl, scenarios, ref)
    rows = []
    for r in results:
        row = {"scenario": r.label, "outputs_ok": r.outputs_ok}
        row.update(r.metrics.as_dict())
        rows.append(row)
    _emit_rows(rows, args.format, out)
    _maybe_plot(
        args.plot,
        "scenario",
        "delay (s)",
        {"delay": (list(range(len(results))), [r.metrics.delay for r in results])},
    )
    return 0


def _cmd_mc(args, out) -> int:
    nl, ref, _paths = _load_cell(args)
    if ref is None:
        print("error: mc needs a shipped cell with a reference", file=sys.stderr)
        return 2
    config = analysis.MonteCarloConfig(
        iterations=args.iterations,
        sigma_fraction=args.sigma,
        base_seed=args.seed,
    )
    report = analysis.monte_carlo(nl, ref, config)
    _emit_rows([report.as_dict()], args.format, out)
    _maybe_plot(args.plot, "PDP (J)", "count", {"pdp": (None, list(report.samples))})
    return 0


def _cmd_multiply(args, out) -> int:
    try:
        a = ternary.str_to_word(args.a)
        b = ternary.str_to_word(args.b)
        product = ternary.multiply_words_behavioral(a, b)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out.write(ternary.word_to_str(product) + "\n")
    if args.exhaustive:
        width = len(args.a)
        total = ok = 0
        radix_max = 3**width
        for x in range(radix_max):
            for y in range(radix_max):
                wx = ternary.int_to_word(x, width)
                wy = ternary.int_to_word(y, width)
                p = ternary.multiply_words_behavioral(wx, wy)
                total += 1
                ok += ternary.word_to_int(p) == x * y
        census = ternary.plan_reduction(width).census()
        out.write(f"exhaustive: {ok}/{total} products match\n")
        out.write(
            f"cells: {census.tmul} multipliers, {census.tha} half adders, "
            f"{census.tfa} full adders\n"
        )
        if ok != total:
            return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tritcell",
        description="Ternary pass-transistor cell library: simulate, verify, measure.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, cell=True):
        p.add_argument("--format", choices=("table", "json", "csv"), default="table")
        p.add_argument("--out", help="write the report to this file instead of stdout")
        if cell:
            p.add_argument("cell", help="shipped cell name (nti/pti/tha/tmul) or netlist path")
            p.add_argument("--tech", help="key=value tech parameter file")

    p = sub.add_parser("device", help="physical numbers for one chirality vector")
    p.add_argument("chirality", help="n1,n2")
    p.add_argument("--vdd", type=float, default=0.9)
    add_common(p, cell=False)
    p.set_defaults(func=_cmd_device)

    p = sub.add_parser("verify", help="exhaustive truth-table check")
    add_common(p)
    p.add_argument("--check-paths", action="store_true",
                   help="also compare per-input conducting device sets")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("analyze", help="power/delay/PDP/EDP for one cell")
    add_common(p)
    p.add_argument("--fanout", "--fo", type=int, choices=(1, 2, 4), default=4)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("sweep", help="metrics across supplies or fanouts")
    add_common(p)
    p.add_argument("--vdd", help="comma-separated volts (default 0.8,0.9,1.0)")
    p.add_argument("--fo", help="comma-separated fanouts to sweep instead of vdd")
    p.add_argument("--fanout", type=int, choices=(1, 2, 4), default=4,
                   help="fixed fanout used by a vdd sweep")
    p.add_argument("--plot", help="also render a PNG figure to this path")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("scenarios", help="chirality substitution study")
    add_common(p)
    p.add_argument("--plot", help="also render a PNG figure to this path")
    p.set_defaults(func=_cmd_scenarios)

    p = sub.add_parser("mc", help="Monte Carlo process-variation study")
    add_common(p)
    p.add_argument("--iterations", type=int, default=100)
    p.add_argument("--sigma", type=float, default=0.10 / 3.0,
                   help="relative sigma of each varied parameter")
    p.add_argument("--seed", type=int, default=20230)
    p.add_argument("--plot", help="also render a PNG histogram to this path")
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("multiply", help="multiply two ternary words")
    p.add_argument("a", help="ternary digits, most significant first")
    p.add_argument("b")
    p.add_argument("--exhaustive", action="store_true",
                   help="check every same-width input pair against integers")
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_multiply)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    out = _open_out(args)
    try:
        return args.func(args, out)
    except engine.OscillationError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return 3
    except (netlist.NetlistError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
