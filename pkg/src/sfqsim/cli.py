"""Command-line front end.

Subcommands: lint, tran, bsim, oracle, margins, capacity. Exit codes:
0 success, 1 functional failure (lint errors, oracle mismatch, failing
nominal margin), 2 input error (paths, parse), 3 numerical failure
(non-convergent transient). Outputs are written atomically. SFQSIM_SEED is
accepted for forward compatibility; the engines are deterministic and
ignore it.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import fields

from . import data
from .analog import SimulationError, StructuralError, TransientConfig
from .analog import run_transient, storage_capacity
from .cells import (
    BUILTIN_CIRCUITS,
    PS,
    CellTimings,
    CircuitError,
    PulseEvent,
    scaled_timings,
    simulate,
)
from .margin import MarginError, MarginSpec, margin_sweep, render_report, report_csv
from .netlist import (
    Inductor,
    Junction,
    NetlistError,
    flatten,
    lint,
    parse_netlist,
    parse_value,
)
from .oracle import KINDS, compare_trace, run_oracle
from .waveio import (
    ScheduleError,
    read_events,
    read_schedule,
    write_events,
    write_vcd_events,
    write_vcd_waveform,
    write_waveform_csv,
)

EXIT_OK = 0
EXIT_FUNCTIONAL = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _read_file(path: str) -> str:
    if not os.path.exists(path):
        raise CliError(f"file not found: {path}")
    with open(path, encoding="utf-8") as f:
        return f.read()


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".sfqsim-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_netlist(path: str):
    try:
        return parse_netlist(_read_file(path))
    except NetlistError as exc:
        raise CliError(f"{path}: {exc}") from exc


def _load_schedule(path_or_name: str):
    if os.path.exists(path_or_name):
        text = _read_file(path_or_name)
    else:
        try:
            text = data.load_text(path_or_name)
        except FileNotFoundError:
            raise CliError(f"schedule not found: {path_or_name}") from None
    try:
        return read_schedule(text)
    except ScheduleError as exc:
        raise CliError(f"{path_or_name}: {exc}") from exc


def _parse_timings(pairs: list[str]) -> CellTimings:
    """key=value pairs in picoseconds; keys are CellTimings field names."""
    valid = {f.name for f in fields(CellTimings)}
    overrides = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise CliError(f"malformed timing override {pair!r} (want key=value)")
        key, value = pair.split("=", 1)
        key = key.strip()
        if key not in valid:
            raise CliError(f"unknown timing parameter {key!r} (choose from {sorted(valid)})")
        try:
            overrides[key] = float(value) * PS
        except ValueError:
            raise CliError(f"malformed timing value {value!r}") from None
    try:
        return CellTimings(**overrides)
    except CircuitError as exc:
        raise CliError(str(exc)) from exc


def _build_circuit(name: str, timings: CellTimings):
    if name not in BUILTIN_CIRCUITS:
        raise CliError(f"unknown circuit {name!r} (choose from {sorted(BUILTIN_CIRCUITS)})")
    try:
        return BUILTIN_CIRCUITS[name](timings)
    except CircuitError as exc:
        raise CliError(str(exc), EXIT_FUNCTIONAL) from exc


def cmd_lint(args) -> int:
    netlist = _load_netlist(args.netlist)
    diags = lint(netlist)
    for d in diags:
        print(d)
    if any(d.severity == "error" for d in diags):
        return EXIT_FUNCTIONAL
    if not diags:
        print("clean")
    return EXIT_OK


def cmd_tran(args) -> int:
    netlist = _load_netlist(args.netlist)
    diags = [d for d in lint(netlist) if d.severity == "error"]
    if diags:
        for d in diags:
            print(d, file=sys.stderr)
        return EXIT_FUNCTIONAL
    cfg = TransientConfig(
        dt=parse_value(args.dt) if args.dt else None,
        tstop=parse_value(args.tstop) if args.tstop else None,
    )
    try:
        wave, events = run_transient(flatten(netlist), cfg)
    except SimulationError as exc:
        print(f"transient failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (StructuralError, NetlistError) as exc:
        raise CliError(str(exc)) from exc
    trace = [PulseEvent(e.time, e.junction) for e in events]
    if args.out:
        _write_atomic(args.out, write_waveform_csv(wave))
    if args.events:
        _write_atomic(args.events, write_events(trace))
    if args.vcd:
        _write_atomic(args.vcd, write_vcd_waveform(wave))
    if not (args.out or args.events or args.vcd):
        print(write_events(trace), end="")
    else:
        print(f"{len(events)} phase-slip events")
    return EXIT_OK


def cmd_bsim(args) -> int:
    timings = _parse_timings(args.timings)
    circuit = _build_circuit(args.circuit, timings)
    schedule = _load_schedule(args.schedule)
    tstop = parse_value(args.tstop) if args.tstop else (
        max((e.time for e in schedule.events), default=0.0) + 200e-12
    )
    try:
        result = simulate(circuit, schedule.events, tstop)
    except CircuitError as exc:
        raise CliError(str(exc)) from exc
    for w in result.warnings:
        print(f"warning: {w}", file=sys.stderr)
    text = write_events(result.outputs)
    if args.events:
        _write_atomic(args.events, text)
    else:
        print(text, end="")
    if args.vcd:
        _write_atomic(args.vcd, write_vcd_events(result.outputs))
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.kind not in KINDS:
        raise CliError(f"unknown oracle kind {args.kind!r} (choose from {KINDS})")
    schedule = _load_schedule(args.schedule)
    observed = read_events(_read_file(args.events))
    symbols = [e.port.upper() for e in schedule.events]
    expected = [count for _, count in run_oracle(args.kind, symbols)]
    clocks = schedule.times_on("clk")
    try:
        verdict = compare_trace(expected, observed, clocks, window=args.window * PS)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    print(verdict)
    return EXIT_OK if verdict.passed else EXIT_FUNCTIONAL


def cmd_margins(args) -> int:
    base = _parse_timings(args.timings)
    schedule = _load_schedule(args.schedule)
    kind = args.target
    symbols = [e.port.upper() for e in schedule.events]
    expected = [count for _, count in run_oracle(kind, symbols)]
    clocks = schedule.times_on("clk")
    tstop = max(e.time for e in schedule.events) + 200e-12

    params = ["jtl_delay", "spl_delay", "cbu_delay", "mem_delay"]
    if kind.startswith("mndro"):
        params.append("mcg_spacing")
    if args.param:
        unknown = set(args.param) - set(params)
        if unknown:
            raise CliError(f"unknown sweep parameter(s): {sorted(unknown)}")
        params = args.param

    def passes(factors: dict[str, float]) -> bool:
        try:
            circuit = _build_circuit(kind, scaled_timings(base, factors))
        except CliError:
            return False
        result = simulate(circuit, schedule.events, tstop)
        return compare_trace(expected, result.outputs, clocks, window=args.window * PS).passed

    spec = MarginSpec(
        parameters=[(p, getattr(base, p)) for p in params],
        pass_fn=passes,
        resolution=args.resolution,
    )
    try:
        report = margin_sweep(spec)
    except MarginError as exc:
        print(f"margin sweep failed: {exc}", file=sys.stderr)
        return EXIT_FUNCTIONAL
    text = render_report(report)
    print(text, end="")
    if args.out:
        _write_atomic(args.out, report_csv(report))
    return EXIT_OK


def cmd_capacity(args) -> int:
    netlist = _load_netlist(args.netlist)
    flat = flatten(netlist)
    names = [n.strip() for n in args.loop.split(",") if n.strip()]
    if not names:
        raise CliError("empty --loop element list")
    def resolve(name: str):
        try:
            return flat.element(name)
        except KeyError:
            pass
        # fall back to a unique hierarchical suffix match (e.g. B1 -> X1.B1)
        suffix = "." + name.lower()
        hits = [e for e in flat.elements if e.name.lower().endswith(suffix)]
        if len(hits) == 1:
            return hits[0]
        raise CliError(
            f"loop element {name!r} "
            + ("is ambiguous in" if hits else "not in")
            + " the flattened netlist"
        )

    total_l = 0.0
    min_ic = None
    for name in names:
        e = resolve(name)
        if isinstance(e, Inductor):
            total_l += e.value
        elif isinstance(e, Junction):
            ic = flat.models[e.model.lower()].icrit * e.area
            min_ic = ic if min_ic is None else min(min_ic, ic)
        else:
            raise CliError(f"loop element {name!r} is not an inductor or junction")
    if min_ic is None or total_l <= 0.0:
        raise CliError("loop needs at least one inductor and one junction")
    phi = storage_capacity(total_l, min_ic)
    print(f"Ic*L = {phi:.3f} PHI0  (min Ic = {min_ic * 1e6:.1f} uA, L = {total_l * 1e12:.2f} pH)")
    print(
        "note: min-Ic times series-L is the naive reading; junction inductances "
        "and bias contributions are not included, so treat thresholds (>1 single, "
        ">3 triple) as indicative."
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sfqsim",
        description="Simulate and verify SFQ non-destructive readout memory circuits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lint", help="static checks on a netlist")
    p.add_argument("netlist")
    p.set_defaults(func=cmd_lint)

    p = sub.add_parser("tran", help="analog transient simulation")
    p.add_argument("netlist")
    p.add_argument("--dt", help="time step (suffixes allowed, e.g. 0.1p)")
    p.add_argument("--tstop", help="stop time override")
    p.add_argument("--out", help="waveform CSV path")
    p.add_argument("--events", help="phase-slip event file path")
    p.add_argument("--vcd", help="VCD dump path")
    p.set_defaults(func=cmd_tran)

    p = sub.add_parser("bsim", help="behavioral simulation of a built-in circuit")
    p.add_argument("--circuit", required=True, help="ndro | mndro-rst | mndro-dec")
    p.add_argument("--schedule", required=True, help="pulse schedule file (or shipped name)")
    p.add_argument("--tstop", help="stop time (default: last event + 200 ps)")
    p.add_argument("--events", help="output event file (default: stdout)")
    p.add_argument("--vcd", help="VCD dump path")
    p.add_argument("--timings", nargs="*", metavar="KEY=PS", help="timing overrides in ps")
    p.set_defaults(func=cmd_bsim)

    p = sub.add_parser("oracle", help="compare an event trace against the reference machine")
    p.add_argument("--kind", required=True, help="ndro | mndro-rst | mndro-dec")
    p.add_argument("--schedule", required=True)
    p.add_argument("--events", required=True)
    p.add_argument("--window", type=float, default=50.0, help="grouping window, ps")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("margins", help="behavioral timing-margin sweep")
    p.add_argument("target", help="ndro | mndro-rst | mndro-dec")
    p.add_argument("--schedule", required=True)
    p.add_argument("--resolution", type=float, default=0.005)
    p.add_argument("--window", type=float, default=50.0, help="grouping window, ps")
    p.add_argument("--param", nargs="*", help="subset of timing parameters to sweep")
    p.add_argument("--timings", nargs="*", metavar="KEY=PS")
    p.add_argument("--out", help="CSV report path")
    p.set_defaults(func=cmd_margins)

    p = sub.add_parser("capacity", help="Ic*L storage criterion for a loop")
    p.add_argument("--netlist", required=True)
    p.add_argument("--loop", required=True, help="comma-separated loop element names")
    p.set_defaults(func=cmd_capacity)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (NetlistError, ScheduleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
