import random

import hypothesis

from sfqsim.cells import PulseEvent, simulate
from sfqsim.oracle import compare_trace, run_oracle

hypothesis.settings.register_profile("fast", max_examples=25)
hypothesis.settings.register_profile("ci", max_examples=100)
hypothesis.settings.load_profile("fast")


def random_symbols(rng: random.Random, n: int) -> list[str]:
    return [rng.choice(("SET", "RST", "CLK")) for _ in range(n)]


def schedule_from_symbols(symbols, period=100e-12, offset=100e-12):
    """One pulse per symbol on the matching external port, one period apart."""
    port = {"SET": "set", "RST": "rst", "CLK": "clk"}
    return [PulseEvent(offset + period * i, port[s]) for i, s in enumerate(symbols)]


def oracle_matches(circuit, kind, symbols, period=100e-12, window=50e-12) -> bool:
    events = schedule_from_symbols(symbols, period)
    tstop = events[-1].time + 200e-12 if events else 1e-9
    result = simulate(circuit, events, tstop)
    expected = [count for _, count in run_oracle(kind, symbols)]
    clocks = [e.time for e in events if e.port == "clk"]
    return compare_trace(expected, result.outputs, clocks, window).passed
