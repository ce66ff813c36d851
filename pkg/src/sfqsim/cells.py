"""Delay-annotated behavioral cell library and discrete-event simulation.

Cells: JTL (repeater), SPL (splitter), CBU (confluence buffer), DFF
(destructive 1-bit readout), MEM (multi-fluxon set/reset memory unit),
MCG/RG (pulse replicators on the clock/reset paths). Circuits are static
graphs; all per-run state lives in the simulator, so a circuit can be
simulated concurrently from any number of threads.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace

PS = 1e-12

JJ_COUNTS = {"JTL": 2, "SPL": 3, "CBU": 7, "DFF": 3, "MEM": 11, "MCG": 3, "RG": 3}

# external input ports are applied in this order at equal timestamps
_PORT_PRIORITY = {"set": 0, "rst": 1, "clk": 2}


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class CellTimings:
    jtl_delay: float = 3e-12
    spl_delay: float = 2.5e-12
    cbu_delay: float = 5e-12
    mem_delay: float = 5e-12
    mcg_spacing: float = 4e-12
    cbu_dead_time: float = 2e-12

    def __post_init__(self):
        for name in (
            "jtl_delay",
            "spl_delay",
            "cbu_delay",
            "mem_delay",
            "mcg_spacing",
            "cbu_dead_time",
        ):
            if getattr(self, name) <= 0:
                raise CircuitError(f"{name} must be positive")

    @property
    def feedback_delay(self) -> float:
        """Splitter-to-memory reload path: SPL + JTL + CBU."""
        return self.spl_delay + self.jtl_delay + self.cbu_delay

    def check_replication(self, replicas: int) -> None:
        """Replicated clocks must all land before the first reload returns."""
        spread = (replicas - 1) * self.mcg_spacing
        limit = self.mem_delay + self.feedback_delay
        if spread >= limit:
            raise CircuitError(
                f"(n-1)*mcg_spacing must stay below mem_delay+spl+jtl+cbu: "
                f"{spread / PS:.3f} ps >= {limit / PS:.3f} ps"
            )


@dataclass(frozen=True)
class CellInstance:
    name: str
    kind: str
    capacity: int = 0  # MEM/DFF
    replicas: int = 0  # MCG/RG

    def __post_init__(self):
        if self.kind not in JJ_COUNTS:
            raise CircuitError(f"unknown cell kind {self.kind!r}")
        if self.kind == "DFF" and self.capacity == 0:
            object.__setattr__(self, "capacity", 1)
        if self.kind in ("MEM", "DFF") and self.capacity < 1:
            raise CircuitError(f"{self.name}: storage cells need capacity >= 1")
        if self.kind in ("MCG", "RG") and self.replicas < 1:
            raise CircuitError(f"{self.name}: replicators need replicas >= 1")

    @property
    def jj_count(self) -> int:
        return JJ_COUNTS[self.kind]


@dataclass(frozen=True)
class PulseEvent:
    time: float
    port: str


@dataclass
class BehavioralCircuit:
    name: str
    timings: CellTimings
    cells: dict[str, CellInstance] = field(default_factory=dict)
    # (cell, output port) -> (cell, input port); "" as cell names an external port
    nets: dict[tuple[str, str], tuple[str, str]] = field(default_factory=dict)
    inputs: dict[str, tuple[str, str]] = field(default_factory=dict)
    outputs: dict[tuple[str, str], str] = field(default_factory=dict)
    feedback_cells: tuple[str, ...] = ()

    def add_cell(self, cell: CellInstance) -> None:
        if cell.name in self.cells:
            raise CircuitError(f"duplicate cell {cell.name}")
        self.cells[cell.name] = cell

    def connect(self, src: tuple[str, str], dst: tuple[str, str]) -> None:
        if src in self.nets:
            raise CircuitError(f"output {src} already drives a net (fan-out is 1)")
        self.nets[src] = dst

    def expose_input(self, name: str, dst: tuple[str, str]) -> None:
        self.inputs[name] = dst

    def expose_output(self, src: tuple[str, str], name: str) -> None:
        if src in self.nets:
            raise CircuitError(f"output {src} already drives a net (fan-out is 1)")
        self.outputs[src] = name

    def feedback_jj_count(self) -> int:
        return sum(self.cells[c].jj_count for c in self.feedback_cells)

    def feedback_path_delay(self) -> float:
        return self.timings.feedback_delay

    def validate(self) -> None:
        """Reject cycles made purely of zero-delay replicator hops."""
        zero_delay = {n for n, c in self.cells.items() if c.kind in ("MCG", "RG")}
        edges: dict[str, set[str]] = {n: set() for n in zero_delay}
        for (src, _), (dst, _) in self.nets.items():
            if src in zero_delay and dst in zero_delay:
                edges[src].add(dst)
        visiting: set[str] = set()
        done: set[str] = set()

        def dfs(node: str) -> None:
            visiting.add(node)
            for nxt in edges[node]:
                if nxt in visiting:
                    raise CircuitError("zero-delay replicator cycle detected")
                if nxt not in done:
                    dfs(nxt)
            visiting.discard(node)
            done.add(node)

        for n in zero_delay:
            if n not in done:
                dfs(n)


def behavioral_jj_count(circuit: BehavioralCircuit) -> int:
    return sum(cell.jj_count for cell in circuit.cells.values())


def build_ndro(timings: CellTimings | None = None) -> BehavioralCircuit:
    """Single-fluxon memory with reload feedback: mem -> SPL -> {out, JTL -> CBU -> set}."""
    t = timings or CellTimings()
    c = BehavioralCircuit(name="ndro", timings=t)
    c.add_cell(CellInstance("mem", "MEM", capacity=1))
    c.add_cell(CellInstance("cbu", "CBU"))
    c.add_cell(CellInstance("spl", "SPL"))
    c.add_cell(CellInstance("jtl", "JTL"))
    c.feedback_cells = ("spl", "jtl", "cbu")

    c.expose_input("set", ("cbu", "in0"))
    c.expose_input("clk", ("mem", "clk"))
    c.expose_input("rst", ("mem", "rst"))
    c.connect(("cbu", "out"), ("mem", "set"))
    c.connect(("mem", "out"), ("spl", "in"))
    c.expose_output(("spl", "out0"), "out")
    c.connect(("spl", "out1"), ("jtl", "in"))
    c.connect(("jtl", "out"), ("cbu", "in1"))
    return c


def build_mndro(with_rg: bool = True, timings: CellTimings | None = None) -> BehavioralCircuit:
    """Three-fluxon memory: clock through MCG(3); reset through RG(3) or direct."""
    t = timings or CellTimings()
    t.check_replication(3)
    c = BehavioralCircuit(name="mndro-rst" if with_rg else "mndro-dec", timings=t)
    c.add_cell(CellInstance("mem", "MEM", capacity=3))
    c.add_cell(CellInstance("cbu", "CBU"))
    c.add_cell(CellInstance("spl", "SPL"))
    c.add_cell(CellInstance("jtl", "JTL"))
    c.add_cell(CellInstance("mcg", "MCG", replicas=3))
    c.feedback_cells = ("spl", "jtl", "cbu")

    c.expose_input("set", ("cbu", "in0"))
    c.expose_input("clk", ("mcg", "in"))
    c.connect(("mcg", "out"), ("mem", "clk"))
    if with_rg:
        c.add_cell(CellInstance("rg", "RG", replicas=3))
        c.expose_input("rst", ("rg", "in"))
        c.connect(("rg", "out"), ("mem", "rst"))
    else:
        c.expose_input("rst", ("mem", "rst"))
    c.connect(("cbu", "out"), ("mem", "set"))
    c.connect(("mem", "out"), ("spl", "in"))
    c.expose_output(("spl", "out0"), "out")
    c.connect(("spl", "out1"), ("jtl", "in"))
    c.connect(("jtl", "out"), ("cbu", "in1"))
    return c


BUILTIN_CIRCUITS = {
    "ndro": lambda t=None: build_ndro(t),
    "mndro-rst": lambda t=None: build_mndro(True, t),
    "mndro-dec": lambda t=None: build_mndro(False, t),
}


@dataclass(frozen=True)
class TraceRecord:
    time: float
    cell: str
    port: str
    state_before: int
    state_after: int


@dataclass
class SimResult:
    outputs: list[PulseEvent]
    trace: list[TraceRecord]
    warnings: list[str]


def simulate(
    circuit: BehavioralCircuit,
    schedule: list[PulseEvent],
    tstop: float,
    settling_window: float = 20e-12,
    record_trace: bool = False,
) -> SimResult:
    """Run the deterministic event queue over external input pulses.

    Returns output pulses on the external ports sorted by time. Input pulses
    closer than the settling window on one port produce a warning, not an
    error. Simultaneous external events apply in set, rst, clk order.
    """
    circuit.validate()
    warnings: list[str] = []
    last_on_port: dict[str, float] = {}
    for ev in sorted(schedule, key=lambda e: e.time):
        if ev.port not in circuit.inputs:
            raise CircuitError(f"unknown input port {ev.port!r}")
        if ev.time < 0:
            raise CircuitError(f"negative event time on {ev.port}")
        if ev.time >= tstop:
            raise CircuitError(f"event at {ev.time} not before tstop {tstop}")
        prev = last_on_port.get(ev.port)
        if prev is not None and ev.time - prev < settling_window:
            warnings.append(
                f"pulses on {ev.port} {ev.time / PS:.3f} ps and {prev / PS:.3f} ps "
                f"are closer than the {settling_window / PS:.0f} ps settling window"
            )
        last_on_port[ev.port] = ev.time

    heap: list[tuple[float, int, str, str]] = []
    seq = 0

    def push(time: float, cell: str, port: str) -> None:
        nonlocal seq
        heapq.heappush(heap, (time, seq, cell, port))
        seq += 1

    for ev in sorted(
        schedule, key=lambda e: (e.time, _PORT_PRIORITY.get(e.port, 9), e.port)
    ):
        cell, port = circuit.inputs[ev.port]
        push(ev.time, cell, port)

    mem_state = {
        name: 0 for name, cell in circuit.cells.items() if cell.kind in ("MEM", "DFF")
    }
    cbu_last_arrival = {
        name: float("-inf")
        for name, cell in circuit.cells.items()
        if cell.kind == "CBU"
    }
    outputs: list[PulseEvent] = []
    trace: list[TraceRecord] = []

    def emit(time: float, cell: str, out_port: str) -> None:
        key = (cell, out_port)
        if key in circuit.outputs:
            if time < tstop:
                outputs.append(PulseEvent(time, circuit.outputs[key]))
            return
        if key in circuit.nets:
            dst_cell, dst_port = circuit.nets[key]
            push(time, dst_cell, dst_port)
        # an unconnected output silently drops the pulse

    t = circuit.timings
    while heap:
        time, _, cell_name, port = heapq.heappop(heap)
        if time >= tstop:
            break
        cell = circuit.cells[cell_name]
        before = mem_state.get(cell_name, 0)

        if cell.kind == "JTL":
            emit(time + t.jtl_delay, cell_name, "out")
        elif cell.kind == "SPL":
            emit(time + t.spl_delay, cell_name, "out0")
            emit(time + t.spl_delay, cell_name, "out1")
        elif cell.kind == "CBU":
            if time - cbu_last_arrival[cell_name] > t.cbu_dead_time:
                emit(time + t.cbu_delay, cell_name, "out")
            cbu_last_arrival[cell_name] = time
        elif cell.kind in ("MCG", "RG"):
            for k in range(cell.replicas):
                emit(time + k * t.mcg_spacing, cell_name, "out")
        elif cell.kind in ("MEM", "DFF"):
            state = mem_state[cell_name]
            if port == "set":
                mem_state[cell_name] = min(state + 1, cell.capacity)
            elif port == "rst":
                mem_state[cell_name] = max(state - 1, 0)
            elif port == "clk":
                if state > 0:
                    mem_state[cell_name] = state - 1
                    emit(time + t.mem_delay, cell_name, "out")
            else:
                raise CircuitError(f"unknown memory port {port!r}")
        else:
            raise CircuitError(f"unknown cell kind {cell.kind!r}")

        if record_trace:
            trace.append(
                TraceRecord(time, cell_name, port, before, mem_state.get(cell_name, 0))
            )

    outputs.sort(key=lambda e: e.time)
    return SimResult(outputs=outputs, trace=trace, warnings=warnings)


def scaled_timings(base: CellTimings, factors: dict[str, float]) -> CellTimings:
    """Return timings with the named fields multiplied by the given factors."""
    changes = {}
    for name, factor in factors.items():
        if not hasattr(base, name):
            raise CircuitError(f"unknown timing parameter {name!r}")
        changes[name] = getattr(base, name) * factor
    return replace(base, **changes)


def circuit_from_dict(spec: dict) -> BehavioralCircuit:
    """Build a circuit from a plain-dict description (the JSON circuit file).

    Schema: {"name": str, "timings": {field: picoseconds}, "cells":
    [{"name", "kind", "capacity"?, "replicas"?}], "nets": {"cell.port":
    "cell.port"}, "inputs": {ext: "cell.port"}, "outputs": {"cell.port": ext},
    "feedback_cells": [name...]}. All keys except cells are optional.
    """

    def endpoint(text: str) -> tuple[str, str]:
        if "." not in text:
            raise CircuitError(f"malformed endpoint {text!r} (want cell.port)")
        cell, port = text.split(".", 1)
        return cell, port

    timings = CellTimings(
        **{k: float(v) * PS for k, v in spec.get("timings", {}).items()}
    )
    circuit = BehavioralCircuit(name=spec.get("name", "custom"), timings=timings)
    for cell in spec.get("cells", []):
        circuit.add_cell(
            CellInstance(
                cell["name"],
                cell["kind"].upper(),
                capacity=int(cell.get("capacity", 0)),
                replicas=int(cell.get("replicas", 0)),
            )
        )
    for src, dst in spec.get("nets", {}).items():
        circuit.connect(endpoint(src), endpoint(dst))
    for ext, dst in spec.get("inputs", {}).items():
        circuit.expose_input(ext, endpoint(dst))
    for src, ext in spec.get("outputs", {}).items():
        circuit.expose_output(endpoint(src), ext)
    circuit.feedback_cells = tuple(spec.get("feedback_cells", ()))
    for name in circuit.feedback_cells:
        if name not in circuit.cells:
            raise CircuitError(f"feedback cell {name!r} not defined")
    for cell, _ in list(circuit.nets.values()) + list(circuit.inputs.values()):
        if cell not in circuit.cells:
            raise CircuitError(f"net endpoint references unknown cell {cell!r}")
    circuit.validate()
    return circuit
