"""Transient simulation of Josephson junction netlists.

Modified nodal analysis with junction phases and inductor currents as
companion states. Junctions follow the RCSJ law

    I = Ic*sin(phi) + G*V + C*dV/dt,      V = (PHI0 / 2 pi) * dphi/dt

and integration is trapezoidal with per-step Newton iteration on the sine
nonlinearity. SFQ pulses are detected as upward crossings of phi through
pi + 2*pi*k, timestamped by linear interpolation between samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .netlist import (
    GROUND,
    CurrentSource,
    FlatNetlist,
    Inductor,
    Junction,
    NetlistError,
    Resistor,
)

PHI0 = 2.067833848e-15  # flux quantum h/2e, webers
PHI0_OVER_2PI = PHI0 / (2.0 * math.pi)

# default junction capacitance when the model card omits it: 0.7 fF per uA of
# critical current (100 uA/um^2 density, 70 fF/um^2 specific capacitance)
CAP_PER_AMP = 0.7e-15 / 1e-6


class SimulationError(RuntimeError):
    """Newton failed to converge even after step halving."""

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (t={time:.4e} s)")
        self.time = time


class StructuralError(RuntimeError):
    """The netlist produces a singular system (or is otherwise unsolvable)."""


@dataclass(frozen=True)
class TransientConfig:
    dt: float | None = None        # defaults to the .tran step, else 0.1 ps
    tstop: float | None = None     # defaults to the .tran stop
    tstart: float | None = None    # recording start, defaults to the .tran start
    newton_abstol_v: float = 1e-6
    newton_abstol_i: float = 1e-9
    max_newton_iters: int = 50
    pulse_threshold: float = math.pi  # crossing levels pi + 2*pi*k

    def __post_init__(self):
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.newton_abstol_v <= 0 or self.newton_abstol_i <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class PhaseSlipEvent:
    junction: str
    time: float
    index: int  # count of prior slips on this junction


@dataclass(frozen=True)
class CircuitState:
    time: float
    node_voltages: dict[str, float]
    junction_phases: dict[str, float]
    inductor_currents: dict[str, float]


@dataclass
class Waveform:
    """Sampled transient results on the fixed dt grid."""

    times: np.ndarray
    node_names: list[str]
    junction_names: list[str]
    inductor_names: list[str]
    voltages: np.ndarray            # shape (nsamples, nnodes)
    phases: np.ndarray              # shape (nsamples, njunctions)
    inductor_currents: np.ndarray   # shape (nsamples, ninductors)
    junction_nodes: dict[str, tuple[int, int]] = field(default_factory=dict)

    def node_voltage(self, node: str) -> np.ndarray:
        return self.voltages[:, self.node_names.index(node)]

    def phase(self, junction: str) -> np.ndarray:
        return self.phases[:, self.junction_names.index(junction)]

    def junction_voltage(self, junction: str) -> np.ndarray:
        p, n = self.junction_nodes[junction]
        vp = self.voltages[:, p] if p >= 0 else 0.0
        vn = self.voltages[:, n] if n >= 0 else 0.0
        return vp - vn

    def state_at(self, time: float) -> CircuitState:
        i = int(np.argmin(np.abs(self.times - time)))
        return CircuitState(
            time=float(self.times[i]),
            node_voltages={n: float(self.voltages[i, j]) for j, n in enumerate(self.node_names)},
            junction_phases={n: float(self.phases[i, j]) for j, n in enumerate(self.junction_names)},
            inductor_currents={
                n: float(self.inductor_currents[i, j]) for j, n in enumerate(self.inductor_names)
            },
        )

    def quiescent_indices(self, vtol: float = 1e-7, run: int = 5) -> np.ndarray:
        """Sample indices where |V| < vtol held for `run` consecutive samples."""
        if self.voltages.shape[1] == 0:
            return np.arange(len(self.times))
        quiet = np.all(np.abs(self.voltages) < vtol, axis=1)
        out = []
        streak = 0
        for i, q in enumerate(quiet):
            streak = streak + 1 if q else 0
            if streak >= run:
                out.append(i)
        return np.asarray(out, dtype=int)


def _junction_cap(model, area: float) -> float:
    if model.cap is not None:
        return model.cap * area
    return CAP_PER_AMP * model.icrit * area


def _junction_shunt(model) -> float:
    g = 0.0
    if model.rn is not None:
        g += 1.0 / model.rn
    if model.r0 is not None:
        g += 1.0 / model.r0
    return g


class _Engine:
    """One transient run over a flat netlist; owns all mutable state."""

    def __init__(self, flat: FlatNetlist, cfg: TransientConfig):
        if not flat.is_flat():
            raise StructuralError("netlist must be flattened before simulation")
        tran = flat.tran()
        dt = cfg.dt if cfg.dt is not None else (tran.step if tran else 0.1e-12)
        tstop = cfg.tstop if cfg.tstop is not None else (tran.stop if tran else None)
        if tstop is None:
            raise StructuralError("no .tran directive and no tstop override")
        tstart = cfg.tstart if cfg.tstart is not None else (tran.start if tran else 0.0)
        self.cfg = cfg
        self.dt = dt
        self.tstop = tstop
        self.tstart = tstart

        self.node_names = flat.nodes()
        self.node_index = {n: i for i, n in enumerate(self.node_names)}
        nn = len(self.node_names)

        self.junctions = [e for e in flat.elements if isinstance(e, Junction)]
        self.inductors = [e for e in flat.elements if isinstance(e, Inductor)]
        self.resistors = [e for e in flat.elements if isinstance(e, Resistor)]
        self.sources = [e for e in flat.elements if isinstance(e, CurrentSource)]

        self.n_unknowns = nn + len(self.inductors)

        def nid(node: str) -> int:
            return -1 if node == GROUND else self.node_index[node]

        self.j_pos = np.array([nid(j.pos) for j in self.junctions], dtype=int)
        self.j_neg = np.array([nid(j.neg) for j in self.junctions], dtype=int)
        self.j_ic = np.empty(len(self.junctions))
        self.j_cap = np.empty(len(self.junctions))
        self.j_g = np.empty(len(self.junctions))
        for k, j in enumerate(self.junctions):
            model = flat.models.get(j.model.lower())
            if model is None:
                raise NetlistError(f"unknown model reference {j.model!r} in {j.name}")
            self.j_ic[k] = model.icrit * j.area
            self.j_cap[k] = _junction_cap(model, j.area)
            self.j_g[k] = _junction_shunt(model)

        self.l_pos = np.array([nid(l.pos) for l in self.inductors], dtype=int)
        self.l_neg = np.array([nid(l.neg) for l in self.inductors], dtype=int)
        self.l_val = np.array([l.value for l in self.inductors])
        self.l_unknown = nn + np.arange(len(self.inductors))

        self.src_pos = [nid(s.pos) for s in self.sources]
        self.src_neg = [nid(s.neg) for s in self.sources]

        # static stamp: resistors and inductor KCL columns (dt-independent part)
        self.base = np.zeros((self.n_unknowns, self.n_unknowns))
        for r in self.resistors:
            g = 1.0 / r.value
            self._stamp_conductance(self.base, nid(r.pos), nid(r.neg), g)
        for k in range(len(self.inductors)):
            p, n, u = self.l_pos[k], self.l_neg[k], self.l_unknown[k]
            if p >= 0:
                self.base[p, u] += 1.0
            if n >= 0:
                self.base[n, u] -= 1.0
            self.base[u, u] = 1.0

        # state
        self.x = np.zeros(self.n_unknowns)
        self.phi = np.zeros(len(self.junctions))
        self.jv = np.zeros(len(self.junctions))       # junction voltage
        self.jdvdt = np.zeros(len(self.junctions))
        self.slip_count = np.zeros(len(self.junctions), dtype=int)
        self.events: list[PhaseSlipEvent] = []
        self.time = 0.0

    @staticmethod
    def _stamp_conductance(A: np.ndarray, p: int, n: int, g: float) -> None:
        if p >= 0:
            A[p, p] += g
        if n >= 0:
            A[n, n] += g
        if p >= 0 and n >= 0:
            A[p, n] -= g
            A[n, p] -= g

    def _matrix_for(self, h: float) -> np.ndarray:
        A = self.base.copy()
        for k in range(len(self.inductors)):
            p, n, u = self.l_pos[k], self.l_neg[k], self.l_unknown[k]
            c = h / (2.0 * self.l_val[k])
            if p >= 0:
                A[u, p] -= c
            if n >= 0:
                A[u, n] += c
        return A

    def _jv_of(self, x: np.ndarray) -> np.ndarray:
        vp = np.where(self.j_pos >= 0, x[np.maximum(self.j_pos, 0)], 0.0)
        vn = np.where(self.j_neg >= 0, x[np.maximum(self.j_neg, 0)], 0.0)
        return vp - vn

    def _step(self, h: float, depth: int) -> None:
        """Advance by h, splitting the step on Newton failure."""
        x_new, ok = self._try_step(h)
        if ok:
            self._accept(h, x_new)
            return
        if h / 2.0 < self.dt / 64.0:
            raise SimulationError("Newton failed to converge", self.time)
        self._step(h / 2.0, depth + 1)
        self._step(h / 2.0, depth + 1)

    def _try_step(self, h: float) -> tuple[np.ndarray, bool]:
        A0 = self._matrix_for(h)
        b0 = np.zeros(self.n_unknowns)
        t_new = self.time + h

        for k, s in enumerate(self.sources):
            cur = s.spec.value_at(t_new)
            p, n = self.src_pos[k], self.src_neg[k]
            if p >= 0:
                b0[p] -= cur
            if n >= 0:
                b0[n] += cur

        for k in range(len(self.inductors)):
            u = self.l_unknown[k]
            p, n = self.l_pos[k], self.l_neg[k]
            vb_old = (self.x[p] if p >= 0 else 0.0) - (self.x[n] if n >= 0 else 0.0)
            b0[u] = self.x[u] + h / (2.0 * self.l_val[k]) * vb_old

        a = math.pi * h / PHI0  # phase gain per volt: (2*pi/PHI0)*(h/2)
        phi_hist = self.phi + a * self.jv
        g_cap = 2.0 * self.j_cap / h
        i_hist = -g_cap * self.jv - self.j_cap * self.jdvdt

        x = self.x.copy()
        nv = len(self.node_names)
        for _ in range(self.cfg.max_newton_iters):
            A = A0.copy()
            b = b0.copy()
            v_guess = self._jv_of(x)
            theta = phi_hist + a * v_guess
            ij = self.j_ic * np.sin(theta) + self.j_g * v_guess + g_cap * v_guess + i_hist
            gj = self.j_ic * a * np.cos(theta) + self.j_g + g_cap
            ieq = ij - gj * v_guess
            for k in range(len(self.junctions)):
                p, n = self.j_pos[k], self.j_neg[k]
                self._stamp_conductance(A, p, n, gj[k])
                if p >= 0:
                    b[p] -= ieq[k]
                if n >= 0:
                    b[n] += ieq[k]
            try:
                x_new = np.linalg.solve(A, b)
            except np.linalg.LinAlgError as exc:
                raise StructuralError(f"singular system matrix: {exc}") from exc
            delta = x_new - x
            dv = np.abs(delta[:nv]).max() if nv else 0.0
            di = np.abs(delta[nv:]).max() if self.n_unknowns > nv else 0.0
            x = x_new
            if dv < self.cfg.newton_abstol_v and di < self.cfg.newton_abstol_i:
                return x, True
        return x, False

    def _accept(self, h: float, x_new: np.ndarray) -> None:
        a = math.pi * h / PHI0
        jv_new = self._jv_of(x_new)
        phi_new = self.phi + a * (self.jv + jv_new)
        t_new = self.time + h

        for k in range(len(self.junctions)):
            threshold = self.cfg.pulse_threshold + 2.0 * math.pi * self.slip_count[k]
            while phi_new[k] >= threshold and self.phi[k] < threshold:
                frac = (threshold - self.phi[k]) / (phi_new[k] - self.phi[k])
                t_cross = self.time + frac * h
                self.events.append(
                    PhaseSlipEvent(self.junctions[k].name, t_cross, int(self.slip_count[k]))
                )
                self.slip_count[k] += 1
                threshold += 2.0 * math.pi

        self.jdvdt = 2.0 * (jv_new - self.jv) / h - self.jdvdt
        self.jv = jv_new
        self.phi = phi_new
        self.x = x_new
        self.time = t_new

    def run(self) -> tuple[Waveform, list[PhaseSlipEvent]]:
        nsteps = int(round(self.tstop / self.dt))
        nn = len(self.node_names)
        nj = len(self.junctions)
        nl = len(self.inductors)
        times = np.empty(nsteps + 1)
        volts = np.empty((nsteps + 1, nn))
        phases = np.empty((nsteps + 1, nj))
        il = np.empty((nsteps + 1, nl))

        def record(i: int) -> None:
            times[i] = self.time
            volts[i] = self.x[:nn]
            phases[i] = self.phi
            il[i] = self.x[nn:]

        record(0)
        for i in range(1, nsteps + 1):
            self._step(self.dt, 0)
            # keep the grid exact despite accumulated float addition
            self.time = i * self.dt
            record(i)

        keep = times >= self.tstart - 1e-18
        junction_nodes = {
            j.name: (int(self.j_pos[k]), int(self.j_neg[k]))
            for k, j in enumerate(self.junctions)
        }
        wave = Waveform(
            times=times[keep],
            node_names=list(self.node_names),
            junction_names=[j.name for j in self.junctions],
            inductor_names=[l.name for l in self.inductors],
            voltages=volts[keep],
            phases=phases[keep],
            inductor_currents=il[keep],
            junction_nodes=junction_nodes,
        )
        events = [e for e in self.events if e.time >= self.tstart]
        return wave, events


def run_transient(
    flat: FlatNetlist, cfg: TransientConfig | None = None
) -> tuple[Waveform, list[PhaseSlipEvent]]:
    """Simulate a flattened netlist; returns sampled waveforms and slip events."""
    return _Engine(flat, cfg or TransientConfig()).run()


def pulse_area(waveform: Waveform, junction: str, window: tuple[float, float]) -> float:
    """Trapezoidal integral of a junction's voltage over [t1, t2], in webers."""
    t1, t2 = window
    if t1 >= t2:
        raise ValueError("window must satisfy t1 < t2")
    times = waveform.times
    if t1 < times[0] - 1e-18 or t2 > times[-1] + 1e-18:
        raise ValueError("window outside the simulated range")
    if junction not in waveform.junction_nodes:
        raise KeyError(junction)
    v = waveform.junction_voltage(junction)
    # interpolate the waveform onto the exact window edges
    grid = np.concatenate(([t1], times[(times > t1) & (times < t2)], [t2]))
    vals = np.interp(grid, times, v)
    return float(np.trapezoid(vals, grid))


@dataclass(frozen=True)
class FluxoidLoop:
    """A closed cycle of junctions/inductors with traversal orientations."""

    entries: tuple[tuple[str, str, int], ...]  # (kind, name, orientation)
    inductances: tuple[float, ...]             # per inductor entry, traversal order

    @classmethod
    def from_names(cls, flat: FlatNetlist, names: list[str]) -> "FluxoidLoop":
        """Build a loop from element names, deriving orientations by walking the cycle.

        The first element is traversed pos->neg; each subsequent element must
        continue from the previous endpoint. The walk must return to its start.
        """
        elems = []
        for name in names:
            e = flat.element(name)
            if not isinstance(e, (Junction, Inductor)):
                raise ValueError(f"{name} is not a junction or inductor")
            elems.append(e)
        if not elems:
            raise ValueError("empty loop")
        entries: list[tuple[str, str, int]] = []
        inductances: list[float] = []
        start = elems[0].pos
        at = elems[0].pos
        for e in elems:
            if e.pos == at:
                orient, at = 1, e.neg
            elif e.neg == at:
                orient, at = -1, e.pos
            else:
                raise ValueError(f"loop not closed: {e.name} does not touch node {at}")
            kind = "junction" if isinstance(e, Junction) else "inductor"
            entries.append((kind, e.name, orient))
            if kind == "inductor":
                inductances.append(e.value)
        if at != start:
            raise ValueError(f"loop not closed: ends at {at}, started at {start}")
        return cls(tuple(entries), tuple(inductances))


def count_fluxons(state: CircuitState, loop: FluxoidLoop) -> int:
    """Fluxoid quantization count for a closed superconducting loop."""
    return int(round(loop_fluxoid(state, loop)))


def loop_fluxoid(state: CircuitState, loop: FluxoidLoop) -> float:
    """The raw loop quantity (sum L*I + reduced-flux * sum phi) / PHI0.

    Junction phases enter reduced to (-pi, pi]: with unwrapped phases the sum
    telescopes to its initial value by KVL, so the stored-flux count lives in
    the winding numbers, which the reduction exposes as an integer.
    """
    total = 0.0
    l_iter = iter(loop.inductances)
    for kind, name, orient in loop.entries:
        if kind == "inductor":
            total += orient * next(l_iter) * state.inductor_currents[name]
        else:
            phi = state.junction_phases[name]
            phi -= 2.0 * math.pi * round(phi / (2.0 * math.pi))
            total += orient * PHI0_OVER_2PI * phi
    return total / PHI0


def storage_capacity(loop_inductance: float, ic: float) -> float:
    """Ic*L in units of PHI0; >1 suggests single-fluxon, >3 three-fluxon storage."""
    if loop_inductance <= 0 or ic <= 0:
        raise ValueError("loop inductance and critical current must be positive")
    return ic * loop_inductance / PHI0
