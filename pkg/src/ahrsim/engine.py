"""Discrete-event engine tying graph, distributor, processors and buses together."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Callable, NamedTuple, Optional

from .errors import DEFAULT_EXPANSION_LIMIT, ErrorKind, InvariantViolation, LispRuntimeError
from .graph import DEFAULT_NODES, ActiveMemory, ActiveMemoryFull, Apply, GraphNode, State, plan
from .kernels import EventQueue, critical_path
from .lisp import DEFAULT_CELLS, PassiveMemory, Value
from .processor import CYCLES_PER_US, CostModel, ExecOutcome, execute, outcome_cost
from .program import Program, load_program
from .scheduler import MAX_PROCESSORS, Distributor, deliver_result

DEFAULT_PROCESSORS = 5

DISPATCH_END, EXEC_END, HANDSHAKE_END, ABORT_DONE = range(4)
EVENT_NAMES = ("DispatchEnd", "ExecEnd", "HandshakeEnd", "AbortDone")

TRACE_KINDS = ("READY", "DISPATCH", "EXEC_END", "RESULT", "EXPAND", "ABORT")


class StepOnFinishedRun(RuntimeError):
    pass


class Event(NamedTuple):
    time: int
    seq: int
    kind: str
    node: int
    proc: int


class TraceRecord(NamedTuple):
    cycle: int
    kind: str
    node: int
    proc: int

    def format(self) -> str:
        node = "-" if self.node < 0 else str(self.node)
        proc = "-" if self.proc < 0 else str(self.proc)
        return f"{self.cycle}\t{self.kind}\t{node}\t{proc}"


@dataclass
class Capacities:
    cells: int = DEFAULT_CELLS
    nodes: int = DEFAULT_NODES
    fifo: Optional[int] = None
    expansion_limit: int = DEFAULT_EXPANSION_LIMIT


@dataclass
class Metrics:
    processors: int
    makespan: int
    busy_cycles: list[int]
    nodes_executed: int
    expansions: int
    fifo_max_depth: int
    bus_busy_cycles: int
    total_work: int
    critical_path: int

    @property
    def utilization(self) -> float:
        if self.makespan == 0:
            return 0.0
        return sum(self.busy_cycles) / (self.processors * self.makespan)

    @property
    def makespan_us(self) -> Decimal:
        return (Decimal(self.makespan) / CYCLES_PER_US).quantize(
            Decimal("0.01"), rounding=ROUND_HALF_EVEN)


@dataclass
class RunReport:
    memory: PassiveMemory
    metrics: Metrics
    value: Optional[Value] = None
    error: Optional[ErrorKind] = None
    abort_cycle: Optional[int] = None
    abort_node: int = -1
    trace: list[TraceRecord] = field(default_factory=list)

    @property
    def aborted(self) -> bool:
        return self.error is not None

    @property
    def text(self) -> str:
        """Printed value, or the error kind for aborted runs."""
        if self.error is not None:
            return str(self.error)
        return self.memory.print(self.value)

    def trace_text(self) -> str:
        return "".join(r.format() + "\n" for r in self.trace)


class Engine:
    """One simulated run. Drive it with :meth:`step` or :meth:`run`."""

    def __init__(self, program: Program, processors: int = DEFAULT_PROCESSORS,
                 cost_model: CostModel | None = None, caps: Capacities | None = None,
                 record_trace: bool = True, debug: bool = False,
                 on_create: Callable[[GraphNode], None] | None = None):
        caps = caps or Capacities()
        self.program = program
        self.mem = program.memory
        self.cm = cost_model or CostModel()
        self.caps = caps
        self.debug = debug
        self.record_trace = record_trace
        self.active = ActiveMemory(caps.nodes, on_create)
        self.dist = Distributor(processors, caps.fifo)
        self.events = EventQueue()
        self.trace: list[TraceRecord] = []
        self.now = 0

        self.bus_busy = False
        self.bus_until = 0
        self.bus_busy_cycles = 0
        self.handshakes: deque[int] = deque()
        self.outcomes: dict[int, ExecOutcome] = {}
        self.exec_order: list[int] = []
        self.service: dict[int, int] = {}
        self.nodes_executed = 0
        self.expansions = 0

        self.finished = False
        self.value: Optional[Value] = None
        self.error: Optional[ErrorKind] = None
        self.abort_cycle: Optional[int] = None
        self.abort_node = -1
        self.makespan = 0

        self._load()

    # -- setup ---------------------------------------------------------

    def _load(self) -> None:
        try:
            specs = plan(self.mem, self.program.expr, self.program.defs, {})
            _, ready = self.active.materialize(specs, None)
        except LispRuntimeError as exc:
            self.abort(exc.kind)
            return
        except ActiveMemoryFull:
            self.abort(ErrorKind.ACTIVE_MEMORY_FULL)
            return
        if self._enqueue(ready):
            self._pump()

    # -- helpers -------------------------------------------------------

    def _emit(self, kind: str, node: int = -1, proc: int = -1) -> None:
        if self.record_trace:
            self.trace.append(TraceRecord(self.now, kind, node, proc))

    def _enqueue(self, ready: list[int]) -> bool:
        for node_id in ready:
            if self.dist.fifo_full():
                self.abort(ErrorKind.FIFO_OVERFLOW, node_id)
                return False
            self.dist.enqueue_ready(self.active, node_id)
            self._emit("READY", node_id)
        return True

    def _bus_start(self, duration: int) -> int:
        self.bus_busy = True
        self.bus_until = self.now + duration
        self.bus_busy_cycles += duration
        return self.bus_until

    def _pump(self) -> None:
        """Start the next high-speed bus transaction if the bus is idle.

        Pending handshakes go first; otherwise the FIFO head is dispatched.
        """
        if self.bus_busy or self.finished or self.error is not None:
            return
        if self.handshakes:
            proc = self.handshakes.popleft()
            end = self._bus_start(self.cm.result_transfer)
            self.events.push(end, HANDSHAKE_END, self.dist.processors[proc].node, proc)
        else:
            self.try_dispatch()

    def try_dispatch(self) -> Optional[tuple[int, int]]:
        """Send the FIFO head to the closest free processor, bus permitting."""
        if (self.bus_busy or self.finished or self.error is not None
                or not len(self.dist.fifo) or not self.dist.has_free):
            return None
        node_id, proc = self.dist.claim()
        self.active[node_id].advance(State.DISPATCHED)
        self._emit("DISPATCH", node_id, proc)
        end = self._bus_start(self.cm.dispatch_transfer)
        self.events.push(end, DISPATCH_END, node_id, proc)
        return node_id, proc

    # -- events --------------------------------------------------------

    def step(self) -> Event:
        if self.finished:
            raise StepOnFinishedRun("run already finished")
        if not len(self.events):
            raise InvariantViolation("no pending events but the run is not finished")
        time, seq, kind, node_id, proc = self.events.pop()
        if time < self.now:
            raise InvariantViolation("event time went backwards")
        self.now = time
        if kind == DISPATCH_END:
            self._dispatch_end(node_id, proc)
        elif kind == EXEC_END:
            self._exec_end(node_id, proc)
        elif kind == HANDSHAKE_END:
            self._handshake_end(node_id, proc)
        else:
            self.finished = True
            self.makespan = self.now
        self._pump()
        if self.debug:
            self.check_invariants()
        return Event(time, seq, EVENT_NAMES[kind], node_id, proc)

    def _dispatch_end(self, node_id: int, proc: int) -> None:
        self.bus_busy = False
        node = self.active[node_id]
        node.advance(State.EXECUTING)
        outcome = execute(node, self.mem, self.program.defs, self.caps.expansion_limit)
        cost = outcome_cost(node, outcome, self.cm)
        self.outcomes[node_id] = outcome
        self.service[node_id] = cost
        self.dist.start(proc, self.now + cost, cost)
        self.events.push(self.now + cost, EXEC_END, node_id, proc)

    def _exec_end(self, node_id: int, proc: int) -> None:
        self._emit("EXEC_END", node_id, proc)
        self.exec_order.append(node_id)
        outcome = self.outcomes[node_id]
        if outcome.kind == "error":
            self.abort(outcome.error, node_id)
            return
        self.handshakes.append(proc)

    def _handshake_end(self, node_id: int, proc: int) -> None:
        self.bus_busy = False
        outcome = self.outcomes.pop(node_id)
        node = self.active[node_id]
        if outcome.kind == "result":
            self.nodes_executed += 1
            self._emit("RESULT", node_id, proc)
            self.dist.release(proc)
            is_root, ready = deliver_result(self.active, node_id, outcome.value)
            if is_root:
                self.finished = True
                self.value = outcome.value
                self.makespan = self.now
                return
            self._enqueue(ready)
            return
        self.expansions += 1
        depth = node.depth + 1 if isinstance(node.op, Apply) else node.depth
        try:
            _, ready = self.active.materialize(outcome.plan, node.parent, depth,
                                               creator=node_id)
        except ActiveMemoryFull:
            self.abort(ErrorKind.ACTIVE_MEMORY_FULL, node_id)
            return
        self._emit("EXPAND", node_id, proc)
        node.advance(State.DONE)
        node.expanded = True
        self.dist.release(proc)
        self._enqueue(ready)

    # -- abort ---------------------------------------------------------

    def abort(self, kind: ErrorKind, node_id: int = -1) -> None:
        """Broadcast a stop on the low-speed bus; in-flight work is discarded."""
        if self.error is not None:
            return
        self.error = kind
        self.abort_cycle = self.now
        self.abort_node = node_id
        self._emit("ABORT", node_id)
        self.events.clear()
        if self.bus_busy:
            self.bus_busy_cycles -= self.bus_until - self.now
            self.bus_busy = False
        for slot in self.dist.processors:
            if slot.finish > self.now:
                slot.busy_cycles -= slot.finish - self.now
                slot.finish = self.now
        self.handshakes.clear()
        self.dist.fifo.clear()
        for n in self.active.nodes:
            if n.state is not State.DONE:
                n.advance(State.ABORTED)
        self.events.push(self.now + self.cm.abort_broadcast, ABORT_DONE)

    # -- driving and reporting -----------------------------------------

    def run(self) -> RunReport:
        while not self.finished:
            self.step()
        return self.report()

    def check_invariants(self) -> None:
        self.active.check_counters()
        if self.dist.in_use() > len(self.dist.processors):
            raise InvariantViolation("more busy processors than exist")
        if (self.error is None and not self.finished and not self.bus_busy
                and len(self.dist.fifo) and self.dist.has_free):
            raise InvariantViolation(f"idle bus with ready work at cycle {self.now}")
        for slot in self.dist.processors:
            if slot.busy_cycles > max(self.now, slot.finish):
                raise InvariantViolation(f"processor {slot.id} busier than elapsed time")

    def critical_path(self) -> int:
        pos = {n: i for i, n in enumerate(self.exec_order)}
        indptr = [0]
        preds: list[int] = []
        cost = []
        for n in self.exec_order:
            for p in self.active[n].preds:
                if p in pos:
                    preds.append(pos[p])
            indptr.append(len(preds))
            cost.append(self.service[n])
        return critical_path(indptr, preds, cost)

    def metrics(self) -> Metrics:
        return Metrics(
            processors=len(self.dist.processors),
            makespan=self.makespan,
            busy_cycles=[p.busy_cycles for p in self.dist.processors],
            nodes_executed=self.nodes_executed,
            expansions=self.expansions,
            fifo_max_depth=self.dist.fifo.max_depth,
            bus_busy_cycles=self.bus_busy_cycles,
            total_work=sum(self.service[n] for n in self.exec_order),
            critical_path=self.critical_path(),
        )

    def report(self) -> RunReport:
        if not self.finished:
            raise RuntimeError("run not finished")
        return RunReport(self.mem, self.metrics(), self.value, self.error,
                         self.abort_cycle, self.abort_node, list(self.trace))


def run(source: str, processors: int = DEFAULT_PROCESSORS, cost_model: CostModel | None = None,
        caps: Capacities | None = None, **engine_kw) -> RunReport:
    """Load *source* and simulate it to completion.

    Parse and build errors propagate; run-time errors give an aborted report.
    """
    if not 1 <= processors <= MAX_PROCESSORS:
        raise ValueError(f"processor count must be in 1..{MAX_PROCESSORS}, got {processors}")
    caps = caps or Capacities()
    program = load_program(source, PassiveMemory(caps.cells))
    return Engine(program, processors, cost_model, caps, **engine_kw).run()
