"""Ready FIFO, ring-priority arbitration, and result delivery."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import InvariantViolation
from .graph import PENDING, ActiveMemory, State
from .kernels import ReadyFifo, arbitrate
from .lisp import Value

MAX_PROCESSORS = 64


class ProcStatus(Enum):
    FREE = "free"
    AWAITING_DISPATCH = "awaiting"
    BUSY = "busy"


@dataclass
class ProcessorSlot:
    id: int
    status: ProcStatus = ProcStatus.FREE
    node: int = -1
    finish: int = 0
    busy_cycles: int = 0


class Distributor:
    """Owns the ready FIFO and the processor ring.

    Processor ``i`` sits ``i`` hops from the distributor, so ascending id is
    descending priority.
    """

    def __init__(self, processors: int, fifo_cap: int | None = None):
        if not 1 <= processors <= MAX_PROCESSORS:
            raise ValueError(f"processor count must be in 1..{MAX_PROCESSORS}, got {processors}")
        self.processors = [ProcessorSlot(i) for i in range(processors)]
        self.fifo = ReadyFifo()
        self.fifo_cap = fifo_cap
        self.free_mask = (1 << processors) - 1

    @property
    def has_free(self) -> bool:
        return self.free_mask != 0

    def enqueue_ready(self, active: ActiveMemory, node_id: int) -> None:
        node = active[node_id]
        if node.state is not State.READY or node.pending != 0:
            raise InvariantViolation(f"node {node_id} enqueued while {node.state.name}")
        self.fifo.push(node_id)
        node.advance(State.ENQUEUED)

    def fifo_full(self) -> bool:
        return self.fifo_cap is not None and len(self.fifo) >= self.fifo_cap

    def claim(self) -> tuple[int, int]:
        """Pop the FIFO head and reserve the highest-priority free processor."""
        proc = arbitrate(self.free_mask)
        node = self.fifo.pop()
        slot = self.processors[proc]
        slot.status = ProcStatus.AWAITING_DISPATCH
        slot.node = node
        self.free_mask &= ~(1 << proc)
        return node, proc

    def start(self, proc: int, finish: int, service: int) -> None:
        slot = self.processors[proc]
        if slot.status is not ProcStatus.AWAITING_DISPATCH:
            raise InvariantViolation(f"processor {proc} started while {slot.status.name}")
        slot.status = ProcStatus.BUSY
        slot.finish = finish
        slot.busy_cycles += service

    def release(self, proc: int) -> None:
        slot = self.processors[proc]
        if slot.status is ProcStatus.FREE:
            raise InvariantViolation(f"processor {proc} released twice")
        slot.status = ProcStatus.FREE
        slot.node = -1
        self.free_mask |= 1 << proc

    def in_use(self) -> int:
        return sum(1 for p in self.processors if p.status is not ProcStatus.FREE)


def deliver_result(active: ActiveMemory, node_id: int, value: Value) -> tuple[bool, list[int]]:
    """Store *value* in the slot waiting for it.

    Returns ``(is_root, newly_ready)``; a root delivery finishes the run.
    """
    node = active[node_id]
    if node.state is not State.EXECUTING:
        raise InvariantViolation(f"node {node_id} delivered while {node.state.name}")
    node.advance(State.DONE)
    if node.parent is None:
        return True, []
    pid, slot = node.parent
    parent = active[pid]
    if parent.args[slot] is not PENDING:
        raise InvariantViolation(f"slot {slot} of node {pid} already filled")
    parent.args[slot] = value
    parent.pending -= 1
    parent.preds.append(node_id)
    if parent.pending == 0:
        parent.advance(State.READY)
        return False, [pid]
    return False, []
