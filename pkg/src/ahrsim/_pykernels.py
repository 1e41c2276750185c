"""Pure-Python implementations of the scheduling kernels.

Mirrors ``_ckernels.pyx`` exactly; used when the extension is not built or
``AHRSIM_PURE_PYTHON=1`` is set.
"""

from __future__ import annotations

import heapq
from collections import deque

from .errors import InvariantViolation, NoFreeProcessor

BACKEND = "python"


class EventQueue:
    """Min-heap of ``(time, seq, kind, a, b)`` integer events."""

    def __init__(self):
        self._heap: list[tuple[int, int, int, int, int]] = []
        self._seq = 0

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, time: int, kind: int, a: int = -1, b: int = -1) -> int:
        if time < 0:
            raise ValueError("negative event time")
        seq = self._seq
        self._seq += 1
        heapq.heappush(self._heap, (time, seq, kind, a, b))
        return seq

    def pop(self) -> tuple[int, int, int, int, int]:
        if not self._heap:
            raise IndexError("pop from empty event queue")
        return heapq.heappop(self._heap)

    def peek_time(self) -> int:
        if not self._heap:
            raise IndexError("peek at empty event queue")
        return self._heap[0][0]

    def clear(self) -> None:
        self._heap.clear()


class ReadyFifo:
    """Queue of ready node ids; each id may be enqueued once per run."""

    def __init__(self):
        self._q: deque[int] = deque()
        self._seen: set[int] = set()
        self.max_depth = 0

    def __len__(self) -> int:
        return len(self._q)

    def push(self, node: int) -> None:
        if node in self._seen:
            raise InvariantViolation(f"node {node} enqueued twice")
        self._seen.add(node)
        self._q.append(node)
        if len(self._q) > self.max_depth:
            self.max_depth = len(self._q)

    def pop(self) -> int:
        if not self._q:
            raise IndexError("pop from empty FIFO")
        return self._q.popleft()

    def peek(self) -> int:
        if not self._q:
            raise IndexError("peek at empty FIFO")
        return self._q[0]

    def clear(self) -> None:
        self._q.clear()

    def items(self) -> list[int]:
        return list(self._q)


def arbitrate(free_mask: int) -> int:
    """Lowest set bit of the free-processor mask: the closest free processor."""
    if free_mask <= 0:
        raise NoFreeProcessor("no free processor")
    return (free_mask & -free_mask).bit_length() - 1


def critical_path(indptr, preds, cost) -> int:
    """Longest cost-weighted chain in a DAG.

    Nodes are numbered in topological order; the predecessors of node ``i``
    are ``preds[indptr[i]:indptr[i+1]]``.
    """
    n = len(cost)
    finish = [0] * n
    best = 0
    for i in range(n):
        start = 0
        for k in range(indptr[i], indptr[i + 1]):
            j = preds[k]
            if j >= i:
                raise InvariantViolation("predecessor listed after its successor")
            if finish[j] > start:
                start = finish[j]
        finish[i] = start + cost[i]
        if finish[i] > best:
            best = finish[i]
    return best
