# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled scheduling kernels. Behaviour matches ``_pykernels`` exactly."""

from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport malloc, realloc, free

from .errors import InvariantViolation, NoFreeProcessor

BACKEND = "cython"


cdef struct Ev:
    int64_t time
    int64_t seq
    int64_t kind
    int64_t a
    int64_t b


cdef inline bint _less(Ev* x, Ev* y) noexcept nogil:
    if x.time != y.time:
        return x.time < y.time
    return x.seq < y.seq


cdef class EventQueue:
    """Min-heap of ``(time, seq, kind, a, b)`` integer events."""

    cdef Ev* _heap
    cdef Py_ssize_t _n
    cdef Py_ssize_t _cap
    cdef int64_t _seq

    def __cinit__(self):
        self._cap = 64
        self._n = 0
        self._seq = 0
        self._heap = <Ev*> malloc(self._cap * sizeof(Ev))
        if self._heap == NULL:
            raise MemoryError()

    def __dealloc__(self):
        free(self._heap)

    def __len__(self):
        return self._n

    cpdef int64_t push(self, int64_t time, int64_t kind, int64_t a=-1, int64_t b=-1) except -1:
        cdef Ev* grown
        cdef Py_ssize_t i, parent
        cdef Ev item, tmp
        if time < 0:
            raise ValueError("negative event time")
        if self._n == self._cap:
            grown = <Ev*> realloc(self._heap, 2 * self._cap * sizeof(Ev))
            if grown == NULL:
                raise MemoryError()
            self._heap = grown
            self._cap *= 2
        item.time = time
        item.seq = self._seq
        item.kind = kind
        item.a = a
        item.b = b
        self._seq += 1
        i = self._n
        self._n += 1
        while i > 0:
            parent = (i - 1) >> 1
            if _less(&item, &self._heap[parent]):
                self._heap[i] = self._heap[parent]
                i = parent
            else:
                break
        self._heap[i] = item
        return item.seq

    cpdef tuple pop(self):
        cdef Ev top, last
        cdef Py_ssize_t i, child, n
        if self._n == 0:
            raise IndexError("pop from empty event queue")
        top = self._heap[0]
        self._n -= 1
        n = self._n
        if n > 0:
            last = self._heap[n]
            i = 0
            while True:
                child = 2 * i + 1
                if child >= n:
                    break
                if child + 1 < n and _less(&self._heap[child + 1], &self._heap[child]):
                    child += 1
                if _less(&self._heap[child], &last):
                    self._heap[i] = self._heap[child]
                    i = child
                else:
                    break
            self._heap[i] = last
        return (top.time, top.seq, top.kind, top.a, top.b)

    def peek_time(self):
        if self._n == 0:
            raise IndexError("peek at empty event queue")
        return self._heap[0].time

    def clear(self):
        self._n = 0


cdef class ReadyFifo:
    """Queue of ready node ids; each id may be enqueued once per run."""

    cdef int64_t* _buf
    cdef Py_ssize_t _cap
    cdef Py_ssize_t _head
    cdef Py_ssize_t _n
    cdef unsigned char* _seen
    cdef Py_ssize_t _seen_cap
    cdef public Py_ssize_t max_depth

    def __cinit__(self):
        self._cap = 64
        self._head = 0
        self._n = 0
        self.max_depth = 0
        self._buf = <int64_t*> malloc(self._cap * sizeof(int64_t))
        self._seen_cap = 1024
        self._seen = <unsigned char*> malloc(self._seen_cap)
        if self._buf == NULL or self._seen == NULL:
            raise MemoryError()
        for i in range(self._seen_cap):
            self._seen[i] = 0

    def __dealloc__(self):
        free(self._buf)
        free(self._seen)

    def __len__(self):
        return self._n

    cdef int _grow_seen(self, Py_ssize_t need) except -1:
        cdef Py_ssize_t cap = self._seen_cap
        cdef unsigned char* grown
        while cap <= need:
            cap *= 2
        grown = <unsigned char*> realloc(self._seen, cap)
        if grown == NULL:
            raise MemoryError()
        for i in range(self._seen_cap, cap):
            grown[i] = 0
        self._seen = grown
        self._seen_cap = cap
        return 0

    cdef int _grow_buf(self) except -1:
        cdef int64_t* grown = <int64_t*> malloc(2 * self._cap * sizeof(int64_t))
        cdef Py_ssize_t i
        if grown == NULL:
            raise MemoryError()
        for i in range(self._n):
            grown[i] = self._buf[(self._head + i) % self._cap]
        free(self._buf)
        self._buf = grown
        self._head = 0
        self._cap *= 2
        return 0

    cpdef push(self, int64_t node):
        if node < 0:
            raise ValueError("negative node id")
        if node >= self._seen_cap:
            self._grow_seen(node)
        if self._seen[node]:
            raise InvariantViolation(f"node {node} enqueued twice")
        self._seen[node] = 1
        if self._n == self._cap:
            self._grow_buf()
        self._buf[(self._head + self._n) % self._cap] = node
        self._n += 1
        if self._n > self.max_depth:
            self.max_depth = self._n

    cpdef int64_t pop(self) except? -1:
        cdef int64_t node
        if self._n == 0:
            raise IndexError("pop from empty FIFO")
        node = self._buf[self._head]
        self._head = (self._head + 1) % self._cap
        self._n -= 1
        return node

    def peek(self):
        if self._n == 0:
            raise IndexError("peek at empty FIFO")
        return self._buf[self._head]

    def clear(self):
        self._n = 0
        self._head = 0

    def items(self):
        return [self._buf[(self._head + i) % self._cap] for i in range(self._n)]


cpdef int arbitrate(object free_mask) except -1:
    """Lowest set bit of the free-processor mask: the closest free processor."""
    cdef uint64_t m
    cdef int idx = 0
    if free_mask <= 0:
        raise NoFreeProcessor("no free processor")
    m = free_mask
    while not (m & 1):
        m >>= 1
        idx += 1
    return idx


def critical_path(indptr, preds, cost):
    """Longest cost-weighted chain in a DAG.

    Nodes are numbered in topological order; the predecessors of node ``i``
    are ``preds[indptr[i]:indptr[i+1]]``.
    """
    cdef Py_ssize_t n = len(cost)
    cdef Py_ssize_t i, k, j
    cdef int64_t start, best = 0
    cdef int64_t[:] ip = _as_i64(indptr)
    cdef int64_t[:] pr = _as_i64(preds)
    cdef int64_t[:] c = _as_i64(cost)
    cdef int64_t* finish
    if n == 0:
        return 0
    finish = <int64_t*> malloc(n * sizeof(int64_t))
    if finish == NULL:
        raise MemoryError()
    try:
        for i in range(n):
            start = 0
            for k in range(ip[i], ip[i + 1]):
                j = pr[k]
                if j >= i:
                    raise InvariantViolation("predecessor listed after its successor")
                if finish[j] > start:
                    start = finish[j]
            finish[i] = start + c[i]
            if finish[i] > best:
                best = finish[i]
    finally:
        free(finish)
    return best


cdef int64_t[:] _as_i64(object seq):
    import array
    if len(seq) == 0:
        return array.array("q", [0])
    return array.array("q", seq)
