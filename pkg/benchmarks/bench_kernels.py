"""Compare the compiled and pure-Python kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Micro benchmarks call each backend module directly.  The end-to-end
benchmark runs the whole corpus in a subprocess per backend, toggling
AHRSIM_PURE_PYTHON, because the engine binds its backend at import.
"""

import argparse
import os
import random
import subprocess
import sys
import timeit

from ahrsim.kernels import available_backends

CORPUS_SNIPPET = """
import time
from ahrsim import kernels
from ahrsim.corpus import programs
from ahrsim.engine import run
progs = programs()
best = float("inf")
for _ in range({repeat}):
    t0 = time.perf_counter()
    for prog in progs:
        for p in (1, 5, 64):
            run(prog.source, p)
    best = min(best, time.perf_counter() - t0)
print(kernels.BACKEND, best)
"""


def bench_event_queue(mod, n=20_000):
    rng = random.Random(1)
    times = [rng.randrange(1_000_000) for _ in range(n)]

    def go():
        q = mod.EventQueue()
        for t in times:
            q.push(t, 1, 2, 3)
        while len(q):
            q.pop()

    return go


def bench_fifo(mod, n=20_000):
    def go():
        f = mod.ReadyFifo()
        for i in range(n):
            f.push(i)
            if i & 1:
                f.pop()
        while len(f):
            f.pop()

    return go


def bench_arbitrate(mod, n=20_000):
    rng = random.Random(2)
    masks = [rng.randrange(1, 1 << 64) for _ in range(n)]
    arb = mod.arbitrate

    def go():
        for m in masks:
            arb(m)

    return go


def bench_critical_path(mod, n=20_000):
    from array import array

    rng = random.Random(3)
    indptr, preds = [0], []
    for i in range(n):
        preds.extend(rng.randrange(i) for _ in range(min(i, 2)))
        indptr.append(len(preds))
    cost = [rng.randrange(20) for _ in range(n)]
    args = (array("q", indptr), array("q", preds), array("q", cost))

    def go():
        mod.critical_path(*args)

    return go


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only the Python timings are shown")

    print(f"{'kernel':<16}" + "".join(f"{name:>12}" for name in backends) + "    speedup")
    for label, factory in [("event queue", bench_event_queue), ("ready fifo", bench_fifo),
                           ("arbitrate", bench_arbitrate), ("critical path", bench_critical_path)]:
        row = {}
        for name, mod in backends.items():
            row[name] = min(timeit.repeat(factory(mod), number=1, repeat=args.repeat))
        speed = row["python"] / row["cython"] if "cython" in row else float("nan")
        cells = "".join(f"{row[name] * 1e3:>10.2f}ms" for name in backends)
        print(f"{label:<16}{cells}    {speed:6.2f}x")

    print()
    results = {}
    for pure in ("1", "0"):
        env = dict(os.environ, AHRSIM_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", CORPUS_SNIPPET.format(repeat=args.repeat)],
                             env=env, check=True, capture_output=True, text=True).stdout.split()
        results[out[0]] = float(out[1])
    for name, secs in results.items():
        print(f"corpus x (1, 5, 64) on {name:<7}{secs:8.3f} s")
    if len(results) == 2:
        print(f"end-to-end speedup {results['python'] / results['cython']:.2f}x")


if __name__ == "__main__":
    main()
