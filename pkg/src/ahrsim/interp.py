"""Sequential applicative-order evaluator used as the oracle for the simulator.

Deliberately naive and recursive; it shares only the passive memory and
program loader with the machine model.
"""

from __future__ import annotations

import sys
import threading
from dataclasses import dataclass, field

from .errors import DEFAULT_EXPANSION_LIMIT, ErrorKind, LispRuntimeError
from .lisp import INT_MAX, INT_MIN, NIL, PairRef, PassiveMemory, PassiveMemoryFull, Symbol, Value
from .program import FunctionDef, Program, load_program


@dataclass
class EvalEnv:
    defs: dict[Symbol, FunctionDef]
    bindings: dict[Symbol, Value] = field(default_factory=dict)
    depth: int = 0


class Evaluator:
    def __init__(self, mem: PassiveMemory, limit: int = DEFAULT_EXPANSION_LIMIT):
        self.mem = mem
        self.limit = limit
        self.t = mem.intern("T")

    def truth(self, flag: bool) -> Value:
        return self.t if flag else NIL

    def eval(self, expr: Value, env: EvalEnv) -> Value:
        mem = self.mem
        if isinstance(expr, Symbol):
            if expr.name == "T":
                return expr
            if expr in env.bindings:
                return env.bindings[expr]
            raise LispRuntimeError(ErrorKind.UNBOUND_SYMBOL, expr.name)
        if not isinstance(expr, PairRef):
            return expr
        op = mem.car(expr)
        name = op.name
        if name == "QUOTE":
            return mem.car(mem.cdr(expr))
        if name == "COND":
            for clause in mem.iter_list(mem.cdr(expr)):
                test = mem.car(clause)
                if self.eval(test, env) is not NIL:
                    return self.eval(mem.car(mem.cdr(clause)), env)
            return NIL
        args = [self.eval(a, env) for a in mem.iter_list(mem.cdr(expr))]
        fn = env.defs.get(op)
        if fn is not None:
            if env.depth + 1 > self.limit:
                raise LispRuntimeError(ErrorKind.EXPANSION_LIMIT, f"depth {env.depth + 1}")
            inner = EvalEnv(env.defs, dict(zip(fn.params, args)), env.depth + 1)
            return self.eval(fn.body, inner)
        return self.apply_primitive(name, args)

    def apply_primitive(self, name: str, args: list[Value]) -> Value:
        mem = self.mem
        try:
            if name == "CAR":
                if not isinstance(args[0], PairRef):
                    raise LispRuntimeError(ErrorKind.CAR_OF_ATOM)
                return mem.car(args[0])
            if name == "CDR":
                if not isinstance(args[0], PairRef):
                    raise LispRuntimeError(ErrorKind.CDR_OF_ATOM)
                return mem.cdr(args[0])
            if name == "CONS":
                return mem.cons(args[0], args[1])
            if name == "LIST":
                return mem.list(*args)
            if name == "ATOM":
                return self.truth(not isinstance(args[0], PairRef))
            if name == "NULL":
                return self.truth(args[0] is NIL)
            if name == "EQ":
                a, b = args
                return self.truth(type(a) is type(b) and a == b)
        except PassiveMemoryFull:
            raise LispRuntimeError(ErrorKind.PASSIVE_MEMORY_FULL) from None
        a, b = args
        if type(a) is not int or type(b) is not int:
            raise LispRuntimeError(ErrorKind.TYPE_ERROR, f"{name} on non-integer")
        if name == "<":
            return self.truth(a < b)
        if name == ">":
            return self.truth(a > b)
        if name == "=":
            return self.truth(a == b)
        if name == "+":
            r = a + b
        elif name == "-":
            r = a - b
        elif name == "*":
            r = a * b
        else:
            if b == 0:
                raise LispRuntimeError(ErrorKind.DIV_BY_ZERO)
            r = abs(a) // abs(b)
            if (a < 0) != (b < 0):
                r = -r
        if not INT_MIN <= r <= INT_MAX:
            raise LispRuntimeError(ErrorKind.OVERFLOW, f"{name} result {r}")
        return r


def eval_seq(expr: Value, env: EvalEnv, passive: PassiveMemory,
             limit: int = DEFAULT_EXPANSION_LIMIT) -> Value:
    """Evaluate *expr*; raises LispRuntimeError on run-time errors."""
    return Evaluator(passive, limit).eval(expr, env)


@dataclass
class OracleResult:
    memory: PassiveMemory
    value: Value = NIL
    error: ErrorKind | None = None

    @property
    def text(self) -> str:
        return self.memory.print(self.value) if self.error is None else str(self.error)


_STACK_BYTES = 512 * 1024 * 1024


def evaluate_source(source: str, cells: int | None = None,
                    limit: int = DEFAULT_EXPANSION_LIMIT) -> OracleResult:
    """Load and evaluate a whole program on a large-stack worker thread.

    Parse/build errors propagate to the caller.
    """
    mem = PassiveMemory() if cells is None else PassiveMemory(cells)
    program: Program = load_program(source, mem)
    result = OracleResult(mem)
    failure: list[BaseException] = []

    def work() -> None:
        try:
            result.value = eval_seq(program.expr, EvalEnv(program.defs), mem, limit)
        except LispRuntimeError as exc:
            result.error = exc.kind
        except BaseException as exc:  # re-raised on the caller's thread
            failure.append(exc)

    old_limit = sys.getrecursionlimit()
    old_stack = threading.stack_size()
    sys.setrecursionlimit(max(old_limit, 20 * limit + 1000))
    threading.stack_size(_STACK_BYTES)
    try:
        worker = threading.Thread(target=work)
        worker.start()
    finally:
        threading.stack_size(old_stack)
    worker.join()
    sys.setrecursionlimit(old_limit)
    if failure:
        raise failure[0]
    return result
