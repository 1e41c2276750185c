"""The LISP processor: executes one ready node, plus the cycle cost model."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from .errors import DEFAULT_EXPANSION_LIMIT, ErrorKind, LispRuntimeError
from .graph import Apply, Cond, Const, GraphNode, NodeSpec, Prim, VarRef, plan_apply, plan_cond
from .lisp import INT_MAX, INT_MIN, NIL, PairRef, PassiveMemory, PassiveMemoryFull, Symbol, Value
from .program import PRIMITIVES, FunctionDef

CYCLES_PER_US = 6  # Z80 at 6 MHz

_DEFAULT_PRIM = {
    "CAR": 10, "CDR": 10, "ATOM": 10, "EQ": 10, "NULL": 10, "CONS": 10, "LIST": 10,
    "+": 12, "-": 12, "*": 12, "/": 12, "<": 12, ">": 12, "=": 12,
}


@dataclass
class CostModel:
    """Cycle costs. All values are non-negative integers.

    ``LIST`` costs ``prim["LIST"] + list_per_arg * arity``.  Constant and
    variable nodes cost ``const``; a COND that resolves to a value without
    building anything costs ``cond``.  User-function and COND expansions cost
    ``expand_per_node`` per created node.
    """

    prim: dict[str, int] = field(default_factory=lambda: dict(_DEFAULT_PRIM))
    list_per_arg: int = 4
    const: int = 2
    cond: int = 4
    dispatch_transfer: int = 8
    result_transfer: int = 5
    expand_per_node: int = 6
    abort_broadcast: int = 3

    _SCALARS = ("list_per_arg", "const", "cond", "dispatch_transfer",
                "result_transfer", "expand_per_node", "abort_broadcast")

    def __post_init__(self):
        if set(self.prim) != set(PRIMITIVES):
            raise ValueError("cost table must cover exactly the primitive set")
        for k, v in self.items():
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ValueError(f"cost {k} must be a non-negative integer, got {v!r}")

    def items(self) -> list[tuple[str, int]]:
        out = [(k, self.prim[k]) for k in PRIMITIVES]
        out += [(k.upper(), getattr(self, k)) for k in self._SCALARS]
        return out

    @classmethod
    def zero_overhead(cls, base: Optional["CostModel"] = None, unit: bool = False,
                      **overrides) -> "CostModel":
        """No transfer, expansion or abort cost; optionally every node costs 1."""
        cm = dataclasses.replace(base or cls(), dispatch_transfer=0, result_transfer=0,
                                 expand_per_node=0, abort_broadcast=0)
        if unit:
            cm = dataclasses.replace(cm, prim={k: 1 for k in PRIMITIVES}, list_per_arg=0,
                                     const=1, cond=1)
        return cm.with_costs(**overrides) if overrides else cm

    def with_costs(self, **costs: int) -> "CostModel":
        """Copy with entries replaced; keys as in the cost file (``CAR``, ``+``, ``COND``)."""
        prim = dict(self.prim)
        scalars = {}
        for key, value in costs.items():
            key = key.upper()
            if key in prim:
                prim[key] = value
            elif key.lower() in self._SCALARS:
                scalars[key.lower()] = value
            else:
                raise ValueError(f"unknown cost key {key}")
        return dataclasses.replace(self, prim=prim, **scalars)

    @classmethod
    def parse(cls, text: str) -> "CostModel":
        """Parse ``name value`` lines; ``#`` starts a comment. Unset keys keep defaults."""
        costs: dict[str, int] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'name value'")
            name, value = parts
            try:
                n = int(value)
            except ValueError:
                raise ValueError(f"line {lineno}: {value!r} is not an integer") from None
            if name.upper() in costs:
                raise ValueError(f"line {lineno}: duplicate key {name}")
            costs[name.upper()] = n
        try:
            return cls().with_costs(**costs)
        except ValueError as exc:
            raise ValueError(str(exc)) from None

    @classmethod
    def load(cls, path: str | Path) -> "CostModel":
        return cls.parse(Path(path).read_text())

    def dump(self) -> str:
        return "".join(f"{k} {v}\n" for k, v in self.items())


@dataclass
class ExecOutcome:
    """What a processor hands back through the handshake.

    ``kind`` is ``result``, ``expand_apply``, ``expand_cond`` or ``error``.
    """

    kind: str
    value: Value = NIL
    plan: list[NodeSpec] = field(default_factory=list)
    error: Optional[ErrorKind] = None

    @property
    def is_expansion(self) -> bool:
        return self.kind in ("expand_apply", "expand_cond")


def execute(node: GraphNode, passive: PassiveMemory, defs: Mapping[Symbol, FunctionDef],
            limit: int = DEFAULT_EXPANSION_LIMIT) -> ExecOutcome:
    """Run one node whose slots are all filled. Never touches active memory."""
    op = node.op
    try:
        if isinstance(op, Prim):
            return ExecOutcome("result", apply_primitive(op.name, node.args, passive))
        if isinstance(op, Const):
            return ExecOutcome("result", op.value)
        if isinstance(op, VarRef):
            return ExecOutcome("result", node.args[0])
        if isinstance(op, Apply):
            return ExecOutcome("expand_apply", plan=plan_apply(node, passive, defs, limit))
        if isinstance(op, Cond):
            test = node.args[0] if node.args else NIL
            step = plan_cond(node, test, passive, defs)
            if isinstance(step, list):
                return ExecOutcome("expand_cond", plan=step)
            return ExecOutcome("result", step)
    except LispRuntimeError as exc:
        return ExecOutcome("error", error=exc.kind)
    raise TypeError(f"unknown node op {op!r}")


def service_time(node: GraphNode, cm: CostModel, created: int = 0) -> int:
    """Cycles a processor spends on *node*; *created* counts expansion nodes."""
    op = node.op
    if isinstance(op, Prim):
        if op.name == "LIST":
            return cm.prim["LIST"] + cm.list_per_arg * node.arity
        return cm.prim[op.name]
    if isinstance(op, (Const, VarRef)):
        return cm.const
    if isinstance(op, Apply):
        return cm.expand_per_node * created
    if isinstance(op, Cond):
        return cm.expand_per_node * created if created else cm.cond
    raise TypeError(f"unknown node op {op!r}")


def outcome_cost(node: GraphNode, outcome: ExecOutcome, cm: CostModel) -> int:
    if outcome.kind == "error" and isinstance(node.op, (Apply, Cond)):
        return 0
    return service_time(node, cm, len(outcome.plan))


def _truth(passive: PassiveMemory, flag: bool) -> Value:
    return passive.intern("T") if flag else NIL


def apply_primitive(name: str, args: list, passive: PassiveMemory) -> Value:
    """Pure-LISP primitive semantics; errors raise LispRuntimeError."""
    if name in ("CAR", "CDR"):
        x = args[0]
        if not isinstance(x, PairRef):
            kind = ErrorKind.CAR_OF_ATOM if name == "CAR" else ErrorKind.CDR_OF_ATOM
            raise LispRuntimeError(kind, passive.print(x))
        return passive.car(x) if name == "CAR" else passive.cdr(x)
    if name == "ATOM":
        return _truth(passive, not isinstance(args[0], PairRef))
    if name == "NULL":
        return _truth(passive, args[0] is NIL)
    if name == "EQ":
        a, b = args
        return _truth(passive, type(a) is type(b) and a == b)
    if name in ("CONS", "LIST"):
        try:
            if name == "CONS":
                return passive.cons(args[0], args[1])
            return passive.list(*args)
        except PassiveMemoryFull:
            raise LispRuntimeError(ErrorKind.PASSIVE_MEMORY_FULL) from None
    a, b = args
    if type(a) is not int or type(b) is not int:
        raise LispRuntimeError(ErrorKind.TYPE_ERROR, f"{name} needs integers")
    if name == "<":
        return _truth(passive, a < b)
    if name == ">":
        return _truth(passive, a > b)
    if name == "=":
        return _truth(passive, a == b)
    if name == "+":
        r = a + b
    elif name == "-":
        r = a - b
    elif name == "*":
        r = a * b
    elif name == "/":
        if b == 0:
            raise LispRuntimeError(ErrorKind.DIV_BY_ZERO)
        # truncates toward zero
        q = abs(a) // abs(b)
        r = q if (a < 0) == (b < 0) else -q
    else:
        raise LispRuntimeError(ErrorKind.TYPE_ERROR, f"unknown primitive {name}")
    if r < INT_MIN or r > INT_MAX:
        raise LispRuntimeError(ErrorKind.OVERFLOW, f"{name} -> {r}")
    return r
