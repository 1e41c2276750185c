"""Dataflow graph in active memory: nodes, ready counters, and expansion.

Building happens in two steps.  :func:`plan` walks an expression and returns
a list of :class:`NodeSpec` without touching active memory; ``plan`` is pure
so a processor can compute an expansion (and its cost) before the
distributor commits it.  :meth:`ActiveMemory.materialize` then allocates node
ids and links the subgraph under an existing parent slot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable, Mapping, Optional, Union

from .errors import DEFAULT_EXPANSION_LIMIT, ErrorKind, InvariantViolation, LispRuntimeError
from .lisp import NIL, PairRef, PassiveMemory, Symbol, Value
from .program import PRIMITIVES, FunctionDef

DEFAULT_NODES = 8192


class ActiveMemoryFull(Exception):
    pass


class State(IntEnum):
    WAITING = 0
    READY = 1
    ENQUEUED = 2
    DISPATCHED = 3
    EXECUTING = 4
    DONE = 5
    ABORTED = 6


class _Pending:
    __slots__ = ()

    def __repr__(self) -> str:
        return "PENDING"


PENDING = _Pending()


@dataclass(frozen=True)
class Prim:
    name: str


@dataclass(frozen=True)
class Apply:
    fn: Symbol


@dataclass(frozen=True)
class Cond:
    clauses: tuple[tuple[Value, Value], ...]
    env: Mapping[Symbol, Value]


@dataclass(frozen=True)
class Const:
    value: Value


@dataclass(frozen=True)
class VarRef:
    name: Symbol


NodeOp = Union[Prim, Apply, Cond, Const, VarRef]

# (node id, slot index); None is the run's root.
Parent = Optional[tuple[int, int]]


@dataclass(eq=False)
class GraphNode:
    id: int
    op: NodeOp
    args: list
    pending: int
    parent: Parent
    state: State = State.WAITING
    program_id: int = 0
    depth: int = 0
    expanded: bool = False
    # dependency edges for critical-path accounting: slot producers and creator
    preds: list[int] = field(default_factory=list)

    @property
    def arity(self) -> int:
        return len(self.args)

    def advance(self, new: State) -> None:
        old = self.state
        if new is State.ABORTED:
            if old is State.DONE:
                raise InvariantViolation(f"node {self.id}: DONE -> ABORTED")
        elif old is State.ABORTED or new != old + 1:
            raise InvariantViolation(f"node {self.id}: {old.name} -> {new.name}")
        self.state = new


@dataclass
class NodeSpec:
    """A node not yet in active memory. ``parent`` indexes into the plan."""

    op: NodeOp
    args: list
    parent: Optional[int]
    slot: int


class _Ctx:
    __slots__ = ("mem", "defs", "env")

    def __init__(self, mem, defs, env):
        self.mem = mem
        self.defs = defs
        self.env = env


def constant_value(mem: PassiveMemory, expr: Value, env: Mapping[Symbol, Value]):
    """Value of *expr* if it needs no evaluation, else PENDING.

    Unbound variables raise ``LispRuntimeError(UnboundSymbol)``.
    """
    if isinstance(expr, PairRef):
        head = mem.car(expr)
        if isinstance(head, Symbol) and head.name == "QUOTE":
            return mem.car(mem.cdr(expr))
        return PENDING
    if isinstance(expr, Symbol):
        if expr.name == "T":
            return expr
        try:
            return env[expr]
        except KeyError:
            raise LispRuntimeError(ErrorKind.UNBOUND_SYMBOL, expr.name) from None
    return expr


def plan(mem: PassiveMemory, expr: Value, defs: Mapping[Symbol, FunctionDef],
         env: Mapping[Symbol, Value]) -> list[NodeSpec]:
    """Plan the subgraph for *expr*; the first spec is its root.

    Specs come out in pre-order, so the ready ones appear in left-to-right,
    depth-first source order.
    """
    ctx = _Ctx(mem, defs, env)
    specs: list[NodeSpec] = []
    value = constant_value(mem, expr, env)
    if value is not PENDING:
        if isinstance(expr, Symbol) and expr.name != "T":
            specs.append(NodeSpec(VarRef(expr), [value], None, 0))
        else:
            specs.append(NodeSpec(Const(value), [], None, 0))
        return specs
    _plan_form(ctx, expr, None, 0, specs)
    return specs


def _plan_form(ctx: _Ctx, expr: PairRef, parent: Optional[int], slot: int,
               specs: list[NodeSpec]) -> None:
    mem = ctx.mem
    head = mem.car(expr)
    if head.name == "COND":
        clauses = tuple(
            (mem.car(c), mem.car(mem.cdr(c))) for c in mem.iter_list(mem.cdr(expr))
        )
        _plan_cond(ctx, clauses, ctx.env, parent, slot, specs)
        return
    arg_exprs = mem.to_list(mem.cdr(expr))
    if head.name in PRIMITIVES:
        op: NodeOp = Prim(head.name)
    elif head in ctx.defs:
        op = Apply(head)
    else:
        raise LispRuntimeError(ErrorKind.UNBOUND_SYMBOL, f"function {head.name}")
    args = [constant_value(mem, a, ctx.env) for a in arg_exprs]
    me = len(specs)
    specs.append(NodeSpec(op, args, parent, slot))
    for i, (a, v) in enumerate(zip(arg_exprs, args)):
        if v is PENDING:
            _plan_form(ctx, a, me, i, specs)


def _plan_cond(ctx: _Ctx, clauses, env, parent, slot, specs) -> None:
    op = Cond(clauses, env)
    if not clauses:
        specs.append(NodeSpec(op, [], parent, slot))
        return
    test = clauses[0][0]
    v = constant_value(ctx.mem, test, env)
    me = len(specs)
    specs.append(NodeSpec(op, [v], parent, slot))
    if v is PENDING:
        _plan_form(ctx, test, me, 0, specs)


def plan_clauses(mem: PassiveMemory, clauses, env, defs) -> list[NodeSpec]:
    """Plan a fresh COND node over the remaining *clauses*."""
    ctx = _Ctx(mem, defs, env)
    specs: list[NodeSpec] = []
    _plan_cond(ctx, tuple(clauses), env, None, 0, specs)
    return specs


def plan_apply(node: GraphNode, mem: PassiveMemory, defs: Mapping[Symbol, FunctionDef],
               limit: int = DEFAULT_EXPANSION_LIMIT) -> list[NodeSpec]:
    """Plan the body of a user function with formals bound to the filled slots."""
    fn = defs[node.op.fn]
    if node.depth + 1 > limit:
        raise LispRuntimeError(ErrorKind.EXPANSION_LIMIT, f"depth {node.depth + 1}")
    env = dict(zip(fn.params, node.args))
    return plan(mem, fn.body, defs, env)


def plan_cond(node: GraphNode, test_value: Value, mem: PassiveMemory,
              defs: Mapping[Symbol, FunctionDef]):
    """Next step of a COND whose current test produced *test_value*.

    Returns either a finished Value or a plan to splice into the COND's parent.
    """
    clauses = node.op.clauses
    env = node.op.env
    if not clauses:
        return NIL
    if test_value is not NIL:
        then = clauses[0][1]
        v = constant_value(mem, then, env)
        if v is not PENDING:
            return v
        return plan(mem, then, defs, env)
    if len(clauses) == 1:
        return NIL
    return plan_clauses(mem, clauses[1:], env, defs)


class ActiveMemory:
    """Shared store of graph nodes. Nodes are never reclaimed within a run."""

    def __init__(self, capacity: int = DEFAULT_NODES,
                 on_create: Callable[[GraphNode], None] | None = None):
        self.capacity = capacity
        self.nodes: list[GraphNode] = []
        self.on_create = on_create

    def __len__(self) -> int:
        return len(self.nodes)

    def __getitem__(self, node_id: int) -> GraphNode:
        return self.nodes[node_id]

    @property
    def free(self) -> int:
        return self.capacity - len(self.nodes)

    def materialize(self, specs: list[NodeSpec], parent: Parent, depth: int = 0,
                    creator: int | None = None, program_id: int = 0) -> tuple[int, list[int]]:
        """Allocate *specs*; the plan root hangs from *parent*.

        Returns the root id and the ready node ids in plan order.  All or
        nothing: a plan that does not fit raises ActiveMemoryFull untouched.
        """
        if len(specs) > self.free:
            raise ActiveMemoryFull(
                f"need {len(specs)} nodes, {self.free} of {self.capacity} free")
        base = len(self.nodes)
        ready = []
        for spec in specs:
            if spec.parent is None:
                link = parent
            else:
                link = (base + spec.parent, spec.slot)
            pending = sum(1 for a in spec.args if a is PENDING)
            node = GraphNode(len(self.nodes), spec.op, list(spec.args), pending, link,
                             program_id=program_id, depth=depth)
            if creator is not None:
                node.preds.append(creator)
            self.nodes.append(node)
            if self.on_create is not None:
                self.on_create(node)
            if pending == 0:
                node.advance(State.READY)
                ready.append(node.id)
        return base, ready

    def check_counters(self) -> None:
        """Raise InvariantViolation unless every counter matches its pending slots."""
        for n in self.nodes:
            pending = sum(1 for a in n.args if a is PENDING)
            if pending != n.pending:
                raise InvariantViolation(f"node {n.id}: counter {n.pending}, {pending} pending")
            if n.state in (State.READY, State.ENQUEUED) and n.pending:
                raise InvariantViolation(f"node {n.id} ready with pending arguments")

    def check_tree(self) -> None:
        """Parent links form a forest whose single live root hangs from Root."""
        live_roots = [n.id for n in self.nodes
                      if n.parent is None and not _expanded(n)]
        if len(live_roots) > 1:
            raise InvariantViolation(f"several live roots: {live_roots}")
        for n in self.nodes:
            seen = set()
            cur = n
            while cur.parent is not None:
                if cur.id in seen:
                    raise InvariantViolation(f"cycle through node {cur.id}")
                seen.add(cur.id)
                pid, slot = cur.parent
                if not 0 <= pid < len(self.nodes) or slot >= self.nodes[pid].arity:
                    raise InvariantViolation(f"node {cur.id} links to a missing slot")
                cur = self.nodes[pid]


def _expanded(n: GraphNode) -> bool:
    return n.state is State.DONE and n.expanded


def build_graph(active: ActiveMemory, mem: PassiveMemory, expr: Value,
                defs: Mapping[Symbol, FunctionDef], env: Mapping[Symbol, Value],
                parent: Parent = None) -> tuple[int, list[int]]:
    return active.materialize(plan(mem, expr, defs, env), parent)


def expand_apply(active: ActiveMemory, node_id: int, mem: PassiveMemory,
                 defs: Mapping[Symbol, FunctionDef],
                 limit: int = DEFAULT_EXPANSION_LIMIT) -> tuple[int, list[int]]:
    node = active[node_id]
    specs = plan_apply(node, mem, defs, limit)
    out = active.materialize(specs, node.parent, node.depth + 1, creator=node_id)
    node.expanded = True
    return out


def expand_cond(active: ActiveMemory, node_id: int, test_value: Value, mem: PassiveMemory,
                defs: Mapping[Symbol, FunctionDef]):
    """Returns ``(root id, ready ids)`` or the COND's final Value."""
    node = active[node_id]
    step = plan_cond(node, test_value, mem, defs)
    if isinstance(step, list):
        out = active.materialize(step, node.parent, node.depth, creator=node_id)
        node.expanded = True
        return out
    return step
