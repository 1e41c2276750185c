"""Program loading: DEFUN forms followed by one expression, plus static checks."""

from __future__ import annotations

from dataclasses import dataclass

from .lisp import PairRef, PassiveMemory, Symbol, Value

# name -> arity; None means variadic.
PRIMITIVES: dict[str, int | None] = {
    "CAR": 1,
    "CDR": 1,
    "CONS": 2,
    "ATOM": 1,
    "NULL": 1,
    "EQ": 2,
    "LIST": None,
    "+": 2,
    "-": 2,
    "*": 2,
    "/": 2,
    "<": 2,
    ">": 2,
    "=": 2,
}

SPECIAL_FORMS = frozenset({"QUOTE", "COND", "DEFUN"})
RESERVED = frozenset(PRIMITIVES) | SPECIAL_FORMS | {"T", "NIL"}


class BuildError(Exception):
    """Static program error. ``kind`` is UnknownFunction, Arity, BadForm or Program."""

    def __init__(self, kind: str, message: str = ""):
        super().__init__(f"{kind}: {message}" if message else kind)
        self.kind = kind


@dataclass(frozen=True)
class FunctionDef:
    name: Symbol
    params: tuple[Symbol, ...]
    body: Value


@dataclass
class Program:
    memory: PassiveMemory
    defs: dict[Symbol, FunctionDef]
    expr: Value


def load_program(text: str, memory: PassiveMemory | None = None) -> Program:
    mem = memory if memory is not None else PassiveMemory()
    forms = mem.read_all(text)
    defs: dict[Symbol, FunctionDef] = {}
    exprs = []
    for form in forms:
        if _is_form(mem, form, "DEFUN"):
            if exprs:
                raise BuildError("Program", "DEFUN after the main expression")
            fn = _parse_defun(mem, form)
            if fn.name in defs:
                raise BuildError("BadForm", f"{fn.name.name} defined twice")
            defs[fn.name] = fn
        else:
            exprs.append(form)
    if len(exprs) != 1:
        raise BuildError("Program", f"expected exactly one expression, found {len(exprs)}")
    for fn in defs.values():
        check_expr(mem, fn.body, defs)
    check_expr(mem, exprs[0], defs)
    return Program(mem, defs, exprs[0])


def _is_form(mem: PassiveMemory, v: Value, name: str) -> bool:
    if not isinstance(v, PairRef):
        return False
    head = mem.car(v)
    return isinstance(head, Symbol) and head.name == name


def _proper(mem: PassiveMemory, v: Value, what: str) -> list[Value]:
    try:
        return mem.to_list(v)
    except ValueError:
        raise BuildError("BadForm", f"dotted list in {what}") from None


def _parse_defun(mem: PassiveMemory, form: PairRef) -> FunctionDef:
    parts = _proper(mem, form, "DEFUN")
    if len(parts) != 4:
        raise BuildError("BadForm", "DEFUN takes a name, a parameter list and one body")
    _, name, params, body = parts
    if not isinstance(name, Symbol) or name.name in RESERVED:
        raise BuildError("BadForm", f"bad function name {mem.print(name)}")
    plist = _proper(mem, params, "parameter list")
    for p in plist:
        if not isinstance(p, Symbol) or p.name in ("T", "NIL"):
            raise BuildError("BadForm", f"bad parameter {mem.print(p)} in {name.name}")
    if len(set(plist)) != len(plist):
        raise BuildError("BadForm", f"duplicate parameter in {name.name}")
    return FunctionDef(name, tuple(plist), body)


def check_expr(mem: PassiveMemory, expr: Value, defs: dict[Symbol, FunctionDef]) -> None:
    """Reject unknown operators, arity mismatches and malformed special forms."""
    stack = [expr]
    while stack:
        e = stack.pop()
        if not isinstance(e, PairRef):
            continue
        op = mem.car(e)
        args = _proper(mem, mem.cdr(e), "application")
        if not isinstance(op, Symbol):
            raise BuildError("UnknownFunction", f"operator {mem.print(op)} is not a symbol")
        if op.name == "QUOTE":
            if len(args) != 1:
                raise BuildError("Arity", "QUOTE takes one argument")
            continue
        if op.name == "COND":
            for clause in args:
                parts = _proper(mem, clause, "COND clause")
                if len(parts) != 2:
                    raise BuildError("BadForm", "COND clause must be (test expr)")
                stack.extend(reversed(parts))
            continue
        if op.name == "DEFUN":
            raise BuildError("BadForm", "DEFUN only allowed at top level")
        if op.name in PRIMITIVES:
            want = PRIMITIVES[op.name]
        elif op in defs:
            want = len(defs[op].params)
        else:
            raise BuildError("UnknownFunction", op.name)
        if want is not None and want != len(args):
            raise BuildError("Arity", f"{op.name} takes {want}, got {len(args)}")
        stack.extend(reversed(args))


def cond_clauses(mem: PassiveMemory, expr: PairRef) -> list[tuple[Value, Value]]:
    out = []
    for clause in mem.iter_list(mem.cdr(expr)):
        test, then = mem.to_list(clause)
        out.append((test, then))
    return out

