"""Passive memory, values, and the S-expression reader/printer.

Values are plain Python objects:

* ``NIL`` -- the empty list / false
* ``int`` -- signed 32-bit integers
* :class:`Symbol` -- interned per :class:`PassiveMemory`
* :class:`PairRef` -- index into the memory's cell pool
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

INT_MIN = -(2**31)
INT_MAX = 2**31 - 1

# 256KB of RAM at 8 bytes per cell.
DEFAULT_CELLS = 256 * 1024 // 8


class LispError(Exception):
    """Base class for reader and memory errors."""


class LexError(LispError):
    pass


class ParseError(LispError):
    """Malformed source text. ``kind`` is one of Unbalanced, IntRange, Dot."""

    def __init__(self, kind: str, message: str = ""):
        super().__init__(f"{kind}: {message}" if message else kind)
        self.kind = kind


class PassiveMemoryFull(LispError):
    pass


class _Nil:
    __slots__ = ()

    def __repr__(self) -> str:
        return "NIL"

    def __bool__(self) -> bool:
        return False

    def __reduce__(self):
        return "NIL"


NIL = _Nil()


@dataclass(frozen=True)
class Symbol:
    id: int
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class PairRef:
    index: int

    def __repr__(self) -> str:
        return f"#<pair {self.index}>"


Value = Union[_Nil, int, Symbol, PairRef]

_BAD_NAME_CHARS = re.compile(r"[\s().;]")
_INT_TOKEN = re.compile(r"[+-]?[0-9]+\Z")
_TOKEN = re.compile(r"\s+|;[^\n]*|[()]|[^\s();]+")


class PassiveMemory:
    """Cell pool plus symbol table. Cells are append-only and immutable."""

    def __init__(self, capacity: int = DEFAULT_CELLS):
        if capacity < 0:
            raise ValueError("capacity must be non-negative")
        self.capacity = capacity
        self.heads: list[Value] = []
        self.tails: list[Value] = []
        self._by_name: dict[str, Symbol] = {}
        self._by_id: list[Symbol] = []

    def __len__(self) -> int:
        return len(self.heads)

    def intern(self, name: str) -> Symbol:
        if not name or not name.isascii() or _BAD_NAME_CHARS.search(name):
            raise LexError(f"bad symbol name {name!r}")
        key = name.upper()
        sym = self._by_name.get(key)
        if sym is None:
            sym = Symbol(len(self._by_id), key)
            self._by_name[key] = sym
            self._by_id.append(sym)
        return sym

    def symbol_name(self, sym_id: int) -> str:
        return self._by_id[sym_id].name

    def cons(self, head: Value, tail: Value) -> PairRef:
        if len(self.heads) >= self.capacity:
            raise PassiveMemoryFull(f"cell pool full ({self.capacity} cells)")
        self.heads.append(head)
        self.tails.append(tail)
        return PairRef(len(self.heads) - 1)

    def car(self, v: PairRef) -> Value:
        return self.heads[v.index]

    def cdr(self, v: PairRef) -> Value:
        return self.tails[v.index]

    def list(self, *items: Value) -> Value:
        out: Value = NIL
        for item in reversed(items):
            out = self.cons(item, out)
        return out

    def iter_list(self, v: Value) -> Iterator[Value]:
        """Yield the elements of a proper list; raise ValueError on a dotted tail."""
        while isinstance(v, PairRef):
            yield self.heads[v.index]
            v = self.tails[v.index]
        if v is not NIL:
            raise ValueError("improper list")

    def to_list(self, v: Value) -> list[Value]:
        return list(self.iter_list(v))

    def read(self, text: str) -> Value:
        """Return the first complete S-expression in *text*."""
        reader = Reader(self, text)
        v = reader.next()
        if v is Reader.EOF:
            raise ParseError("Unbalanced", "no expression")
        return v

    def read_all(self, text: str) -> list[Value]:
        reader = Reader(self, text)
        out = []
        while (v := reader.next()) is not Reader.EOF:
            out.append(v)
        return out

    def print(self, v: Value) -> str:
        return to_text(self, v)

    def equal(self, a: Value, other: "PassiveMemory", b: Value) -> bool:
        """Structural equality, possibly across two memories."""
        stack = [(a, b)]
        while stack:
            x, y = stack.pop()
            if isinstance(x, PairRef):
                if not isinstance(y, PairRef):
                    return False
                stack.append((self.tails[x.index], other.tails[y.index]))
                stack.append((self.heads[x.index], other.heads[y.index]))
            elif isinstance(x, Symbol):
                if not isinstance(y, Symbol) or x.name != y.name:
                    return False
            elif type(x) is not type(y) or x != y:
                return False
        return True


class Reader:
    EOF = object()

    def __init__(self, mem: PassiveMemory, text: str):
        self.mem = mem
        self.tokens = [
            t for t in _TOKEN.findall(text) if t and not t[0].isspace() and t[0] != ";"
        ]
        self.pos = 0

    def _take(self) -> str | None:
        if self.pos >= len(self.tokens):
            return None
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def next(self):
        tok = self._take()
        if tok is None:
            return self.EOF
        return self._datum(tok)

    def _datum(self, tok: str) -> Value:
        if tok == "(":
            return self._list()
        if tok == ")":
            raise ParseError("Unbalanced", "unexpected ')'")
        if tok == ".":
            raise ParseError("Dot", "'.' outside a list")
        return self._atom(tok)

    def _list(self) -> Value:
        items: list[Value] = []
        tail: Value = NIL
        while True:
            tok = self._take()
            if tok is None:
                raise ParseError("Unbalanced", "missing ')'")
            if tok == ")":
                break
            if tok == ".":
                if not items:
                    raise ParseError("Dot", "'.' with no head")
                nxt = self._take()
                if nxt is None:
                    raise ParseError("Unbalanced", "missing ')'")
                if nxt in (")", "."):
                    raise ParseError("Dot", "'.' with no tail")
                tail = self._datum(nxt)
                close = self._take()
                if close is None:
                    raise ParseError("Unbalanced", "missing ')'")
                if close != ")":
                    raise ParseError("Dot", "more than one datum after '.'")
                break
            items.append(self._datum(tok))
        out = tail
        for item in reversed(items):
            out = self.mem.cons(item, out)
        return out

    def _atom(self, tok: str) -> Value:
        if _INT_TOKEN.match(tok):
            n = int(tok)
            if not INT_MIN <= n <= INT_MAX:
                raise ParseError("IntRange", tok)
            return n
        if tok.upper() == "NIL":
            return NIL
        return self.mem.intern(tok)


def to_text(mem: PassiveMemory, v: Value) -> str:
    parts: list[str] = []
    _emit(mem, v, parts)
    return "".join(parts)


def _emit(mem: PassiveMemory, v: Value, out: list[str]) -> None:
    if v is NIL:
        out.append("NIL")
    elif isinstance(v, Symbol):
        out.append(v.name)
    elif isinstance(v, PairRef):
        out.append("(")
        _emit(mem, mem.heads[v.index], out)
        rest = mem.tails[v.index]
        while isinstance(rest, PairRef):
            out.append(" ")
            _emit(mem, mem.heads[rest.index], out)
            rest = mem.tails[rest.index]
        if rest is not NIL:
            out.append(" . ")
            _emit(mem, rest, out)
        out.append(")")
    else:
        out.append(str(v))
