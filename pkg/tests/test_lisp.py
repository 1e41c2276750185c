import pytest
from hypothesis import given, strategies as st

from ahrsim.lisp import (
    DEFAULT_CELLS,
    NIL,
    LexError,
    PairRef,
    ParseError,
    PassiveMemory,
    PassiveMemoryFull,
    Symbol,
)


def test_intern_idempotent(mem):
    assert mem.intern("CAR") is mem.intern("CAR")


def test_intern_case_folds(mem):
    assert mem.intern("car") == mem.intern("CAR")
    assert mem.intern("car").name == "CAR"


@pytest.mark.parametrize("name", ["", "A B", "(", "A.B", "É"])
def test_intern_rejects_bad_names(mem, name):
    with pytest.raises(LexError):
        mem.intern(name)


def test_distinct_names_distinct_ids(mem):
    syms = [mem.intern(n) for n in ("A", "B", "C", "a")]
    assert len({s.id for s in syms}) == 3


def test_cons_contract(mem):
    before = len(mem)
    p = mem.cons(1, NIL)
    assert isinstance(p, PairRef)
    assert mem.car(p) == 1 and mem.cdr(p) is NIL
    assert len(mem) == before + 1


def test_cons_prints_dotted(mem):
    assert mem.print(mem.cons(mem.intern("A"), mem.intern("B"))) == "(A . B)"
    assert mem.print(mem.cons(1, 2)) == "(1 . 2)"


def test_default_capacity_is_256kb_of_8_byte_cells():
    assert DEFAULT_CELLS == 32768
    mem = PassiveMemory()
    for _ in range(32768):
        mem.cons(NIL, NIL)
    with pytest.raises(PassiveMemoryFull):
        mem.cons(NIL, NIL)
    assert len(mem) == 32768


def test_read_application(mem):
    v = mem.read("(+ 1 2)")
    items = mem.to_list(v)
    assert items[0] == mem.intern("+") and items[1:] == [1, 2]


def test_read_dotted(mem):
    v = mem.read("(A . B)")
    assert mem.car(v) == mem.intern("A") and mem.cdr(v) == mem.intern("B")


@pytest.mark.parametrize("text,kind", [
    ("(", "Unbalanced"),
    (")", "Unbalanced"),
    ("(A (B)", "Unbalanced"),
    ("", "Unbalanced"),
    ("(. A)", "Dot"),
    ("(A . B C)", "Dot"),
    ("(A .)", "Dot"),
    (".", "Dot"),
    ("2147483648", "IntRange"),
    ("(-2147483649)", "IntRange"),
])
def test_read_errors(mem, text, kind):
    with pytest.raises(ParseError) as exc:
        mem.read(text)
    assert exc.value.kind == kind


def test_int_bounds_accepted(mem):
    assert mem.read("2147483647") == 2**31 - 1
    assert mem.read("-2147483648") == -(2**31)


def test_read_first_expression_only(mem):
    assert mem.read("A B") == mem.intern("A")


def test_comments_skipped(mem):
    assert mem.print(mem.read("; hi\n(A ; inner\n B)")) == "(A B)"


@pytest.mark.parametrize("text,printed", [
    ("( a  b )", "(A B)"),
    ("NIL", "NIL"),
    ("()", "NIL"),
    ("(nil)", "(NIL)"),
    ("(1 (2 . 3) . 4)", "(1 (2 . 3) . 4)"),
    ("(A . (B . (C . NIL)))", "(A B C)"),
    ("-7", "-7"),
    ("+", "+"),
])
def test_canonical_print(mem, text, printed):
    assert mem.print(mem.read(text)) == printed


def test_print_nil(mem):
    assert mem.print(NIL) == "NIL"


atoms = st.one_of(
    st.integers(-(2**31), 2**31 - 1),
    st.sampled_from(["A", "FOO", "+", "X1", "NIL", "T", "*"]),
)
sexprs = st.recursive(
    atoms,
    lambda inner: st.one_of(
        st.lists(inner, max_size=5).map(lambda xs: ("list", xs)),
        st.tuples(inner, inner).map(lambda p: ("dot", p)),
    ),
    max_leaves=25,
)


def _build(mem, tree):
    if isinstance(tree, tuple) and tree[0] == "list":
        return mem.list(*[_build(mem, t) for t in tree[1]])
    if isinstance(tree, tuple):
        return mem.cons(_build(mem, tree[1][0]), _build(mem, tree[1][1]))
    if isinstance(tree, int):
        return tree
    if tree == "NIL":
        return NIL
    return mem.intern(tree)


@given(sexprs)
def test_print_read_round_trip(tree):
    mem = PassiveMemory()
    v = _build(mem, tree)
    text = mem.print(v)
    again = mem.read(text)
    assert mem.equal(v, mem, again)
    assert mem.print(again) == text


@given(sexprs)
def test_equal_across_memories(tree):
    a, b = PassiveMemory(), PassiveMemory()
    b.intern("PADDING")  # shifts symbol ids in b
    assert a.equal(_build(a, tree), b, _build(b, tree))


def test_symbol_equality_is_identifier_equality(mem):
    a = mem.read("(FOO foo)")
    x, y = mem.to_list(a)
    assert isinstance(x, Symbol) and x == y and x.id == y.id


def test_pool_monotone(mem):
    refs = [mem.cons(i, NIL) for i in range(50)]
    assert [r.index for r in refs] == sorted(r.index for r in refs)
    assert all(r.index < len(mem) for r in refs)
    assert [mem.car(r) for r in refs] == list(range(50))
