import pytest

from ahrsim.errors import ErrorKind, InvariantViolation, LispRuntimeError
from ahrsim.graph import (
    PENDING,
    ActiveMemory,
    ActiveMemoryFull,
    Apply,
    Cond,
    Const,
    Prim,
    State,
    VarRef,
    build_graph,
    expand_apply,
    expand_cond,
    plan,
)
from ahrsim.lisp import NIL
from ahrsim.program import load_program

from oracles import enumerate_graph


def _build(src, capacity=8192):
    prog = load_program(src)
    active = ActiveMemory(capacity)
    root, ready = build_graph(active, prog.memory, prog.expr, prog.defs, {})
    return prog, active, root, ready


def test_all_literal_application_is_one_ready_node():
    _, active, root, ready = _build("(+ 1 2)")
    assert len(active) == 1
    assert active[root].pending == 0
    assert ready == [root]
    assert active[root].args == [1, 2]


def test_constant_argument_prefilled():
    _, active, root, ready = _build("(+ (* 2 3) 4)")
    assert len(active) == 2
    node = active[root]
    assert node.pending == 1
    assert node.args[0] is PENDING and node.args[1] == 4
    assert ready == [1] and active[1].op == Prim("*")


FGH = """
(DEFUN F (A B C) (+ A (+ B C)))
(DEFUN G (X) X)
(DEFUN H (X) X)
(F (G 1) (H 2) 3)
"""


def test_user_application_matches_brute_force_enumeration():
    prog, active, root, ready = _build(FGH)
    nodes, root_pending, ready_forms = enumerate_graph(prog.memory, prog.expr)
    assert nodes == ["(F (G 1) (H 2) 3)", "(G 1)", "(H 2)"]
    assert root_pending == 2
    assert ready_forms == ["(G 1)", "(H 2)"]
    # the builder agrees with the enumeration
    assert len(active) == len(nodes)
    assert active[root].pending == root_pending
    assert [active[i].op for i in ready] == [Apply(prog.memory.intern("G")),
                                            Apply(prog.memory.intern("H"))]


@pytest.mark.parametrize("src", [
    "(+ (* (+ 1 2) (- 10 4)) (/ (* 6 7) (+ 2 1)))",
    "(LIST (CAR (QUOTE (A))) (CONS 1 (CONS 2 NIL)) 7 (QUOTE X) (ATOM (CDR (QUOTE (B)))))",
    "(LIST 1 2 3)",
    "(QUOTE (A B))",
    "(EQ (+ 1 (+ 2 (+ 3 4))) (- 20 10))",
])
def test_builder_matches_enumerator(src):
    prog, active, root, ready = _build(src)
    nodes, root_pending, ready_forms = enumerate_graph(prog.memory, prog.expr)
    assert len(active) == len(nodes)
    assert active[root].pending == root_pending
    assert len(ready) == len(ready_forms)
    assert all(active[i].pending == 0 and active[i].state is State.READY for i in ready)
    active.check_counters()
    active.check_tree()


def test_top_level_constant_becomes_const_node():
    _, active, root, ready = _build("(QUOTE (A B))")
    assert isinstance(active[root].op, Const) and ready == [root]


def test_expand_apply_substitutes():
    prog = load_program("(DEFUN SQUARE (X) (* X X)) (SQUARE 3)")
    active = ActiveMemory()
    root, _ = build_graph(active, prog.memory, prog.expr, prog.defs, {})
    active[root].state = State.EXECUTING
    new_root, ready = expand_apply(active, root, prog.memory, prog.defs)
    node = active[new_root]
    assert node.op == Prim("*") and node.args == [3, 3]
    assert ready == [new_root]
    assert node.parent is None  # inherited the Root link
    assert node.depth == 1 and node.preds == [root]
    assert active[root].expanded


def test_expand_apply_fact_zero_yields_cond():
    prog = load_program("(DEFUN FACT (N) (COND ((= N 0) 1) (T (* N (FACT (- N 1)))))) (FACT 0)")
    active = ActiveMemory()
    root, _ = build_graph(active, prog.memory, prog.expr, prog.defs, {})
    new_root, ready = expand_apply(active, root, prog.memory, prog.defs)
    assert isinstance(active[new_root].op, Cond)
    assert active[new_root].pending == 1
    assert active[ready[0]].op == Prim("=") and active[ready[0]].args == [0, 0]


def test_expand_apply_with_no_room():
    prog = load_program("(DEFUN SQUARE (X) (* X X)) (SQUARE 3)")
    active = ActiveMemory(capacity=1)
    root, _ = build_graph(active, prog.memory, prog.expr, prog.defs, {})
    with pytest.raises(ActiveMemoryFull):
        expand_apply(active, root, prog.memory, prog.defs)
    assert len(active) == 1


def test_expansion_limit():
    prog = load_program("(DEFUN LOOP (X) (LOOP X)) (LOOP 1)")
    active = ActiveMemory()
    root, _ = build_graph(active, prog.memory, prog.expr, prog.defs, {})
    current = root
    for _ in range(3):
        current, _ = expand_apply(active, current, prog.memory, prog.defs, limit=3)
    with pytest.raises(LispRuntimeError) as exc:
        expand_apply(active, current, prog.memory, prog.defs, limit=3)
    assert exc.value.kind is ErrorKind.EXPANSION_LIMIT


def _cond_node(src):
    prog = load_program(src)
    active = ActiveMemory()
    root, ready = build_graph(active, prog.memory, prog.expr, prog.defs, {})
    return prog, active, root


def test_cond_first_true_clause():
    prog, active, root = _cond_node("(COND (T 1) (T 2))")
    assert active[root].pending == 0
    assert expand_cond(active, root, prog.memory.intern("T"), prog.memory, prog.defs) == 1
    assert len(active) == 1


def test_cond_exhausted_is_nil():
    prog, active, root = _cond_node("(COND (NIL 1))")
    assert expand_cond(active, root, NIL, prog.memory, prog.defs) is NIL


def test_cond_false_test_builds_next_clause():
    prog, active, root = _cond_node("(COND ((NULL 1) 1) ((< 1 2) (QUOTE A)))")
    assert active[root].pending == 1
    new_root, ready = expand_cond(active, root, NIL, prog.memory, prog.defs)
    assert isinstance(active[new_root].op, Cond)
    assert len(active[new_root].op.clauses) == 1
    assert active[ready[0]].op == Prim("<")
    result = expand_cond(active, new_root, prog.memory.intern("T"), prog.memory, prog.defs)
    assert prog.memory.print(result) == "A"


def test_cond_consequent_built_lazily():
    created = []
    prog = load_program("(DEFUN EXPENSIVE (N) (+ N N)) (COND (T 1) (T (EXPENSIVE 2)))")
    active = ActiveMemory(on_create=created.append)
    build_graph(active, prog.memory, prog.expr, prog.defs, {})
    assert [type(n.op) for n in created] == [Cond]


def test_unbound_variable_is_runtime_error():
    prog = load_program("(DEFUN F (X) (+ X Y)) (F 1)")
    fn = prog.defs[prog.memory.intern("F")]
    with pytest.raises(LispRuntimeError) as exc:
        plan(prog.memory, fn.body, prog.defs, {prog.memory.intern("X"): 1})
    assert exc.value.kind is ErrorKind.UNBOUND_SYMBOL


def test_root_variable_becomes_varref():
    prog = load_program("(DEFUN ID (X) X) (ID 4)")
    fn = prog.defs[prog.memory.intern("ID")]
    specs = plan(prog.memory, fn.body, prog.defs, {prog.memory.intern("X"): 4})
    assert len(specs) == 1 and isinstance(specs[0].op, VarRef) and specs[0].args == [4]


def test_materialize_is_all_or_nothing():
    prog = load_program("(+ (+ 1 2) (+ 3 4))")
    active = ActiveMemory(capacity=2)
    with pytest.raises(ActiveMemoryFull):
        build_graph(active, prog.memory, prog.expr, prog.defs, {})
    assert len(active) == 0


def test_state_transitions_are_one_way():
    _, active, root, _ = _build("(+ 1 2)")
    node = active[root]
    assert node.state is State.READY
    with pytest.raises(InvariantViolation):
        node.advance(State.WAITING)
    with pytest.raises(InvariantViolation):
        node.advance(State.EXECUTING)
    node.advance(State.ENQUEUED)
    node.advance(State.ABORTED)
    with pytest.raises(InvariantViolation):
        node.advance(State.DISPATCHED)


def test_done_cannot_abort():
    _, active, root, _ = _build("(+ 1 2)")
    node = active[root]
    for s in (State.ENQUEUED, State.DISPATCHED, State.EXECUTING, State.DONE):
        node.advance(s)
    with pytest.raises(InvariantViolation):
        node.advance(State.ABORTED)


def test_counter_check_catches_drift():
    _, active, root, _ = _build("(+ (* 2 3) 4)")
    active[root].pending = 0
    with pytest.raises(InvariantViolation):
        active.check_counters()
