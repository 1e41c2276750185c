import pytest

from ahrsim.corpus import get
from ahrsim.errors import ErrorKind, LispRuntimeError
from ahrsim.interp import EvalEnv, eval_seq, evaluate_source
from ahrsim.lisp import PassiveMemory
from ahrsim.program import load_program


def test_factorial():
    assert evaluate_source(get("fact").source).text == "120"


def test_cadr():
    assert evaluate_source("(CAR (CDR (QUOTE (A B C))))").text == "B"


def test_cond_falls_through():
    assert evaluate_source("(COND ((EQ 1 2) (QUOTE X)) (T (QUOTE Y)))").text == "Y"


def test_cond_with_computed_test():
    assert evaluate_source("(COND ((< 1 2) (QUOTE A)))").text == "A"


def test_eval_seq_direct():
    mem = PassiveMemory()
    prog = load_program("(DEFUN SQ (X) (* X X)) (SQ 9)", mem)
    assert eval_seq(prog.expr, EvalEnv(prog.defs), mem) == 81


def test_unbound_lookup_is_error_not_nil():
    mem = PassiveMemory()
    prog = load_program("(NULL X)", mem)
    with pytest.raises(LispRuntimeError) as exc:
        eval_seq(prog.expr, EvalEnv(prog.defs), mem)
    assert exc.value.kind is ErrorKind.UNBOUND_SYMBOL


def test_depth_limit():
    src = "(DEFUN LOOP (X) (LOOP X)) (LOOP 1)"
    assert evaluate_source(src, limit=50).error is ErrorKind.EXPANSION_LIMIT


def test_deep_recursion_within_default_limit():
    src = """(DEFUN DOWN (N) (COND ((= N 0) 0) (T (DOWN (- N 1)))))
             (DOWN 9999)"""
    assert evaluate_source(src).text == "0"
    src10k = src.replace("9999", "10000")
    assert evaluate_source(src10k).error is ErrorKind.EXPANSION_LIMIT


@pytest.mark.parametrize("name,kind", [
    ("err_divzero", "DivByZero"),
    ("err_car_atom", "CarOfAtom"),
    ("err_cdr_atom", "CdrOfAtom"),
    ("err_type", "TypeError"),
    ("err_unbound", "UnboundSymbol"),
    ("err_overflow", "Overflow"),
    ("err_cons_loop", "PassiveMemoryFull"),
])
def test_error_programs(name, kind):
    assert evaluate_source(get(name).source).text == kind
