import pytest
from hypothesis import given

from strategies import ka_terms, rm_terms, sequents
from untyping.syntax import (
    DuplicateBinding,
    ParseError,
    parse_env,
    parse_formula,
    parse_ka_term,
    parse_rm_judgement,
    parse_rm_term,
    parse_sequent,
    render,
    render_env,
    render_judgement,
)
from untyping.terms import BOT, ONE, TOP, Atom, Dual, KDot, KStar, KSum, KVar, LDiv, Par, RDiv, RDot, RVar, Tensor
from untyping.typecheck import Constant, TypeEnv


def test_sequent_examples():
    assert parse_sequent("~x, x") == (Dual("x"), Atom("x"))
    assert parse_sequent("") == ()
    f = parse_formula("~y | bot | ~x")
    assert f == Par(Par(Dual("y"), BOT), Dual("x"))
    assert parse_formula("~x * top") == Tensor(Dual("x"), TOP)
    assert parse_formula("1 * (x | y)") == Tensor(ONE, Par(Atom("x"), Atom("y")))


def test_ka_and_rm_examples():
    assert parse_ka_term("1 + x.x*") == KSum(parse_ka_term("1"), KDot(KVar("x"), KStar(KVar("x"))))
    assert parse_rm_term("x \\ y") == LDiv(RVar("x"), RVar("y"))
    assert parse_rm_term("S.(top \\ R)") == RDot(RVar("S"), LDiv(parse_rm_term("top"), RVar("R")))
    hyps, goal = parse_rm_judgement("x, x \\ y |- y")
    assert hyps == [RVar("x"), LDiv(RVar("x"), RVar("y"))] and goal == RVar("y")
    assert parse_rm_judgement("|- 1") == ([], parse_rm_term("1"))


def test_division_needs_parentheses():
    with pytest.raises(ParseError):
        parse_rm_term("x / y / z")
    assert parse_rm_term("(x / y) / z") == RDiv(RDiv(RVar("x"), RVar("y")), RVar("z"))


def test_error_positions():
    with pytest.raises(ParseError) as e:
        parse_sequent("x *")
    assert e.value.span.line == 1 and e.value.span.column == 4
    with pytest.raises(ParseError) as e:
        parse_sequent("x,\n  ~")
    assert e.value.span.line == 2
    assert "expected" in str(e.value)


def test_deep_nesting_is_a_parse_error_not_a_crash():
    with pytest.raises(ParseError):
        parse_formula("(" * 5000 + "x" + ")" * 5000)


def test_env():
    env = parse_env("# objects\nx : n -> m\ny: m -> 3\n")
    assert env["x"] == (Constant("n"), Constant("m"))
    assert env["y"] == (Constant("m"), Constant("3"))
    with pytest.raises(DuplicateBinding) as e:
        parse_env("x : n -> m\nx : m -> n")
    assert e.value.name == "x"
    assert parse_env(render_env(env)) == env


def test_render_judgement():
    hyps, goal = parse_rm_judgement("x, x \\ y |- y")
    assert parse_rm_judgement(render_judgement(hyps, goal)) == (hyps, goal)


@given(sequents())
def test_sequent_round_trip(seq):
    assert parse_sequent(render(seq)) == seq


@given(ka_terms())
def test_ka_round_trip(t):
    assert parse_ka_term(render(t)) == t


@given(rm_terms())
def test_rm_round_trip(t):
    assert parse_rm_term(render(t)) == t
