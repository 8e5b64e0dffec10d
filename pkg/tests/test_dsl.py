import pytest
from hypothesis import given, settings, strategies as st

from qcert.arith import ONE, BiFraction, LaurentPoly, RationalFunction
from qcert.congruence import FAIL, PASS, verify_refined
from qcert.dsl import (
    S_PARAM_TEXT,
    S_TEXT,
    Call,
    DSLError,
    EvalError,
    Int,
    ParseError,
    Sum,
    Var,
    congruence_eval,
    evaluate,
    parse,
    parse_binding,
    render,
)
from qcert.series import sum_S, sum_S_param

q = LaurentPoly.monomial(1)

ROUND_TRIP = [
    "1",
    "-7",
    "q",
    "q^-3",
    "q^(4*k+1)",
    "(1/2)*q",
    "-(q+1)",
    "qint(5)",
    "qint(4*k-1; 2)",
    "poch(-2; 4; k)^4",
    "pochp(1, -2; 4; 3)",
    "pochp(-1, 4; 4; k)/poch(4; 4; k)",
    "qbinom(6, 3)",
    "qbinom(2*n, n; 2)",
    "cyc(12)",
    "cyc2(n)",
    "(2*q + 2/q - 1)*qint(n; 2)^4",
    "sum(k, 0, M, q^k)",
    "sum(j, 1, n, sum(k, 0, j, qint(k+1)))",
    S_TEXT,
]


def test_parse_examples():
    e = parse("qint(4*k-1;2)")
    assert isinstance(e, Call) and e.name == "qint"
    assert e.args[1] == Int(2)
    s = parse("sum(k,0,n-1, qint(4*k-1;2)*qint(4*k-1;1)^2 * poch(-2;4;k)^4 / poch(4;4;k)^4 * q^(4*k))")
    assert isinstance(s, Sum) and s.var == "k" and s.lo == Int(0)


def test_parse_error_offset():
    with pytest.raises(ParseError) as err:
        parse("qint(3;")
    assert err.value.offset == 7


@pytest.mark.parametrize("text", ROUND_TRIP)
def test_round_trip(text):
    tree = parse(text)
    again = parse(render(tree))
    assert again == tree
    assert render(again) == render(tree)


def test_round_trip_corpus_covers_every_node_kind():
    kinds = set()

    def walk(e):
        kinds.add(type(e).__name__)
        for v in vars(e).values():
            if isinstance(v, tuple):
                for x in v:
                    if hasattr(x, "__dataclass_fields__"):
                        walk(x)
            elif hasattr(v, "__dataclass_fields__"):
                walk(v)

    for text in ROUND_TRIP:
        walk(parse(text))
    assert kinds >= {"Int", "Rat", "Var", "QPow", "Neg", "BinOp", "Pow", "Call", "Sum"}


ERRORS = [
    "",
    "qint(3;",
    "qint(3))",
    "1 +",
    "poch(1; 2)",
    "foo(3)",
    "q^(k*k)",
    "qint(k*k)",
    "3 $ 4",
    "sum(1, 0, 3, q)",
    "((q)",
    "q^",
    "cyc(1, 2, 3)",
]


@pytest.mark.parametrize("text", ERRORS)
def test_error_corpus(text):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert 0 <= err.value.offset <= len(text)


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="q()+-*/^;,0123456789 knabcsumqintpoch", max_size=30))
def test_parser_never_crashes(text):
    try:
        parse(text)
    except ParseError as exc:
        assert 0 <= exc.offset <= len(text)


def test_evaluate_examples():
    assert evaluate("cyc(3)", {}) == RationalFunction(q ** 2 + q + 1)
    assert evaluate(S_TEXT, {"M": 0}) == RationalFunction(LaurentPoly.monomial(-4, -1))
    assert evaluate("qbinom(4, 2)") == RationalFunction(ONE + q + 2 * q ** 2 + q ** 3 + q ** 4)
    assert evaluate("cyc2(3)") == RationalFunction(q ** 4 + q ** 2 + 1)


@pytest.mark.parametrize("n", range(1, 7))
def test_dsl_matches_series(n):
    assert evaluate(S_TEXT, {"M": n - 1}) == sum_S(n - 1)
    text = S_TEXT.replace(", M,", ", n-1,")
    assert evaluate(text, {"n": n}) == sum_S(n - 1)


@pytest.mark.parametrize("n", range(1, 7))
def test_dsl_param_matches_series(n):
    value = evaluate(S_PARAM_TEXT, {"M": n - 1})
    if n == 1:
        # every pochp is empty, so the value collapses to a univariate one
        assert value == sum_S(0)
        value = BiFraction.from_rf(value)
    assert isinstance(value, BiFraction)
    assert value == sum_S_param(n - 1)


def test_empty_sum_and_counting():
    assert evaluate("sum(k, 1, 0, q^k)").is_zero()
    for M in range(11):
        assert evaluate("sum(k, 0, M, 1)", {"M": M}) == RationalFunction(LaurentPoly.const(M + 1))


def test_eval_errors():
    with pytest.raises(EvalError):
        evaluate("qint(n)")
    with pytest.raises(EvalError):
        evaluate("1/(q-q)")
    with pytest.raises(DSLError):
        evaluate("q^(n/2)", {"n": 3})


def test_congruence_eval_refined_n3():
    rhs = "(2*q + 2/q - 1)*qint(n;2)^4"
    mod = "qint(n;2)^4 * cyc2(n)"
    lhs = S_TEXT.replace(", M,", ", n-1,")
    v = congruence_eval(lhs, rhs, mod, {"n": 3})
    assert v.status == PASS
    assert v.status == verify_refined(3, "full").status
    assert congruence_eval(lhs, rhs + " + 1", mod, {"n": 3}).status == FAIL


def test_congruence_eval_reflexive_and_zero_modulus():
    assert congruence_eval("qint(5)", "qint(5)", "cyc(7)").status == PASS
    with pytest.raises(EvalError):
        congruence_eval("q", "q", "poch(4;4;1)/poch(4;4;1) - 1")
    with pytest.raises(EvalError):
        congruence_eval("q", "q", "1/(1+q)")


def test_parse_binding():
    assert parse_binding("n=3, k=-2") == {"n": 3, "k": -2}
    assert parse_binding("") == {}
    for bad in ("n", "n=x", "n=1,n=2", "1=2"):
        with pytest.raises(DSLError):
            parse_binding(bad)


def test_variables_parse_as_var():
    assert parse("n") == Var("n")
