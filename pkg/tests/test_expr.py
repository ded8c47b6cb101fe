import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volterra_vim.expr import (
    ArityError,
    ExprSyntaxError,
    MissingBindingError,
    UnknownIdentifierError,
    evaluate,
    parse,
    to_source,
)


def ev(src, **b):
    return evaluate(parse(src, set(b)), b)


def test_precedence_mul_over_add():
    assert ev("2+3*x", x=4) == 14


def test_power_right_associative():
    assert ev("2^3^2") == 512


def test_square():
    assert ev("y^2", y=0.5) == 0.25


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as info:
        parse("cos(z)", {"y"})
    assert info.value.name == "z"
    assert info.value.pos == 4


def test_sin_pi_half():
    assert ev("sin(pi/2)") == 1.0


def test_exp_one():
    assert ev("exp(x)", x=1) == 2.718281828459045


def test_unary_minus_looser_than_power():
    assert ev("-x^2", x=3) == -9


def x_y(x, y):
    return {"x": x, "y": y}


# (source, bindings, hand-computed value)
CORPUS = [
    ("1 + 2", {}, 3.0),
    ("7 - 2 - 1", {}, 4.0),
    ("8 / 4 / 2", {}, 1.0),
    ("2 * 3 + 4 * 5", {}, 26.0),
    ("(2 + 3) * 4", {}, 20.0),
    ("2 ^ -1", {}, 0.5),
    ("-2 ^ 2", {}, -4.0),
    ("(-2) ^ 2", {}, 4.0),
    ("--x", {"x": 1.5}, 1.5),
    ("x - -y", x_y(1.0, 2.0), 3.0),
    ("1.5e2 + .5", {}, 150.5),
    ("2E-3 * 1000", {}, 2.0),
    ("sin(x)", {"x": 0.3}, math.sin(0.3)),
    ("cos(x) - 0.25*sin(2*x) - 0.5*x", {"x": 0.7}, math.cos(0.7) - 0.25 * math.sin(1.4) - 0.35),
    ("tan(x)", {"x": 0.2}, math.tan(0.2)),
    ("exp(x) - (1/3)*x*exp(3*x) + x/3", {"x": 0.5}, math.exp(0.5) - (1 / 3) * 0.5 * math.exp(1.5) + 0.5 / 3),
    ("log(e)", {}, 1.0),
    ("sqrt(16)", {}, 4.0),
    ("abs(-3.25)", {}, 3.25),
    ("x*y^3", x_y(2.0, 3.0), 54.0),
    ("3*y^2", {"y": 1.1}, 3 * 1.1**2),
    ("pi", {}, math.pi),
    ("e^x", {"x": 2.0}, math.e**2.0),
    ("x / (1 + x^2)", {"x": 3.0}, 0.3),
    ("  2   *\tx ", {"x": 4.0}, 8.0),
]


@pytest.mark.parametrize("src,bindings,expected", CORPUS)
def test_corpus(src, bindings, expected):
    assert evaluate(parse(src, set(bindings)), bindings) == pytest.approx(expected, rel=1e-15, abs=0)


def test_corpus_covers_everything():
    text = " ".join(src for src, _, _ in CORPUS)
    for token in ["+", "-", "*", "/", "^", "sin", "cos", "tan", "exp", "log", "sqrt", "abs", "pi", "e"]:
        assert token in text


@pytest.mark.parametrize(
    "src",
    ["", "   ", "1 +", "(1 + 2", "1 + 2)", "2 3", "x y", "* 2", "1e", "$", "+1", "sin", "sin()2"],
)
def test_syntax_errors(src):
    with pytest.raises((ExprSyntaxError, ArityError)):
        parse(src, {"x", "y"})


def test_syntax_error_position():
    with pytest.raises(ExprSyntaxError) as info:
        parse("1 + (2 * ", set())
    assert info.value.pos == 9


@pytest.mark.parametrize("src", ["sin()", "sin(1, 2)", "exp(x, x, x)"])
def test_arity(src):
    with pytest.raises(ArityError):
        parse(src, {"x"})


def test_unknown_function():
    with pytest.raises(UnknownIdentifierError):
        parse("foo(1)")


def test_variable_is_not_callable():
    with pytest.raises(ExprSyntaxError):
        parse("x(1)", {"x"})


def test_missing_binding():
    e = parse("x + t", {"x", "t"})
    with pytest.raises(MissingBindingError):
        evaluate(e, {"x": 1.0})


def test_non_finite_passes_through():
    assert ev("1/0") == math.inf
    assert math.isnan(ev("log(-1)"))
    assert ev("exp(1000)") == math.inf
    assert ev("log(0)") == -math.inf


def test_array_bindings_broadcast():
    e = parse("x*t", {"x", "t"})
    x = np.arange(3.0)
    out = evaluate(e, {"x": x[:, None], "t": x[None, :]})
    np.testing.assert_array_equal(out, np.outer(x, x))


def test_callable_shortcut():
    assert parse("2*y", {"y"})(y=4.0) == 8.0


# -- properties ---------------------------------------------------------------

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


@given(a=finite, b=finite)
def test_literal_addition_commutes(a, b):
    # literals are non-negative in the grammar; signs enter through unary minus
    def lit(v):
        return f"-{-v!r}" if math.copysign(1, v) < 0 else repr(v)

    left = ev(f"{lit(a)} + ({lit(b)})")
    right = ev(f"{lit(b)} + ({lit(a)})")
    assert np.float64(left).tobytes() == np.float64(right).tobytes()


def grammar_sources(max_leaves=12):
    """Strings drawn straight from the grammar productions."""
    number = st.one_of(
        st.integers(0, 999).map(str),
        st.floats(0, 1e3, allow_nan=False, allow_infinity=False).map(repr),
        st.sampled_from(["1e-3", "2.5E2", ".5", "3."]),
    )
    atom = st.one_of(number, st.sampled_from(["x", "y", "pi", "e"]))

    def extend(inner):
        return st.one_of(
            st.tuples(inner, st.sampled_from(["+", "-", "*", "/", "^"]), inner).map(
                lambda t: f"{t[0]} {t[1]} {t[2]}"
            ),
            inner.map(lambda s: f"-{s}"),
            inner.map(lambda s: f"({s})"),
            st.tuples(st.sampled_from(["sin", "cos", "tan", "exp", "log", "sqrt", "abs"]), inner).map(
                lambda t: f"{t[0]}({t[1]})"
            ),
        )

    return st.recursive(atom, extend, max_leaves=max_leaves)


@given(grammar_sources())
def test_grammar_strings_parse(src):
    parse(src, {"x", "y"})


@settings(max_examples=50)
@given(grammar_sources(), st.randoms(use_true_random=False))
def test_pretty_print_round_trip(src, rnd):
    e = parse(src, {"x", "y"})
    again = parse(to_source(e), {"x", "y"})
    assert again.root == e.root
    for _ in range(100):
        b = {"x": rnd.uniform(-3, 3), "y": rnd.uniform(-3, 3)}
        a1, a2 = evaluate(e, b), evaluate(again, b)
        assert np.float64(a1).tobytes() == np.float64(a2).tobytes()
