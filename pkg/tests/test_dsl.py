from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from charsub import certified as C
from charsub.dsl import evaluate, evaluate_int, expr_to_text, free_vars, parse_expr, parse_set_syntax
from charsub.errors import DSLSyntaxError, DomainError

leaf = st.one_of(st.integers(min_value=0, max_value=50).map(lambda v: ("num", v)),
                 st.sampled_from(["k", "n"]).map(lambda v: ("var", v)))


def _node(children):
    return st.one_of(
        st.tuples(st.sampled_from(["add", "sub", "mul"]), children, children),
        st.tuples(st.just("pow"), children, st.integers(min_value=1, max_value=3).map(lambda v: ("num", v))),
        st.tuples(st.just("neg"), children),
    )


exprs = st.recursive(leaf, _node, max_leaves=8)


def _tree(node):
    # normalize to the parser's node shapes by round-tripping once
    return parse_expr(_text(node))


def _text(node):
    kind = node[0]
    if kind == "num":
        return str(node[1])
    if kind == "var":
        return node[1]
    if kind == "neg":
        return f"(-{_text(node[1])})"
    sym = {"add": "+", "sub": "-", "mul": "*", "pow": "^"}[kind]
    return f"({_text(node[1])}{sym}{_text(node[2])})"


@given(exprs)
def test_print_parse_round_trip(node):
    tree = _tree(node)
    assert parse_expr(expr_to_text(tree)) == tree


@given(exprs, st.integers(min_value=1, max_value=20), st.integers(min_value=1, max_value=20))
def test_evaluation_matches_python(node, k, n):
    tree = _tree(node)
    expected = eval(_text(node).replace("^", "**"), {"k": k, "n": n})
    assert evaluate(tree, {"k": k, "n": n}) == C.Exact(Fraction(expected))


def test_precedence_and_functions():
    assert evaluate_int(parse_expr("2^3^2"), {}) == 2 ** 9
    assert evaluate_int(parse_expr("-2^2"), {}) == -4
    assert evaluate_int(parse_expr("floor(sqrt(n))"), {"n": 17}) == 4
    assert evaluate_int(parse_expr("ceil(k^(4/3))"), {"k": 8}) == 16
    assert free_vars(parse_expr("k*n + log(1+x)")) == {"k", "n", "x"}


def test_non_integer_rejected():
    with pytest.raises(DomainError):
        evaluate_int(parse_expr("n/2"), {"n": 3})


@pytest.mark.parametrize("text", ["2 +", "(k", "k ** 2", "foo(2)", "3 $ 4"])
def test_syntax_errors_carry_position(text):
    with pytest.raises(DSLSyntaxError) as info:
        parse_expr(text)
    assert 0 <= info.value.pos <= len(text)


def test_set_syntax_forms():
    assert parse_set_syntax("{1,5,9}") == ("finite", (1, 5, 9))
    assert parse_set_syntax("progression(2, 2)") == ("progression", 2, 2)
    assert parse_set_syntax("naturals") == ("naturals",)
    assert parse_set_syntax("union k in 1.. : [(2*k-1)^(2*k-1), (2*k)^(2*k)]")[0] == "family"
