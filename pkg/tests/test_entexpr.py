import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import CANONICAL, direct_entropy as direct, random_joint, set_of, shannon
from qbnet.entexpr import (
    Atom,
    Bar,
    Colon,
    Comma,
    SignedJointSum,
    binary_entropy,
    evaluate,
    expand,
    marginal_entropy_fn,
    parse,
    shannon_entropy,
    variables,
)
from qbnet.errors import DomainError, EmptyExpression, ExpressionSyntaxError

a, b, c = Atom("a"), Atom("b"), Atom("c")


def terms(text):
    return {tuple(sorted(k)): v for k, v in expand(text).as_dict().items()}


class TestParse:
    def test_colon_binds_looser_than_comma(self):
        assert parse("a:b,c") == Colon(a, Comma(b, c))
        assert parse("a:b,c") == parse("a:(b,c)")

    def test_parentheses(self):
        assert parse("(a:b)|c") == Bar(Colon(a, b), c)

    def test_atom(self):
        assert parse("a") == a
        assert parse("  q1' ") == Atom("q1'")

    def test_bar_loosest_and_left_assoc(self):
        assert parse("a|b:c") == Bar(a, Colon(b, c))
        assert parse("a|b|c") == Bar(Bar(a, b), c)
        assert parse("a,b,c") == Comma(Comma(a, b), c)

    @pytest.mark.parametrize("text,pos", [("a:", 2), ("(a", 2), ("a b", 2), ("a$b", 1), (":a", 0), ("a)", 1)])
    def test_syntax_errors_carry_position(self, text, pos):
        with pytest.raises(ExpressionSyntaxError) as exc:
            parse(text)
        assert exc.value.position == pos

    @pytest.mark.parametrize("text", ["", "   "])
    def test_empty(self, text):
        with pytest.raises(EmptyExpression):
            parse(text)

    def test_variables_first_appearance(self):
        assert variables(parse("(c:a)|b,a")) == ("c", "a", "b")


class TestExpand:
    def test_conditional_mutual(self):
        assert terms("(a:b)|c") == {("a", "c"): 1, ("b", "c"): 1, ("a", "b", "c"): -1, ("c",): -1}

    def test_conditional(self):
        assert terms("a|b") == {("a", "b"): 1, ("b",): -1}

    def test_self_mutual(self):
        assert terms("a:a") == {("a",): 1}

    def test_duplicates_dropped(self):
        assert expand("a,a,b").as_dict() == expand("a,b").as_dict()
        assert expand("((a),(b))").as_dict() == expand("a,b").as_dict()

    def test_vanishing(self):
        assert expand("a|a").terms == ()
        assert str(expand("a|a")) == "0"

    def test_str(self):
        assert str(expand("a:b")) == "+H(a) +H(b) -H(a,b)"

    def test_distributive_axioms(self):
        assert expand("(a,b):c").as_dict() == expand("(a:c),(b:c)").as_dict()
        assert expand("(a:b),c").as_dict() == expand("(a,c):(b,c)").as_dict()


class TestEvaluate:
    def test_arithmetic(self):
        s = SignedJointSum(((1, frozenset({"a", "b"})), (-1, frozenset({"b"}))))
        assert evaluate(s, lambda atoms: {frozenset("ab"): 2.0, frozenset("b"): 1.0}[atoms]) == 1.0
        assert evaluate(expand("a"), lambda atoms: 1.0) == 1.0

    def test_independent_bits(self):
        joint = np.full((2, 2), 0.25)
        h = marginal_entropy_fn(joint, ["a", "b"])
        assert abs(evaluate(expand("a:b"), h)) < 1e-15


class TestBinaryEntropy:
    def test_values(self):
        assert binary_entropy(0.5) == 1.0
        assert binary_entropy(0.0) == 0.0 and binary_entropy(1.0) == 0.0
        expected = -0.25 * math.log2(0.25) - 0.75 * math.log2(0.75)
        assert binary_entropy(0.25) == pytest.approx(expected, abs=1e-15)
        assert binary_entropy(0.25) == pytest.approx(0.811278124459, abs=1e-12)

    @pytest.mark.parametrize("p", [-0.1, 1.5, float("nan")])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            binary_entropy(p)

    def test_shannon_zero_convention(self):
        assert shannon_entropy([1, 0, 0]) == 0.0
        assert shannon_entropy([0.5, 0.5, 0]) == 1.0


@given(st.integers(0, 2**32 - 1), st.sampled_from(CANONICAL))
def test_expansion_matches_direct_definitions(seed, expr):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(3, 5))
    names = ["x", "y", "z", "w"][:k]
    joint = random_joint(rng, k)
    got = evaluate(expand(expr), marginal_entropy_fn(joint, names))
    assert abs(got - direct(joint, names, expr)) < 1e-10


exprs = st.recursive(
    st.sampled_from(["a", "b", "c", "d"]),
    lambda inner: st.tuples(inner, st.sampled_from([",", ":", "|"]), inner).map(lambda t: f"({t[0]}{t[1]}{t[2]})"),
    max_leaves=7,
)


@given(exprs, st.integers(0, 2**32 - 1))
def test_set_measure_semantics(text, seed):
    rng = np.random.default_rng(seed)
    sets = {v: frozenset(np.flatnonzero(rng.random(12) < 0.4)) for v in "abcd"}
    tree = parse(text)

    def card(atoms):
        return len(frozenset().union(*(sets[v] for v in atoms)))

    total = sum(coef * card(atoms) for coef, atoms in expand(tree).terms)
    assert total == len(set_of(tree, sets))
