import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_source
from statsub.expr import (
    BinOp,
    Const,
    DomainError,
    ExprSyntaxError,
    Func,
    Neg,
    Pow,
    ScalarExpr,
    UnknownIdentifierError,
    Var,
    VariableRangeError,
    eval_jet2,
    fd_jet2,
    parse,
    to_source,
)


def test_tree_shapes():
    e = parse("exp(x1 - x2)", 4)
    assert e.node == Func("exp", BinOp("-", Var(1), Var(2)))
    assert parse("-1", 2).node == Const(-1.0)


def test_precedence_and_power():
    e = parse("1 + 2*x1^2", 1)
    assert e((3.0,)) == 19.0
    assert parse("-x1^2", 1)((2.0,)) == -4.0
    assert parse("2^-1", 1)((0.0,)) == 0.5


@pytest.mark.parametrize(
    "src, err, offset",
    [
        ("exp(x1 -", ExprSyntaxError, 8),
        ("x1 + * 2", ExprSyntaxError, 5),
        ("tan(x1)", UnknownIdentifierError, 0),
        ("x5", VariableRangeError, 0),
        ("x1 ^ 1.5", ExprSyntaxError, 5),
        ("(x1", ExprSyntaxError, 3),
    ],
)
def test_errors_carry_offsets(src, err, offset):
    with pytest.raises(err) as info:
        parse(src, 4)
    assert info.value.offset == offset


def test_domain_errors_name_subexpression():
    with pytest.raises(DomainError, match="log"):
        eval_jet2(parse("log(x1)", 1), [-1.0])
    with pytest.raises(DomainError):
        eval_jet2(parse("1 / x1", 1), [0.0])


def test_exp_difference_jet():
    j = eval_jet2(parse("exp(x1 - x2)", 4), np.zeros(4))
    assert j.value == 1.0
    np.testing.assert_array_equal(j.grad, [1, -1, 0, 0])
    assert (j.hess[0, 0], j.hess[0, 1], j.hess[1, 1]) == (1.0, -1.0, 1.0)


def test_constant_jet_is_flat():
    j = eval_jet2(parse("-1", 3), [0.4, -2.0, 7.0])
    assert j.value == -1.0
    assert not j.grad.any() and not j.hess.any()


def test_fd_oracle_basics():
    assert abs(fd_jet2(parse("exp(x1)", 1), [0.0], h=1e-5).grad[0] - 1) < 1e-9
    assert abs(fd_jet2(parse("x1^2", 1), [3.0], h=1e-4).hess[0, 0] - 2) < 1e-5


def test_exp_difference_matches_fd():
    e = parse("exp(x1 - x2)", 4)
    p = [0.3, -0.2, 0.0, 0.0]
    ad, fd = eval_jet2(e, p), fd_jet2(e, p)
    np.testing.assert_allclose(ad.grad, fd.grad, rtol=1e-6, atol=1e-9)


def test_evaluation_is_bitwise_deterministic():
    e = parse("sin(x1*x2) / (2 + cos(x3))^2", 3)
    p = [0.11, -0.7, 2.3]
    a, b = eval_jet2(e, p), eval_jet2(e, p)
    assert a.value == b.value and np.array_equal(a.grad, b.grad) and np.array_equal(a.hess, b.hess)


def test_ad_matches_central_differences_on_random_expressions():
    rng = np.random.default_rng(0x5745)
    worst = 0.0
    for _ in range(200):
        dim = int(rng.integers(1, 5))
        e = parse(random_source(rng, dim), dim)
        p = rng.uniform(-1, 1, dim)
        ad = eval_jet2(e, p)
        g_fd = fd_jet2(e, p, h=1e-5).grad
        h_fd = fd_jet2(e, p, h=1e-4).hess
        scale_g = max(1.0, np.abs(ad.grad).max())
        scale_h = max(1.0, np.abs(ad.hess).max())
        worst = max(worst, np.abs(ad.grad - g_fd).max() / scale_g, np.abs(ad.hess - h_fd).max() / scale_h)
    assert worst < 1e-6


@st.composite
def trees(draw, dim=3, depth=0):
    if depth >= 3 or draw(st.booleans()):
        if draw(st.booleans()):
            return Var(draw(st.integers(1, dim)))
        return Const(draw(st.floats(-1e3, 1e3, allow_nan=False).map(lambda v: round(v, 4))))
    kind = draw(st.sampled_from(["bin", "func", "neg", "pow"]))
    if kind == "bin":
        return BinOp(draw(st.sampled_from("+-*/")), draw(trees(dim, depth + 1)), draw(trees(dim, depth + 1)))
    if kind == "func":
        return Func(draw(st.sampled_from(["exp", "log", "sin", "cos"])), draw(trees(dim, depth + 1)))
    if kind == "neg":
        return Neg(draw(trees(dim, depth + 1)))
    return Pow(draw(trees(dim, depth + 1)), draw(st.integers(-3, 4)))


def _fold(node):
    """Canonical form: negated literals become literals, as the parser produces."""
    if isinstance(node, Neg):
        arg = _fold(node.arg)
        return Const(-arg.value) if isinstance(arg, Const) else Neg(arg)
    if isinstance(node, Func):
        return Func(node.name, _fold(node.arg))
    if isinstance(node, BinOp):
        return BinOp(node.op, _fold(node.left), _fold(node.right))
    if isinstance(node, Pow):
        return Pow(_fold(node.base), node.exponent)
    return node


@settings(max_examples=200, deadline=None)
@given(trees())
def test_source_round_trip(node):
    e = ScalarExpr(node, 3)
    again = parse(to_source(e), 3)
    assert _fold(node) == again.node
    assert to_source(again) == to_source(parse(to_source(again), 3))
