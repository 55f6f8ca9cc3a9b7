import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_poly
from walkergeom.expr import (
    DomainError,
    ExponentError,
    ParseError,
    Point,
    UnknownIdentifier,
    diff,
    evaluate,
    parse,
)


class TestParse:
    def test_zero(self):
        f = parse("0")
        assert f.is_zero()
        assert f.free_vars == frozenset()
        assert evaluate(f, (1, 2, 3, 4)) == 0.0

    def test_square(self):
        assert evaluate(parse("x1^2"), Point(3, 0, 0, 0)) == 9.0

    def test_free_vars(self):
        f = parse("x1*x2/6 + x1*exp(x3)")
        assert f.free_vars == frozenset({1, 2, 3})

    def test_whitespace_insignificant(self):
        a = parse("x1 * ( x2+ 3 )")
        b = parse("x1*(x2+3)")
        assert evaluate(a, (2, 5, 0, 0)) == evaluate(b, (2, 5, 0, 0)) == 16.0

    def test_unary_minus_binds_tighter_than_power(self):
        f = parse("-x1^2")
        assert evaluate(f, (3, 0, 0, 0)) == 9.0

    def test_precedence(self):
        assert evaluate(parse("1 + 2*3^2 - 4/2"), (0, 0, 0, 0)) == 17.0

    def test_decimal_literals(self):
        assert evaluate(parse("0.5*x1 + 1e-1"), (2, 0, 0, 0)) == pytest.approx(1.1)

    @pytest.mark.parametrize("text, offset", [("x1 +", 4), ("(x1", 3), ("x1 x2", 3), ("", 0), ("x1 * * 2", 5)])
    def test_syntax_error_offset(self, text, offset):
        with pytest.raises(ParseError) as err:
            parse(text)
        assert err.value.offset == offset

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifier) as err:
            parse("x1 + y")
        assert err.value.offset == 5

    @pytest.mark.parametrize("text", ["x1^2.5", "x1^x2", "x1^-1"])
    def test_non_integer_exponent(self, text):
        with pytest.raises(ExponentError):
            parse(text)

    def test_unknown_function(self):
        with pytest.raises(UnknownIdentifier):
            parse("tan(x1)")

    def test_nested_power_prints_unambiguously(self):
        f = parse("(x1^2)^3")
        assert evaluate(parse(str(f)), (1.5, 0, 0, 0)) == pytest.approx(1.5 ** 6)


class TestDiff:
    def test_power_rule(self):
        d = diff(parse("x1^2"), 1)
        for x in (-2.0, 0.5, 3.0):
            assert evaluate(d, (x, 0, 0, 0)) == 2 * x

    def test_mixed_partial_constant(self):
        d = diff(diff(parse("x1*x2"), 1), 2)
        assert d.free_vars == frozenset()
        assert evaluate(d, (5, 7, 1, 1)) == 1.0

    def test_absent_variable(self):
        assert diff(parse("exp(x3)"), 4).is_zero()

    def test_cubic(self):
        assert evaluate(diff(parse("x1^3"), 1), (2, 1, 1, 1)) == 12.0

    def test_transcendental(self):
        f = parse("sin(x3)*cos(x4) + exp(2*x3)")
        p = (0, 0, 0.3, -0.7)
        assert evaluate(diff(f, 3), p) == pytest.approx(math.cos(0.3) * math.cos(-0.7) + 2 * math.exp(0.6))
        assert evaluate(diff(f, 4), p) == pytest.approx(-math.sin(0.3) * math.sin(-0.7))

    def test_quotient(self):
        f = parse("x1/x2")
        assert evaluate(diff(f, 2), (3, 2, 0, 0)) == pytest.approx(-3 / 4)

    def test_free_vars_shrink(self, rng):
        for _ in range(20):
            f = parse(random_poly(rng))
            for v in range(1, 5):
                assert diff(f, v).free_vars <= f.free_vars


class TestEvaluate:
    def test_basic(self):
        assert evaluate(parse("x1^2*1"), (2, 0, 0, 0)) == 4.0

    def test_division_by_zero(self):
        with pytest.raises(DomainError):
            evaluate(parse("x1/x2"), (1, 0, 0, 0))

    def test_overflow_is_domain_error(self):
        with pytest.raises(DomainError):
            evaluate(parse("exp(x1)"), (1000, 0, 0, 0))

    def test_rejects_non_finite_point(self):
        with pytest.raises(ValueError):
            evaluate(parse("x1"), (math.nan, 0, 0, 0))

    def test_rejects_wrong_arity(self):
        with pytest.raises(ValueError):
            evaluate(parse("x1"), (1, 2, 3))

    def test_bit_identical(self, rng):
        f = parse(random_poly(rng) + " + sin(x3)*exp(x4)")
        p = tuple(rng.uniform(-2, 2, 4))
        assert evaluate(f, p) == evaluate(parse(str(f)), p) or math.isclose(
            evaluate(f, p), evaluate(parse(str(f)), p), rel_tol=1e-12)
        assert evaluate(f, p) == evaluate(f, p)

    def test_x34_field_ignores_x12(self):
        f = parse("x3^2*sin(x4) - x4")
        assert evaluate(f, (1, 2, 0.4, 0.9)) == evaluate(f, (-7, 100, 0.4, 0.9))

    def test_concurrent_evaluation(self):
        f = parse("x1*x2 + cos(x3) - x4^3")
        expected = [evaluate(f, (i, 1, 2, 3)) for i in range(200)]
        results = {}

        def work(k):
            results[k] = [evaluate(f, (i, 1, 2, 3)) for i in range(200)]

        threads = [threading.Thread(target=work, args=(k,)) for k in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(r == expected for r in results.values())


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

_leaf = st.one_of(
    st.sampled_from(["x1", "x2", "x3", "x4"]),
    st.integers(-5, 5).map(lambda n: f"({n})"),
)


def _combine(children):
    return st.one_of(
        st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        st.tuples(children, st.integers(0, 3)).map(lambda t: f"({t[0]})^{t[1]}"),
        st.tuples(st.sampled_from(["sin", "cos"]), children).map(lambda t: f"{t[0]}({t[1]})"),
        children.map(lambda c: f"-({c})"),
    )


expressions = st.recursive(_leaf, _combine, max_leaves=8)
points = st.tuples(*[st.floats(-1.5, 1.5) for _ in range(4)])


def _fd(f, p, v, h=1e-5):
    up, dn = list(p), list(p)
    up[v - 1] += h
    dn[v - 1] -= h
    return (evaluate(f, up) - evaluate(f, dn)) / (2 * h)


@settings(max_examples=150, deadline=None)
@given(expressions, points)
def test_round_trip_preserves_values(text, p):
    f = parse(text)
    g = parse(str(f))
    assert math.isclose(evaluate(f, p), evaluate(g, p), rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=150, deadline=None)
@given(expressions, points, st.integers(1, 4), st.integers(1, 4))
def test_partials_commute(text, p, v, w):
    f = parse(text)
    a = evaluate(diff(diff(f, v), w), p)
    b = evaluate(diff(diff(f, w), v), p)
    assert math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=150, deadline=None)
@given(expressions, expressions, points, st.integers(1, 4))
def test_diff_is_linear(t1, t2, p, v):
    f, g = parse(t1), parse(t2)
    lhs = evaluate(diff(f + g, v), p)
    rhs = evaluate(diff(f, v), p) + evaluate(diff(g, v), p)
    assert math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=150, deadline=None)
@given(expressions, points, st.integers(1, 4))
def test_matches_finite_differences(text, p, v):
    f = parse(text)
    exact = evaluate(diff(f, v), p)
    assert abs(exact - _fd(f, p, v)) <= 1e-6 * (1 + abs(exact)) * max(1.0, abs(evaluate(f, p)))


def test_product_rule_random_polys(rng):
    for _ in range(30):
        f, g = parse(random_poly(rng)), parse(random_poly(rng))
        p = rng.uniform(-2, 2, 4)
        for v in range(1, 5):
            lhs = evaluate(diff(f * g, v), p)
            rhs = evaluate(diff(f, v), p) * evaluate(g, p) + evaluate(f, p) * evaluate(diff(g, v), p)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-9)


def test_finite_difference_random_polys(rng):
    for _ in range(30):
        f = parse(random_poly(rng))
        for p in rng.uniform(-2, 2, (5, 4)):
            for v in range(1, 5):
                exact = evaluate(diff(f, v), p)
                assert abs(exact - _fd(f, p, v)) <= 1e-6 * (1 + abs(exact))


def test_scalar_field_arithmetic():
    x1 = parse("x1")
    f = 2 * x1 ** 2 - 3 / (x1 + 1)
    assert evaluate(f, (1, 0, 0, 0)) == pytest.approx(0.5)
    with pytest.raises(Exception):
        x1 ** 0.5
    assert np.isclose(f(1, 0, 0, 0), 0.5)
