from fractions import Fraction

import pytest

from diracsing.scalar import Chart, EvaluationError, Point, Smoothness, content_reduce, derive, evaluate, smooth_at
from diracsing.expr import parse_scalar


@pytest.fixture(scope="module")
def qchart():
    return Chart(["q1", "q2"], [("r", "q1^2 + q2^2")])


@pytest.fixture(scope="module")
def xy():
    return Chart(["x", "y"], [("r", "x^2 + y^2")])


def test_inverse_pair(qchart):
    q1, q2 = qchart.coords()
    r2 = q1 * q1 + q2 * q2
    assert (r2.inverse() * r2).is_one()


def test_cancellation(xy):
    x, _ = xy.coords()
    assert ((x / (x * x)) / x.inverse()).is_one()


def test_radical_reduction(qchart):
    q1, q2 = qchart.coords()
    r = qchart.radical("r")
    assert r * r == q1 * q1 + q2 * q2
    assert not (r * r).has_radicals()


def test_denominators_are_radical_free(qchart):
    r = qchart.radical("r")
    inv = (r + 1).inverse()
    assert inv.has_radicals()
    assert not qchart.involves_radical(inv.den, 0)
    assert (inv * (r + 1)).is_one()


def test_derivative_of_inverse_square(qchart):
    q1, q2 = qchart.coords()
    f = (q1 * q1 + q2 * q2).inverse()
    d = derive(f, "q1")
    assert d == -2 * q1 / (q1 * q1 + q2 * q2) ** 2
    h = 1e-6
    fd = (float(evaluate(f, Point(qchart, [1 + h, 2]))) - float(evaluate(f, Point(qchart, [1 - h, 2])))) / (2 * h)
    assert abs(float(evaluate(d, Point(qchart, [1, 2]))) - fd) < 1e-6


def test_derivative_of_constant(xy):
    assert derive(xy.const(7), "x").is_zero()


def test_derivative_of_radical(xy):
    x, _ = xy.coords()
    r = xy.radical("r")
    d = derive(r, "x")
    assert d == x / r
    assert abs(float(evaluate(d, Point(xy, [3, 4]))) - 0.6) < 1e-12


def test_smooth_after_cancellation(xy):
    x, y = xy.coords()
    res = smooth_at((x * x + x * y) / x, Point(xy, [0, 1]))
    assert res.kind is Smoothness.SMOOTH and res.value == 1


def test_pole_and_undecided(xy):
    x, y = xy.coords()
    r = xy.radical("r")
    o = Point(xy, [0, 0])
    assert smooth_at((x * x + y * y).inverse(), o).kind is Smoothness.POLE
    assert smooth_at(x / r, o).kind is Smoothness.RADICAL_UNDECIDED
    with pytest.raises(EvaluationError):
        evaluate((x * x + y * y).inverse(), o)


def test_radical_values(xy):
    r = xy.radical("r")
    assert evaluate(r, Point(xy, [3, 4])) == 5
    assert evaluate((r * r).inverse(), Point(xy, [1, 0])) == 1


def test_monopole_regularizer_value():
    ch = Chart(["x", "y", "z"], [("r", "x^2 + y^2 + z^2")])
    r = ch.radical("r")
    f = r * r / (1 + r * r)
    assert evaluate(f, Point(ch, [1, 0, 0])) == Fraction(1, 2)


def test_content_reduce(xy):
    x, y = xy.coords()
    out = content_reduce([x * x, x * y, x / (y + 1)])
    assert out[0] / out[1] == x / y
    assert all(v.is_polynomial() for v in out)


def test_print_parse_round_trip(xy):
    x, y = xy.coords()
    r = xy.radical("r")
    for f in [x / (x * x + y * y), (x - 3 * y) ** 3 / 7, r * x + 1, -(r + 2).inverse(), xy.const(Fraction(-5, 3))]:
        assert parse_scalar(str(f), xy) == f


def test_chart_errors():
    with pytest.raises(ValueError):
        Chart(["x"])
    with pytest.raises(ValueError):
        Chart(["x", "x"])
    with pytest.raises(ValueError):
        Chart(["x", "y"], [("r", "1/x")])
