import pytest

from diracsing.expr import ParseError, parse_scalar, parse_value
from diracsing.scalar import Chart

ch = Chart(["x", "y", "z"])
x, y, z = ch.coords()


def test_precedence():
    assert parse_scalar("1 + 2*x^2", ch) == 1 + 2 * x * x
    assert parse_scalar("-x^2", ch) == -(x * x)
    assert parse_scalar("2^3^2", ch) == ch.const(512)
    assert parse_scalar("x/y/z", ch) == x / (y * z)
    assert parse_scalar("(x + y)(x - y)", ch) == x * x - y * y


def test_wedge_and_juxtaposition():
    v = parse_value("(x) dx^dy + dx^dx - 2 dy^dx", ch)
    assert v.terms == {("d", (0, 1)): x + 2}


def test_errors_are_positioned():
    with pytest.raises(ParseError) as e:
        parse_scalar("x + * y", ch, line=3, column=5)
    assert e.value.line == 3 and e.value.column >= 5 and e.value.expected
    with pytest.raises(ParseError, match="q"):
        parse_value("dz^dq", ch)
    with pytest.raises(ParseError):
        parse_scalar("x / 0", ch)
    with pytest.raises(ParseError):
        parse_value("dx / dy", ch)
