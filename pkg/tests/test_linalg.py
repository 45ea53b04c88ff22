from fractions import Fraction

from diracsing.linalg import bareiss, determinant, inverse, matmul, nullspace, numeric_rank, rank, span_equal
from diracsing.scalar import Chart

ch = Chart(["x", "y"])
x, y = ch.coords()
o, z = ch.one, ch.zero


def test_rank_and_determinant():
    M = [[x, y], [x * x, x * y]]
    assert rank(M) == 1
    assert determinant(M).is_zero()
    N = [[x, o], [o, y]]
    assert determinant(N) == x * y - 1
    assert bareiss(N).rank == 2


def test_inverse():
    N = [[x, o], [z, y]]
    I = matmul(N, inverse(N))
    assert I == [[o, z], [z, o]]


def test_nullspace_is_content_reduced():
    M = [[x, y, x + y]]
    K = nullspace(M)
    assert len(K) == 2
    for v in K:
        assert sum((a * b for a, b in zip(M[0], v)), z).is_zero()
        assert all(c.is_polynomial() for c in v)


def test_span_equal():
    A = [[o, x], [y, o]]
    B = [[o + y, x + o], [y, o]]
    assert span_equal(A, B)
    assert not span_equal(A, [[o, x], [o, x]])


def test_numeric_rank():
    assert numeric_rank([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]) == 1
    assert numeric_rank([[1.0, 0.0], [0.0, 1e-3]]) == 2
