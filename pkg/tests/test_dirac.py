import pytest

from diracsing.dirac import (
    DegenerateFrame,
    DiracFrame,
    GeneralizedSection,
    NonClosedBField,
    PointClass,
    algebroid_data,
    bfield,
    classify_point,
    cotangent_frame,
    dorfman,
    frames_span_equal,
    graph_of_bivector,
    graph_of_form,
    pairing,
    product,
    tangent_frame,
    verify_dirac,
)
from diracsing.expr import parse_value
from diracsing.exterior import FORM, MULTIVECTOR, ExteriorElement
from diracsing.scalar import Chart, Point, derive


def el(text, ch, variance=FORM):
    v = parse_value(text, ch)
    return ExteriorElement(ch, variance, {idx: c for (_, idx), c in v.terms.items()})


def sec(text, ch):
    v = parse_value(text, ch)
    X, a = [ch.zero] * ch.dim, [ch.zero] * ch.dim
    for (k, (i,)), c in v.terms.items():
        (X if k == "e" else a)[i] = c
    return GeneralizedSection(ch, X, a)


@pytest.fixture(scope="module")
def mono():
    ch = Chart(["q1", "q2", "p1", "p2"], [("r", "q1^2 + q2^2")])
    names = ["a1", "a2", "b1", "b2"]
    texts = ["-r^2 eq2 + dq1 - r^2 dp2", "r^2 eq1 + dq2 + r^2 dp1", "ep1 - dq1", "ep2 - dq2"]
    return ch, DiracFrame(ch, [sec(t, ch) for t in texts], names)


def test_pairing(mono):
    ch, _ = mono
    s = sec("eq1 + dp1", ch)
    assert pairing(s, s).is_zero()
    c2 = Chart(["x", "y"])
    t = sec("ex + dx", c2)
    assert pairing(t, t).is_one()


def test_graph_isotropic_and_constant_bracket(mono):
    ch, _ = mono
    assert dorfman(sec("eq1 + dp1", ch), sec("ep1 - dq1", ch)).is_zero()
    g = graph_of_form(el("q1 dq1^dq2 + dp1^dq2", ch))
    for a in g.sections:
        for b in g.sections:
            assert pairing(a, b).is_zero()


def test_leibniz(mono):
    ch, _ = mono
    q1, q2, p1, _ = ch.coords()
    a = sec("q2 eq1 + p1 dq2", ch)
    b = sec("eq2 + q1 dp1", ch)
    f = q1 * q1 * p1
    lhs = dorfman(a, b.scale(f))
    rho_f = sum((a.X[i] * derive(f, ch.names[i]) for i in range(ch.dim)), ch.zero)
    assert lhs == b.scale(rho_f) + dorfman(a, b).scale(f)


def test_monopole_frame(mono):
    ch, F = mono
    q1, q2 = ch.coords()[:2]
    rep = verify_dirac(F)
    assert rep.passed
    assert rep.structure[(0, 1)] == [-2 * q1, -2 * q2, ch.zero, ch.zero]
    omega = el("dq1^dp1 + dq2^dp2 + (1/(r*r)) dq1^dq2", ch)
    assert frames_span_equal(F, graph_of_form(omega))
    assert classify_point(F, Point(ch, [0, 0, 0, 0])) is PointClass.NEITHER


def test_monopole_algebroid(mono):
    ch, F = mono
    q1, q2 = ch.coords()[:2]
    r2 = q1 * q1 + q2 * q2
    data = algebroid_data(F)
    z = ch.zero
    assert data.anchor[0] == [z, -r2, z, z] and data.anchor[1] == [r2, z, z, z]
    assert data.anchor[2] == [z, z, ch.one, z]
    W = data.omega_L
    assert W[0][1] == -r2 and W[1][0] == r2
    assert W[0][3] == r2 and W[1][2] == -r2
    assert W[2][3].is_zero()


def test_standard_graphs():
    c2 = Chart(["x", "y"])
    assert frames_span_equal(graph_of_form(ExteriorElement.zero(c2)), tangent_frame(c2))
    assert frames_span_equal(graph_of_bivector(ExteriorElement.zero(c2, MULTIVECTOR)), cotangent_frame(c2))
    w0 = el("dq1^dp1 + dq2^dp2", Chart(["q1", "q2", "p1", "p2"]))
    ch = w0.chart
    expect = [sec(t, ch) for t in ["eq1 + dp1", "eq2 + dp2", "ep1 - dq1", "ep2 - dq2"]]
    assert graph_of_form(w0).sections == expect
    P = el("ex^ey", c2, MULTIVECTOR)
    G = graph_of_bivector(P)
    assert all(pairing(a, b).is_zero() for a in G.sections for b in G.sections)
    assert G.sections == [sec("ey + dx", c2), sec("-ex + dy", c2)]


def test_poisson_graph_passes():
    c3 = Chart(["x", "y", "z"])
    assert verify_dirac(graph_of_bivector(el("z ex^ey + x ey^ez + y ez^ex", c3, MULTIVECTOR))).passed


def test_bfield():
    c3 = Chart(["x", "y", "z"])
    B = el("x dx^dz + dx^dy", c3)
    assert frames_span_equal(bfield(tangent_frame(c3), B), graph_of_form(B))
    F = graph_of_form(el("dx^dz", c3))
    assert frames_span_equal(bfield(F, ExteriorElement.zero(c3)), F)
    with pytest.raises(NonClosedBField):
        bfield(F, el("x dy^dx + z dx^dy", c3))


def test_products():
    S = Chart(["s1", "s2"])
    A = Chart(["x", "y"])
    N = Chart(["u", "v"])
    F = product(product(tangent_frame(S), graph_of_form(el("dx^dy", A))), graph_of_bivector(el("v eu^ev", N, MULTIVECTOR)))
    assert F.chart.dim == 6
    assert verify_dirac(F).passed
    assert verify_dirac(product(tangent_frame(S), cotangent_frame(N))).passed


def test_failures():
    c2 = Chart(["x", "y"])
    F = DiracFrame(c2, [sec("ex", c2), sec("dx", c2)], ["s", "t"])
    rep = verify_dirac(F)
    assert not rep.isotropic and "1/2" in rep.witness
    c3 = Chart(["x", "y", "z"])
    rep = verify_dirac(graph_of_form(el("x dy^dz", c3)))
    assert rep.isotropic and not rep.closed and rep.witness
    with pytest.raises(DegenerateFrame):
        DiracFrame(c2, [sec("ex", c2), sec("2 ex", c2)], ["s", "t"])


def test_classification():
    ch = Chart(["q1", "q2", "p1", "p2"])
    m = Point(ch, [0, 0, 0, 0])
    assert classify_point(graph_of_form(el("dq1^dp1 + dq2^dp2", ch)), m) is PointClass.BOTH
    c2 = Chart(["x", "y"])
    assert classify_point(graph_of_bivector(el("x ex^ey", c2, MULTIVECTOR)), Point(c2, [0, 0])) is PointClass.GRAPH_OF_BIVECTOR


def test_graph_algebroid_form_is_omega():
    c3 = Chart(["x", "y", "z"])
    w = el("x dx^dz + dx^dy", c3)
    data = algebroid_data(graph_of_form(w))
    assert data.omega_L == [[-v for v in row] for row in w.matrix()]
