import math

import pytest

from diracsing.dirac import GeneralizedSection, frames_span_equal, graph_of_form, verify_dirac
from diracsing.expr import parse_value
from diracsing.exterior import FORM, MULTIVECTOR, ExteriorElement, clifford_act, exp_neg
from diracsing.removability import (
    ExactTierInapplicable,
    ProbeConfig,
    Tag,
    Verdict,
    annihilates,
    directional_probe,
    exact_removability,
    extend_graph_frame,
    normalize_spinor,
    obstruction_check,
    probe_directions,
    regularizing_function,
    removability,
    removability_trace,
    spinor_of_bivector,
    spinor_of_form,
)
from diracsing.scalar import Chart, Point, evaluate


def el(text, ch, variance=FORM):
    v = parse_value(text, ch)
    return ExteriorElement(ch, variance, {idx: c for (_, idx), c in v.terms.items()})


@pytest.fixture(scope="module")
def mono():
    ch = Chart(["q1", "q2", "p1", "p2"])
    w = el("dq1^dp1 + dq2^dp2 + (1/(q1^2 + q2^2)) dq1^dq2", ch)
    return ch, w, Point(ch, [0, 0, 0, 0])


@pytest.fixture(scope="module")
def axis():
    ch = Chart(["x", "y", "z"], [("rho", "x^2 + y^2")])
    return ch, el("((x dx + y dy)/rho^3)^dz", ch), Point(ch, [0, 0, 0])


@pytest.fixture(scope="module")
def dmono():
    ch = Chart(["x", "y", "z"], [("r", "x^2 + y^2 + z^2")])
    return ch, el("2 (x dy^dz + y dz^dx + z dx^dy)/r^3", ch), Point(ch, [0, 0, 0])


@pytest.fixture(scope="module")
def bounded():
    ch = Chart(["x", "y"], [("rho", "x^2 + y^2")])
    return ch, el("rho dx^dy", ch), Point(ch, [0, 0])


def test_spinor_of_form_examples():
    ch = Chart(["q1", "q2", "p1", "p2"])
    w0 = el("dq1^dp1 + dq2^dp2", ch)
    assert spinor_of_form(w0) == ExteriorElement.scalar(ch.one) - w0 + el("dq1^dp1^dq2^dp2", ch)
    assert spinor_of_form(ExteriorElement.zero(ch)) == ExteriorElement.scalar(ch.one)


def test_spinor_of_bivector_examples():
    c2 = Chart(["x", "y"])
    vol = el("dx^dy", c2)
    assert spinor_of_bivector(ExteriorElement.zero(c2, MULTIVECTOR)) == vol
    phi = spinor_of_bivector(el("ex^ey", c2, MULTIVECTOR))
    assert phi == vol + ExteriorElement.scalar(c2.one)
    P = el("x ex^ey", c2, MULTIVECTOR)
    x, y = c2.coords()
    for alpha in ([c2.one, y], [x * x, c2.one]):
        X = [-P.matrix()[j][0] * alpha[0] - P.matrix()[j][1] * alpha[1] for j in range(2)]
        # i_alpha Pi + alpha, in the row-vector convention alpha -> alpha P
        X = [alpha[0] * P.matrix()[0][j] + alpha[1] * P.matrix()[1][j] for j in range(2)]
        assert annihilates(GeneralizedSection(c2, X, alpha), spinor_of_bivector(P))


def test_normalization(mono):
    ch, w, _ = mono
    q1, q2 = ch.coords()[:2]
    n = normalize_spinor(spinor_of_form(w))
    assert n.L == q1 * q1 + q2 * q2 and n.G.is_one()
    assert n.psi[()] == q1 * q1 + q2 * q2
    assert n.psi[(0, 1)] == -ch.one
    c2 = Chart(["x", "y"])
    x = c2.coords()[0]
    n = normalize_spinor((ExteriorElement.scalar(c2.one) + el("dx^dy", c2)).scale(x))
    assert n.G == x and n.L.is_one() and n.psi == ExteriorElement.scalar(c2.one) + el("dx^dy", c2)
    phi = ExteriorElement.scalar(c2.one) + el("x dx^dy", c2)
    n = normalize_spinor(phi)
    assert n.L.is_one() and n.G.is_one() and n.psi == phi


def test_exact_tier(mono, bounded):
    ch, w, m = mono
    v = exact_removability(w, m)
    assert v.tag is Tag.CERTIFIED_REMOVABLE and v.provenance == "exact"
    assert v.certificate["psi_at_m"] == {(0, 1): -1}
    w0 = el("dq1^dp1 + dq2^dp2", ch)
    assert exact_removability(w0, Point(ch, [1, 2, 3, 4])).tag is Tag.CERTIFIED_REMOVABLE
    with pytest.raises(ExactTierInapplicable):
        exact_removability(bounded[1], bounded[2])


def test_verdict_provenance_rules():
    with pytest.raises(ValueError):
        Verdict(Tag.CERTIFIED_REMOVABLE, "numeric")
    with pytest.raises(ValueError):
        Verdict(Tag.EVIDENCE_REMOVABLE, "exact")


def test_regularizing_function(axis, dmono):
    ch = Chart(["x", "y"])
    f0 = regularizing_function(ExteriorElement.zero(ch))
    assert f0([0.3, 0.1]) == 1.0 and f0.exact.is_one()
    _, w, _ = axis
    f = regularizing_function(w)
    for rho in (0.5, 0.1, 0.01):
        assert abs(f([rho, 0.0, 0.2]) - (1 + rho ** -4) ** -0.5) < 1e-12
    assert f([0.0, 0.0, 0.0]) == 0.0
    _, w, _ = dmono
    f = regularizing_function(w)
    for r in (1.0, 0.3):
        assert abs(f([0.0, r, 0.0]) - r * r / math.sqrt(r ** 4 + 4)) < 1e-12


def test_probe_directions_are_deterministic():
    d = probe_directions(3, 26)
    assert len(d) == 26 and d == probe_directions(3, 26)
    assert d[0] == (1.0, 0.0, 0.0)
    assert all(abs(sum(c * c for c in v) - 1) < 1e-12 for v in d)


def test_obstructions(mono, axis, bounded):
    v = obstruction_check(mono[1], mono[2])
    assert v.tag is Tag.INCONCLUSIVE and v.certificate["clauses"] == []
    v = obstruction_check(axis[1], axis[2])
    assert v.tag is Tag.INCONCLUSIVE
    assert v.certificate["f_limit_max"] < 1e-4 and v.certificate["f_cauchy_max"] < 1e-6
    v = obstruction_check(bounded[1], bounded[2])
    assert v.tag is Tag.EVIDENCE_NOT_REMOVABLE and "iii" in v.certificate["clauses"]


def test_probe(mono, axis, dmono):
    v = directional_probe(mono[1], mono[2])
    assert v.tag is Tag.EVIDENCE_REMOVABLE
    assert abs(abs(v.certificate["limit"]["dq1^dq2"]) - 1) < 1e-4
    for case in (axis, dmono):
        v = directional_probe(case[1], case[2])
        assert v.tag is Tag.EVIDENCE_NOT_REMOVABLE
        assert abs(v.certificate["disagreement"] - math.sqrt(2)) < 1e-6
    v = directional_probe(axis[1], axis[2])
    assert v.certificate["slot_difference"]["dx^dz"] > 0.5


def test_orchestration(mono, axis, bounded):
    assert removability(mono[1], mono[2]).tag is Tag.CERTIFIED_REMOVABLE
    v, stages = removability_trace(axis[1], axis[2])
    assert v.tag is Tag.EVIDENCE_NOT_REMOVABLE and [s for s, _ in stages] == ["exact", "obstruction", "probe"]
    v = removability(bounded[1], bounded[2])
    assert v.tag is Tag.EVIDENCE_NOT_REMOVABLE and "iii" in v.certificate["clauses"]
    assert removability(mono[1], mono[2], mode="probe").tag is Tag.EVIDENCE_REMOVABLE
    assert removability(axis[1], axis[2], mode="exact").tag is Tag.INCONCLUSIVE
    with pytest.raises(ValueError):
        ProbeConfig(directions=1)


def test_frame_extension(mono):
    ch, w, m = mono
    F = extend_graph_frame(w, m)
    assert verify_dirac(F).passed and frames_span_equal(F, graph_of_form(w))
    psi_m = {I: float(evaluate(c, m)) for I, c in normalize_spinor(spinor_of_form(w)).psi.terms.items()}
    psi_el = ExteriorElement(ch, FORM, {I: ch.const(v) for I, v in psi_m.items() if v})
    for s in F.sections:
        at = GeneralizedSection(ch, [ch.const(evaluate(c, m)) for c in s.X], [ch.const(evaluate(c, m)) for c in s.alpha])
        out = clifford_act(at, psi_el)
        assert max((abs(float(c.constant_value())) for c in out.terms.values()), default=0.0) < 1e-9
    z = ExteriorElement.zero(ch)
    F0 = extend_graph_frame(z, m)
    assert all(s.X[i].is_one() and all(a.is_zero() for a in s.alpha) for i, s in enumerate(F0.sections))
    w0 = el("dq1^dp1 + dq2^dp2", ch)
    assert frames_span_equal(extend_graph_frame(w0, m), graph_of_form(w0))
