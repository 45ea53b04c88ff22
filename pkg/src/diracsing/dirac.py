"""Sections of TM + T*M, Dirac frames and their Lie algebroid data."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .exterior import FORM, MULTIVECTOR, ExteriorElement, ext_d
from .linalg import RowSolver, numeric_rank, rank, span_equal
from .scalar import Chart, ChartMismatch, Point, Scalar, derive, evaluate, smooth_at


class GeneralizedSection:
    """``X + alpha`` given by vector components ``X`` and 1-form components ``alpha``."""

    __slots__ = ("chart", "X", "alpha")

    def __init__(self, chart: Chart, X: Sequence, alpha: Sequence):
        n = chart.dim
        if len(X) != n or len(alpha) != n:
            raise ValueError("component counts must equal the chart dimension")
        self.chart = chart
        self.X = tuple(_sc(chart, v) for v in X)
        self.alpha = tuple(_sc(chart, v) for v in alpha)

    @classmethod
    def vector(cls, chart: Chart, i: int) -> "GeneralizedSection":
        z = [chart.zero] * chart.dim
        X = list(z)
        X[i] = chart.one
        return cls(chart, X, z)

    @classmethod
    def covector(cls, chart: Chart, i: int) -> "GeneralizedSection":
        z = [chart.zero] * chart.dim
        a = list(z)
        a[i] = chart.one
        return cls(chart, z, a)

    def components(self) -> list[Scalar]:
        return list(self.X) + list(self.alpha)

    def __add__(self, other: "GeneralizedSection") -> "GeneralizedSection":
        _same(self.chart, other.chart)
        return GeneralizedSection(self.chart, [a + b for a, b in zip(self.X, other.X)],
                                  [a + b for a, b in zip(self.alpha, other.alpha)])

    def __neg__(self):
        return GeneralizedSection(self.chart, [-a for a in self.X], [-a for a in self.alpha])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f) -> "GeneralizedSection":
        f = _sc(self.chart, f)
        return GeneralizedSection(self.chart, [a * f for a in self.X], [a * f for a in self.alpha])

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.components())

    def __eq__(self, other):
        if not isinstance(other, GeneralizedSection):
            return NotImplemented
        return self.chart == other.chart and self.X == other.X and self.alpha == other.alpha

    def __hash__(self):
        return hash((self.X, self.alpha))

    def __repr__(self):
        return f"GeneralizedSection({format_section(self)})"

    def __str__(self):
        return format_section(self)


def _sc(chart, v) -> Scalar:
    return v if isinstance(v, Scalar) else Scalar.const(chart, v)


def _same(a: Chart, b: Chart):
    if a != b:
        raise ChartMismatch("chart mismatch")


def format_section(s: GeneralizedSection) -> str:
    parts = []
    for name, v in zip(s.chart.names, s.X):
        if not v.is_zero():
            parts.append(f"({v})*e{name}")
    for name, v in zip(s.chart.names, s.alpha):
        if not v.is_zero():
            parts.append(f"({v})*d{name}")
    return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# pairing and bracket


def pairing(a: GeneralizedSection, b: GeneralizedSection) -> Scalar:
    """``<X+alpha, Y+beta>_+ = 1/2 (i_X beta + i_Y alpha)``."""
    _same(a.chart, b.chart)
    s = a.chart.zero
    for x, beta in zip(a.X, b.alpha):
        s = s + x * beta
    for y, alpha in zip(b.X, a.alpha):
        s = s + y * alpha
    return s / 2


def antipairing(a: GeneralizedSection, b: GeneralizedSection) -> Scalar:
    """``1/2 (i_X beta - i_Y alpha)``; this is the algebroid 2-form ``omega_L``."""
    _same(a.chart, b.chart)
    s = a.chart.zero
    for x, beta in zip(a.X, b.alpha):
        s = s + x * beta
    for y, alpha in zip(b.X, a.alpha):
        s = s - y * alpha
    return s / 2


def _jacobian(comps: Sequence[Scalar], names: Sequence[str]) -> list[list[Scalar]]:
    # J[i][j] = d_i comps[j]
    return [[derive(c, n) if not c.is_zero() else c for c in comps] for n in names]


def dorfman(a: GeneralizedSection, b: GeneralizedSection) -> GeneralizedSection:
    """``[X+alpha, Y+beta] = [X,Y] + L_X beta - i_Y d alpha`` in components."""
    _same(a.chart, b.chart)
    ch = a.chart
    n = ch.dim
    names = ch.names
    dX = _jacobian(a.X, names)
    dY = _jacobian(b.X, names)
    dalpha = _jacobian(a.alpha, names)
    dbeta = _jacobian(b.alpha, names)
    z = ch.zero
    vec = []
    for j in range(n):
        s = z
        for i in range(n):
            if not a.X[i].is_zero() and not dY[i][j].is_zero():
                s = s + a.X[i] * dY[i][j]
            if not b.X[i].is_zero() and not dX[i][j].is_zero():
                s = s - b.X[i] * dX[i][j]
        vec.append(s)
    form = []
    for j in range(n):
        s = z
        for i in range(n):
            xi = a.X[i]
            if not xi.is_zero() and not dbeta[i][j].is_zero():
                s = s + xi * dbeta[i][j]  # X^i d_i beta_j
            if not b.alpha[i].is_zero() and not dX[j][i].is_zero():
                s = s + b.alpha[i] * dX[j][i]  # beta_i d_j X^i
            yi = b.X[i]
            if not yi.is_zero():
                curl = dalpha[i][j] - dalpha[j][i]  # d_i alpha_j - d_j alpha_i
                if not curl.is_zero():
                    s = s - yi * curl
        form.append(s)
    return GeneralizedSection(ch, vec, form)


def lie_bracket(X: Sequence[Scalar], Y: Sequence[Scalar]) -> list[Scalar]:
    ch = X[0].chart
    n = ch.dim
    out = []
    for j in range(n):
        s = ch.zero
        for i, name in enumerate(ch.names):
            if not X[i].is_zero():
                s = s + X[i] * derive(Y[j], name)
            if not Y[i].is_zero():
                s = s - Y[i] * derive(X[j], name)
        out.append(s)
    return out


# ---------------------------------------------------------------------------
# frames


class DegenerateFrame(ValueError):
    """Sections do not have rank ``n`` over the fraction field."""


class DiracFrame:
    """``n`` sections claimed to span a Dirac structure on a chart."""

    def __init__(self, chart: Chart, sections: Sequence[GeneralizedSection], names: Sequence[str] | None = None):
        sections = list(sections)
        if len(sections) != chart.dim:
            raise DegenerateFrame(f"a frame needs exactly {chart.dim} sections, got {len(sections)}")
        for s in sections:
            _same(chart, s.chart)
        if rank([s.components() for s in sections]) < chart.dim:
            raise DegenerateFrame("sections are linearly dependent over the fraction field")
        self.chart = chart
        self.sections = sections
        self.names = list(names) if names else [f"s{i + 1}" for i in range(len(sections))]
        if len(self.names) != len(sections):
            raise ValueError("one name per section")

    def __len__(self):
        return len(self.sections)

    def __iter__(self):
        return iter(self.sections)

    def __getitem__(self, i):
        return self.sections[i]

    def rows(self) -> list[list[Scalar]]:
        return [s.components() for s in self.sections]

    def renamed(self, names: Sequence[str]) -> "DiracFrame":
        return DiracFrame(self.chart, self.sections, names)


def graph_of_form(omega: ExteriorElement) -> DiracFrame:
    """Frame ``{d_i + i_{d_i} omega}``."""
    if omega.variance != FORM or not omega.is_homogeneous(2):
        raise ValueError("graph_of_form expects a homogeneous 2-form")
    ch = omega.chart
    W = omega.matrix()
    secs = []
    for i in range(ch.dim):
        X = [ch.one if j == i else ch.zero for j in range(ch.dim)]
        secs.append(GeneralizedSection(ch, X, W[i]))
    return DiracFrame(ch, secs, [f"g{i + 1}" for i in range(ch.dim)])


def bivector_apply(pi: ExteriorElement, alpha: Sequence[Scalar]) -> list[Scalar]:
    """``Pi(alpha) = Pi^{ij} alpha_i d_j``."""
    ch = pi.chart
    P = pi.matrix()
    out = []
    for j in range(ch.dim):
        s = ch.zero
        for i in range(ch.dim):
            if not alpha[i].is_zero() and not P[i][j].is_zero():
                s = s + alpha[i] * P[i][j]
        out.append(s)
    return out


def graph_of_bivector(pi: ExteriorElement) -> DiracFrame:
    """Frame ``{Pi(dx^k) + dx^k}``."""
    if pi.variance != MULTIVECTOR or not pi.is_homogeneous(2):
        raise ValueError("graph_of_bivector expects a homogeneous bivector")
    ch = pi.chart
    P = pi.matrix()
    secs = []
    for k in range(ch.dim):
        a = [ch.one if j == k else ch.zero for j in range(ch.dim)]
        secs.append(GeneralizedSection(ch, P[k], a))
    return DiracFrame(ch, secs, [f"h{k + 1}" for k in range(ch.dim)])


def tangent_frame(chart: Chart) -> DiracFrame:
    return DiracFrame(chart, [GeneralizedSection.vector(chart, i) for i in range(chart.dim)],
                      [f"t{i + 1}" for i in range(chart.dim)])


def cotangent_frame(chart: Chart) -> DiracFrame:
    return DiracFrame(chart, [GeneralizedSection.covector(chart, i) for i in range(chart.dim)],
                      [f"c{i + 1}" for i in range(chart.dim)])


class NonClosedBField(ValueError):
    pass


def bfield(F: DiracFrame, B: ExteriorElement) -> DiracFrame:
    """``X + alpha -> X + alpha + i_X B``; ``B`` must be closed."""
    if B.variance != FORM or not B.is_homogeneous(2):
        raise ValueError("B-field must be a 2-form")
    _same(F.chart, B.chart)
    if not ext_d(B).is_zero():
        raise NonClosedBField("B-field transform by a non-closed 2-form")
    W = B.matrix()
    ch = F.chart
    out = []
    for s in F.sections:
        add = []
        for k in range(ch.dim):
            v = ch.zero
            for j in range(ch.dim):
                if not s.X[j].is_zero() and not W[j][k].is_zero():
                    v = v + s.X[j] * W[j][k]
            add.append(v)
        out.append(GeneralizedSection(ch, s.X, [a + b for a, b in zip(s.alpha, add)]))
    return DiracFrame(ch, out, F.names)


def product_chart(c1: Chart, c2: Chart) -> Chart:
    clash = set(c1.symbols_str()) & set(c2.symbols_str())
    if clash:
        raise ValueError(f"coordinate name clash: {sorted(clash)}")
    rads = [(s, _poly_lift(c, p)) for c in (c1, c2) for s, p in zip(c.radical_names, c.radical_polys)]
    return Chart(c1.names + c2.names, [(s, text) for s, text in rads])


def _poly_lift(chart: Chart, poly) -> str:
    from .scalar import format_poly

    return format_poly(poly, chart.symbols_str())


def lift_scalar(s: Scalar, target: Chart) -> Scalar:
    return Scalar(target, target._import_poly(s.num, s.chart), target._import_poly(s.den, s.chart))


def product(F1: DiracFrame, F2: DiracFrame, chart: Chart | None = None) -> DiracFrame:
    """Frame of ``L1 x L2`` on the product chart (sections extended by zero)."""
    ch = chart or product_chart(F1.chart, F2.chart)
    n1, n2 = F1.chart.dim, F2.chart.dim
    z1 = [ch.zero] * n1
    z2 = [ch.zero] * n2
    secs = []
    for s in F1.sections:
        X = [lift_scalar(v, ch) for v in s.X] + z2
        a = [lift_scalar(v, ch) for v in s.alpha] + z2
        secs.append(GeneralizedSection(ch, X, a))
    for s in F2.sections:
        X = z1 + [lift_scalar(v, ch) for v in s.X]
        a = z1 + [lift_scalar(v, ch) for v in s.alpha]
        secs.append(GeneralizedSection(ch, X, a))
    return DiracFrame(ch, secs, list(F1.names) + list(F2.names))


def lift_element(a: ExteriorElement, target: Chart, offset: int = 0) -> ExteriorElement:
    return ExteriorElement(target, a.variance,
                           {tuple(i + offset for i in idx): lift_scalar(c, target) for idx, c in a.terms.items()})


# ---------------------------------------------------------------------------
# verification


@dataclass
class DiracReport:
    rank: int
    isotropic: bool
    closed: bool
    witness: str | None = None
    structure: dict[tuple[int, int], list[Scalar]] = field(default_factory=dict)
    residual: list[Scalar] | None = None

    @property
    def passed(self) -> bool:
        return self.isotropic and self.closed


def verify_dirac(F: DiracFrame) -> DiracReport:
    """Check rank, isotropy and Dorfman closure of a frame.

    Structure functions ``c_ij^k`` with ``[s_i, s_j] = c_ij^k s_k`` are
    returned for ``i < j`` when the frame closes.
    """
    n = F.chart.dim
    rows = F.rows()
    rk = rank(rows)
    report = DiracReport(rank=rk, isotropic=True, closed=False)
    if rk < n:
        report.isotropic = False
        report.witness = f"rank {rk} < {n}"
        return report
    secs = F.sections
    for i in range(n):
        for j in range(i, n):
            p = pairing(secs[i], secs[j])
            if not p.is_zero():
                report.isotropic = False
                report.witness = f"pairing({F.names[i]},{F.names[j]}) = {p}"
                return report
    solver = RowSolver(rows)
    for i in range(n):
        for j in range(i + 1, n):
            br = dorfman(secs[i], secs[j])
            coeffs, residual = solver.solve(br.components())
            if coeffs is None:
                report.witness = f"[{F.names[i]},{F.names[j]}] not in span; residual = " + ", ".join(
                    str(r) for r in residual if not r.is_zero())
                report.residual = residual
                return report
            report.structure[(i, j)] = coeffs
    report.closed = True
    return report


def is_dirac(F: DiracFrame) -> bool:
    return verify_dirac(F).passed


def frames_span_equal(F1, F2) -> bool:
    r1 = F1.rows() if isinstance(F1, DiracFrame) else [s.components() for s in F1]
    r2 = F2.rows() if isinstance(F2, DiracFrame) else [s.components() for s in F2]
    return span_equal(r1, r2)


class PointClass(enum.Enum):
    GRAPH_OF_FORM = "graph-of-form"
    GRAPH_OF_BIVECTOR = "graph-of-bivector"
    BOTH = "both"
    NEITHER = "neither"


def evaluate_frame(F: DiracFrame, m: Point) -> list[list]:
    rows = []
    for s in F.sections:
        row = []
        for v in s.components():
            r = smooth_at(v, m)
            if not r.smooth:
                from .scalar import EvaluationError

                raise EvaluationError(f"section component {v} is not smooth at {m} ({r.kind.value})")
            row.append(r.value)
        rows.append(row)
    return rows


def classify_point(F: DiracFrame, m: Point) -> PointClass:
    """Graph-of-form iff the anchor has rank ``n`` at ``m``; graph-of-bivector
    iff the 1-form block has rank ``n``."""
    n = F.chart.dim
    rows = evaluate_frame(F, m)
    vec = [r[:n] for r in rows]
    form = [r[n:] for r in rows]
    a = numeric_rank(vec) == n
    b = numeric_rank(form) == n
    if a and b:
        return PointClass.BOTH
    if a:
        return PointClass.GRAPH_OF_FORM
    if b:
        return PointClass.GRAPH_OF_BIVECTOR
    return PointClass.NEITHER


@dataclass
class AlgebroidData:
    names: list[str]
    anchor: list[list[Scalar]]
    structure: dict[tuple[int, int], list[Scalar]]
    omega_L: list[list[Scalar]]

    def bracket(self, i: int, j: int) -> list[Scalar]:
        if i == j:
            ch = self.anchor[0][0].chart
            return [ch.zero] * len(self.names)
        if i < j:
            return self.structure[(i, j)]
        return [-c for c in self.structure[(j, i)]]


class UnverifiedFrame(ValueError):
    pass


def algebroid_data(F: DiracFrame, report: DiracReport | None = None) -> AlgebroidData:
    """Anchor, structure functions and ``omega_L(s_i, s_j) = 1/2 (i_X beta - i_Y alpha)``."""
    report = report or verify_dirac(F)
    if not report.passed:
        raise UnverifiedFrame(f"frame is not Dirac: {report.witness}")
    n = F.chart.dim
    omega = [[antipairing(F.sections[i], F.sections[j]) for j in range(n)] for i in range(n)]
    return AlgebroidData(list(F.names), [list(s.X) for s in F.sections], dict(report.structure), omega)
