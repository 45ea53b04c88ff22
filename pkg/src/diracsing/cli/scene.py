"""Line-oriented scene files.

::

    chart q1 q2 p1 p2
    radical r = q1*q1 + q2*q2          # r^2 = q1^2 + q2^2, r >= 0
    scalar r2 = q1^2 + q2^2
    form omega = dq1^dp1 + dq2^dp2 + (1/r2) dq1^dq2
    bivector Pi = -r2 eq1^eq2
    volume vol = dq1^dq2^dp1^dp2
    section a1 = -r2 eq2 + dq1 - r2 dp2
    frame reference = a1, a2, b1, b2
    point m = q1:0 q2:0 p1:0 p2:0
    matrix A = [[y1, 0], [0, y2]]
    split S = x:x1,x2 y:y1,y2 omega:w pi:P
    dw D = x:x1 y:y1,y2 A:A B:B pi:P
    splitting T = reg:omega0 sing:B pi:Pi
    probe dirs=26 depth=20 agree=1e-4 conv=1e-6 t0=1/2

Radicals must be declared right after the chart.  Names must be declared
before use and may not be redeclared.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..dirac import DiracFrame, DegenerateFrame, GeneralizedSection
from ..expr import Combo, ExprParser, ParseError, parse_scalar
from ..exterior import FORM, MULTIVECTOR, ExteriorElement
from ..removability import ProbeConfig
from ..scalar import Chart, Point, Scalar
from ..splitting import BlockError, DWBlocks, SplitBlocks

KEYWORDS = ("chart", "radical", "scalar", "form", "bivector", "volume", "section", "frame", "point", "matrix",
            "split", "dw", "splitting", "probe")

_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass
class Scene:
    chart: Chart
    scalars: dict[str, Scalar] = field(default_factory=dict)
    forms: dict[str, ExteriorElement] = field(default_factory=dict)
    bivectors: dict[str, ExteriorElement] = field(default_factory=dict)
    volumes: dict[str, ExteriorElement] = field(default_factory=dict)
    sections: dict[str, GeneralizedSection] = field(default_factory=dict)
    frames: dict[str, DiracFrame] = field(default_factory=dict)
    points: dict[str, Point] = field(default_factory=dict)
    matrices: dict[str, list[list[Scalar]]] = field(default_factory=dict)
    splits: dict[str, SplitBlocks] = field(default_factory=dict)
    dws: dict[str, DWBlocks] = field(default_factory=dict)
    splittings: dict[str, tuple[str, str, str]] = field(default_factory=dict)
    probe: ProbeConfig = field(default_factory=ProbeConfig)
    order: list[tuple[str, str]] = field(default_factory=list)  # (kind, name) in declaration order

    def first(self, kind: str) -> Optional[str]:
        return next((n for k, n in self.order if k == kind), None)

    def kind_of(self, name: str) -> Optional[str]:
        return next((k for k, n in self.order if n == name), None)

    def two_forms(self) -> list[str]:
        return [n for k, n in self.order if k == "form" and self.forms[n].is_homogeneous(2)
                and not self.forms[n].is_zero()]


class _Builder:
    def __init__(self):
        self.chart_names: Optional[list[str]] = None
        self.chart_line = 0
        self.radicals: list[tuple[str, str, int, int]] = []
        self.scene: Optional[Scene] = None
        self.env: dict[str, object] = {}

    # -- helpers --------------------------------------------------------
    def ensure_chart(self, line: int) -> Scene:
        if self.scene is not None:
            return self.scene
        if self.chart_names is None:
            raise ParseError("no chart declared before use", line, 1, ("chart",))
        rads = []
        for name, text, ln, col in self.radicals:
            # the defining polynomial may only involve coordinates
            bare = Chart(self.chart_names)
            for other, _, _, _ in self.radicals:
                if re.search(rf"\b{re.escape(other)}\b", text):
                    raise ParseError(f"radical nesting: {name} refers to radical {other}", ln, col)
            poly = parse_scalar(text, bare, None, ln, col)
            if not poly.is_polynomial():
                raise ParseError(f"radical {name}: defining expression must be a polynomial", ln, col)
            if poly.is_zero():
                raise ParseError(f"radical {name}: defining polynomial is zero", ln, col)
            rads.append((name, poly.num))
        try:
            chart = Chart(self.chart_names, [(n, _poly_text(p, self.chart_names)) for n, p in rads])
        except ValueError as exc:
            raise ParseError(str(exc), self.chart_line, 1) from None
        self.scene = Scene(chart)
        return self.scene

    def declare(self, kind: str, name: str, line: int, col: int):
        sc = self.scene
        assert sc is not None
        if sc.kind_of(name) is not None or name in self.env:
            raise ParseError(f"name {name!r} already declared", line, col)
        if name in sc.chart.names or name in sc.chart.radical_names:
            raise ParseError(f"name {name!r} clashes with a coordinate or radical", line, col)
        if len(name) > 1 and name[0] in "de" and name[1:] in sc.chart.names:
            raise ParseError(f"name {name!r} clashes with a basis symbol", line, col)
        sc.order.append((kind, name))

    def expr(self, text: str, line: int, col: int):
        sc = self.scene
        assert sc is not None
        return ExprParser(text, sc.chart, self.env, line, col).parse()

    def scalar(self, text: str, line: int, col: int) -> Scalar:
        v = self.expr(text, line, col)
        if not isinstance(v, Scalar):
            raise ParseError("expected a scalar expression", line, col)
        return v

    def element(self, text: str, line: int, col: int, variance: str) -> ExteriorElement:
        sc = self.scene
        assert sc is not None
        v = self.expr(text, line, col)
        kind = "d" if variance == FORM else "e"
        if isinstance(v, Scalar):
            return ExteriorElement(sc.chart, variance, {(): v})
        terms = {}
        for (k, idx), c in v.terms.items():
            if idx and k != kind:
                what = "form" if variance == FORM else "bivector"
                sym = "e<coord>" if k == "e" else "d<coord>"
                raise ParseError(f"{sym} basis symbols are not allowed in a {what}", line, col)
            terms[idx] = c
        return ExteriorElement(sc.chart, variance, terms)


def _poly_text(poly, names) -> str:
    from ..scalar import format_poly

    return format_poly(poly, names)


def _split_statement(raw: str, line: int) -> tuple[str, str, int, str, int]:
    """``keyword name = rhs`` -> (keyword, name, name column, rhs, rhs column)."""
    m = re.match(r"\s*([A-Za-z_]+)", raw)
    kw = m.group(1)
    pos = m.end()
    m2 = re.compile(r"\s*([A-Za-z_][A-Za-z_0-9]*)").match(raw, pos)
    if not m2:
        raise ParseError(f"expected a name after {kw!r}", line, pos + 2, ("identifier",))
    name = m2.group(1)
    name_col = m2.start(1) + 1
    m3 = re.compile(r"\s*=").match(raw, m2.end())
    if not m3:
        raise ParseError("expected '='", line, m2.end() + 1, ("=",))
    rhs = raw[m3.end():]
    return kw, name, name_col, rhs, m3.end() + 1


def _strip_comment(raw: str) -> str:
    i = raw.find("#")
    return raw if i < 0 else raw[:i]


def _fields(rhs: str, rhs_col: int, line: int, allowed: tuple[str, ...]) -> dict[str, tuple[str, int]]:
    """``key:value key:value`` pairs."""
    out = {}
    for m in re.finditer(r"\S+", rhs):
        tok = m.group(0)
        col = rhs_col + m.start()
        if ":" not in tok:
            raise ParseError(f"expected key:value, got {tok!r}", line, col, tuple(f"{k}:" for k in allowed))
        k, v = tok.split(":", 1)
        if k not in allowed:
            raise ParseError(f"unknown key {k!r}", line, col, allowed)
        if k in out:
            raise ParseError(f"duplicate key {k!r}", line, col)
        out[k] = (v, col + len(k) + 1)
    missing = [k for k in allowed if k not in out]
    if missing:
        raise ParseError(f"missing keys: {', '.join(missing)}", line, rhs_col, tuple(missing))
    return out


def _number(text: str, line: int, col: int) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"expected a number, got {text!r}", line, col, ("number",)) from None


def _matrix_rows(text: str, line: int, col: int) -> list[list[tuple[str, int]]]:
    s = text.rstrip()
    lead = len(s) - len(s.lstrip())
    s = s.strip()
    base = col + lead
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError("matrix must be written [[..],[..]]", line, base, ("[",))
    rows = []
    depth = 0
    cur: list[tuple[str, int]] = []
    entry_start = 0
    for i, ch in enumerate(s):
        if ch == "[":
            depth += 1
            if depth == 2:
                cur = []
                entry_start = i + 1
            elif depth > 2:
                raise ParseError("matrix nesting too deep", line, base + i)
        elif ch == "]":
            if depth == 2:
                cur.append((s[entry_start:i], base + entry_start))
                rows.append(cur)
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced ']'", line, base + i)
        elif ch == "," and depth == 2:
            cur.append((s[entry_start:i], base + entry_start))
            entry_start = i + 1
        elif depth == 0 and not ch.isspace() and ch != ",":
            raise ParseError(f"unexpected {ch!r} in matrix", line, base + i)
        elif depth == 1 and not ch.isspace() and ch != ",":
            raise ParseError(f"unexpected {ch!r} between matrix rows", line, base + i, ("[",))
    if depth != 0:
        raise ParseError("unbalanced '['", line, base + len(s))
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise ParseError("matrix rows have different lengths", line, base)
    return rows


def _names_list(text: str, line: int, col: int, scene: Scene) -> list[str]:
    names = [t for t in text.split(",") if t]
    for n in names:
        if n not in scene.chart.names:
            raise ParseError(f"unknown coordinate {n!r}", line, col)
    return names


def parse_scene(text: str) -> Scene:
    b = _Builder()
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    for ln, raw in enumerate(lines, start=1):
        body = _strip_comment(raw)
        if not body.strip():
            continue
        m = re.match(r"\s*([A-Za-z_]+)", body)
        if not m:
            col = len(body) - len(body.lstrip()) + 1
            raise ParseError("expected a statement keyword", ln, col, KEYWORDS)
        kw = m.group(1)
        kw_col = m.start(1) + 1
        if kw not in KEYWORDS:
            raise ParseError(f"unknown statement {kw!r}", ln, kw_col, KEYWORDS)
        if kw == "chart":
            if b.chart_names is not None:
                raise ParseError("only one chart per scene", ln, kw_col)
            names = body[m.end():].split()
            for k, nm in enumerate(names):
                if not _NAME.fullmatch(nm):
                    raise ParseError(f"invalid coordinate name {nm!r}", ln, body.find(nm) + 1)
            if len(names) < 2:
                raise ParseError("a chart needs at least two coordinates", ln, kw_col)
            if len(set(names)) != len(names):
                raise ParseError("duplicate coordinate names", ln, kw_col)
            b.chart_names = names
            b.chart_line = ln
            continue
        if kw == "radical":
            if b.chart_names is None:
                raise ParseError("radical declared before the chart", ln, kw_col, ("chart",))
            if b.scene is not None:
                raise ParseError("radicals must be declared right after the chart", ln, kw_col)
            _, name, ncol, rhs, rcol = _split_statement(body, ln)
            if name in b.chart_names or any(name == r[0] for r in b.radicals):
                raise ParseError(f"radical name {name!r} already used", ln, ncol)
            b.radicals.append((name, rhs, ln, rcol))
            continue
        if kw == "probe":
            sc = b.ensure_chart(ln)
            sc.probe = _parse_probe(body[m.end():], ln, m.end() + 1, sc.probe)
            continue
        sc = b.ensure_chart(ln)
        _, name, ncol, rhs, rcol = _split_statement(body, ln)
        b.declare(kw, name, ln, ncol)
        if kw == "scalar":
            v = b.scalar(rhs, ln, rcol)
            sc.scalars[name] = v
            b.env[name] = v
        elif kw in ("form", "volume"):
            el = b.element(rhs, ln, rcol, FORM)
            if kw == "volume":
                top = tuple(range(sc.chart.dim))
                if set(el.terms) != {top} or not el[top].is_constant():
                    raise ParseError("a volume form must be a constant multiple of the top form", ln, rcol)
                sc.volumes[name] = el
            else:
                sc.forms[name] = el
            b.env[name] = _as_combo(el)
        elif kw == "bivector":
            el = b.element(rhs, ln, rcol, MULTIVECTOR)
            if not (el.is_zero() or el.is_homogeneous(2)):
                raise ParseError("a bivector must be homogeneous of degree 2", ln, rcol)
            sc.bivectors[name] = el
            b.env[name] = _as_combo(el)
        elif kw == "section":
            v = b.expr(rhs, ln, rcol)
            sc.sections[name] = _as_section(v, sc.chart, ln, rcol)
        elif kw == "frame":
            parts = [p.strip() for p in rhs.split(",")]
            secs = []
            for p in parts:
                if p not in sc.sections:
                    raise ParseError(f"unknown section {p!r}", ln, rcol + rhs.find(p))
                secs.append(sc.sections[p])
            try:
                sc.frames[name] = DiracFrame(sc.chart, secs, parts)
            except DegenerateFrame as exc:
                raise ParseError(str(exc), ln, rcol) from None
        elif kw == "point":
            vals = {}
            for mm in re.finditer(r"\S+", rhs):
                tok = mm.group(0)
                col = rcol + mm.start()
                if ":" not in tok:
                    raise ParseError(f"expected coord:value, got {tok!r}", ln, col)
                k, v = tok.split(":", 1)
                if k not in sc.chart.names:
                    raise ParseError(f"unknown coordinate {k!r}", ln, col)
                vals[k] = _number(v, ln, col + len(k) + 1)
            missing = [c for c in sc.chart.names if c not in vals]
            if missing:
                raise ParseError(f"point misses coordinates {', '.join(missing)}", ln, rcol)
            try:
                sc.points[name] = Point(sc.chart, vals)
            except ValueError as exc:
                raise ParseError(str(exc), ln, rcol) from None
        elif kw == "matrix":
            rows = _matrix_rows(rhs, ln, rcol)
            sc.matrices[name] = [[b.scalar(t, ln, c) for t, c in row] for row in rows]
        elif kw == "split":
            f = _fields(rhs, rcol, ln, ("x", "y", "omega", "pi"))
            xs = _names_list(f["x"][0], ln, f["x"][1], sc)
            ys = _names_list(f["y"][0], ln, f["y"][1], sc)
            w = _lookup(sc.forms, f["omega"], ln, "form")
            P = _lookup(sc.bivectors, f["pi"], ln, "bivector")
            try:
                sc.splits[name] = blocks_from_forms(sc.chart, xs, ys, w, P)
            except BlockError as exc:
                raise ParseError(str(exc), ln, rcol) from None
        elif kw == "dw":
            f = _fields(rhs, rcol, ln, ("x", "y", "A", "B", "pi"))
            xs = _names_list(f["x"][0], ln, f["x"][1], sc)
            ys = _names_list(f["y"][0], ln, f["y"][1], sc)
            A = _lookup(sc.matrices, f["A"], ln, "matrix")
            B = _lookup(sc.matrices, f["B"], ln, "matrix")
            P = _lookup(sc.bivectors, f["pi"], ln, "bivector")
            yi = [sc.chart.coord_index(n) for n in ys]
            Pm = P.matrix()
            try:
                sc.dws[name] = DWBlocks(sc.chart, xs, ys, A, B, [[Pm[i][j] for j in yi] for i in yi])
            except BlockError as exc:
                raise ParseError(str(exc), ln, rcol) from None
            if sorted(xs + ys) != sorted(sc.chart.names):
                raise ParseError("x and y must partition the chart coordinates", ln, rcol)
        elif kw == "splitting":
            f = _fields(rhs, rcol, ln, ("reg", "sing", "pi"))
            _lookup(sc.forms, f["reg"], ln, "form")
            _lookup(sc.forms, f["sing"], ln, "form")
            _lookup(sc.bivectors, f["pi"], ln, "bivector")
            sc.splittings[name] = (f["reg"][0], f["sing"][0], f["pi"][0])
    if b.scene is None:
        b.ensure_chart(len(lines))
    return b.scene


def _lookup(table: dict, field_: tuple[str, int], line: int, what: str):
    name, col = field_
    if name not in table:
        raise ParseError(f"unknown {what} {name!r}", line, col)
    return table[name]


def _as_combo(el: ExteriorElement) -> Combo:
    kind = "d" if el.variance == FORM else "e"
    return Combo(el.chart, {(kind, idx): c for idx, c in el.terms.items()})


def _as_section(v, chart: Chart, line: int, col: int) -> GeneralizedSection:
    z = [chart.zero] * chart.dim
    X, a = list(z), list(z)
    if isinstance(v, Scalar):
        if v.is_zero():
            return GeneralizedSection(chart, X, a)
        raise ParseError("a section has no scalar part", line, col)
    for (k, idx), c in v.terms.items():
        if len(idx) != 1:
            raise ParseError("a section is a sum of degree-1 terms in e<coord> and d<coord>", line, col)
        (X if k == "e" else a)[idx[0]] = c
    return GeneralizedSection(chart, X, a)


def _parse_probe(text: str, line: int, col: int, base: ProbeConfig) -> ProbeConfig:
    vals = {"dirs": base.directions, "depth": base.depth, "agree": base.eps_agree, "conv": base.eps_conv,
            "t0": base.t0}
    for m in re.finditer(r"\S+", text):
        tok = m.group(0)
        c = col + m.start()
        if "=" not in tok:
            raise ParseError(f"expected key=value, got {tok!r}", line, c, tuple(vals))
        k, v = tok.split("=", 1)
        if k not in vals:
            raise ParseError(f"unknown probe setting {k!r}", line, c, tuple(vals))
        num = _number(v, line, c + len(k) + 1)
        if k in ("dirs", "depth"):
            if num.denominator != 1:
                raise ParseError(f"{k} must be an integer", line, c)
            vals[k] = int(num)
        else:
            vals[k] = float(num)
    try:
        return ProbeConfig(vals["dirs"], vals["depth"], vals["t0"], vals["agree"], vals["conv"])
    except ValueError as exc:
        raise ParseError(str(exc), line, col) from None


def blocks_from_forms(chart: Chart, xs: list[str], ys: list[str], omega: ExteriorElement,
                      pi: ExteriorElement) -> SplitBlocks:
    if not (omega.is_zero() or omega.is_homogeneous(2)):
        raise BlockError("omega must be a 2-form")
    W = omega.matrix()
    P = pi.matrix()
    xi = [chart.coord_index(n) for n in xs]
    yi = [chart.coord_index(n) for n in ys]
    for i in xi:
        for j in range(chart.dim):
            if not P[i][j].is_zero():
                raise BlockError("pi must only involve y-directions")
    return SplitBlocks(
        chart, list(xs), list(ys),
        [[W[i][j] for j in xi] for i in xi],
        [[W[i][j] for j in yi] for i in xi],
        [[W[i][j] for j in yi] for i in yi],
        [[P[i][j] for j in yi] for i in yi],
    )
