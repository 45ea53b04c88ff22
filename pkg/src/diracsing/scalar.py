"""Exact rational functions on a coordinate chart, with quadratic radicals.

A :class:`Scalar` is a quotient ``num/den`` of polynomials over QQ in the
chart coordinates and the declared radical symbols.  Every radical ``s``
satisfies ``s^2 = p(x)`` for a polynomial ``p`` in the coordinates and
denotes the nonnegative root.

Canonical form:

* the numerator is reduced modulo the radical relations (every radical
  exponent is 0 or 1);
* the denominator is radical-free (it is rationalized by multiplying with
  conjugates ``s -> -s``);
* numerator and denominator are coprime and the denominator is monic
  under the graded-lexicographic order of the ring.

With these rules two Scalars are equal as field elements iff their
representations are identical, so ``==`` is structural.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Callable, Iterable, Mapping, Sequence, Union

from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

Number = Union[int, Fraction, float]


class ChartMismatch(ValueError):
    """Operands live on different charts."""


class EvaluationError(ArithmeticError):
    """A Scalar was evaluated where its denominator vanishes."""


def _is_identifier(name: str) -> bool:
    return name.isidentifier()


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def _is_exact(v) -> bool:
    return isinstance(v, Rational)


class Chart:
    """Ordered coordinates plus quadratic radical symbols.

    ``radicals`` is a sequence of ``(symbol, definition)`` pairs.  The
    definition is either an expression string in the coordinates (scene
    syntax, e.g. ``"q1^2 + q2^2"``) or a callable receiving the coordinate
    Scalars of the radical-free base chart.
    """

    def __init__(self, names: Sequence[str], radicals: Sequence[tuple[str, object]] = ()):
        names = tuple(names)
        if len(names) < 2:
            raise ValueError("a chart needs at least two coordinates")
        rad_names = tuple(s for s, _ in radicals)
        all_names = names + rad_names
        for n in all_names:
            if not _is_identifier(n):
                raise ValueError(f"invalid identifier {n!r}")
        if len(set(all_names)) != len(all_names):
            raise ValueError("coordinate names and radical symbols must be distinct")
        self.names = names
        self.dim = len(names)
        self.radical_names = rad_names
        self.ring = PolyRing(all_names, QQ, grlex)
        self._index = {n: i for i, n in enumerate(all_names)}
        self._pow_cache: dict[tuple[int, int], object] = {}
        defs = []
        if radicals:
            base = Chart(names)
            for sym, definition in radicals:
                if isinstance(definition, str):
                    from .expr import parse_scalar

                    s = parse_scalar(definition, base)
                elif callable(definition):
                    s = definition(*base.coords())
                else:
                    s = Scalar.const(base, definition)
                if not isinstance(s, Scalar) or s.den != base.ring.one:
                    raise ValueError(f"radical {sym}: definition must be a polynomial in the coordinates")
                if s.is_zero():
                    raise ValueError(f"radical {sym}: definition is identically zero")
                defs.append(self._import_poly(s.num, base))
        self.radical_polys = tuple(defs)
        self.radical_index = tuple(self._index[s] for s in rad_names)

    # -- identity -------------------------------------------------------
    def key(self):
        return (self.names, tuple(zip(self.radical_names, map(str, self.radical_polys))))

    def __eq__(self, other):
        return self is other or (isinstance(other, Chart) and self.key() == other.key())

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        rad = ", ".join(f"{s}^2={p.as_expr()}" for s, p in zip(self.radical_names, self.radical_polys))
        return f"Chart({' '.join(self.names)}{'; ' + rad if rad else ''})"

    # -- constructors ---------------------------------------------------
    def coord(self, name: str) -> "Scalar":
        i = self.coord_index(name)
        return Scalar._raw(self, self.ring.gens[i], self.ring.one)

    def coords(self) -> list["Scalar"]:
        return [self.coord(n) for n in self.names]

    def radical(self, name: str) -> "Scalar":
        if name not in self.radical_names:
            raise KeyError(f"unknown radical {name!r}")
        return Scalar._raw(self, self.ring.gens[self._index[name]], self.ring.one)

    def const(self, value) -> "Scalar":
        return Scalar.const(self, value)

    @cached_property
    def zero(self) -> "Scalar":
        return Scalar._raw(self, self.ring.zero, self.ring.one)

    @cached_property
    def one(self) -> "Scalar":
        return Scalar._raw(self, self.ring.one, self.ring.one)

    def coord_index(self, name: str) -> int:
        try:
            i = self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown coordinate {name!r}") from None
        return i

    def has_radicals(self) -> bool:
        return bool(self.radical_names)

    # -- helpers --------------------------------------------------------
    def _import_poly(self, poly, source: "Chart"):
        """Move a polynomial from ``source``'s ring into this ring by name."""
        if source is self:
            return poly
        remap = [self._index[n] for n in source.symbols_str()]
        terms = {}
        n = self.ring.ngens
        for monom, c in poly.terms():
            m = [0] * n
            for j, e in enumerate(monom):
                if e:
                    m[remap[j]] += e
            terms[tuple(m)] = c
        return self.ring.from_dict(terms) if terms else self.ring.zero

    def _radical_power(self, k: int, e: int):
        key = (k, e)
        if key not in self._pow_cache:
            self._pow_cache[key] = self.radical_polys[k] ** e
        return self._pow_cache[key]

    def reduce(self, poly):
        """Replace ``s^2`` by its defining polynomial for every radical ``s``."""
        if not self.radical_polys:
            return poly
        ridx = self.radical_index
        needs = False
        for monom in poly.keys():
            if any(monom[i] >= 2 for i in ridx):
                needs = True
                break
        if not needs:
            return poly
        R = self.ring
        out = R.zero
        plain = {}
        for monom, c in poly.terms():
            if not any(monom[i] >= 2 for i in ridx):
                plain[monom] = plain.get(monom, 0) + c
                continue
            m = list(monom)
            factor = R.one
            for k, i in enumerate(ridx):
                e = m[i]
                if e >= 2:
                    factor = factor * self._radical_power(k, e // 2)
                    m[i] = e % 2
            out += R.from_dict({tuple(m): c}) * factor
        if plain:
            out += R.from_dict(plain)
        return self.reduce(out)

    def conjugate(self, poly, k: int):
        """Substitute ``s_k -> -s_k``."""
        i = self.radical_index[k]
        return self.ring.from_dict(
            {m: (-c if m[i] % 2 else c) for m, c in poly.terms()}
        ) if poly else poly

    def involves_radical(self, poly, k: int) -> bool:
        i = self.radical_index[k]
        return any(m[i] for m in poly.keys())

    def symbols_str(self):
        return self.names + self.radical_names


class Scalar:
    """Canonical rational function on a :class:`Chart`.  Immutable."""

    __slots__ = ("chart", "num", "den", "_fnum", "_fden")

    def __init__(self, chart: Chart, num, den=None):
        if den is None:
            den = chart.ring.one
        n, d = _canonical(chart, num, den)
        self._set(chart, n, d)

    def _set(self, chart, num, den):
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "_fnum", None)
        object.__setattr__(self, "_fden", None)

    def __setattr__(self, key, value):
        raise AttributeError("Scalar is immutable")

    @classmethod
    def _raw(cls, chart, num, den):
        obj = object.__new__(cls)
        obj._set(chart, num, den)
        return obj

    @classmethod
    def const(cls, chart: Chart, value) -> "Scalar":
        if isinstance(value, Scalar):
            _check_chart(chart, value.chart)
            return value
        if isinstance(value, float):
            value = Fraction(value)
        if isinstance(value, (int, Fraction)):
            q = QQ(value.numerator, value.denominator) if isinstance(value, Fraction) else QQ(value)
            return cls._raw(chart, chart.ring.ground_new(q), chart.ring.one)
        raise TypeError(f"cannot make a Scalar from {type(value).__name__}")

    # -- predicates -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return self.num == self.den

    def is_constant(self) -> bool:
        return self.den.is_ground and self.num.is_ground

    def is_polynomial(self) -> bool:
        return self.den == self.chart.ring.one

    def has_radicals(self) -> bool:
        ch = self.chart
        return any(ch.involves_radical(self.num, k) for k in range(len(ch.radical_names)))

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("Scalar is not constant")
        return _to_fraction(self.num.LC if self.num else 0) if self.num else Fraction(0)

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            _check_chart(self.chart, other.chart)
            return other
        if isinstance(other, (int, Fraction)):
            return Scalar.const(self.chart, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        if self.den == o.den:
            return Scalar(self.chart, self.num + o.num, self.den)
        return Scalar(self.chart, self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(self.chart, -self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.is_zero() or o.is_zero():
            return self.chart.zero
        if o.is_one():
            return self
        if self.is_one():
            return o
        return Scalar(self.chart, self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise ZeroDivisionError("division by the zero Scalar")
        return Scalar(self.chart, self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.is_zero():
            raise ZeroDivisionError("division by the zero Scalar")
        return Scalar(self.chart, self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, e: int):
        if not isinstance(e, int):
            raise TypeError("Scalar powers must be integers")
        if e < 0:
            return self.inverse() ** (-e)
        out = self.chart.one
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.chart == other.chart and self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"Scalar({format_scalar(self)})"

    def __str__(self):
        return format_scalar(self)

    # -- evaluation -----------------------------------------------------
    def _compiled(self):
        if self._fnum is None:
            object.__setattr__(self, "_fnum", _compile(self.num))
            object.__setattr__(self, "_fden", _compile(self.den))
        return self._fnum, self._fden

    def __call__(self, point: "Point"):
        return evaluate(self, point)


def _check_chart(a: Chart, b: Chart):
    if a is not b and a != b:
        raise ChartMismatch(f"chart mismatch: {a!r} vs {b!r}")


def _canonical(chart: Chart, num, den):
    if not den:
        raise ZeroDivisionError("zero denominator")
    num = chart.reduce(num)
    den = chart.reduce(den)
    for k in range(len(chart.radical_names)):
        if chart.involves_radical(den, k):
            conj = chart.conjugate(den, k)
            num = chart.reduce(num * conj)
            den = chart.reduce(den * conj)
            if not den:
                raise ZeroDivisionError("denominator is a zero divisor in the radical extension")
    if not num:
        return chart.ring.zero, chart.ring.one
    if not den.is_ground:
        num, den = num.cancel(den)
    lc = den.LC
    if lc != 1:
        num = num.quo_ground(lc)
        den = den.quo_ground(lc)
    return num, den


def _compile(poly):
    return [(m, c) for m, c in poly.terms()]


# ---------------------------------------------------------------------------
# derivatives


def derive(f: Scalar, coord: str) -> Scalar:
    """Exact partial derivative of ``f`` with respect to coordinate ``coord``.

    Radicals follow ``ds/dx = (dp/dx) / (2 s)``.
    """
    ch = f.chart
    i = ch.coord_index(coord)
    if f.is_zero():
        return ch.zero
    dnum = _poly_derivative(ch, f.num, i)
    if f.den.is_ground:
        return dnum / Scalar._raw(ch, f.den, ch.ring.one)
    dden = _poly_derivative(ch, f.den, i)
    den = Scalar._raw(ch, f.den, ch.ring.one)
    num = Scalar._raw(ch, f.num, ch.ring.one)
    return (dnum * den - num * dden) / (den * den)


def _poly_derivative(ch: Chart, poly, i: int) -> Scalar:
    R = ch.ring
    out = Scalar(ch, poly.diff(R.gens[i]))
    for k, ri in enumerate(ch.radical_index):
        if not ch.involves_radical(poly, k):
            continue
        p = ch.radical_polys[k]
        dp = p.diff(R.gens[i])
        if not dp:
            continue
        ds = poly.diff(R.gens[ri])
        # ds/dx_i = dp * s / (2 p)
        out = out + Scalar(ch, ds * dp * R.gens[ri], 2 * p)
    return out


def gradient(f: Scalar) -> list[Scalar]:
    return [derive(f, n) for n in f.chart.names]


# ---------------------------------------------------------------------------
# points and evaluation


class Point:
    """Coordinate values on a chart plus the nonnegative radical values."""

    def __init__(self, chart: Chart, values: Union[Mapping[str, Number], Sequence[Number]]):
        if isinstance(values, Mapping):
            unknown = set(values) - set(chart.names)
            if unknown:
                raise KeyError(f"unknown coordinates {sorted(unknown)}")
            missing = [n for n in chart.names if n not in values]
            if missing:
                raise KeyError(f"missing coordinates {missing}")
            vals = [values[n] for n in chart.names]
        else:
            vals = list(values)
            if len(vals) != chart.dim:
                raise ValueError("wrong number of coordinate values")
        vals = [_normalize_number(v) for v in vals]
        self.chart = chart
        self.values = tuple(vals)
        rads = []
        for k, p in enumerate(chart.radical_polys):
            pv = _eval_poly(_compile(p), self.values + (0,) * len(chart.radical_names))
            if pv < 0:
                raise ValueError(
                    f"radical {chart.radical_names[k]}: defining polynomial is negative at the point"
                )
            rads.append(_sqrt(pv))
        self.radical_values = tuple(rads)
        self.radical_squares = tuple(
            _eval_poly(_compile(p), self.values + (0,) * len(chart.radical_names))
            for p in chart.radical_polys
        )

    @property
    def exact(self) -> bool:
        return all(_is_exact(v) for v in self.values)

    def all_values(self) -> tuple:
        return self.values + self.radical_values

    def __getitem__(self, name: str):
        return self.values[self.chart.coord_index(name)]

    def shifted(self, direction: Sequence[float], t: float) -> "Point":
        return Point(self.chart, [float(v) + t * d for v, d in zip(self.values, direction)])

    def __repr__(self):
        inner = " ".join(f"{n}:{v}" for n, v in zip(self.chart.names, self.values))
        return f"Point({inner})"


def _normalize_number(v):
    if isinstance(v, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        return v
    if isinstance(v, Rational):
        return Fraction(int(v.numerator), int(v.denominator))
    return float(v)


def _sqrt(v):
    if _is_exact(v):
        n, d = v.numerator, v.denominator
        rn, rd = math.isqrt(n), math.isqrt(d)
        if rn * rn == n and rd * rd == d:
            return Fraction(rn, rd)
        return math.sqrt(v)
    return math.sqrt(v)


def _eval_poly(terms, vals):
    exact = all(_is_exact(v) for v in vals)
    total = Fraction(0) if exact else 0.0
    for monom, c in terms:
        term = _to_fraction(c) if exact else float(c)
        for v, e in zip(vals, monom):
            if e:
                term *= v**e
        total += term
    return total


def evaluate(f: Scalar, m: Point):
    """Value of ``f`` at ``m``: a Fraction when everything is rational, else a float."""
    _check_chart(f.chart, m.chart)
    fn, fd = f._compiled()
    vals = m.all_values()
    d = _eval_poly(fd, vals)
    if d == 0:
        raise EvaluationError(f"evaluation at a pole of {f}")
    return _eval_poly(fn, vals) / d


class Smoothness(enum.Enum):
    SMOOTH = "smooth"
    POLE = "pole"
    RADICAL_UNDECIDED = "radical-undecided"


@dataclass(frozen=True)
class SmoothResult:
    kind: Smoothness
    value: Number | None = None

    @property
    def smooth(self) -> bool:
        return self.kind is Smoothness.SMOOTH


def smooth_at(f: Scalar, m: Point) -> SmoothResult:
    """Decide whether ``f`` extends smoothly to ``m``.

    Radical-free: smooth iff the canonical denominator does not vanish.
    A radical whose defining polynomial vanishes at ``m`` makes the exact
    tier abstain.
    """
    _check_chart(f.chart, m.chart)
    ch = f.chart
    for k in range(len(ch.radical_names)):
        if (ch.involves_radical(f.num, k) or ch.involves_radical(f.den, k)) and m.radical_squares[k] == 0:
            return SmoothResult(Smoothness.RADICAL_UNDECIDED)
    fn, fd = f._compiled()
    vals = m.all_values()
    d = _eval_poly(fd, vals)
    if d != 0:
        return SmoothResult(Smoothness.SMOOTH, _eval_poly(fn, vals) / d)
    if f.has_radicals() and _eval_poly(fn, vals) == 0:
        # rationalizing may introduce a spurious common zero
        return SmoothResult(Smoothness.RADICAL_UNDECIDED)
    return SmoothResult(Smoothness.POLE)


# ---------------------------------------------------------------------------
# polynomial helpers used by the elimination and normalization code


def poly_scalar(chart: Chart, poly) -> Scalar:
    return Scalar._raw(chart, poly, chart.ring.one) if poly is not None else chart.zero


def lcm_of_denominators(values: Iterable[Scalar]):
    values = list(values)
    if not values:
        raise ValueError("empty sequence")
    ring = values[0].chart.ring
    out = ring.one
    for v in values:
        if not v.den.is_ground:
            out = out.lcm(v.den)
    return out.monic() if not out.is_ground else ring.one


def gcd_of_polys(polys: Iterable) -> object:
    g = None
    for p in polys:
        if not p:
            continue
        g = p if g is None else g.gcd(p)
        if g.is_ground:
            break
    if g is None:
        return None
    return g.monic()


def content_reduce(values: Sequence[Scalar]) -> list[Scalar]:
    """Scale a vector of Scalars to coprime polynomial entries.

    Multiplies by the lcm of the denominators, then divides by the gcd of
    the numerators; the first nonzero entry gets a positive leading
    coefficient.
    """
    values = list(values)
    if not values:
        return values
    ch = values[0].chart
    L = lcm_of_denominators(values)
    polys = []
    for v in values:
        if v.is_zero():
            polys.append(ch.ring.zero)
        else:
            q = L.exquo(v.den) if not v.den.is_ground else L
            polys.append(ch.reduce(v.num * q))
    G = gcd_of_polys(polys)
    if G is None:
        return [ch.zero] * len(values)
    polys = [p.exquo(G) if p else p for p in polys]
    # clear rational content to integer-primitive form
    lead = next(p for p in polys if p)
    c = lead.LC
    polys = [p.quo_ground(c) if p else p for p in polys]
    return [Scalar(ch, p) for p in polys]


def format_poly(poly, names: Sequence[str]) -> str:
    if not poly:
        return "0"
    parts = []
    for monom, c in poly.terms():
        c = _to_fraction(c)
        factors = []
        for name, e in zip(names, monom):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        mono = "*".join(factors)
        neg = c < 0
        a = -c if neg else c
        if mono:
            coef = "" if a == 1 else f"{a}*"
            body = coef + mono
        else:
            body = str(a)
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def format_scalar(f: Scalar) -> str:
    """Canonical expression syntax, re-parseable by the scene parser."""
    names = f.chart.symbols_str()
    n = format_poly(f.num, names)
    if f.den.is_ground:
        return n
    d = format_poly(f.den, names)
    return f"({n})/({d})"


def numeric_function(f: Scalar) -> Callable[[Sequence[float]], float]:
    """Fast float evaluator ``values -> f(values)`` on coordinate tuples."""
    ch = f.chart
    fn = [(m, float(c)) for m, c in f.num.terms()]
    fd = [(m, float(c)) for m, c in f.den.terms()]
    rpolys = [[(m, float(c)) for m, c in p.terms()] for p in ch.radical_polys]
    nrad = len(rpolys)

    def run(terms, vals):
        s = 0.0
        for monom, c in terms:
            t = c
            for v, e in zip(vals, monom):
                if e:
                    t *= v**e
            s += t
        return s

    def fun(values):
        vals = [float(v) for v in values]
        ext = vals + [0.0] * nrad
        rv = [math.sqrt(max(run(p, ext), 0.0)) for p in rpolys]
        full = vals + rv
        d = run(fd, full)
        if d == 0.0:
            raise EvaluationError("evaluation at a pole")
        return run(fn, full) / d

    return fun
