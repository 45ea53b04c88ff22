"""Forms and multivector fields with Scalar coefficients.

An :class:`ExteriorElement` maps strictly increasing index tuples to
Scalars.  Mixed degrees are allowed because pure spinors need them.

Contraction of a multivector into a form uses ``i_{X^Y} = i_X i_Y``: the
leftmost factor acts last.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

from .scalar import Chart, ChartMismatch, Point, Scalar, derive, evaluate

FORM = "form"
MULTIVECTOR = "multivector"


def merge_sign(a: tuple, b: tuple) -> tuple[int, tuple]:
    """Sign of the shuffle sorting ``a + b`` and the sorted tuple; 0 on overlap."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    sa = set(a)
    if any(i in sa for i in b):
        return 0, ()
    # number of pairs (i in a, j in b) with i > j
    inv = 0
    for j in b:
        for i in a:
            if i > j:
                inv += 1
    return (-1 if inv % 2 else 1), tuple(sorted(a + b))


class ExteriorElement:
    """Element of the exterior algebra of forms or of multivectors."""

    __slots__ = ("chart", "variance", "terms")

    def __init__(self, chart: Chart, variance: str, terms: Mapping[tuple, Scalar] | None = None):
        if variance not in (FORM, MULTIVECTOR):
            raise ValueError(f"unknown variance {variance!r}")
        clean = {}
        for idx, c in (terms or {}).items():
            idx = tuple(idx)
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise ValueError(f"index tuple {idx} is not strictly increasing")
            if idx and (idx[0] < 0 or idx[-1] >= chart.dim):
                raise ValueError(f"index tuple {idx} out of range")
            if not isinstance(c, Scalar):
                c = Scalar.const(chart, c)
            if c.chart != chart:
                raise ChartMismatch("coefficient on a different chart")
            if not c.is_zero():
                clean[idx] = c
        self.chart = chart
        self.variance = variance
        self.terms = dict(sorted(clean.items(), key=lambda kv: (len(kv[0]), kv[0])))

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, chart: Chart, variance: str = FORM) -> "ExteriorElement":
        return cls(chart, variance, {})

    @classmethod
    def scalar(cls, s: Scalar, variance: str = FORM) -> "ExteriorElement":
        return cls(s.chart, variance, {(): s})

    @classmethod
    def basis(cls, chart: Chart, names: Sequence[str], variance: str = FORM) -> "ExteriorElement":
        """``dx^a ^ dx^b ^ ...`` (or ``∂a ^ ∂b ^ ...``) from coordinate names."""
        idx = [chart.coord_index(n) for n in names]
        if len(set(idx)) != len(idx):
            return cls.zero(chart, variance)
        order = sorted(range(len(idx)), key=lambda k: idx[k])
        sign = _perm_sign(order)
        return cls(chart, variance, {tuple(sorted(idx)): chart.const(sign)})

    @classmethod
    def two_form(cls, matrix: Sequence[Sequence[Scalar]], chart: Chart, variance: str = FORM) -> "ExteriorElement":
        """``1/2 W_ij dx^i ^ dx^j`` from an antisymmetric matrix ``W``."""
        n = chart.dim
        terms = {}
        for i in range(n):
            for j in range(i + 1, n):
                terms[(i, j)] = _as_scalar(chart, matrix[i][j])
        return cls(chart, variance, terms)

    @classmethod
    def one_form(cls, comps: Sequence[Scalar], chart: Chart, variance: str = FORM) -> "ExteriorElement":
        return cls(chart, variance, {(i,): _as_scalar(chart, c) for i, c in enumerate(comps)})

    # -- inspection -----------------------------------------------------
    def __getitem__(self, idx) -> Scalar:
        return self.terms.get(tuple(idx), self.chart.zero)

    def degrees(self) -> set[int]:
        return {len(i) for i in self.terms}

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self, degree: int) -> bool:
        return all(len(i) == degree for i in self.terms)

    def part(self, degree: int) -> "ExteriorElement":
        return ExteriorElement(self.chart, self.variance, {i: c for i, c in self.terms.items() if len(i) == degree})

    def matrix(self) -> list[list[Scalar]]:
        """Antisymmetric component matrix of the degree-2 part."""
        n = self.chart.dim
        z = self.chart.zero
        W = [[z] * n for _ in range(n)]
        for idx, c in self.terms.items():
            if len(idx) == 2:
                i, j = idx
                W[i][j] = c
                W[j][i] = -c
        return W

    def vector(self) -> list[Scalar]:
        """Components of the degree-1 part."""
        return [self[(i,)] for i in range(self.chart.dim)]

    def coefficients(self) -> list[Scalar]:
        return list(self.terms.values())

    def all_indices(self, max_degree: int | None = None) -> list[tuple]:
        n = self.chart.dim
        top = n if max_degree is None else max_degree
        return [c for k in range(top + 1) for c in itertools.combinations(range(n), k)]

    # -- algebra --------------------------------------------------------
    def _check(self, other: "ExteriorElement"):
        if not isinstance(other, ExteriorElement):
            raise TypeError("expected an ExteriorElement")
        if self.chart != other.chart:
            raise ChartMismatch("chart mismatch")
        if self.variance != other.variance:
            raise ValueError("variance mismatch: cannot combine forms with multivectors")

    def __add__(self, other: "ExteriorElement") -> "ExteriorElement":
        self._check(other)
        out = dict(self.terms)
        for i, c in other.terms.items():
            out[i] = out[i] + c if i in out else c
        return ExteriorElement(self.chart, self.variance, out)

    def __neg__(self) -> "ExteriorElement":
        return ExteriorElement(self.chart, self.variance, {i: -c for i, c in self.terms.items()})

    def __sub__(self, other: "ExteriorElement") -> "ExteriorElement":
        return self + (-other)

    def scale(self, s) -> "ExteriorElement":
        s = _as_scalar(self.chart, s)
        return ExteriorElement(self.chart, self.variance, {i: c * s for i, c in self.terms.items()})

    def __mul__(self, s) -> "ExteriorElement":
        if isinstance(s, ExteriorElement):
            return NotImplemented
        return self.scale(s)

    __rmul__ = __mul__

    def __xor__(self, other: "ExteriorElement") -> "ExteriorElement":
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, ExteriorElement):
            return NotImplemented
        return self.chart == other.chart and self.variance == other.variance and self.terms == other.terms

    def __hash__(self):
        return hash((self.variance, tuple(self.terms.items())))

    def __repr__(self):
        return f"ExteriorElement({self.variance}: {format_element(self)})"

    def __str__(self):
        return format_element(self)

    def map_coefficients(self, fn: Callable[[Scalar], Scalar]) -> "ExteriorElement":
        return ExteriorElement(self.chart, self.variance, {i: fn(c) for i, c in self.terms.items()})


def _perm_sign(order: Sequence[int]) -> int:
    sign = 1
    seen = list(order)
    for i in range(len(seen)):
        for j in range(i + 1, len(seen)):
            if seen[i] > seen[j]:
                sign = -sign
    return sign


def _as_scalar(chart: Chart, v) -> Scalar:
    return v if isinstance(v, Scalar) else Scalar.const(chart, v)


def wedge(a: ExteriorElement, b: ExteriorElement) -> ExteriorElement:
    a._check(b)
    out: dict[tuple, Scalar] = {}
    n = a.chart.dim
    for i1, c1 in a.terms.items():
        for i2, c2 in b.terms.items():
            if len(i1) + len(i2) > n:
                continue
            sign, idx = merge_sign(i1, i2)
            if sign == 0:
                continue
            v = c1 * c2
            if sign < 0:
                v = -v
            out[idx] = out[idx] + v if idx in out else v
    return ExteriorElement(a.chart, a.variance, out)


def wedge_power(a: ExteriorElement, k: int) -> ExteriorElement:
    out = ExteriorElement.scalar(a.chart.one, a.variance)
    for _ in range(k):
        out = wedge(out, a)
    return out


def ext_d(a: ExteriorElement) -> ExteriorElement:
    """Exterior derivative ``d(c_I dx^I) = sum_j d_j c_I dx^j ^ dx^I``."""
    if a.variance != FORM:
        raise ValueError("exterior derivative applies to forms only")
    ch = a.chart
    out: dict[tuple, Scalar] = {}
    for idx, c in a.terms.items():
        for j, name in enumerate(ch.names):
            if j in idx:
                continue
            dc = derive(c, name)
            if dc.is_zero():
                continue
            sign, new = merge_sign((j,), idx)
            v = dc if sign > 0 else -dc
            out[new] = out[new] + v if new in out else v
    return ExteriorElement(ch, FORM, out)


def _contract_vector(j: int, idx: tuple) -> tuple[int, tuple]:
    """``i_{∂_j} dx^idx``: sign and remaining indices (sign 0 if j not in idx)."""
    if j not in idx:
        return 0, ()
    p = idx.index(j)
    return (-1 if p % 2 else 1), idx[:p] + idx[p + 1:]


def contract(v: ExteriorElement, a: ExteriorElement) -> ExteriorElement:
    """Interior product of a multivector into a form, ``i_{X^Y} = i_X i_Y``."""
    if v.variance != MULTIVECTOR or a.variance != FORM:
        raise ValueError("contract expects (multivector, form)")
    if v.chart != a.chart:
        raise ChartMismatch("chart mismatch")
    out: dict[tuple, Scalar] = {}
    for J, cv in v.terms.items():
        for I, ca in a.terms.items():
            sign, rest = 1, I
            # apply the rightmost vector first
            for j in reversed(J):
                s, rest = _contract_vector(j, rest)
                sign *= s
                if sign == 0:
                    break
            if sign == 0:
                continue
            val = cv * ca
            if sign < 0:
                val = -val
            out[rest] = out[rest] + val if rest in out else val
    return ExteriorElement(a.chart, FORM, out)


def interior(X: Sequence[Scalar], a: ExteriorElement) -> ExteriorElement:
    """``i_X a`` for a vector field given by components."""
    ch = a.chart
    return contract(ExteriorElement.one_form(X, ch, MULTIVECTOR), a)


def clifford_act(section, phi: ExteriorElement) -> ExteriorElement:
    """``(X + alpha) . phi = i_X phi + alpha ^ phi``."""
    if section.chart != phi.chart:
        raise ChartMismatch("chart mismatch")
    if phi.variance != FORM:
        raise ValueError("the spinor module consists of forms")
    ch = phi.chart
    X = ExteriorElement.one_form(section.X, ch, MULTIVECTOR)
    alpha = ExteriorElement.one_form(section.alpha, ch, FORM)
    return contract(X, phi) + wedge(alpha, phi)


def schouten_self(pi: ExteriorElement) -> ExteriorElement:
    """``[Pi, Pi]`` for a bivector, as a trivector.

    ``[Pi,Pi]^{ijk} = 2 sum_l (Pi^{li} d_l Pi^{jk} + Pi^{lj} d_l Pi^{ki} + Pi^{lk} d_l Pi^{ij})``.
    """
    if pi.variance != MULTIVECTOR or not pi.is_homogeneous(2):
        raise ValueError("schouten_self expects a homogeneous bivector")
    ch = pi.chart
    n = ch.dim
    P = pi.matrix()
    dP = {}
    for (i, j), c in pi.terms.items():
        for l, name in enumerate(ch.names):
            d = derive(c, name)
            if not d.is_zero():
                dP[(l, i, j)] = d
                dP[(l, j, i)] = -d

    def dp(l, a, b):
        return dP.get((l, a, b))

    terms = {}
    for i, j, k in itertools.combinations(range(n), 3):
        total = ch.zero
        for l in range(n):
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                pla = P[l][a]
                if pla.is_zero():
                    continue
                d = dp(l, b, c)
                if d is not None:
                    total = total + pla * d
        terms[(i, j, k)] = total * 2
    return ExteriorElement(ch, MULTIVECTOR, terms)


def coeff_norm_sq(phi: ExteriorElement) -> Scalar:
    """Sum of squared coefficients (monomial basis orthonormal)."""
    total = phi.chart.zero
    for c in phi.terms.values():
        total = total + c * c
    return total


def exp_neg(a: ExteriorElement) -> ExteriorElement:
    """``e^{-a} = sum_k (-1)^k a^k / k!`` for an even element."""
    ch = a.chart
    out = ExteriorElement.scalar(ch.one, a.variance)
    power = ExteriorElement.scalar(ch.one, a.variance)
    k = 0
    while True:
        k += 1
        power = wedge(power, a)
        if power.is_zero():
            return out
        out = out + power.scale(ch.const((-1) ** k) / math.factorial(k))


# ---------------------------------------------------------------------------
# numeric evaluation and pullback


def evaluate_element(a: ExteriorElement, m: Point) -> dict[tuple, object]:
    return {i: evaluate(c, m) for i, c in a.terms.items()}


def numeric_pullback(phi: ExteriorElement, mapping: Sequence[Union[Scalar, Callable]],
                     m: Sequence[float], step: float = 1e-6) -> dict[tuple, float]:
    """Pull ``phi`` back along ``mapping`` at the source point ``m``.

    ``mapping`` lists one component per target coordinate: a Scalar on
    the source chart or a callable of the source coordinates.  The
    Jacobian is taken by central differences.
    """
    if phi.variance != FORM:
        raise ValueError("only forms pull back")
    target = phi.chart
    if len(mapping) != target.dim:
        raise ValueError("mapping must have one component per target coordinate")
    funcs = []
    for comp in mapping:
        if isinstance(comp, Scalar):
            funcs.append(_scalar_callable(comp))
        else:
            funcs.append(comp)
    x0 = np.asarray([float(v) for v in m], dtype=float)
    k = len(x0)
    y0 = np.array([f(x0) for f in funcs], dtype=float)
    J = np.zeros((target.dim, k))
    for j in range(k):
        e = np.zeros(k)
        e[j] = step
        yp = np.array([f(x0 + e) for f in funcs], dtype=float)
        ym = np.array([f(x0 - e) for f in funcs], dtype=float)
        J[:, j] = (yp - ym) / (2 * step)
    yp = Point(target, [float(v) for v in y0])
    coeffs = {I: float(evaluate(c, yp)) for I, c in phi.terms.items()}
    out: dict[tuple, float] = {}
    degrees = sorted({len(I) for I in coeffs})
    for deg in degrees:
        for K in itertools.combinations(range(k), deg):
            total = 0.0
            for I, c in coeffs.items():
                if len(I) != deg:
                    continue
                total += c * (np.linalg.det(J[np.ix_(I, K)]) if deg else 1.0)
            if total != 0.0:
                out[K] = total
    return out


def _scalar_callable(s: Scalar):
    def f(x):
        return float(evaluate(s, Point(s.chart, [float(v) for v in x])))
    return f


# ---------------------------------------------------------------------------
# printing


def basis_name(chart: Chart, idx: tuple, variance: str) -> str:
    if not idx:
        return "1"
    prefix = "d" if variance == FORM else "e"
    return "^".join(prefix + chart.names[i] for i in idx)


def format_element(a: ExteriorElement) -> str:
    if a.is_zero():
        return "0"
    parts = []
    for idx, c in a.terms.items():
        coef = str(c)
        if not idx:
            parts.append(f"({coef})")
        else:
            parts.append(f"({coef})*{basis_name(a.chart, idx, a.variance)}")
    return " + ".join(parts)


def from_terms(chart: Chart, variance: str, items: Iterable[tuple[tuple, Scalar]]) -> ExteriorElement:
    out: dict[tuple, Scalar] = {}
    for idx, c in items:
        out[idx] = out[idx] + c if idx in out else c
    return ExteriorElement(chart, variance, out)
