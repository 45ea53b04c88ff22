"""Partial inverses, kernels, splitting verification and block-form frames.

Matrices follow the row-vector convention: a 2-form ``omega`` acts as
``X -> X W`` and a bivector as ``alpha -> alpha P``, so the partial
inverse identities read ``W P W = W`` and ``P W P = P``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .dirac import (
    AlgebroidData,
    DiracFrame,
    GeneralizedSection,
    antipairing,
    dorfman,
    frames_span_equal,
)
from .exterior import FORM, MULTIVECTOR, ExteriorElement, ext_d, schouten_self
from .linalg import determinant, inverse, is_zero_matrix, matmul, nullspace, numeric_rank, rank, sub, transpose
from .removability import Tag, Verdict
from .scalar import Chart, ChartMismatch, Point, Scalar, Smoothness, derive, smooth_at

Matrix = list[list[Scalar]]


# ---------------------------------------------------------------------------
# kernels and partial inverses


def kernel_basis(omega: ExteriorElement) -> list[list[Scalar]]:
    """Content-reduced basis of ``ker omega`` (vector components)."""
    _require_two_form(omega)
    W = omega.matrix()
    if is_zero_matrix(W):
        ch = omega.chart
        return [[ch.one if j == i else ch.zero for j in range(ch.dim)] for i in range(ch.dim)]
    return nullspace(W)


def _require_two_form(omega: ExteriorElement):
    if omega.variance != FORM or not (omega.is_zero() or omega.is_homogeneous(2)):
        raise ValueError("expected a 2-form")


def partial_inverse(omega: ExteriorElement) -> ExteriorElement:
    """Bivector ``Pi`` with ``W P W = W`` and ``P W P = P``.

    Uses the lexicographically first index set ``J`` of size ``rank W``
    whose principal block is invertible and puts ``(W_JJ)^{-1}`` there.
    Whether the result is Poisson is not checked here.
    """
    _require_two_form(omega)
    ch = omega.chart
    n = ch.dim
    W = omega.matrix()
    r = rank(W) if not is_zero_matrix(W) else 0
    P = [[ch.zero] * n for _ in range(n)]
    if r == 0:
        return ExteriorElement.zero(ch, MULTIVECTOR)
    for J in itertools.combinations(range(n), r):
        block = [[W[i][j] for j in J] for i in J]
        if determinant(block).is_zero():
            continue
        inv = inverse(block)
        for a, i in enumerate(J):
            for b, j in enumerate(J):
                P[i][j] = inv[a][b]
        return ExteriorElement.two_form(P, ch, MULTIVECTOR)
    raise ArithmeticError("no invertible principal block of full rank (skew matrices always have one)")


@dataclass
class PartialInverseReport:
    omega_pi_omega: bool
    pi_omega_pi: bool
    antisymmetric: bool
    poisson: bool
    residual_omega: Matrix | None = None
    residual_pi: Matrix | None = None

    @property
    def passed(self) -> bool:
        return self.omega_pi_omega and self.pi_omega_pi and self.antisymmetric and self.poisson

    def items(self) -> list[tuple[str, bool]]:
        return [("omega_pi_omega", self.omega_pi_omega), ("pi_omega_pi", self.pi_omega_pi),
                ("antisymmetric", self.antisymmetric), ("poisson", self.poisson)]


def verify_partial_inverse(omega: ExteriorElement, pi: ExteriorElement) -> PartialInverseReport:
    _require_two_form(omega)
    if omega.chart != pi.chart:
        raise ChartMismatch("chart mismatch")
    if pi.variance != MULTIVECTOR or not (pi.is_zero() or pi.is_homogeneous(2)):
        raise ValueError("expected a bivector")
    W = omega.matrix()
    P = pi.matrix()
    r1 = sub(matmul(matmul(W, P), W), W)
    r2 = sub(matmul(matmul(P, W), P), P)
    anti = all((P[i][j] + P[j][i]).is_zero() for i in range(len(P)) for j in range(len(P)))
    poisson = schouten_self(pi).is_zero() if not pi.is_zero() else True
    ok1, ok2 = is_zero_matrix(r1), is_zero_matrix(r2)
    return PartialInverseReport(ok1, ok2, anti, poisson, None if ok1 else r1, None if ok2 else r2)


class Regularity(enum.Enum):
    REGULAR = "regular"
    IRREGULAR = "irregular"
    UNDECIDED = "undecided"


@dataclass
class KernelRegularity:
    status: Regularity
    basis: list[list[Scalar]]
    generic_rank: int
    witness: str | None = None

    @property
    def regular(self) -> bool:
        return self.status is Regularity.REGULAR


def kernel_regular_at(omega: ExteriorElement, m: Point) -> KernelRegularity:
    """Does ``ker omega`` extend to a smooth regular distribution at ``m``?"""
    _require_two_form(omega)
    ch = omega.chart
    n = ch.dim
    W = omega.matrix()
    r = 0 if is_zero_matrix(W) else rank(W)
    basis = kernel_basis(omega)
    if not basis:
        return KernelRegularity(Regularity.REGULAR, basis, r)
    values = []
    for row in basis:
        vals = []
        for v in row:
            res = smooth_at(v, m)
            if res.kind is Smoothness.RADICAL_UNDECIDED:
                return KernelRegularity(Regularity.UNDECIDED, basis, r,
                                        f"kernel component {v} is radical-undecided at m")
            if res.kind is Smoothness.POLE:
                # content reduction yields polynomial rows, so this cannot happen
                return KernelRegularity(Regularity.UNDECIDED, basis, r, f"kernel component {v} has a pole at m")
            vals.append(res.value)
        values.append(vals)
    k = numeric_rank(values)
    if k == n - r:
        return KernelRegularity(Regularity.REGULAR, basis, r)
    bad = next((row for row, vals in zip(basis, values) if all(v == 0 for v in vals)), basis[0])
    witness = "kernel row (" + ", ".join(str(v) for v in bad) + f") has rank {k} < {n - r} at m"
    return KernelRegularity(Regularity.IRREGULAR, basis, r, witness)


def omega_pi_graph_frame(omega: ExteriorElement, pi: ExteriorElement) -> list[GeneralizedSection]:
    """``ker omega`` together with ``Graph(Pi)`` restricted to the annihilator of the kernel."""
    ch = omega.chart
    n = ch.dim
    K = kernel_basis(omega)
    z = [ch.zero] * n
    secs = [GeneralizedSection(ch, row, z) for row in K]
    if K:
        ann = nullspace(K)
    else:
        ann = [[ch.one if j == i else ch.zero for j in range(n)] for i in range(n)]
    P = pi.matrix()
    for beta in ann:
        X = [sum((beta[i] * P[i][j] for i in range(n)), ch.zero) for j in range(n)]
        secs.append(GeneralizedSection(ch, X, beta))
    return secs


# ---------------------------------------------------------------------------
# splitting criterion


class ClauseStatus(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    UNDECIDED = "undecided"


@dataclass
class SplittingReport:
    clauses: list[tuple[str, ClauseStatus, str]]
    verdict: Verdict

    def status(self, name: str) -> ClauseStatus:
        return next(s for n, s, _ in self.clauses if n == name)


SPLITTING_CLAUSES = ("reg_closed", "sing_closed", "reg_smooth", "kernel_regular", "partial_inverse", "pi_vanishes")


def _smooth_all(a: ExteriorElement, m: Point, want_zero: bool = False) -> tuple[ClauseStatus, str]:
    undecided = []
    for idx, c in a.terms.items():
        res = smooth_at(c, m)
        if res.kind is Smoothness.POLE:
            return ClauseStatus.FAIL, f"coefficient {c} has a pole at m"
        if res.kind is Smoothness.RADICAL_UNDECIDED:
            undecided.append(str(c))
            continue
        if want_zero and res.value != 0:
            return ClauseStatus.FAIL, f"coefficient {c} equals {res.value} at m"
    if undecided:
        return ClauseStatus.UNDECIDED, "radical-undecided coefficients: " + ", ".join(undecided)
    return ClauseStatus.PASS, ""


def verify_splitting(omega_reg: ExteriorElement, omega_sing: ExteriorElement, pi: ExteriorElement,
                     m: Point) -> SplittingReport:
    """Check a proposed splitting ``omega = omega_reg + omega_sing`` with partial inverse ``pi``.

    All six clauses passing certifies removability of ``omega_reg + omega_sing`` at ``m``.
    A failing clause only shows that this particular splitting is no witness,
    so the verdict is then Inconclusive.
    """
    for a in (omega_sing, pi):
        if a.chart != omega_reg.chart:
            raise ChartMismatch("chart mismatch")
    clauses = []
    d_reg = ext_d(omega_reg)
    clauses.append(("reg_closed", ClauseStatus.PASS if d_reg.is_zero() else ClauseStatus.FAIL,
                    "" if d_reg.is_zero() else f"d(omega_reg) = {d_reg}"))
    d_sing = ext_d(omega_sing)
    clauses.append(("sing_closed", ClauseStatus.PASS if d_sing.is_zero() else ClauseStatus.FAIL,
                    "" if d_sing.is_zero() else f"d(omega_sing) = {d_sing}"))
    st, detail = _smooth_all(omega_reg, m)
    clauses.append(("reg_smooth", st, detail))
    kr = kernel_regular_at(omega_sing, m)
    st = {Regularity.REGULAR: ClauseStatus.PASS, Regularity.IRREGULAR: ClauseStatus.FAIL,
          Regularity.UNDECIDED: ClauseStatus.UNDECIDED}[kr.status]
    clauses.append(("kernel_regular", st, kr.witness or ""))
    pr = verify_partial_inverse(omega_sing, pi)
    failed = [name for name, ok in pr.items() if not ok]
    clauses.append(("partial_inverse", ClauseStatus.FAIL if failed else ClauseStatus.PASS,
                    ("failed: " + ", ".join(failed)) if failed else ""))
    st, detail = _smooth_all(pi, m, want_zero=True)
    clauses.append(("pi_vanishes", st, detail))
    statuses = [s for _, s, _ in clauses]
    if all(s is ClauseStatus.PASS for s in statuses):
        verdict = Verdict(Tag.CERTIFIED_REMOVABLE, "exact", {"clauses": "all pass"},
                          ["the splitting satisfies every condition of the splitting criterion"])
    else:
        bad = [n for n, s, _ in clauses if s is not ClauseStatus.PASS]
        verdict = Verdict(Tag.INCONCLUSIVE, "exact", {"clauses": ", ".join(bad)},
                          ["this splitting does not witness removability"])
    return SplittingReport(clauses, verdict)


# ---------------------------------------------------------------------------
# block data


def _is_antisymmetric(M: Matrix) -> bool:
    return all((M[i][j] + M[j][i]).is_zero() for i in range(len(M)) for j in range(len(M)))


def _zeros(ch: Chart, r: int, c: int) -> Matrix:
    return [[ch.zero] * c for _ in range(r)]


class BlockError(ValueError):
    pass


@dataclass
class SplitBlocks:
    chart: Chart
    x: list[str]
    y: list[str]
    omega_xx: Matrix
    omega_xy: Matrix
    omega_yy: Matrix
    pi: Matrix

    def __post_init__(self):
        ch = self.chart
        if sorted(self.x + self.y) != sorted(ch.names) or len(set(self.x + self.y)) != ch.dim:
            raise BlockError("x and y must partition the chart coordinates")
        p, q = len(self.x), len(self.y)
        shapes = [("omega_xx", self.omega_xx, p, p), ("omega_xy", self.omega_xy, p, q),
                  ("omega_yy", self.omega_yy, q, q), ("pi", self.pi, q, q)]
        for name, M, r, c in shapes:
            if len(M) != r or any(len(row) != c for row in M):
                raise BlockError(f"{name} must be {r}x{c}")
        for name in ("omega_xx", "omega_yy", "pi"):
            if not _is_antisymmetric(getattr(self, name)):
                raise BlockError(f"{name} must be antisymmetric")
        for row in self.pi:
            for v in row:
                for xn in self.x:
                    if not derive(v, xn).is_zero():
                        raise BlockError(f"pi depends on the x-coordinate {xn}")

    @classmethod
    def zero(cls, chart: Chart, x: Sequence[str], y: Sequence[str]) -> "SplitBlocks":
        p, q = len(x), len(y)
        return cls(chart, list(x), list(y), _zeros(chart, p, p), _zeros(chart, p, q), _zeros(chart, q, q),
                   _zeros(chart, q, q))

    @property
    def xi(self) -> list[int]:
        return [self.chart.coord_index(n) for n in self.x]

    @property
    def yi(self) -> list[int]:
        return [self.chart.coord_index(n) for n in self.y]

    def omega(self) -> ExteriorElement:
        """The 2-form assembled from the three blocks."""
        ch = self.chart
        n = ch.dim
        W = _zeros(ch, n, n)
        xi, yi = self.xi, self.yi
        for a, i in enumerate(xi):
            for b, j in enumerate(xi):
                W[i][j] = self.omega_xx[a][b]
            for b, j in enumerate(yi):
                W[i][j] = self.omega_xy[a][b]
                W[j][i] = -self.omega_xy[a][b]
        for a, i in enumerate(yi):
            for b, j in enumerate(yi):
                W[i][j] = self.omega_yy[a][b]
        return ExteriorElement.two_form(W, ch)

    def bivector(self) -> ExteriorElement:
        ch = self.chart
        n = ch.dim
        P = _zeros(ch, n, n)
        yi = self.yi
        for a, i in enumerate(yi):
            for b, j in enumerate(yi):
                P[i][j] = self.pi[a][b]
        return ExteriorElement.two_form(P, ch, MULTIVECTOR)


def _section(ch: Chart, vec: dict[int, Scalar], form: dict[int, Scalar]) -> GeneralizedSection:
    X = [vec.get(i, ch.zero) for i in range(ch.dim)]
    a = [form.get(i, ch.zero) for i in range(ch.dim)]
    return GeneralizedSection(ch, X, a)


def _acc(d: dict, k: int, v: Scalar):
    if v.is_zero():
        return
    d[k] = d[k] + v if k in d else v


def standard_sections(b: SplitBlocks) -> tuple[list[GeneralizedSection], list[GeneralizedSection]]:
    ch = b.chart
    xi, yi = b.xi, b.yi
    p, q = len(xi), len(yi)
    a_secs = []
    for i in range(p):
        form: dict[int, Scalar] = {}
        for j in range(p):
            _acc(form, xi[j], b.omega_xx[i][j])
        for be in range(q):
            _acc(form, yi[be], b.omega_xy[i][be])
        a_secs.append(_section(ch, {xi[i]: ch.one}, form))
    b_secs = []
    for al in range(q):
        vec: dict[int, Scalar] = {}
        form = {yi[al]: ch.one}
        for be in range(q):
            P = b.pi[al][be]
            if P.is_zero():
                continue
            _acc(vec, yi[be], P)
            for j in range(p):
                _acc(form, xi[j], -(P * b.omega_xy[j][be]))
            for ga in range(q):
                _acc(form, yi[ga], P * b.omega_yy[be][ga])
        b_secs.append(_section(ch, vec, form))
    return a_secs, b_secs


class BracketAssertionError(AssertionError):
    pass


@dataclass
class StandardFrameResult:
    frame: DiracFrame
    checks: dict[str, bool]
    algebroid: AlgebroidData | None
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def standard_frame(blocks: SplitBlocks, strict: bool = True) -> StandardFrameResult:
    """The frame ``a_i, b_alpha`` with its bracket table, anchor and ``omega_L``.

    Closed forms checked (with ``omega_L(u, v) = 1/2 (i_X beta - i_Y alpha)``):
    ``[a_i,a_j] = 0``, ``[a_i,b_al] = 0``, ``[b_al,b_be] = d_{y^ga} Pi_{al be} b_ga``,
    ``rho(a_i) = d_{x^i}``, ``rho(b_al) = Pi_{al be} d_{y^be}``,
    ``omega_L(a_i,a_j) = -omega^xx_ij``, ``omega_L(a_i,b_al) = -omega^xy_{i be} Pi_{al be}``,
    ``omega_L(b_al,b_be) = (Pi + Pi omega^yy Pi)_{al be}``.
    """
    ch = blocks.chart
    xi, yi = blocks.xi, blocks.yi
    p, q = len(xi), len(yi)
    a_secs, b_secs = standard_sections(blocks)
    names = [f"a{i + 1}" for i in range(p)] + [f"b{al + 1}" for al in range(q)]
    secs = a_secs + b_secs
    frame = DiracFrame(ch, secs, names)
    failures = []
    checks = {"aa": True, "ab": True, "bb": True, "anchor": True, "omega_L": True}

    for i in range(p):
        for j in range(i + 1, p):
            if not dorfman(a_secs[i], a_secs[j]).is_zero():
                checks["aa"] = False
                failures.append(f"[a{i + 1},a{j + 1}] != 0")
        for al in range(q):
            if not dorfman(a_secs[i], b_secs[al]).is_zero():
                checks["ab"] = False
                failures.append(f"[a{i + 1},b{al + 1}] != 0")
    bb_coeffs: dict[tuple[int, int], list[Scalar]] = {}
    for al in range(q):
        for be in range(al + 1, q):
            c = [derive(blocks.pi[al][be], ch.names[yi[ga]]) for ga in range(q)]
            expect = GeneralizedSection(ch, [ch.zero] * ch.dim, [ch.zero] * ch.dim)
            for ga in range(q):
                if not c[ga].is_zero():
                    expect = expect + b_secs[ga].scale(c[ga])
            if dorfman(b_secs[al], b_secs[be]) != expect:
                checks["bb"] = False
                failures.append(f"[b{al + 1},b{be + 1}] != dPi b")
            bb_coeffs[(al, be)] = c

    for i in range(p):
        want = [ch.one if k == xi[i] else ch.zero for k in range(ch.dim)]
        if list(a_secs[i].X) != want:
            checks["anchor"] = False
    for al in range(q):
        want = [ch.zero] * ch.dim
        for be in range(q):
            want[yi[be]] = blocks.pi[al][be]
        if list(b_secs[al].X) != want:
            checks["anchor"] = False

    PwP = matmul(matmul(blocks.pi, blocks.omega_yy), blocks.pi) if q else []
    for i in range(p):
        for j in range(p):
            if antipairing(a_secs[i], a_secs[j]) != -blocks.omega_xx[i][j]:
                checks["omega_L"] = False
                failures.append(f"omega_L(a{i + 1},a{j + 1})")
        for al in range(q):
            want = -sum((blocks.omega_xy[i][be] * blocks.pi[al][be] for be in range(q)), ch.zero)
            if antipairing(a_secs[i], b_secs[al]) != want:
                checks["omega_L"] = False
                failures.append(f"omega_L(a{i + 1},b{al + 1})")
    for al in range(q):
        for be in range(q):
            if antipairing(b_secs[al], b_secs[be]) != blocks.pi[al][be] + PwP[al][be]:
                checks["omega_L"] = False
                failures.append(f"omega_L(b{al + 1},b{be + 1})")

    algebroid = None
    if all(checks.values()):
        n = ch.dim
        structure = {}
        for s in range(n):
            for t in range(s + 1, n):
                coeffs = [ch.zero] * n
                if s >= p and t >= p:
                    for ga, c in enumerate(bb_coeffs[(s - p, t - p)]):
                        coeffs[p + ga] = c
                structure[(s, t)] = coeffs
        omega_L = [[antipairing(u, v) for v in secs] for u in secs]
        algebroid = AlgebroidData(names, [list(s.X) for s in secs], structure, omega_L)
    elif strict:
        raise BracketAssertionError("; ".join(failures))
    return StandardFrameResult(frame, checks, algebroid, failures)


def brackets_ab_vanish(blocks: SplitBlocks) -> bool:
    a_secs, b_secs = standard_sections(blocks)
    return all(dorfman(a, b).is_zero() for a in a_secs for b in b_secs)


# ---------------------------------------------------------------------------
# Dufour-Wade form


@dataclass
class DWBlocks:
    chart: Chart
    x: list[str]
    y: list[str]
    A: Matrix
    B: Matrix
    pi: Matrix
    C: Matrix | None = None

    def __post_init__(self):
        p, q = len(self.x), len(self.y)
        for name, M, r, c in (("A", self.A, p, q), ("B", self.B, p, p), ("pi", self.pi, q, q)):
            if len(M) != r or any(len(row) != c for row in M):
                raise BlockError(f"{name} must be {r}x{c}")
        if not _is_antisymmetric(self.B):
            raise BlockError("B must be antisymmetric")
        if not _is_antisymmetric(self.pi):
            raise BlockError("pi must be antisymmetric")

    @property
    def xi(self) -> list[int]:
        return [self.chart.coord_index(n) for n in self.x]

    @property
    def yi(self) -> list[int]:
        return [self.chart.coord_index(n) for n in self.y]


def dw_frame(dw: DWBlocks) -> DiracFrame:
    """``a~_i = d_{x^i} + A_{i be} d_{y^be} + B_ij dx^j``, ``b~_al = Pi_{al be} d_{y^be} + dy^al - A_{i al} dx^i``."""
    ch = dw.chart
    xi, yi = dw.xi, dw.yi
    p, q = len(xi), len(yi)
    secs = []
    for i in range(p):
        vec = {xi[i]: ch.one}
        form: dict[int, Scalar] = {}
        for be in range(q):
            _acc(vec, yi[be], dw.A[i][be])
        for j in range(p):
            _acc(form, xi[j], dw.B[i][j])
        secs.append(_section(ch, vec, form))
    for al in range(q):
        vec = {}
        form = {yi[al]: ch.one}
        for be in range(q):
            _acc(vec, yi[be], dw.pi[al][be])
        for i in range(p):
            _acc(form, xi[i], -dw.A[i][al])
        secs.append(_section(ch, vec, form))
    names = [f"at{i + 1}" for i in range(p)] + [f"bt{al + 1}" for al in range(q)]
    return DiracFrame(ch, secs, names)


def dw_from_standard(blocks: SplitBlocks) -> DWBlocks:
    """``A = -omega^xy Pi``, ``B = omega^xx + omega^xy Pi (omega^xy)^T``, ``C = -omega^xy``."""
    if not is_zero_matrix(blocks.omega_yy) and blocks.omega_yy:
        raise BlockError("the Dufour-Wade conversion needs omega_yy = 0")
    ch = blocks.chart
    p, q = len(blocks.x), len(blocks.y)
    wxy = blocks.omega_xy
    if q:
        wP = matmul(wxy, blocks.pi) if p else []
        A = [[-v for v in row] for row in wP]
        corr = matmul(wP, transpose(wxy)) if p else []
        B = [[blocks.omega_xx[i][j] + corr[i][j] for j in range(p)] for i in range(p)]
    else:
        A = [[] for _ in range(p)]
        B = [list(r) for r in blocks.omega_xx]
    C = [[-v for v in row] for row in wxy]
    return DWBlocks(ch, list(blocks.x), list(blocks.y), A, B, [list(r) for r in blocks.pi], C)


class SingularPi(ArithmeticError):
    pass


def standard_from_dw(dw: DWBlocks, at: Point | None = None) -> SplitBlocks:
    """``C = A Pi^{-1}``, ``omega^xy = -C``, ``omega^xx = B - C Pi C^T``.

    With ``at`` given, ``C`` must extend smoothly to that point.
    """
    ch = dw.chart
    p, q = len(dw.x), len(dw.y)
    if q:
        if determinant(dw.pi).is_zero():
            raise SingularPi("Pi is singular over the fraction field")
        C = matmul(dw.A, inverse(dw.pi)) if p else []
        corr = matmul(matmul(C, dw.pi), transpose(C)) if p else []
        wxx = [[dw.B[i][j] - corr[i][j] for j in range(p)] for i in range(p)]
    else:
        C = [[] for _ in range(p)]
        wxx = [list(r) for r in dw.B]
    if at is not None:
        for row in C:
            for v in row:
                if not smooth_at(v, at).smooth:
                    raise SingularPi(f"C entry {v} does not extend smoothly to the point")
    wxy = [[-v for v in row] for row in C]
    return SplitBlocks(ch, list(dw.x), list(dw.y), wxx, wxy, _zeros(ch, q, q), [list(r) for r in dw.pi])


def blocks_equal(a: SplitBlocks, b: SplitBlocks) -> bool:
    return (a.x == b.x and a.y == b.y and a.omega_xx == b.omega_xx and a.omega_xy == b.omega_xy
            and a.omega_yy == b.omega_yy and a.pi == b.pi)


def dw_equal(a: DWBlocks, b: DWBlocks) -> bool:
    return a.x == b.x and a.y == b.y and a.A == b.A and a.B == b.B and a.pi == b.pi


def dw_spans_standard(blocks: SplitBlocks) -> bool:
    """The Dufour-Wade frame of ``dw_from_standard(blocks)`` spans the standard frame's bundle."""
    dw = dw_from_standard(blocks)
    a_secs, b_secs = standard_sections(blocks)
    return frames_span_equal(dw_frame(dw), a_secs + b_secs)
