"""Pure spinors of graphs and the removability tests built on them.

Two tiers.  The exact tier clears denominators and common factors of the
spinor ``e^{-omega}`` and looks at the result at ``m``; a nonzero value
certifies that the closure of the graph is the smooth annihilator
bundle.  The numeric tier samples along rays and can only gather
evidence.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np
from sympy.polys.domains import QQ

from .dirac import DiracFrame, GeneralizedSection, frames_span_equal, graph_of_bivector, graph_of_form, verify_dirac
from .exterior import (
    FORM,
    MULTIVECTOR,
    ExteriorElement,
    clifford_act,
    coeff_norm_sq,
    contract,
    exp_neg,
    wedge,
)
from .linalg import nullspace, numeric_rank
from .scalar import Chart, EvaluationError, Point, Scalar, content_reduce, evaluate, numeric_function, poly_scalar


class ExactTierInapplicable(ValueError):
    """The exact tier needs radical-free coefficients."""


class ProbeError(RuntimeError):
    """Sampling failed (every ray hits the singular set, or the spinor vanishes)."""


# ---------------------------------------------------------------------------
# spinors


def spinor_of_form(omega: ExteriorElement) -> ExteriorElement:
    """``e^{-omega}``."""
    if omega.variance != FORM or not omega.is_homogeneous(2):
        raise ValueError("spinor_of_form expects a 2-form")
    return exp_neg(omega)


def spinor_of_bivector(pi: ExteriorElement, vol: ExteriorElement | None = None) -> ExteriorElement:
    """``e^{-Pi} . vol = sum_k (-1)^k i_{Pi^k / k!} vol``."""
    if pi.variance != MULTIVECTOR or not pi.is_homogeneous(2):
        raise ValueError("spinor_of_bivector expects a bivector")
    ch = pi.chart
    if vol is None:
        vol = ExteriorElement.basis(ch, ch.names)
    top = tuple(range(ch.dim))
    if set(vol.terms) != {top} or not vol[top].is_constant():
        raise ValueError("vol must be a top form with nonzero constant coefficient")
    return contract(exp_neg(pi), vol)


def annihilates(section: GeneralizedSection, phi: ExteriorElement) -> bool:
    return clifford_act(section, phi).is_zero()


@dataclass
class SpinorNormalization:
    L: Scalar
    G: Scalar
    psi: ExteriorElement

    def reconstruct(self) -> ExteriorElement:
        return self.psi.scale(self.G / self.L)


def normalize_spinor(phi: ExteriorElement) -> SpinorNormalization:
    """Clear denominators and the common polynomial factor of a spinor."""
    ch = phi.chart
    if phi.is_zero():
        raise ValueError("zero spinor")
    coeffs = list(phi.terms.values())
    if any(c.has_radicals() for c in coeffs):
        raise ExactTierInapplicable("spinor coefficients involve radicals")
    reduced = content_reduce(coeffs)
    # content_reduce scales by L/G up to a rational constant; recover it
    first = coeffs[0]
    ratio = reduced[0] / first  # = L/G exactly
    L = poly_scalar(ch, ratio.num)
    G = poly_scalar(ch, ratio.den)
    psi = ExteriorElement(ch, FORM, dict(zip(phi.terms.keys(), reduced)))
    return SpinorNormalization(L, G, psi)


# ---------------------------------------------------------------------------
# verdicts


class Tag(enum.Enum):
    CERTIFIED_REMOVABLE = "CertifiedRemovable"
    CERTIFIED_NOT_REMOVABLE = "CertifiedNotRemovable"
    EVIDENCE_REMOVABLE = "EvidenceRemovable"
    EVIDENCE_NOT_REMOVABLE = "EvidenceNotRemovable"
    INCONCLUSIVE = "Inconclusive"

    @property
    def strength(self) -> int:
        if self in (Tag.CERTIFIED_REMOVABLE, Tag.CERTIFIED_NOT_REMOVABLE):
            return 2
        if self in (Tag.EVIDENCE_REMOVABLE, Tag.EVIDENCE_NOT_REMOVABLE):
            return 1
        return 0


@dataclass
class Verdict:
    tag: Tag
    provenance: str  # exact | numeric
    certificate: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.tag.strength == 2 and self.provenance != "exact":
            raise ValueError("certified verdicts come from the exact tier only")
        if self.tag.strength == 1 and self.provenance != "numeric":
            raise ValueError("evidence verdicts come from the numeric tier only")

    @property
    def name(self) -> str:
        return self.tag.value


@dataclass(frozen=True)
class ProbeConfig:
    directions: int = 26
    depth: int = 20
    t0: float = 0.5
    eps_agree: float = 1e-4
    eps_conv: float = 1e-6

    def __post_init__(self):
        if self.directions < 2:
            raise ValueError("need at least 2 probe directions")
        if self.depth < 4:
            raise ValueError("probe depth must be at least 4")
        if not (self.t0 > 0 and self.eps_agree > 0 and self.eps_conv > 0):
            raise ValueError("radii and tolerances must be positive")

    def radii(self) -> list[float]:
        return [self.t0 * 2.0 ** (-k) for k in range(self.depth + 1)]


def probe_directions(n: int, count: int) -> list[tuple[float, ...]]:
    """Nonzero vectors of ``{-1,0,1}^n``, low support first, normalized."""
    vecs = [v for v in itertools.product((1, -1, 0), repeat=n) if any(v)]
    vecs.sort(key=lambda v: (sum(1 for c in v if c), tuple(-c if c else 2 for c in v)))
    out = []
    for v in vecs[:count]:
        s = math.sqrt(sum(c * c for c in v))
        out.append(tuple(c / s for c in v))
    return out


def format_direction(v: Sequence[float]) -> str:
    return "(" + ",".join("%.6g" % c for c in v) + ")"


# ---------------------------------------------------------------------------
# exact tier


Source = Union[ExteriorElement, tuple]


def source_spinor(source: Source) -> ExteriorElement:
    if isinstance(source, tuple):
        pi, vol = source
        return spinor_of_bivector(pi, vol)
    if source.variance == MULTIVECTOR:
        return spinor_of_bivector(source)
    return spinor_of_form(source)


def exact_removability(source: Source, m: Point) -> Verdict:
    """Certify removability when the normalized spinor is nonzero at ``m``."""
    phi = source_spinor(source)
    norm = normalize_spinor(phi)
    value = {I: evaluate(c, m) for I, c in norm.psi.terms.items()}
    nonzero = {I: v for I, v in value.items() if v != 0}
    cert = {"L": norm.L, "G": norm.G, "psi": norm.psi, "psi_at_m": nonzero}
    if nonzero:
        return Verdict(Tag.CERTIFIED_REMOVABLE, "exact", cert,
                       ["the normalized spinor is polynomial and nonzero at m, so its annihilator is a smooth "
                        "Dirac structure extending the graph"])
    return Verdict(Tag.INCONCLUSIVE, "exact", cert,
                   ["normalized spinor vanishes at m although its coefficients are coprime"])


# ---------------------------------------------------------------------------
# regularizing function


class RegularizingFunction:
    """``f`` as a float evaluator, plus an exact Scalar when representable."""

    def __init__(self, norm_sq: Scalar, exact: Scalar | None):
        self.norm_sq = norm_sq
        self.exact = exact
        self._n2 = numeric_function(norm_sq)

    def __call__(self, values: Sequence[float]) -> float:
        try:
            n2 = self._n2(values)
        except EvaluationError:
            return 0.0  # pole of the spinor: f extends by zero along the ray
        return 1.0 / math.sqrt(n2)


def regularizing_function(omega: ExteriorElement) -> RegularizingFunction:
    """``f = |e^{-omega}|^{-1}`` with the Euclidean coefficient norm.

    When the squared norm ``N/D`` is radical-free, ``f = s/N`` on the
    chart extended by a radical ``s`` with ``s^2 = N D``.
    """
    n2 = coeff_norm_sq(spinor_of_form(omega))
    exact = None
    ch = omega.chart
    if not n2.has_radicals() and not ch.has_radicals():
        N, D = n2.num, n2.den
        root = _poly_sqrt(N * D)
        if root is not None:
            return RegularizingFunction(n2, Scalar(ch, root, N))
        name = _fresh_name(ch, "f_s")
        from .scalar import format_poly

        prod = format_poly(N * D, ch.symbols_str())
        ext = Chart(ch.names, [(name, prod)])
        s = ext.radical(name)
        Ns = Scalar(ext, ext._import_poly(N, ch))
        exact = s / Ns
    return RegularizingFunction(n2, exact)


def _poly_sqrt(p):
    """Exact square root of a polynomial that is a perfect square, else None."""
    coeff, factors = p.sqf_list()
    c = Fraction(int(coeff.numerator), int(coeff.denominator))
    rn, rd = math.isqrt(c.numerator), math.isqrt(c.denominator)
    if c < 0 or rn * rn != c.numerator or rd * rd != c.denominator:
        return None
    root = p.ring.ground_new(QQ(rn, rd))
    for f, e in factors:
        if e % 2:
            return None
        root = root * f ** (e // 2)
    return root


def _fresh_name(ch: Chart, base: str) -> str:
    taken = set(ch.symbols_str())
    name, k = base, 0
    while name in taken:
        k += 1
        name = f"{base}{k}"
    return name


# ---------------------------------------------------------------------------
# numeric sampling


@dataclass
class RaySamples:
    direction: tuple[float, ...]
    index: int
    units: list[np.ndarray]  # unit spinor per radius (sign aligned to the innermost)
    f: list[float]
    omega_norm: list[float]


def _compile_element(a: ExteriorElement, keys: Sequence[tuple]):
    funcs = [numeric_function(a.terms[k]) if k in a.terms else None for k in keys]

    def run(values):
        return np.array([fn(values) if fn is not None else 0.0 for fn in funcs], dtype=float)
    return run


def _sign_fix(u: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(u))
    for c in u:
        if abs(c) > 1e-6 * scale:
            return u if c > 0 else -u
    return u


def _sample(phi: ExteriorElement, omega: ExteriorElement | None, m: Point, cfg: ProbeConfig):
    keys = sorted(phi.terms, key=lambda I: (len(I), I))
    spin = _compile_element(phi, keys)
    okeys = sorted(omega.terms) if omega is not None else []
    onum = _compile_element(omega, okeys) if omega is not None else None
    base = [float(v) for v in m.values]
    rays = []
    skipped = []
    for idx, v in enumerate(probe_directions(m.chart.dim, cfg.directions)):
        units, fs, norms = [], [], []
        try:
            for t in cfg.radii():
                x = [b + t * d for b, d in zip(base, v)]
                c = spin(x)
                nrm = float(np.linalg.norm(c))
                if not math.isfinite(nrm):
                    raise EvaluationError("overflow")
                if nrm == 0.0:
                    raise ProbeError(f"spinor vanishes at the sample t={t:g} along {format_direction(v)}")
                units.append(c / nrm)
                fs.append(1.0 / nrm)
                if onum is not None:
                    norms.append(float(np.linalg.norm(onum(x))))
        except EvaluationError:
            skipped.append(idx)
            continue
        inner = _sign_fix(units[-1])
        units = [u if np.dot(u, inner) >= 0 else -u for u in units]
        rays.append(RaySamples(v, idx, units, fs, norms))
    return keys, rays, skipped


def _sample_with_retry(phi, omega, m, cfg):
    keys, rays, skipped = _sample(phi, omega, m, cfg)
    if len(rays) < 2:
        smaller = ProbeConfig(cfg.directions, cfg.depth, cfg.t0 / 2, cfg.eps_agree, cfg.eps_conv)
        keys, rays, skipped = _sample(phi, omega, m, smaller)
        if len(rays) < 2:
            raise ProbeError("fewer than two probe rays avoid the singular set")
    return keys, rays, skipped


def _projective_distance(u: np.ndarray, v: np.ndarray) -> float:
    return float(min(np.linalg.norm(u - v), np.linalg.norm(u + v)))


# ---------------------------------------------------------------------------
# obstruction battery


def obstruction_check(omega: ExteriorElement, m: Point, cfg: ProbeConfig = ProbeConfig()) -> Verdict:
    """Sample ``f`` and ``|omega|`` near ``m`` and test the three obstructions.

    (i)   f not Cauchy along some ray, or ray limits disagree;
    (ii)  f converges to a common limit bounded away from zero;
    (iii) |omega| stays below twice its outermost-shell maximum on all inner shells.
    """
    phi = spinor_of_form(omega)
    _, rays, skipped = _sample_with_retry(phi, omega, m, cfg)
    fired = []
    f_limits = [r.f[-1] for r in rays]
    cauchy = [abs(r.f[-1] - r.f[-2]) for r in rays]
    spread = max(f_limits) - min(f_limits)
    converged = max(cauchy) < cfg.eps_conv
    if not converged or spread > cfg.eps_agree:
        fired.append("i")
    if converged and spread <= cfg.eps_agree and min(min(r.f[len(r.f) // 2:]) for r in rays) > cfg.eps_agree:
        fired.append("ii")
    outer = max(r.omega_norm[0] for r in rays)
    ceiling = 2.0 * outer
    inner_max = max(max(r.omega_norm[1:]) for r in rays)
    if inner_max <= ceiling:
        fired.append("iii")
    cert = {
        "clauses": fired,
        "f_limit_max": max(f_limits),
        "f_limit_min": min(f_limits),
        "f_cauchy_max": max(cauchy),
        "omega_ceiling": ceiling,
        "omega_inner_max": inner_max,
        "rays_used": len(rays),
        "rays_skipped": len(skipped),
    }
    if fired:
        return Verdict(Tag.EVIDENCE_NOT_REMOVABLE, "numeric", cert,
                       [f"obstruction clause ({c}) fires" for c in fired])
    return Verdict(Tag.INCONCLUSIVE, "numeric", cert, ["no obstruction fires"])


# ---------------------------------------------------------------------------
# directional probe


def directional_probe(source: Source, m: Point, cfg: ProbeConfig = ProbeConfig()) -> Verdict:
    """Compare the limits of the unit spinor line along rays into ``m``."""
    phi = source_spinor(source)
    keys, rays, skipped = _sample_with_retry(phi, None, m, cfg)
    ch = m.chart
    slot_names = [_slot(ch, I) for I in keys]
    drift = [float(np.linalg.norm(r.units[-1] - r.units[-2])) for r in rays]
    base = {"rays_used": len(rays), "rays_skipped": len(skipped), "max_drift": max(drift), "slots": slot_names}
    bad = [r for r, d in zip(rays, drift) if d >= cfg.eps_conv]
    if bad:
        r = bad[0]
        base.update(clause="i", witness_direction=format_direction(r.direction))
        return Verdict(Tag.EVIDENCE_NOT_REMOVABLE, "numeric", base,
                       [f"unit spinor does not settle along {format_direction(r.direction)}"])
    limits = [_sign_fix(r.units[-1]) for r in rays]
    worst, pair = 0.0, (0, 0)
    for i in range(len(rays)):
        for j in range(i + 1, len(rays)):
            d = _projective_distance(limits[i], limits[j])
            if d > worst:
                worst, pair = d, (i, j)
    base["disagreement"] = worst
    if worst > cfg.eps_agree:
        i, j = pair
        u, v = limits[i], limits[j]
        w = v if np.linalg.norm(u - v) <= np.linalg.norm(u + v) else -v
        base.update(
            witness=(format_direction(rays[i].direction), format_direction(rays[j].direction)),
            slot_difference={name: float(abs(a - b)) for name, a, b in zip(slot_names, u, w)},
            limit_a={name: float(a) for name, a in zip(slot_names, u)},
            limit_b={name: float(b) for name, b in zip(slot_names, w)},
        )
        return Verdict(Tag.EVIDENCE_NOT_REMOVABLE, "numeric", base,
                       ["limits of the spinor line depend on the direction of approach"])
    base["limit"] = {name: float(a) for name, a in zip(slot_names, limits[0])}
    return Verdict(Tag.EVIDENCE_REMOVABLE, "numeric", base,
                   ["the spinor line converges to a common limit along every probe ray"])


def _slot(ch: Chart, I: tuple) -> str:
    return "1" if not I else "^".join("d" + ch.names[i] for i in I)


# ---------------------------------------------------------------------------
# orchestration


def removability_trace(source: Source, m: Point, cfg: ProbeConfig = ProbeConfig(),
                       mode: str = "auto") -> tuple[Verdict, list[tuple[str, Verdict]]]:
    """Run the tiers in order and return the final verdict with every stage's verdict."""
    if mode not in ("auto", "exact", "probe"):
        raise ValueError(f"unknown mode {mode!r}")
    stages: list[tuple[str, Verdict]] = []
    notes = []
    if mode in ("auto", "exact"):
        try:
            exact = exact_removability(source, m)
        except ExactTierInapplicable as exc:
            exact = Verdict(Tag.INCONCLUSIVE, "exact", {}, [f"exact tier inapplicable: {exc}"])
        stages.append(("exact", exact))
        notes.extend(exact.notes)
        if exact.tag is Tag.CERTIFIED_REMOVABLE or mode == "exact":
            return exact, stages
    is_form = isinstance(source, ExteriorElement) and source.variance == FORM
    if is_form:
        obs = obstruction_check(source, m, cfg)
        stages.append(("obstruction", obs))
        if obs.tag is Tag.EVIDENCE_NOT_REMOVABLE:
            return _with_notes(obs, notes), stages
        notes.extend(obs.notes)
    probe = directional_probe(source, m, cfg)
    stages.append(("probe", probe))
    return _with_notes(probe, notes), stages


def _with_notes(v: Verdict, notes: list[str]) -> Verdict:
    return Verdict(v.tag, v.provenance, dict(v.certificate), list(notes) + list(v.notes))


def removability(source: Source, m: Point, cfg: ProbeConfig = ProbeConfig(), mode: str = "auto") -> Verdict:
    """Exact tier, then the obstruction battery, then the directional probe.

    An exact certificate is returned as soon as it is found and never
    replaced by numeric evidence.
    """
    return removability_trace(source, m, cfg, mode)[0]


# ---------------------------------------------------------------------------
# frame extension


class FrameExtensionFailed(RuntimeError):
    def __init__(self, message: str, trace: list[str]):
        super().__init__(message)
        self.trace = trace


def clifford_matrix(psi: ExteriorElement) -> tuple[list[tuple], list[list[Scalar]]]:
    """Matrix of ``v -> v . psi`` from the ``2n`` section slots to coefficients."""
    ch = psi.chart
    n = ch.dim
    cols = []
    for k in range(2 * n):
        s = GeneralizedSection.vector(ch, k) if k < n else GeneralizedSection.covector(ch, k - n)
        cols.append(clifford_act(s, psi))
    keys = sorted({I for c in cols for I in c.terms}, key=lambda I: (len(I), I))
    M = [[c.terms.get(I, ch.zero) for c in cols] for I in keys]
    return keys, M


def _orderings(n: int) -> list[list[int]]:
    natural = list(range(2 * n))
    forms_first = list(range(n, 2 * n)) + list(range(n))
    return [natural, forms_first, natural[::-1], forms_first[::-1]]


def extend_graph_frame(omega: ExteriorElement, m: Point, names: Sequence[str] | None = None) -> DiracFrame:
    """Frame of the annihilator of the normalized spinor, smooth and of rank ``n`` at ``m``."""
    ch = omega.chart
    n = ch.dim
    psi = normalize_spinor(spinor_of_form(omega)).psi
    _, M = clifford_matrix(psi)
    trace = []
    reference = graph_of_form(omega)
    for order in _orderings(n):
        Mp = [[row[c] for c in order] for row in M]
        basis = nullspace(Mp)
        if len(basis) != n:
            trace.append(f"ordering {order}: kernel dimension {len(basis)}")
            continue
        rows = []
        for b in basis:
            v = [None] * (2 * n)
            for pos, c in enumerate(order):
                v[c] = b[pos]
            rows.append(v)
        try:
            at_m = [[evaluate(x, m) for x in row] for row in rows]
        except EvaluationError as exc:
            trace.append(f"ordering {order}: {exc}")
            continue
        rk = numeric_rank(at_m)
        if rk < n:
            trace.append(f"ordering {order}: rank {rk} at m")
            continue
        secs = [GeneralizedSection(ch, row[:n], row[n:]) for row in rows]
        F = DiracFrame(ch, secs, list(names) if names else [f"e{i + 1}" for i in range(n)])
        if not verify_dirac(F).passed:
            trace.append(f"ordering {order}: frame fails verification")
            continue
        if not frames_span_equal(F, reference):
            trace.append(f"ordering {order}: span differs from the graph")
            continue
        return F
    raise FrameExtensionFailed("no content-reduced kernel basis is smooth and of full rank at m", trace)


def extend_bivector_frame(pi: ExteriorElement, m: Point, vol: ExteriorElement | None = None) -> DiracFrame:
    """Same as :func:`extend_graph_frame` for ``e^{-Pi} . vol``."""
    ch = pi.chart
    n = ch.dim
    psi = normalize_spinor(spinor_of_bivector(pi, vol)).psi
    _, M = clifford_matrix(psi)
    basis = nullspace(M)
    secs = [GeneralizedSection(ch, b[:n], b[n:]) for b in basis]
    F = DiracFrame(ch, secs)
    if not frames_span_equal(F, graph_of_bivector(pi)):
        raise FrameExtensionFailed("annihilator differs from the graph", [])
    return F
