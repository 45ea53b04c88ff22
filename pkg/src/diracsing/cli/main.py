"""Command-line entry point: ``diracsing <command> <scene> [flags]``.

Exit status: 0 completed (whatever the verdict), 1 usage or scene error,
2 internal invariant failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from ..dirac import (
    DiracFrame,
    algebroid_data,
    classify_point,
    frames_span_equal,
    graph_of_bivector,
    graph_of_form,
    verify_dirac,
)
from ..expr import ParseError
from ..exterior import FORM, MULTIVECTOR, ExteriorElement, coeff_norm_sq, format_element
from ..removability import (
    FrameExtensionFailed,
    ProbeConfig,
    ProbeError,
    Verdict,
    extend_graph_frame,
    normalize_spinor,
    regularizing_function,
    removability_trace,
    source_spinor,
    ExactTierInapplicable,
)
from ..scalar import EvaluationError, Point, Scalar, Smoothness, format_poly, smooth_at
from ..splitting import (
    SingularPi,
    blocks_equal,
    dw_equal,
    dw_frame,
    dw_from_standard,
    dw_spans_standard,
    kernel_regular_at,
    partial_inverse,
    standard_frame,
    standard_from_dw,
    standard_sections,
    verify_partial_inverse,
    verify_splitting,
)
from .report import Report, fmt
from .scene import Scene, parse_scene

COMMANDS = ("check", "verify", "removable", "frame", "partial-inverse", "split-verify", "bracket-table", "spinor",
            "dw-convert")


class UsageError(Exception):
    pass


class InvariantFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="diracsing", description="Removable singularities of presymplectic forms via Dirac structures.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("scene", help="scene file")
    p.add_argument("--object", help="name of the scene object to operate on")
    p.add_argument("--mode", choices=("exact", "probe", "auto"), default="auto")
    p.add_argument("--at", help="name of the point (default: first declared point)")
    p.add_argument("--direction", choices=("to-dw", "from-dw"))
    p.add_argument("--probe-dirs", type=int)
    p.add_argument("--probe-depth", type=int)
    p.add_argument("--tol-agree", type=float)
    p.add_argument("--tol-conv", type=float)
    p.add_argument("--machine-only", action="store_true")
    return p


# ---------------------------------------------------------------------------
# object resolution


def _point(scene: Scene, args, required: bool = True) -> tuple[Optional[str], Optional[Point]]:
    name = args.at or scene.first("point")
    if name is None:
        if required:
            raise UsageError("the scene declares no point; add a 'point' statement")
        return None, None
    if name not in scene.points:
        raise UsageError(f"unknown point {name!r}")
    return name, scene.points[name]


def _source(scene: Scene, args) -> tuple[str, object]:
    """A 2-form, or a bivector paired with a volume form.

    Without ``--object`` the form named ``omega`` wins, then the first 2-form, then the first bivector.
    """
    name = args.object
    if name is None:
        forms = scene.two_forms()
        if "omega" in forms:
            name = "omega"
        elif forms:
            name = forms[0]
        else:
            name = scene.first("bivector")
    if name is None:
        raise UsageError("the scene declares no 2-form or bivector")
    if name in scene.forms:
        w = scene.forms[name]
        if not w.is_homogeneous(2):
            raise UsageError(f"form {name!r} is not a 2-form")
        return name, w
    if name in scene.bivectors:
        vol_name = scene.first("volume")
        vol = scene.volumes[vol_name] if vol_name else None
        return name, (scene.bivectors[name], vol)
    raise UsageError(f"{name!r} is not a form or bivector of the scene")


def _frame_object(scene: Scene, args) -> tuple[str, str, DiracFrame]:
    name = args.object
    if name is None:
        for kind in ("frame", "split", "dw"):
            name = scene.first(kind)
            if name:
                break
        else:
            forms = scene.two_forms()
            name = "omega" if "omega" in forms else (forms[0] if forms else scene.first("bivector"))
    if name is None:
        raise UsageError("nothing to check: declare a frame, form, bivector or block object")
    if name in scene.frames:
        return name, "frame", scene.frames[name]
    if name in scene.forms:
        return name, "graph-of-form", graph_of_form(scene.forms[name])
    if name in scene.bivectors:
        return name, "graph-of-bivector", graph_of_bivector(scene.bivectors[name])
    if name in scene.splits:
        return name, "standard-frame", standard_frame(scene.splits[name], strict=False).frame
    if name in scene.dws:
        return name, "dufour-wade-frame", dw_frame(scene.dws[name])
    raise UsageError(f"unknown object {name!r}")


def _probe_config(scene: Scene, args) -> ProbeConfig:
    base = scene.probe
    try:
        return ProbeConfig(
            args.probe_dirs if args.probe_dirs is not None else base.directions,
            args.probe_depth if args.probe_depth is not None else base.depth,
            base.t0,
            args.tol_agree if args.tol_agree is not None else base.eps_agree,
            args.tol_conv if args.tol_conv is not None else base.eps_conv,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# helpers


def _combo_text(coeffs: Sequence[Scalar], names: Sequence[str]) -> str:
    parts = [f"({c})*{n}" for c, n in zip(coeffs, names) if not c.is_zero()]
    return " + ".join(parts) if parts else "0"


def _value_text(vals: Sequence) -> str:
    return "[" + ", ".join(fmt(v) for v in vals) + "]"


def _put_verdict(rep: Report, prefix: str, v: Verdict) -> None:
    rep.put(f"{prefix}verdict", v.name)
    rep.put(f"{prefix}provenance", v.provenance)
    for key, value in sorted(v.certificate.items()):
        if isinstance(value, dict):
            if key == "psi_at_m":
                continue
            for k2, v2 in sorted(value.items()):
                rep.put(f"{prefix}{key}.{k2}", v2)
        elif isinstance(value, list):
            rep.put(f"{prefix}{key}", ", ".join(fmt(x) for x in value) if value else "none")
        else:
            rep.put(f"{prefix}{key}", value)
    if "psi_at_m" in v.certificate:
        ch = v.certificate["psi"].chart
        el = ExteriorElement(ch, FORM, {I: Scalar.const(ch, c) for I, c in v.certificate["psi_at_m"].items()})
        rep.put(f"{prefix}psi_at_m", format_element(el))


def _section_values(frame: DiracFrame, m: Point) -> Optional[list[list]]:
    rows = []
    for s in frame.sections:
        row = []
        for c in s.components():
            r = smooth_at(c, m)
            if not r.smooth:
                return None
            row.append(r.value)
        rows.append(row)
    return rows


def _values_as_section_text(frame: DiracFrame, row: list) -> str:
    ch = frame.chart
    n = ch.dim
    parts = []
    for k, v in enumerate(row):
        if v == 0:
            continue
        name = ("e" if k < n else "d") + ch.names[k % n]
        parts.append(f"({fmt(v)})*{name}")
    return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# commands


def cmd_check(scene: Scene, args, rep: Report) -> None:
    name, kind, F = _frame_object(scene, args)
    rep.put("object", name)
    rep.put("object.kind", kind)
    r = verify_dirac(F)
    rep.put("rank", r.rank)
    rep.put("isotropic", r.isotropic)
    rep.put("closed", r.closed)
    rep.put("dirac", r.passed)
    if r.witness:
        rep.put("witness", r.witness)
    rep.say(f"{kind} {name}: rank {r.rank}, isotropic {fmt(r.isotropic)}, Dorfman-closed {fmt(r.closed)}")
    if r.witness:
        rep.say(f"first failure: {r.witness}")
    for pname, m in scene.points.items():
        try:
            cls = classify_point(F, m).value
        except EvaluationError:
            cls = "singular"
        rep.put(f"class.{pname}", cls)
        rep.say(f"at {pname}: {cls}")


def cmd_removable(scene: Scene, args, rep: Report) -> None:
    name, source = _source(scene, args)
    pname, m = _point(scene, args)
    cfg = _probe_config(scene, args)
    rep.put("object", name)
    rep.put("point", pname)
    rep.put("mode", args.mode)
    try:
        final, stages = removability_trace(source, m, cfg, args.mode)
    except ProbeError as exc:
        rep.put("verdict", "Inconclusive")
        rep.put("probe_error", str(exc))
        rep.say(f"numeric probe failed: {exc}")
        return
    _put_verdict(rep, "", final)
    rep.put("stages", ", ".join(s for s, _ in stages))
    for stage, v in stages:
        rep.put(f"{stage}.tag", v.name)
        if stage == "obstruction":
            rep.put("obstruction.clauses", ", ".join(v.certificate["clauses"]) or "none")
    rep.say(f"removability of {name} at {pname}: {final.name} ({final.provenance} tier)")
    for note in final.notes:
        rep.say(f"  {note}")
    if args.mode != "probe" and stages and stages[0][0] == "exact" and final.tag.strength == 2:
        rep.say("certificate: the closure of the graph is the annihilator of the normalized spinor psi, "
                "which is polynomial and nonzero at the point")


def cmd_frame(scene: Scene, args, rep: Report) -> None:
    name, source = _source(scene, args)
    pname, m = _point(scene, args)
    rep.put("object", name)
    rep.put("point", pname)
    if isinstance(source, tuple):
        raise UsageError("frame extension is implemented for 2-forms")
    try:
        F = extend_graph_frame(source, m)
    except ExactTierInapplicable as exc:
        rep.put("status", "inapplicable")
        rep.say(f"frame extension needs radical-free coefficients: {exc}")
        return
    except FrameExtensionFailed as exc:
        rep.put("status", "failed")
        rep.put("trace", "; ".join(exc.trace))
        rep.say(f"no smooth frame found: {exc}")
        for t in exc.trace:
            rep.say(f"  {t}")
        return
    rep.put("status", "ok")
    rep.put("sections", ", ".join(F.names))
    rep.say(f"frame of the closure of Graph({name}) near {pname}:")
    for sname, s in zip(F.names, F.sections):
        rep.put(f"section.{sname}", s)
        rep.say(f"  {sname} = {s}")
    rows = _section_values(F, m)
    if rows is None:
        raise InvariantFailure("extended frame is not smooth at the point")
    for sname, row in zip(F.names, rows):
        rep.put(f"at.{pname}.{sname}", _values_as_section_text(F, row))
    from ..linalg import numeric_rank

    rep.put(f"rank_at.{pname}", numeric_rank(rows))
    rep.put("dirac", verify_dirac(F).passed)
    rep.put("spans_graph", frames_span_equal(F, graph_of_form(source)))
    for fname, G in scene.frames.items():
        rep.put(f"span_equal.{fname}", frames_span_equal(F, G))
        rep.say(f"span equals declared frame {fname}: {fmt(frames_span_equal(F, G))}")
        grows = _section_values(G, m)
        if grows is not None:
            for sname, row in zip(G.names, grows):
                rep.put(f"declared.{fname}.at.{pname}.{sname}", _values_as_section_text(G, row))


def cmd_partial_inverse(scene: Scene, args, rep: Report) -> None:
    name, source = _source(scene, args)
    if isinstance(source, tuple):
        raise UsageError("partial-inverse needs a 2-form")
    pname, m = _point(scene, args, required=False)
    rep.put("object", name)
    P = partial_inverse(source)
    rep.put("pi", P)
    rep.say(f"partial inverse of {name}: {format_element(P)}")
    r = verify_partial_inverse(source, P)
    for key, ok in r.items():
        rep.put(f"check.{key}", ok)
        rep.say(f"  {key}: {'pass' if ok else 'fail'}")
    for bname, B in scene.bivectors.items():
        rb = verify_partial_inverse(source, B)
        rep.put(f"declared.{bname}.passed", rb.passed)
        for key, ok in rb.items():
            rep.put(f"declared.{bname}.{key}", ok)
        rep.say(f"declared bivector {bname}: {'all pass' if rb.passed else 'fails'}")
    if m is not None:
        kr = kernel_regular_at(source, m)
        rep.put("kernel.basis", "; ".join(_value_text(row) for row in kr.basis) if kr.basis else "none")
        rep.put("kernel.generic_rank", kr.generic_rank)
        rep.put(f"kernel.{pname}", kr.status.value)
        if kr.witness:
            rep.put(f"kernel.{pname}.witness", kr.witness)
        rep.say(f"kernel at {pname}: {kr.status.value}" + (f" ({kr.witness})" if kr.witness else ""))


def cmd_split_verify(scene: Scene, args, rep: Report) -> None:
    name = args.object or scene.first("splitting")
    if name is None or name not in scene.splittings:
        raise UsageError("the scene declares no splitting (use 'splitting NAME = reg:.. sing:.. pi:..')")
    pname, m = _point(scene, args)
    reg, sing, pi = scene.splittings[name]
    rep.put("object", name)
    rep.put("point", pname)
    r = verify_splitting(scene.forms[reg], scene.forms[sing], scene.bivectors[pi], m)
    for cname, status, detail in r.clauses:
        rep.put(f"clause.{cname}", status.value)
        if detail:
            rep.put(f"clause.{cname}.detail", detail)
        rep.say(f"  {cname}: {status.value}" + (f" ({detail})" if detail else ""))
    rep.put("verdict", r.verdict.name)
    rep.say(f"splitting {name} at {pname}: {r.verdict.name}")


def cmd_bracket_table(scene: Scene, args, rep: Report) -> None:
    name = args.object
    if name is None:
        name = scene.first("frame") or scene.first("split")
    if name is not None and name in scene.splits:
        _bracket_table_split(scene, name, rep)
        return
    if name is not None and name in scene.frames:
        F = scene.frames[name]
        kind = "frame"
    else:
        src_name, src = _source(scene, argparse.Namespace(object=name))
        if isinstance(src, tuple):
            F = graph_of_bivector(src[0])
            kind = "graph-of-bivector"
        else:
            pname, m = _point(scene, args)
            try:
                F = extend_graph_frame(src, m)
            except (ExactTierInapplicable, FrameExtensionFailed) as exc:
                rep.put("object", src_name)
                rep.put("status", "no-frame")
                rep.say(f"no smooth frame near {pname}: {exc}")
                return
            kind = "extended-frame"
        name = src_name
    rep.put("object", name)
    rep.put("object.kind", kind)
    rv = verify_dirac(F)
    rep.put("dirac", rv.passed)
    if not rv.passed:
        rep.put("witness", rv.witness)
        rep.say(f"{name} is not a Dirac frame: {rv.witness}")
        return
    data = algebroid_data(F, rv)
    _put_algebroid(rep, scene, F.names, data, F)


def _put_algebroid(rep: Report, scene: Scene, names, data, F: DiracFrame) -> None:
    n = len(names)
    rep.say("brackets:")
    for i in range(n):
        for j in range(i + 1, n):
            text = _combo_text(data.bracket(i, j), names)
            rep.put(f"bracket.{names[i]}.{names[j]}", text)
            rep.say(f"  [{names[i]},{names[j]}] = {text}")
    rep.say("anchor:")
    ch = F.chart
    for i in range(n):
        text = _combo_text(data.anchor[i], ["e" + c for c in ch.names])
        rep.put(f"anchor.{names[i]}", text)
        rep.say(f"  rho({names[i]}) = {text}")
    rep.say("omega_L:")
    for i in range(n):
        for j in range(i + 1, n):
            rep.put(f"omega_L.{names[i]}.{names[j]}", data.omega_L[i][j])
            rep.say(f"  omega_L({names[i]},{names[j]}) = {data.omega_L[i][j]}")
    for pname, m in scene.points.items():
        status = "true"
        for row in data.omega_L:
            for v in row:
                r = smooth_at(v, m)
                if r.kind is Smoothness.RADICAL_UNDECIDED:
                    status = "undecided"
                elif not r.smooth or r.value != 0:
                    status = "false"
                    break
            if status == "false":
                break
        rep.put(f"omega_L.vanishes_at.{pname}", status)


def _bracket_table_split(scene: Scene, name: str, rep: Report) -> None:
    b = scene.splits[name]
    res = standard_frame(b, strict=False)
    rep.put("object", name)
    rep.put("object.kind", "standard-frame")
    for key, ok in sorted(res.checks.items()):
        rep.put(f"closed_form.{key}", ok)
    rep.put("closed_forms", res.passed)
    for sname, s in zip(res.frame.names, res.frame.sections):
        rep.put(f"section.{sname}", s)
    if res.failures:
        rep.put("failures", "; ".join(res.failures))
        rep.say("closed-form mismatches: " + "; ".join(res.failures))
    rv = verify_dirac(res.frame)
    rep.put("dirac", rv.passed)
    if rv.passed:
        _put_algebroid(rep, scene, res.frame.names, algebroid_data(res.frame, rv), res.frame)


def cmd_spinor(scene: Scene, args, rep: Report) -> None:
    name, source = _source(scene, args)
    rep.put("object", name)
    phi = source_spinor(source)
    rep.put("spinor", phi)
    rep.put("norm_sq", coeff_norm_sq(phi))
    rep.say(f"pure spinor of {name}: {format_element(phi)}")
    try:
        norm = normalize_spinor(phi)
    except ExactTierInapplicable as exc:
        rep.put("normalized", "inapplicable")
        rep.say(f"normalization skipped: {exc}")
        norm = None
    if norm is not None:
        rep.put("normalized", "ok")
        rep.put("L", norm.L)
        rep.put("G", norm.G)
        rep.put("psi", norm.psi)
        rep.say(f"normalized spinor psi = {format_element(norm.psi)}")
        for pname, m in scene.points.items():
            vals = {}
            for I, c in norm.psi.terms.items():
                r = smooth_at(c, m)
                if r.smooth and r.value != 0:
                    vals[I] = Scalar.const(norm.psi.chart, r.value) if not isinstance(r.value, float) else r.value
            el = ExteriorElement(norm.psi.chart, FORM, {I: v for I, v in vals.items() if isinstance(v, Scalar)})
            rep.put(f"psi_at.{pname}", format_element(el))
    if not isinstance(source, tuple):
        f = regularizing_function(source)
        if f.exact is not None:
            ch = f.exact.chart
            rep.put("f", f.exact)
            if ch.radical_names:
                rep.put("f.radical", f"{ch.radical_names[-1]}^2 = {format_poly(ch.radical_polys[-1], ch.symbols_str())}")
            rep.say(f"regularizing function f = {f.exact}")
        else:
            rep.put("f", "numeric")


def cmd_dw_convert(scene: Scene, args, rep: Report) -> None:
    direction = args.direction
    name = args.object
    if direction is None:
        if name is not None:
            direction = "from-dw" if name in scene.dws else "to-dw"
        else:
            direction = "to-dw" if scene.first("split") else "from-dw"
    rep.put("direction", direction)
    if direction == "to-dw":
        name = name or scene.first("split")
        if name not in scene.splits:
            raise UsageError("to-dw needs a 'split' object")
        b = scene.splits[name]
        rep.put("object", name)
        dw = dw_from_standard(b)
        _put_matrix(rep, "A", dw.A)
        _put_matrix(rep, "B", dw.B)
        _put_matrix(rep, "C", dw.C)
        rep.put("span_equal", dw_spans_standard(b))
        try:
            back = standard_from_dw(dw)
            rep.put("roundtrip", blocks_equal(back, b))
        except SingularPi:
            rep.put("roundtrip", "n/a")
        rep.say(f"Dufour-Wade blocks of {name}; frames span the same bundle: {rep.machine['span_equal']}")
    else:
        name = name or scene.first("dw")
        if name not in scene.dws:
            raise UsageError("from-dw needs a 'dw' object")
        dw = scene.dws[name]
        rep.put("object", name)
        pname, m = _point(scene, args, required=False)
        try:
            b = standard_from_dw(dw)
        except SingularPi as exc:
            rep.put("status", "singular-pi")
            rep.say(str(exc))
            return
        rep.put("status", "ok")
        _put_matrix(rep, "omega_xx", b.omega_xx)
        _put_matrix(rep, "omega_xy", b.omega_xy)
        rep.put("roundtrip", dw_equal(dw_from_standard(b), dw))
        a_secs, b_secs = standard_sections(b)
        rep.put("span_equal", frames_span_equal(dw_frame(dw), a_secs + b_secs))
        if m is not None:
            ok = all(smooth_at(v, m).smooth for row in dw_from_standard(b).C for v in row)
            rep.put(f"C_smooth_at.{pname}", ok)
        rep.say(f"standard blocks from {name}; round trip exact: {rep.machine['roundtrip']}")


def _put_matrix(rep: Report, name: str, M) -> None:
    for i, row in enumerate(M):
        for j, v in enumerate(row):
            rep.put(f"{name}.{i + 1}.{j + 1}", v)


HANDLERS = {
    "check": cmd_check,
    "verify": cmd_check,
    "removable": cmd_removable,
    "frame": cmd_frame,
    "partial-inverse": cmd_partial_inverse,
    "split-verify": cmd_split_verify,
    "bracket-table": cmd_bracket_table,
    "spinor": cmd_spinor,
    "dw-convert": cmd_dw_convert,
}


def run(argv: Sequence[str], out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(list(argv))
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return 1
    try:
        with open(args.scene, "rb") as fh:
            text = fh.read().decode("utf-8")
    except OSError as exc:
        err.write(f"cannot read scene: {exc}\n")
        return 1
    except UnicodeDecodeError:
        err.write("scene file is not valid UTF-8\n")
        return 1
    try:
        scene = parse_scene(text)
    except ParseError as exc:
        err.write(f"{args.scene}:{exc.line}:{exc.column}: {exc.message}")
        if exc.expected:
            err.write(f" (expected one of: {', '.join(exc.expected)})")
        err.write("\n")
        return 1
    rep = Report(args.command, os.path.basename(args.scene))
    try:
        HANDLERS[args.command](scene, args, rep)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return 1
    except (InvariantFailure, AssertionError) as exc:
        err.write(f"internal invariant failure: {exc}\n")
        return 2
    except Exception as exc:  # noqa: BLE001 - anything unexpected is an internal failure
        err.write(f"internal invariant failure: {type(exc).__name__}: {exc}\n")
        return 2
    out.write(rep.render(args.machine_only))
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
