import io
import os
import subprocess
import sys

import pytest

from diracsing.cli.main import run
from diracsing.cli.scene import parse_scene
from diracsing.expr import ParseError
from diracsing.exterior import format_element

CORPUS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "corpus")

SAMPLE = """chart q1 q2 p1 p2
radical r = q1*q1 + q2*q2        # means r^2 = q1^2+q2^2, r >= 0
form omega = dq1^dp1 + dq2^dp2 + (1/(r*r)) dq1^dq2
point m = q1:0 q2:0 p1:0 p2:0
"""


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def machine(text):
    body = text.split("[machine]\n", 1)[1].split("\n\n", 1)[0]
    return dict(line.split(" = ", 1) for line in body.splitlines() if line)


def write(tmp_path, text, name="s.scene"):
    p = tmp_path / name
    p.write_bytes(text.encode("utf-8"))
    return str(p)


def test_grammar_sample():
    sc = parse_scene(SAMPLE)
    assert sc.chart.dim == 4 and sc.chart.radical_names == ("r",)
    assert list(sc.forms) == ["omega"] and "m" in sc.points


def test_crlf_and_comments():
    sc = parse_scene(SAMPLE.replace("\n", "\r\n") + "# trailing comment\r\n")
    assert sc.forms["omega"] == parse_scene(SAMPLE).forms["omega"]


def test_degenerate_wedge_normalizes():
    sc = parse_scene("chart x y\nform w = dx^dy + dx^dx\n")
    assert set(sc.forms["w"].terms) == {(0, 1)}


@pytest.mark.parametrize("text, line, needle", [
    ("chart x y\nform w = dz^dq\n", 2, "z"),
    ("chart x y\nform w = dx^^dy\n", 2, ""),
    ("chart x y\nform w = dx^dy\nform w = dy^dx\n", 3, "w"),
    ("chart x y\nradical r = x^2\nradical s = r + 1\n", 3, "radical"),
    ("chart x y\nchart x y\n", 2, "chart"),
    ("form w = dx\n", 1, "chart"),
    ("chart x y\nform w = dx^dy + dx^dy^dx^dy\npoint m = x:0\n", 3, "y"),
    ("chart x y\nbogus w = 1\n", 2, "bogus"),
    ("chart x y\nprobe dirs=1\n", 2, ""),
])
def test_positioned_errors(text, line, needle):
    with pytest.raises(ParseError) as e:
        parse_scene(text)
    assert e.value.line == line and e.value.column >= 1
    assert needle in e.value.message


def test_print_parse_round_trip():
    for name in sorted(os.listdir(CORPUS)):
        sc = parse_scene(open(os.path.join(CORPUS, name), encoding="utf-8").read())
        header = "chart " + " ".join(sc.chart.names) + "\n"
        for sym, poly in zip(sc.chart.radical_names, sc.chart.radical_polys):
            from diracsing.scalar import format_poly

            header += f"radical {sym} = {format_poly(poly, sc.chart.symbols_str())}\n"
        for kind, table in (("form", sc.forms), ("bivector", sc.bivectors)):
            for n, v in table.items():
                printed = format_element(v)
                again = parse_scene(header + f"{kind} {n} = {printed}\n")
                got = (again.forms if kind == "form" else again.bivectors)[n]
                assert got == v, (name, n)
                assert format_element(got) == printed


def test_usage_errors(tmp_path):
    assert call()[0] == 1
    assert call("frobnicate", "x.scene")[0] == 1
    assert call("check", str(tmp_path / "missing.scene"))[0] == 1
    path = write(tmp_path, "chart x y\nform w = dx^^dy\n")
    code, _, err = call("check", path)
    assert code == 1 and f"{path}:2:" in err
    path = write(tmp_path, "chart x y\nform w = dx^dy\n")
    assert call("removable", path)[0] == 1  # no point declared
    assert call("check", path, "--object", "nope")[0] == 1
    assert call("removable", path, "--mode", "sometimes")[0] == 1


def test_removable_monopole(tmp_path):
    code, out, _ = call("removable", write(tmp_path, SAMPLE))
    assert code == 0
    m = machine(out)
    assert m["verdict"] == "CertifiedRemovable" and m["provenance"] == "exact"
    assert "[human]" in out


def test_non_removable_exits_zero():
    code, out, _ = call("removable", os.path.join(CORPUS, "bounded_radial.scene"), "--machine-only")
    assert code == 0 and machine(out)["verdict"] == "EvidenceNotRemovable"
    assert "[human]" not in out


def test_verify_reports_closure_failure():
    code, out, _ = call("verify", os.path.join(CORPUS, "nonclosed.scene"))
    m = machine(out)
    assert code == 0 and m["dirac"] == "false" and m["closed"] == "false" and "residual" in m["witness"]


def test_flags_reach_the_probe():
    path = os.path.join(CORPUS, "axis_singularity.scene")
    code, out, _ = call("removable", path, "--mode", "probe", "--probe-dirs", "6", "--probe-depth", "12",
                        "--tol-agree", "1e-3", "--tol-conv", "1e-5")
    m = machine(out)
    assert code == 0 and m["verdict"] == "EvidenceNotRemovable" and int(m["rays_used"]) <= 6


def test_bracket_table_on_monopole():
    code, out, _ = call("bracket-table", os.path.join(CORPUS, "monopole2d.scene"), "--machine-only")
    m = machine(out)
    assert code == 0
    assert m["bracket.a1.a2"] == "(-2*q1)*a1 + (-2*q2)*a2"
    assert m["omega_L.a1.a2"] == "-q1^2 - q2^2"


def test_split_objects_and_dw(tmp_path):
    path = os.path.join(CORPUS, "standard_frames.scene")
    m = machine(call("bracket-table", path, "--object", "open")[1])
    assert m["closed_forms"] == "false" and "failures" in m
    m = machine(call("dw-convert", os.path.join(CORPUS, "dw_roundtrip.scene"), "--object", "D")[1])
    assert m["roundtrip"] == "true" and m["span_equal"] == "true"
    m = machine(call("dw-convert", os.path.join(CORPUS, "dw_roundtrip.scene"), "--object", "Ddeg")[1])
    assert m["C_smooth_at.m"] == "false"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "diracsing.cli", "spinor", os.path.join(CORPUS, "omega0.scene")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "normalized = ok" in proc.stdout
