import csv
import io
import json
import math
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bhsubdiv.cli import main
from bhsubdiv.errors import UnknownSchemeError
from bhsubdiv.io import (
    MalformedInputError,
    MissingInputError,
    dumps_json,
    fmt_float,
    read_manifold_polygon,
    read_mask,
    read_polygon,
    resolve_scheme,
    write_atomic,
)


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return path


# -- formatting ---------------------------------------------------------------


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_roundtrip(x):
    assert float(fmt_float(x)) == x


def test_dumps_json():
    text = dumps_json({"a": 0.1, "b": [Fraction(3, 256), 2], "c": {"d": True, "e": np.float64(1 / 3)}})
    data = json.loads(text)
    assert data["a"] == 0.1
    assert data["b"] == ["3/256", 2]
    assert data["c"] == {"d": True, "e": 1 / 3}
    assert "0.33333333333333331" in text


def test_write_atomic(tmp_path, capsys):
    target = tmp_path / "out.txt"
    write_atomic(target, "one\n")
    write_atomic(target, "two\n")
    assert target.read_text() == "two\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]
    write_atomic("-", "hello\n")
    assert capsys.readouterr().out == "hello\n"
    with pytest.raises(MissingInputError):
        write_atomic(tmp_path / "nope" / "x.txt", "")


# -- readers -----------------------------------------------------------------


def test_read_polygon_formats(tmp_path):
    j = write_json(tmp_path / "p.json", {"closed": False, "vertices": [[0, 0], [1, 2]]})
    poly = read_polygon(j)
    assert not poly.closed and poly.vertices.shape == (2, 2)
    assert read_polygon(j, closed=True).closed
    c = tmp_path / "p.csv"
    c.write_text("x,y\n0,0\n1,0\n1,1\n")
    poly = read_polygon(c)
    assert poly.closed and poly.vertices.shape == (3, 2)
    c.write_text("0,0\n1,0\n")
    assert len(read_polygon(c)) == 2


@pytest.mark.parametrize(
    "content",
    ['{"vertices": [[0, "a"]]}', '{"vertices": [[0, 1], [2]]}', "[1, 2", '{"points": []}', '{"closed": "yes", "vertices": [[0, 0]]}'],
)
def test_malformed_polygons(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    with pytest.raises(MalformedInputError):
        read_polygon(path)


def test_malformed_csv(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n0,0\n1,oops\n")
    with pytest.raises(MalformedInputError, match="row 2"):
        read_polygon(path)


def test_missing_file(tmp_path):
    with pytest.raises(MissingInputError):
        read_polygon(tmp_path / "absent.json")


def test_read_manifold_polygon(tmp_path):
    path = write_json(tmp_path / "m.json", {"geometry": "disk", "closed": True, "vertices": [[0, 0], [0.1, 0], [0, 0.1]]})
    poly = read_manifold_polygon(path)
    assert poly.geometry == "disk" and poly.K == -1
    write_json(path, {"closed": True, "vertices": [[0, 0]]})
    with pytest.raises(MalformedInputError):
        read_manifold_polygon(path)


def test_read_mask(tmp_path):
    path = write_json(tmp_path / "mask.json", {"scheme": "mine", "coefficients": ["-1/16", "9/16", "9/16", "-1/16"]})
    mask = read_mask(path)
    assert mask.coefficients == resolve_scheme("dgl4").coefficients
    write_json(path, [0.5, 0.5])
    with pytest.raises(MalformedInputError):
        read_mask(path)


def test_resolve_scheme():
    assert resolve_scheme("bh10").half_width == 5
    assert resolve_scheme("bh4").coefficients == resolve_scheme("dgl4").coefficients
    for bad in ("bh7", "bh2", "cubic"):
        with pytest.raises(UnknownSchemeError):
            resolve_scheme(bad)


# -- commands -----------------------------------------------------------------


def test_derive_stencil(capsys):
    code, out, _ = run(capsys, "derive-stencil", "--m", 3)
    assert code == 0
    data = json.loads(out)
    assert data["coefficients"] == ["3/256", "-25/256", "150/256", "150/256", "-25/256", "3/256"]
    assert data["degree"] == 5 and data["regularity"] == "C4"
    assert data["reproduction_errors"]["6"] == pytest.approx(3.515625)
    code, out, _ = run(capsys, "derive-stencil", "--m", 4, "--format", "csv")
    assert out.splitlines()[1] == "-3,-5/2048"


def test_analyze_symbol(capsys, workdir):
    code, out, _ = run(capsys, "analyze-symbol", "--scheme", "bh6", "--magnitude-csv", "mag.csv", "--samples", 5, "--fd-csv", "fd.csv", "--fd-levels", 4)
    assert code == 0
    data = json.loads(out)
    assert data["zero_order"] == 6 and data["regularity"] == "C4"
    assert data["derivatives"][-1] == {"k": 6, "value": "-225"}
    rows = list(csv.reader(open("mag.csv")))
    assert rows[0] == ["omega", "magnitude"] and len(rows) == 6
    assert len(list(csv.reader(open("fd.csv")))) == 1 + 4 * 5


def test_analyze_mask_file(capsys, workdir):
    write_json(workdir / "m.json", ["-1/16", "9/16", "9/16", "-1/16"])
    code, out, _ = run(capsys, "analyze-symbol", "--mask-file", "m.json")
    assert code == 0 and json.loads(out)["regularity"] == "C2"


def test_subdivide_two_point_open(capsys, workdir):
    write_json(workdir / "seg.json", {"closed": False, "vertices": [[0, 0], [1, 1]]})
    code, out, _ = run(capsys, "subdivide", "-i", "seg.json", "--scheme", "bh6", "--iters", 3)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["x", "y"] and len(rows) == 1 + 9


def test_subdivide_json_output(capsys, workdir):
    c = workdir / "sq.csv"
    c.write_text("\n".join(f"{math.cos(t)},{math.sin(t)}" for t in np.linspace(0, 6, 8)))
    code, _, _ = run(capsys, "subdivide", "-i", c, "--iters", 2, "--format", "json", "-o", "out.json")
    data = json.loads((workdir / "out.json").read_text())
    assert code == 0 and data["closed"] and len(data["vertices"]) == 32


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["subdivide", "-i", "nothere.json"], "not found"),
        (["subdivide", "-i", "bad.json"], "bad.json"),
        (["subdivide", "-i", "ok.json", "--scheme", "cubic"], "unknown scheme"),
        (["subdivide", "-i", "short.json"], "at least 6"),
        (["manifold-subdivide", "-i", "wide.json"], "diameter"),
    ],
)
def test_input_errors_exit_2(capsys, workdir, argv, fragment):
    (workdir / "bad.json").write_text("{nope")
    write_json(workdir / "ok.json", {"vertices": [[0, 0], [1, 0], [1, 1], [0, 1], [-1, 1], [-1, 0]]})
    write_json(workdir / "short.json", {"vertices": [[0, 0], [1, 0], [1, 1]]})
    write_json(workdir / "wide.json", {"geometry": "sphere", "vertices": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]})
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert fragment in err
    assert len(err.strip().splitlines()) == 1


def test_bad_flags_exit_2(capsys):
    for argv in (["derive-stencil", "--m", "1"], ["proximity", "--K", "1", "--kappas", "1"], ["proximity", "--K", "1", "--kappas", "1,1", "--h-grid", "1:0.1:3"]):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 2
    capsys.readouterr()


def test_numerical_error_exit_3(capsys):
    code, _, err = run(capsys, "proximity", "--K", -1, "--kappas", "1,1", "--h-grid", f"{math.pi}:4:2")
    assert code == 3 and "resonance" in err


def test_proximity_csv(capsys, workdir):
    code, out, _ = run(capsys, "proximity", "--K", 1, "--kappas", "1,1", "--h-grid", "1e-3:1e-1:3", "--profile-csv", "prof.csv", "--samples", 5)
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["h", "alpha_K", "alpha_0", "deviation"]
    assert float(rows[-1][3]) == pytest.approx(4.1625042e-05, rel=1e-7)
    prof = list(csv.reader(open("prof.csv")))
    assert prof[0] == ["s", "kappa_K", "kappa_0"] and len(prof) == 6


def test_benchmark(capsys, workdir):
    code, out, _ = run(capsys, "benchmark", "--levels", 2, "--schemes", "dgl4,bh6", "--curvature-csv", "k.csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == ["polygon", "scheme", "level", "vertices", "energy", "variance"]
    assert len(rows) == 1 + 5 * 2 * 3


def test_verify_variational(capsys):
    code, out, _ = run(capsys, "verify-variational", "--trials", 3, "--seed", 7)
    data = json.loads(out)
    assert code == 0
    assert data["appendix_ok"] is False
    assert data["minimiser"] == ["3/256", "-25/256", "75/128", "75/128", "-25/256", "3/256"]
    assert data["max_oracle_distance"] < 1e-9
    code, _, err = run(capsys, "verify-variational", "--trials", 1, "--strict")
    assert code == 4 and "disagree" in err


def test_manifold_commands(capsys, workdir):
    t = 2 * np.pi * np.arange(8) / 8
    verts = np.column_stack([np.sin(0.4) * np.cos(t), np.sin(0.4) * np.sin(t), np.full(8, np.cos(0.4))])
    write_json(workdir / "oct.json", {"geometry": "sphere", "closed": True, "vertices": verts.tolist()})
    code, out, _ = run(capsys, "manifold-subdivide", "-i", "oct.json", "--iters", 5)
    v = np.array(json.loads(out)["vertices"])
    assert code == 0 and v.shape == (256, 3)
    assert np.abs(np.linalg.norm(v, axis=1) - 1).max() <= 1e-12
    code, out, _ = run(capsys, "manifold-proximity", "--h-grid", "1e-3:1e-1:4", "--pairs", "1,1;0.5,2")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 1 + 2 * 2 * 4
    code, out, _ = run(capsys, "manifold-proximity", "--mode", "chart", "--geometry", "disk", "--h-grid", "1e-2:1e-1:3")
    assert code == 0 and list(csv.reader(io.StringIO(out)))[0] == ["geometry", "reference", "spacing", "h", "deviation"]


def test_outputs_are_byte_identical(capsys, workdir):
    for name in ("a", "b"):
        assert main(["verify-variational", "--trials", "4", "--seed", "3", "-o", f"{name}.json"]) == 0
        assert main(["benchmark", "--levels", "2", "-o", f"{name}.csv"]) == 0
    assert (workdir / "a.json").read_bytes() == (workdir / "b.json").read_bytes()
    assert (workdir / "a.csv").read_bytes() == (workdir / "b.csv").read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bhsubdiv.cli", "derive-stencil", "--m", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["coefficients"] == ["-1/16", "9/16", "9/16", "-1/16"]
