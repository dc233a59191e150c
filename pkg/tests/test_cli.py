import json

import numpy as np
import pytest

from lorentz_geom import __version__
from lorentz_geom.cli import run
from lorentz_geom.schottky import pants
from lorentz_geom.strips import StripAtlas, SurfaceModel, strip_cocycle


def _call(capsys, tmp_path, command, data=None, *flags):
    argv = [command, *flags]
    if data is not None:
        path = tmp_path / "in.json"
        path.write_text(data if isinstance(data, str) else json.dumps(data))
        argv += ["--input", str(path)]
    code = run(argv)
    return code, capsys.readouterr().out


def test_classify(capsys, tmp_path):
    code, out = _call(capsys, tmp_path, "classify", {"matrix": [[2, 0], [0, 0.5]]})
    rep = json.loads(out)
    assert code == 0 and rep["result"] == "hyperbolic" and rep["version"] == __version__
    assert rep["config"]["command"] == "classify"
    code, out = _call(capsys, tmp_path, "classify", [[np.cos(1), -np.sin(1)], [np.sin(1), np.cos(1)]])
    assert code == 0 and json.loads(out)["result"] == "elliptic"


def test_bad_inputs_exit_2(capsys, tmp_path):
    code, out = _call(capsys, tmp_path, "classify", "{not json")
    assert code == 2 and json.loads(out)["error"]["code"] == "parse_error"
    code, out = _call(capsys, tmp_path, "classify", {"matrix": [[1, 0], [0, -1]]})
    assert code == 2
    code, _ = _call(capsys, tmp_path, "delta", {"a": [[1, 0], [0, 1]]})
    assert code == 2
    code, _ = _call(capsys, tmp_path, "classify", {"matrix": [[1, 2, 3]]})
    assert code == 2
    with pytest.raises(SystemExit) as e:
        run(["nosuchcommand"])
    assert e.value.code == 2


def test_delta_outputs(capsys, tmp_path):
    a = [[1, 0], [0, 1]]
    b = [[np.exp(0.5), 0], [0, np.exp(-0.5)]]
    code, out = _call(capsys, tmp_path, "delta", {"a": a, "b": b, "details": True})
    res = json.loads(out)["result"]
    assert code == 0
    assert res["line"] in ("spacelike", "timelike", "lightlike", "degenerate")
    assert json.dumps(res["delta"], sort_keys=True) == json.dumps(res["crossratio"], sort_keys=True) or \
        abs(res["delta"]["value"] - res["crossratio"]["value"]) < 1e-9


def test_figure_csv_and_svg(capsys, tmp_path):
    code, out = _call(capsys, tmp_path, "figure", None, "--format", "csv")
    assert code == 0 and len(out.strip().splitlines()) == 13
    code, out = _call(capsys, tmp_path, "figure", None, "--format", "svg")
    assert code == 0 and out.lstrip().startswith("<")
    code, _ = _call(capsys, tmp_path, "classify", {"matrix": [[2, 0], [0, 0.5]]}, "--format", "csv")
    assert code == 2


def test_reports_are_byte_identical(capsys, tmp_path):
    data = {"a": [[1, 0.2], [0, 1]], "b": [[1.5, 0], [0.3, 1 / 1.5]]}
    outs = [_call(capsys, tmp_path, "delta", data, "--seed", "3")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    outs = [_call(capsys, tmp_path, "figure", None)[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_properness_and_admissible(capsys, tmp_path):
    j = pants((2.0, 3.0, 2.5)).rep
    gens = [g.matrix.tolist() for g in j.generators]
    code, out = _call(capsys, tmp_path, "properness", {"j": gens, "rho": gens, "N": 6})
    assert code == 0 and json.loads(out)["result"]["verdict"] == "violated"
    code, out = _call(capsys, tmp_path, "properness", {"j": gens, "rho": gens[:1]})
    assert code == 2
    atlas = StripAtlas(SurfaceModel(pants((2.0, 3.0, 2.5))))
    u = strip_cocycle(atlas.strips[0], [0.2, 0.3, 0.5])
    code, out = _call(capsys, tmp_path, "admissible", {"cocycle": u.to_json()})
    assert code == 0 and json.loads(out)["result"]["verdict"] == "certified-negative-slope"


def test_strip_and_invert(capsys, tmp_path, atlas):
    code, out = _call(capsys, tmp_path, "strip", {"system": 1, "widths": [0.3, 0.4, 0.3]})
    res = json.loads(out)["result"]
    assert code == 0 and res["length_ratio_sup"] < 1 and len(res["arcs"]) == 3
    code, out = _call(capsys, tmp_path, "invert", {"cocycle": res["cocycle"]})
    inv = json.loads(out)["result"]
    assert code == 0
    assert json.dumps(inv).count(res["arcs"][0]) >= 1
    code, out = _call(capsys, tmp_path, "strip", {"system": 99, "widths": [0.2, 0.3, 0.5]})
    assert code == 2
    code, out = _call(capsys, tmp_path, "strip", {"system": 1, "widths": [5.0, 5.0, 5.0]})
    assert code == 3 and json.loads(out)["error"]["type"] == "StripsOverlap"


def test_out_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out = _call(capsys, tmp_path, "classify", {"matrix": [[1, 1], [0, 1]]}, "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["result"] == "parabolic"
