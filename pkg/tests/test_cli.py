import io
import json

import pytest

from lozicert.cli import run
from lozicert.covering import reference_boxes
from lozicert.geometry import Point
from lozicert.figures import FigureError, Layer, emit_figure, render_svg


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def doc_of(*argv):
    code, out, _ = call(*argv, "--canonical")
    return code, json.loads(out)


@pytest.fixture
def box_file(tmp_path):
    def make(asserted):
        cfg = {"iterate": 4, "params": {"a": "1401/1000", "b": "2/5"},
               "boxes": [b.to_json() for b in reference_boxes("1/1000")], "asserted": asserted}
        path = tmp_path / "boxes.json"
        path.write_text(json.dumps(cfg))
        return str(path)
    return make


def test_fixed_points_report():
    code, doc = doc_of("fixed-points", "--a", "7/5", "--b", "2/5", "--period", "4")
    assert code == 0
    res = doc["result"]
    assert {tuple(p["point"]) for p in res["points"]} == {("1/2", "1/2"), ("-5/4", "-5/4")}
    assert [(s["start"], s["end"]) for s in res["segments"]] == [
        (["-20/29", "35/29"], ["0/1", "15/29"]), (["15/29", "-20/29"], ["35/29", "0/1"])]
    assert "meta" not in doc


def test_covering_exit_codes(box_file):
    assert call("covering", "--config", box_file([["N2", "N2"]]))[0] == 2
    assert call("covering", "--config", box_file([["N1", "N1"], ["N1", "N2"], ["N2", "N1"]]))[0] == 0
    assert call("covering", "--eps1", "1/1000", "--assert-cover", "1,1")[0] == 2


def test_covering_indeterminate(tmp_path):
    cfg = {"iterate": 4, "params": {"a": "1401/1000", "b": "2/5"},
           "boxes": [reference_boxes("1/1000")[0].to_json(),
                     {"name": "kite", "vertices": [["0", "0"], ["-1/10", "1"], ["2", "1"], ["1", "0"]]}],
           "asserted": [["N1", "kite"]]}
    path = tmp_path / "kite.json"
    path.write_text(json.dumps(cfg))
    assert call("covering", "--config", str(path))[0] == 3


def test_jump_demo():
    code, doc = doc_of("jump-demo", "--eps1", "1/1000", "--eps2", "0")
    assert code == 0
    res = doc["result"]
    assert len(res["fixed_points"]["segments"]) == 2
    assert res["trapping"]["passed"] is True
    assert res["covering"]["matrix"] == [[1, 1], [1, 0]]
    assert abs(res["covering"]["entropy"]["bound"] - 0.120303) < 1e-6


def test_trapping_refuted_with_region_file(tmp_path):
    path = tmp_path / "sleeve.json"
    f1, f2, d = Point.of("-20/29", "35/29"), Point.of(0, "15/29"), Point.of("1/100", "1/100")
    sleeve = [f1 + d, f2 + d, f2 - d, f1 - d]
    path.write_text(json.dumps({"vertices": [v.to_json() for v in sleeve]}))
    assert call("trapping", "--region", str(path))[0] == 2
    assert call("trapping")[0] == 0


def test_usage_errors():
    code, _, err = call("fixed-points", "--a", "7/x")
    assert code == 1 and "7/x" in err
    assert call("no-such-verb")[0] == 1
    assert call("entropy-bound", "--matrix", "[[2]]")[0] == 1
    assert call("critical-lines", "--depth", "9")[0] == 1
    assert call("trapping", "--a", "3/2")[0] == 1


@pytest.mark.parametrize("argv", [
    ["fixed-points"], ["entropy-bound"], ["perturb"], ["trapping"], ["covering"],
    ["critical-lines", "--depth", "3"], ["trace", "--arclength", "5"],
    ["estimate-entropy", "--n", "4", "--grid", "30,30"],
])
def test_determinism(argv):
    first = call(*argv, "--canonical")
    second = call(*argv, "--canonical")
    assert first == second and first[0] == 0


def test_perturb_table():
    code, doc = doc_of("perturb", "--eps2", "0")
    rows = {r["vertex"]: r for r in doc["result"]["rows"]}
    assert code == 0 and set(rows) == set("ABCDEFGH")
    assert (rows["A"]["x_lin"], rows["A"]["y_lin"]) == ("30476/18125", "-6363/3625")
    assert rows["A"]["display"] == ["42/25", "-7/4"]


def test_estimate_entropy_labeled():
    code, doc = doc_of("estimate-entropy", "--n", "4", "--grid", "20,20")
    assert doc["result"]["label"] == "non-rigorous" and doc["result"]["tag"] == "numerical evidence"


def test_out_and_svg(tmp_path):
    out, svg = tmp_path / "t.json", tmp_path / "t.svg"
    code, stdout, _ = call("trapping", "--out", str(out), "--svg", str(svg), "--canonical")
    assert code == 0 and "region" in stdout
    text = svg.read_text()
    assert text.count("<polygon") == 3 and text.startswith("<svg")
    # re-ingest the report
    again = tmp_path / "again.svg"
    assert call("figure", "--report", str(out), "--svg", str(again))[0] == 0
    assert again.read_text() == text
    assert call("figure", "--report", str(out), "--svg", str(again), "--layers", "nope")[0] == 1


def test_covering_figure(tmp_path, box_file):
    svg = tmp_path / "c.svg"
    call("covering", "--config", box_file([]), "--svg", str(svg))
    text = svg.read_text()
    for name in ("N1", "N2", "image-N1", "image-N2"):
        assert f'id="{name}"' in text


def test_trace_csv(tmp_path):
    csv = tmp_path / "w.csv"
    assert call("trace", "--side", "left", "--arclength", "3", "--csv", str(csv))[0] == 0
    assert csv.read_text().startswith("piece,x,y")


def test_figure_emitter_errors():
    with pytest.raises(FigureError):
        render_svg([])
    with pytest.raises(FigureError):
        emit_figure({"result": {}})
    svg = render_svg([Layer("a", polygons=[[(0, 0), (1, 0), (0, 1)]])])
    assert svg == render_svg([Layer("a", polygons=[[(0, 0), (1, 0), (0, 1)]])])
