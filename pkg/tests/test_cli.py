import io
import json
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from projshape.cli import main

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"
SCHEMA = json.loads(resources.files("projshape").joinpath("schema/report.schema.json").read_text())


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], stdout=out, stderr=err)
    doc = json.loads(out.getvalue()) if out.getvalue().strip() else None
    if doc is not None:
        jsonschema.validate(doc, SCHEMA)
    return code, doc, err.getvalue()


@pytest.mark.parametrize(
    "argv,golden",
    [
        (("analyze", DATA / "three_lines.json"), "analyze_three_lines"),
        (("analyze", DATA / "standard_frame.json"), "analyze_standard_frame"),
        (("witness", 1, 4), "witness_1_4"),
        (("witness", 2, 5), "witness_2_5"),
        (("tyler-numbers", 2, 6), "tyler_numbers_2_6"),
        (("tyler-numbers", 1, 4), "tyler_numbers_1_4"),
        (("check-sn", 2, 6, "2,4"), "check_sn_2_6_2_4"),
    ],
)
def test_golden(argv, golden):
    code, doc, _ = run(*argv)
    assert code == 0
    assert doc == json.loads((GOLDEN / f"{golden}.json").read_text())


def test_tyler_numbers_2_6():
    _, doc, _ = run("tyler-numbers", 2, 6)
    assert {k: doc[k] for k in ("t", "hausdorff", "maximal", "gcd")} == {
        "t": [1, 3],
        "hausdorff": True,
        "maximal": False,
        "gcd": 3,
    }


def test_analyze_three_lines():
    _, doc, _ = run("analyze", DATA / "three_lines.json")
    assert doc["free"] is True and doc["splittable"] is False
    assert doc["frame"] is None
    assert doc["pseudo_frame"]["base"] == [1, 2, 3, 4]
    assert doc["chart_dimension"] == 6


def test_analyze_standard_frame_and_double_pair():
    _, doc, _ = run("analyze", DATA / "standard_frame.json")
    assert doc["frame"] == [1, 2, 3, 4, 5] and doc["general_position"]
    _, doc, _ = run("analyze", DATA / "double_pair.json", "--sn", "2")
    assert doc["free"] is False and doc["witness"]["indices"] == [1, 2]
    assert doc["free"] == (not doc["splittable"]) == (doc["isotropy_dimension"] == 1)
    assert doc["standardizable"]["kind"] == "BalancedSplittable"
    assert doc["subspace_numbers"] == {"n": [2], "satisfied": True, "hausdorff": False}


def test_check_sn():
    _, doc, _ = run("check-sn", 2, 6, "2,4")
    assert doc["hausdorff"] is False and doc["violating_j"] == 2
    _, doc, _ = run("check-sn", 2, 6, "2,3")
    assert doc["hausdorff"] is True and doc["maximal"] is True


def test_standardize_and_distance():
    code, doc, _ = run("standardize", DATA / "generic.csv")
    assert code == 0 and doc["residual"] <= 1e-10
    code, doc, _ = run("distance", DATA / "generic.csv", DATA / "generic.csv")
    assert code == 0 and doc["distance"] <= 1e-8 and doc["metric_regime"] is True


def test_standardize_failure_is_a_domain_error():
    code, doc, err = run("standardize", DATA / "single_pair.json", "--max-iter", 200)
    assert code == 1
    assert doc["error"]["type"] == "NotStandardizable"
    assert doc["error"]["iterations"] == 200
    assert "NotStandardizable" in err


def test_sequences():
    code, doc, _ = run("blur", DATA / "double_pair.json", "--terms", 3)
    assert code == 0 and len(doc["terms"]) == 3
    code, doc, _ = run("merge", 2, 5, "--terms", 4)
    assert code == 0 and doc["speeds"] == {"d": [0, 1, 2], "b": [0, 1, 2]}
    code, _, err = run("blur", DATA / "three_lines.json")
    assert code == 1 and "NotSplittable" in err


def test_generate():
    _, a, _ = run("generate", 2, 6, "--seed", 3)
    _, b, _ = run("generate", 2, 6, "--seed", 3)
    assert a == b
    code, doc, _ = run("generate", 3, 7, "--constraint", "1,2,3:2")
    assert code == 0 and len(doc["matrix"]) == 7
    code, doc, _ = run("generate", 3, 7, "--constraint", "1:1")
    assert code == 1 and doc["error"]["type"] == "InfeasibleConstraint"


@pytest.mark.parametrize(
    "argv",
    [
        (),
        ("frobnicate",),
        ("tyler-numbers", 2, 4),
        ("tyler-numbers", "two", 6),
        ("check-sn", 2, 6, "4,2"),
        ("check-sn", 2, 6, "1,2,3"),
        ("check-sn", 2, 6, "a,b"),
        ("analyze", DATA / "missing.json"),
        ("generate", 3, 7, "--constraint", "garbage"),
        ("blur", DATA / "double_pair.json", "--terms", 0),
    ],
)
def test_usage_errors(argv):
    code, doc, _ = run(*argv)
    assert code == 2
    assert doc is None


def test_parse_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"matrix": [[1, 0], [0, 0], [1, 1], [1, 2]]}')
    code, _, err = run("analyze", bad)
    assert code == 2 and "landmark 2" in err
    bad.write_text("{")
    assert run("analyze", bad)[0] == 2


def test_env_tolerance(monkeypatch):
    near = DATA.parent / "data" / "generic.csv"
    monkeypatch.setenv("PROJSHAPE_TOL", "0.5")
    _, doc, _ = run("analyze", near)
    assert doc["rank"] < 2
