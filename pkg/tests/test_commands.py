import csv
import json
import os

import pytest

from cases import CaseManager
from commands import analyze, example
from data_manager import DataManager
from errors import InputFormatError
from main import main
from power_data import PowerData

SUM_OF_SQUARES = {"n": 2, "terms": [{"exp": [2, 0], "coeff": "1"}, {"exp": [0, 2], "coeff": 1}]}


def write_input(tmp_path, data, name="input.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_parse_power_data():
    f = DataManager.parse_power_data({
        "n": 2,
        "denomVector": [1, 2],
        "terms": [{"exp": [2, 0], "coeff": "1/2"}, {"exp": [2, 0], "coeff": "1/2"}, {"exp": [0, 1], "coeff": -3}],
        "flatMarkers": [{"exp": [0, 0], "axis": 2}],
    })
    assert f.coefficients == {(2, 0): 1, (0, 1): -3}
    assert f.denom_vector == (1, 2)
    assert f.flat_markers[0].axis == 1


@pytest.mark.parametrize("obj", [
    [1, 2],
    {"terms": []},
    {"n": 2, "terms": [{"exp": [2, 0]}]},
    {"n": 2, "terms": [{"exp": [2, "a"], "coeff": 1}]},
])
def test_malformed_power_data(obj):
    with pytest.raises(InputFormatError):
        DataManager.parse_power_data(obj)


def test_load_pair(tmp_path):
    f, g = DataManager.load_pair(write_input(tmp_path, {"f": SUM_OF_SQUARES}))
    assert f.coefficients == {(2, 0): 1, (0, 2): 1}
    assert g is None
    with pytest.raises(InputFormatError):
        DataManager.load_pair(write_input(tmp_path, {"g": SUM_OF_SQUARES}, "no_phase.json"))
    mismatch = {"f": SUM_OF_SQUARES, "g": {"n": 3, "terms": [{"exp": [0, 0, 0], "coeff": 1}]}}
    with pytest.raises(InputFormatError):
        DataManager.load_pair(write_input(tmp_path, mismatch, "mismatch.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(InputFormatError):
        DataManager.load_pair(str(broken))
    with pytest.raises(InputFormatError):
        DataManager.load_pair(str(tmp_path / "missing.json"))


def test_parse_permutation():
    assert DataManager.parse_permutation("2,1,3", 3) == (1, 0, 2)
    assert DataManager.parse_permutation(None, 3) is None
    for text in ("1,1,2", "1,2", "a,b,c"):
        with pytest.raises(InputFormatError):
            DataManager.parse_permutation(text, 3)


def test_report_header():
    report = DataManager.report("analysis", {"pair": {}})
    assert report["tool"] == "newton-osc"
    assert report["kind"] == "analysis"
    assert report["generatedAt"].endswith("Z")
    assert "pair" in report


def test_write_csv(tmp_path):
    path = str(tmp_path / "samples.csv")
    DataManager.write_csv(path, ("t", "|I|"), [(10.0, 0.5), (100.0, 0.05)])
    with open(path) as f:
        rows = list(csv.reader(f))
    assert rows == [["t", "|I|"], ["10.0", "0.5"], ["100.0", "0.05"]]


def test_analysis_of_a_sum_of_squares():
    body = analyze(PowerData.from_terms(2, {(2, 0): 1, (0, 2): 1}))
    assert body["flags"] == {"fConvenient": True, "gHatE": True, "gFlat": False, "weightMode": "full"}
    assert (body["pair"]["d"], body["pair"]["m"]) == ("1", 1)
    assert body["unweighted"]["d"] == "1"
    assert (body["symmetry"]["dfg"], body["symmetry"]["dgf"]) == ("2", "1")
    assert body["poles"]["leading"]["value"] == "-1"
    assert body["verdict"]["beta"] == "-1"
    assert body["verdict"]["eta"] == 1
    assert body["verdict"]["status"] == "ExactByThm44"


def test_analysis_follows_the_permutation():
    body = analyze(PowerData.from_terms(2, {(4, 0): 1}), PowerData.monomial((2, 0)), permutation=(1, 0))
    assert body["f"]["text"] == "1*x2^4"
    assert body["pair"]["d"] == "4/3"


@pytest.mark.parametrize("key", CaseManager.names())
def test_every_example_passes_its_exact_checks(key):
    body = example(key)
    assert body["passed"], body["checks"]
    assert body["case"]["id"] == key
    assert "numeric" not in body


def test_saddle_example_reports_a_prediction_only_status():
    body = example("remark4.6")
    assert body["checks"]["status"] == {"expected": "PredictionOnly", "computed": "PredictionOnly", "match": True}


def test_main_writes_the_analysis(tmp_path):
    out = tmp_path / "report.json"
    status = main(["analyze", write_input(tmp_path, {"f": SUM_OF_SQUARES}), "--output", str(out)])
    assert status == 0
    report = json.loads(out.read_text())
    assert report["kind"] == "analysis"
    assert report["version"]
    assert report["verdict"]["status"] == "ExactByThm44"


def test_main_prints_errors_as_json(tmp_path, capsys):
    status = main(["analyze", str(tmp_path / "missing.json")])
    assert status == 1
    report = json.loads(capsys.readouterr().out)
    assert report["kind"] == "error"
    assert report["type"] == "InputFormatError"


def test_bad_permutation_is_an_input_error(tmp_path, capsys):
    status = main(["analyze", write_input(tmp_path, {"f": SUM_OF_SQUARES}), "--permute", "1,1"])
    assert status == 1
    assert json.loads(capsys.readouterr().out)["type"] == "InputFormatError"


def test_verify_refuses_four_variables(tmp_path, capsys):
    data = {"f": {"n": 4, "terms": [{"exp": [2, 2, 2, 2], "coeff": 1}]}}
    status = main(["verify", write_input(tmp_path, data)])
    assert status == 1
    assert json.loads(capsys.readouterr().out)["type"] == "DimensionTooLarge"


def test_example_with_parameters(capsys):
    assert main(["example", "15.1", "--param", "p=2,q=1"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["checks"]["d"]["computed"] == "4/5"
    assert report["case"]["params"] == {"p": 2, "q": 1, "c": 1}


def test_example_with_unknown_parameter(capsys):
    assert main(["example", "fresnel", "--param", "p=1"]) == 1
    assert json.loads(capsys.readouterr().out)["type"] == "InputFormatError"


@pytest.mark.slow
def test_verify_a_one_dimensional_square(tmp_path):
    data = {"f": {"n": 1, "terms": [{"exp": [2], "coeff": 1}]}}
    out = tmp_path / "report.json"
    samples = tmp_path / "samples.csv"
    chart = tmp_path / "chart.png"
    status = main(["verify", write_input(tmp_path, data), "-o", str(out),
                   "--plot-data", str(samples), "--plot", str(chart)])
    report = json.loads(out.read_text())
    assert status == 0, report
    assert report["prediction"] == {"beta": "-1/2", "eta": 1, "status": "ExactByThm44"}
    assert [check["plan"]["kind"] for check in report["checks"]] == ["zeta", "decay"]
    for kind in ("zeta", "decay"):
        assert os.path.exists(tmp_path / f"samples_{kind}.csv")
        assert os.path.getsize(tmp_path / f"chart_{kind}.png") > 0


@pytest.mark.slow
def test_fresnel_example_numeric():
    body = example("fresnel", numeric=True)
    check, = body["numeric"]
    assert check["passed"], check
    assert check["leadingCoefficient"]["relativeGap"]["value"] < 0.05


@pytest.mark.slow
def test_saddle_example_numeric_decays_like_t_cubed():
    body = example("remark4.6", numeric=True)
    check, = body["numeric"]
    assert check["passed"], check
    assert abs(check["fit"]["exponent"]["value"] + 3.0) <= 0.1
    assert body["analysis"]["verdict"]["status"] == "PredictionOnly"


@pytest.mark.slow
@pytest.mark.parametrize("params, pole", [({"p": 2, "q": 1}, -0.75), ({"p": 1, "q": 2}, -0.75)])
def test_first_example_numeric_locates_the_pole(params, pole):
    body = example("15.1", params, numeric=True)
    check, = body["numeric"]
    assert check["passed"], check
    assert abs(check["fit"]["location"]["value"] - pole) <= 0.02


@pytest.mark.slow
@pytest.mark.parametrize("key", ["15.2", "x1sq-x2sq"])
def test_example_numeric_checks_pass(key):
    body = example(key, numeric=True)
    assert body["numeric"]
    for check in body["numeric"]:
        assert check["passed"], check
    assert body["passed"]
