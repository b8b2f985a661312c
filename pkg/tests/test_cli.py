import json

import pytest

from gquantale.cli import main
from gquantale.fixtures import load_fixture


def run(argv):
    lines = []
    code = main(argv, out=lines.append)
    return code, "\n".join(lines)


def run_json(argv):
    code, text = run(argv)
    return code, json.loads(text)


@pytest.fixture
def write(tmp_path):
    def _write(name, data):
        path = tmp_path / name
        path.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(path)

    return _write


def test_check_space(write):
    space = load_fixture("etale").space.to_json()
    code, report = run_json(["check", write("s.json", space), "--kind", "space"])
    assert code == 0
    assert report["summary"]["sober"]["ok"] is True
    assert report["summary"]["T1"] is False


def test_check_indiscrete_space_reports_not_sober(write):
    code, report = run_json(["check", write("s.json", {"points": ["a", "b"], "opens": [[], ["a", "b"]]})])
    assert code == 0
    assert report["summary"]["sober"]["ok"] is False


def test_check_one_element_quantale(write):
    q = {"n": 1, "leq": [], "product": [[0]], "involution": [0], "unit": 0}
    code, report = run_json(["check", write("q.json", q)])
    assert code == 0 and report["kind"] == "quantale"


def test_check_malformed_json(write):
    code, report = run_json(["check", write("bad.json", "{not json")])
    assert code == 2 and report["error"] == "ParseError"


def test_check_missing_file(tmp_path):
    code, _ = run_json(["check", str(tmp_path / "absent.json")])
    assert code == 2


def test_check_invalid_quantale_exits_1(write):
    q = {"n": 2, "leq": [[0, 1]], "product": [[0, 0], [0, 1]], "involution": [0, 1], "unit": 0}
    code, report = run_json(["check", write("q.json", q)])
    assert code == 1
    assert report["summary"]["axioms"]["U"]["ok"] is False


def test_check_base_with_missing_unit_image(write):
    fx = load_fixture("non_etale")
    members = [fx.groupoid.names(s) for s in fx.listed_members if fx.groupoid.names(s) != ["(p1,p1)"]]
    code, report = run_json(["check", write("b.json", {"groupoid": "8.2", "base": members})])
    assert code == 1
    assert report["summary"]["axioms"]["SB2"]["ok"] is False


def test_build_gq_fixtures(write):
    code, report = run_json(["build-gq", write("a.json", {"fixture": "8.1"})])
    assert code == 0
    assert report["summary"]["etale_classification"] == "inverse quantal frame"
    assert report["summary"]["elements"] == 17
    code, report = run_json(["build-gq", write("b.json", {"fixture": "8.2"})])
    assert code == 0
    assert report["summary"]["distributive"]["ok"] is False
    assert report["summary"]["topological_base"]["ok"] is False


def test_build_gq_trivial_action(write):
    space = load_fixture("non_etale").space.to_json()
    trivial = {"elements": ["id"], "mult": [["id"]], "identity": "id"}
    data = {"action": {"space": space, "group": trivial, "action": {}}, "base": "canonical"}
    code, report = run_json(["build-gq", write("t.json", data)])
    assert code == 0
    assert report["summary"]["elements"] == len(space["opens"])


def test_build_gq_budget(write):
    code, report = run_json(["build-gq", write("a.json", {"fixture": "8.2"}), "--size-budget", "5"])
    assert code == 3
    assert report["error"] == "SizeBudgetExceeded"


@pytest.mark.parametrize("name", ["8.1", "8.2"])
def test_roundtrip_fixtures(write, name):
    code, report = run_json(["roundtrip", write("f.json", {"fixture": name})])
    assert code == 0
    assert report["roundtrip"]["quantale_iso"] and report["roundtrip"]["groupoid_iso"]
    assert "phi0" in report["roundtrip"]["groupoid_certificate"]


def test_roundtrip_abstract_quantale(write):
    from tests.conftest import _built

    data = _built("etale")[2].quantale.to_json()
    code, report = run_json(["roundtrip", write("q.json", data)])
    assert code == 0 and report["roundtrip"]["quantale_iso"]


def test_roundtrip_corrupted_table_fails_before_roundtrip(write):
    from tests.conftest import _built

    data = _built("non_etale")[2].quantale.to_json()
    data["product"][3][3] = (data["product"][3][3] + 1) % data["n"]
    code, report = run_json(["roundtrip", write("q.json", data)])
    assert code == 1
    assert "roundtrip" not in report


def test_reconstruct(write):
    code, report = run_json(["reconstruct", write("f.json", {"fixture": "8.2"})])
    assert code == 0
    assert report["summary"]["classes"] == 5 and report["summary"]["units"] == 3


def test_fixtures_command():
    code, report = run_json(["fixtures"])
    assert code == 0
    assert set(report) - {"command", "exit_code"} == {"etale", "non_etale"}
    assert report["etale"]["drift"] == {} and report["non_etale"]["drift"] == {}
    code, report = run_json(["fixtures", "8.2", "--verify-oracles"])
    assert code == 0 and all(report["non_etale"]["oracles"].values())


def test_search_command():
    code, report = run_json(["search", "--max-size", "3"])
    assert code == 0
    assert report["models_by_size"] == {"1": 1, "2": 1, "3": 3}
    assert report["sg_checks_on_SG_models"] is True


def test_search_budget_exit_code():
    code, report = run_json(["search", "--max-size", "5", "--budget", "10"])
    assert code == 3 and report["complete"] is False


def test_global_flags_either_side(write):
    path = write("f.json", {"fixture": "8.1"})
    a = run(["--report", "text", "build-gq", path])
    b = run(["build-gq", path, "--report", "text"])
    assert a == b
    assert a[1].splitlines()[0].startswith("command: ")


def test_reports_are_byte_identical(write):
    path = write("f.json", {"fixture": "8.2"})
    assert run(["roundtrip", path]) == run(["roundtrip", path])
    assert run(["fixtures"]) == run(["fixtures"])


def test_timings_are_opt_in(write):
    path = write("f.json", {"fixture": "8.1"})
    _, plain = run_json(["build-gq", path])
    _, timed = run_json(["--timings", "build-gq", path])
    assert "timings" not in plain and "timings" in timed
