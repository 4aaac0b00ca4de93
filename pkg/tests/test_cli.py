import json
import subprocess
import sys
from importlib import resources

import pytest

from nabcoh.cli import ParseError, load_document, main, parse, run, serialize

EXPECTED = resources.files("nabcoh") / "fixtures" / "expected"
CASES = json.loads((EXPECTED / "cases.json").read_text(encoding="utf-8"))
FIXTURES = ["h2", "l1", "l1_z2", "u2", "a2", "broken-ideal"]


def fixture_text(name):
    return (resources.files("nabcoh") / "fixtures" / f"{name}.json").read_text(encoding="utf-8")


def doc_with(**changes):
    raw = json.loads(fixture_text("h2"))
    raw.update(changes)
    return json.dumps(raw, indent=2)


def test_parse_h2():
    doc = parse(fixture_text("h2"))
    assert [b[0] for b in doc.basis] == ["h0", "x", "y", "z"]


def test_duplicate_name_reported():
    raw = json.loads(fixture_text("h2"))
    raw["basis"][3]["name"] = "x"
    with pytest.raises(ParseError) as info:
        parse(json.dumps(raw))
    assert any("'x'" in e for e in info.value.errors)


def test_float_coefficient_rejected():
    raw = json.loads(fixture_text("h2"))
    raw["brackets"][0]["value"] = [["z", "0.5"]]
    with pytest.raises(ParseError) as info:
        parse(json.dumps(raw))
    assert any("1/2" in e and "brackets[0]" in e for e in info.value.errors)


def test_errors_are_collected_with_locations():
    raw = json.loads(fixture_text("h2"))
    raw["brackets"].append({"a": "x", "b": "q", "value": [["z", "1"]]})
    raw["grading_element"] = "nope"
    with pytest.raises(ParseError) as info:
        parse(json.dumps(raw))
    text = "\n".join(info.value.errors)
    assert "'q'" in text and "'nope'" in text
    with pytest.raises(ParseError, match="line 1"):
        parse("{")


@pytest.mark.parametrize("name", FIXTURES)
def test_round_trip(name):
    doc = parse(fixture_text(name))
    assert parse(serialize(doc)) == doc
    assert serialize(parse(serialize(doc))) == serialize(doc)


@pytest.mark.parametrize("case", sorted(CASES))
def test_golden_reports(case):
    text, code = run(CASES[case])
    assert text == (EXPECTED / f"{case}.txt").read_text(encoding="utf-8")
    assert code == (1 if case == "broken_ideal_validate" else 0)


def test_documented_outcomes():
    text, code = run(["tower", "fixtures/h2", "--max-stage", "2"])
    assert code == 0 and "empty from stage 2" in text
    text, code = run(["gm-check", "--d", "0", "--max-degree", "10"])
    assert code == 0 and "cocycle space dimension 0" in text
    text, code = run(["validate", "broken-ideal"])
    assert code == 1 and "kernel is an ideal: FAIL at (x, z)" in text


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    assert run(["validate", str(bad)])[1] == 1
    assert run(["sections", "broken-ideal"])[1] == 1
    assert run(["tower", "l1", "--max-stage", "3"])[1] == 2
    assert run(["cohomology", "h2", "--degree", "1", "--module", "nosuch"])[1] == 2
    assert run(["gm-check", "--d", "4", "--max-degree", "2"])[1] == 2


def test_main_writes_out_file_and_stderr(tmp_path, capsys):
    out = tmp_path / "r.txt"
    assert main(["sections", "l1", "--out", str(out)]) == 0
    assert out.read_text(encoding="utf-8") == run(["sections", "l1"])[0]
    assert capsys.readouterr().out == ""
    assert main(["tower", "l1", "--max-stage", "3"]) == 2
    assert capsys.readouterr().err.startswith("error: ")


def test_load_document_accepts_paths(tmp_path):
    p = tmp_path / "mine.json"
    p.write_text(doc_with(name="mine"), encoding="utf-8")
    assert load_document(str(p)).name == "mine"
    assert load_document("h2.json") == load_document("fixtures/h2")


def test_reports_are_deterministic_across_processes():
    argv = ["tower", "u2", "--algebra", "split"]
    outs = {subprocess.run([sys.executable, "-m", "nabcoh", *argv], capture_output=True, check=True).stdout
            for _ in range(3)}
    assert len(outs) == 1
    assert outs.pop().decode() == run(argv)[0]
