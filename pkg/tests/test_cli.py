from __future__ import annotations

import json
import subprocess
import sys

import jsonschema
import pytest

from eqcohom.cli import ProblemSpec, load_schema, main, parse_spec, render, run
from eqcohom.errors import ValidationError
from eqcohom.fixtures import battery, battery_files, case_document
from eqcohom.zmod import FgAbelianGroup

C2_Z2 = {"group": {"name": "C2"}, "module": {"orders": [2]}}
C2_Z = {"group": {"name": "C2"}, "module": {"orders": [0]}}
C3_INV = {
    "group": {"name": "C3"},
    "gamma": {"name": "C2"},
    "action": {"g": ["e", "g^2", "g"]},
    "module": {"orders": [3], "gamma": {"g": [[-1]]}},
}
BOCKSTEIN = {
    "group": {"name": "C2"},
    "module": {"orders": [4]},
    "ses": {"sub": {"orders": [2]}, "quotient": {"orders": [2]}, "alpha": [[2]], "beta": [[1]]},
}


@pytest.fixture
def write(tmp_path):
    def _write(doc, name="spec.json"):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return str(p)

    return _write


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -- parsing -------------------------------------------------------------------


def test_minimal_document():
    spec = parse_spec({"group": {"name": "C2"}})
    assert isinstance(spec, ProblemSpec)
    assert spec.action.gamma.order == 1
    assert spec.module.orders == (0,)


def test_missing_gamma_defaults_to_trivial():
    spec = parse_spec(C2_Z2)
    assert spec.action.gamma.order == 1 and spec.action.is_trivial()


def test_json_text_accepted():
    assert parse_spec(json.dumps(C3_INV)).action.gamma.order == 2


def test_group_by_permutations():
    spec = parse_spec({"group": {"permutations": ["(1 2 3)", "(1 2)"]}})
    assert spec.action.g.order == 6 and not spec.action.g.is_abelian()


def test_group_by_table():
    spec = parse_spec({"group": {"table": [[0, 1], [1, 0]], "names": ["e", "x"]}})
    assert list(spec.action.g.names) == ["e", "x"]


def test_non_automorphism_names_operator():
    doc = {"group": {"name": "C3"}, "gamma": {"name": "C2"}, "action": {"g": {"g": "e"}}}
    with pytest.raises(ValidationError) as info:
        parse_spec(doc)
    assert "g" in str(info.value) and info.value.path == "action"


def test_schema_violation_has_path():
    with pytest.raises(ValidationError) as info:
        parse_spec({"group": {"name": "C2"}, "module": {"orders": ["two"]}})
    assert info.value.path == "module.orders.0"
    with pytest.raises(ValidationError):
        parse_spec("{not json")
    with pytest.raises(ValidationError):
        parse_spec({"module": {"orders": [2]}})


def test_improper_sequence_is_reported():
    doc = {
        "group": {"name": "C2"},
        "gamma": {"name": "C2"},
        "module": {"orders": [4], "gamma": {"g": [[-1]]}},
        "ses": {"sub": {"orders": [2]}, "quotient": {"orders": [2]}, "alpha": [[2]], "beta": [[1]]},
    }
    spec = parse_spec(doc)
    assert isinstance(spec.ses, Exception)
    with pytest.raises(Exception, match="not proper"):
        run("les", spec)


# -- commands ------------------------------------------------------------------


def test_cohomology_command(write, capsys):
    code, out, _ = run_cli(capsys, "cohomology", "--max-degree", "2", write(C2_Z2))
    assert code == 0
    assert "H^0 = Z/2\nH^1 = Z/2\nH^2 = Z/2\n" in out
    assert out.rstrip().endswith("status: ok")


def test_homology_command(write, capsys):
    code, out, _ = run_cli(capsys, "homology", "--max-degree", "1", write(C2_Z))
    assert code == 0 and "H_1 = Z/2" in out and "H_0 = Z^1" in out


def test_tate_conventions(write, capsys):
    path = write(C2_Z)
    code, out, _ = run_cli(capsys, "tate", "--from", "-2", "--to", "2", "--convention", "paper", path)
    assert code == 0 and "convention: paper" in out
    assert "T^0 = 0\n" in out and "T^-1 = Z/2\n" in out
    code, out, _ = run_cli(capsys, "tate", "--convention", "classical", path)
    assert "T^0 = Z/2\n" in out and "T^-1 = 0\n" in out


@pytest.mark.parametrize("command", ["derivations", "cup", "abelianize", "gamma-series", "extensions"])
def test_other_commands_succeed(write, capsys, command):
    code, out, err = run_cli(capsys, command, "--max-degree", "2", write(C3_INV))
    assert code == 0, err
    assert out.startswith(f"# {command}")


def test_les_command(write, capsys):
    code, out, _ = run_cli(capsys, "les", "--max-degree", "2", write(BOCKSTEIN))
    assert code == 0 and "check cohomology_exact: pass" in out and "check tate_exact: pass" in out


def test_verify_on_trivial_group(write, capsys):
    code, out, _ = run_cli(capsys, "verify", write({"group": {"name": "1"}, "module": {"orders": [2]}}))
    assert code == 0 and "FAIL" not in out


def test_verify_with_operators(write, capsys):
    code, out, _ = run_cli(capsys, "verify", "--max-degree", "2", write(C3_INV))
    assert code == 0 and "FAIL" not in out


def test_render_formats():
    report = run("cohomology", parse_spec({**C2_Z, "options": {"max_degree": 1}}))
    assert "H^0 = Z^1" in render(report, "text")
    data = json.loads(render(report, "structured"))
    assert data["result"]["groups"] == {"0": "Z^1", "1": "0"}
    assert "timings" not in data
    assert "timings" in json.loads(render(report, "structured", timings=True))


def test_structured_output_matches_schema(write, capsys):
    schema = load_schema("output")
    for command in ("cohomology", "tate", "derivations", "abelianize", "verify"):
        code, out, _ = run_cli(capsys, command, "--format", "structured", "--max-degree", "2", write(C2_Z2))
        assert code == 0
        jsonschema.validate(json.loads(out), schema)


# -- exit codes and determinism ---------------------------------------------------


def test_exit_codes(write, capsys):
    bad = write({"group": {"name": "C3"}, "gamma": {"name": "C2"}, "action": {"g": {"g": "e"}}})
    code, _, err = run_cli(capsys, "cohomology", bad)
    assert code == 2 and "action" in err
    code, _, err = run_cli(capsys, "cohomology", "--cap", "3", write(C2_Z2))
    assert code == 3 and "cap" in err
    code, _, _ = run_cli(capsys, "cohomology", write({"group": {}}))
    assert code == 2
    code, _, _ = run_cli(capsys, "cohomology", "/nonexistent/spec.json")
    assert code == 2
    negated = {"group": {"name": "C2"}, "gamma": {"name": "C2"}, "module": {"orders": [0], "gamma": {"g": [[-1]]}}}
    code, _, err = run_cli(capsys, "tate", write(negated))
    assert code == 1 and "N_G(A)" in err


def test_output_is_byte_identical(write):
    path = write(C3_INV)
    outs = [
        subprocess.run([sys.executable, "-m", "eqcohom.cli", "verify", "--format", "structured", path],
                       capture_output=True, check=True).stdout
        for _ in range(2)
    ]
    assert outs[0] == outs[1]


def test_group_strings():
    assert str(FgAbelianGroup.parse("Z/2 + Z")) == "Z^1 + Z/2"
    assert str(FgAbelianGroup()) == "0"


# -- bundled battery ---------------------------------------------------------------


def test_battery_files_cover_battery():
    names = [f.name for f in battery_files()]
    assert names == [f"{c.id}.json" for c in battery()]


@pytest.mark.parametrize("case", battery(), ids=lambda c: c.id)
def test_battery_document_round_trip(case):
    spec = parse_spec(case_document(case))
    a, b = spec.action, case.action
    assert a.g.table == b.g.table and a.gamma.table == b.gamma.table
    assert a.phi == b.phi
    m, n = spec.module, case.module
    assert m.orders == n.orders
    assert [x.tolist() for x in m.g_act] == [x.tolist() for x in n.g_act]
    assert [x.tolist() for x in m.gamma_act] == [x.tolist() for x in n.gamma_act]


def test_bundled_files_match_generated():
    files = {f.name: json.loads(f.read_text()) for f in battery_files()}
    for case in battery():
        assert files[f"{case.id}.json"] == case_document(case)
