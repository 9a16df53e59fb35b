import json

import pytest

from polyfib.cli import main
from polyfib.poly import polynomial

ONE_PLUS_X2 = polynomial(1, 1, [0, 0], [1, 1], [0, 0])


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_eval(tmp_path, capsys):
    P = write(tmp_path, "p.json", ONE_PLUS_X2.to_json())
    X = write(tmp_path, "x.json", {"proj": {"dom": 3, "cod": 1, "table": [0, 0, 0]}})
    assert main(["eval", P, X, "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["fiber_sizes"] == [10]


def test_eval_identity_polynomial(tmp_path, capsys):
    P = write(tmp_path, "p.json", polynomial(2, 2, [0, 1], [0, 1], [0, 1]).to_json())
    X = write(tmp_path, "x.json", {"proj": {"dom": 3, "cod": 2, "table": [1, 0, 1]}})
    assert main(["eval", P, X, "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["fiber_sizes"] == [1, 2]


def test_eval_input_errors(tmp_path):
    P = write(tmp_path, "p.json", ONE_PLUS_X2.to_json())
    X = write(tmp_path, "x.json", {"proj": {"dom": 1, "cod": 2, "table": [1]}})
    assert main(["eval", P, X]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["eval", P, str(bad)]) == 2
    assert main(["eval", P, str(tmp_path / "missing.json")]) == 2


def test_laws(capsys):
    assert main(["laws", "--bound", "1", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "pass"
    assert main(["laws", "--bound", "0"]) == 0
    assert main(["laws", "--bound", "1", "--inject-fault"]) == 1


def test_extract(tmp_path, capsys):
    P = polynomial(2, 1, [0, 1, 1], [0, 0, 1], [0, 0])
    spec = write(tmp_path, "box.json", {"family": "polynomial", "polynomial": P.to_json()})
    assert main(["extract", spec, "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["verdict"] == "pass" and out["polynomial"]["E"]["size"] == 3
    ident = write(tmp_path, "id.json", {"family": "identity", "I": 2})
    assert main(["extract", ident]) == 0


def test_extract_failures(tmp_path, capsys):
    spec = write(tmp_path, "box.json", {"family": "broken-nonlocal", "I": 1})
    assert main(["extract", spec, "--json", "--size-bound", "5"]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["verdict"] == "exhausted" and out["witness"]
    unknown = write(tmp_path, "u.json", {"family": "nope"})
    assert main(["extract", unknown]) == 2
    missing = write(tmp_path, "m.json", {"family": "polynomial"})
    assert main(["extract", missing]) == 2


def test_examples(capsys):
    assert main(["examples", "weber", "--bound", "2", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["witness"]["subdivided_vertex_map"] == [0, 0]
    assert main(["examples", "gset", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["strength"]["regular"]["conclusion"] == "no strength component at X = 1"
    with pytest.raises(SystemExit) as exc:
        main(["examples", "nope"])
    assert exc.value.code == 2


def test_negative_bound_is_input_error():
    assert main(["laws", "--bound", "-1"]) == 2
