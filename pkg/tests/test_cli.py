import io
import json

import pytest

from anisotope.cli import EXIT_BREACH, EXIT_OK, EXIT_PARSE, EXIT_UNDETERMINED, run


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 1
    out = json.loads(lines[0])
    assert out["schema"] == "1"
    return code, out


def test_decide_anisotropic():
    code, out = call("decide", "--field", "Q", "1", "1", "-7")
    assert code == EXIT_OK
    assert out["verdict"] == "anisotropic" and out["place"] == "7"


def test_decide_f3_witness():
    code, out = call("decide", "--field", "F3(t)", "1", "1", "1", "1", "1")
    assert code == EXIT_OK and out["witness"] == ["1", "1", "1", "0", "0"]


def test_decide_matrix():
    code, out = call("decide", "--matrix", "0,1;1,0")
    assert code == EXIT_OK and out["verdict"] == "isotropic"


def test_hilbert():
    assert call("hilbert", "-1", "-1", "2")[1]["symbol"] == -1
    assert call("hilbert", "-1", "-1", "inf")[1]["symbol"] == -1
    assert call("hilbert", "--field", "F3(t)", "t", "2", "t")[1]["symbol"] == -1


def test_check_roundtrip(tmp_path):
    _, out = call("decide", "1", "1", "-7")
    code, res = call("check", "1", "1", "-7", "--certificate", json.dumps(out))
    assert code == EXIT_OK and res["valid"]
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(out["certificate"]))
    code, res = call("check", "1", "1", "-3", "--certificate", f"@{path}")
    assert code == EXIT_OK and not res["valid"]


def test_emit_and_eval():
    code, out = call("emit", "--kind", "isotropy", "1", "-1", "--flatten")
    assert code == EXIT_OK and out["existential_positive"] and out["and_constant"] == "2"
    code, res = call("eval", "--formula", out["formula"], "--witness", "x1=1,x2=1,y=1")
    assert code == EXIT_OK and res["value"] is True
    code, res = call("eval", "--formula", out["flat"], "--witness", "x1=1,x2=2,y=1")
    assert code == EXIT_OK and res["value"] is False


def test_emit_anisotropy_quaternary():
    code, out = call("emit", "--kind", "anisotropy", "1", "1", "1", "-7")
    assert code == EXIT_OK and out["existential_positive"]


@pytest.mark.parametrize(
    "argv",
    [
        ("decide", "1", "x"),
        ("decide",),
        ("hilbert", "1", "2"),
        ("hilbert", "1", "2", "4"),
        ("decide", "--field", "F4(t)", "1", "1"),
        ("eval", "--formula", "(and"),
        ("eval", "--formula", '(eq "x")', "--witness", "x"),
        ("check", "1", "1", "--certificate", "{not json"),
        ("check", "1", "1", "--certificate", "@/nonexistent/cert.json"),
        ("emit", "--kind", "cubic", "1"),
    ],
)
def test_parse_errors(argv):
    code, out = call(*argv)
    assert code == EXIT_PARSE and out["error"] == "parse"


def test_degenerate_form_is_isotropic():
    code, out = call("decide", "1", "0")
    assert code == EXIT_OK and out["verdict"] == "isotropic" and out["certificate"]["kind"] == "degenerate"


def test_unknown_command_exits_2():
    assert run(["frobnicate"], io.StringIO()) == EXIT_PARSE


def test_undetermined_exit_code(monkeypatch):
    from anisotope import qform
    from anisotope.cft import Undetermined

    def exhausted(*args, **kwargs):
        raise Undetermined("undetermined at bound")

    monkeypatch.setattr(qform, "decide", exhausted)
    code, out = call("decide", "1", "1")
    assert code == EXIT_UNDETERMINED and out["error"] == "undetermined"


def test_opposition_undetermined_beyond_bound():
    from anisotope import cft
    from anisotope.field import Q

    consts = cft.load_constants(Q)[0]
    with pytest.raises(cft.Undetermined):
        cft.eval_opposition(1, 1, -1, -10007, consts, 10)


def test_constants_verify():
    code, out = call("constants", "--field", "F3(t)", "--bound", "30")
    assert code == EXIT_OK and out["ok"] and not out["failures"]


def test_constants_bad_fixture(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"field": "F3(t)", "a": "2", "b": "t", "c": "1", "d": "2", "modulus": "t^2*inf"}))
    code, out = call("constants", "--field", "F3(t)", "--constants", str(bad))
    assert code == EXIT_PARSE


def test_constants_breach(monkeypatch):
    from anisotope import cft

    monkeypatch.setattr(cft, "verify_constants", lambda consts, bound: ({}, ["bullet(-1,-1) at 7"]))
    code, out = call("constants", "--bound", "10")
    assert code == EXIT_BREACH and out["error"] == "invariant breach"


def test_selftest_subset():
    code, out = call("selftest", "--scale", "0.02", "--only", "2")
    assert code == EXIT_OK and out["passed"]
