import json

import pytest
from hypothesis import given, strategies as st

from tiltfilt.corpora import BUNDLED, bundled_document, bundled_text
from tiltfilt.toolcli import (
    EXIT_AUDIT, EXIT_INPUT, EXIT_OK, EXIT_PRECONDITION, ParseError, Report, ValidationError, chain_diagram,
    dump_algfile, emit_report, main, parse_algfile, parse_document, run_command,
)


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr().out


def test_bundled_ex1_parses():
    af = parse_algfile(bundled_text("ex1"))
    assert len(af.quiver.vertices) == 3 and len(af.quiver.arrows) == 3
    assert len(af.relations) == 2
    assert all(len(p) == 2 for r in af.relations for _, p in r.terms)
    assert af.module("M").dims == (1, 1, 0)


def test_empty_module_list_is_valid():
    doc = bundled_document("ex2")
    doc["modules"], doc["morphisms"] = {}, {}
    af = parse_document(doc)
    rep = run_command("check", af)
    assert rep.exit_code == 0 and rep.context["pd_T"] == 2


def test_relation_violation_reported():
    doc = bundled_document("ex2")
    doc["modules"]["X"] = {"dims": [0, 1, 1, 1], "arrows": {"be": [["1"]], "ga": [["1"]]}}
    with pytest.raises(ValidationError, match="relation 0"):
        parse_document(doc)


@pytest.mark.parametrize("mutate, where", [
    (lambda d: d.update(extra=1), "unknown keys"),
    (lambda d: d.update(field="F4"), "not prime"),
    (lambda d: d["modules"]["S3"].update(dims=[0, 1]), "modules.S3.dims"),
    (lambda d: d["modules"]["I4"]["arrows"].update(ga=[["1", "2"]]), "modules.I4.arrows.ga"),
    (lambda d: d["modules"]["I4"]["arrows"].update(zz=[["1"]]), "unknown arrow"),
    (lambda d: d["morphisms"]["p"].update(source="nope"), "morphisms.p.source"),
    (lambda d: d["relations"][0][0].__setitem__(0, 1.5), "relations"),
])
def test_parse_errors_name_the_field(mutate, where):
    doc = bundled_document("ex2")
    mutate(doc)
    with pytest.raises(ParseError, match=where.replace(".", r"\.")):
        parse_document(doc)


def test_json_syntax_error_has_line():
    with pytest.raises(ParseError, match="line 2"):
        parse_algfile('{\n "field": }')


@pytest.mark.parametrize("name", sorted(BUNDLED))
def test_round_trip(name):
    af = parse_algfile(bundled_text(name))
    again = parse_algfile(dump_algfile(af))
    assert again == af
    assert dump_algfile(again) == dump_algfile(af)


@given(st.integers(-50, 50), st.integers(1, 50))
def test_rational_round_trip(num, den):
    doc = bundled_document("a2")
    doc["modules"]["P1"]["arrows"]["a"] = [[f"{num}/{den}"]]
    af = parse_document(doc)
    text = dump_algfile(af)
    assert dump_algfile(parse_algfile(text)) == text


def test_three_halves_survives_byte_identically():
    doc = bundled_document("a2")
    doc["modules"]["P1"]["arrows"]["a"] = [["3/2"]]
    t1 = dump_algfile(parse_document(doc))
    assert '"3/2"' in t1
    assert dump_algfile(parse_algfile(t1)) == t1


def test_prime_field_document():
    doc = bundled_document("ex1")
    doc["field"] = "F5"
    doc["modules"]["M"]["arrows"]["a"] = [["7"]]
    af = parse_document(doc)
    assert af.to_document()["modules"]["M"]["arrows"]["a"] == [["2"]]


def test_empty_report_skeleton():
    assert emit_report(Report()) == "{}"
    assert emit_report(Report(), "text") == ""


def test_filter_command_on_ex2(capsys):
    code, out = run(["filter", "--bundled", "ex2", "--module", "S3"], capsys)
    assert code == EXIT_OK
    res = json.loads(out)["results"]["S3"]
    assert res["canonical_dims"] == [[0, 0, 1, 0]]
    assert res["X1"]["dims"] == [0, 0, 1, 0]


def test_refined_chain_order(capsys):
    code, out = run(["filter", "--bundled", "ex1", "--module", "M", "--refined"], capsys)
    res = json.loads(out)["results"]["M"]
    assert res["chain"]["labels"] == ["Z_0", "Z_1", "Z_2", "Y_2", "Y_1", "Y_0"]
    assert res["chain"]["dims"][:2] == [[0, 0, 0], [0, 1, 0]]
    assert res["refined"]["d_trace"] == [2, 0, 0]


def test_classify_command(capsys):
    code, out = run(["classify", "--bundled", "ex2", "--module", "S4"], capsys)
    assert code == EXIT_OK
    flags = json.loads(out)["results"]["S4"]["flags"]
    assert flags["F2"] and flags["K2"] and flags["E2"] and not flags["E0"]


def test_jtable_command(capsys):
    code, out = run(["jtable", "--bundled", "ex2", "--module", "S3", "--format", "text"], capsys)
    assert code == EXIT_OK and "vanishing: yes" in out


def test_audit_command(capsys):
    code, out = run(["audit", "--bundled", "ex2", "--samples", "3"], capsys)
    assert code == EXIT_OK
    a = json.loads(out)["audits"]
    assert a["hom_vanishing"]["ok"] and a["functoriality"] == {"p": True}


def test_deterministic_json(capsys):
    _, a = run(["audit", "--bundled", "ex1", "--samples", "2", "--seed", "4"], capsys)
    _, b = run(["audit", "--bundled", "ex1", "--samples", "2", "--seed", "4"], capsys)
    assert a == b


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"field": "Q"}')
    assert run(["check", str(bad)], capsys)[0] == EXIT_INPUT
    assert run(["classify", "--bundled", "ex2", "--module", "nope"], capsys)[0] == EXIT_PRECONDITION
    doc = bundled_document("a2")
    doc["tilting"] = ["S1", "S2"]
    p = tmp_path / "notilt.json"
    p.write_text(json.dumps(doc))
    code, out = run(["check", str(p)], capsys)
    assert code == EXIT_PRECONDITION and "NotSelfOrthogonal" in out
    doc["tilting"] = ["S2"]
    p.write_text(json.dumps(doc))
    assert run(["check", str(p)], capsys)[0] == EXIT_PRECONDITION


def test_audit_violation_exit_code(monkeypatch, capsys):
    import tiltfilt.filtrate as ft
    monkeypatch.setattr(ft, "trace_crosscheck", lambda *a, **k: False)
    assert run(["filter", "--bundled", "ex2", "--module", "S3"], capsys)[0] == EXIT_AUDIT


def test_text_chain_diagram():
    lines = chain_diagram(["Z_0", "Y_0"], [[0, 0], [1, 1]])
    assert lines == ["Z_0 (0, 0)", "  <= Y_0 (1, 1)"]


def test_corpus_command(capsys):
    code, out = run(["corpus", "nak3"], capsys)
    assert code == 0 and json.loads(out)["name"] == "nak3"
