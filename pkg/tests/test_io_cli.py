import io as stdio
import json
from fractions import Fraction as F

import pytest

from quantile_choice import io
from quantile_choice.cli import main
from quantile_choice.fixtures import FIXTURES, psd_counterexample


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out else None), out.err


def write(tmp_path, data, name="inst.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


VOTING_DOC = {
    "kind": "voting",
    "agents": ["v1", "v2", "v3"],
    "alternatives": ["a", "b"],
    "preferences": [["a", "b"], ["a", "b"], ["b", "a"]],
    "h": ["1/4", "1/2", "0"],
}


def test_fixture_parses_to_one_sided_instance():
    doc = io.loads(io.dumps(psd_counterexample()))
    assert doc.kind == io.ONE_SIDED
    assert doc.instance.h == (0, F(1, 3), F(1, 3))


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_round_trip(name):
    doc = FIXTURES[name]()
    again = io.loads(io.dumps(doc))
    assert again == doc
    assert io.to_dict(again) == io.to_dict(doc)


def test_parse_from_path_and_stream(tmp_path):
    path = write(tmp_path, VOTING_DOC)
    a = io.parse_instance(path)
    b = io.parse_instance(stdio.StringIO(json.dumps(VOTING_DOC)))
    assert a == b and a.instance.h == (F(1, 4), F(1, 2), 0)


@pytest.mark.parametrize(
    "change, path",
    [
        ({"agents": [], "preferences": [], "h": []}, "agents"),
        ({"h": ["1/4", "3/2", "0"]}, "h[1]"),
        ({"h": ["1/4", "half", "0"]}, "h[1]"),
        ({"h": ["1/4", "1/2"]}, "h"),
        ({"preferences": [["a", "b"], ["a", "a"], ["b", "a"]]}, "preferences[1]"),
        ({"preferences": [["a", "b"], ["a", "c"], ["b", "a"]]}, "preferences[1]"),
        ({"kind": "poll"}, "kind"),
    ],
)
def test_errors_name_the_field(change, path):
    with pytest.raises(io.InstanceError) as e:
        io.from_dict({**VOTING_DOC, **change})
    assert e.value.path.startswith(path)


def test_floats_are_rejected_as_quantiles():
    with pytest.raises(io.InstanceError):
        io.from_dict({**VOTING_DOC, "h": [0.25, "1/2", "0"]})


def test_parse_rational():
    assert io.parse_rational("2/3", "x") == F(2, 3)
    assert io.parse_rational("1", "x") == 1
    assert io.format_rational(F(4, 6)) == "2/3"
    with pytest.raises(io.InstanceError):
        io.parse_rational("1/0", "x")


def test_cli_psd_fixture(capsys):
    code, report, _ = run(capsys, "one-sided", "psd", "--fixture", "psd-counterexample")
    assert code == 0
    assert [r["representative"] for r in report["representatives"]] == ["a", "b", "c"]
    assert report["lottery"] == [["1", "0", "0"], ["0", "2/3", "1/3"], ["0", "1/3", "2/3"]]


def test_cli_uniform_rule(capsys, tmp_path):
    doc = {**VOTING_DOC, "alternatives": ["a", "b", "c"], "preferences": [["a", "b", "c"], ["c", "a", "b"], ["b", "c", "a"]]}
    code, report, _ = run(capsys, "vote", "uniform", "--input", write(tmp_path, doc))
    assert code == 0 and report["lottery"] == ["1/3", "1/3", "1/3"]


def test_cli_half_da_on_common_favourite(capsys):
    code, report, _ = run(capsys, "two-sided", "half-da", "--fixture", "common-favourite")
    assert code == 0
    assert report["lottery"] == [["1", "0"], ["0", "1"]]
    assert report["checks"]["stability"]["holds"]
    assert report["checks"]["dr-efficiency"]["holds"]
    eff = report["checks"]["efficiency"]
    assert not eff["holds"] and eff["detail"]["dominating_lottery"] == [["1/2", "1/2"], ["1/2", "1/2"]]


def test_cli_topchoice_rejects_certain_agents(capsys):
    code, _, err = run(capsys, "two-sided", "topchoice-bmatching", "--fixture", "common-favourite", "--h-override", "1")
    assert code == 2 and "error" in err


def test_cli_kind_mismatch(capsys):
    code, _, _ = run(capsys, "vote", "uniform", "--fixture", "psd-counterexample")
    assert code == 2


def test_cli_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "vote", "uniform", "--input", str(tmp_path / "nope.json"))
    assert code == 2 and err


def test_cli_bad_document(capsys, tmp_path):
    code, _, err = run(capsys, "vote", "uniform", "--input", write(tmp_path, {**VOTING_DOC, "h": ["3/2", "0", "0"]}))
    assert code == 2 and "h[0]" in err


def test_cli_rep_and_compare(capsys):
    code, report, _ = run(capsys, "rep", "--pref", "a", "b", "c", "--lottery", "a=1/3", "b=1/3", "c=1/3", "--h", "1/3")
    assert code == 0 and report["representative"] == "b"
    code, report, _ = run(capsys, "sd-compare", "--pref", "a", "b", "c", "--x", "a=1/3", "b=1/3", "c=1/3", "--y", "b=1")
    assert code == 0 and "ncomparable" in json.dumps(report)


def test_cli_check_exit_codes(capsys, tmp_path):
    lot = write(tmp_path, [["1/2", "1/2"], ["1/2", "1/2"]], "lot.json")
    code, report, _ = run(capsys, "check", "stability", "--fixture", "common-favourite", "--lottery", lot)
    assert code == 0
    swap = write(tmp_path, [["0", "1"], ["1", "0"]], "swap.json")
    code, report, _ = run(capsys, "check", "stability", "--fixture", "common-favourite", "--lottery", swap)
    assert code == 1


def test_cli_audits(capsys):
    code, report, _ = run(capsys, "audit", "sp", "--mechanism", "psd", "--fixture", "psd-counterexample")
    assert code == 1 and report["counterexample"]["agent"] == "3"
    assert report["counterexample"]["truthful_rank"] == 2 and report["counterexample"]["deviating_rank"] == 1
    code, report, _ = run(capsys, "audit", "sp", "--mechanism", "half-da", "--n", "2", "--h", "1/2")
    assert code == 0 and report["counterexample"] is None and report["profiles_checked"] == 16


def test_cli_audit_domain_guard(capsys):
    code, _, err = run(capsys, "audit", "sp", "--mechanism", "half-da", "--n", "3", "--h", "1/2", "--max-domain", "10")
    assert code == 2 and err


def test_cli_sd_equivalence_audit(capsys):
    code, report, _ = run(capsys, "audit", "sd-equivalence", "--trials", "200", "--seed", "3")
    assert code == 0


def test_reports_are_byte_identical(capsys, tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        assert main(["two-sided", "efficient-stable", "--fixture", "stable-support", "--output", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_fixtures_emit_parses(capsys):
    code, report, _ = run(capsys, "fixtures", "emit", "stable-support")
    assert code == 0 and io.from_dict(report).kind == io.TWO_SIDED
