"""Batch command line: arguments, exit codes, report output, figures."""
from __future__ import annotations

import json

import pytest

from helpers import FIXTURES
from slistref import __version__
from slistref.cli import build_parser, main


def fixture_path(name):
    return str(FIXTURES / f"{name}.json")


def test_parser_defaults():
    args = build_parser().parse_args([fixture_path("alfa_d")])
    assert args.algo == "slist"
    assert args.max_slist_len == 5
    assert args.report == "text"
    assert args.tie_break == "salience"
    assert args.ambig_mode == "lenient"
    assert not args.trace
    assert args.figures is None


def test_usage_errors_exit_2(capsys):
    for argv in ([],
                 ["--algo", "magic", fixture_path("alfa_d")],
                 ["--max-slist-len", "0", fixture_path("alfa_d")],
                 ["--max-slist-len", "few", fixture_path("alfa_d")]):
        with pytest.raises(SystemExit) as err:
            build_parser().parse_args(argv)
        assert err.value.code == 2
    capsys.readouterr()


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as err:
        main(["--version"])
    assert err.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_text_report_run(capsys):
    code = main([fixture_path("alfa_d"), fixture_path("alfa_dprime")])
    out = capsys.readouterr().out
    assert code == 0
    assert "algorithm: slist    documents: 2" in out
    assert "alfa_d (constructed): 3/3 correct" in out
    assert "total                     7       7       0" in out


def test_missing_file_fails_but_others_still_run(capsys, tmp_path):
    missing = str(tmp_path / "nope.json")
    code = main([missing, fixture_path("alfa_d")])
    captured = capsys.readouterr()
    assert code == 1
    assert "nope.json" in captured.err
    assert "documents: 1" in captured.out


def test_invalid_document_reports_the_violation(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"tokens": "x"}', encoding="utf-8")
    code = main([str(bad)])
    captured = capsys.readouterr()
    assert code == 1
    assert "bad.json" in captured.err


def test_structured_report_parses(capsys):
    code = main(["--report", "structured", "--algo", "bfp",
                 fixture_path("deer")])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["version"] == __version__
    assert payload["config"]["algo"] == "bfp"
    assert payload["documents"][0]["id"] == "deer"
    assert payload["documents"][0]["trace"] == []  # no --trace
    assert payload["aggregate"]["total"]["total"] >= 1


def test_trace_flag_prints_engine_steps(capsys):
    main(["--trace", fixture_path("alfa_d")])
    out = capsys.readouterr().out
    assert "== alfa_d (slist) ==" in out
    assert "insert" in out
    main(["--trace", "--algo", "bfp-kameyama", fixture_path("curtis")])
    out = capsys.readouterr().out
    assert "U0:" in out and "transition=" in out


def test_figures_directory_gets_scores_and_chart(capsys, tmp_path):
    outdir = tmp_path / "figs"
    code = main(["--figures", str(outdir),
                 fixture_path("alfa_d"), fixture_path("curtis")])
    capsys.readouterr()
    assert code == 0
    tsv = (outdir / "scores.tsv").read_text(encoding="utf-8")
    assert tsv.splitlines()[0] == "algorithm\tscope\tname\tmetric\tcount"
    assert "\tdocument\tcurtis\t" in tsv
    png = (outdir / "scores.png").read_bytes()
    assert png[:8] == b"\x89PNG\r\n\x1a\n"


def test_view_length_changes_outcomes(capsys):
    main(["--report", "structured", "--max-slist-len", "1",
          fixture_path("curtis")])
    narrow = json.loads(capsys.readouterr().out)
    main(["--report", "structured", fixture_path("curtis")])
    full = json.loads(capsys.readouterr().out)
    narrow_correct = narrow["aggregate"]["total"]["correct"]
    full_correct = full["aggregate"]["total"]["correct"]
    assert narrow_correct < full_correct


def test_algorithms_disagree_where_designed(capsys):
    main(["--report", "structured", "--algo", "bfp", fixture_path("curtis")])
    bfp = json.loads(capsys.readouterr().out)
    main(["--report", "structured", "--algo", "bfp-kameyama",
          fixture_path("curtis")])
    kam = json.loads(capsys.readouterr().out)
    bfp_he = [a for a in bfp["documents"][0]["anaphors"]
              if a["id"] == "m_he_c"][0]
    kam_he = [a for a in kam["documents"][0]["anaphors"]
              if a["id"] == "m_he_c"][0]
    assert not bfp_he["correct"]
    assert kam_he["correct"] and kam_he["system"] == "smirga"
