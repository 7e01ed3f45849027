import json
from pathlib import Path

from pts_kernel.cli import main, run_program

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
GOLDEN = Path(__file__).resolve().parent / "golden"


def test_check_corpus_files_exit_zero(capsys):
    for path in sorted(CORPUS.glob("*.pts")):
        assert main(["check", str(path)]) == 0, capsys.readouterr().out


def test_check_reynolds_under_hol_fails(capsys):
    status = main(["check", str(CORPUS / "reynolds-a.pts"), "--system", "lambda-hol"])
    out = capsys.readouterr().out
    assert status == 1
    assert "NoRule" in out and "(##,#)" in out
    assert "def A" in out


def test_check_empty_file(tmp_path, capsys):
    empty = tmp_path / "empty.pts"
    empty.write_text("-- nothing here\n", encoding="utf-8")
    assert main(["check", str(empty)]) == 0
    assert capsys.readouterr().out.strip() == ""


def test_trace_simple_matches_golden_bytes(capsys):
    assert main(["trace", "simple", "bottomProof", "--steps", "4"]) == 0
    out = capsys.readouterr().out
    assert out == (GOLDEN / "simple-head-def.txt").read_text(encoding="utf-8")


def test_trace_refined_matches_golden_bytes(capsys):
    assert main(["trace", "refined-axiomatic", "bottomProof", "--steps", "5"]) == 0
    out = capsys.readouterr().out
    assert out == (GOLDEN / "refined-axiomatic-head-def.txt").read_text(encoding="utf-8")


def test_structured_trace_agrees_with_text(capsys):
    assert main(["trace", "simple", "bottomProof", "--steps", "4", "--format", "structured"]) == 0
    records = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    capsys.readouterr()
    assert main(["trace", "simple", "bottomProof", "--steps", "4"]) == 0
    text_rows = capsys.readouterr().out.splitlines()
    assert [r["display"] for r in records] == text_rows
    assert records[0]["event"] == "start"
    assert all("raw" in r for r in records)


def test_trace_unknown_term(capsys):
    assert main(["trace", "simple", "nonsense"]) == 1
    assert "unknown term" in capsys.readouterr().err


def test_trace_head_linear_runs(capsys):
    assert main(["trace", "simple", "bottomProof", "--strategy", "head-linear", "--steps", "6"]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[0] == "l₂ p₀ l₂ l₁"
    assert len(rows) >= 2


def test_loop_command_reports_cycle(capsys):
    assert main(["loop", "simple", "bottomProof", "--bound", "10"]) == 0
    out = capsys.readouterr().out
    assert "found=true" in out and "entry=0" in out and "period=2" in out


def test_loop_command_reports_absence(capsys):
    assert main(["loop", "refined-axiomatic", "bottomProof", "--bound", "100"]) == 0
    assert "found=false" in capsys.readouterr().out


def test_erase_command(capsys):
    assert main(["erase", "reynolds-A", "bottomProof", "--erase", "annotations"]) == 0
    out = capsys.readouterr().out.strip()
    assert out.startswith("l₀")


def test_list_corpus(capsys):
    assert main(["list-corpus"]) == 0
    out = capsys.readouterr().out
    for bid in ("simple", "refined-axiomatic", "reynolds-A", "hurkens-B-match1", "hurkens-B-match2"):
        assert bid in out
    assert "bottomProof" in out


def test_check_raw_flag(capsys):
    assert main(["check", str(CORPUS / "simple.pts"), "--raw"]) == 0
    out = capsys.readouterr().out
    assert "forall" in out  # unfolded displays spell the products out


def test_trace_file_target(tmp_path, capsys):
    src = (CORPUS / "simple.pts").read_text(encoding="utf-8")
    f = tmp_path / "dev.pts"
    f.write_text(src, encoding="utf-8")
    status = main(["trace", str(f), "x₀", "--steps", "1", "--format", "structured"])
    assert status == 0
    records = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert records[1]["event"] == "delta-unfold" and records[1]["detail"] == "x₀"
    assert records[1]["raw"] == "intro X₀"
    # Maximal refolding prints the unfolding back under its own name.
    assert records[1]["display"] == "x₀"


def test_run_program_stops_at_first_error():
    report = run_program("const A : #.\nconst A : #.\nconst B : #.")
    assert not report.ok
    assert report.failed_entry == "A"
    assert len([l for l in report.lines if not l.ok]) == 1


def test_parse_error_reports_position():
    report = run_program("const : #.")
    assert not report.ok
    assert "parse error" in report.render()
