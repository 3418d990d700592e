"""Command-line contract: exit codes plus byte-stable stdout.

Each case names a golden file under ``tests/golden``.  Run with
``UNTYPING_REGEN=1`` to rewrite them after an intended output change.
"""

import os
from pathlib import Path

import pytest

from untyping.bench import CSV_HEADER, read_csv
from untyping.cli import main

HERE = Path(__file__).parent
ENV = str(HERE / "data" / "env_nm.txt")
VAL = str(HERE / "data" / "val_x.txt")

CASES = [
    ("prove_axiom", ["prove", "~x, x"], 0),
    ("prove_axiom_proof", ["prove", "--proof", "~x, x"], 0),
    ("prove_no_prune_top", ["prove", "--no-prune", "~x * top, ~y, top * x"], 0),
    ("prove_prune_top", ["prove", "~x * top, ~y, top * x"], 2),
    ("prove_mll_rejects_plus", ["prove", "--logic", "mll", "x + ~x"], 2),
    ("prove_unprovable", ["prove", "x * y"], 1),
    ("prove_budget", ["prove", "--budget", "1", "x1 * x2, ~x1 | ~x2"], 3),
    ("prove_typed", ["prove", "--env", ENV, "--proof", "~y | ~x, x * y"], 0),
    ("prove_parse_error", ["prove", "x *"], 2),
    ("infer_square", ["infer", "~x, x"], 0),
    ("infer_non_square", ["infer", "~x, y"], 1),
    ("infer_empty", ["infer", ""], 0),
    ("infer_inconsistent", ["infer", "--env", ENV, "x, x"], 1),
    ("ka_equal", ["ka", "eq", "1 + x.x*", "x*"], 0),
    ("ka_not_equal", ["ka", "eq", "x.y", "y.x"], 1),
    ("ka_ill_typed", ["ka", "eq", "--env", ENV, "--at", "n", "m", "x*", "x*"], 2),
    ("ka_typed_not_equal", ["ka", "eq", "--env", ENV, "--at", "n", "m", "x.y.x", "x"], 1),
    ("ka_typed_equal", ["ka", "eq", "--env", ENV, "--at", "n", "m", "x.(y.x)*", "(x.y)*.x"], 0),
    ("ka_at_without_env", ["ka", "eq", "--at", "n", "m", "x", "x"], 2),
    ("model_search_empty", ["model", "search", "--max-size", "2", "--allow-empty", r"S.(top \ R) <= top.R"], 1),
    ("model_search_nonempty", ["model", "search", "--max-size", "2", r"S.(top \ R) <= top.R"], 0),
    ("model_check", ["model", "check", "--val", VAL, "x <= x"], 0),
    ("model_check_fails", ["model", "check", "--val", VAL, "x <= 1"], 1),
    ("bench_zero_leaves", ["bench", "--leaves", "0", "--vars", "2", "--count", "1", "--seed", "1", "--out", os.devnull], 2),
    ("no_command", [], 2),
]


@pytest.mark.parametrize("name,argv,code", CASES, ids=[c[0] for c in CASES])
def test_golden(name, argv, code, capsys):
    assert main(argv) == code
    out = capsys.readouterr().out
    golden = HERE / "golden" / f"{name}.txt"
    if os.environ.get("UNTYPING_REGEN"):
        golden.write_text(out, encoding="utf-8")
    assert out == golden.read_text(encoding="utf-8")


def test_verdicts_never_use_the_error_code(capsys):
    for argv in (["prove", "x, ~x"], ["prove", "x, x"], ["infer", "x"], ["ka", "eq", "x", "y"]):
        assert main(argv) in (0, 1)
    assert capsys.readouterr().err == ""


def test_diagnostics_go_to_stderr(capsys):
    assert main(["prove", "x |"]) == 2
    captured = capsys.readouterr()
    assert captured.out == "" and "parse error" in captured.err


def test_missing_env_file(capsys, tmp_path):
    assert main(["infer", "--env", str(tmp_path / "nope.txt"), "x"]) == 2
    assert "error" in capsys.readouterr().err


def test_bench_writes_csv(tmp_path, capsys):
    out, dist = tmp_path / "r.csv", tmp_path / "d.csv"
    argv = ["bench", "--leaves", "8", "--vars", "3", "--count", "12", "--seed", "7", "--out", str(out), "--summary", str(dist)]
    assert main(argv) == 0
    text = capsys.readouterr().out
    assert "rejection rate: " in text and "verdict mismatches: 0" in text
    with out.open(encoding="utf-8") as fh:
        recs = read_csv(fh)
    assert len(recs) == 12 and [r.index for r in recs] == list(range(12))
    assert out.read_text(encoding="utf-8").splitlines()[0].replace('"', "") == ",".join(CSV_HEADER)
    assert dist.read_text(encoding="utf-8").startswith("bucket_s,")
