import csv
import json

import numpy as np
import pytest

from blockqp import GenSpec, assemble_kkt, generate, predict_nnz_dense_h, read_problem, simulate_pattern
from blockqp.bench import CSV_COLUMNS, BenchRow, format_blocks, load_config, parse_blocks, run_bench, write_csv
from blockqp.cli import main
from blockqp.factor import factorize_block_kkt
from blockqp.pattern import pattern_of


@pytest.mark.parametrize(
    "text, dims",
    [
        ("10x(50x10)", ((50, 10),) * 10),
        ("2×(6×2)", ((6, 2), (6, 2))),
        ("3x(4x1, 5x2,6x3)", ((4, 1), (5, 2), (6, 3))),
    ],
)
def test_parse_blocks(text, dims):
    assert parse_blocks(text) == dims


@pytest.mark.parametrize("text", ["10x50x10", "2x(4x1,5x2,6x3)", "0x(4x1)", "x(4x1)"])
def test_parse_blocks_rejects(text):
    with pytest.raises(ValueError):
        parse_blocks(text)


def test_format_round_trip():
    for dims in (((50, 10),) * 10, ((4, 1), (5, 2))):
        assert parse_blocks(format_blocks(dims)) == dims


def test_tiny_row_matches_oracle():
    row = BenchRow(12, ((6, 2), (6, 2)), 1.0, 3, 7)
    (rep,) = run_bench([row])
    assert rep.instance_count == 3 and not rep.errors
    assert rep.nnz_ours == rep.predicted_nnz == predict_nnz_dense_h(12, row.block_dims)
    K = assemble_kkt(generate(GenSpec(12, row.block_dims, 1.0, 7)))
    f = factorize_block_kkt(K, seed=7)
    assert simulate_pattern(pattern_of(K), f.pivot_log).nnz == rep.nnz_ours
    assert rep.nnz_ours <= rep.nnz_bbk
    assert rep.flops_ours <= rep.flops_bbk
    assert rep.fill_structured == 0
    assert rep.residual < 1e-12


def test_sparse_row_has_no_prediction():
    (rep,) = run_bench([BenchRow(30, ((15, 4), (15, 4)), 0.5, 2, 0)], baseline=False)
    assert rep.predicted_nnz is None and rep.nnz_bbk is None
    assert rep.instance_count == 2


def test_csv_is_reproducible(tmp_path):
    rows = [BenchRow(20, ((10, 3), (10, 2)), 1.0, 2, 5), BenchRow(20, ((10, 3), (10, 2)), 0.5, 2, 5)]
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        write_csv(run_bench(rows), path)
    tables = []
    for path in paths:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            assert tuple(reader.fieldnames) == CSV_COLUMNS
            tables.append([{k: v for k, v in r.items() if not k.startswith("time")} for r in reader])
    assert tables[0] == tables[1]
    assert tables[0][0]["block_spec"] == "2x(10x3,10x2)"
    assert tables[0][1]["predicted_nnz"] == ""


def test_load_config(tmp_path):
    cfg = {"instances": 2, "seed": 4, "baseline": False,
           "rows": [{"vars": 12, "blocks": "2x(6x2)"}, {"vars": 20, "blocks": "2x(10x3)", "density": 0.5, "seed": 9}]}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    rows, baseline = load_config(path)
    assert baseline is False
    assert [(r.n, r.instances, r.seed, r.density) for r in rows] == [(12, 2, 4, 1.0), (20, 2, 9, 0.5)]


def test_cli_predict(capsys):
    assert main(["predict-nnz", "--vars", "500", "--blocks", "10x(50x10)"]) == 0
    assert capsys.readouterr().out.strip() == "130250"


def test_cli_generate_factorize_solve(tmp_path, capsys):
    prob = tmp_path / "p.bqp"
    stats = tmp_path / "s.json"
    assert main(["generate", "--vars", "30", "--blocks", "3x(10x3)", "--seed", "2", "--out", str(prob)]) == 0
    assert read_problem(prob).n == 30
    assert main(["factorize", "--in", str(prob), "--strategy", "structured", "--stats-out", str(stats)]) == 0
    data = json.loads(stats.read_text())
    assert data["fill_in_structured_phase"] == 0
    assert data["nnz_L"] == data["predicted_nnz"] == predict_nnz_dense_h(30, ((10, 3),) * 3)
    assert main(["factorize", "--in", str(prob), "--strategy", "bbk"]) == 0
    capsys.readouterr()
    assert main(["solve", "--in", str(prob), "--print-solution"]) == 0
    out = capsys.readouterr().out
    assert "residual:" in out and "x[30] =" in out and "lambda[9] =" in out


def test_cli_bench_writes_csv(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["bench", "--vars", "12", "--blocks", "2x(6x2)", "--instances", "2", "--csv-out", str(out)]) == 0
    with open(out, newline="") as fh:
        (row,) = list(csv.DictReader(fh))
    assert row["nnz_ours"] == repr(float(predict_nnz_dense_h(12, ((6, 2), (6, 2)))))


@pytest.mark.parametrize(
    "argv",
    [
        ["bench", "--csv-out", "x.csv", "--bogus"],
        ["bench", "--csv-out", "x.csv"],
        ["predict-nnz", "--vars", "10", "--blocks", "nonsense"],
        ["predict-nnz", "--vars", "11", "--blocks", "1x(10x2)"],
        ["frobnicate"],
    ],
)
def test_cli_usage_errors(argv, capsys):
    assert main(argv) == 1
    assert capsys.readouterr().err.strip()


def test_cli_missing_file(tmp_path):
    assert main(["solve", "--in", str(tmp_path / "missing.bqp")]) == 1


def test_cli_numerical_failure_exit_code(tmp_path):
    from blockqp import BlockQp, write_problem

    p = BlockQp(4, ((4, 1),), np.eye(4), [np.zeros((1, 4))], np.zeros(4), np.ones(1))
    path = tmp_path / "deg.bqp"
    write_problem(p, path)
    assert main(["factorize", "--in", str(path)]) == 2
