import csv
from fractions import Fraction

import pytest

from sparselift.cli import main
from sparselift.oracle import oracle_solve
from sparselift.sparsemat import read_matrix_market, read_vector


def read_solution(path):
    out = []
    for line in path.read_text().splitlines():
        num, den = line.split("/")
        out.append(Fraction(int(num), int(den)))
    return out


def write_identity_system(tmp_path, n, b):
    mtx = tmp_path / "a.mtx"
    rhs = tmp_path / "b.txt"
    lines = [f"{i + 1} {i + 1} 1" for i in range(n)]
    mtx.write_text(
        "%%MatrixMarket matrix coordinate integer general\n"
        f"{n} {n} {n}\n" + "\n".join(lines) + "\n"
    )
    rhs.write_text("\n".join(str(x) for x in b) + "\n")
    return mtx, rhs


class TestGenerate:
    def test_files_written_and_roundtrip(self, tmp_path):
        mtx = tmp_path / "gen.mtx"
        rhs = tmp_path / "gen_rhs.txt"
        code = main([
            "generate", "--n", "50", "--nnz-per-row", "6", "--bound", "40",
            "--seed", "11", "--out-matrix", str(mtx), "--out-rhs", str(rhs),
        ])
        assert code == 0
        a = read_matrix_market(mtx)
        b = read_vector(rhs)
        assert a.n == 50 and len(b) == 50
        assert all(abs(x) <= 40 for x in b)
        diag = [
            any(a.col_idx[k] == i for k in range(a.row_ptr[i], a.row_ptr[i + 1]))
            for i in range(50)
        ]
        assert all(diag)

    def test_tiny(self, tmp_path):
        mtx = tmp_path / "one.mtx"
        rhs = tmp_path / "one.txt"
        assert main([
            "generate", "--n", "1", "--nnz-per-row", "1", "--bound", "1",
            "--seed", "0", "--out-matrix", str(mtx), "--out-rhs", str(rhs),
        ]) == 0
        assert read_matrix_market(mtx).n == 1


class TestSolve:
    def test_identity_system(self, tmp_path):
        mtx, rhs = write_identity_system(tmp_path, 4, [3, -1, 4, 1])
        out = tmp_path / "x.txt"
        code = main(["solve", "--matrix", str(mtx), "--rhs", str(rhs),
                     "--algo", "block", "--out", str(out)])
        assert code == 0
        assert read_solution(out) == [Fraction(3), Fraction(-1), Fraction(4), Fraction(1)]

    @pytest.mark.parametrize("algo", ["block", "dixon", "wiedemann-padic", "cra-wiedemann"])
    def test_generated_system_all_algos(self, tmp_path, algo):
        mtx = tmp_path / "a.mtx"
        rhs = tmp_path / "b.txt"
        main(["generate", "--n", "24", "--nnz-per-row", "5", "--bound", "30",
              "--seed", "3", "--out-matrix", str(mtx), "--out-rhs", str(rhs)])
        out = tmp_path / f"x_{algo}.txt"
        code = main(["solve", "--matrix", str(mtx), "--rhs", str(rhs),
                     "--algo", algo, "--out", str(out), "--seed", "5"])
        assert code == 0
        a = read_matrix_market(mtx)
        b = read_vector(rhs)
        assert read_solution(out) == oracle_solve(a.to_dense(), b).entries()

    def test_explicit_block_size(self, tmp_path):
        mtx, rhs = write_identity_system(tmp_path, 6, [1, 2, 3, 4, 5, 6])
        out = tmp_path / "x.txt"
        assert main(["solve", "--matrix", str(mtx), "--rhs", str(rhs),
                     "--algo", "block", "--block-size", "2",
                     "--out", str(out)]) == 0

    def test_singular_exit_code(self, tmp_path):
        mtx = tmp_path / "s.mtx"
        rhs = tmp_path / "b.txt"
        mtx.write_text(
            "%%MatrixMarket matrix coordinate integer general\n"
            "2 2 4\n1 1 1\n1 2 1\n2 1 1\n2 2 1\n"
        )
        rhs.write_text("1\n2\n")
        code = main(["solve", "--matrix", str(mtx), "--rhs", str(rhs),
                     "--algo", "dixon", "--out", str(tmp_path / "x.txt")])
        assert code == 1

    def test_parse_error_exit_code(self, tmp_path):
        mtx = tmp_path / "bad.mtx"
        mtx.write_text("not a matrix market file\n")
        rhs = tmp_path / "b.txt"
        rhs.write_text("1\n")
        code = main(["solve", "--matrix", str(mtx), "--rhs", str(rhs),
                     "--algo", "dixon", "--out", str(tmp_path / "x.txt")])
        assert code == 3

    def test_missing_file_exit_code(self, tmp_path):
        code = main(["solve", "--matrix", str(tmp_path / "nope.mtx"),
                     "--rhs", str(tmp_path / "nope.txt"),
                     "--algo", "dixon", "--out", str(tmp_path / "x.txt")])
        assert code == 3

    def test_unknown_algo_usage_error(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["solve", "--matrix", "a", "--rhs", "b", "--algo", "magic",
                  "--out", "c"])


class TestBench:
    def test_small_grid(self, tmp_path):
        out = tmp_path / "bench.csv"
        code = main([
            "bench", "--sizes", "8,12", "--algos", "block,dixon",
            "--nnz-per-row", "4", "--bound", "20", "--trials", "1",
            "--seed", "2", "--csv", str(out),
        ])
        assert code == 0
        rows = list(csv.DictReader(out.open()))
        assert len(rows) == 4
        assert all(r["success"] == "true" for r in rows)
        assert {r["algo"] for r in rows} == {"block", "dixon"}
        assert out.with_suffix(".png").exists()

    def test_deterministic_modulo_timings(self, tmp_path):
        args = ["bench", "--sizes", "10", "--algos", "block",
                "--nnz-per-row", "3", "--bound", "9", "--seed", "7",
                "--no-plot"]
        a_csv = tmp_path / "a.csv"
        b_csv = tmp_path / "b.csv"
        assert main(args + ["--csv", str(a_csv)]) == 0
        assert main(args + ["--csv", str(b_csv)]) == 0
        strip = lambda rows: [
            {k: v for k, v in r.items() if not k.endswith("_s")} for r in rows
        ]
        assert strip(list(csv.DictReader(a_csv.open()))) == strip(
            list(csv.DictReader(b_csv.open()))
        )

    def test_header_only_for_empty_sizes(self, tmp_path):
        out = tmp_path / "empty.csv"
        code = main(["bench", "--sizes", "", "--algos", "block",
                     "--csv", str(out), "--no-plot"])
        assert code == 0
        content = out.read_text().strip().splitlines()
        assert len(content) == 1
        assert content[0].split(",")[:3] == ["algo", "n", "nnz_per_row"]

    def test_unknown_algo(self, tmp_path):
        assert main(["bench", "--sizes", "8", "--algos", "nope",
                     "--csv", str(tmp_path / "x.csv")]) == 3


class TestSweep:
    def test_factors(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main([
            "sweep", "--n", "16", "--block-sizes", "1,2,4",
            "--nnz-per-row", "4", "--bound", "15", "--seed", "3",
            "--csv", str(out),
        ])
        assert code == 0
        rows = list(csv.DictReader(out.open()))
        assert [r["block_size"] for r in rows] == ["1", "2", "4"]
        assert all(r["success"] == "true" for r in rows)
        assert out.with_suffix(".png").exists()

    def test_factor_above_n_recorded_as_failure(self, tmp_path):
        out = tmp_path / "sweep2.csv"
        code = main([
            "sweep", "--n", "8", "--block-sizes", "2,9",
            "--nnz-per-row", "3", "--bound", "9", "--csv", str(out),
            "--no-plot",
        ])
        assert code == 0
        rows = list(csv.DictReader(out.open()))
        assert rows[0]["success"] == "true"
        assert rows[1]["success"] == "false"

    def test_single_factor(self, tmp_path):
        out = tmp_path / "sweep3.csv"
        assert main(["sweep", "--n", "9", "--block-sizes", "3",
                     "--csv", str(out), "--no-plot",
                     "--nnz-per-row", "3", "--bound", "9"]) == 0
        rows = list(csv.DictReader(out.open()))
        assert len(rows) == 1
