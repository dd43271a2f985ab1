import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparselift.arith import PrimeField
from sparselift.errors import DimensionMismatch, InvalidParams
from sparselift.oracle import oracle_solve
from sparselift.sparsemat import (
    SparseIntMatrix,
    SparseModMatrix,
    gen_random_sparse,
    norm_inf,
    norm_inf_vec,
    read_matrix_market,
    read_vector,
    reduce_mod,
    write_matrix_market,
    write_vector,
)

from conftest import dense_matvec


def from_dense(rows):
    return SparseIntMatrix.from_dense(rows)


class TestApply:
    def test_identity(self):
        a = from_dense(np.eye(3, dtype=int))
        assert list(a.apply([1, 2, 3])) == [1, 2, 3]

    def test_diagonal(self):
        a = from_dense([[2, 0], [0, 3]])
        assert list(a.apply([5, 7])) == [10, 21]

    def test_dense_oracle(self):
        a = from_dense([[1, 2], [3, 4]])
        assert list(a.apply([1, 1])) == list(dense_matvec([[1, 2], [3, 4]], [1, 1]))

    def test_dimension_mismatch(self):
        a = from_dense([[1, 2], [3, 4]])
        with pytest.raises(DimensionMismatch):
            a.apply([1, 2, 3])

    def test_big_values_exact(self):
        big = 10 ** 30
        a = from_dense([[big, 1], [0, big]])
        out = a.apply([big, big])
        assert list(out) == [big * big + big, big * big]

    @given(st.integers(min_value=1, max_value=8), st.randoms(use_true_random=False))
    @settings(max_examples=40, deadline=None)
    def test_random_vs_dense(self, n, rng):
        dense = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            dense[i][i] = dense[i][i] or 1
        a = from_dense(dense)
        w = [rng.randint(-99, 99) for _ in range(n)]
        assert list(a.apply(w)) == list(dense_matvec(dense, w))
        assert list(a.apply_transpose(w)) == list(
            dense_matvec(np.array(dense, dtype=object).T, w)
        )


class TestApplyTranspose:
    def test_identity(self):
        a = from_dense(np.eye(3, dtype=int))
        assert list(a.apply_transpose([1, 2, 3])) == [1, 2, 3]

    def test_oracle_small(self):
        a = from_dense([[1, 2], [3, 4]])
        assert list(a.apply_transpose([1, 0])) == [1, 2]

    def test_nilpotent(self):
        a = from_dense([[0, 1], [0, 0]])
        assert list(a.apply_transpose([1, 1])) == [0, 1]


class TestReduceMod:
    def test_all_entries_vanish(self, f7):
        a = from_dense([[7, 0], [0, 14]])
        m = reduce_mod(a, f7)
        assert m.nnz == 0
        assert list(m.apply([1, 2])) == [0, 0]

    def test_negative_representative(self):
        a = from_dense([[-1]])
        m = reduce_mod(a, PrimeField(5))
        assert list(m.apply([1])) == [4]

    def test_entrywise(self, f7):
        a = from_dense([[10, 3], [0, 12]])
        m = reduce_mod(a, f7)
        assert m.to_dense().tolist() == [[3, 3], [0, 5]]

    def test_apply_commutes_with_reduction(self, f7):
        rng = random.Random(5)
        a = gen_random_sparse(10, 3, 100, seed=11)
        m = reduce_mod(a, f7)
        w = [rng.randint(-50, 50) for _ in range(10)]
        lhs = [int(x) % 7 for x in a.apply(w)]
        rhs = list(m.apply([x % 7 for x in w]))
        assert lhs == rhs

    def test_big_prime_path(self, f_big):
        a = gen_random_sparse(8, 3, 1000, seed=2)
        m = reduce_mod(a, f_big)
        w = list(range(1, 9))
        assert [int(x) % f_big.p for x in a.apply(w)] == [int(x) for x in m.apply(w)]


class TestMatvecCounter:
    def test_one_per_apply(self):
        a = from_dense([[1, 2], [3, 4]])
        assert a.matvecs.count == 0
        a.apply([1, 1])
        assert a.matvecs.count == 1
        a.apply_transpose([1, 1])
        assert a.matvecs.count == 2

    def test_shared_with_reduction(self, f7):
        a = from_dense([[1, 2], [3, 4]])
        m = reduce_mod(a, f7)
        m.apply([1, 1])
        a.apply([1, 1])
        assert a.matvecs.count == 2

    def test_block_counts_columns(self, f7):
        a = reduce_mod(from_dense([[1, 2], [3, 4]]), f7)
        a.apply_block(np.ones((2, 5), dtype=np.int64))
        assert a.matvecs.count == 5


class TestGenerator:
    def test_full_diagonal_and_size(self):
        a = gen_random_sparse(400, 10, 100, seed=3)
        dense_diag = [
            any(a.col_idx[k] == i for k in range(a.row_ptr[i], a.row_ptr[i + 1]))
            for i in range(400)
        ]
        assert all(dense_diag)
        assert a.nnz >= 400
        assert norm_inf(a) <= 100

    def test_smallest(self):
        a = gen_random_sparse(1, 1, 1, seed=9)
        val = int(a.values[0])
        assert a.n == 1 and val in (-1, 1)

    @pytest.mark.parametrize("seed", range(8))
    def test_nonsingular_small(self, seed):
        n = 8 * (seed % 3 + 1)
        a = gen_random_sparse(n, min(5, n), 50, seed=seed)
        b = [1] * n
        oracle_solve(a.to_dense(), b)  # raises Singular on failure

    def test_deterministic(self):
        a = gen_random_sparse(30, 4, 10, seed=42)
        b = gen_random_sparse(30, 4, 10, seed=42)
        assert a.to_dense().tolist() == b.to_dense().tolist()

    def test_invalid_params(self):
        with pytest.raises(InvalidParams):
            gen_random_sparse(4, 5, 10, seed=0)
        with pytest.raises(InvalidParams):
            gen_random_sparse(0, 1, 10, seed=0)


class TestNorms:
    def test_definition(self):
        assert norm_inf(from_dense([[-5, 0], [0, 3]])) == 5
        assert norm_inf(from_dense([[10, -12], [3, 4]])) == 12

    def test_zero_matrix(self):
        a = SparseIntMatrix(2, [0, 0, 0], [], [])
        assert norm_inf(a) == 0

    def test_vector(self):
        assert norm_inf_vec([3, -7, 2]) == 7
        assert norm_inf_vec([]) == 0


class TestMatrixMarketIO:
    def test_roundtrip(self, tmp_path):
        a = gen_random_sparse(20, 4, 99, seed=17)
        path = tmp_path / "a.mtx"
        write_matrix_market(a, path)
        b = read_matrix_market(path)
        assert a.to_dense().tolist() == b.to_dense().tolist()

    def test_reader_accepts_unsorted(self, tmp_path):
        path = tmp_path / "m.mtx"
        path.write_text(
            "%%MatrixMarket matrix coordinate integer general\n"
            "2 2 3\n2 2 4\n1 1 1\n1 2 -2\n"
        )
        a = read_matrix_market(path)
        assert a.to_dense().tolist() == [[1, -2], [0, 4]]

    def test_reader_rejects_bad_header(self, tmp_path):
        path = tmp_path / "m.mtx"
        path.write_text("%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 1.5\n")
        with pytest.raises(InvalidParams):
            read_matrix_market(path)

    def test_reader_rejects_duplicates(self, tmp_path):
        path = tmp_path / "m.mtx"
        path.write_text(
            "%%MatrixMarket matrix coordinate integer general\n"
            "2 2 2\n1 1 1\n1 1 2\n"
        )
        with pytest.raises(InvalidParams):
            read_matrix_market(path)

    def test_vector_roundtrip(self, tmp_path):
        path = tmp_path / "v.txt"
        write_vector([1, -2, 30], path)
        assert read_vector(path) == [1, -2, 30]

    def test_writer_sorted(self, tmp_path):
        a = gen_random_sparse(10, 3, 9, seed=1)
        path = tmp_path / "s.mtx"
        write_matrix_market(a, path)
        lines = path.read_text().splitlines()[2:]
        coords = [tuple(map(int, ln.split()[:2])) for ln in lines]
        assert coords == sorted(coords)


class TestStructureValidation:
    def test_rejects_unsorted_columns(self):
        with pytest.raises(InvalidParams):
            SparseIntMatrix(2, [0, 2, 2], [1, 0], [1, 2])

    def test_rejects_stored_zero(self):
        with pytest.raises(InvalidParams):
            SparseIntMatrix(1, [0, 1], [0], [0])

    def test_mod_matrix_rejects_zero(self, f7):
        with pytest.raises(InvalidParams):
            SparseModMatrix(1, [0, 1], [0], [7], f7)

    def test_pad_identity(self):
        a = from_dense([[2, 1], [1, 1]])
        b = a.pad_identity(4)
        assert b.to_dense().tolist() == [
            [2, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]
        ]
        assert norm_inf(b) == norm_inf(a)

    def test_scale_columns(self):
        a = from_dense([[1, 2], [3, 4]])
        b = a.scale_columns([2, 3])
        assert b.to_dense().tolist() == [[2, 6], [6, 12]]
        with pytest.raises(InvalidParams):
            a.scale_columns([0, 1])
