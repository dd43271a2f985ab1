import random
from fractions import Fraction

import numpy as np
import pytest

from sparselift import solvers
from sparselift.arith import PrimeField, RationalVector, random_prime
from sparselift.errors import (
    DimensionMismatch,
    InvalidParams,
    Singular,
)
from sparselift.oracle import oracle_solve
from sparselift.solvers import (
    derive_seed,
    lifting_steps_bound,
    solve_block_sparse,
    solve_cra_wiedemann,
    solve_dixon_dense,
    solve_wiedemann_padic,
    verify_solution,
)
from sparselift.sparsemat import SparseIntMatrix, gen_random_sparse

ALL_SOLVERS = [
    ("block", lambda a, b, **kw: solve_block_sparse(a, b, s="auto", **kw)),
    ("dixon", solve_dixon_dense),
    ("wiedemann-padic", solve_wiedemann_padic),
    ("cra-wiedemann", solve_cra_wiedemann),
]


def identity(n):
    return SparseIntMatrix.from_dense(np.eye(n, dtype=int))


class TestLiftingStepsBound:
    def test_direct_formula_n4(self):
        # 2 * ceil(log_5 4 + log_5 4) = 2 * ceil(log_5 16) = 2 * 2
        assert lifting_steps_bound(4, 1, 1, PrimeField(5)) == 4

    def test_direct_formula_n2(self):
        assert lifting_steps_bound(2, 1, 1, PrimeField(5)) == 1
        assert lifting_steps_bound(2, 1, 1, PrimeField(7)) == 1
        # smaller p needs one more digit: log_3 4 > 1
        assert lifting_steps_bound(2, 1, 1, PrimeField(3)) == 2

    def test_monotone_in_p(self):
        fields = [PrimeField(p) for p in (5, 101, 10007, 1048583)]
        values = [lifting_steps_bound(50, 100, 100, f) for f in fields]
        assert values == sorted(values, reverse=True)

    def test_zero_norms_clamped(self):
        assert lifting_steps_bound(4, 0, 0, PrimeField(5)) >= 0

    def test_odd_n_rounds_up(self):
        f = PrimeField(5)
        # c = ceil(log_5 (3 * 3)) = 2, so 3 * 2 / 2 = 3 exactly
        assert lifting_steps_bound(3, 1, 1, f) == 3


class TestVerifySolution:
    def test_identity(self):
        a = identity(3)
        x = RationalVector([1, 2, 3], 1)
        assert verify_solution(a, [1, 2, 3], x)

    def test_fraction(self):
        a = SparseIntMatrix.from_dense([[2]])
        assert verify_solution(a, [1], RationalVector([1], 2))

    def test_perturbed_fails(self):
        a = identity(2)
        assert not verify_solution(a, [1, 1], RationalVector([1, 2], 1))

    def test_does_not_count_matvecs(self):
        a = identity(2)
        before = a.matvecs.count
        verify_solution(a, [1, 1], RationalVector([1, 1], 1))
        assert a.matvecs.count == before


@pytest.mark.parametrize("name,solver", ALL_SOLVERS)
class TestSolversCommon:
    def test_identity_system(self, name, solver):
        a = identity(4)
        b = [3, -1, 4, 1]
        rep = solver(a, b, seed=1)
        assert rep.solution == RationalVector([3, -1, 4, 1], 1)

    def test_diagonal_fractions(self, name, solver):
        a = SparseIntMatrix.from_dense([[2, 0], [0, 3]])
        rep = solver(a, [1, 1], seed=1)
        assert rep.solution.entries() == [Fraction(1, 2), Fraction(1, 3)]

    def test_oracle_agreement(self, name, solver):
        a = gen_random_sparse(20, 5, 100, seed=33)
        rng = random.Random(34)
        b = [rng.randint(-100, 100) for _ in range(20)]
        rep = solver(a, b, seed=2)
        assert rep.solution == oracle_solve(a.to_dense(), b)

    def test_singular_raises(self, name, solver):
        a = SparseIntMatrix.from_dense([[1, 1], [1, 1]])
        with pytest.raises(Singular):
            solver(a, [1, 2], seed=3)

    def test_dimension_mismatch(self, name, solver):
        a = identity(3)
        with pytest.raises(DimensionMismatch):
            solver(a, [1, 2], seed=0)


class TestCrossAgreement:
    def test_hand_example(self):
        a = SparseIntMatrix.from_dense([[2, 1], [1, 1]])
        b = [3, 2]
        sols = [solver(a, b, seed=5).solution for _, solver in ALL_SOLVERS]
        assert all(s == RationalVector([1, 1], 1) for s in sols)

    def test_random_batch(self):
        rng = random.Random(35)
        for k in range(4):
            n = rng.choice([9, 14, 25])
            a = gen_random_sparse(n, min(6, n), 50, seed=100 + k)
            b = [rng.randint(-50, 50) for _ in range(n)]
            expect = oracle_solve(a.to_dense(), b)
            for name, solver in ALL_SOLVERS:
                rep = solver(a, b, seed=k)
                assert rep.solution == expect, f"{name} diverged at n={n}"


class TestBlockSolverSpecifics:
    def test_block_sizes_and_padding(self):
        a = gen_random_sparse(10, 4, 40, seed=40)
        rng = random.Random(41)
        b = [rng.randint(-40, 40) for _ in range(10)]
        expect = oracle_solve(a.to_dense(), b)
        for s in (1, 2, 3, 5, "auto"):   # 3 forces padding to 12
            rep = solve_block_sparse(a, b, s=s, seed=42)
            assert rep.solution == expect

    def test_invalid_block_size(self):
        a = identity(4)
        with pytest.raises(InvalidParams):
            solve_block_sparse(a, [1] * 4, s=9)

    def test_matvec_budget_formula_no_retries(self):
        a = gen_random_sparse(36, 6, 50, seed=43)
        rng = random.Random(44)
        b = [rng.randint(-50, 50) for _ in range(36)]
        rep = solve_block_sparse(a, b, s=6, seed=45)
        assert rep.retries == 0
        m = 36 // 6
        ell = rep.lifting_steps
        assert rep.setup_matvecs == (2 * m - 1) * 6
        assert rep.lift_matvecs == (ell + 1) * (2 * (m - 1) + 1)
        assert rep.matvec_count == rep.setup_matvecs + rep.lift_matvecs

    def test_early_exit_matches(self):
        a = gen_random_sparse(16, 4, 9, seed=46)
        rng = random.Random(47)
        b = [rng.randint(-5, 5) for _ in range(16)]
        plain = solve_block_sparse(a, b, s=4, seed=48)
        early = solve_block_sparse(a, b, s=4, seed=48, early_exit=True)
        assert plain.solution == early.solution

    def test_pm_basis_backend(self):
        a = gen_random_sparse(24, 5, 30, seed=49)
        rng = random.Random(50)
        b = [rng.randint(-30, 30) for _ in range(24)]
        rep_m = solve_block_sparse(a, b, s=2, seed=51, basis_algorithm="m")
        rep_pm = solve_block_sparse(a, b, s=2, seed=51, basis_algorithm="pm")
        assert rep_m.solution == rep_pm.solution

    def test_unlucky_prime_retries(self):
        q = random_prime(20, derive_seed(7, "prime", 0)).p
        a = SparseIntMatrix.from_dense([[q, 0], [0, q]])
        rep = solve_block_sparse(a, [1, 1], s=1, seed=7, prime_bits=20)
        assert rep.retries >= 1
        assert rep.solution.entries() == [Fraction(1, q), Fraction(1, q)]
        assert rep.prime != q

    def test_debug_lifting_checks(self, monkeypatch):
        monkeypatch.setattr(solvers, "DEBUG_LIFTING", True)
        a = gen_random_sparse(12, 4, 20, seed=52)
        rng = random.Random(53)
        b = [rng.randint(-20, 20) for _ in range(12)]
        rep = solve_block_sparse(a, b, s=3, seed=54)
        assert verify_solution(a, b, rep.solution)


class TestDixonSpecifics:
    def test_unlucky_prime_retries(self):
        q = random_prime(20, derive_seed(9, "prime", 0)).p
        a = SparseIntMatrix.from_dense([[q]])
        rep = solve_dixon_dense(a, [1], seed=9, prime_bits=20)
        assert rep.retries == 1
        assert rep.solution.entries() == [Fraction(1, q)]

    def test_lift_matvec_count(self):
        a = gen_random_sparse(15, 4, 30, seed=55)
        rng = random.Random(56)
        b = [rng.randint(-30, 30) for _ in range(15)]
        rep = solve_dixon_dense(a, b, seed=57)
        # one sparse residual product per digit
        assert rep.lift_matvecs == rep.lifting_steps + 1


class TestWiedemannSpecifics:
    def test_big_rhs_entries(self):
        a = gen_random_sparse(8, 3, 10, seed=58)
        b = [10 ** 30 + k for k in range(8)]
        rep = solve_wiedemann_padic(a, b, seed=59)
        assert verify_solution(a, b, rep.solution)

    def test_cra_prime_count_positive(self):
        a = gen_random_sparse(10, 3, 20, seed=60)
        rng = random.Random(61)
        b = [rng.randint(-20, 20) for _ in range(10)]
        rep = solve_cra_wiedemann(a, b, seed=62)
        assert rep.lifting_steps >= 2      # number of primes combined
        assert verify_solution(a, b, rep.solution)


class TestBerlekampMassey:
    def test_fibonacci_mod_p(self):
        f = PrimeField(10007)
        seq = [1, 1]
        for _ in range(18):
            seq.append((seq[-1] + seq[-2]) % f.p)
        conn, deg = solvers._berlekamp_massey(seq, f)
        assert deg == 2
        # recurrence s_i = s_{i-1} + s_{i-2}: connection 1 - z - z^2
        assert [int(c) % f.p for c in conn] == [1, f.p - 1, f.p - 1]

    def test_geometric(self):
        f = PrimeField(101)
        seq = [pow(3, i, 101) for i in range(10)]
        conn, deg = solvers._berlekamp_massey(seq, f)
        assert deg == 1
        assert [int(c) for c in conn] == [1, 101 - 3]

    def test_recurrence_holds(self):
        f = PrimeField(10007)
        rng = random.Random(63)
        seq = [rng.randrange(f.p) for _ in range(6)]
        for _ in range(24):
            seq.append((3 * seq[-1] + 5 * seq[-3] + seq[-6]) % f.p)
        conn, deg = solvers._berlekamp_massey(seq, f)
        assert deg <= 6
        for i in range(deg, len(seq)):
            acc = sum(int(conn[j]) * seq[i - j] for j in range(deg + 1)) % f.p
            assert acc == 0
