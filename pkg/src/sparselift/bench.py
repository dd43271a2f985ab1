"""Benchmark harness: random systems, timed verified solves, CSV rows.

One system is generated per (size, trial) and shared by every
algorithm, so rows are directly comparable and solutions can be checked
for cross-agreement.  Failures become rows with success=False and the
harness moves on.
"""

import csv
import time
from dataclasses import dataclass

from .errors import SparseliftError
from .solvers import ALGORITHMS, derive_seed, solve_block_sparse
from .sparsemat import gen_random_rhs, gen_random_sparse

CSV_COLUMNS = [
    "algo", "n", "nnz_per_row", "block_size", "seed",
    "setup_s", "lift_s", "recon_s", "total_s",
    "matvecs", "retries", "success",
]

DEFAULT_SIZES = [400, 900, 1600]
FULL_SIZES = [400, 900, 1600, 2500, 3600]


@dataclass
class BenchRecord:
    algo: str
    n: int
    nnz_per_row: int
    block_size: int | None
    seed: int
    setup_s: float
    lift_s: float
    recon_s: float
    total_s: float
    matvecs: int
    retries: int
    success: bool

    def row(self):
        return [
            self.algo, self.n, self.nnz_per_row,
            "" if self.block_size is None else self.block_size,
            self.seed,
            f"{self.setup_s:.6f}", f"{self.lift_s:.6f}",
            f"{self.recon_s:.6f}", f"{self.total_s:.6f}",
            self.matvecs, self.retries, str(self.success).lower(),
        ]


def generate_system(n, nnz_per_row, bound, seed):
    """Deterministic (matrix, rhs) pair from named sub-streams."""
    nnz = min(nnz_per_row, n)
    a = gen_random_sparse(n, nnz, bound, derive_seed(seed, "matrix", n))
    b = gen_random_rhs(n, bound, derive_seed(seed, "rhs", n))
    return a, b


def _record_from_report(report, nnz_per_row, seed):
    t = report.timings
    return BenchRecord(
        algo=report.algorithm, n=report.n, nnz_per_row=nnz_per_row,
        block_size=report.block_size, seed=seed,
        setup_s=t.get("setup_s", 0.0), lift_s=t.get("lift_s", 0.0),
        recon_s=t.get("recon_s", 0.0), total_s=t.get("total_s", 0.0),
        matvecs=report.matvec_count, retries=report.retries, success=True,
    )


def _failure_record(algo, n, nnz_per_row, block_size, seed, elapsed):
    return BenchRecord(
        algo=algo, n=n, nnz_per_row=nnz_per_row, block_size=block_size,
        seed=seed, setup_s=0.0, lift_s=0.0, recon_s=0.0, total_s=elapsed,
        matvecs=0, retries=0, success=False,
    )


def run_bench(sizes, algos, nnz_per_row=10, bound=100, trials=1, seed=0,
              block_size="auto", prime_bits=None, keep_solutions=False,
              progress=None):
    """One verified solve per (size, algorithm, trial).

    Returns (records, solutions); solutions maps (n, trial, algo) to the
    RationalVector when keep_solutions is set.
    """
    records = []
    solutions = {}
    kwargs = {} if prime_bits is None else {"prime_bits": prime_bits}
    for n in sizes:
        for trial in range(trials):
            sys_seed = derive_seed(seed, "trial", trial)
            a, b = generate_system(n, nnz_per_row, bound, sys_seed)
            for algo in algos:
                solver = ALGORITHMS[algo]
                extra = dict(kwargs)
                if algo == "block":
                    extra["s"] = block_size
                start = time.perf_counter()
                try:
                    report = solver(a, b, seed=sys_seed, **extra)
                    rec = _record_from_report(report, nnz_per_row, sys_seed)
                    if keep_solutions:
                        solutions[(n, trial, algo)] = report.solution
                except SparseliftError:
                    rec = _failure_record(
                        algo, n, nnz_per_row,
                        None if algo != "block" else block_size,
                        sys_seed, time.perf_counter() - start,
                    )
                records.append(rec)
                if progress is not None:
                    progress(rec)
    return records, solutions


def run_sweep(n, block_sizes, nnz_per_row=10, bound=100, seed=0,
              prime_bits=None, progress=None):
    """solve_block_sparse on one fixed system for each blocking factor."""
    records = []
    kwargs = {} if prime_bits is None else {"prime_bits": prime_bits}
    sys_seed = derive_seed(seed, "trial", 0)
    a, b = generate_system(n, nnz_per_row, bound, sys_seed)
    for s in block_sizes:
        start = time.perf_counter()
        try:
            report = solve_block_sparse(a, b, s=s, seed=sys_seed, **kwargs)
            rec = _record_from_report(report, nnz_per_row, sys_seed)
        except SparseliftError:
            rec = _failure_record("block", n, nnz_per_row, s, sys_seed,
                                  time.perf_counter() - start)
        records.append(rec)
        if progress is not None:
            progress(rec)
    return records


def write_csv(records, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(rec.row())


def best_block_size(records):
    """Blocking factor with the smallest total time among successes."""
    ok = [r for r in records if r.success]
    if not ok:
        return None
    return min(ok, key=lambda r: r.total_s).block_size
