"""Command-line front end.

Subcommands: generate (random test system to files), solve (one system,
chosen algorithm, verified), bench (size grid x algorithms, CSV and
figure), sweep (blocking factors on one system, CSV and figure).

Exit codes for solve: 0 verified success, 1 singular matrix,
2 projection retry budget exhausted, 3 I/O or parse problems.
"""

import argparse
import sys
from pathlib import Path

from . import bench as bench_mod
from .errors import (
    InvalidParams,
    ProjectionFailure,
    Singular,
    SparseliftError,
)
from .solvers import (
    ALGORITHMS,
    DEFAULT_PRIME_BITS,
    derive_seed,
    solve_block_sparse,
)
from .sparsemat import (
    gen_random_rhs,
    gen_random_sparse,
    read_matrix_market,
    read_vector,
    write_matrix_market,
    write_vector,
)

ALGO_CHOICES = ["block", "dixon", "wiedemann-padic", "cra-wiedemann"]


def _int_list(text):
    return [int(part) for part in text.split(",") if part.strip()]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sparselift",
        description="Exact solver for sparse integer linear systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random sparse system")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--nnz-per-row", type=int, default=10)
    g.add_argument("--bound", type=int, default=100)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out-matrix", required=True)
    g.add_argument("--out-rhs", required=True)

    s = sub.add_parser("solve", help="solve one system exactly")
    s.add_argument("--matrix", required=True)
    s.add_argument("--rhs", required=True)
    s.add_argument("--algo", choices=ALGO_CHOICES, default="block")
    s.add_argument("--block-size", default="auto",
                   help="blocking factor for --algo block (integer or 'auto')")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--prime-bits", type=int, default=DEFAULT_PRIME_BITS)
    s.add_argument("--basis", choices=["m", "pm"], default="m",
                   help="approximant basis algorithm for the block solver")
    s.add_argument("--early-exit", action="store_true",
                   help="attempt reconstruction periodically before the bound")
    s.add_argument("--out", required=True, help="solution file (num/den lines)")

    b = sub.add_parser("bench", help="timed verified solves over a size grid")
    b.add_argument("--sizes", type=_int_list, default=None,
                   help="comma-separated dimensions (default 400,900,1600)")
    b.add_argument("--full", action="store_true",
                   help="extend the default grid to 2500 and 3600")
    b.add_argument("--algos", default=",".join(ALGO_CHOICES),
                   help="comma-separated algorithm names")
    b.add_argument("--nnz-per-row", type=int, default=10)
    b.add_argument("--bound", type=int, default=100)
    b.add_argument("--trials", type=int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--block-size", default="auto")
    b.add_argument("--prime-bits", type=int, default=DEFAULT_PRIME_BITS)
    b.add_argument("--csv", required=True)
    b.add_argument("--no-plot", action="store_true",
                   help="skip rendering the figure next to the CSV")

    w = sub.add_parser("sweep", help="blocking-factor study on one system")
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--block-sizes", type=_int_list, required=True)
    w.add_argument("--nnz-per-row", type=int, default=10)
    w.add_argument("--bound", type=int, default=100)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--prime-bits", type=int, default=DEFAULT_PRIME_BITS)
    w.add_argument("--csv", required=True)
    w.add_argument("--no-plot", action="store_true")
    return parser


def _cmd_generate(args):
    a = gen_random_sparse(args.n, min(args.nnz_per_row, args.n), args.bound,
                          derive_seed(args.seed, "matrix", args.n))
    b = gen_random_rhs(args.n, args.bound, derive_seed(args.seed, "rhs", args.n))
    write_matrix_market(a, args.out_matrix)
    write_vector(b, args.out_rhs)
    print(f"wrote {args.out_matrix} ({a.n}x{a.n}, {a.nnz} nonzeros) and {args.out_rhs}")
    return 0


def _cmd_solve(args):
    try:
        a = read_matrix_market(args.matrix)
        b = read_vector(args.rhs)
    except (OSError, ValueError, InvalidParams) as exc:
        print(f"error reading input: {exc}", file=sys.stderr)
        return 3
    kwargs = dict(seed=args.seed, prime_bits=args.prime_bits)
    if args.algo == "block":
        size = args.block_size if args.block_size == "auto" else int(args.block_size)
        report = solve_block_sparse(a, b, s=size, basis_algorithm=args.basis,
                                    early_exit=args.early_exit, **kwargs)
    else:
        report = ALGORITHMS[args.algo](a, b, **kwargs)
    den = report.solution.denominator
    with open(args.out, "w", encoding="utf-8") as fh:
        for num in report.solution.numerators:
            fh.write(f"{num}/{den}\n")
    t = report.timings
    print(
        f"algo={report.algorithm} n={report.n} prime={report.prime} "
        f"steps={report.lifting_steps} matvecs={report.matvec_count} "
        f"retries={report.retries} "
        f"setup={t.get('setup_s', 0):.3f}s lift={t.get('lift_s', 0):.3f}s "
        f"recon={t.get('recon_s', 0):.3f}s total={t.get('total_s', 0):.3f}s "
        f"verified=true"
    )
    print(f"solution written to {args.out}")
    return 0


def _print_record(rec):
    print(
        f"  {rec.algo:>16} n={rec.n:<6} s={rec.block_size or '-':<5} "
        f"total={rec.total_s:8.3f}s matvecs={rec.matvecs:<10} "
        f"success={str(rec.success).lower()}"
    )


def _cmd_bench(args):
    sizes = args.sizes
    if sizes is None:
        sizes = bench_mod.FULL_SIZES if args.full else bench_mod.DEFAULT_SIZES
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    unknown = [a for a in algos if a not in ALGORITHMS]
    if unknown:
        print(f"unknown algorithms: {unknown}", file=sys.stderr)
        return 3
    records, _ = bench_mod.run_bench(
        sizes, algos, nnz_per_row=args.nnz_per_row, bound=args.bound,
        trials=args.trials, seed=args.seed, block_size=args.block_size,
        prime_bits=args.prime_bits, progress=_print_record,
    )
    bench_mod.write_csv(records, args.csv)
    print(f"wrote {args.csv} ({len(records)} rows)")
    if not args.no_plot:
        from .plotting import render_bench_figure
        fig_path = str(Path(args.csv).with_suffix(".png"))
        render_bench_figure(records, fig_path)
        print(f"wrote {fig_path}")
    return 0


def _cmd_sweep(args):
    records = bench_mod.run_sweep(
        args.n, args.block_sizes, nnz_per_row=args.nnz_per_row,
        bound=args.bound, seed=args.seed, prime_bits=args.prime_bits,
        progress=_print_record,
    )
    bench_mod.write_csv(records, args.csv)
    print(f"wrote {args.csv} ({len(records)} rows)")
    best = bench_mod.best_block_size(records)
    if best is not None:
        print(f"fastest blocking factor: {best}")
    if not args.no_plot:
        from .plotting import render_sweep_figure
        fig_path = str(Path(args.csv).with_suffix(".png"))
        render_sweep_figure(records, fig_path)
        print(f"wrote {fig_path}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "solve": _cmd_solve,
    "bench": _cmd_bench,
    "sweep": _cmd_sweep,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ProjectionFailure as exc:
        print(f"projection failure: {exc}", file=sys.stderr)
        return 2
    except Singular as exc:
        print(f"singular matrix: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    except SparseliftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
