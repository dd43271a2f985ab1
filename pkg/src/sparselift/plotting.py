"""Figure rendering for bench and sweep reports.

Figures are written next to the CSV they illustrate; the CSV stays the
primary artifact.  Only successful rows are plotted.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_ALGO_STYLE = {
    "block": dict(color="tab:blue", marker="o"),
    "dixon": dict(color="tab:orange", marker="s"),
    "wiedemann-padic": dict(color="tab:green", marker="^"),
    "cra-wiedemann": dict(color="tab:red", marker="d"),
}


def render_bench_figure(records, path):
    """Total solve time against dimension, one line per algorithm."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    algos = sorted({r.algo for r in records})
    for algo in algos:
        pts = sorted(
            (r.n, r.total_s) for r in records if r.algo == algo and r.success
        )
        if not pts:
            continue
        xs, ys = zip(*pts)
        style = _ALGO_STYLE.get(algo, {})
        ax.plot(xs, ys, label=algo, **style)
    ax.set_xlabel("matrix dimension n")
    ax.set_ylabel("total time (s)")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_sweep_figure(records, path):
    """Time and matvec count against blocking factor (twin axes)."""
    ok = sorted((r for r in records if r.success), key=lambda r: r.block_size)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax2 = ax.twinx()
    if ok:
        xs = [r.block_size for r in ok]
        ax.plot(xs, [r.total_s for r in ok], color="tab:blue", marker="o",
                label="total time")
        ax2.plot(xs, [r.matvecs for r in ok], color="tab:gray", marker="x",
                 linestyle="--", label="matvecs")
    ax.set_xlabel("blocking factor s")
    ax.set_ylabel("total time (s)", color="tab:blue")
    ax2.set_ylabel("sparse matvecs", color="tab:gray")
    ax.grid(True, alpha=0.3)
    lines, labels = ax.get_legend_handles_labels()
    lines2, labels2 = ax2.get_legend_handles_labels()
    ax.legend(lines + lines2, labels + labels2, loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
