"""Brute-force reference implementations used only by tests.

Deliberately independent of the solver stack: fraction-free elimination
over the integers for exact solving, and direct materialization of
Krylov matrices for rank checks.  Performance does not matter here,
correctness and independence do.
"""

from fractions import Fraction

import numpy as np

from .arith import RationalVector
from .errors import InvalidParams, Singular

ORACLE_SOLVE_CAP = 256
ORACLE_KRYLOV_CAP = 512


def oracle_solve(a, b):
    """Exact solution of A x = b by fraction-free (division-exact)
    Gaussian elimination on the augmented matrix, followed by exact
    back-substitution over Q.  Raises Singular on rank deficiency."""
    a = np.asarray(a, dtype=object)
    n = a.shape[0]
    if a.shape != (n, n):
        raise InvalidParams("matrix must be square")
    if len(b) != n:
        raise InvalidParams("rhs length mismatch")
    if n > ORACLE_SOLVE_CAP:
        raise InvalidParams(f"oracle capped at n = {ORACLE_SOLVE_CAP}")
    m = np.concatenate([a, np.asarray(b, dtype=object).reshape(-1, 1)], axis=1)
    prev_pivot = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if int(m[r, c]) != 0), None)
        if piv is None:
            raise Singular(f"rank deficiency at column {c}")
        if piv != c:
            m[[c, piv]] = m[[piv, c]]
        pivot = m[c, c]
        lower = m[c + 1:]
        if lower.size:
            # Bareiss update: every division below is exact
            updated = (lower * pivot - np.outer(lower[:, c], m[c])) // prev_pivot
            m[c + 1:] = updated
        prev_pivot = pivot
    x = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        acc = Fraction(int(m[r, n]))
        for c in range(r + 1, n):
            acc -= int(m[r, c]) * x[c]
        x[r] = acc / int(m[r, r])
    return RationalVector.from_fractions(x)


def oracle_krylov(b_mod, v_block, m):
    """Materialized K(B, v) = [v | Bv | ... | B^{m-1} v] mod p."""
    n = b_mod.n
    if n > ORACLE_KRYLOV_CAP:
        raise InvalidParams(f"oracle capped at n = {ORACLE_KRYLOV_CAP}")
    v_block = np.asarray(v_block)
    s = v_block.shape[1]
    if m * s != n:
        raise InvalidParams("need m * s = n")
    out = np.zeros((n, n), dtype=v_block.dtype)
    w = v_block % b_mod.p
    for j in range(m):
        out[:, j * s:(j + 1) * s] = w
        if j + 1 < m:
            w = b_mod.apply_block(w)
    return out
