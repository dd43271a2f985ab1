"""Structured block projections (R, u, v).

R is diagonal with nonzero entries.  v is n x s with column j carrying
one dense m x 1 block at row offset j*m; u is the mirrored s x n block
(row j dense on columns j*m .. (j+1)*m - 1).  Both have exactly n
nonzero entries, so every application costs a linear number of scalar
operations (tracked in `scalar_ops` for the instrumentation tests).

Whether the associated Krylov matrices are nonsingular for such sparse
blocks is exactly the open part of the construction; `verify_projection`
materializes them (small n only) and the solvers treat a singular
projected Hankel matrix as the retry signal instead.
"""

import random

import numpy as np

from .densemodp import DenseModMatrix, is_nonsingular_mod
from .errors import DimensionMismatch, InvalidBlocking, InvalidParams


class BlockProjection:
    __slots__ = ("n", "s", "m", "field", "r_diag", "u_blocks", "v_blocks", "scalar_ops")

    def __init__(self, n, s, field, r_diag, u_blocks, v_blocks):
        if n % s != 0:
            raise InvalidBlocking(f"s={s} does not divide n={n}")
        self.n = n
        self.s = s
        self.m = n // s
        self.field = field
        dtype = np.int64 if field.int64_ok else object
        self.r_diag = np.asarray(r_diag, dtype=dtype)
        self.u_blocks = np.asarray(u_blocks, dtype=dtype).reshape(s, self.m)
        self.v_blocks = np.asarray(v_blocks, dtype=dtype).reshape(s, self.m)
        for name, arr in (("r_diag", self.r_diag), ("u", self.u_blocks), ("v", self.v_blocks)):
            if (np.asarray(arr, dtype=object) % field.p == 0).any():
                raise InvalidParams(f"{name} must have no zero entries")
        self.scalar_ops = 0

    @property
    def p(self):
        return self.field.p

    def materialize_v(self):
        """Dense n x s copy of v (tests and Krylov checks)."""
        dtype = np.int64 if self.field.int64_ok else object
        v = np.zeros((self.n, self.s), dtype=dtype)
        for j in range(self.s):
            v[j * self.m:(j + 1) * self.m, j] = self.v_blocks[j]
        return v

    def materialize_u(self):
        dtype = np.int64 if self.field.int64_ok else object
        u = np.zeros((self.s, self.n), dtype=dtype)
        for j in range(self.s):
            u[j, j * self.m:(j + 1) * self.m] = self.u_blocks[j]
        return u

    def r_diag_int(self):
        """R's diagonal lifted to integers in [1, p-1]."""
        return [int(x) for x in self.r_diag]


def make_projection(n, s, field, seed):
    """Uniform nonzero entries for R, u, v; deterministic per seed."""
    if n < 1 or s < 1 or s > n:
        raise InvalidParams(f"bad dimensions n={n}, s={s}")
    if n % s != 0:
        raise InvalidBlocking(f"s={s} does not divide n={n}")
    rng = random.Random(seed)
    p = field.p

    def draw(k):
        return [rng.randrange(1, p) for _ in range(k)]

    return BlockProjection(n, s, field, draw(n), draw(n), draw(n))


def _reduced_sum(products, width, field, axis):
    """Sum over `axis` without int64 overflow (falls back to objects)."""
    if products.dtype != object and field.chunk(width) < width:
        products = products.astype(object)
    return products.sum(axis=axis) % field.p


def apply_R(proj, w):
    """Entrywise w[i] * r_diag[i] mod p."""
    if len(w) != proj.n:
        raise DimensionMismatch(f"vector length {len(w)} != {proj.n}")
    proj.scalar_ops += proj.n
    return (np.asarray(w) * proj.r_diag) % proj.p


def apply_R_int(proj, w):
    """Same scaling over the integers (diagonal lifted to [1, p-1])."""
    if len(w) != proj.n:
        raise DimensionMismatch(f"vector length {len(w)} != {proj.n}")
    proj.scalar_ops += proj.n
    r = proj.r_diag.astype(object)
    return np.asarray(w, dtype=object) * r


def apply_v(proj, x):
    """v @ x for an s-vector; touches each output row once."""
    if len(x) != proj.s:
        raise DimensionMismatch(f"vector length {len(x)} != s = {proj.s}")
    proj.scalar_ops += proj.n
    x = np.asarray(x) % proj.p
    return ((proj.v_blocks * x[:, None]) % proj.p).reshape(proj.n)


def apply_u(proj, w):
    """u @ w for an n-vector; one dot of length m per output entry."""
    if len(w) != proj.n:
        raise DimensionMismatch(f"vector length {len(w)} != {proj.n}")
    proj.scalar_ops += proj.n
    w = np.asarray(w) % proj.p
    chunks = w.reshape(proj.s, proj.m)
    return _reduced_sum(proj.u_blocks * chunks, proj.m, proj.field, axis=1)


def apply_v_transpose(proj, y):
    """v.T @ y for an n-vector."""
    if len(y) != proj.n:
        raise DimensionMismatch(f"vector length {len(y)} != {proj.n}")
    proj.scalar_ops += proj.n
    y = np.asarray(y) % proj.p
    chunks = y.reshape(proj.s, proj.m)
    return _reduced_sum(proj.v_blocks * chunks, proj.m, proj.field, axis=1)


def apply_u_transpose(proj, x):
    """u.T @ x for an s-vector."""
    if len(x) != proj.s:
        raise DimensionMismatch(f"vector length {len(x)} != s = {proj.s}")
    proj.scalar_ops += proj.n
    x = np.asarray(x) % proj.p
    return ((proj.u_blocks * x[:, None]) % proj.p).reshape(proj.n)


def apply_u_block(proj, w_block):
    """u @ W for an n x s block (used when building the Hankel blocks)."""
    w_block = np.asarray(w_block)
    if w_block.shape[0] != proj.n:
        raise DimensionMismatch("block height mismatch")
    proj.scalar_ops += proj.n * w_block.shape[1]
    chunks = (w_block % proj.p).reshape(proj.s, proj.m, -1)
    return _reduced_sum(proj.u_blocks[:, :, None] * chunks, proj.m, proj.field, axis=1)


VERIFY_CAP = 512


def verify_projection(b_p, proj, cap=VERIFY_CAP):
    """Materialize K(B, v) and K(B^T, u^T) and test both for
    nonsingularity mod p.  Quadratic memory; guarded by `cap`."""
    n, s, m = proj.n, proj.s, proj.m
    if b_p.n != n:
        raise DimensionMismatch("projection and matrix dimensions differ")
    if n > cap:
        raise InvalidParams(f"verification materializes {n}x{n}; cap is {cap}")
    for start, stepper in (
        (proj.materialize_v(), b_p.apply_block),
        (proj.materialize_u().T, b_p.apply_transpose_block),
    ):
        dtype = np.int64 if proj.field.int64_ok else object
        krylov = np.zeros((n, n), dtype=dtype)
        w = start
        for j in range(m):
            krylov[:, j * s:(j + 1) * s] = w
            if j + 1 < m:
                w = stepper(w)
        if not is_nonsingular_mod(DenseModMatrix(krylov, proj.field)):
            return False
    return True
