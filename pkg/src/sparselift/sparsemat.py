"""Sparse square integer matrices in CSR form.

Two flavours share the layout: exact integer matrices (values are
Python ints, with a cached int64 view when safe) and mod-p matrices
(values reduced into [0, p)).  Matrix-vector products dispatch to
vectorized int64 kernels whenever the worst-case accumulator fits in
63 bits, and to exact object-dtype kernels otherwise, so results are
always exact.

Every product through `apply`/`apply_transpose` bumps the matrix's
matvec counter by one (block products bump it by the number of
columns); solvers use the counters to audit their operation budgets.
"""

import random

import numpy as np

from .arith import PrimeField
from .errors import DimensionMismatch, InvalidParams

_INT64_MAX = np.iinfo(np.int64).max
_ACC_LIMIT = 1 << 62


class MatvecCounter:
    """Mutable tally of matrix-vector products, shared between a matrix
    and its mod-p reduction so one solve has one budget."""

    __slots__ = ("count",)

    def __init__(self):
        self.count = 0

    def add(self, k=1):
        self.count += k


def _to_value_array(values):
    arr = np.empty(len(values), dtype=object)
    arr[:] = [int(v) for v in values]
    return arr


class _CSRBase:
    def _init_structure(self, n, row_ptr, col_idx):
        self.n = int(n)
        self.row_ptr = np.asarray(row_ptr, dtype=np.int64)
        self.col_idx = np.asarray(col_idx, dtype=np.int64)
        if self.row_ptr.shape != (self.n + 1,):
            raise InvalidParams("row_ptr must have length n+1")
        counts = np.diff(self.row_ptr)
        if (counts < 0).any() or self.row_ptr[-1] != len(self.col_idx):
            raise InvalidParams("inconsistent CSR structure")
        for i in range(self.n):
            cols = self.col_idx[self.row_ptr[i]:self.row_ptr[i + 1]]
            if len(cols) and ((np.diff(cols) <= 0).any() or cols[0] < 0 or cols[-1] >= self.n):
                raise InvalidParams(f"row {i}: columns must be strictly increasing in [0, n)")
        self.nnz = int(self.row_ptr[-1])
        self.max_row_nnz = int(counts.max()) if self.n else 0
        self._has_empty_rows = bool((counts == 0).any())
        self._empty_mask = counts == 0 if self._has_empty_rows else None
        self._reduce_idx = self.row_ptr[:-1]
        self.matvecs = MatvecCounter()
        self._transpose = None

    # --- structural helpers -------------------------------------------------

    def _row_sums(self, products):
        """Per-row sums of an nnz-long product array (empty rows give 0)."""
        if self.nnz == 0:
            return np.zeros(self.n, dtype=products.dtype)
        if not self._has_empty_rows:
            return np.add.reduceat(products, self._reduce_idx)
        ext = np.concatenate([products, np.zeros(1, dtype=products.dtype)])
        out = np.add.reduceat(ext, self._reduce_idx)
        out[self._empty_mask] = 0
        return out

    def to_dense(self):
        out = np.zeros((self.n, self.n), dtype=object)
        for i in range(self.n):
            for k in range(self.row_ptr[i], self.row_ptr[i + 1]):
                out[i, self.col_idx[k]] = int(self.values[k])
        return out

    def transpose(self):
        if self._transpose is None:
            self._transpose = self._build_transpose()
        return self._transpose

    def _transpose_arrays(self):
        order = np.lexsort((np.repeat(np.arange(self.n), np.diff(self.row_ptr)), self.col_idx))
        t_cols = np.repeat(np.arange(self.n), np.diff(self.row_ptr))[order]
        t_vals = self.values[order]
        t_ptr = np.zeros(self.n + 1, dtype=np.int64)
        np.add.at(t_ptr[1:], self.col_idx, 1)
        t_ptr = np.cumsum(t_ptr)
        return t_ptr, t_cols, t_vals


class SparseIntMatrix(_CSRBase):
    """Square CSR matrix of exact integers."""

    def __init__(self, n, row_ptr, col_idx, values):
        self._init_structure(n, row_ptr, col_idx)
        self.values = _to_value_array(values)
        self.max_abs = max((abs(int(v)) for v in self.values), default=0)
        if any(int(v) == 0 for v in self.values):
            raise InvalidParams("explicit zeros are not stored")
        if self.max_abs < _INT64_MAX:
            self._values64 = self.values.astype(np.int64)
        else:
            self._values64 = None

    @classmethod
    def from_dense(cls, dense):
        dense = np.asarray(dense, dtype=object)
        n = dense.shape[0]
        if dense.shape != (n, n):
            raise InvalidParams("matrix must be square")
        row_ptr = [0]
        cols, vals = [], []
        for i in range(n):
            for j in range(n):
                if int(dense[i, j]) != 0:
                    cols.append(j)
                    vals.append(int(dense[i, j]))
            row_ptr.append(len(cols))
        return cls(n, row_ptr, cols, vals)

    @classmethod
    def from_coo(cls, n, entries):
        """entries: iterable of (i, j, v), unsorted, no duplicates."""
        seen = set()
        triples = []
        for i, j, v in entries:
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidParams(f"index ({i}, {j}) outside {n}x{n}")
            if (i, j) in seen:
                raise InvalidParams(f"duplicate entry at ({i}, {j})")
            seen.add((i, j))
            if int(v) != 0:
                triples.append((i, j, int(v)))
        triples.sort()
        row_ptr = [0] * (n + 1)
        cols = [j for _, j, _ in triples]
        vals = [v for _, _, v in triples]
        for i, _, _ in triples:
            row_ptr[i + 1] += 1
        for i in range(n):
            row_ptr[i + 1] += row_ptr[i]
        return cls(n, row_ptr, cols, vals)

    def _build_transpose(self):
        t_ptr, t_cols, t_vals = self._transpose_arrays()
        t = SparseIntMatrix(self.n, t_ptr, t_cols, list(t_vals))
        t.matvecs = self.matvecs
        return t

    def _apply_arrays(self, w):
        w = np.asarray(w, dtype=object)
        max_w = max((abs(int(v)) for v in w), default=0)
        if (
            self._values64 is not None
            and max_w < _INT64_MAX
            and self.max_abs * max_w * max(1, self.max_row_nnz) < _ACC_LIMIT
        ):
            w64 = w.astype(np.int64)
            prods = self._values64 * w64[self.col_idx]
            return self._row_sums(prods)
        prods = self.values * w[self.col_idx]
        return self._row_sums(prods)

    def apply(self, w):
        """Exact A @ w. Counts one matvec."""
        if len(w) != self.n:
            raise DimensionMismatch(f"vector length {len(w)} != {self.n}")
        self.matvecs.add()
        return self._apply_arrays(w)

    def apply_transpose(self, w):
        """Exact A.T @ w. Counts one matvec."""
        if len(w) != self.n:
            raise DimensionMismatch(f"vector length {len(w)} != {self.n}")
        self.matvecs.add()
        return self.transpose()._apply_arrays(w)

    def scale_columns(self, diag):
        """A @ diag(d) for nonzero integer d (same sparsity)."""
        if len(diag) != self.n:
            raise DimensionMismatch("diagonal length mismatch")
        diag = [int(d) for d in diag]
        if any(d == 0 for d in diag):
            raise InvalidParams("zero diagonal scale would change sparsity")
        vals = [int(v) * diag[j] for v, j in zip(self.values, self.col_idx)]
        return SparseIntMatrix(self.n, self.row_ptr, self.col_idx, vals)

    def pad_identity(self, n_new):
        """Embed into the top-left corner of an n_new-dim matrix whose
        trailing diagonal is 1 (preserves nonsingularity and the norm)."""
        if n_new < self.n:
            raise InvalidParams("padding cannot shrink")
        if n_new == self.n:
            return self
        row_ptr = list(self.row_ptr)
        cols = list(self.col_idx)
        vals = [int(v) for v in self.values]
        for i in range(self.n, n_new):
            cols.append(i)
            vals.append(1)
            row_ptr.append(len(cols))
        return SparseIntMatrix(n_new, row_ptr, cols, vals)


class SparseModMatrix(_CSRBase):
    """Square CSR matrix with values in [0, p)."""

    def __init__(self, n, row_ptr, col_idx, values, field):
        self._init_structure(n, row_ptr, col_idx)
        self.field = field
        p = field.p
        vals = [int(v) % p for v in values]
        if any(v == 0 for v in vals):
            raise InvalidParams("explicit zeros are not stored")
        if field.int64_ok:
            self.values = np.asarray(vals, dtype=np.int64)
        else:
            self.values = _to_value_array(vals)

    @property
    def p(self):
        return self.field.p

    def _build_transpose(self):
        t_ptr, t_cols, t_vals = self._transpose_arrays()
        t = SparseModMatrix(self.n, t_ptr, t_cols, list(t_vals), self.field)
        t.matvecs = self.matvecs
        return t

    def _apply_arrays(self, w):
        p = self.p
        w_arr = w if isinstance(w, np.ndarray) else np.asarray(w)
        if self.field.int64_ok and self.field.chunk(self.max_row_nnz) >= self.max_row_nnz:
            if w_arr.dtype == np.int64:
                w64 = w_arr
            elif w_arr.dtype == object:
                w64 = np.array([int(x) % p for x in w_arr], dtype=np.int64)
            else:
                w64 = w_arr.astype(np.int64) % p
            prods = self.values * (w64[self.col_idx] % p)
            return self._row_sums(prods) % p
        w_obj = w_arr.astype(object) % p
        vals = self.values if self.values.dtype == object else self.values.astype(object)
        prods = vals * w_obj[self.col_idx]
        return self._row_sums(prods) % p

    def apply(self, w):
        """(A @ w) mod p. Counts one matvec."""
        if len(w) != self.n:
            raise DimensionMismatch(f"vector length {len(w)} != {self.n}")
        self.matvecs.add()
        return self._apply_arrays(w)

    def apply_transpose(self, w):
        if len(w) != self.n:
            raise DimensionMismatch(f"vector length {len(w)} != {self.n}")
        self.matvecs.add()
        return self.transpose()._apply_arrays(w)

    def apply_block(self, W):
        """(A @ W) mod p for an n x s block; counts s matvecs."""
        W = np.asarray(W)
        if W.shape[0] != self.n:
            raise DimensionMismatch("block row count mismatch")
        s = W.shape[1]
        self.matvecs.add(s)
        p = self.p
        if (
            self.field.int64_ok
            and W.dtype != object
            and self.field.chunk(self.max_row_nnz) >= self.max_row_nnz
        ):
            prods = self.values[:, None] * (W.astype(np.int64) % p)[self.col_idx]
        else:
            vals = self.values if self.values.dtype == object else self.values.astype(object)
            prods = vals[:, None] * (W.astype(object) % p)[self.col_idx]
        if self.nnz == 0:
            return np.zeros_like(W)
        if not self._has_empty_rows:
            return np.add.reduceat(prods, self._reduce_idx, axis=0) % p
        ext = np.concatenate([prods, np.zeros((1, s), dtype=prods.dtype)])
        out = np.add.reduceat(ext, self._reduce_idx, axis=0)
        out[self._empty_mask] = 0
        return out % p

    def apply_transpose_block(self, W):
        W = np.asarray(W)
        if W.shape[0] != self.n:
            raise DimensionMismatch("block row count mismatch")
        t = self.transpose()
        return t.apply_block(W)


def reduce_mod(a, field):
    """A mod p with entries reducing to zero dropped from storage."""
    p = field.p
    keep_cols, keep_vals = [], []
    row_ptr = [0]
    for i in range(a.n):
        for k in range(a.row_ptr[i], a.row_ptr[i + 1]):
            v = int(a.values[k]) % p
            if v:
                keep_cols.append(int(a.col_idx[k]))
                keep_vals.append(v)
        row_ptr.append(len(keep_cols))
    m = SparseModMatrix(a.n, row_ptr, keep_cols, keep_vals, field)
    m.matvecs = a.matvecs
    return m


def gen_random_sparse(n, nnz_per_row, entry_bound, seed):
    """Random sparse test matrix: per row, `nnz_per_row` positions drawn
    without replacement with uniform nonzero values in
    [-entry_bound, entry_bound], then the diagonal is filled wherever it
    came out empty (uniform in [1, entry_bound]) so the matrix is
    nonsingular with high probability.
    """
    if n < 1 or not 1 <= nnz_per_row <= n or entry_bound < 1:
        raise InvalidParams("need n >= 1, 1 <= nnz_per_row <= n, entry_bound >= 1")
    rng = random.Random(seed)

    def nonzero_value():
        v = rng.randint(1, entry_bound)
        return v if rng.random() < 0.5 else -v

    row_ptr = [0]
    cols, vals = [], []
    for i in range(n):
        row = {j: nonzero_value() for j in rng.sample(range(n), nnz_per_row)}
        if i not in row:
            row[i] = rng.randint(1, entry_bound)
        for j in sorted(row):
            cols.append(j)
            vals.append(row[j])
        row_ptr.append(len(cols))
    return SparseIntMatrix(n, row_ptr, cols, vals)


def gen_random_rhs(n, bound, seed):
    """Right-hand side with entries uniform in [-bound, bound]."""
    rng = random.Random(seed)
    return [rng.randint(-bound, bound) for _ in range(n)]


def norm_inf(a):
    """Largest entry in absolute value (0 for the zero matrix)."""
    return max((abs(int(v)) for v in a.values), default=0)


def norm_inf_vec(b):
    return max((abs(int(v)) for v in b), default=0)


# --- Matrix Market / plain-text I/O ----------------------------------------

_MM_HEADER = "%%MatrixMarket matrix coordinate integer general"


def write_matrix_market(a, path):
    """Coordinate integer format, 1-based, sorted by (row, col)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_MM_HEADER + "\n")
        fh.write(f"{a.n} {a.n} {a.nnz}\n")
        for i in range(a.n):
            for k in range(a.row_ptr[i], a.row_ptr[i + 1]):
                fh.write(f"{i + 1} {int(a.col_idx[k]) + 1} {int(a.values[k])}\n")


def read_matrix_market(path):
    """Reader accepts unsorted coordinates; rejects duplicates and
    non-square or non-integer headers."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        parts = header.lower().split()
        if (
            len(parts) != 5
            or parts[0] != "%%matrixmarket"
            or parts[1:3] != ["matrix", "coordinate"]
            or parts[3] != "integer"
            or parts[4] != "general"
        ):
            raise InvalidParams(f"unsupported Matrix Market header: {header!r}")
        line = fh.readline()
        while line.startswith("%"):
            line = fh.readline()
        rows, cols, nnz = map(int, line.split())
        if rows != cols:
            raise InvalidParams("only square matrices are supported")
        entries = []
        for line in fh:
            line = line.strip()
            if not line or line.startswith("%"):
                continue
            i, j, v = line.split()
            entries.append((int(i) - 1, int(j) - 1, int(v)))
        if len(entries) != nnz:
            raise InvalidParams(f"expected {nnz} entries, found {len(entries)}")
    return SparseIntMatrix.from_coo(rows, entries)


def write_vector(vec, path):
    with open(path, "w", encoding="utf-8") as fh:
        for v in vec:
            fh.write(f"{int(v)}\n")


def read_vector(path):
    with open(path, "r", encoding="utf-8") as fh:
        return [int(line) for line in fh if line.strip()]
