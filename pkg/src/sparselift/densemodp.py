"""Dense linear algebra over Z_p.

Kernels come in two flavours chosen per field: a vectorized int64 path
with delayed modular reduction (partial sums are accumulated raw and
reduced once per chunk, where the chunk size is the largest number of
products that cannot overflow 63 bits), and an exact object-dtype path
for moduli too large for machine words.  Both are exact; only speed
differs.

Array-level helpers (`mat_mul_arrays` and friends) are what the rest of
the library calls in hot paths; `DenseModMatrix` wraps them for the
public surface.
"""

import numpy as np

from .errors import DegreeTooHigh, DimensionMismatch, InvalidParams, SingularMod


def as_field_array(data, field, shape=None):
    """Canonical numpy array for the field: int64 when safe else object,
    entries reduced into [0, p)."""
    p = field.p
    arr = np.asarray(data)
    if arr.dtype == object or not field.int64_ok:
        out = arr.astype(object) % p
        return out
    return arr.astype(np.int64) % p


def mat_mul_arrays(a, b, field):
    """(a @ b) mod p with chunked delayed reduction on the int64 path."""
    if a.shape[-1] != b.shape[0]:
        raise DimensionMismatch(f"inner dims {a.shape[-1]} != {b.shape[0]}")
    p = field.p
    inner = a.shape[-1]
    if inner == 0:
        return np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64 if field.int64_ok else object)
    if field.int64_ok and a.dtype != object and b.dtype != object:
        chunk = field.chunk(inner)
        if chunk >= inner:
            return (a @ b) % p
        acc = None
        for lo in range(0, inner, chunk):
            part = (a[..., lo:lo + chunk] @ b[lo:lo + chunk]) % p
            acc = part if acc is None else (acc + part) % p
        return acc
    return (a.astype(object) @ b.astype(object)) % p


def mat_vec_arrays(a, v, field):
    return mat_mul_arrays(a, np.asarray(v).reshape(-1, 1), field).reshape(-1)


def _gauss_jordan(a, rhs, field):
    """Reduce [a | rhs] to [I | a^-1 rhs]; raises SingularMod."""
    p = field.p
    n = a.shape[0]
    if a.shape[1] != n:
        raise DimensionMismatch("matrix must be square")
    dtype = np.int64 if (field.int64_ok and a.dtype != object and rhs.dtype != object) else object
    aug = np.concatenate([a, rhs], axis=1).astype(dtype) % p
    if dtype == np.int64:
        buf = np.empty_like(aug)
    for c in range(n):
        col = aug[c:, c]
        nz = np.nonzero(col)[0] if aug.dtype != object else [
            k for k in range(n - c) if int(col[k]) % p
        ]
        if len(nz) == 0:
            raise SingularMod(f"singular mod {p} at column {c}")
        r = c + int(nz[0])
        if r != c:
            aug[[c, r]] = aug[[r, c]]
        inv = pow(int(aug[c, c]) % p, -1, p)
        aug[c] = (aug[c] * inv) % p
        factors = aug[:, c].copy()
        factors[c] = 0
        if dtype == np.int64:
            np.multiply(factors[:, None], aug[c][None, :], out=buf)
            np.subtract(aug, buf, out=aug)
            np.mod(aug, p, out=aug)
        else:
            mask = factors != 0
            if mask.any():
                aug[mask] = (aug[mask] - factors[mask, None] * aug[c][None, :]) % p
    return aug[:, n:]


def nonsingular_arrays(a, field):
    """Nonsingularity test by forward elimination only (a third of the
    work of a full inverse, no augmented columns)."""
    p = field.p
    work = as_field_array(a, field).copy()
    n = work.shape[0]
    if work.shape[1] != n:
        raise DimensionMismatch("matrix must be square")
    fast = work.dtype != object
    for c in range(n):
        col = work[c:, c]
        nz = np.nonzero(col)[0] if fast else [
            k for k in range(n - c) if int(col[k]) % p
        ]
        if len(nz) == 0:
            return False
        r = c + int(nz[0])
        if r != c:
            work[[c, r]] = work[[r, c]]
        if c + 1 == n:
            break
        inv = pow(int(work[c, c]) % p, -1, p)
        factors = (work[c + 1:, c] * inv) % p
        tail = work[c + 1:, c:]
        if fast:
            tail -= factors[:, None] * work[c, c:][None, :]
            tail %= p
        else:
            work[c + 1:, c:] = (tail - factors[:, None] * work[c, c:][None, :]) % p
    return True


class DenseModMatrix:
    """Row-major dense matrix over Z_p."""

    __slots__ = ("data", "field")

    def __init__(self, data, field):
        self.data = as_field_array(data, field)
        if self.data.ndim != 2:
            raise InvalidParams("expected a 2-D array")
        self.field = field

    @property
    def shape(self):
        return self.data.shape

    @property
    def p(self):
        return self.field.p

    @classmethod
    def identity(cls, n, field):
        return cls(np.eye(n, dtype=np.int64), field)

    @classmethod
    def zeros(cls, rows, cols, field):
        return cls(np.zeros((rows, cols), dtype=np.int64), field)

    def __eq__(self, other):
        return (
            isinstance(other, DenseModMatrix)
            and self.field == other.field
            and self.shape == other.shape
            and bool((self.data == other.data).all())
        )

    def __repr__(self):
        return f"DenseModMatrix({self.data!r}, p={self.p})"


def mat_mul(a, b):
    if a.field != b.field:
        raise InvalidParams("fields differ")
    return DenseModMatrix(mat_mul_arrays(a.data, b.data, a.field), a.field)


def mat_inverse(a):
    """A^-1 mod p by Gauss-Jordan with partial pivoting.

    SingularMod signals an unlucky prime; callers retry with a new one.
    """
    n = a.shape[0]
    eye = np.eye(n, dtype=np.int64 if a.field.int64_ok else object)
    return DenseModMatrix(_gauss_jordan(a.data, eye, a.field), a.field)


def lu_solve(a, b):
    """x with A x = b (mod p)."""
    if len(b) != a.shape[0]:
        raise DimensionMismatch("rhs length mismatch")
    rhs = as_field_array(b, a.field).reshape(-1, 1)
    return _gauss_jordan(a.data, rhs, a.field).reshape(-1)


def is_nonsingular_mod(a):
    try:
        mat_inverse(a)
        return True
    except SingularMod:
        return False


def solve_general(m, rhs, field):
    """One solution of M X = RHS over Z_p for possibly rectangular or
    rank-deficient M (free variables set to 0); None when inconsistent."""
    p = field.p
    m = as_field_array(m, field)
    rhs = as_field_array(rhs, field)
    if rhs.ndim == 1:
        rhs = rhs.reshape(-1, 1)
    rows, cols = m.shape
    if rhs.shape[0] != rows:
        raise DimensionMismatch("rhs row count mismatch")
    aug = np.concatenate([m, rhs], axis=1)
    piv_cols = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pr = next((k for k in range(r, rows) if int(aug[k, c]) % p), None)
        if pr is None:
            continue
        if pr != r:
            aug[[r, pr]] = aug[[pr, r]]
        inv = pow(int(aug[r, c]) % p, -1, p)
        aug[r] = (aug[r] * inv) % p
        factors = aug[:, c].copy()
        factors[r] = 0
        mask = factors != 0
        if mask.any():
            aug[mask] = (aug[mask] - factors[mask, None] * aug[r][None, :]) % p
        piv_cols.append(c)
        r += 1
    for k in range(r, rows):
        if not (aug[k, :cols] != 0).any() and (aug[k, cols:] != 0).any():
            return None
    out = np.zeros((cols, rhs.shape[1]), dtype=aug.dtype)
    for idx, c in enumerate(piv_cols):
        out[c] = aug[idx, cols:]
    return out


class VandermondeContext:
    """Evaluation points 1..t with the forward Vandermonde matrix and its
    inverse precomputed (inverse verified against the identity)."""

    __slots__ = ("field", "t", "points", "vand", "vand_inv")

    def __init__(self, t, field, points=None):
        p = field.p
        if points is None:
            if p <= t:
                raise InvalidParams(f"need p > t for distinct points (p={p}, t={t})")
            points = list(range(1, t + 1))
        if len(set(x % p for x in points)) != t or any(x % p == 0 for x in points):
            raise InvalidParams("points must be distinct, nonzero mod p")
        self.field = field
        self.t = t
        self.points = as_field_array(points, field)
        dtype = np.int64 if field.int64_ok else object
        vand = np.zeros((t, t), dtype=dtype)
        col = np.ones(t, dtype=dtype)
        for j in range(t):
            vand[:, j] = col
            col = (col * self.points) % p
        self.vand = vand
        self.vand_inv = _gauss_jordan(vand, np.eye(t, dtype=dtype), field)
        ident = mat_mul_arrays(self.vand, self.vand_inv, field)
        if not (ident == np.eye(t, dtype=ident.dtype)).all():
            raise InvalidParams("Vandermonde inverse failed verification")

    def eval_matrix(self, ncoeffs):
        """t x ncoeffs slice of the forward matrix (degree < ncoeffs)."""
        if ncoeffs > self.t:
            raise DegreeTooHigh(f"degree {ncoeffs - 1} needs more than {self.t} points")
        return self.vand[:, :ncoeffs]


def vand_eval(coeffs, ctx):
    """Evaluate the coefficient sequence at every context point.

    coeffs: sequence of equally shaped vectors (index = degree).
    Returns a list of t vectors: result[k] = sum_j coeffs[j] * x_k**j.
    """
    t = ctx.t
    if len(coeffs) == 0:
        raise InvalidParams("empty coefficient sequence")
    if len(coeffs) > t:
        raise DegreeTooHigh(f"degree {len(coeffs) - 1} >= t = {t}")
    stack = as_field_array(np.stack([np.asarray(c) for c in coeffs]), ctx.field)
    flat = stack.reshape(stack.shape[0], -1)
    vals = mat_mul_arrays(ctx.eval_matrix(len(coeffs)), flat, ctx.field)
    return [vals[k].reshape(stack.shape[1:]) for k in range(t)]


def vand_interp(values, ctx):
    """Inverse of vand_eval: recover the t coefficient vectors from the
    values at the t context points."""
    if len(values) != ctx.t:
        raise DimensionMismatch(f"need exactly {ctx.t} value vectors")
    stack = as_field_array(np.stack([np.asarray(v) for v in values]), ctx.field)
    flat = stack.reshape(ctx.t, -1)
    coeffs = mat_mul_arrays(ctx.vand_inv, flat, ctx.field)
    return [coeffs[j].reshape(stack.shape[1:]) for j in range(ctx.t)]
