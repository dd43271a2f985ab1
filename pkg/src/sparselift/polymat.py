"""Matrix polynomials over Z_p and minimal approximant (sigma) bases.

A left sigma basis of F at order d is a nonsingular polynomial matrix S
with minimal row degrees such that S(z) F(z) = 0 mod z^d.  The
iterated, order-by-order construction keeps a residual series R = S F
truncated at z^d; each step zeroes one more coefficient by constant row
elimination (lowest-degree rows preferred, lowest index breaking ties)
followed by a z-shift of the pivot rows.

`pm_basis` is the divide-and-conquer variant: compute a basis for half
the order, multiply it into the series, recurse on the remainder and
multiply the two bases.  It returns the same row-degree profile as
`m_basis` and is worthwhile once orders grow past a few dozen.
"""

import numpy as np

from .densemodp import VandermondeContext, as_field_array, mat_mul_arrays
from .errors import DimensionMismatch, InvalidParams, RankCollapse

NAIVE_POLY_MUL_DEGREE = 32
PM_BASIS_BASE_ORDER = 8


class PolyMatrix:
    """Polynomial with s x t matrix coefficients, stored coefficient-major
    as an array of shape (deg + 1, rows, cols).  Trailing zero
    coefficients are trimmed; the zero polynomial has no coefficients."""

    __slots__ = ("coeffs", "rows", "cols", "field")

    def __init__(self, coeffs, field, rows=None, cols=None):
        arr = as_field_array(np.asarray(coeffs), field) if len(coeffs) else None
        if arr is None:
            if rows is None or cols is None:
                raise InvalidParams("zero polynomial needs explicit shape")
            dtype = np.int64 if field.int64_ok else object
            arr = np.zeros((0, rows, cols), dtype=dtype)
        if arr.ndim != 3:
            raise InvalidParams("coefficients must form a (deg+1, rows, cols) array")
        while arr.shape[0] and not arr[-1].any():
            arr = arr[:-1]
        self.coeffs = arr
        self.rows = arr.shape[1] if arr.ndim == 3 else rows
        self.cols = arr.shape[2] if arr.ndim == 3 else cols
        self.field = field

    @property
    def degree(self):
        """Degree of the polynomial; -1 for the zero polynomial."""
        return self.coeffs.shape[0] - 1

    @property
    def p(self):
        return self.field.p

    @classmethod
    def from_blocks(cls, blocks, field):
        """blocks: sequence of equally shaped 2-D arrays, index = degree."""
        if not blocks:
            raise InvalidParams("use explicit shape for the zero polynomial")
        return cls(np.stack([np.asarray(b) for b in blocks]), field)

    @classmethod
    def identity(cls, n, field):
        return cls(np.eye(n, dtype=np.int64)[None, :, :], field)

    @classmethod
    def zero(cls, rows, cols, field):
        return cls([], field, rows=rows, cols=cols)

    def coeff(self, k):
        if 0 <= k <= self.degree:
            return self.coeffs[k]
        dtype = np.int64 if self.field.int64_ok else object
        return np.zeros((self.rows, self.cols), dtype=dtype)

    def eval_at(self, x):
        """Horner evaluation at a field element; returns a 2-D array."""
        p = self.p
        x = int(x) % p
        dtype = np.int64 if self.field.int64_ok else object
        acc = np.zeros((self.rows, self.cols), dtype=dtype)
        for k in range(self.degree, -1, -1):
            acc = (acc * x + self.coeffs[k]) % p
        return acc

    def __eq__(self, other):
        return (
            isinstance(other, PolyMatrix)
            and self.field == other.field
            and self.coeffs.shape == other.coeffs.shape
            and bool((self.coeffs == other.coeffs).all())
        )

    def __repr__(self):
        return f"PolyMatrix(deg={self.degree}, shape=({self.rows}, {self.cols}), p={self.p})"


def poly_mul(a, b):
    """Exact product of matrix polynomials.

    Naive convolution below NAIVE_POLY_MUL_DEGREE; above it, evaluation
    and interpolation at 1..t (when the field has that many points,
    which word-size primes always do at these degrees).
    """
    if a.cols != b.rows:
        raise DimensionMismatch(f"inner dims {a.cols} != {b.rows}")
    if a.field != b.field:
        raise InvalidParams("fields differ")
    field = a.field
    if a.degree < 0 or b.degree < 0:
        return PolyMatrix.zero(a.rows, b.cols, field)
    dprod = a.degree + b.degree
    small = min(a.degree, b.degree) < NAIVE_POLY_MUL_DEGREE
    if small or field.p <= dprod + 1:
        return _poly_mul_naive(a, b)
    return _poly_mul_evalinterp(a, b)


def _poly_mul_naive(a, b):
    field = a.field
    p = field.p
    dprod = a.degree + b.degree
    dtype = np.int64 if field.int64_ok else object
    out = np.zeros((dprod + 1, a.rows, b.cols), dtype=dtype)
    for i in range(a.degree + 1):
        for j in range(b.degree + 1):
            out[i + j] = (out[i + j] + mat_mul_arrays(a.coeffs[i], b.coeffs[j], field)) % p
    return PolyMatrix(out, field)


def _poly_mul_evalinterp(a, b):
    field = a.field
    t = a.degree + b.degree + 1
    ctx = VandermondeContext(t, field)
    ea = mat_mul_arrays(ctx.eval_matrix(a.degree + 1), a.coeffs.reshape(a.degree + 1, -1), field)
    eb = mat_mul_arrays(ctx.eval_matrix(b.degree + 1), b.coeffs.reshape(b.degree + 1, -1), field)
    vals = np.stack([
        mat_mul_arrays(ea[k].reshape(a.rows, a.cols), eb[k].reshape(b.rows, b.cols), field)
        for k in range(t)
    ])
    coeffs = mat_mul_arrays(ctx.vand_inv, vals.reshape(t, -1), field)
    return PolyMatrix(coeffs.reshape(t, a.rows, b.cols), field)


def poly_add(a, b):
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise DimensionMismatch("shape mismatch")
    d = max(a.degree, b.degree)
    if d < 0:
        return PolyMatrix.zero(a.rows, a.cols, a.field)
    out = np.stack([(a.coeff(k) + b.coeff(k)) % a.p for k in range(d + 1)])
    return PolyMatrix(out, a.field)


class SigmaBasis:
    """Minimal approximant basis with its degree profile.

    side 'left':  basis @ F = 0 mod z^order, row i has degree <= row_degrees[i].
    side 'right': F @ basis = 0 mod z^order, column degrees instead.
    """

    __slots__ = ("basis", "row_degrees", "order", "side")

    def __init__(self, basis, row_degrees, order, side="left"):
        self.basis = basis
        self.row_degrees = list(row_degrees)
        self.order = order
        self.side = side

    @property
    def column_degrees(self):
        if self.side != "right":
            raise InvalidParams("column degrees only on right bases")
        return self.row_degrees


def _mbasis_arrays(fcoeffs, d, field, init_degrees=None):
    """Core iteration on raw arrays.  fcoeffs: (degF+1, k, l).
    Returns (scoeffs (d+1, k, k), degrees)."""
    p = field.p
    k, ell = fcoeffs.shape[1], fcoeffs.shape[2]
    if ell == 0 or k == 0:
        raise InvalidParams("empty matrix")
    # int64 only when a full inner-product over k terms cannot overflow
    fast = field.int64_ok and field.chunk(k) >= k
    dtype = np.int64 if fast else object
    s = np.zeros((d + 1, k, k), dtype=dtype)
    s[0] = np.eye(k, dtype=dtype)
    degrees = list(init_degrees) if init_degrees is not None else [0] * k
    if len(degrees) != k:
        raise InvalidParams("init_degrees length mismatch")
    # residual series R = S F, truncated at z^d
    r = np.zeros((d, k, ell), dtype=dtype)
    upto = min(d, fcoeffs.shape[0])
    r[:upto] = fcoeffs[:upto].astype(dtype) % p
    smax = 0  # current max degree of S
    for sigma in range(d):
        delta = r[sigma] % p
        if not delta.any():
            continue
        order = sorted(range(k), key=lambda row: (degrees[row], row))
        e = np.eye(k, dtype=dtype)
        pivots = []
        work = delta.copy()
        touched = False
        for pos, row in enumerate(order):
            nz = [c for c in range(ell) if int(work[row, c]) % p != 0]
            if not nz:
                continue
            c = nz[0]
            pivots.append(row)
            inv = pow(int(work[row, c]) % p, -1, p)
            later = [rr for rr in order[pos + 1:] if int(work[rr, c]) % p != 0]
            if later:
                touched = True
                f = (work[later, c] * inv) % p
                work[later] = (work[later] - f[:, None] * work[row][None, :]) % p
                e[later] = (e[later] - f[:, None] * e[row][None, :]) % p
        if touched:
            s[: smax + 1] = np.matmul(e, s[: smax + 1]) % p
            r[sigma:] = np.matmul(e, r[sigma:]) % p
        # z * pivot rows: degree up by one, residual shifts right
        moved = s[: smax + 1, pivots].copy()
        s[1: smax + 2, pivots] = moved
        s[0, pivots] = 0
        if sigma + 1 < d:
            shifted = r[sigma: d - 1, pivots].copy()
            r[sigma + 1: d, pivots] = shifted
        for row in pivots:
            degrees[row] += 1
        if pivots:
            smax = min(smax + 1, d)
    return s, degrees


def m_basis(f, d, init_degrees=None):
    """Left sigma basis of order d by the iterative construction.

    Raises RankCollapse only for structurally empty input; rank-deficient
    residuals are handled (fewer pivot rows that step).
    """
    if d < 0:
        raise InvalidParams("order must be >= 0")
    field = f.field
    if f.rows == 0 or f.cols == 0:
        raise RankCollapse("cannot build a basis for an empty matrix")
    if d == 0:
        return SigmaBasis(PolyMatrix.identity(f.rows, field), [0] * f.rows, 0, "left")
    src = f.coeffs if f.degree >= 0 else np.zeros((1, f.rows, f.cols),
                                                  dtype=np.int64 if field.int64_ok else object)
    s, degrees = _mbasis_arrays(src, d, field, init_degrees)
    return SigmaBasis(PolyMatrix(s, field), degrees, d, "left")


def pm_basis(f, d, init_degrees=None):
    """Divide-and-conquer sigma basis; same contract as m_basis."""
    if d < 0:
        raise InvalidParams("order must be >= 0")
    field = f.field
    if f.rows == 0 or f.cols == 0:
        raise RankCollapse("cannot build a basis for an empty matrix")
    degrees = list(init_degrees) if init_degrees is not None else [0] * f.rows
    if d <= PM_BASIS_BASE_ORDER:
        return m_basis(f, d, degrees)
    d1 = d // 2
    s1 = pm_basis(f, d1, degrees)
    prod = poly_mul(s1.basis, f)
    mid_coeffs = prod.coeffs[d1:d] if prod.degree >= d1 else prod.coeffs[:0]
    if mid_coeffs.shape[0] == 0:
        residual = PolyMatrix.zero(f.rows, f.cols, field)
    else:
        residual = PolyMatrix(np.array(mid_coeffs), field)
    s2 = pm_basis(residual, d - d1, s1.row_degrees)
    combined = poly_mul(s2.basis, s1.basis)
    return SigmaBasis(combined, s2.row_degrees, d, "left")


def right_basis(f, d, algorithm="m"):
    """Right sigma basis via the transposed left-basis engine."""
    fl = PolyMatrix(np.array([c.T for c in f.coeffs]), f.field) if f.degree >= 0 \
        else PolyMatrix.zero(f.cols, f.rows, f.field)
    sb = (pm_basis if algorithm == "pm" else m_basis)(fl, d)
    bt = PolyMatrix(np.array([c.T for c in sb.basis.coeffs]), f.field) if sb.basis.degree >= 0 \
        else PolyMatrix.zero(f.cols, f.cols, f.field)
    return SigmaBasis(bt, sb.row_degrees, d, "right")


def order_residual(s, f, d):
    """Coefficients 0..d-1 of S F (all zero for a valid left basis)."""
    prod = _poly_mul_naive(s, f) if s.degree >= 0 and f.degree >= 0 else None
    field = f.field
    dtype = np.int64 if field.int64_ok else object
    out = np.zeros((d, s.rows, f.cols), dtype=dtype)
    if prod is not None:
        upto = min(d, prod.degree + 1)
        out[:upto] = prod.coeffs[:upto]
    return out


def polymat_nonsingular(a):
    """Exact nonsingularity test for a square polynomial matrix: the
    determinant (degree <= rows * deg) is probed at successive points;
    any nonzero evaluation certifies nonsingularity, and seeing more
    zeros than its degree certifies singularity."""
    if a.rows != a.cols:
        raise DimensionMismatch("determinant needs a square matrix")
    if a.degree < 0:
        return False
    p = a.p
    max_det_degree = a.rows * a.degree
    if p <= max_det_degree + 1:
        raise InvalidParams("field too small for the determinant probe")
    for x in range(1, max_det_degree + 2):
        m = a.eval_at(x).astype(object) % p
        if _det_mod(m, p) != 0:
            return True
    return False


def _det_mod(m, p):
    m = m.copy()
    n = m.shape[0]
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if int(m[r, c]) % p), None)
        if piv is None:
            return 0
        if piv != c:
            m[[c, piv]] = m[[piv, c]]
            det = -det
        det = det * int(m[c, c]) % p
        inv = pow(int(m[c, c]) % p, -1, p)
        for r in range(c + 1, n):
            if int(m[r, c]) % p:
                f = int(m[r, c]) * inv % p
                m[r] = (m[r] - f * m[c]) % p
    return det % p
