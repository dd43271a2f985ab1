"""Projected block-Hankel matrix H = U B V and its fast inverse.

With a projection (R, u, v) and B nonsingular mod p, H is determined by
the 2m-1 blocks alpha_i = u B^i v, and B^{-1} = V H^{-1} U where
V = [v | Bv | ... | B^{m-1}v] and U stacks u B^i.  Nothing n x n is
ever materialized outside the debug helpers: U and V are applied
through B-matvecs, and H^{-1} is kept in an off-diagonal (difference of
anti-triangular-Hankel times triangular-Toeplitz products)
representation

  H^{-1} = Hh(alpha_{m-1} .. alpha_0) Tu(beta*_{m-1} .. beta*_0)
         - Hh(beta_{m-2} .. beta_0, 0) Tu(alpha*_m .. alpha*_1)

whose four block sequences come out of minimal approximant bases of the
stacked series [A(z); I] (and its transpose) at orders 2m-2 and 2m,
A(z) = sum alpha_{k+1} z^k.  Writing Q for the order-2m solution with
Q(0) = I and X for the order-(2m-2) solution normalized so the first
untruncated coefficient of A X is I (left and right versions of each):

  alpha_r = right-Q_r (r = 0..m-1),   beta_r  = right-X_r (r = 0..m-2),
  alpha*_t = left-Q_t (t = 1..m),     beta*_t = left-X_t  (t = 0..m-1).

The mapping is self-checking: `materialize_offdiag(...) @ H = I` is an
exact invariant exercised by the test suite, and the lifting loop's
exact-division check catches any inconsistency at the first step.

Applying H^{-1} to a vector goes through evaluation at t = 2m-1 points,
one s x s matrix-vector product per point, and interpolation back; the
Vandermonde matrices and the four sequences' evaluations are
precomputed once per solve.
"""

import numpy as np

from . import blockproj
from .densemodp import (
    VandermondeContext,
    mat_mul_arrays,
    solve_general,
)
from .errors import DimensionMismatch, SingularHankel
from .polymat import PolyMatrix, m_basis, pm_basis


class BlockHankelRep:
    """The 2m-1 blocks alpha_1 .. alpha_{2m-1} of H (block (i, j) of H is
    alpha_{i+j+1} for 0-based block coordinates)."""

    __slots__ = ("m", "s", "field", "alphas")

    def __init__(self, m, s, field, alphas):
        alphas = np.asarray(alphas)
        if alphas.shape != (2 * m - 1, s, s):
            raise DimensionMismatch(f"need {2 * m - 1} blocks of {s}x{s}")
        self.m = m
        self.s = s
        self.field = field
        self.alphas = alphas % field.p

    @property
    def n(self):
        return self.m * self.s

    @property
    def p(self):
        return self.field.p


def compute_H(b_p, proj):
    """alpha_i = u B^i v for i = 1 .. 2m-1, via one running block
    W <- B W; consumes exactly (2m-1) s matvecs."""
    m, s = proj.m, proj.s
    w = proj.materialize_v()
    blocks = []
    for _ in range(2 * m - 1):
        w = b_p.apply_block(w)
        blocks.append(blockproj.apply_u_block(proj, w))
    return BlockHankelRep(m, s, proj.field, np.stack(blocks))


class OffDiagInverse:
    """The four block sequences of the inversion formula."""

    __slots__ = ("m", "s", "field", "alpha", "alpha_star", "beta", "beta_star")

    def __init__(self, m, s, field, alpha, alpha_star, beta, beta_star):
        self.m = m
        self.s = s
        self.field = field
        self.alpha = np.asarray(alpha)            # alpha_0 .. alpha_{m-1}
        self.alpha_star = np.asarray(alpha_star)  # alpha*_1 .. alpha*_m
        self.beta = np.asarray(beta)              # beta_0 .. beta_{m-2}
        self.beta_star = np.asarray(beta_star)    # beta*_0 .. beta*_{m-1}
        if self.alpha.shape != (m, s, s) or self.alpha_star.shape != (m, s, s):
            raise DimensionMismatch("alpha sequences must have m blocks")
        if self.beta.shape != (max(m - 1, 0), s, s) or self.beta_star.shape != (m, s, s):
            raise DimensionMismatch("beta sequences have m-1 and m blocks")


def _stack_series(alphas, field):
    """[A(z); I] as a PolyMatrix (2s x s)."""
    two_m1, s, _ = alphas.shape
    dtype = np.int64 if field.int64_ok else object
    coeffs = np.zeros((two_m1, 2 * s, s), dtype=dtype)
    coeffs[:, :s, :] = alphas
    coeffs[0, s:, :] = np.eye(s, dtype=dtype)
    return PolyMatrix(coeffs, field)


def _extract(alphas, m, s, field, order, degcap, normalize, basis_algorithm):
    """Normalized approximant from a left sigma basis of [A; I].

    normalize 'const': solution Q with Q(0) = I, residual degree < degcap.
    normalize 'tail':  solution X with [z^(2m-2)](X A) = I, residual
                       degree < degcap.
    Returns coefficients (degcap+1, s, s); raises SingularHankel when the
    defining linear system is inconsistent (singular H upstream).
    """
    p = field.p
    series = _stack_series(alphas, field)
    builder = pm_basis if basis_algorithm == "pm" else m_basis
    sb = builder(series, order)
    scoeffs = sb.basis.coeffs
    sdeg = sb.basis.degree
    cands = [
        (r, j)
        for r in range(2 * s)
        if sb.row_degrees[r] <= degcap
        for j in range(degcap - sb.row_degrees[r] + 1)
    ]
    dtype = np.int64 if field.int64_ok else object
    cond = np.zeros((2 * s, len(cands)), dtype=dtype)
    for ci, (r, j) in enumerate(cands):
        t = degcap - j
        if 0 <= t <= sdeg:
            cond[:s, ci] = scoeffs[t][r, s:]
        if normalize == "const":
            if j == 0:
                cond[s:, ci] = scoeffs[0][r, :s]
        else:
            acc = np.zeros(s, dtype=dtype)
            for t in range(min(sdeg, degcap - j) + 1):
                e = (2 * m - 2) - (t + j)
                if 0 <= e <= 2 * m - 2:
                    acc = (acc + mat_mul_arrays(
                        scoeffs[t][r, :s].reshape(1, -1), alphas[e], field
                    ).reshape(-1)) % p
            cond[s:, ci] = acc
    rhs = np.zeros((2 * s, s), dtype=dtype)
    rhs[s:, :] = np.eye(s, dtype=dtype)
    combo = solve_general(cond, rhs, field)
    if combo is None:
        raise SingularHankel("approximant normalization is inconsistent")
    out = np.zeros((degcap + 1, s, s), dtype=dtype)
    for ci, (r, j) in enumerate(cands):
        col = combo[ci]
        if not (col % p).any():
            continue
        for t in range(min(sdeg, degcap - j) + 1):
            row = scoeffs[t][r, :s]
            if row.any():
                out[t + j] = (out[t + j] + col[:, None] * row[None, :]) % p
    return out


def invert_offdiag(h, basis_algorithm="m"):
    """Off-diagonal inverse representation of a nonsingular H.

    Raises SingularHankel when H is singular mod p (the projection retry
    signal).  The four approximants are unique given their degree,
    order and normalization constraints, so any consistent sigma basis
    yields the same OffDiagInverse.
    """
    m, s, field = h.m, h.s, h.field
    p = field.p
    alphas_t = np.stack([a.T for a in h.alphas])
    # right-side objects (column solutions) computed on the transposed series
    q_right_t = _extract(alphas_t, m, s, field, 2 * m, m, "const", basis_algorithm)
    x_right_t = _extract(alphas_t, m, s, field, 2 * m - 2, m - 1, "tail", basis_algorithm)
    q_right = np.stack([c.T for c in q_right_t])
    x_right = np.stack([c.T for c in x_right_t])
    # left-side objects
    q_left = _extract(h.alphas, m, s, field, 2 * m, m, "const", basis_algorithm)
    x_left = _extract(h.alphas, m, s, field, 2 * m - 2, m - 1, "tail", basis_algorithm)
    alpha = q_right[:m] % p
    beta = x_right[: m - 1] % p
    alpha_star = q_left[1: m + 1] % p
    beta_star = x_left[:m] % p
    return OffDiagInverse(m, s, field, alpha, alpha_star, beta, beta_star)


# --- materialization (tests / debug only: quadratic memory) -----------------


def materialize_H(h):
    dtype = np.int64 if h.field.int64_ok else object
    out = np.zeros((h.n, h.n), dtype=dtype)
    s = h.s
    for i in range(h.m):
        for j in range(h.m):
            out[i * s:(i + 1) * s, j * s:(j + 1) * s] = h.alphas[i + j]
    return out


def _anti_hankel(seq, m, s, field):
    """M[i,k] = seq[m-1-i-k] for i+k <= m-1, zero below the anti-diagonal."""
    dtype = np.int64 if field.int64_ok else object
    out = np.zeros((m * s, m * s), dtype=dtype)
    for i in range(m):
        for k in range(m - i):
            out[i * s:(i + 1) * s, k * s:(k + 1) * s] = seq[m - 1 - i - k]
    return out


def _upper_toeplitz(seq, m, s, field):
    """M[k,j] = seq[m-1-(j-k)] for j >= k."""
    dtype = np.int64 if field.int64_ok else object
    out = np.zeros((m * s, m * s), dtype=dtype)
    for k in range(m):
        for j in range(k, m):
            out[k * s:(k + 1) * s, j * s:(j + 1) * s] = seq[m - 1 - (j - k)]
    return out


def materialize_offdiag(inv):
    """Dense evaluation of the inversion formula (must equal H^{-1})."""
    m, s, field = inv.m, inv.s, inv.field
    zero = np.zeros((s, s), dtype=inv.alpha.dtype)
    pad_beta = [zero] + [inv.beta[r] for r in range(m - 1)]  # index r holds beta_{r-1}
    first = mat_mul_arrays(
        _anti_hankel(list(inv.alpha), m, s, field),
        _upper_toeplitz(list(inv.beta_star), m, s, field),
        field,
    )
    second = mat_mul_arrays(
        _anti_hankel(pad_beta, m, s, field),
        _upper_toeplitz(list(inv.alpha_star), m, s, field),
        field,
    )
    return (first - second) % field.p


# --- fast application -------------------------------------------------------


class HinvApplyContext:
    """Once-per-solve evaluation data for applying H^{-1}.

    For m >= 2: forward Vandermonde slice for m-chunk polynomials, its
    t x t inverse, and the four sequences evaluated at the t = 2m-1
    points (alpha* is evaluated with its indices shifted down one degree
    so every stage shares the same coefficient window m-1 .. 2m-2).
    """

    __slots__ = ("m", "s", "field", "fwd", "inv", "ev_alpha", "ev_alpha_star",
                 "ev_beta", "ev_beta_star", "small_inverse")

    def __init__(self, offdiag):
        m, s, field = offdiag.m, offdiag.s, offdiag.field
        self.m = m
        self.s = s
        self.field = field
        if m == 1:
            # H^{-1} = alpha_0 @ beta*_0 (and alpha_0 = I by normalization)
            self.small_inverse = mat_mul_arrays(offdiag.alpha[0], offdiag.beta_star[0], field)
            self.fwd = self.inv = None
            self.ev_alpha = self.ev_alpha_star = None
            self.ev_beta = self.ev_beta_star = None
            return
        self.small_inverse = None
        t = 2 * m - 1
        ctx = VandermondeContext(t, field)
        self.fwd = ctx.eval_matrix(m)
        self.inv = ctx.vand_inv

        def ev(seq):
            k = seq.shape[0]
            flat = mat_mul_arrays(ctx.eval_matrix(k), seq.reshape(k, -1), field)
            return flat.reshape(t, s, s)

        self.ev_alpha = ev(offdiag.alpha)
        self.ev_alpha_star = ev(offdiag.alpha_star)   # degrees shifted: a*_{j+1} at z^j
        self.ev_beta = ev(offdiag.beta) if m > 1 else None
        self.ev_beta_star = ev(offdiag.beta_star)


def _pointwise(mats, vecs, field):
    """Batched s x s times s products at every evaluation point."""
    if mats.dtype != object and vecs.dtype != object and field.chunk(mats.shape[-1]) >= mats.shape[-1]:
        return np.matmul(mats, vecs[:, :, None])[:, :, 0] % field.p
    t = mats.shape[0]
    out = np.empty((t, mats.shape[1]), dtype=object)
    for k in range(t):
        out[k] = mat_mul_arrays(
            mats[k].astype(object), vecs[k].astype(object).reshape(-1, 1), field
        ).reshape(-1)
    return out


def apply_Hinv(ctx, w):
    """H^{-1} w through evaluation, pointwise products, interpolation."""
    m, s, field = ctx.m, ctx.s, ctx.field
    p = field.p
    if len(w) != m * s:
        raise DimensionMismatch(f"vector length {len(w)} != {m * s}")
    w = np.asarray(w) % p
    if m == 1:
        return mat_mul_arrays(ctx.small_inverse, w.reshape(-1, 1), field).reshape(-1)
    chunks = w.reshape(m, s)
    ev_w = mat_mul_arrays(ctx.fwd, chunks, field)

    def toeplitz_stage(ev_seq, ev_vec):
        pts = _pointwise(ev_seq, ev_vec, field)
        coeffs = mat_mul_arrays(ctx.inv, pts, field)
        return coeffs[m - 1: 2 * m - 1]

    def hankel_stage(ev_seq, vec_chunks, width):
        ev_vec = mat_mul_arrays(ctx.fwd, vec_chunks, field)
        pts = _pointwise(ev_seq, ev_vec, field)
        coeffs = mat_mul_arrays(ctx.inv, pts, field)
        return coeffs[:width][::-1]

    u1 = toeplitz_stage(ctx.ev_beta_star, ev_w)
    r1 = hankel_stage(ctx.ev_alpha, u1, m)
    u2 = toeplitz_stage(ctx.ev_alpha_star, ev_w)
    r2_top = hankel_stage(ctx.ev_beta, u2, m - 1)
    out = r1.copy()
    out[: m - 1] = (out[: m - 1] - r2_top) % p
    return (out % p).reshape(m * s)


def apply_U(b_p, proj, w):
    """U w: stacked chunks u B^i w, i = 0..m-1 (m-1 matvecs)."""
    if len(w) != proj.n:
        raise DimensionMismatch(f"vector length {len(w)} != {proj.n}")
    chunks = []
    cur = np.asarray(w) % proj.p
    for i in range(proj.m):
        chunks.append(blockproj.apply_u(proj, cur))
        if i + 1 < proj.m:
            cur = b_p.apply(cur)
    return np.concatenate(chunks)


def apply_V(b_p, proj, y):
    """V y by Horner: v y_0 + B(v y_1 + B(...)) (m-1 matvecs)."""
    if len(y) != proj.n:
        raise DimensionMismatch(f"vector length {len(y)} != {proj.n}")
    y = np.asarray(y) % proj.p
    s, m = proj.s, proj.m
    acc = blockproj.apply_v(proj, y[(m - 1) * s: m * s])
    for i in range(m - 2, -1, -1):
        acc = (b_p.apply(acc) + blockproj.apply_v(proj, y[i * s:(i + 1) * s])) % proj.p
    return acc


class BlockInverse:
    """Everything precomputed once per solve for applying B^{-1} mod p."""

    __slots__ = ("b_p", "proj", "hankel", "offdiag", "ctx")

    def __init__(self, b_p, proj, hankel, offdiag, ctx):
        self.b_p = b_p
        self.proj = proj
        self.hankel = hankel
        self.offdiag = offdiag
        self.ctx = ctx


def prepare_block_inverse(b_p, proj, basis_algorithm="m"):
    """compute_H + invert_offdiag + evaluation context.

    Consumes exactly (2m-1) s matvecs; raises SingularHankel when the
    projected Hankel matrix is singular.
    """
    hankel = compute_H(b_p, proj)
    offdiag = invert_offdiag(hankel, basis_algorithm=basis_algorithm)
    ctx = HinvApplyContext(offdiag)
    return BlockInverse(b_p, proj, hankel, offdiag, ctx)


def apply_Binv(state, w):
    """B^{-1} w = V H^{-1} U w; exactly 2(m-1) matvecs."""
    uw = apply_U(state.b_p, state.proj, w)
    hw = apply_Hinv(state.ctx, uw)
    return apply_V(state.b_p, state.proj, hw)
