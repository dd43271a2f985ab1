"""End-to-end exact solvers for nonsingular sparse integer systems.

All four share the same outer shape: fix a prime, build some form of
fast `apply A^{-1} mod p` (dense inverse, block-Krylov inverse, or
minimal polynomial), extract base-p digits of the solution by lifting,
recombine, reconstruct rationals, and verify A x = b exactly before
returning.  The Chinese-remainder variant replaces lifting with
independent primes.

Unlucky primes and failed projections surface as SingularMod /
SingularHankel / BadMinPoly and are retried: up to PROJECTION_RETRIES
projection redraws per prime and PRIME_RETRIES primes, after which the
matrix is reported singular (a matrix singular over Q fails for every
prime).
"""

import hashlib
import math
import random
import time
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import blockhankel, blockproj
from .arith import (
    RationalVector,
    radix_combine,
    random_prime,
    reconstruct_vector,
)
from .densemodp import DenseModMatrix, mat_inverse, mat_vec_arrays
from .errors import (
    BadMinPoly,
    DimensionMismatch,
    InvalidParams,
    ProjectionFailure,
    Singular,
    SingularHankel,
    SingularMod,
    SparseliftError,
)
from .sparsemat import SparseModMatrix, norm_inf, norm_inf_vec, reduce_mod

DEFAULT_PRIME_BITS = 26
PRIME_RETRIES = 3
PROJECTION_RETRIES = 5
MINPOLY_RETRIES = 5
DEBUG_LIFTING = False          # extra mod-p^i consistency checks (tests only)
_DEBUG_CHECK_EVERY = 16

_INT64_SAFE = 1 << 61


def derive_seed(seed, *labels):
    """Stable named sub-stream so matrix, rhs, projection and prime
    randomness are independently reproducible from one seed."""
    text = repr((int(seed),) + tuple(labels)).encode()
    return int.from_bytes(hashlib.sha256(text).digest()[:8], "big")


@dataclass
class SolveReport:
    """Outcome of one verified solve."""

    solution: RationalVector
    algorithm: str
    n: int
    prime: int
    lifting_steps: int
    matvec_count: int
    retries: int
    block_size: int | None = None
    timings: dict = dataclass_field(default_factory=dict)
    setup_matvecs: int = 0
    lift_matvecs: int = 0


class LiftingState:
    """Residual and digit accumulator of a running lifting loop.

    The update keeps the invariant that the residual stays an exact
    integer vector: (b_i - B x_i) must be divisible by p entrywise.
    The residual lives in int64 while its entries stay clear of the
    overflow margin and is promoted to exact objects otherwise.
    """

    __slots__ = ("residual", "digits", "step", "p")

    def __init__(self, b, p):
        vals = [int(v) for v in b]
        if max((abs(v) for v in vals), default=0) < _INT64_SAFE:
            self.residual = np.array(vals, dtype=np.int64)
        else:
            self.residual = np.array(vals, dtype=object)
        self.digits = []
        self.step = 0
        self.p = p

    def residual_mod_p(self, int64_ok):
        w = self.residual % self.p
        if int64_ok and w.dtype == object:
            return np.array([int(x) for x in w], dtype=np.int64)
        if not int64_ok and w.dtype != object:
            return w.astype(object)
        return w

    def advance(self, digit, b_times_digit):
        """Consume digit x_i: residual <- (residual - B x_i) / p."""
        btd = np.asarray(b_times_digit)
        if self.residual.dtype == object or btd.dtype == object:
            diff = self.residual.astype(object) - btd.astype(object)
        else:
            diff = self.residual - btd  # both sides bounded well below 2**62
        quot = diff // self.p
        rem = diff - quot * self.p
        if rem.any():
            raise SingularHankel(
                "residual not divisible by p: mod-p inverse is inconsistent"
            )
        if quot.dtype != object:
            if int(np.abs(quot).max(initial=0)) >= _INT64_SAFE:
                quot = quot.astype(object)
        self.residual = quot
        self.digits.append(digit)
        self.step += 1


def _ceil_log(p, target):
    """Smallest k >= 0 with p**k >= target, exactly."""
    k = 0
    acc = 1
    while acc < target:
        acc *= p
        k += 1
    return k


def lifting_steps_bound(n, norm_a, norm_b, field):
    """Number of lifting steps sufficient for rational reconstruction:
    (n/2) * ceil(log_p(n ||A||^2) + log_p((n-1) ||A||^2 + ||b||^2)),
    evaluated exactly over the integers (the two logarithms share one
    ceiling, so the product n||A||^2 * ((n-1)||A||^2 + ||b||^2) is
    compared against powers of p directly; odd n rounds up).

    Reconstruction applies one symmetric size bound sqrt(M/2) to both
    numerator and denominator, so the modulus must also clear twice the
    square of the larger of the two Hadamard-type factors; with strongly
    unbalanced ||A|| and ||b|| that (rarely) exceeds the formula value
    and is taken instead.
    """
    norm_a = max(1, int(norm_a))
    norm_b = max(1, int(norm_b))
    x = n * norm_a * norm_a
    y = max(1, (n - 1) * norm_a * norm_a + norm_b * norm_b)
    from_formula = (n * _ceil_log(field.p, x * y) + 1) // 2
    symmetric = _ceil_log(field.p, 2 * max(x, y) ** n) - 1
    return max(from_formula, symmetric)


def verify_solution(a, b, x):
    """Exact A x = b over Q: compare A nums with den * b entrywise."""
    if len(b) != a.n or len(x) != a.n:
        return False
    nums = np.asarray(x.numerators, dtype=object)
    left = a._apply_arrays(nums)
    den = x.denominator
    return all(int(lv) == den * int(bv) for lv, bv in zip(left, b))


def _check_partial_lift(b_vec, state, b_int):
    """Debug invariant: after i digits, B (sum x_j p^j) = b mod p^i."""
    p = state.p
    i = state.step
    mod = p ** i
    partial = np.zeros(len(b_vec), dtype=object)
    scale = 1
    for d in state.digits:
        partial += scale * np.asarray(d, dtype=object)
        scale *= p
    check = b_int._apply_arrays(partial % mod)
    if any((int(cv) - int(bv)) % mod for cv, bv in zip(check, b_vec)):
        raise SparseliftError("partial lift drifted from b mod p^i")


def _run_lifting(b_vec, field, steps, apply_inv_mod_p, apply_b_int,
                 early_checker=None):
    """Shared digit-extraction loop: steps+1 digits (i = 0 .. steps)."""
    state = LiftingState(b_vec, field.p)
    for i in range(steps + 1):
        w = state.residual_mod_p(field.int64_ok)
        digit = apply_inv_mod_p(w)
        state.advance(digit, apply_b_int(digit))
        if DEBUG_LIFTING and (i + 1) % _DEBUG_CHECK_EVERY == 0:
            _check_partial_lift(b_vec, state, apply_b_int.__self__)
        if early_checker is not None and state.step <= steps:
            result = early_checker(state)
            if result is not None:
                return result
    return state


def _combine_and_reconstruct(state, field):
    modulus = field.p ** len(state.digits)
    combined = radix_combine(state.digits, field)
    return reconstruct_vector(combined, modulus), modulus


def _solution_timings(t0, t1, t2, t3):
    return {"setup_s": t1 - t0, "lift_s": t2 - t1, "recon_s": t3 - t2,
            "total_s": t3 - t0}


# --- dense Dixon -------------------------------------------------------------


def solve_dixon_dense(a, b, seed=0, prime_bits=DEFAULT_PRIME_BITS):
    """Classic lifting with a dense A^{-1} mod p computed once."""
    if len(b) != a.n:
        raise DimensionMismatch("rhs length mismatch")
    retries = 0
    base_count = a.matvecs.count
    for attempt in range(PRIME_RETRIES):
        fld = random_prime(prime_bits, derive_seed(seed, "prime", attempt))
        t0 = time.perf_counter()
        try:
            ap = DenseModMatrix(_dense_mod(a, fld.p, fld.int64_ok), fld)
            binv = mat_inverse(ap).data
        except SingularMod:
            retries += 1
            continue
        steps = lifting_steps_bound(a.n, norm_inf(a), norm_inf_vec(b), fld)
        t1 = time.perf_counter()
        lift_base = a.matvecs.count

        def inv_apply(w):
            return mat_vec_arrays(binv, w, fld)

        state = _run_lifting(b, fld, steps, inv_apply, a.apply)
        t2 = time.perf_counter()
        fracs, _ = _combine_and_reconstruct(state, fld)
        solution = RationalVector.from_fractions(fracs)
        t3 = time.perf_counter()
        if not verify_solution(a, b, solution):
            raise SparseliftError("verification failed after reconstruction")
        return SolveReport(
            solution=solution, algorithm="dixon", n=a.n, prime=fld.p,
            lifting_steps=steps, matvec_count=a.matvecs.count - base_count,
            retries=retries, timings=_solution_timings(t0, t1, t2, t3),
            setup_matvecs=0, lift_matvecs=a.matvecs.count - lift_base,
        )
    raise Singular(f"matrix singular mod {PRIME_RETRIES} distinct primes")


def _dense_mod(a, p, int64_ok):
    dtype = np.int64 if int64_ok else object
    out = np.zeros((a.n, a.n), dtype=dtype)
    for i in range(a.n):
        lo, hi = a.row_ptr[i], a.row_ptr[i + 1]
        for k in range(lo, hi):
            out[i, a.col_idx[k]] = int(a.values[k]) % p
    return out


# --- block sparse solver ------------------------------------------------------


def _auto_block_size(n):
    return max(1, math.isqrt(n))


def solve_block_sparse(a, b, s="auto", seed=0, prime_bits=DEFAULT_PRIME_BITS,
                       basis_algorithm="m", early_exit=False):
    """Lifting on B = A R with the structured projected inverse
    B^{-1} = V H^{-1} U applied per step; the solution is recovered as
    x = R y from y = B^{-1} b."""
    if len(b) != a.n:
        raise DimensionMismatch("rhs length mismatch")
    n0 = a.n
    s_val = _auto_block_size(n0) if s == "auto" else int(s)
    if not 1 <= s_val <= n0:
        raise InvalidParams(f"block size {s_val} outside [1, {n0}]")
    m = -(-n0 // s_val)
    n = m * s_val
    a_pad = a.pad_identity(n)
    b_pad = list(b) + [0] * (n - n0)
    retries = 0
    total_matvecs = 0
    last_field = None
    for prime_idx in range(PRIME_RETRIES):
        fld = random_prime(prime_bits, derive_seed(seed, "prime", prime_idx))
        last_field = fld
        for proj_idx in range(PROJECTION_RETRIES):
            t0 = time.perf_counter()
            proj = blockproj.make_projection(
                n, s_val, fld, derive_seed(seed, "projection", prime_idx, proj_idx)
            )
            b_int = a_pad.scale_columns(proj.r_diag_int())
            b_int.matvecs.count = 0
            b_mod = reduce_mod(b_int, fld)
            try:
                state_inv = blockhankel.prepare_block_inverse(
                    b_mod, proj, basis_algorithm=basis_algorithm
                )
            except SingularHankel:
                retries += 1
                total_matvecs += b_int.matvecs.count
                continue
            setup_matvecs = b_int.matvecs.count
            steps = lifting_steps_bound(n, norm_inf(b_int), norm_inf_vec(b_pad), fld)
            t1 = time.perf_counter()

            early = _make_early_checker(a, b, proj, n0, fld, steps) if early_exit else None
            try:
                lift = _run_lifting(
                    b_pad, fld, steps,
                    lambda w: blockhankel.apply_Binv(state_inv, w),
                    b_int.apply,
                    early_checker=early,
                )
            except SingularHankel:
                retries += 1
                total_matvecs += b_int.matvecs.count
                continue
            t2 = time.perf_counter()
            if isinstance(lift, RationalVector):
                solution = lift      # early exit already verified
                steps_used = "early"
            else:
                fracs, _ = _combine_and_reconstruct(lift, fld)
                r_int = proj.r_diag_int()
                scaled = [f * r for f, r in zip(fracs, r_int)]
                solution = RationalVector.from_fractions(scaled[:n0])
                steps_used = steps
            t3 = time.perf_counter()
            if not isinstance(steps_used, str) and not verify_solution(a, b, solution):
                raise SparseliftError("verification failed after reconstruction")
            total_matvecs += b_int.matvecs.count
            return SolveReport(
                solution=solution, algorithm="block", n=n0, prime=fld.p,
                lifting_steps=steps, matvec_count=total_matvecs,
                retries=retries, block_size=s_val,
                timings=_solution_timings(t0, t1, t2, t3),
                setup_matvecs=setup_matvecs,
                lift_matvecs=b_int.matvecs.count - setup_matvecs,
            )
    _raise_singular_or_projection(a, last_field, retries)


def _make_early_checker(a, b, proj, n0, fld, steps):
    interval = max(1, -(-steps // 8))
    r_int = proj.r_diag_int()

    def checker(state):
        if state.step % interval or state.step < 2:
            return None
        try:
            fracs, _ = _combine_and_reconstruct(state, fld)
        except Exception:
            return None
        scaled = [f * r for f, r in zip(fracs, r_int)]
        candidate = RationalVector.from_fractions(scaled[:n0])
        if verify_solution(a, b, candidate):
            return candidate
        return None

    return checker


def _raise_singular_or_projection(a, fld, retries):
    """A matrix that failed every projection under several primes is
    almost surely singular; confirm densely when that is affordable."""
    if a.n <= 2048 and fld is not None:
        try:
            mat_inverse(DenseModMatrix(_dense_mod(a, fld.p, fld.int64_ok), fld))
        except SingularMod:
            raise Singular(
                f"matrix is singular (confirmed mod {fld.p}; {retries} retries)"
            ) from None
        raise ProjectionFailure(
            f"no working projection after {retries} retries (matrix nonsingular mod {fld.p})"
        )
    raise ProjectionFailure(f"retry budget exhausted after {retries} attempts")


# --- Wiedemann variants -------------------------------------------------------


def _dot_mod(u, v, field):
    if (
        field.int64_ok
        and u.dtype != object
        and v.dtype != object
        and field.chunk(len(u)) >= len(u)
    ):
        return int((u * v).sum()) % field.p
    return int(sum(int(x) * int(y) for x, y in zip(u, v)) % field.p)


def _berlekamp_massey(seq, field):
    """Minimal LFSR of the sequence; returns connection coefficients
    c_0 = 1, c_1, ..., c_L with sum_j c_j seq[i-j] = 0 for i >= L."""
    p = field.p
    n = len(seq)
    dtype = np.int64 if field.int64_ok else object
    c = np.zeros(n + 1, dtype=dtype)
    bpoly = np.zeros(n + 1, dtype=dtype)
    c[0] = bpoly[0] = 1
    big_l, gap, b_disc = 0, 1, 1
    seq = np.asarray(seq, dtype=dtype)
    for i in range(n):
        d = int(seq[i])
        if big_l:
            d = (d + _dot_mod(c[1: big_l + 1], seq[i - big_l: i][::-1], field)) % p
        d %= p
        if d == 0:
            gap += 1
            continue
        coef = d * pow(b_disc, -1, p) % p
        if 2 * big_l <= i:
            old = c.copy()
            c[gap:] = (c[gap:] - coef * bpoly[: n + 1 - gap]) % p
            big_l = i + 1 - big_l
            bpoly = old
            b_disc = d
            gap = 1
        else:
            c[gap:] = (c[gap:] - coef * bpoly[: n + 1 - gap]) % p
            gap += 1
    return c[: big_l + 1], big_l


class _MinPolySolver:
    """Solve A x = b mod p through the minimal polynomial of A mod p.

    With mu(t) = sum mu_k t^k, mu(0) invertible and mu(A) = 0:
    x = -mu_0^{-1} (mu_1 I + mu_2 A + ... ) b, Horner-evaluated with
    deg(mu) - 1 products by A.
    """

    def __init__(self, ap, field, seed):
        self.ap = ap
        self.field = field
        p = field.p
        n = ap.n
        last_error = None
        for attempt in range(MINPOLY_RETRIES):
            rng = random.Random(derive_seed(seed, "krylov", attempt))
            u = np.array([rng.randrange(p) for _ in range(n)],
                         dtype=np.int64 if field.int64_ok else object)
            w = np.array([rng.randrange(p) for _ in range(n)],
                         dtype=np.int64 if field.int64_ok else object)
            seq = []
            cur = w
            for i in range(2 * n):
                seq.append(_dot_mod(u, cur, field))
                if i + 1 < 2 * n:
                    cur = ap.apply(cur)
            conn, deg = _berlekamp_massey(seq, field)
            if deg == 0:
                last_error = BadMinPoly("zero sequence")
                continue
            mu = conn[::-1]       # mu_k = c_{deg - k}
            if int(mu[0]) % p == 0:
                last_error = SingularMod(
                    "minimal polynomial divisible by t: matrix singular mod p"
                )
                continue
            self.mu = np.asarray(mu) % p
            self.deg = deg
            self.neg_inv_mu0 = (-pow(int(mu[0]), -1, p)) % p
            return
        raise last_error

    def solve(self, b_mod):
        p = self.field.p
        b_mod = np.asarray(b_mod) % p
        w = (int(self.mu[self.deg]) * b_mod) % p
        for k in range(self.deg - 1, 0, -1):
            w = (self.ap.apply(w) + int(self.mu[k]) * b_mod) % p
        return (self.neg_inv_mu0 * w) % p


def _validated_minpoly_solver(ap, field, b_probe, seed):
    for attempt in range(MINPOLY_RETRIES):
        solver = _MinPolySolver(ap, field, derive_seed(seed, "minpoly", attempt))
        x = solver.solve(b_probe)
        if (ap.apply(x) % field.p == b_probe % field.p).all():
            return solver
    raise BadMinPoly("minimal polynomial failed to solve the probe system")


def solve_wiedemann_padic(a, b, seed=0, prime_bits=DEFAULT_PRIME_BITS):
    """Lifting where A^{-1} mod p is applied through the minimal
    polynomial, computed once per prime."""
    if len(b) != a.n:
        raise DimensionMismatch("rhs length mismatch")
    retries = 0
    base_count = a.matvecs.count
    for attempt in range(PRIME_RETRIES):
        fld = random_prime(prime_bits, derive_seed(seed, "prime", attempt))
        t0 = time.perf_counter()
        attempt_base = a.matvecs.count
        ap = reduce_mod(a, fld)
        b_probe = _to_mod_vec(b, fld)
        try:
            solver = _validated_minpoly_solver(ap, fld, b_probe, derive_seed(seed, "wp", attempt))
        except (BadMinPoly, SingularMod):
            retries += 1
            continue
        setup_matvecs = a.matvecs.count - attempt_base
        steps = lifting_steps_bound(a.n, norm_inf(a), norm_inf_vec(b), fld)
        t1 = time.perf_counter()
        lift_base = a.matvecs.count
        state = _run_lifting(b, fld, steps, solver.solve, a.apply)
        t2 = time.perf_counter()
        fracs, _ = _combine_and_reconstruct(state, fld)
        solution = RationalVector.from_fractions(fracs)
        t3 = time.perf_counter()
        if not verify_solution(a, b, solution):
            raise SparseliftError("verification failed after reconstruction")
        return SolveReport(
            solution=solution, algorithm="wiedemann-padic", n=a.n, prime=fld.p,
            lifting_steps=steps, matvec_count=a.matvecs.count - base_count,
            retries=retries, timings=_solution_timings(t0, t1, t2, t3),
            setup_matvecs=setup_matvecs,
            lift_matvecs=a.matvecs.count - lift_base,
        )
    raise Singular(f"matrix singular mod {PRIME_RETRIES} distinct primes")


def _to_mod_vec(vec, field):
    p = field.p
    vals = [int(v) % p for v in vec]
    return np.array(vals, dtype=np.int64 if field.int64_ok else object)


def solve_cra_wiedemann(a, b, seed=0, prime_bits=DEFAULT_PRIME_BITS):
    """Solve mod many primes with Wiedemann, combine the solution images
    by Chinese remaindering, reconstruct rationals once the combined
    modulus clears the same bound the lifting solvers use."""
    if len(b) != a.n:
        raise DimensionMismatch("rhs length mismatch")
    n = a.n
    norm_a = max(1, norm_inf(a))
    norm_b = max(1, norm_inf_vec(b))
    x_bound = n * norm_a * norm_a
    y_bound = max(1, (n - 1) * norm_a * norm_a + norm_b * norm_b)
    # covers both the product bound and the symmetric sqrt(M/2) bound
    target = 2 * max(pow(x_bound * y_bound, -(-n // 2)),
                     pow(max(x_bound, y_bound), n))
    t0 = time.perf_counter()
    base_count = a.matvecs.count
    combined = [0] * n
    modulus = 1
    used = set()
    retries = 0
    consecutive_failures = 0
    prime_idx = 0
    primes_used = 0
    t1 = time.perf_counter()
    while modulus <= target:
        fld = random_prime(prime_bits, derive_seed(seed, "cra-prime", prime_idx))
        prime_idx += 1
        if fld.p in used:
            continue
        used.add(fld.p)
        ap = reduce_mod(a, fld)
        b_mod = _to_mod_vec(b, fld)
        try:
            solver = _validated_minpoly_solver(ap, fld, b_mod, derive_seed(seed, "cra", prime_idx))
        except (BadMinPoly, SingularMod):
            retries += 1
            consecutive_failures += 1
            if consecutive_failures >= PRIME_RETRIES + 2:
                raise Singular(
                    f"{consecutive_failures} consecutive primes failed; matrix singular"
                ) from None
            continue
        consecutive_failures = 0
        x_mod = solver.solve(b_mod)
        p = fld.p
        inv = pow(modulus % p, -1, p)
        combined = [
            xc + modulus * ((int(xm) - xc) % p * inv % p)
            for xc, xm in zip(combined, x_mod)
        ]
        modulus *= p
        primes_used += 1
    t2 = time.perf_counter()
    fracs = reconstruct_vector(combined, modulus)
    solution = RationalVector.from_fractions(fracs)
    t3 = time.perf_counter()
    if not verify_solution(a, b, solution):
        raise SparseliftError("verification failed after reconstruction")
    return SolveReport(
        solution=solution, algorithm="cra-wiedemann", n=n,
        prime=max(used) if used else 0, lifting_steps=primes_used,
        matvec_count=a.matvecs.count - base_count, retries=retries,
        timings=_solution_timings(t0, t1, t2, t3),
        setup_matvecs=0, lift_matvecs=a.matvecs.count - base_count,
    )


ALGORITHMS = {
    "block": solve_block_sparse,
    "dixon": solve_dixon_dense,
    "wiedemann-padic": solve_wiedemann_padic,
    "cra-wiedemann": solve_cra_wiedemann,
}
