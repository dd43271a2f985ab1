"""Word-size prime fields, radix conversion and rational reconstruction.

Big integers are Python ints (arbitrary precision is native); rationals
are ``fractions.Fraction``, which maintains gcd(num, den) = 1 and
den > 0 by construction.  This module adds the pieces the lifting
solvers need on top: deterministic prime generation, base-p digit
recombination, and fraction recovery from a residue.
"""

import math
import random
from fractions import Fraction

from .errors import InvalidParams, NoReconstruction, ZeroInverse

# Moduli below this bound allow int64 numpy kernels: one product of two
# reduced values stays under 2**62, leaving another bit for chunked
# accumulation.  Larger moduli fall back to exact object-dtype kernels.
INT64_MODULUS_LIMIT = 1 << 31

_SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53]

# Witness set proven sufficient for all n < 3.3 * 10**24, which covers
# every modulus this library accepts (< 2**62).
_MR_WITNESSES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]


def is_probable_prime(n):
    """Miller-Rabin with deterministic witnesses (exact below 2**64)."""
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """Arithmetic modulo a word-size prime p (canonical values in [0, p))."""

    __slots__ = ("p", "int64_ok")

    def __init__(self, p):
        if not is_probable_prime(p):
            raise InvalidParams(f"{p} is not prime")
        self.p = p
        self.int64_ok = p < INT64_MODULUS_LIMIT

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroInverse(f"0 has no inverse mod {self.p}")
        return pow(a, -1, self.p)

    def chunk(self, inner):
        """Largest number of p-bounded products an int64 accumulator can
        take before reduction; 0 means the object path is required."""
        if not self.int64_ok:
            return 0
        per = (self.p - 1) ** 2
        return max(1, min(inner, (1 << 62) // per))

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))


def mod_inverse(a, field):
    """x with a*x = 1 (mod p).  Raises ZeroInverse when a = 0 mod p."""
    return field.inv(a)


def random_prime(bit_length, seed):
    """Deterministic prime with exactly `bit_length` bits (20..62)."""
    if not 20 <= bit_length <= 62:
        raise InvalidParams(f"bit_length {bit_length} outside [20, 62]")
    rng = random.Random(seed)
    lo = 1 << (bit_length - 1)
    while True:
        cand = rng.randrange(lo, 2 * lo) | 1
        if is_probable_prime(cand):
            return PrimeField(cand)


def radix_combine(digits, field):
    """Combine base-p digit vectors: entry j of the result is
    sum_i digits[i][j] * p**i, an integer in [0, p**len(digits)).

    Pairwise balanced combination keeps the big-int multiplications
    between similarly sized operands.
    """
    digits = [list(map(int, d)) for d in digits]
    if not digits:
        return []
    p = field.p
    level = digits
    scale = p
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            lo, hi = level[i], level[i + 1]
            nxt.append([a + scale * b for a, b in zip(lo, hi)])
        if len(level) % 2 == 1:
            nxt.append(level[-1])
        level = nxt
        scale = scale * scale
    return level[0]


def _half_euclid(x, m, bound):
    """Run the extended Euclidean scheme on (m, x) until the remainder
    drops to `bound` or below; returns (remainder, cofactor) with
    remainder = cofactor * x (mod m)."""
    r0, r1 = m, x
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    return r1, t1


def rational_reconstruct(x, m):
    """Recover n/d from x mod m with |n|, d <= floor(sqrt(m/2)).

    Returns a Fraction; raises NoReconstruction when no such pair exists
    (the continued-fraction convergent either violates the bounds or is
    not coprime).
    """
    if not 0 <= x < m:
        raise InvalidParams("need 0 <= x < m")
    bound = math.isqrt(m // 2)
    num, den = _half_euclid(x, m, bound)
    if den < 0:
        num, den = -num, -den
    if den == 0 or den > bound or math.gcd(num, den) != 1:
        raise NoReconstruction(f"no fraction under bound {bound} for residue")
    if math.gcd(den, m) != 1:
        raise NoReconstruction("denominator shares a factor with the modulus")
    return Fraction(num, den)


def reconstruct_vector(values, m):
    """Rational reconstruction of a whole vector mod m.

    Entries of one solution vector share most of their denominator, so
    after each full Euclidean run the accumulated denominator is applied
    to later entries first; an entry whose scaled residue is already
    small then costs one mulmod instead of a Euclidean run.
    """
    bound = math.isqrt(m // 2)
    den_acc = 1
    out = []
    for x in values:
        x = int(x) % m
        y = (x * den_acc) % m
        cand = y if y <= bound else y - m
        if abs(cand) <= bound:
            out.append(Fraction(cand, den_acc))
            continue
        f = rational_reconstruct(x, m)
        out.append(f)
        den_acc = den_acc * f.denominator // math.gcd(den_acc, f.denominator)
    return out


class RationalVector:
    """Exact rational vector as integer numerators over one positive
    common denominator (the minimal one)."""

    __slots__ = ("numerators", "denominator")

    def __init__(self, numerators, denominator=1):
        if denominator == 0:
            raise InvalidParams("zero denominator")
        if denominator < 0:
            numerators = [-v for v in numerators]
            denominator = -denominator
        g = denominator
        for v in numerators:
            g = math.gcd(g, v)
            if g == 1:
                break
        if g > 1:
            numerators = [v // g for v in numerators]
            denominator //= g
        self.numerators = [int(v) for v in numerators]
        self.denominator = int(denominator)

    @classmethod
    def from_fractions(cls, fractions):
        den = 1
        for f in fractions:
            den = den * f.denominator // math.gcd(den, f.denominator)
        nums = [f.numerator * (den // f.denominator) for f in fractions]
        return cls(nums, den)

    def entries(self):
        return [Fraction(v, self.denominator) for v in self.numerators]

    def scale_entrywise(self, factors):
        """Entrywise multiply by a list of integers (diagonal scaling)."""
        return RationalVector.from_fractions(
            [Fraction(v * r, self.denominator) for v, r in zip(self.numerators, factors)]
        )

    def __len__(self):
        return len(self.numerators)

    def __eq__(self, other):
        return (
            isinstance(other, RationalVector)
            and self.denominator == other.denominator
            and self.numerators == other.numerators
        )

    def __repr__(self):
        head = ", ".join(f"{v}/{self.denominator}" for v in self.numerators[:4])
        tail = ", ..." if len(self.numerators) > 4 else ""
        return f"RationalVector([{head}{tail}], n={len(self.numerators)})"
