"""Prime fields, their quadratic extensions, square roots and sums of squares.

Scalars of F_p are plain Python ints in [0, p).  Scalars of F_{p^2} are
pairs ``(c0, c1)`` standing for ``c0 + c1*t`` where ``t^2 = s*t + n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from .errors import NotASquare

Fq2Elem = Tuple[int, int]

MAX_MODULUS = 1 << 31


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeFieldCtx:
    """Arithmetic context for F_p with word-sized p."""

    p: int

    def __post_init__(self):
        if not (2 <= self.p < MAX_MODULUS) or not is_prime(self.p):
            raise ValueError(f"modulus must be a prime below 2^31, got {self.p}")

    # field order and characteristic coincide for prime fields
    @property
    def order(self) -> int:
        return self.p

    @property
    def characteristic(self) -> int:
        return self.p

    def reduce(self, x: int) -> int:
        return int(x) % self.p

    def zero(self) -> int:
        return 0

    def one(self) -> int:
        return 1 % self.p

    def add(self, x: int, y: int) -> int:
        return (x + y) % self.p

    def sub(self, x: int, y: int) -> int:
        return (x - y) % self.p

    def neg(self, x: int) -> int:
        return (-x) % self.p

    def mul(self, x: int, y: int) -> int:
        return (x * y) % self.p

    def inv(self, x: int) -> int:
        if x % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    def pow(self, x: int, e: int) -> int:
        return pow(x, e, self.p)

    def half(self, x: int) -> int:
        return self.mul(x, self.inv(2))

    def eq(self, x: int, y: int) -> bool:
        return (x - y) % self.p == 0

    def random(self, rng) -> int:
        return int(rng.integers(0, self.p))


@dataclass(frozen=True)
class Fq2Ctx:
    """F_{p^2} = F_p[t]/(t^2 - s*t - n).

    p = 3 mod 4 uses s = 0 and n the lowest non-residue; otherwise s = 1 and
    the smallest n making 1 + 4n a non-residue.  Characteristic 2 uses
    t^2 = t + 1.
    """

    base: PrimeFieldCtx
    s: int = field(default=-1)
    n: int = field(default=-1)

    def __post_init__(self):
        p = self.base.p
        if self.s < 0 or self.n < 0:
            s, n = _default_modulus(self.base)
            object.__setattr__(self, "s", s)
            object.__setattr__(self, "n", n)
        # irreducible iff x^2 - s x - n has no root in F_p
        for x in range(p):
            if (x * x - self.s * x - self.n) % p == 0:
                raise ValueError(f"t^2 - {self.s}t - {self.n} is reducible mod {p}")

    @classmethod
    def of(cls, p: int) -> "Fq2Ctx":
        return cls(PrimeFieldCtx(p))

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def q(self) -> int:
        return self.base.p

    @property
    def order(self) -> int:
        return self.base.p ** 2

    @property
    def characteristic(self) -> int:
        return self.base.p

    def reduce(self, x) -> Fq2Elem:
        if isinstance(x, (int,)):
            return (x % self.p, 0)
        return (int(x[0]) % self.p, int(x[1]) % self.p)

    def zero(self) -> Fq2Elem:
        return (0, 0)

    def one(self) -> Fq2Elem:
        return (1 % self.p, 0)

    def gen(self) -> Fq2Elem:
        """The class of t."""
        return (0, 1)

    def add(self, x: Fq2Elem, y: Fq2Elem) -> Fq2Elem:
        p = self.p
        return ((x[0] + y[0]) % p, (x[1] + y[1]) % p)

    def sub(self, x: Fq2Elem, y: Fq2Elem) -> Fq2Elem:
        p = self.p
        return ((x[0] - y[0]) % p, (x[1] - y[1]) % p)

    def neg(self, x: Fq2Elem) -> Fq2Elem:
        p = self.p
        return ((-x[0]) % p, (-x[1]) % p)

    def mul(self, x: Fq2Elem, y: Fq2Elem) -> Fq2Elem:
        p = self.p
        a0, a1 = x
        b0, b1 = y
        hi = a1 * b1
        return ((a0 * b0 + self.n * hi) % p, (a0 * b1 + a1 * b0 + self.s * hi) % p)

    def pow(self, x: Fq2Elem, e: int) -> Fq2Elem:
        result = self.one()
        base = self.reduce(x)
        while e > 0:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def norm(self, x: Fq2Elem) -> int:
        """x * conj(x), an element of the base field."""
        return self.mul(x, self.conj(x))[0]

    def inv(self, x: Fq2Elem) -> Fq2Elem:
        nx = self.norm(x)
        if nx == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj(x)
        k = self.base.inv(nx)
        return (c[0] * k % self.p, c[1] * k % self.p)

    def conj(self, x: Fq2Elem) -> Fq2Elem:
        return frobenius_conj(x, self)

    def eq(self, x: Fq2Elem, y: Fq2Elem) -> bool:
        return self.reduce(x) == self.reduce(y)

    def is_base(self, x: Fq2Elem) -> bool:
        return x[1] % self.p == 0

    def random(self, rng) -> Fq2Elem:
        return (int(rng.integers(0, self.p)), int(rng.integers(0, self.p)))


FieldCtx = Union[PrimeFieldCtx, Fq2Ctx]


def _default_modulus(base: PrimeFieldCtx) -> Tuple[int, int]:
    p = base.p
    if p == 2:
        return 1, 1
    if p % 4 == 3:
        return 0, lowest_qnr(base)
    n = 1
    while legendre(1 + 4 * n, base) != -1:
        n += 1
    return 1, n


def legendre(a: int, ctx: PrimeFieldCtx) -> int:
    """Legendre symbol via Euler's criterion."""
    p = ctx.p
    if p == 2:
        raise ValueError("Legendre symbol is undefined for p = 2")
    r = pow(a % p, (p - 1) // 2, p)
    if r == 0:
        return 0
    return 1 if r == 1 else -1


def lowest_qnr(ctx: PrimeFieldCtx) -> int:
    """Smallest quadratic non-residue, found by plain increment."""
    s = 2
    while legendre(s, ctx) != -1:
        s += 1
    return s


def _is_square(a, ctx: FieldCtx) -> bool:
    if ctx.characteristic == 2:
        return True
    if isinstance(ctx, PrimeFieldCtx):
        return legendre(a, ctx) >= 0
    a = ctx.reduce(a)
    if a == ctx.zero():
        return True
    return ctx.pow(a, (ctx.order - 1) // 2) == ctx.one()


def _nonresidue(ctx: FieldCtx):
    if isinstance(ctx, PrimeFieldCtx):
        return lowest_qnr(ctx)
    for c1 in range(ctx.p):
        for c0 in range(ctx.p):
            if not _is_square((c0, c1), ctx):
                return (c0, c1)
    raise AssertionError("no non-residue found")


def _tonelli_shanks(a, ctx: FieldCtx):
    """Generic Tonelli-Shanks over a finite field of odd characteristic.

    ``ctx`` supplies mul/pow/one and the field order; ``a`` must be a
    nonzero square.
    """
    mul, one = ctx.mul, ctx.one()
    q, e = ctx.order - 1, 0
    while q % 2 == 0:
        q //= 2
        e += 1
    z = _nonresidue(ctx)
    c = ctx.pow(z, q)
    t = ctx.pow(a, q)
    r = ctx.pow(a, (q + 1) // 2)
    m = e
    while t != one:
        i, t2 = 0, t
        while t2 != one:
            t2 = mul(t2, t2)
            i += 1
            if i == m:
                raise NotASquare(f"{a} is not a square")
        b = ctx.pow(c, 1 << (m - i - 1))
        m = i
        c = mul(b, b)
        t = mul(t, c)
        r = mul(r, b)
    return r


def mod_sqrt(a, ctx: FieldCtx):
    """Square root with a deterministic choice between r and -r.

    Prime fields return min(r, p - r); extension fields the
    lexicographically smaller coefficient pair.
    """
    a = ctx.reduce(a)
    if a == ctx.zero():
        return a
    if ctx.characteristic == 2:
        # Frobenius is bijective: sqrt(x) = x^(order/2)
        return ctx.pow(a, ctx.order // 2)
    if not _is_square(a, ctx):
        raise NotASquare(f"{a} is not a square in the field of order {ctx.order}")
    r = _tonelli_shanks(a, ctx)
    return min(r, ctx.neg(r))


def sos_decompose(k: int, ctx: PrimeFieldCtx) -> Tuple[int, int]:
    """Return (a, b) with a^2 + b^2 = k mod p.

    Squares are returned as (sqrt(k), 0).  Otherwise, with s the lowest
    non-residue, s - 1 is a square and k/s is a square, so
    k = (k/s)(1 + (s-1)) splits as a^2 + (a c)^2.
    """
    p = ctx.p
    if p == 2:
        raise ValueError("sum-of-squares decomposition needs an odd prime")
    k %= p
    if legendre(k, ctx) >= 0:
        return mod_sqrt(k, ctx), 0
    s = lowest_qnr(ctx)
    c = mod_sqrt(s - 1, ctx)
    r = k * ctx.inv(s) % p
    a = mod_sqrt(r, ctx)
    return a, a * c % p


def sqrt_minus_one(ctx: FieldCtx) -> Optional[Union[int, Fq2Elem]]:
    """A square root of -1 when one exists, else None."""
    if isinstance(ctx, PrimeFieldCtx):
        if ctx.p == 2:
            return 1
        if ctx.p % 4 == 1:
            return mod_sqrt(ctx.p - 1, ctx)
        return None
    # every even-degree extension contains one
    return mod_sqrt((ctx.p - 1) % ctx.p, ctx)


def frobenius_conj(x: Fq2Elem, ctx: Fq2Ctx) -> Fq2Elem:
    """x^q.  Since t^q is the other root s - t of the defining polynomial,
    c0 + c1 t maps to (c0 + s c1) - c1 t."""
    p = ctx.p
    c0, c1 = int(x[0]), int(x[1])
    return ((c0 + ctx.s * c1) % p, (-c1) % p)
