"""Rings with an involutive antihomomorphism, scalar quaternions, and
array-level ring implementations used by the matrix kernels.

Array rings store a matrix as an ndarray of shape ``(rows, cols)`` or,
for rings with several base coordinates, ``(rows, cols, comp)``.
"""
from __future__ import annotations

import enum
from typing import Any, NamedTuple, Optional

import numpy as np

from .errors import UnsupportedRing
from .field import Fq2Ctx, PrimeFieldCtx
from .modmat import (mod_add, mod_lincomb, mod_matmul, mod_neg, mod_scale, mod_sub,
                     mod_syrk_full)


class AdjointKind(enum.Enum):
    TRANSPOSE = "t"
    CONJUGATE_TRANSPOSE = "h"

    @classmethod
    def parse(cls, s) -> "AdjointKind":
        if isinstance(s, cls):
            return s
        key = str(s).lower()
        for k in cls:
            if key in (k.value, k.name.lower()):
                return k
        if key in ("transpose",):
            return cls.TRANSPOSE
        if key in ("conj", "hermitian", "conjugatetranspose"):
            return cls.CONJUGATE_TRANSPOSE
        raise ValueError(f"unknown adjoint kind {s!r}")


Transpose = AdjointKind.TRANSPOSE
ConjugateTranspose = AdjointKind.CONJUGATE_TRANSPOSE


# --------------------------------------------------------------------------
# scalar quaternions

class Quaternion(NamedTuple):
    """x1 + x2 i + x3 j + x4 k.  Coefficients may be numbers or matrices."""

    x1: Any
    x2: Any
    x3: Any
    x4: Any


class PlainCoeffs:
    """Coefficient arithmetic using Python operators (integers, floats)."""

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def neg(self, x):
        return -x

    def mul(self, x, y):
        return x * y

    def half(self, x):
        return x / 2


class MatrixCoeffs:
    """Coefficients are square-or-conformable matrices over F_p."""

    def __init__(self, p: int):
        self.p = p
        self.inv2 = pow(2, -1, p) if p != 2 else None

    def add(self, x, y):
        return mod_add(x, y, self.p)

    def sub(self, x, y):
        return mod_sub(x, y, self.p)

    def neg(self, x):
        return mod_neg(x, self.p)

    def mul(self, x, y):
        return mod_matmul(x, y, self.p)

    def half(self, x):
        if self.inv2 is None:
            raise ZeroDivisionError("2 is not invertible in characteristic 2")
        return mod_scale(x, self.inv2, self.p)


class CountingCoeffs:
    """Wraps a coefficient arithmetic and tallies calls into an OpCounter."""

    def __init__(self, inner, counter):
        self.inner = inner
        self.counter = counter

    def add(self, x, y):
        self.counter.add(1)
        return self.inner.add(x, y)

    def sub(self, x, y):
        self.counter.add(1)
        return self.inner.sub(x, y)

    def neg(self, x):
        return self.inner.neg(x)

    def mul(self, x, y):
        self.counter.mul(1)
        return self.inner.mul(x, y)

    def half(self, x):
        self.counter.halvings += 1
        return self.inner.half(x)


def _coeffs(ops):
    return PlainCoeffs() if ops is None else ops


def quat_conj(x: Quaternion, ops=None) -> Quaternion:
    f = _coeffs(ops)
    return Quaternion(x.x1, f.neg(x.x2), f.neg(x.x3), f.neg(x.x4))


def quat_mul_naive(x: Quaternion, y: Quaternion, ops=None) -> Quaternion:
    """Schoolbook product: 16 coefficient multiplications."""
    f = _coeffs(ops)
    m = f.mul
    x1, x2, x3, x4 = x
    y1, y2, y3, y4 = y
    w1 = f.sub(f.sub(f.sub(m(x1, y1), m(x2, y2)), m(x3, y3)), m(x4, y4))
    w2 = f.sub(f.add(f.add(m(x1, y2), m(x2, y1)), m(x3, y4)), m(x4, y3))
    w3 = f.add(f.add(f.sub(m(x1, y3), m(x2, y4)), m(x3, y1)), m(x4, y2))
    w4 = f.add(f.sub(f.add(m(x1, y4), m(x2, y3)), m(x3, y2)), m(x4, y1))
    return Quaternion(w1, w2, w3, w4)


def quat_mul_howell_lafon(x: Quaternion, y: Quaternion, ops=None) -> Quaternion:
    """Eight-multiplication product; needs 2 invertible.

    Coefficients may be matrices, in which case each multiplication is a
    matrix product and the operands are combined on the right order.
    """
    f = _coeffs(ops)
    if getattr(f, "p", None) == 2 or getattr(getattr(f, "inner", None), "p", None) == 2:
        raise ZeroDivisionError("Howell-Lafon product needs characteristic != 2")
    add, sub, mul = f.add, f.sub, f.mul
    x1, x2, x3, x4 = x
    y1, y2, y3, y4 = y
    q1 = mul(add(x1, x2), add(y1, y2))
    q2 = mul(sub(x4, x3), sub(y3, y4))
    q3 = mul(sub(x2, x1), add(y3, y4))
    q4 = mul(add(x3, x4), sub(y2, y1))
    q5 = mul(add(x2, x4), add(y2, y3))
    q6 = mul(sub(x2, x4), sub(y2, y3))
    q7 = mul(add(x1, x3), sub(y1, y4))
    q8 = mul(sub(x1, x3), add(y1, y4))
    t1 = add(q5, q6)
    t2 = add(q7, q8)
    t3 = sub(q5, q6)
    t4 = sub(q7, q8)
    t5 = sub(t2, t1)
    t6 = add(t1, t2)
    t7 = add(t3, t4)
    t8 = sub(t3, t4)
    w1 = add(q2, f.half(t5))
    w2 = sub(q1, f.half(t6))
    w3 = sub(f.half(t7), q3)
    w4 = sub(f.half(t8), q4)
    return Quaternion(w1, w2, w3, w4)


# --------------------------------------------------------------------------
# array rings

class ArrayRing:
    """Interface shared by the array-level rings.

    ``comp`` is the length of the trailing coordinate axis (0 when the
    ring elements are numpy scalars).  ``mul_cost`` is the number of
    base-field multiplications behind one ring multiplication inside a
    matrix product.
    """

    tag = "ring"
    comp = 0
    dtype: Any = np.int64
    is_exact = True
    is_commutative = True
    has_conj = False
    mul_cost = 1
    characteristic = 0
    modulus = 0

    # shapes -------------------------------------------------------------
    def shape(self, m, n):
        return (m, n, self.comp) if self.comp else (m, n)

    def zeros(self, m, n):
        return np.zeros(self.shape(m, n), dtype=self.dtype)

    def eye(self, n):
        z = self.zeros(n, n)
        idx = np.arange(n)
        if self.comp:
            z[idx, idx, 0] = 1
        else:
            z[idx, idx] = 1
        return z

    def numel(self, x) -> int:
        return x.shape[0] * x.shape[1]

    def transpose(self, x):
        return x.swapaxes(0, 1)

    def adjoint(self, x, kind: AdjointKind):
        t = x.swapaxes(0, 1)
        if kind is ConjugateTranspose and self.has_conj:
            return self.conj(t)
        return t

    def check_kind(self, kind: AdjointKind):
        """Raise unless (ring, kind) gives a matrix antihomomorphism."""

    # scalars ------------------------------------------------------------
    def scalar(self, v):
        return v

    def scalar_conj(self, c):
        return c

    def scalar_is_one(self, c) -> bool:
        return bool(np.all(np.asarray(self.scalar(c)) == np.asarray(self.one())))

    def scalar_is_zero(self, c) -> bool:
        return bool(np.all(np.asarray(self.scalar(c)) == 0))

    def one(self):
        return 1

    def full_scalar(self, c, m, n):
        """m x n array filled with the ring scalar c."""
        z = self.zeros(m, n)
        z[...] = self.scalar(c)
        return z

    # comparisons ----------------------------------------------------------
    def equal(self, x, y) -> bool:
        return x.shape == y.shape and bool(np.array_equal(x, y))

    def copy(self, x):
        return np.array(x, copy=True)

    def syrk_full(self, x, kind: AdjointKind):
        return self.matmul(x, self.adjoint(x, kind))

    def lincomb(self, x, a, y, b, out=None):
        """a x + b y for central scalars a, b."""
        r = self.add(self.scale(x, a), self.scale(y, b))
        if out is None:
            return r
        out[...] = r
        return out


class PrimeRing(ArrayRing):
    """F_p with canonical int64 residues; phi is the identity on scalars."""

    def __init__(self, p: int):
        self.ctx = PrimeFieldCtx(p)
        self.p = p
        self.characteristic = p
        self.modulus = p
        self.tag = f"fp:{p}"

    def __repr__(self):
        return f"PrimeRing({self.p})"

    def scalar(self, v):
        return int(v) % self.p

    def add(self, x, y, out=None):
        return mod_add(x, y, self.p, out)

    def sub(self, x, y, out=None):
        return mod_sub(x, y, self.p, out)

    def neg(self, x, out=None):
        return mod_neg(x, self.p, out)

    def conj(self, x, out=None):
        if out is None:
            return x
        out[...] = x
        return out

    def scale(self, x, c, out=None):
        return mod_scale(x, c, self.p, out)

    def rmul(self, x, c, out=None):
        return mod_scale(x, c, self.p, out)

    def lincomb(self, x, a, y, b, out=None):
        return mod_lincomb(x, a, y, b, self.p, out)

    def emul(self, x, y, out=None):
        out = np.multiply(x, y, out=out)
        return np.remainder(out, self.p, out=out)

    def matmul(self, x, y, out=None):
        return mod_matmul(x, y, self.p, out)

    def syrk_full(self, x, kind):
        return mod_syrk_full(x, self.p)

    def random(self, m, n, rng):
        return rng.integers(0, self.p, size=(m, n), dtype=np.int64)

    def from_ints(self, a):
        return np.asarray(a, dtype=np.int64) % self.p


class Fq2Ring(ArrayRing):
    """F_{p^2}; phi on scalars is the Frobenius map.

    Matrix products are Karatsuba-style, 3 base products.
    """

    comp = 2
    has_conj = True
    mul_cost = 3

    def __init__(self, p_or_ctx):
        self.ctx = p_or_ctx if isinstance(p_or_ctx, Fq2Ctx) else Fq2Ctx.of(int(p_or_ctx))
        self.p = self.ctx.p
        self.s = self.ctx.s
        self.n = self.ctx.n
        self.characteristic = self.p
        self.modulus = self.p
        self.tag = f"fp2:{self.p}"
        self.base = PrimeRing(self.p)

    def __repr__(self):
        return f"Fq2Ring({self.p}, t^2={self.s}t+{self.n})"

    def numel(self, x):
        return x.shape[0] * x.shape[1]

    def scalar(self, v):
        if isinstance(v, (int, np.integer)):
            return np.array([int(v) % self.p, 0], dtype=np.int64)
        return np.array([int(v[0]) % self.p, int(v[1]) % self.p], dtype=np.int64)

    def one(self):
        return np.array([1 % self.p, 0], dtype=np.int64)

    def scalar_conj(self, c):
        return np.array(self.ctx.conj(tuple(int(v) for v in self.scalar(c))), dtype=np.int64)

    def add(self, x, y, out=None):
        return mod_add(x, y, self.p, out)

    def sub(self, x, y, out=None):
        return mod_sub(x, y, self.p, out)

    def neg(self, x, out=None):
        return mod_neg(x, self.p, out)

    def conj(self, x, out=None):
        p = self.p
        if out is None:
            out = np.empty(x.shape, dtype=np.int64)
        c1 = x[..., 1]
        if self.s:
            r0 = mod_scale(c1, self.s, p)
            mod_add(x[..., 0], r0, p, out=r0)
        else:
            r0 = x[..., 0].copy()
        r1 = mod_neg(c1, p)
        out[..., 0] = r0
        out[..., 1] = r1
        return out

    def scale(self, x, c, out=None):
        """Multiply by a base-field scalar."""
        return mod_scale(x, c, self.p, out)

    def rmul(self, x, c, out=None):
        c0, c1 = (int(v) for v in self.scalar(c))
        p = self.p
        x0, x1 = x[..., 0], x[..., 1]
        hi = mod_scale(x1, c1, p)
        r0 = mod_add(mod_scale(x0, c0, p), mod_scale(hi, self.n, p), p)
        r1 = mod_add(mod_add(mod_scale(x0, c1, p), mod_scale(x1, c0, p), p),
                     mod_scale(hi, self.s, p), p)
        if out is None:
            out = np.empty(x.shape, dtype=np.int64)
        out[..., 0] = r0
        out[..., 1] = r1
        return out

    def emul(self, x, y, out=None):
        p = self.p
        x0, x1 = x[..., 0], x[..., 1]
        y0, y1 = y[..., 0], y[..., 1]
        hi = x1 * y1 % p
        r0 = (x0 * y0 + self.n * hi) % p
        r1 = (x0 * y1 % p + x1 * y0 % p + self.s * hi) % p
        if out is None:
            out = np.empty(np.broadcast_shapes(x.shape, y.shape), dtype=np.int64)
        out[..., 0] = r0
        out[..., 1] = r1
        return out

    def matmul(self, x, y, out=None):
        # Karatsuba: three base products
        p = self.p
        x0, x1 = x[..., 0], x[..., 1]
        y0, y1 = y[..., 0], y[..., 1]
        p0 = mod_matmul(x0, y0, p)
        p1 = mod_matmul(x1, y1, p)
        p2 = mod_matmul(mod_add(x0, x1, p), mod_add(y0, y1, p), p)
        c0 = mod_add(p0, mod_scale(p1, self.n, p), p)
        c1 = mod_sub(mod_sub(p2, p0, p), p1, p)
        if self.s:
            mod_add(c1, mod_scale(p1, self.s, p), p, out=c1)
        if out is None:
            out = np.empty((x.shape[0], y.shape[1], 2), dtype=np.int64)
        out[..., 0] = c0
        out[..., 1] = c1
        return out

    def random(self, m, n, rng):
        return rng.integers(0, self.p, size=(m, n, 2), dtype=np.int64)

    def from_pairs(self, a):
        return np.asarray(a, dtype=np.int64) % self.p


class ComplexRing(ArrayRing):
    """Double-precision complex numbers; phi is conjugation."""

    dtype = np.complex128
    is_exact = False
    has_conj = True
    tag = "c64"
    rtol = 1e-10

    def __repr__(self):
        return "ComplexRing()"

    def scalar(self, v):
        return complex(v)

    def one(self):
        return 1.0 + 0j

    def scalar_conj(self, c):
        return complex(c).conjugate()

    def add(self, x, y, out=None):
        return np.add(x, y, out=out)

    def sub(self, x, y, out=None):
        return np.subtract(x, y, out=out)

    def neg(self, x, out=None):
        return np.negative(x, out=out)

    def conj(self, x, out=None):
        return np.conjugate(x, out=out)

    def scale(self, x, c, out=None):
        return np.multiply(x, c, out=out)

    def rmul(self, x, c, out=None):
        return np.multiply(x, c, out=out)

    def emul(self, x, y, out=None):
        return np.multiply(x, y, out=out)

    def matmul(self, x, y, out=None):
        if out is None:
            return x @ y
        out[...] = x @ y
        return out

    def random(self, m, n, rng):
        return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))

    def equal(self, x, y) -> bool:
        if x.shape != y.shape:
            return False
        scale = max(np.linalg.norm(x), np.linalg.norm(y), 1e-300)
        return bool(np.linalg.norm(x - y) <= self.rtol * scale)


class RealRing(ArrayRing):
    """Double-precision reals; base ring of the complex numbers."""

    dtype = np.float64
    is_exact = False
    tag = "r64"
    rtol = 1e-10

    def __repr__(self):
        return "RealRing()"

    def scalar(self, v):
        return float(v)

    def one(self):
        return 1.0

    def add(self, x, y, out=None):
        return np.add(x, y, out=out)

    def sub(self, x, y, out=None):
        return np.subtract(x, y, out=out)

    def neg(self, x, out=None):
        return np.negative(x, out=out)

    def conj(self, x, out=None):
        if out is None:
            return x
        out[...] = x
        return out

    def scale(self, x, c, out=None):
        return np.multiply(x, c, out=out)

    rmul = scale

    def emul(self, x, y, out=None):
        return np.multiply(x, y, out=out)

    def matmul(self, x, y, out=None):
        if out is None:
            return x @ y
        out[...] = x @ y
        return out

    def syrk_full(self, x, kind):
        return x @ x.T

    def random(self, m, n, rng):
        return rng.standard_normal((m, n))

    def equal(self, x, y) -> bool:
        if x.shape != y.shape:
            return False
        scale = max(np.linalg.norm(x), np.linalg.norm(y), 1e-300)
        return bool(np.linalg.norm(x - y) <= self.rtol * scale)


def _quat_mul_arrays(x, y, p, out=None):
    """Elementwise quaternion product of (..., 4) arrays (naive formula)."""
    # x and y broadcast against each other
    def m(a, b):
        return a * b % p

    x1, x2, x3, x4 = (x[..., k] for k in range(4))
    y1, y2, y3, y4 = (y[..., k] for k in range(4))
    w1 = (m(x1, y1) - m(x2, y2) - m(x3, y3) - m(x4, y4)) % p
    w2 = (m(x1, y2) + m(x2, y1) + m(x3, y4) - m(x4, y3)) % p
    w3 = (m(x1, y3) - m(x2, y4) + m(x3, y1) + m(x4, y2)) % p
    w4 = (m(x1, y4) + m(x2, y3) - m(x3, y2) + m(x4, y1)) % p
    if out is None:
        out = np.empty(np.broadcast_shapes(x.shape, y.shape), dtype=np.int64)
    out[..., 0] = w1
    out[..., 1] = w2
    out[..., 2] = w3
    out[..., 3] = w4
    return out


class QuatRing(ArrayRing):
    """Quaternions over F_p, stored as (..., 4) coordinates of 1, i, j, k.

    Matrix products use the Howell-Lafon scheme with matrix coefficients
    (8 base products) in odd characteristic, the schoolbook scheme (16)
    in characteristic 2.
    """

    comp = 4
    has_conj = True
    is_commutative = False

    def __init__(self, p: int):
        self.ctx = PrimeFieldCtx(p)
        self.p = p
        self.characteristic = p
        self.modulus = p
        self.tag = f"quat:fp:{p}"
        self.mul_cost = 16 if p == 2 else 8
        self._coeffs = MatrixCoeffs(p)

    def __repr__(self):
        return f"QuatRing({self.p})"

    def check_kind(self, kind):
        if kind is Transpose:
            raise UnsupportedRing(
                "quaternion matrix transpose is not an antihomomorphism; use raw_transpose")

    def adjoint(self, x, kind):
        self.check_kind(kind)
        return self.conj(x.swapaxes(0, 1))

    def scalar(self, v):
        if isinstance(v, (int, np.integer)):
            return np.array([int(v) % self.p, 0, 0, 0], dtype=np.int64)
        return np.array([int(c) % self.p for c in v], dtype=np.int64)

    def one(self):
        return np.array([1 % self.p, 0, 0, 0], dtype=np.int64)

    def scalar_conj(self, c):
        c = self.scalar(c)
        return np.array([c[0], (-c[1]) % self.p, (-c[2]) % self.p, (-c[3]) % self.p],
                        dtype=np.int64)

    def add(self, x, y, out=None):
        return mod_add(x, y, self.p, out)

    def sub(self, x, y, out=None):
        return mod_sub(x, y, self.p, out)

    def neg(self, x, out=None):
        return mod_neg(x, self.p, out)

    def conj(self, x, out=None):
        if out is None:
            out = np.empty(x.shape, dtype=np.int64)
        out[..., 0] = x[..., 0]
        mod_neg(x[..., 1:], self.p, out=out[..., 1:])
        return out

    def scale(self, x, c, out=None):
        return mod_scale(x, c, self.p, out)

    def rmul(self, x, c, out=None):
        return _quat_mul_arrays(x, self.scalar(c), self.p, out)

    def emul(self, x, y, out=None):
        return _quat_mul_arrays(x, y, self.p, out)

    def lmul(self, c, x, out=None):
        return _quat_mul_arrays(self.scalar(c), x, self.p, out)

    def planes(self, x):
        return Quaternion(*(np.ascontiguousarray(x[..., k]) for k in range(4)))

    def matmul(self, x, y, out=None):
        px, py = self.planes(x), self.planes(y)
        if self.p == 2:
            w = quat_mul_naive(px, py, self._coeffs)
        else:
            w = quat_mul_howell_lafon(px, py, self._coeffs)
        if out is None:
            out = np.empty((x.shape[0], y.shape[1], 4), dtype=np.int64)
        for k in range(4):
            out[..., k] = w[k]
        return out

    def random(self, m, n, rng):
        return rng.integers(0, self.p, size=(m, n, 4), dtype=np.int64)


def make_ring(tag: str) -> ArrayRing:
    """Parse a ring tag: ``fp:P``, ``fp2:P``, ``c64``, ``quat:fp:P``."""
    t = tag.strip().lower()
    if t in ("c64", "c128", "complex"):
        return ComplexRing()
    if t in ("r64", "real"):
        return RealRing()
    parts = t.split(":")
    try:
        if parts[0] == "fp" and len(parts) == 2:
            return PrimeRing(int(parts[1]))
        if parts[0] in ("fp2", "fq2") and len(parts) == 2:
            return Fq2Ring(int(parts[1]))
        if parts[0] == "quat" and len(parts) == 3 and parts[1] == "fp":
            return QuatRing(int(parts[2]))
    except ValueError as e:
        raise ValueError(f"bad ring tag {tag!r}: {e}") from None
    raise ValueError(f"unknown ring tag {tag!r}")


def scalar_mul(ring: ArrayRing, a, b):
    """Product of two ring scalars."""
    if isinstance(ring, PrimeRing):
        return ring.scalar(a) * ring.scalar(b) % ring.p
    if isinstance(ring, ComplexRing):
        return complex(a) * complex(b)
    x = ring.full_scalar(a, 1, 1)
    return ring.rmul(x, b)[0, 0]


def center_scalar(ring: ArrayRing, v) -> Optional[Any]:
    """Normalize an alpha/beta coefficient, which must lie in the center."""
    if isinstance(ring, ComplexRing):
        return complex(v)
    if isinstance(ring, RealRing):
        return float(v)
    if isinstance(v, (int, np.integer)):
        return int(v) % ring.modulus
    raise UnsupportedRing("alpha/beta must be base-field scalars")
