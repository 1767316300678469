"""Skew-unitary matrices Y with Y phi(Y) = -I and their structured application."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from .counter import OpCounter
from .errors import DimensionMismatch, NoSkewUnitary, OddDimension
from .field import Fq2Ctx, mod_sqrt, sos_decompose, sqrt_minus_one
from .matrix import Matrix
from .ops import Ops
from .rings import (AdjointKind, ArrayRing, ComplexRing, ConjugateTranspose, Fq2Ring,
                    PrimeRing, QuatRing, Transpose)

SCALAR = "scalar"
ROT2 = "rot2"
EXPLICIT = "explicit"


@dataclass(frozen=True)
class SkewUnitary:
    """One of
    ScalarI(i):    Y = i I_n
    Rot2(a, b):    Y = [[a, b], [-b, a]] (x) I_{n/2}, a, b in the base field
    Explicit(Y):   a materialized n x n array
    """

    form: str
    ring: ArrayRing
    kind: AdjointKind
    n: int
    i: Any = None
    a: int = 0
    b: int = 0
    Y: Any = None

    def __post_init__(self):
        object.__setattr__(self, "kind", AdjointKind.parse(self.kind))
        if self.form == ROT2 and self.n % 2:
            raise OddDimension(f"Rot2 skew-unitary needs even n, got {self.n}")
        if self.form == EXPLICIT and (self.Y is None or self.Y.shape[:2] != (self.n, self.n)):
            raise DimensionMismatch("explicit Y must be n x n")

    def with_dim(self, n: int) -> "SkewUnitary":
        if n == self.n:
            return self
        if self.form == EXPLICIT:
            raise DimensionMismatch("explicit skew-unitary has a fixed dimension")
        return replace(self, n=n)

    def describe(self) -> str:
        if self.form == SCALAR:
            return f"ScalarI(i={_fmt_scalar(self.i)}) n={self.n}"
        if self.form == ROT2:
            return f"Rot2(a={self.a}, b={self.b}) n={self.n}"
        return f"Explicit n={self.n}"

    def materialize(self):
        R, n = self.ring, self.n
        if self.form == SCALAR:
            y = R.zeros(n, n)
            idx = np.arange(n)
            y[idx, idx] = R.scalar(self.i)
            return y
        if self.form == ROT2:
            h = n // 2
            y = R.zeros(n, n)
            idx = np.arange(h)
            a, b = R.scalar(self.a), R.scalar(self.b)
            nb = R.scalar(-self.b)
            y[idx, idx] = a
            y[idx, idx + h] = b
            y[idx + h, idx] = nb
            y[idx + h, idx + h] = a
            return y
        return self.Y.copy()

    def verify(self) -> bool:
        """Y phi(Y) == -I."""
        R = self.ring
        y = self.materialize()
        lhs = R.matmul(y, R.adjoint(y, self.kind))
        return R.equal(lhs, R.neg(R.eye(self.n)))


def _fmt_scalar(c):
    if isinstance(c, np.ndarray):
        return "(" + ",".join(str(int(v)) for v in c) + ")"
    return str(c)


def ScalarI(ring, kind, n, i) -> SkewUnitary:
    return SkewUnitary(SCALAR, ring, kind, n, i=ring.scalar(i))


def Rot2(ring, kind, n, a, b) -> SkewUnitary:
    return SkewUnitary(ROT2, ring, kind, n, a=int(a), b=int(b))


def Explicit(ring, kind, Y) -> SkewUnitary:
    return SkewUnitary(EXPLICIT, ring, kind, Y.shape[0], Y=Y)


def _rot2_pair(p: int):
    """(a, b) with a^2 + b^2 = -1 mod p, taking a = 1 when p = 3 mod 8."""
    if p == 2:
        return 1, 0
    if p % 8 == 3:
        return 1, mod_sqrt(p - 2, _prime_ctx(p))
    return sos_decompose(p - 1, _prime_ctx(p))


def _prime_ctx(p):
    from .field import PrimeFieldCtx
    return PrimeFieldCtx(p)


def build_skew_unitary(ring: ArrayRing, kind, n: int, strategy: str = "auto") -> SkewUnitary:
    """Choose a skew-unitary for (ring, kind) in dimension n.

    strategy: "auto" picks a scalar one when available, "rot2" forces the
    2x2-block construction, "scalar" refuses anything else.
    """
    kind = AdjointKind.parse(kind)
    if strategy not in ("auto", "rot2", "scalar"):
        raise ValueError(f"unknown skew-unitary strategy {strategy!r}")
    if isinstance(ring, ComplexRing):
        if kind is ConjugateTranspose:
            raise NoSkewUnitary("no skew-unitary matrix exists for the complex conjugate transpose")
        if strategy == "rot2":
            raise NoSkewUnitary("complex transpose uses the scalar construction only")
        return ScalarI(ring, kind, n, 1j)
    if isinstance(ring, QuatRing):
        if kind is Transpose:
            raise NoSkewUnitary("quaternion transpose is not an antihomomorphism")
        if strategy == "rot2":
            raise NoSkewUnitary("quaternion conjugate transpose uses the scalar construction")
        p = ring.p
        a, b = (1, 0) if p == 2 else sos_decompose(p - 1, ring.ctx)
        return ScalarI(ring, kind, n, (a, b, 0, 0))
    if isinstance(ring, PrimeRing):
        i = sqrt_minus_one(ring.ctx)
        if strategy == "rot2" or (i is None and strategy == "auto"):
            if n % 2:
                raise OddDimension(f"Rot2 skew-unitary needs even n, got {n}")
            return Rot2(ring, kind, n, *_rot2_pair(ring.p))
        if i is None:
            raise NoSkewUnitary(f"-1 is not a square mod {ring.p}")
        return ScalarI(ring, kind, n, i)
    if isinstance(ring, Fq2Ring):
        ctx: Fq2Ctx = ring.ctx
        p = ring.p
        if strategy == "rot2":
            if n % 2:
                raise OddDimension(f"Rot2 skew-unitary needs even n, got {n}")
            return Rot2(ring, kind, n, *_rot2_pair(p))
        if kind is Transpose:
            return ScalarI(ring, kind, n, sqrt_minus_one(ctx))
        base_i = sqrt_minus_one(ctx.base)
        if base_i is not None:
            # fixed by Frobenius, so i conj(i) = i^2 = -1
            return ScalarI(ring, kind, n, (base_i, 0))
        # q = 3 mod 4: i = a + b iota with iota^2 = -1, conj(iota) = -iota
        a, b = sos_decompose(p - 1, ctx.base)
        iota = sqrt_minus_one(ctx)
        i = ctx.add((a, 0), ctx.mul((b, 0), iota))
        return ScalarI(ring, kind, n, i)
    raise NoSkewUnitary(f"no skew-unitary construction for {ring!r}")


# ---------------------------------------------------------------------------
# application

def _apply_arr(ops: Ops, x, Y: SkewUnitary, adjoint: bool, out=None):
    """x Y (or x phi(Y)) without materializing Y."""
    R = ops.R
    n = x.shape[1]
    if Y.n != n:
        raise DimensionMismatch(f"Y has dimension {Y.n}, operand has {n} columns")
    if Y.form == SCALAR:
        c = R.scalar_conj(Y.i) if (adjoint and Y.kind is ConjugateTranspose) else Y.i
        if R.scalar_is_one(c):
            if out is None:
                return x.copy()
            out[...] = x
            return out
        return ops.ymul(x, c, out)
    if Y.form == ROT2:
        h = n // 2
        x1, x2 = x[:, :h], x[:, h:]
        a, b = Y.a, Y.b
        if adjoint:
            b = -b
        if out is None:
            out = R.zeros(x.shape[0], n)
        o1, o2 = out[:, :h], out[:, h:]
        # out = [a x1 - b x2, b x1 + a x2]; both halves are formed before
        # writing so out may alias x
        k = x1.shape[0] * x1.shape[1]
        one = (a - 1) % R.modulus == 0
        # a = 1 skips the multiplication by a
        ops.c.ymul((2 if one else 4) * k, ops.scale_cost)
        ops.c.add(2 * k)
        r1 = R.lincomb(x1, a, x2, -b)
        r2 = R.lincomb(x1, b, x2, a)
        o1[...] = r1
        o2[...] = r2
        return out
    y = Y.Y if not adjoint else R.adjoint(Y.Y, Y.kind)
    r = ops.leaf_mm(x, y)
    if out is None:
        return r
    out[...] = r
    return out


def apply_right(A: Matrix, Y: SkewUnitary, counter: OpCounter = None) -> Matrix:
    ops = Ops(A.ring, Y.kind, counter)
    return Matrix(_apply_arr(ops, A.data, Y, False), A.ring)


def apply_right_adjoint(A: Matrix, Y: SkewUnitary, counter: OpCounter = None) -> Matrix:
    ops = Ops(A.ring, Y.kind, counter)
    return Matrix(_apply_arr(ops, A.data, Y, True), A.ring)


def materialize(Y: SkewUnitary) -> Matrix:
    return Matrix(Y.materialize(), Y.ring)
