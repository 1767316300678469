"""Quaternion matrices over F_p times their transpose or conjugate transpose.

A QuatMatrix keeps the four coefficient planes A, B, C, D of
M = A + B i + C j + D k as separate base-field arrays, so every base
product is a plain modular GEMM.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .counter import OpCounter
from .errors import DimensionMismatch, NoSkewUnitary, UnsupportedRing
from .matrix import Matrix, _sym_from_low, syrk_classic_dnc, tril_idx
from .ops import NAIVE, Ops
from .rings import (ConjugateTranspose, PrimeRing, QuatRing, Quaternion, Transpose,
                    quat_mul_howell_lafon, quat_mul_naive)
from .skew import ROT2, SCALAR, SkewUnitary, _apply_arr, build_skew_unitary
from .syrk import FastSyrkPlan, syrk_fast


@dataclass
class QuatMatrix:
    """M = A + B i + C j + D k with A..D over F_p."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    p: int

    def __post_init__(self):
        shapes = {x.shape for x in self.planes}
        if len(shapes) != 1:
            raise DimensionMismatch("coefficient planes must share a shape")

    @property
    def planes(self):
        return (self.A, self.B, self.C, self.D)

    @property
    def shape(self):
        return self.A.shape

    @property
    def base(self) -> PrimeRing:
        return PrimeRing(self.p)

    @classmethod
    def random(cls, p, m, n, rng):
        return cls(*(rng.integers(0, p, size=(m, n), dtype=np.int64) for _ in range(4)), p)

    @classmethod
    def from_base(cls, A, p):
        """Embed a base-field matrix (B = C = D = 0)."""
        A = np.asarray(A, dtype=np.int64) % p
        z = np.zeros_like(A)
        return cls(A, z, z.copy(), z.copy(), p)

    @classmethod
    def from_matrix(cls, M: Matrix) -> "QuatMatrix":
        """From the matrix-of-quaternions view."""
        if not isinstance(M.ring, QuatRing):
            raise UnsupportedRing("expected a quaternion matrix")
        d = M.data
        return cls(*(np.ascontiguousarray(d[..., k]) for k in range(4)), M.ring.p)

    def to_matrix(self) -> Matrix:
        return Matrix(np.stack(self.planes, axis=-1), QuatRing(self.p))

    def raw_transpose(self) -> "QuatMatrix":
        return QuatMatrix(*(np.ascontiguousarray(x.T) for x in self.planes), self.p)

    def conj_transpose(self) -> "QuatMatrix":
        p = self.p
        A, B, C, D = self.planes
        return QuatMatrix(np.ascontiguousarray(A.T),
                          *(np.ascontiguousarray((-x.T) % p) for x in (B, C, D)), p)

    def __eq__(self, other):
        if not isinstance(other, QuatMatrix):
            return NotImplemented
        return self.p == other.p and all(np.array_equal(x, y)
                                         for x, y in zip(self.planes, other.planes))


class _OpsCoeffs:
    """Quaternion coefficient arithmetic on matrices through an Ops bundle."""

    def __init__(self, ops: Ops):
        self.ops = ops
        self.p = ops.R.p
        self.inv2 = pow(2, -1, self.p) if self.p != 2 else None

    def add(self, x, y):
        return self.ops.add(x, y)

    def sub(self, x, y):
        return self.ops.sub(x, y)

    def neg(self, x):
        return self.ops.neg(x)

    def mul(self, x, y):
        return self.ops.mm(x, y)

    def half(self, x):
        self.ops.c.halvings += x.size
        return self.ops.R.scale(x, self.inv2)


def _base_ops(p, counter, gemm=NAIVE, gemm_threshold=64):
    return Ops(PrimeRing(p), Transpose, counter, gemm, gemm_threshold)


def _conform(X: QuatMatrix, Y: QuatMatrix):
    if X.p != Y.p:
        raise DimensionMismatch("operands over different fields")
    if X.shape[1] != Y.shape[0]:
        raise DimensionMismatch(f"cannot multiply {X.shape} by {Y.shape}")


def quat_gemm_baseline(X: QuatMatrix, Y: QuatMatrix, counter: OpCounter = None,
                       gemm: str = NAIVE, gemm_threshold: int = 64) -> QuatMatrix:
    """Howell-Lafon with matrix coefficients: 8 base products."""
    _conform(X, Y)
    if X.p == 2:
        raise UnsupportedRing("the eight-product scheme needs characteristic != 2")
    ops = _base_ops(X.p, counter, gemm, gemm_threshold)
    w = quat_mul_howell_lafon(Quaternion(*X.planes), Quaternion(*Y.planes), _OpsCoeffs(ops))
    return QuatMatrix(*w, X.p)


def quat_gemm_naive16(X: QuatMatrix, Y: QuatMatrix, counter: OpCounter = None) -> QuatMatrix:
    """Schoolbook expansion: 16 base products."""
    _conform(X, Y)
    ops = _base_ops(X.p, counter)
    w = quat_mul_naive(Quaternion(*X.planes), Quaternion(*Y.planes), _OpsCoeffs(ops))
    return QuatMatrix(*w, X.p)


def _low_expr(ops: Ops, m, terms):
    """Lower triangle of sum(sign * matrix) as a full symmetric matrix."""
    idx = tril_idx(m)
    sign, first = terms[0]
    acc = first[idx].copy() if sign > 0 else ops.neg(first[idx])
    for sign, x in terms[1:]:
        acc = ops.add(acc, x[idx]) if sign > 0 else ops.sub(acc, x[idx])
    out = ops.R.zeros(m, m)
    out[idx] = acc
    _sym_from_low(ops.R, Transpose, out)
    return out


def quat_syrk_transpose_7m(M: QuatMatrix, counter: OpCounter = None,
                           gemm: str = NAIVE, gemm_threshold: int = 64) -> QuatMatrix:
    """M rawT(M) = S1 + S2 i + S3 j + S4 k with seven base products."""
    ops = _base_ops(M.p, counter, gemm, gemm_threshold)
    A, B, C, D = M.planes
    m = A.shape[0]
    add, sub, mm = ops.add, ops.sub, ops.mm
    u1 = add(A, B)
    u2 = sub(A, B)
    u3 = add(C, D)
    p1 = mm(C, A.T)
    p2 = mm(D, B.T)
    p3 = mm(u3, u2.T)
    p4 = mm(u1, u3.T)
    p5 = mm(A, B.T)
    p6 = mm(C, D.T)
    p7 = mm(add(u1, u3), sub(u2, u3).T)
    r1 = add(p5, p6)
    r2 = sub(p5, p6)
    r3 = add(p1, p1.T)
    r4 = sub(p2, p2.T)
    s1 = _low_expr(ops, m, [(1, p7), (-1, p3), (1, p4), (1, r1), (-1, r2.T)])
    s2 = add(r1, r2.T)
    s3 = add(r3, r4)
    s4 = sub(add(p3, p4), s3.T)
    return QuatMatrix(s1, s2, s3, s4, M.p)


def _self_transpose_product(X, p, counter, threshold):
    """X X^T over F_p through the fast scheme (classic when no Y exists)."""
    R = PrimeRing(p)
    A = Matrix(X, R)
    try:
        C = syrk_fast(A, Transpose, FastSyrkPlan(threshold=threshold), counter)
    except NoSkewUnitary:
        C = syrk_classic_dnc(A, Transpose, threshold, counter)
    _sym_from_low(R, Transpose, C.data)
    return C.data


def quat_syrk_conj_6m(M: QuatMatrix, counter: OpCounter = None, threshold: int = 64,
                      gemm: str = NAIVE, gemm_threshold: int = 64) -> QuatMatrix:
    """M conjT(M) = H1 + H2 i + H3 j + H4 k with six base products.

    H1 is symmetric, H2..H4 skew-symmetric.  Q6 = (U1 + U2)(U1 + U2)^T is a
    self-transpose product and goes through the fast SYRK.
    """
    ops = _base_ops(M.p, counter, gemm, gemm_threshold)
    A, B, C, D = M.planes
    m = A.shape[0]
    add, sub, mm = ops.add, ops.sub, ops.mm
    u1 = add(A, B)
    u2 = add(C, D)
    q1 = mm(C, A.T)
    q2 = mm(D, B.T)
    q3 = mm(u2, u1.T)
    q4 = mm(A, B.T)
    q5 = mm(C, D.T)
    q6 = _self_transpose_product(add(u1, u2), M.p, ops.c, threshold)
    t1 = sub(q1, q2)
    t2 = add(q4, q5)
    t3 = sub(add(q1, q2), q3)
    h1 = _low_expr(ops, m, [(1, q6), (-1, q3.T), (-1, q3), (-1, t2.T), (-1, t2)])
    h2 = sub(t2.T, t2)
    h3 = sub(t1, t1.T)
    h4 = sub(t3.T, t3)
    return QuatMatrix(h1, h2, h3, h4, M.p)


# ---------------------------------------------------------------------------
# recursive kernels

def _apply_base_y(ops: Ops, x, Y: SkewUnitary, adjoint=False):
    """x Y for quaternion x and a skew-unitary with base-field entries."""
    if Y.form == SCALAR:
        i = int(Y.i)
        if i % ops.R.p == 1:
            return x.copy()
        return ops.ymul(x, i, base=True)
    if Y.form == ROT2:
        return _apply_arr(ops, x, Y, adjoint)
    raise UnsupportedRing("explicit skew-unitary not supported here")


def _rawT(x):
    return x.swapaxes(0, 1)


def _qqt(ops: Ops, Y0: SkewUnitary, a, thr, cache):
    """a rawT(a) for an interleaved quaternion array a (full result)."""
    R = ops.R
    m, n = a.shape[0], a.shape[1]
    if m <= thr or n <= thr or m < 2 or n < 2:
        return ops.leaf_mm(a, _rawT(a))
    me, ne = m & ~1, n & ~1
    if me < m or ne < n:
        out = R.zeros(m, m)
        core = _qqt(ops, Y0, a[:me, :ne], thr, cache)
        if ne < n:
            col = a[:me, ne:]
            ops.add(core, ops.leaf_mm(col, _rawT(col)), out=core)
        out[:me, :me] = core
        if me < m:
            out[me:, :] = ops.leaf_mm(a[me:], _rawT(a))
            out[:me, me:] = ops.leaf_mm(a[:me], _rawT(a[me:]))
        return out
    s, h = m // 2, n // 2
    a11, a12, a21, a22 = a[:s, :h], a[:s, h:], a[s:, :h], a[s:, h:]
    out = R.zeros(m, m)
    if Y0.form == ROT2 and h % 2:
        out[:s, :s] = ops.add(_qqt(ops, Y0, a11, thr, cache), _qqt(ops, Y0, a12, thr, cache))
        out[s:, s:] = ops.add(_qqt(ops, Y0, a21, thr, cache), _qqt(ops, Y0, a22, thr, cache))
        out[s:, :s] = ops.add(ops.mm(a21, _rawT(a11)), ops.mm(a22, _rawT(a12)))
        out[:s, s:] = ops.add(ops.mm(a11, _rawT(a21)), ops.mm(a12, _rawT(a22)))
        return out
    Y = cache.get(h)
    if Y is None:
        Y = cache[h] = Y0.with_dim(h)
    s1 = _apply_base_y(ops, ops.sub(a21, a11), Y)
    s2 = ops.sub(a22, _apply_base_y(ops, a21, Y))
    s3 = ops.sub(s1, a22)
    s4 = ops.add(s3, a12)
    p1 = _qqt(ops, Y0, a11, thr, cache)
    p2 = _qqt(ops, Y0, a12, thr, cache)
    p5 = _qqt(ops, Y0, s3, thr, cache)
    p3 = ops.mm(a22, _rawT(s4))
    pt3 = ops.mm(s4, _rawT(a22))
    p4 = ops.mm(s1, _rawT(s2))
    pt4 = ops.mm(s2, _rawT(s1))
    u1 = ops.add(p1, p5)
    u2 = ops.add(u1, p4)
    ut2 = ops.add(u1, pt4)
    out[:s, :s] = ops.add(p1, p2)
    out[s:, :s] = ops.add(u2, p3)
    out[:s, s:] = ops.add(ut2, pt3)
    out[s:, s:] = ops.add(u2, pt4)
    return out


def quat_syrk_transpose_recursive(M: QuatMatrix, Y: Optional[SkewUnitary] = None,
                                  threshold: int = 64, counter: OpCounter = None,
                                  gemm: str = NAIVE) -> QuatMatrix:
    """M rawT(M) by three recursive calls and four general products per level.

    Y has base-field entries with Y Y^T = -I; such entries commute with
    quaternions, which is what makes the recursion valid.
    """
    p = M.p
    base = PrimeRing(p)
    if Y is None:
        Y = build_skew_unitary(base, Transpose, 2)
    if not isinstance(Y.ring, PrimeRing) or Y.kind is not Transpose:
        raise NoSkewUnitary("need a base-field skew-unitary for the transpose")
    R = QuatRing(p)
    ops = Ops(R, ConjugateTranspose, counter, gemm, threshold)
    with ops.product():
        out = _qqt(ops, Y, M.to_matrix().data, max(1, threshold), {})
    return QuatMatrix.from_matrix(Matrix(out, R))


def quat_syrk_conj_recursive(M: QuatMatrix, threshold: int = 64, counter: OpCounter = None,
                             plan: Optional[FastSyrkPlan] = None) -> QuatMatrix:
    """M conjT(M) through the five-product scheme over the quaternions,
    with the scalar skew-unitary a + b i, a^2 + b^2 = -1."""
    plan = plan or FastSyrkPlan(threshold=threshold)
    Q = M.to_matrix()
    C = syrk_fast(Q, ConjugateTranspose, plan, counter)
    _sym_from_low(Q.ring, ConjugateTranspose, C.data)
    return QuatMatrix.from_matrix(C)
