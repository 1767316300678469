"""Five-product recursive computation of Low(A phi(A)).

With S1 = (A21 - A11) Y, S2 = A22 - A21 Y, S3 = S1 - A22, S4 = S3 + A12
and Y phi(Y) = -I, three recursive products P1 = A11 phi(A11),
P2 = A12 phi(A12), P5 = S3 phi(S3) and two general products
P3 = A22 phi(S4), P4 = S1 phi(S2) suffice:

    Low(C11) = Low(P1 + P2)
    C21      = P1 + P5 + P4 + P3
    Low(C22) = Low(P1 + P5 + P4 + phi(P4))

Two memory schedules are provided.  The pure one overwrites an m x m
output buffer and needs no other storage when n <= m.  The accumulating
one computes Low(C) <- alpha Low(A phi(A)) + beta Low(C) with a single
floor(m/2)-square temporary.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, NamedTuple, Optional

import numpy as np

from .counter import OpCounter
from .errors import DimensionMismatch
from .matrix import (Matrix, _classic_level, _low_add, _sym_from_low, _syrk_naive_arr,
                     _zero_upper, tril_idx)
from .ops import NAIVE, STRASSEN, Ops
from .rings import AdjointKind, center_scalar
from .skew import ROT2, SkewUnitary, _apply_arr, build_skew_unitary

# Step tables: (label, destination block).  Every internal node records
# these through OpCounter.step, so tests can compare the live order with
# the table.
PURE_SCHEDULE = (
    ("S1 = (A21 - A11) Y", "C21"),
    ("S2 = A22 - A21 Y", "C12"),
    ("phi(P4) = S2 phi(S1)", "C22"),
    ("S3 = S1 - A22", "C21"),
    ("P5 = S3 phi(S3)", "C12"),
    ("S4 = S3 + A12", "C11"),
    ("P3 = A22 phi(S4)", "C21"),
    ("P1 = A11 phi(A11)", "C11"),
    ("U1 = Low(P1) + Low(P5)", "C12"),
    ("Up(U1) = phi(Low(U1))", "C12"),
    ("U2 = U1 + P4", "C12"),
    ("U4 = U2 + P3", "C21"),
    ("U5 = Low(U2) + Low(phi(P4))", "C22"),
    ("P2 = A12 phi(A12)", "C12"),
    ("U3 = Low(P1) + Low(P2)", "C11"),
)

ACC_SCHEDULE = (
    ("Low(C22) = beta Low(C22); C21 = beta C21", "C22,C21"),
    ("S1 = (A21 - A11) Y", "tmp"),
    ("S2 = A22 - A21 Y", "C12"),
    ("P4 = alpha S1 phi(S2), by blocks", "Up(C11)"),
    ("C21 += P4; Low(C22) += Low(P4 + phi(P4))", "C21,C22"),
    ("S3 = S1 - A22", "tmp"),
    ("P5 = alpha S3 phi(S3)", "C12"),
    ("S4 = S3 + A12", "tmp"),
    ("P3 = alpha A22 phi(S4), by blocks; C21 += P3", "Up(C11),C21"),
    ("P1 = alpha A11 phi(A11)", "tmp"),
    ("U1 = Low(P1) + Low(P5)", "C12"),
    ("Up(U1) = phi(Low(U1))", "C12"),
    ("U4 = C21 + U1", "C21"),
    ("U5 = Low(C22) + Low(U1)", "C22"),
    ("P2 = alpha A12 phi(A12) + beta C11", "C11"),
    ("U3 = Low(P1) + Low(P2)", "C11"),
)

PURE = "pure"
ACC = "acc"


@dataclass
class FastSyrkPlan:
    """threshold: sizes at or below it go to the classical base case.
    gemm: "naive" or "strassen" for the general products P3, P4.
    skew: "auto", "scalar" or "rot2" (construction of Y).
    Y: optional prebuilt skew-unitary, resized per level.
    """

    threshold: int = 64
    gemm: str = NAIVE
    gemm_threshold: Optional[int] = None
    schedule: str = PURE
    skew: str = "auto"
    Y: Optional[SkewUnitary] = None

    def __post_init__(self):
        if self.threshold < 1:
            raise ValueError("threshold must be at least 1")
        if self.gemm not in (NAIVE, STRASSEN):
            raise ValueError(f"unknown general-product strategy {self.gemm!r}")
        if self.schedule not in (PURE, ACC):
            raise ValueError(f"unknown schedule {self.schedule!r}")


class _Run:
    """State shared across one recursive evaluation."""

    def __init__(self, ops: Ops, Y0: SkewUnitary, threshold: int):
        self.ops = ops
        self.Y0 = Y0
        self.thr = threshold
        self.rot2 = Y0.form == ROT2
        self._ys: Dict[int, SkewUnitary] = {}

    def Y(self, n):
        y = self._ys.get(n)
        if y is None:
            y = self._ys[n] = self.Y0.with_dim(n)
        return y

    def base(self, m, n):
        return m <= self.thr or n <= self.thr or m < 2 or n < 2


def _skew_for(ring, kind, plan: FastSyrkPlan) -> SkewUnitary:
    if plan.Y is not None:
        return plan.Y
    return build_skew_unitary(ring, kind, 2, plan.skew)


def _make_run(ring, kind, plan, counter):
    gt = plan.gemm_threshold if plan.gemm_threshold is not None else plan.threshold
    ops = Ops(ring, kind, counter, plan.gemm, gt)
    return _Run(ops, _skew_for(ring, kind, plan), plan.threshold)


# ---------------------------------------------------------------------------
# peeling

class PeelPlan(NamedTuple):
    """Even core plus the border pieces removed from it.

    col:  last column of the first me rows (rank-1 update on Low(C_core))
    rows: trailing row block (its products fill the last row(s) of C)
    """

    core: Matrix
    col: Optional[Matrix]
    rows: Optional[Matrix]


def peel_to_even(A: Matrix) -> PeelPlan:
    m, n = A.shape
    me, ne = m & ~1, n & ~1
    d = A.data
    col = Matrix(d[:me, ne:], A.ring) if ne < n else None
    rows = Matrix(d[me:], A.ring) if me < m else None
    return PeelPlan(Matrix(d[:me, :ne], A.ring), col, rows)


def _rank1_low(ops: Ops, col, c, alpha=None):
    """Low(c) += alpha Low(col phi(col)) for a single column, entrywise."""
    R = ops.R
    me = col.shape[0]
    if me == 0:
        return
    i, j = tril_idx(me)
    v = col[:, 0]
    w = R.conj(v) if (ops.kind is AdjointKind.CONJUGATE_TRANSPOSE and R.has_conj) else v
    ops.c.mul(len(i), R.mul_cost)
    prod = R.emul(v[i], w[j])
    if alpha is not None:
        prod = ops.scale(prod[:, None], alpha)[:, 0]
    c[i, j] = ops.add(c[i, j][:, None], prod[:, None])[:, 0]


def _last_rows(ops: Ops, a, c, me, alpha=None, beta=None):
    """Rows me.. of Low(c) from the trailing rows of a."""
    for r in range(me, a.shape[0]):
        row = ops.leaf_mm(a[r:r + 1], ops.adj(a[:r + 1]))
        if alpha is not None:
            row = ops.scale(row, alpha)
        if beta is not None:
            row = ops.add(row, ops.scale(c[r:r + 1, :r + 1], beta))
        c[r:r + 1, :r + 1] = row


def apply_peel_fixups(plan: PeelPlan, A: Matrix, kind, C: Matrix, counter: OpCounter = None):
    """Complete Low(C) = Low(A phi(A)) given Low of the core result in C."""
    ops = Ops(A.ring, AdjointKind.parse(kind), counter)
    me = plan.core.rows
    if plan.col is not None:
        _rank1_low(ops, plan.col.data, C.data[:me, :me])
    if plan.rows is not None:
        _last_rows(ops, A.data, C.data, me)


# ---------------------------------------------------------------------------
# pure schedule

def _pure(run: _Run, a, c, level):
    """Low(c) <- Low(a phi(a)); the rest of the square block c is scratch."""
    ops = run.ops
    m, n = a.shape[0], a.shape[1]
    if run.base(m, n):
        c[...] = ops.syrk_full(a)
        return
    me, ne = m & ~1, n & ~1
    if me < m or ne < n:
        _pure(run, a[:me, :ne], c[:me, :me], level)
        if ne < n:
            _rank1_low(ops, a[:me, ne:], c[:me, :me])
        if me < m:
            _last_rows(ops, a, c, me)
        return
    s, h = m // 2, n // 2
    if run.rot2 and h % 2:
        _classic_level(ops, a, c, lambda x, y: _pure(run, x, y, level + 1))
        return
    _pure_level(run, a, c, s, h, level)


def _pure_level(run: _Run, a, c, s, h, level):
    ops, R = run.ops, run.ops.R
    Y = run.Y(h)
    a11, a12, a21, a22 = a[:s, :h], a[:s, h:], a[s:, :h], a[s:, h:]
    c11, c12, c21, c22 = c[:s, :s], c[:s, s:], c[s:, :s], c[s:, s:]
    wide = h > s
    if wide:
        x, z = ops.alloc(s, h), ops.alloc(s, h)
        w = z
    else:
        x, z, w = c21[:, :h], c12[:, :h], c11[:, :h]
    st = ops.step
    ops.sub(a21, a11, out=x)
    _apply_arr(ops, x, Y, False, out=x)
    st(level, *PURE_SCHEDULE[0])
    _apply_arr(ops, a21, Y, False, out=z)
    ops.sub(a22, z, out=z)
    st(level, *PURE_SCHEDULE[1])
    ops.mm(z, ops.adj(x), out=c22)
    st(level, *PURE_SCHEDULE[2])
    ops.sub(x, a22, out=x)
    st(level, *PURE_SCHEDULE[3])
    _pure(run, x, c12, level + 1)
    st(level, *PURE_SCHEDULE[4])
    ops.add(x, a12, out=w)
    st(level, *PURE_SCHEDULE[5])
    ops.mm(a22, ops.adj(w), out=c21)
    st(level, *PURE_SCHEDULE[6])
    if wide:
        ops.free(x)
        ops.free(z)
    _pure(run, a11, c11, level + 1)
    st(level, *PURE_SCHEDULE[7])
    _low_add(ops, c12, c11)
    st(level, *PURE_SCHEDULE[8])
    _sym_from_low(R, ops.kind, c12)
    st(level, *PURE_SCHEDULE[9])
    ops.add(c12, ops.adj(c22), out=c12)
    st(level, *PURE_SCHEDULE[10])
    ops.add(c21, c12, out=c21)
    st(level, *PURE_SCHEDULE[11])
    _low_add(ops, c22, c12)
    st(level, *PURE_SCHEDULE[12])
    _pure(run, a12, c12, level + 1)
    st(level, *PURE_SCHEDULE[13])
    _low_add(ops, c11, c12)
    st(level, *PURE_SCHEDULE[14])


# ---------------------------------------------------------------------------
# accumulating schedule

def _bands(s):
    """Row bands of height <= floor(s/2), column bands of width <= ceil(s/2)."""
    h1, h2 = s // 2, s - s // 2
    rows = [(r, min(r + h1, s)) for r in range(0, s, h1)]
    cols = [(q, min(q + h2, s)) for q in range(0, s, h2)]
    return rows, cols


def _blocked_product(ops: Ops, x, y, s, stage, fold, alpha):
    """alpha x phi(y) (s x s) formed block by block in ``stage``.

    Each block is handed to fold(block, r0, r1, q0, q1) before the next
    one overwrites the stage.  Counted as a single product.
    """
    rows, cols = _bands(s)
    one = ops.R.scalar_is_one(alpha)
    with ops.product():
        for r0, r1 in rows:
            for q0, q1 in cols:
                blk = stage[:r1 - r0, :q1 - q0]
                ops.mm(x[r0:r1], ops.adj(y[q0:q1]), out=blk)
                if not one:
                    ops.scale(blk, alpha, out=blk)
                fold(blk, r0, r1, q0, q1)


def _scale_low(ops: Ops, c, beta):
    R = ops.R
    idx = tril_idx(c.shape[0])
    if R.scalar_is_zero(beta):
        c[idx] = 0
    elif not R.scalar_is_one(beta):
        c[idx] = ops.scale(c[idx][:, None], beta)[:, 0]


def _scale_full(ops: Ops, c, beta):
    R = ops.R
    if R.scalar_is_zero(beta):
        c[...] = 0
    elif not R.scalar_is_one(beta):
        ops.scale(c, beta, out=c)


def _acc(run: _Run, alpha, a, beta, c, tmp, level):
    """Low(c) <- alpha Low(a phi(a)) + beta Low(c).

    tmp must hold at least floor(m/2) x max(floor(m/2), floor(n/2)).
    Up(c) is scratch.
    """
    ops = run.ops
    R = ops.R
    m, n = a.shape[0], a.shape[1]
    if m < 4 or run.base(m, n) or R.scalar_is_zero(alpha):
        _syrk_naive_arr(ops, a, c, alpha, beta)
        return
    me, ne = m & ~1, n & ~1
    if me < m or ne < n:
        _acc(run, alpha, a[:me, :ne], beta, c[:me, :me], tmp, level)
        one = R.scalar_is_one(alpha)
        if ne < n:
            _rank1_low(ops, a[:me, ne:], c[:me, :me], None if one else alpha)
        if me < m:
            _last_rows(ops, a, c, me, None if one else alpha,
                       None if R.scalar_is_zero(beta) else beta)
        return
    s, h = m // 2, n // 2
    a11, a12, a21, a22 = a[:s, :h], a[:s, h:], a[s:, :h], a[s:, h:]
    c11, c21, c22 = c[:s, :s], c[s:, :s], c[s:, s:]
    if run.rot2 and h % 2:
        _acc(run, alpha, a11, beta, c11, tmp, level + 1)
        _acc(run, alpha, a12, 1, c11, tmp, level + 1)
        _acc(run, alpha, a21, beta, c22, tmp, level + 1)
        _acc(run, alpha, a22, 1, c22, tmp, level + 1)
        _scale_full(ops, c21, beta)
        with ops.product():
            for x, y in ((a21, a11), (a22, a12)):
                p = ops.mm(x, ops.adj(y))
                if not R.scalar_is_one(alpha):
                    ops.scale(p, alpha, out=p)
                ops.add(c21, p, out=c21)
        return
    _acc_level(run, alpha, a, beta, c, tmp, s, h, level)


def _acc_level(run: _Run, alpha, a, beta, c, tmp, s, h, level):
    ops, R = run.ops, run.ops.R
    Y = run.Y(h)
    st = ops.step
    kind = ops.kind
    conj = kind is AdjointKind.CONJUGATE_TRANSPOSE and R.has_conj
    a11, a12, a21, a22 = a[:s, :h], a[:s, h:], a[s:, :h], a[s:, h:]
    c11, c12, c21, c22 = c[:s, :s], c[:s, s:], c[s:, :s], c[s:, s:]
    s1 = s // 2
    stage = c11[:s1, s1:]
    one = R.scalar_is_one(alpha)
    wide = h > s

    _scale_low(ops, c22, beta)
    _scale_full(ops, c21, beta)
    st(level, *ACC_SCHEDULE[0])

    t = tmp[:s, :h]
    ops.sub(a21, a11, out=t)
    _apply_arr(ops, t, Y, False, out=t)
    st(level, *ACC_SCHEDULE[1])

    z = ops.alloc(s, h) if wide else c12[:, :h]
    _apply_arr(ops, a21, Y, False, out=z)
    ops.sub(a22, z, out=z)
    st(level, *ACC_SCHEDULE[2])

    def fold_p4(blk, r0, r1, q0, q1):
        ops.add(c21[r0:r1, q0:q1], blk, out=c21[r0:r1, q0:q1])
        ii, jj = np.meshgrid(np.arange(r0, r1), np.arange(q0, q1), indexing="ij")
        lo = ii >= jj
        if lo.any():
            c22[ii[lo], jj[lo]] = ops.add(c22[ii[lo], jj[lo]][:, None], blk[lo][:, None])[:, 0]
        up = jj >= ii
        if up.any():
            v = blk[up]
            if conj:
                v = R.conj(v)
            c22[jj[up], ii[up]] = ops.add(c22[jj[up], ii[up]][:, None], v[:, None])[:, 0]

    _blocked_product(ops, t, z, s, stage, fold_p4, alpha)
    st(level, *ACC_SCHEDULE[3])
    st(level, *ACC_SCHEDULE[4])
    if wide:
        ops.free(z)

    ops.sub(t, a22, out=t)
    st(level, *ACC_SCHEDULE[5])

    _pure(run, t, c12, level + 1)
    if not one:
        _scale_low(ops, c12, alpha)
    st(level, *ACC_SCHEDULE[6])

    ops.add(t, a12, out=t)
    st(level, *ACC_SCHEDULE[7])

    def fold_p3(blk, r0, r1, q0, q1):
        ops.add(c21[r0:r1, q0:q1], blk, out=c21[r0:r1, q0:q1])

    _blocked_product(ops, a22, t, s, stage, fold_p3, alpha)
    st(level, *ACC_SCHEDULE[8])

    p1 = tmp[:s, :s]
    _pure(run, a11, p1, level + 1)
    if not one:
        _scale_low(ops, p1, alpha)
    st(level, *ACC_SCHEDULE[9])

    _low_add(ops, c12, p1)
    st(level, *ACC_SCHEDULE[10])
    _sym_from_low(R, kind, c12)
    st(level, *ACC_SCHEDULE[11])
    ops.add(c21, c12, out=c21)
    st(level, *ACC_SCHEDULE[12])
    _low_add(ops, c22, c12)
    st(level, *ACC_SCHEDULE[13])

    # Low(P1) occupies tmp[:s, :s]; its strict upper part is free
    _acc(run, alpha, a12, beta, c11, tmp[:s1, s1:], level + 1)
    st(level, *ACC_SCHEDULE[14])
    _low_add(ops, c11, p1)
    st(level, *ACC_SCHEDULE[15])


def acc_workspace_shape(m: int, n: int):
    """Shape of the temporary the accumulating schedule allocates."""
    s = m // 2
    return s, max(s, n // 2)


# ---------------------------------------------------------------------------
# public entry points

def _check(A: Matrix, kind):
    kind = AdjointKind.parse(kind)
    A.ring.check_kind(kind)
    return A.ring, kind


def syrk_fast(A: Matrix, kind, plan: Optional[FastSyrkPlan] = None,
              counter: OpCounter = None) -> Matrix:
    """m x m matrix whose lower triangle is Low(A phi(A)); the upper is zero."""
    ring, kind = _check(A, kind)
    plan = plan or FastSyrkPlan()
    run = _make_run(ring, kind, plan, counter)
    m = A.rows
    C = Matrix.zeros(ring, m, m)
    if plan.schedule == ACC:
        syrk_fast_acc(1, A, kind, 0, C, plan, counter)
    else:
        with run.ops.product():
            _pure(run, A.data, C.data, 0)
    _zero_upper(C.data)
    return C


def syrk_fast_acc(alpha, A: Matrix, kind, beta, C: Matrix,
                  plan: Optional[FastSyrkPlan] = None, counter: OpCounter = None) -> None:
    """Low(C) <- alpha Low(A phi(A)) + beta Low(C), in place.

    alpha and beta are base-field (central) scalars.  Up(C) is used as
    scratch; one temporary of floor(m/2) x max(floor(m/2), floor(n/2))
    scalars is allocated.
    """
    ring, kind = _check(A, kind)
    m, n = A.shape
    if C.shape != (m, m):
        raise DimensionMismatch(f"C must be {m}x{m}, got {C.shape}")
    plan = plan or FastSyrkPlan()
    run = _make_run(ring, kind, plan, counter)
    ops = run.ops
    alpha = center_scalar(ring, alpha)
    beta = center_scalar(ring, beta)
    with ops.product():
        if m < 4 or run.base(m, n) or ring.scalar_is_zero(alpha):
            _syrk_naive_arr(ops, A.data, C.data, alpha, beta)
            return
        ts = acc_workspace_shape(m, n)
        tmp = ops.alloc(*ts)
        try:
            _acc(run, alpha, A.data, beta, C.data, tmp, 0)
        finally:
            ops.free(tmp)


def syrk(A: Matrix, kind, algo: str = "fast", plan: Optional[FastSyrkPlan] = None,
         counter: OpCounter = None) -> Matrix:
    """Dispatch helper: algo in {"fast", "classic", "naive"}."""
    from .matrix import syrk_classic_dnc, syrk_naive
    if algo == "fast":
        return syrk_fast(A, kind, plan, counter)
    thr = (plan or FastSyrkPlan()).threshold
    if algo == "classic":
        return syrk_classic_dnc(A, kind, thr, counter)
    if algo == "naive":
        return syrk_naive(A, kind, counter=counter)
    raise ValueError(f"unknown syrk algorithm {algo!r}")
