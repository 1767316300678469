"""Dense matrices over an array ring, reference products and I/O.

The classical kernels here (naive and divide-and-conquer SYRK, Strassen)
are the baselines every fast kernel is checked against.
"""
from __future__ import annotations

import enum
import io
from functools import lru_cache
from typing import Optional, TextIO, Tuple, Union

import numpy as np

from .counter import OpCounter
from .errors import DimensionMismatch, UnsupportedRing
from .ops import STRASSEN, Ops
from .rings import (AdjointKind, ArrayRing, ComplexRing, Fq2Ring, PrimeRing, QuatRing,
                    center_scalar, make_ring)


class TriangularHalf(enum.Enum):
    LOWER = "lower"
    UPPER = "upper"


Lower = TriangularHalf.LOWER
Upper = TriangularHalf.UPPER


@lru_cache(maxsize=256)
def tril_idx(m: int, k: int = 0):
    return np.tril_indices(m, k)


@lru_cache(maxsize=256)
def triu_idx(m: int, k: int = 1):
    return np.triu_indices(m, k)


class Matrix:
    """A 2D array of ring elements plus its ring.

    Slicing helpers return views sharing storage with the parent.
    """

    __slots__ = ("data", "ring")

    def __init__(self, data, ring: ArrayRing):
        self.data = data
        self.ring = ring
        want = 3 if ring.comp else 2
        if data.ndim != want:
            raise DimensionMismatch(f"expected a {want}-d array for {ring!r}, got {data.shape}")

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, ring, m, n):
        return cls(ring.zeros(m, n), ring)

    @classmethod
    def identity(cls, ring, n):
        return cls(ring.eye(n), ring)

    @classmethod
    def random(cls, ring, m, n, rng):
        return cls(ring.random(m, n, rng), ring)

    @classmethod
    def from_rows(cls, ring, rows):
        arr = np.asarray(rows)
        if ring.is_exact:
            arr = arr.astype(np.int64) % ring.modulus
        else:
            arr = arr.astype(ring.dtype)
        return cls(arr, ring)

    # shape ----------------------------------------------------------------
    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    @property
    def stride(self) -> int:
        """Row pitch in elements."""
        return self.data.strides[0] // self.data.strides[1] if self.cols else self.cols

    def block(self, r0, r1, c0, c1) -> "Matrix":
        return Matrix(self.data[r0:r1, c0:c1], self.ring)

    def quadrants(self):
        """(A11, A12, A21, A22) split at ceil(m/2), ceil(n/2)."""
        m, n = self.shape
        s, h = (m + 1) // 2, (n + 1) // 2
        d = self.data
        return tuple(Matrix(v, self.ring) for v in
                     (d[:s, :h], d[:s, h:], d[s:, :h], d[s:, h:]))

    def copy(self) -> "Matrix":
        return Matrix(self.data.copy(), self.ring)

    def triangle(self, half: TriangularHalf = Lower) -> "Matrix":
        """Copy keeping Low (diagonal included) or Up (strictly above)."""
        m, n = self.shape
        if half is Lower:
            keep = np.tri(m, n, 0, dtype=bool)
        else:
            keep = ~np.tri(m, n, 0, dtype=bool)
        d = self.data.copy()
        d[~keep] = 0
        return Matrix(d, self.ring)

    def __getitem__(self, ij):
        return self.data[ij]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.ring.equal(self.data, other.data)

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols} over {self.ring!r})"


def _ring_kind(A: Matrix, kind) -> Tuple[ArrayRing, AdjointKind]:
    kind = AdjointKind.parse(kind)
    A.ring.check_kind(kind)
    return A.ring, kind


def lower_equal(ring, x, y) -> bool:
    """Compare the lower triangles of two square arrays."""
    if x.shape != y.shape:
        return False
    idx = tril_idx(x.shape[0])
    return ring.equal(x[idx], y[idx])


# ---------------------------------------------------------------------------
# adjoints

def adjoint(A: Matrix, kind) -> Matrix:
    ring, kind = _ring_kind(A, kind)
    return Matrix(np.ascontiguousarray(ring.adjoint(A.data, kind)), ring)


def raw_transpose(A: Matrix) -> Matrix:
    """Index swap only; for quaternions this is not an antihomomorphism."""
    return Matrix(np.ascontiguousarray(A.data.swapaxes(0, 1)), A.ring)


def symmetrize_from_lower(C: Matrix, kind) -> None:
    """Fill Up(C) with phi(Low(C)) in place."""
    ring, kind = _ring_kind(C, kind)
    if C.rows != C.cols:
        raise DimensionMismatch("symmetrize_from_lower needs a square matrix")
    _sym_from_low(ring, kind, C.data)


_BLK = 128


def _diag_blocks(m):
    """Row bands (r0, r1) for blockwise triangle updates."""
    return [(r, min(r + _BLK, m)) for r in range(0, m, _BLK)]


def _sym_from_low(ring, kind, c):
    m = c.shape[0]
    if m < 2:
        return
    conj = kind is AdjointKind.CONJUGATE_TRANSPOSE and ring.has_conj
    # dense transposed copies off the diagonal, index lists only inside
    for r0, r1 in _diag_blocks(m):
        if r0:
            v = c[r0:r1, :r0].swapaxes(0, 1)
            c[:r0, r0:r1] = ring.conj(v) if conj else v
        d = c[r0:r1, r0:r1]
        iu = triu_idx(r1 - r0)
        vals = d.swapaxes(0, 1)[iu]
        d[iu] = ring.conj(vals) if conj else vals


def _low_add(ops: Ops, dst, src):
    """Low(dst) += Low(src)."""
    m = dst.shape[0]
    R = ops.R
    ops.c.add(m * (m + 1) // 2)
    for r0, r1 in _diag_blocks(m):
        if r0:
            R.add(dst[r0:r1, :r0], src[r0:r1, :r0], out=dst[r0:r1, :r0])
        idx = tril_idx(r1 - r0)
        d = dst[r0:r1, r0:r1]
        d[idx] = R.add(d[idx], src[r0:r1, r0:r1][idx])


# ---------------------------------------------------------------------------
# products

def _check_mm(A: Matrix, B: Matrix):
    if A.cols != B.rows:
        raise DimensionMismatch(f"cannot multiply {A.shape} by {B.shape}")
    if A.ring is not B.ring and repr(A.ring) != repr(B.ring):
        raise DimensionMismatch("operands live in different rings")


def gemm_naive(A: Matrix, B: Matrix, counter: OpCounter = None) -> Matrix:
    """Classical product, m*k*n ring multiplications."""
    _check_mm(A, B)
    ops = Ops(A.ring, AdjointKind.TRANSPOSE, counter)
    ops.c.product()
    return Matrix(ops.leaf_mm(A.data, B.data), A.ring)


def gemm_strassen(A: Matrix, B: Matrix, threshold: int = 64,
                  counter: OpCounter = None) -> Matrix:
    """Strassen's 7-product scheme; recursion while min dimension >= 2*threshold."""
    _check_mm(A, B)
    ops = Ops(A.ring, AdjointKind.TRANSPOSE, counter, STRASSEN, threshold)
    return Matrix(ops.mm(A.data, B.data), A.ring)


def _strassen(ops: Ops, x, y, thr):
    m, k = x.shape[0], x.shape[1]
    n = y.shape[1]
    if min(m, k, n) < max(2, 2 * thr):
        return ops.leaf_mm(x, y)
    R = ops.R
    me, ke, ne = m & ~1, k & ~1, n & ~1
    if (me, ke, ne) != (m, k, n):
        # dynamic peeling of the odd row/column/inner index
        out = R.zeros(m, n)
        core = _strassen(ops, x[:me, :ke], y[:ke, :ne], thr)
        if ke < k:
            ops.add(core, ops.leaf_mm(x[:me, ke:], y[ke:, :ne]), out=core)
        out[:me, :ne] = core
        if ne < n:
            out[:me, ne:] = ops.leaf_mm(x[:me], y[:, ne:])
        if me < m:
            out[me:] = ops.leaf_mm(x[me:], y)
        return out
    a, b, c = m // 2, k // 2, n // 2
    a11, a12, a21, a22 = x[:a, :b], x[:a, b:], x[a:, :b], x[a:, b:]
    b11, b12, b21, b22 = y[:b, :c], y[:b, c:], y[b:, :c], y[b:, c:]
    add, sub = ops.add, ops.sub
    m1 = _strassen(ops, add(a11, a22), add(b11, b22), thr)
    m2 = _strassen(ops, add(a21, a22), b11, thr)
    m3 = _strassen(ops, a11, sub(b12, b22), thr)
    m4 = _strassen(ops, a22, sub(b21, b11), thr)
    m5 = _strassen(ops, add(a11, a12), b22, thr)
    m6 = _strassen(ops, sub(a21, a11), add(b11, b12), thr)
    m7 = _strassen(ops, sub(a12, a22), add(b21, b22), thr)
    out = R.zeros(m, n)
    c11, c12, c21, c22 = out[:a, :c], out[:a, c:], out[a:, :c], out[a:, c:]
    add(m1, m4, out=c11)
    sub(c11, m5, out=c11)
    add(c11, m7, out=c11)
    add(m3, m5, out=c12)
    add(m2, m4, out=c21)
    sub(m1, m2, out=c22)
    add(c22, m3, out=c22)
    add(c22, m6, out=c22)
    return out


# ---------------------------------------------------------------------------
# SYRK references

def _syrk_naive_arr(ops: Ops, a, c, alpha=1, beta=0):
    """Low(c) <- alpha Low(a phi(a)) + beta Low(c); upper part untouched."""
    R = ops.R
    m = a.shape[0]
    idx = tril_idx(m)
    if R.scalar_is_zero(alpha):
        prod = None
    else:
        prod = ops.syrk_full(a)[idx]
        if not R.scalar_is_one(alpha):
            prod = ops.scale(prod[:, None], alpha)[:, 0]
    if R.scalar_is_zero(beta):
        if prod is None:
            c[idx] = 0
        else:
            c[idx] = prod
        return
    old = c[idx]
    if not R.scalar_is_one(beta):
        old = ops.scale(old[:, None], beta)[:, 0]
    c[idx] = old if prod is None else ops.add(prod[:, None], old[:, None])[:, 0]


def syrk_naive(A: Matrix, kind, alpha=1, beta=0, C: Optional[Matrix] = None,
               counter: OpCounter = None) -> Matrix:
    """C <- alpha A phi(A) + beta C on the lower triangle.

    The product is formed classically, m*m*n ring multiplications.
    Returns C (allocated when not given).
    """
    ring, kind = _ring_kind(A, kind)
    m = A.rows
    if C is None:
        C = Matrix.zeros(ring, m, m)
    if C.shape != (m, m):
        raise DimensionMismatch(f"C must be {m}x{m}, got {C.shape}")
    ops = Ops(ring, kind, counter)
    _syrk_naive_arr(ops, A.data, C.data, center_scalar(ring, alpha), center_scalar(ring, beta))
    return C


def _syrk_full_into(ops: Ops, a, c):
    """Base case writing the whole square block (upper is scratch)."""
    c[...] = ops.syrk_full(a)


def _classic_level(ops: Ops, a, c, recurse):
    """One level of the four-quadrant scheme on even m.

    Diagonal blocks come from two recursive calls each, summed through
    C12 used as scratch; C21 from two general products.
    """
    m, n = a.shape[0], a.shape[1]
    s, h = m // 2, (n + 1) // 2
    a11, a12, a21, a22 = a[:s, :h], a[:s, h:], a[s:, :h], a[s:, h:]
    c11, c12, c21, c22 = c[:s, :s], c[:s, s:], c[s:, :s], c[s:, s:]
    recurse(a11, c11)
    if n > h:
        recurse(a12, c12)
        _low_add(ops, c11, c12)
    recurse(a21, c22)
    if n > h:
        recurse(a22, c12)
        _low_add(ops, c22, c12)
    ops.mm_adj(a21, a11, out=c21)
    if n > h:
        ops.add(c21, ops.mm_adj(a22, a12), out=c21)


def _peel_rows_fix(ops: Ops, a, c, me):
    """Fill row me.. of Low(c) after the leading me x me block is done."""
    for i in range(me, a.shape[0]):
        row = a[i:i + 1]
        c[i:i + 1, :i + 1] = ops.mm_adj(row, a[:i + 1])


def _classic(ops: Ops, a, c, thr):
    m, n = a.shape[0], a.shape[1]
    if m <= max(thr, 1) or n <= max(thr, 1) or m < 2:
        _syrk_full_into(ops, a, c)
        return
    me = m & ~1
    if me < m:
        _classic(ops, a[:me], c[:me, :me], thr)
        _peel_rows_fix(ops, a, c, me)
        return
    _classic_level(ops, a, c, lambda x, y: _classic(ops, x, y, thr))


def syrk_classic_dnc(A: Matrix, kind, threshold: int = 64, counter: OpCounter = None) -> Matrix:
    """Four-quadrant divide and conquer SYRK; lower triangle of the result is valid.

    Count: D(n) = 4 D(n/2) + 2 (n/2)^3, D(threshold) = naive.
    """
    ring, kind = _ring_kind(A, kind)
    ops = Ops(ring, kind, counter)
    m = A.rows
    C = Matrix.zeros(ring, m, m)
    with ops.product():
        _classic(ops, A.data, C.data, threshold)
    _zero_upper(C.data)
    return C


def _zero_upper(c):
    m = c.shape[0]
    for r0, r1 in _diag_blocks(m):
        c[r0:r1, r1:] = 0
        if r1 - r0 > 1:
            c[r0:r1, r0:r1][triu_idx(r1 - r0)] = 0


# ---------------------------------------------------------------------------
# text format

def _ring_header(ring: ArrayRing) -> Tuple[int, str]:
    if isinstance(ring, PrimeRing):
        return ring.p, "fp"
    if isinstance(ring, Fq2Ring):
        return ring.p, "fp2"
    if isinstance(ring, QuatRing):
        return ring.p, "quat"
    if isinstance(ring, ComplexRing):
        return 0, "c64"
    raise UnsupportedRing(f"no text format for {ring!r}")


def _fmt(ring, v) -> str:
    if isinstance(ring, ComplexRing):
        return f"{float(v.real)!r},{float(v.imag)!r}"
    if ring.comp:
        return ",".join(str(int(x)) for x in v)
    return str(int(v))


def write_matrix(M: Matrix, fh: Optional[TextIO] = None) -> str:
    """Serialize; returns the text and also writes it to fh when given."""
    mod, tag = _ring_header(M.ring)
    lines = [f"{M.rows} {M.cols} {mod} {tag}"]
    for i in range(M.rows):
        lines.append(" ".join(_fmt(M.ring, M.data[i, j]) for j in range(M.cols)))
    text = "\n".join(lines) + "\n"
    if fh is not None:
        fh.write(text)
    return text


def read_matrix(src: Union[str, TextIO]) -> Matrix:
    """Parse the text format produced by ``write_matrix``."""
    fh = io.StringIO(src) if isinstance(src, str) else src
    head = fh.readline().split()
    if len(head) != 4:
        raise ValueError("header must be: rows cols modulus ring-tag")
    m, n, mod, tag = int(head[0]), int(head[1]), int(head[2]), head[3].lower()
    if tag == "c64":
        ring = make_ring("c64")
    elif tag == "quat":
        ring = make_ring(f"quat:fp:{mod}")
    else:
        ring = make_ring(f"{tag}:{mod}")
    data = ring.zeros(m, n)
    for i in range(m):
        toks = fh.readline().split()
        if len(toks) != n:
            raise ValueError(f"row {i} has {len(toks)} entries, expected {n}")
        for j, tok in enumerate(toks):
            parts = tok.split(",")
            if isinstance(ring, ComplexRing):
                data[i, j] = complex(float(parts[0]), float(parts[1]))
            elif ring.comp:
                if len(parts) != ring.comp:
                    raise ValueError(f"entry ({i},{j}) needs {ring.comp} coordinates")
                data[i, j] = [int(x) % mod for x in parts]
            else:
                data[i, j] = int(parts[0]) % mod
    return Matrix(data, ring)
