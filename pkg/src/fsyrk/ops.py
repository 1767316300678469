"""Counting front end over an array ring.

Every kernel goes through an ``Ops`` bundle so that additions,
multiplications, products and temporaries land in one OpCounter.
"""
from __future__ import annotations

from contextlib import contextmanager

import numpy as np

from .counter import OpCounter
from .rings import AdjointKind, ArrayRing, ComplexRing, Fq2Ring, QuatRing

NAIVE = "naive"
STRASSEN = "strassen"


def _scale_cost(ring):
    if isinstance(ring, QuatRing):
        return 4
    if isinstance(ring, Fq2Ring):
        return 2
    return 1


def _rmul_cost(ring):
    if isinstance(ring, QuatRing):
        return 16
    if isinstance(ring, Fq2Ring):
        return 4
    return 1


class Ops:
    def __init__(self, ring: ArrayRing, kind: AdjointKind, counter: OpCounter = None,
                 gemm: str = NAIVE, gemm_threshold: int = 64):
        self.R = ring
        self.kind = kind
        self.c = counter if counter is not None else OpCounter()
        self.gemm = gemm
        self.gemm_threshold = max(1, int(gemm_threshold))
        self.scale_cost = _scale_cost(ring)
        self.rmul_cost = _rmul_cost(ring)
        self.width = max(ring.comp, 1)

    def n(self, x) -> int:
        """Number of ring elements in x."""
        return x.size // self.width

    def adj(self, x):
        return self.R.adjoint(x, self.kind)

    # additive ----------------------------------------------------------
    def add(self, x, y, out=None):
        self.c.adds += x.size // self.width
        return self.R.add(x, y, out)

    def sub(self, x, y, out=None):
        self.c.adds += x.size // self.width
        return self.R.sub(x, y, out)

    def neg(self, x, out=None):
        return self.R.neg(x, out)

    # multiplicative --------------------------------------------------------
    def scale(self, x, c, out=None):
        """Multiply by a central scalar."""
        self.c.mul(self.n(x), self.scale_cost)
        return self.R.scale(x, c, out)

    def ymul(self, x, c, out=None, base=False):
        """Multiply by a skew-unitary coefficient; tallied as ymults."""
        k = self.n(x)
        if base:
            self.c.ymul(k, self.scale_cost)
            return self.R.scale(x, c, out)
        self.c.ymul(k, self.rmul_cost)
        return self.R.rmul(x, c, out)

    def leaf_mm(self, x, y, out=None):
        m, k = x.shape[0], x.shape[1]
        n = y.shape[1]
        self.c.mul(m * k * n, self.R.mul_cost)
        return self.R.matmul(x, y, out)

    def mm(self, x, y, out=None):
        """General product x @ y, counted as one product."""
        self.c.product()
        if self.gemm == STRASSEN:
            from .matrix import _strassen
            with self.c.opaque():
                r = _strassen(self, x, y, self.gemm_threshold)
            if out is None:
                return r
            out[...] = r
            return out
        return self.leaf_mm(x, y, out)

    def mm_adj(self, x, y, out=None):
        """x @ phi(y)."""
        return self.mm(x, self.adj(y), out)

    def syrk_full(self, x):
        """Full x @ phi(x) by the classical product."""
        self.c.product()
        m, k = x.shape[0], x.shape[1]
        self.c.mul(m * m * k, self.R.mul_cost)
        return self.R.syrk_full(x, self.kind)

    @contextmanager
    def product(self):
        """Group everything inside as one logical product."""
        self.c.product()
        with self.c.opaque():
            yield

    # workspace -----------------------------------------------------------
    def alloc(self, m, n):
        self.c.alloc(m * n)
        return self.R.zeros(m, n)

    def free(self, x):
        self.c.free(x.shape[0] * x.shape[1])

    def step(self, level, label, dest):
        self.c.step(level, label, dest)

    def is_float(self):
        return isinstance(self.R, ComplexRing)


def tril_mask(m: int, k: int = 0):
    return np.tri(m, m, k, dtype=bool)
