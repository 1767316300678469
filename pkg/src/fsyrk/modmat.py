"""Vectorized arithmetic on int64 arrays of residues mod p.

Products go through float64 BLAS whenever the exact dot products fit in
the 53-bit mantissa; otherwise the inner dimension is chunked or the
operands are split into 16-bit limbs.
"""
from __future__ import annotations

import numpy as np

_EXACT = 1 << 53


def _fold(r, t):
    """r <- min(r, t) as unsigned, i.e. pick the one in [0, p)."""
    np.minimum(r.view(np.uint64), t.view(np.uint64), out=r.view(np.uint64))
    return r


def mod_add(x, y, p, out=None):
    out = np.add(x, y, out=out)
    return _fold(out, out - p)


def mod_sub(x, y, p, out=None):
    out = np.subtract(x, y, out=out)
    return _fold(out, out + p)


def mod_neg(x, p, out=None):
    out = np.subtract(p, x, out=out)
    return _fold(out, out - p)


def mod_scale(x, c, p, out=None):
    c = int(c) % p
    if (p - 1) * c + p < _EXACT:
        r = _float_reduce(np.multiply(x, float(c)), p)
        if out is None:
            return r
        out[...] = r
        return out
    out = np.multiply(x, c, out=out)
    return np.remainder(out, p, out=out)


def _float_reduce(z, p):
    """Exact z mod p for integral float64 z with |z| < 2^53 - p.

    floor(z / p) computed through the reciprocal is off by at most one,
    which the two folds correct; fmod is several times slower.
    """
    q = np.multiply(z, 1.0 / p)
    np.floor(q, out=q)
    q *= p
    np.subtract(z, q, out=q)
    r = q.astype(np.int64)
    # r in [-p, 2p) and almost always already in [0, p)
    if r.size and r.min() < 0:
        np.add(r, p, out=r, where=r < 0)
    if r.size and r.max() >= p:
        np.subtract(r, p, out=r, where=r >= p)
    return r


def mod_lincomb(x, a, y, b, p, out=None):
    """(a x + b y) mod p with one reduction when it fits in a double."""
    a, b = int(a) % p, int(b) % p
    if (a + b) * (p - 1) + p < _EXACT:
        z = np.multiply(x, float(a))
        z += np.multiply(y, float(b))
        r = _float_reduce(z, p)
        if out is None:
            return r
        out[...] = r
        return out
    return mod_add(mod_scale(x, a, p), mod_scale(y, b, p), p, out)


def _float_dot(xf, yf, p):
    return _float_reduce(xf @ yf, p)


def mod_matmul(x, y, p, out=None):
    """Exact (x @ y) mod p for canonical int64 residues."""
    m, k = x.shape
    n = y.shape[1]
    if k == 0:
        r = np.zeros((m, n), dtype=np.int64)
    else:
        bound = (p - 1) * (p - 1)
        chunk = (_EXACT - 1 - p) // bound if bound else k
        if chunk >= k:
            r = _float_dot(x.astype(np.float64), y.astype(np.float64), p)
        elif chunk >= 1:
            r = np.zeros((m, n), dtype=np.int64)
            xf = x.astype(np.float64)
            yf = y.astype(np.float64)
            for s in range(0, k, chunk):
                mod_add(r, _float_dot(xf[:, s:s + chunk], yf[s:s + chunk], p), p, out=r)
        else:
            r = _limb_matmul(x, y, p)
    if out is None:
        return r
    out[...] = r
    return out


def _limb_matmul(x, y, p):
    # x = xh*2^16 + xl with limbs < 2^16, so each limb dot fits for k < 2^21
    m, k = x.shape
    n = y.shape[1]
    chunk = 1 << 20
    parts = []
    xh, xl = (x >> 16).astype(np.float64), (x & 0xFFFF).astype(np.float64)
    yh, yl = (y >> 16).astype(np.float64), (y & 0xFFFF).astype(np.float64)
    for a, b in ((xh, yh), (xh, yl), (xl, yh), (xl, yl)):
        acc = np.zeros((m, n), dtype=np.int64)
        for s in range(0, k, chunk):
            z = a[:, s:s + chunk] @ b[s:s + chunk]
            mod_add(acc, _float_reduce(z, p), p, out=acc)
        parts.append(acc)
    hh, hl, lh, ll = parts
    s16 = (1 << 16) % p
    s32 = (1 << 32) % p
    r = hh * s32 % p
    r = (r + (hl + lh) % p * s16) % p
    return (r + ll) % p


def mod_syrk_full(x, p):
    """(x @ x.T) mod p; the shared buffer lets numpy dispatch to syrk."""
    m, k = x.shape
    bound = (p - 1) * (p - 1)
    if k == 0:
        return np.zeros((m, m), dtype=np.int64)
    if k * bound + p < _EXACT:
        xf = x.astype(np.float64)
        return _float_dot(xf, xf.T, p)
    return mod_matmul(x, np.ascontiguousarray(x.T), p)
