"""Vectorised dense polynomial arithmetic over Z/pZ for p < 2^31.

Multiplication splits coefficients into 16-bit limbs and convolves in
float64; every partial convolution stays below 2^53 for lengths up to
2^20, so the results are exact.  Division and gcd run Euclid steps on
int64 rows (products of two sub-2^31 residues fit in int64).

Only reachable for word-sized-but-small moduli; the generic list-based
paths in poly.py handle everything else.
"""
from __future__ import annotations

import numpy as np

FAST_LIMIT = 1 << 31
_MASK = (1 << 16) - 1


def usable(p: int) -> bool:
    return p < FAST_LIMIT


def _trim(a: np.ndarray) -> np.ndarray:
    nz = np.nonzero(a)[0]
    return a[: nz[-1] + 1] if nz.size else a[:0]


def mul_mod(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    aa = np.asarray(a, dtype=np.int64)
    bb = np.asarray(b, dtype=np.int64)
    ah, al = aa >> 16, aa & _MASK
    bh, bl = bb >> 16, bb & _MASK
    hh = np.convolve(ah.astype(np.float64), bh.astype(np.float64))
    mixed = np.convolve(ah.astype(np.float64), bl.astype(np.float64))
    mixed += np.convolve(al.astype(np.float64), bh.astype(np.float64))
    ll = np.convolve(al.astype(np.float64), bl.astype(np.float64))
    hh = hh.astype(np.int64) % p
    mixed = mixed.astype(np.int64) % p
    ll = ll.astype(np.int64) % p
    sh1 = (1 << 32) % p
    sh2 = (1 << 16) % p
    out = (hh * sh1 % p + mixed * sh2 % p + ll) % p
    return _trim(out).tolist()


def _rem_inplace(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """a mod b; b must be monic; a is consumed."""
    db = len(b) - 1
    body = b[:-1]
    for k in range(len(a) - 1, db - 1, -1):
        c = int(a[k])
        if c:
            lo = k - db
            a[lo:k] = (a[lo:k] - c * body) % p
            a[k] = 0
    return _trim(a[:db] if db else a[:0])


def divmod_mod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    bb = np.asarray(b, dtype=np.int64)
    lead_inv = pow(int(bb[-1]), p - 2, p)
    bm = bb * lead_inv % p
    aa = np.asarray(a, dtype=np.int64).copy()
    db = len(b) - 1
    if len(aa) - 1 < db:
        return [], list(a)
    q = np.zeros(len(aa) - db, dtype=np.int64)
    body = bm[:-1]
    for k in range(len(aa) - 1, db - 1, -1):
        c = int(aa[k])
        if c:
            # q_k is against the original b; the elimination uses monic b, so
            # the row update subtracts c * bm, not q_k * bm
            q[k - db] = c * lead_inv % p
            lo = k - db
            if db:
                aa[lo:k] = (aa[lo:k] - c * body) % p
            aa[k] = 0
    return _trim(q).tolist(), _trim(aa[:db] if db else aa[:0]).tolist()


def gcd_mod(a: list[int], b: list[int], p: int) -> list[int]:
    aa = np.asarray(a, dtype=np.int64)
    bb = np.asarray(b, dtype=np.int64)
    while bb.size:
        lead_inv = pow(int(bb[-1]), p - 2, p)
        bm = bb * lead_inv % p
        aa = _rem_inplace(aa.copy(), bm, p)
        aa, bb = bb, aa
    if aa.size:
        aa = aa * pow(int(aa[-1]), p - 2, p) % p
    return aa.tolist()
