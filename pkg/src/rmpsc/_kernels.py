"""Hot numeric kernels: polar transform, SC decoding, GF(2) weight spectra.

Every kernel has a pure-numpy implementation and, when numba is importable
and the environment variable ``RMPSC_NUMBA`` is not set to ``0``, an
``@njit``-compiled twin.  The numpy path is the reference; the compiled path
must agree bit-for-bit on decisions (see tests and benchmarks).
"""

from __future__ import annotations

import math
import os

import numpy as np

_flag = os.environ.get("RMPSC_NUMBA", "1").strip().lower()
_want_numba = _flag not in {"0", "false", "no", "off"}

NUMBA_ENABLED = False
if _want_numba:
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a hard dep, but stay usable
        NUMBA_ENABLED = False

BACKEND = "numba" if NUMBA_ENABLED else "numpy"

LLR_CLAMP = 40.0


# ----------------------------------------------------------------- transform

def _polar_transform_numpy(u: np.ndarray) -> np.ndarray:
    """Multiply bit rows by the n-fold Kronecker power of [[1,0],[1,1]]."""
    x = np.array(u, dtype=np.uint8, copy=True)
    N = x.shape[-1]
    d = 1
    while d < N:
        for i in range(0, N, 2 * d):
            x[..., i : i + d] ^= x[..., i + d : i + 2 * d]
        d <<= 1
    return x


if NUMBA_ENABLED:

    @njit(cache=True)
    def _polar_transform_numba(u):
        x = u.copy()
        N = x.shape[0]
        d = 1
        while d < N:
            for i in range(0, N, 2 * d):
                for j in range(d):
                    x[i + j] ^= x[i + j + d]
            d <<= 1
        return x


def polar_transform(u: np.ndarray) -> np.ndarray:
    """Bit transform for encoding; involutive, accepts (N,) or (batch, N)."""
    u = np.asarray(u, dtype=np.uint8)
    if NUMBA_ENABLED and u.ndim == 1:
        return _polar_transform_numba(np.ascontiguousarray(u))
    return _polar_transform_numpy(u)


# ------------------------------------------------------------------ boxplus

def _boxplus_numpy(a, b, minsum):
    aa = np.abs(a)
    ab = np.abs(b)
    sign = np.where((a < 0) != (b < 0), -1.0, 1.0)
    if minsum:
        return sign * np.minimum(aa, ab)
    # overflow-safe magnitude of the exact check-node rule; clamping at zero
    # keeps the output sign exactly multiplicative, as the tanh form would be
    mag = (
        np.minimum(aa, ab)
        + np.log1p(np.exp(-(aa + ab)))
        - np.log1p(np.exp(-np.abs(aa - ab)))
    )
    return sign * np.maximum(mag, 0.0)


# ------------------------------------------------------------- SC decoding
#
# Iterative successive cancellation in natural bit order.  Level n holds the
# channel LLRs; level 0 holds the leaves.  The node covering u-indices
# [b, b + 2^lev) stores its LLR vector at L[lev, b:b+2^lev] and its partial
# sums (the sub-codeword in the x domain) at X[lev, b:b+2^lev].


def _sc_batch_numpy(llrs: np.ndarray, frozen: np.ndarray, minsum: bool):
    B, N = llrs.shape
    n = N.bit_length() - 1
    L = np.empty((n + 1, N, B), dtype=np.float64)
    X = np.zeros((n + 1, N, B), dtype=np.uint8)
    L[n, :, :] = llrs.T
    for t in range(N):
        if t == 0:
            hi = n - 1
        else:
            hi = (t & -t).bit_length() - 1
        for lev in range(hi, -1, -1):
            blk = 1 << lev
            par = t & ~((blk << 1) - 1)
            a = L[lev + 1, par : par + blk, :]
            b = L[lev + 1, par + blk : par + 2 * blk, :]
            if ((t >> lev) & 1) == 0:
                L[lev, par : par + blk, :] = _boxplus_numpy(a, b, minsum)
            else:
                s = 1.0 - 2.0 * X[lev, par : par + blk, :]
                L[lev, par + blk : par + 2 * blk, :] = s * a + b
        if frozen[t]:
            X[0, t, :] = 0
        else:
            X[0, t, :] = L[0, t, :] < 0
        lev = 0
        tt = t
        while (tt & 1) == 1 and lev < n:
            blk = 1 << lev
            par = t & ~((blk << 1) - 1)
            X[lev + 1, par : par + blk, :] = (
                X[lev, par : par + blk, :] ^ X[lev, par + blk : par + 2 * blk, :]
            )
            X[lev + 1, par + blk : par + 2 * blk, :] = X[lev, par + blk : par + 2 * blk, :]
            tt >>= 1
            lev += 1
    return np.ascontiguousarray(X[0].T), np.ascontiguousarray(X[n].T)


if NUMBA_ENABLED:

    @njit(cache=True)
    def _boxplus_scalar(a, b, minsum):
        aa = abs(a)
        ab = abs(b)
        mag = aa if aa < ab else ab
        if not minsum:
            mag = mag + math.log1p(math.exp(-(aa + ab))) - math.log1p(math.exp(-abs(aa - ab)))
            if mag < 0.0:
                mag = 0.0
        if (a < 0.0) != (b < 0.0):
            return -mag
        return mag

    @njit(cache=True)
    def _sc_scalar_numba(llr, frozen, minsum, L, X):
        N = llr.shape[0]
        n = 0
        while (1 << n) < N:
            n += 1
        for k in range(N):
            L[n, k] = llr[k]
        for t in range(N):
            if t == 0:
                hi = n - 1
            else:
                hi = 0
                while ((t >> hi) & 1) == 0:
                    hi += 1
            for lev in range(hi, -1, -1):
                blk = 1 << lev
                par = t & ~((blk << 1) - 1)
                if ((t >> lev) & 1) == 0:
                    for j in range(blk):
                        L[lev, par + j] = _boxplus_scalar(
                            L[lev + 1, par + j], L[lev + 1, par + blk + j], minsum
                        )
                else:
                    for j in range(blk):
                        a = L[lev + 1, par + j]
                        b = L[lev + 1, par + blk + j]
                        if X[lev, par + j]:
                            L[lev, par + blk + j] = b - a
                        else:
                            L[lev, par + blk + j] = b + a
            if frozen[t]:
                X[0, t] = 0
            else:
                X[0, t] = 1 if L[0, t] < 0.0 else 0
            lev = 0
            tt = t
            while (tt & 1) == 1 and lev < n:
                blk = 1 << lev
                par = t & ~((blk << 1) - 1)
                for j in range(blk):
                    X[lev + 1, par + j] = X[lev, par + j] ^ X[lev, par + blk + j]
                    X[lev + 1, par + blk + j] = X[lev, par + blk + j]
                tt >>= 1
                lev += 1

    @njit(cache=True)
    def _sc_batch_numba(llrs, frozen, minsum):
        B, N = llrs.shape
        n = 0
        while (1 << n) < N:
            n += 1
        U = np.empty((B, N), dtype=np.uint8)
        Xout = np.empty((B, N), dtype=np.uint8)
        L = np.empty((n + 1, N), dtype=np.float64)
        X = np.zeros((n + 1, N), dtype=np.uint8)
        for f in range(B):
            _sc_scalar_numba(llrs[f], frozen, minsum, L, X)
            for k in range(N):
                U[f, k] = X[0, k]
                Xout[f, k] = X[n, k]
        return U, Xout


def sc_decode_batch(llrs: np.ndarray, frozen: np.ndarray, minsum: bool = False):
    """Decode a batch of LLR rows.

    Parameters
    ----------
    llrs : (B, N) float array of channel LLRs (positive favours bit 0).
    frozen : (N,) uint8 mask, 1 on frozen u-positions.
    minsum : replace the exact check-node rule by min-sum.

    Returns
    -------
    (U, X) : (B, N) uint8 arrays of decided input bits and codeword bits,
        with X the polar transform of U by construction.
    """
    llrs = np.ascontiguousarray(llrs, dtype=np.float64)
    frozen = np.ascontiguousarray(frozen, dtype=np.uint8)
    if NUMBA_ENABLED:
        return _sc_batch_numba(llrs, frozen, minsum)
    return _sc_batch_numpy(llrs, frozen, minsum)


# --------------------------------------------------- GF(2) weight spectrum

def _popcount_u64(arr: np.ndarray) -> np.ndarray:
    try:
        return np.bitwise_count(arr)
    except AttributeError:  # numpy < 2.0
        as_bytes = arr.view(np.uint8).reshape(arr.shape + (8,))
        table = np.unpackbits(np.arange(256, dtype=np.uint8)[:, None], axis=1).sum(1)
        return table[as_bytes].sum(axis=-1)


def _gray_weight_hist_numpy(basis: np.ndarray, nbits: int) -> np.ndarray:
    k = len(basis)
    k1 = k // 2
    lo = _gray_span(basis[:k1])
    hi = _gray_span(basis[k1:])
    counts = np.zeros(nbits + 1, dtype=np.int64)
    for word in hi:
        w = _popcount_u64(lo ^ word)
        counts += np.bincount(w.astype(np.int64), minlength=nbits + 1)
    return counts


def _gray_span(basis: np.ndarray) -> np.ndarray:
    """All XOR combinations of the given uint64 basis words, Gray order."""
    out = np.zeros(1 << len(basis), dtype=np.uint64)
    x = np.uint64(0)
    for g in range(1, 1 << len(basis)):
        x ^= basis[(g & -g).bit_length() - 1]
        out[g] = x
    return out


if NUMBA_ENABLED:

    @njit(cache=True)
    def _gray_weight_hist_numba(basis, nbits):
        counts = np.zeros(nbits + 1, dtype=np.int64)
        counts[0] = 1
        x = np.uint64(0)
        total = 1 << len(basis)
        for g in range(1, total):
            gg = g
            tz = 0
            while (gg & 1) == 0:
                gg >>= 1
                tz += 1
            x ^= basis[tz]
            v = x
            v = v - ((v >> np.uint64(1)) & np.uint64(0x5555555555555555))
            v = (v & np.uint64(0x3333333333333333)) + (
                (v >> np.uint64(2)) & np.uint64(0x3333333333333333)
            )
            v = (v + (v >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
            w = (v * np.uint64(0x0101010101010101)) >> np.uint64(56)
            counts[np.int64(w)] += 1
        return counts


def gray_weight_histogram(basis, nbits: int) -> np.ndarray:
    """Weight distribution of the span of packed words (codewords as uint64).

    Walks all 2^k XOR combinations in Gray order; the zero word is counted.
    """
    basis = np.asarray(basis, dtype=np.uint64)
    if len(basis) == 0:
        counts = np.zeros(nbits + 1, dtype=np.int64)
        counts[0] = 1
        return counts
    if NUMBA_ENABLED:
        return _gray_weight_hist_numba(basis, nbits)
    return _gray_weight_hist_numpy(basis, nbits)
