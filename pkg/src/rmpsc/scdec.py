"""Polar encoding, successive cancellation decoding, and automorphism-ensemble
decoding with least-squares candidate selection."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ._kernels import LLR_CLAMP, polar_transform, sc_decode_batch
from .codes import CodeSpec

__all__ = [
    "DecodeResult",
    "encode",
    "encode_batch",
    "sc_decode",
    "sc_decode_frames",
    "ae_sc_decode",
    "ae_sc_decode_frames",
    "correlation_score",
]


@dataclass(frozen=True)
class DecodeResult:
    """Decoder output: input-bit decisions, codeword decisions, and the
    correlation of the codeword with the received LLRs (higher is better;
    maximising it minimises the Euclidean distance to the BPSK point)."""

    u_hat: np.ndarray
    x_hat: np.ndarray
    score: float


def encode(u_info: np.ndarray, code: CodeSpec) -> np.ndarray:
    """Scatter information bits into the information positions (ascending
    index), zeros elsewhere, and apply the polar transform."""
    u_info = np.asarray(u_info, dtype=np.uint8)
    if u_info.shape != (code.K,):
        raise ValueError(f"expected {code.K} information bits, got {u_info.shape}")
    u = np.zeros(code.N, dtype=np.uint8)
    u[sorted(code.info_set)] = u_info
    return polar_transform(u)


def encode_batch(u_info: np.ndarray, code: CodeSpec) -> np.ndarray:
    u_info = np.asarray(u_info, dtype=np.uint8)
    if u_info.ndim != 2 or u_info.shape[1] != code.K:
        raise ValueError(f"expected shape (B, {code.K}), got {u_info.shape}")
    u = np.zeros((u_info.shape[0], code.N), dtype=np.uint8)
    u[:, sorted(code.info_set)] = u_info
    return polar_transform(u)


def _check_llrs(llrs: np.ndarray, N: int) -> np.ndarray:
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.shape[-1] != N:
        raise ValueError(f"LLR length {llrs.shape[-1]} does not match N={N}")
    if not np.isfinite(llrs).all():
        raise ValueError("LLRs must be finite")
    # clamp keeps the exact check-node rule numerically stable and makes
    # absorption probes deterministic
    return np.clip(llrs, -LLR_CLAMP, LLR_CLAMP)


def _perm_array(p, N: int) -> np.ndarray:
    arr = np.asarray(getattr(p, "perm", p), dtype=np.intp)
    if arr.shape != (N,):
        raise ValueError(f"permutation length {arr.shape} does not match N={N}")
    return arr


def correlation_score(x_hat: np.ndarray, llrs: np.ndarray) -> float:
    return float(((1.0 - 2.0 * x_hat.astype(np.float64)) * llrs).sum())


def sc_decode_frames(llrs: np.ndarray, code: CodeSpec, *, minsum: bool = False):
    """Successive cancellation over a batch of frames; returns (U, X)."""
    llrs = _check_llrs(np.atleast_2d(llrs), code.N)
    return sc_decode_batch(llrs, code.frozen_mask(), minsum)


def sc_decode(llr, code: CodeSpec, *, minsum: bool = False, trace=None) -> DecodeResult:
    """Decode one frame of channel LLRs (positive favours bit 0).

    Frozen positions are forced to zero; an information decision at an exact
    LLR tie resolves to zero.  ``trace`` optionally names a CSV file that
    receives the decoder's internal per-level LLRs for debugging.
    """
    llr = _check_llrs(np.asarray(llr, dtype=np.float64), code.N)
    if trace is not None:
        u, x = _traced_sc(llr, code, minsum, trace)
    else:
        U, X = sc_decode_batch(llr[None, :], code.frozen_mask(), minsum)
        u, x = U[0], X[0]
    return DecodeResult(u, x, correlation_score(x, llr))


def ae_sc_decode_frames(
    llrs: np.ndarray, code: CodeSpec, perms, *, minsum: bool = False
):
    """Ensemble decoding over a batch: each permutation drives one SC branch
    on the permuted LLRs, candidates are mapped back, and the best-correlating
    codeword wins (ties go to the earliest branch).  Returns (U, X, winner)."""
    if not perms:
        raise ValueError("at least one permutation is required")
    llrs = _check_llrs(np.atleast_2d(llrs), code.N)
    B = llrs.shape[0]
    frozen = code.frozen_mask()
    perm_arrays = [_perm_array(p, code.N) for p in perms]
    candidates = np.empty((len(perm_arrays), B, code.N), dtype=np.uint8)
    scores = np.empty((len(perm_arrays), B), dtype=np.float64)
    signs = 1.0 - 2.0 * np.arange(2, dtype=np.float64)  # lookup for 0/1 bits
    for bi, p in enumerate(perm_arrays):
        branch_in = np.empty_like(llrs)
        branch_in[:, p] = llrs
        _, X = sc_decode_batch(branch_in, frozen, minsum)
        cand = X[:, p]  # inverse permutation of the branch codeword
        candidates[bi] = cand
        scores[bi] = (signs[cand] * llrs).sum(axis=1)
    winner = scores.argmax(axis=0)
    x = candidates[winner, np.arange(B), :]
    u = polar_transform(x)
    return u, x, winner


def ae_sc_decode(llr, code: CodeSpec, perms, *, minsum: bool = False) -> DecodeResult:
    """Automorphism-ensemble SC decoding of a single frame."""
    llr = _check_llrs(np.asarray(llr, dtype=np.float64), code.N)
    U, X, _ = ae_sc_decode_frames(llr[None, :], code, perms, minsum=minsum)
    return DecodeResult(U[0], X[0], correlation_score(X[0], llr))


# ------------------------------------------------------------------- tracing


def _traced_sc(llr, code: CodeSpec, minsum: bool, trace):
    """Reference recursive SC that mirrors the kernels and logs internal LLRs."""
    frozen = code.frozen_mask()
    n = code.n
    rows = []

    def boxplus(a, b):
        aa, ab = np.abs(a), np.abs(b)
        sign = np.where((a < 0) != (b < 0), -1.0, 1.0)
        if minsum:
            return sign * np.minimum(aa, ab)
        mag = (
            np.minimum(aa, ab)
            + np.log1p(np.exp(-(aa + ab)))
            - np.log1p(np.exp(-np.abs(aa - ab)))
        )
        return sign * np.maximum(mag, 0.0)

    def rec(vals, start, level):
        for pos, v in enumerate(vals):
            rows.append((level, start + pos, float(v)))
        if len(vals) == 1:
            u = 0 if frozen[start] or vals[0] >= 0 else 1
            return np.array([u], dtype=np.uint8)
        h = len(vals) // 2
        left = rec(boxplus(vals[:h], vals[h:]), start, level - 1)
        right = rec((1.0 - 2.0 * left) * vals[:h] + vals[h:], start + h, level - 1)
        return np.concatenate([left ^ right, right])

    x = rec(llr, 0, n)
    u = polar_transform(x)
    with open(trace, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "position", "llr"])
        writer.writerows(rows)
    return u, x
