"""Dense linear algebra over GF(q) on integer-encoded numpy arrays."""

from __future__ import annotations

import numpy as np

from .gf import FieldSpec


def as_matrix(M, ncols: int | None = None) -> np.ndarray:
    A = np.array(M, dtype=np.int64)
    if A.ndim == 1:
        A = A.reshape(0 if A.size == 0 else 1, -1) if ncols is None else A.reshape(-1, ncols)
    if A.size == 0 and ncols is not None:
        A = A.reshape(0, ncols)
    return A


def rref(F: FieldSpec, M) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    t = F.tables
    R = np.array(M, dtype=np.int64, copy=True)
    if R.ndim != 2 or R.shape[0] == 0:
        return R.reshape(0, R.shape[-1] if R.ndim == 2 else 0), []
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            R[[r, pr]] = R[[pr, r]]
        lead = R[r, c]
        if lead != 1:
            R[r] = t.mul[t.inv[lead], R[r]]
        col = R[:, c].copy()
        col[r] = 0
        idx = np.flatnonzero(col)
        if idx.size:
            R[idx] = t.add[R[idx], t.mul[t.neg[col[idx]][:, None], R[r][None, :]]]
        pivots.append(c)
        r += 1
    return R[:r], pivots


def rank(F: FieldSpec, M) -> int:
    """Rank by forward elimination only (no back substitution)."""
    t = F.tables
    R = np.array(M, dtype=np.int64, copy=True)
    if R.ndim != 2 or R.size == 0:
        return 0
    if R.shape[0] > R.shape[1]:
        R = R.T.copy()
    rows, cols = R.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            R[[r, pr]] = R[[pr, r]]
        below = R[r + 1:, c]
        idx = np.flatnonzero(below)
        if idx.size:
            factor = t.mul[t.neg[below[idx]], t.inv[R[r, c]]]
            rows_idx = idx + r + 1
            R[rows_idx, c:] = t.add[R[rows_idx, c:], t.mul[factor[:, None], R[r, c:][None, :]]]
        r += 1
    return r


def nullspace(F: FieldSpec, M, ncols: int | None = None) -> np.ndarray:
    """Basis (as rows, in echelon form over free columns) of {x : M x = 0}."""
    A = as_matrix(M, ncols)
    n = A.shape[1]
    R, pivots = rref(F, A)
    free = [c for c in range(n) if c not in set(pivots)]
    t = F.tables
    basis = np.zeros((len(free), n), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, pc in enumerate(pivots):
            basis[i, pc] = t.neg[R[r, f]]
    return basis


def matmul(F: FieldSpec, A, B) -> np.ndarray:
    """Matrix product over GF(p^k) via integer products of base-p digit planes."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    p, k = F.p, F.k
    if k == 1:
        return (A @ B) % p
    t = F.tables
    dA = t.digits[A]
    dB = t.digits[B]
    conv = np.zeros((2 * k - 1,) + (A.shape[:-1] + B.shape[1:]), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            conv[i + j] += dA[..., i] @ dB[..., j]
    conv %= p
    out = np.zeros(A.shape[:-1] + B.shape[1:] + (k,), dtype=np.int64)
    for e in range(2 * k - 1):
        out += conv[e][..., None] * t.reduce[e]
    out %= p
    return out @ t.weights


def row_space_equal(F: FieldSpec, A, B) -> bool:
    RA, _ = rref(F, A)
    RB, _ = rref(F, B)
    return RA.shape == RB.shape and bool(np.array_equal(RA, RB))


def scale_add(F: FieldSpec, x: np.ndarray, c: int, y: np.ndarray) -> np.ndarray:
    """x + c*y elementwise."""
    t = F.tables
    return t.add[x, t.mul[c, y]]
