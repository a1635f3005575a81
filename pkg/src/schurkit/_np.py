"""Exact integer / mod-p linear algebra on numpy arrays.

Everything here is exact: arrays hold Python-int semantics.  The fast path
uses ``int64``; whenever intermediate values could approach the word size the
array is escalated to ``dtype=object`` (arbitrary-precision ints), so results
never silently overflow.  No floating point anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np

# Escalate to bignum once any entry magnitude passes this bound.  Row updates
# multiply two entries, so 2**30 leaves ample room inside int64.
_GUARD = 1 << 30


def as_array(rows, cols_hint: int = 0) -> np.ndarray:
    """Build a 2-D exact array from an iterable of row iterables."""
    rows = [list(r) for r in rows]
    if not rows:
        return np.zeros((0, cols_hint), dtype=np.int64)
    big = any(not isinstance(x, int) or abs(x) > _GUARD for r in rows for x in r)
    return np.array(rows, dtype=object if big else np.int64)


def to_object(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        return a
    out = np.empty(a.shape, dtype=object)
    out[...] = [[int(x) for x in row] for row in a] if a.ndim == 2 else [int(x) for x in a]
    return out


def _maybe_escalate(a: np.ndarray) -> np.ndarray:
    if a.dtype == object or a.size == 0:
        return a
    if int(np.abs(a).max()) > _GUARD:
        return to_object(a)
    return a


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact matrix product, escalating to bignum when int64 could overflow."""
    if a.dtype != object and b.dtype != object:
        inner = a.shape[1]
        if inner == 0 or a.size == 0 or b.size == 0:
            return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        ma = int(np.abs(a).max())
        mb = int(np.abs(b).max())
        if ma * mb * inner < (1 << 62):
            return a @ b
        a = to_object(a)
    if b.dtype != object:
        b = to_object(b)
    if a.dtype != object:
        a = to_object(a)
    if a.shape[1] == 0:
        z = np.zeros((a.shape[0], b.shape[1]), dtype=object)
        z[...] = 0
        return z
    return a @ b


def matmul_modp(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    inner = a.shape[1]
    if inner == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    if (p - 1) ** 2 * inner < (1 << 62) and a.dtype != object and b.dtype != object:
        return (a @ b) % p
    return np.array([[int(x) % p for x in row] for row in matmul(to_object(a), to_object(b))],
                    dtype=np.int64)


# ----------------------------------------------------------------------
# Integer echelon (row Hermite form)
# ----------------------------------------------------------------------

def echelon_int(a: np.ndarray, transform: bool = False):
    """Row Hermite form of an integer matrix.

    Returns ``(H, U, pivots)`` with ``U @ a == H`` for unimodular ``U`` (``U``
    is None unless requested).  ``H`` has positive pivots, zero rows at the
    bottom, and entries above each pivot reduced into ``[0, pivot)``.

    The transform (when requested) is carried in the same work array so every
    row operation is a single fused numpy op; the work escalates from int64
    to bignum objects before any entry could overflow.
    """
    m, n = a.shape
    W = a.astype(object).copy() if a.dtype == object else a.copy()
    if transform:
        eye = np.eye(m, dtype=W.dtype if W.dtype != object else np.int64)
        if W.dtype == object:
            eye = to_object(eye)
        W = np.concatenate([W, eye], axis=1)

    # Overflow guard: maintain an additive upper bound on entry magnitudes and
    # only rescan (then possibly escalate to bignum) when the bound trips.
    est = int(np.abs(W).max()) if (W.dtype != object and W.size) else 0

    def guarded_update(rows_slice, j, qs, r):
        nonlocal W, est
        if W.dtype != object:
            rowmax = int(np.abs(W[r, j:]).max()) if W[r, j:].size else 0
            maxq = int(np.abs(qs).max()) if qs.size else 0
            if maxq and rowmax:
                est_new = est + maxq * rowmax
                if est_new > _GUARD:
                    true_max = int(np.abs(W).max())
                    if true_max + maxq * rowmax > _GUARD:
                        W = to_object(W)
                        qs = qs.astype(object) if hasattr(qs, "astype") else qs
                    else:
                        est_new = true_max + maxq * rowmax
                if W.dtype != object:
                    est = est_new
        W[rows_slice, j:] -= qs[:, None] * W[r, j:][None, :]

    r = 0
    pivots = []
    for j in range(n):
        if r >= m:
            break
        # Shrink entries in column j below row r until all are cleared.
        while True:
            col = W[r:, j]
            nzmask = col != 0
            if not nzmask.any():
                break
            if W.dtype == object:
                nz = [i for i in range(len(col)) if col[i] != 0]
                i_min = min(nz, key=lambda i: abs(int(col[i])))
            else:
                abscol = np.where(nzmask, np.abs(col), np.iinfo(np.int64).max)
                i_min = int(abscol.argmin())
            pr = r + i_min
            if pr != r:
                W[[r, pr]] = W[[pr, r]]
            piv = W[r, j]
            below = W[r + 1:, j]
            if not (below != 0).any():
                break
            qs = below // piv
            guarded_update(slice(r + 1, m), j, qs, r)
        if r < m and W[r, j] != 0:
            if W[r, j] < 0:
                W[r] = -W[r]
            piv = W[r, j]
            if r > 0:
                qs = W[:r, j] // piv
                if (qs != 0).any():
                    guarded_update(slice(0, r), j, qs, r)
            pivots.append(j)
            r += 1
    if transform:
        return W[:, :n], W[:, n:], pivots
    return W, None, pivots


def kernel_int(a: np.ndarray) -> np.ndarray:
    """Canonical basis of the saturated lattice ``{x : x @ a == 0}``."""
    H, U, pivots = echelon_int(a, transform=True)
    r = len(pivots)
    ker = U[r:, :]
    K, _, _ = echelon_int(ker)
    kr = sum(1 for row in K if any(x != 0 for x in row))
    return K[:kr, :]


def rank_int(a: np.ndarray) -> int:
    _, _, pivots = echelon_int(a)
    return len(pivots)


# ----------------------------------------------------------------------
# Mod-p reduced row echelon
# ----------------------------------------------------------------------

def echelon_modp(a: np.ndarray, p: int, transform: bool = False):
    """RREF over F_p.  Returns ``(R, U, pivots)`` with ``U @ a == R`` mod p."""
    m, n = a.shape
    R = (a % p).astype(np.int64)
    U = np.eye(m, dtype=np.int64) if transform else None
    r = 0
    pivots = []
    for j in range(n):
        if r >= m:
            break
        pr = next((i for i in range(r, m) if R[i, j] % p), None)
        if pr is None:
            continue
        if pr != r:
            R[[r, pr]] = R[[pr, r]]
            if U is not None:
                U[[r, pr]] = U[[pr, r]]
        inv = pow(int(R[r, j]), p - 2, p)
        R[r] = (R[r] * inv) % p
        if U is not None:
            U[r] = (U[r] * inv) % p
        rows = [i for i in range(m) if i != r and R[i, j]]
        if rows:
            qs = R[rows, j].copy()
            R[rows] = (R[rows] - qs[:, None] * R[r][None, :]) % p
            if U is not None:
                U[rows] = (U[rows] - qs[:, None] * U[r][None, :]) % p
        pivots.append(j)
        r += 1
    return R, U, pivots


def kernel_modp(a: np.ndarray, p: int) -> np.ndarray:
    R, U, pivots = echelon_modp(a, p, transform=True)
    r = len(pivots)
    ker = U[r:, :]
    K, _, kp = echelon_modp(ker, p)
    return K[:len(kp), :]


def rank_modp(a: np.ndarray, p: int) -> int:
    _, _, pivots = echelon_modp(a, p)
    return len(pivots)


# ----------------------------------------------------------------------
# Rational helpers
# ----------------------------------------------------------------------

def clear_denominators(rows) -> np.ndarray:
    """Scale each row to integers: same row space (NOT the same left kernel)."""
    out = []
    for row in rows:
        row = [Fraction(x) for x in row]
        den = 1
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
        out.append([int(x * den) for x in row])
    return as_array(out)


def clear_denominators_columns(rows, cols: int) -> np.ndarray:
    """Scale each column to integers: same left kernel (column ops only)."""
    rows = [[Fraction(x) for x in row] for row in rows]
    dens = [1] * cols
    for row in rows:
        for j, x in enumerate(row):
            dens[j] = dens[j] * x.denominator // gcd(dens[j], x.denominator)
    return as_array([[int(x * dens[j]) for j, x in enumerate(row)] for row in rows])


def kernel_rational(rows, cols: int) -> list[list[Fraction]]:
    """RREF-canonical basis of the Q-left-kernel of a Fraction/int matrix."""
    ker = kernel_int(clear_denominators_columns(rows, cols) if len(rows)
                     else as_array([], cols))
    return rref_normalize_rational([[int(x) for x in row] for row in ker])


def rref_normalize_rational(rows) -> list[list[Fraction]]:
    """Reduce a Q-matrix of row vectors to canonical RREF (as Fractions)."""
    work = [[Fraction(x) for x in row] for row in rows]
    m = len(work)
    n = len(work[0]) if m else 0
    r = 0
    pivots = []
    for j in range(n):
        if r >= m:
            break
        pr = next((i for i in range(r, m) if work[i][j] != 0), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        pv = work[r][j]
        work[r] = [x / pv for x in work[r]]
        for i in range(m):
            if i != r and work[i][j] != 0:
                c = work[i][j]
                work[i] = [x - c * y for x, y in zip(work[i], work[r])]
        pivots.append(j)
        r += 1
    return work[:r]
