"""Pure numpy implementations of the two hot kernels.

Used when the compiled extension is unavailable (or forced off via the
PARABEXT_FORCE_PY environment variable).  Same contracts as the compiled
versions in ``_kernels.pyx``; the test suite checks the two backends agree.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"

# Direct-address counting is used while p^D fits in this many slots.
DENSE_LIMIT = 1 << 22
# Pairwise-sum chunks are bounded to roughly this many int64 entries.
_CHUNK_ENTRIES = 1 << 22


def _encode_powers(p: int, D: int) -> np.ndarray:
    if D * np.log2(p) > 62:
        raise ValueError(f"digit rows too wide to encode: p={p}, D={D}")
    return p ** np.arange(D, dtype=np.int64)


def pair_energy(rows: np.ndarray, p: int) -> int:
    """Sum over v of (number of ordered pairs (i, j) with row_i+row_j = v mod p)^2.

    ``rows`` is an (n, D) array of base-p digit vectors.  Counting runs over
    ordered pairs including i = j.
    """
    rows = np.ascontiguousarray(rows, dtype=np.int8)
    n, D = rows.shape
    if n == 0:
        return 0
    pw = _encode_powers(p, D)
    space = p**D

    if space <= DENSE_LIMIT:
        counts = np.zeros(space, dtype=np.int64)
        chunk = max(1, _CHUNK_ENTRIES // max(n, 1))
        for i0 in range(0, n, chunk):
            block = rows[i0 : i0 + chunk]
            sums = (block[:, None, :].astype(np.int16) + rows[None, :, :]) % p
            enc = sums.astype(np.int64) @ pw
            counts += np.bincount(enc.ravel(), minlength=space)
        return int(np.dot(counts, counts))

    # Sparse path: upper-triangle keys once, diagonal handled by the identity
    # sum_v c(v)^2 = 4*sum c_up^2 + 4*sum_{x in E} c_up(2x) + |E|
    # where c_up counts unordered pairs i < j (2x is injective, char > 2).
    n_up = n * (n - 1) // 2
    keys = np.empty(n_up, dtype=np.int64)
    pos = 0
    for i in range(n - 1):
        sums = (rows[i].astype(np.int16) + rows[i + 1 :]) % p
        m = sums.shape[0]
        keys[pos : pos + m] = sums.astype(np.int64) @ pw
        pos += m
    keys.sort()
    boundaries = np.flatnonzero(np.diff(keys)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [n_up])) if n_up else np.array([], dtype=np.int64)
    run_lengths = ends - starts
    total = 4 * int(np.dot(run_lengths, run_lengths)) + n

    diag = ((2 * rows.astype(np.int16)) % p).astype(np.int64) @ pw
    lo = np.searchsorted(keys, diag, side="left")
    hi = np.searchsorted(keys, diag, side="right")
    total += 4 * int((hi - lo).sum())
    return total


def char_transform(
    trace_rows: np.ndarray,
    weights: np.ndarray,
    eval_digits: np.ndarray,
    p: int,
    sign: int,
) -> np.ndarray:
    """Direct character sum  out[j] = sum_i w_i * omega^(sign * <trace_rows_i, eval_j>).

    omega = exp(2*pi*i/p); the inner product is taken mod p.  This is the
    single primitive behind the grid transform, the extension operator and
    the restriction operator.
    """
    trace_rows = np.ascontiguousarray(trace_rows, dtype=np.int8)
    eval_digits = np.ascontiguousarray(eval_digits, dtype=np.int8)
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    n, D = trace_rows.shape
    m = eval_digits.shape[0]
    if eval_digits.shape[1] != D:
        raise ValueError("trace rows and evaluation digits disagree on width")
    omega = np.exp(2j * np.pi * sign * np.arange(p) / p)
    out = np.empty(m, dtype=np.complex128)
    if n == 0:
        out[:] = 0
        return out
    tr = trace_rows.astype(np.int64)
    chunk = max(1, _CHUNK_ENTRIES // max(n, 1))
    for j0 in range(0, m, chunk):
        block = eval_digits[j0 : j0 + chunk].astype(np.int64)
        phases = (block @ tr.T) % p
        out[j0 : j0 + chunk] = omega[phases] @ weights
    return out
