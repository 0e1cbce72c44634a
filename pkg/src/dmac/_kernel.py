"""Jitted walk engine for throughput-critical hashing.

Valid only for 2^31 <= Q < 2^42: the modular multiply estimates the
quotient with a float64 reciprocal (error at most a couple of units for
operands below 2^42, fixed up by the correction loops) and the remainder is
computed in wrapping uint64 arithmetic, which is exact because the true
remainder plus the correction slack stays far below 2^64.

The pure-Python walk in :mod:`dmac.mac` is the reference; tests hold the
two engines equal on random inputs.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numba import njit, uint64

from .graph import equation_table


@lru_cache(maxsize=None)
def _factor_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    # 0-based (line factor, point factor) per target coordinate; entry 0 unused
    ea = np.zeros(n, dtype=np.int64)
    eb = np.zeros(n, dtype=np.int64)
    for shape in equation_table(n):
        ea[shape.j - 1] = shape.line_factor - 1
        eb[shape.j - 1] = shape.point_factor - 1
    return ea, eb


@njit(cache=True)
def _walk_jit(dirs, iv, q, qinv, eq_a, eq_b, accumulate):  # pragma: no cover
    n = iv.shape[0]
    cur = iv.copy()
    nxt = np.empty(n, dtype=np.uint64)
    is_point = True
    wrap = uint64(1) << uint64(63)
    for i in range(dirs.shape[0]):
        x = cur[i % n] + dirs[i]
        if x >= q:
            x -= q
        quot = uint64(float(x) * float(x) * qinv)
        r = x * x - quot * q
        while r >= wrap:
            r += q
        while r >= q:
            r -= q
        nxt[0] = r
        if is_point:
            for j in range(1, n):
                a = nxt[eq_a[j]]
                b = cur[eq_b[j]]
                quot = uint64(float(a) * float(b) * qinv)
                r = a * b - quot * q
                while r >= wrap:
                    r += q
                while r >= q:
                    r -= q
                v = cur[j] + r
                if v >= q:
                    v -= q
                nxt[j] = v
        else:
            for j in range(1, n):
                a = cur[eq_a[j]]
                b = nxt[eq_b[j]]
                quot = uint64(float(a) * float(b) * qinv)
                r = a * b - quot * q
                while r >= wrap:
                    r += q
                while r >= q:
                    r -= q
                v = cur[j] + q - r
                if v >= q:
                    v -= q
                nxt[j] = v
        if accumulate:
            for j in range(n):
                v = nxt[j] + cur[j]
                if v >= q:
                    v -= q
                nxt[j] = v
        cur, nxt = nxt, cur
        is_point = not is_point
    return cur


def run_walk(dirs: np.ndarray, iv: np.ndarray, q: int, accumulate: bool) -> np.ndarray:
    """Walk ``dirs`` from ``iv``; returns the final coordinate vector.

    Directions and coordinates must already be canonical residues in
    [0, q); callers reduce beforehand.
    """
    if not 2**31 <= q < 2**42:
        raise ValueError(f"kernel supports 2^31 <= Q < 2^42, got {q}")
    ea, eb = _factor_arrays(len(iv))
    return _walk_jit(
        np.ascontiguousarray(dirs, dtype=np.uint64),
        np.ascontiguousarray(iv, dtype=np.uint64),
        np.uint64(q),
        1.0 / q,
        ea,
        eb,
        accumulate,
    )


def warm_up() -> None:
    """Trigger JIT compilation so the first timed call is representative."""
    iv = np.arange(2, dtype=np.uint64)
    run_walk(np.array([1, 2, 3], dtype=np.uint64), iv, 2**31 + 11, True)
    run_walk(np.array([1, 2, 3], dtype=np.uint64), iv, 2**31 + 11, False)
