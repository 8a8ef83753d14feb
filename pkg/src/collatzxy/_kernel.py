"""Fixed-width uint64 trajectory kernel.

The kernel stops early, leaving the state in the output arrays, whenever the
next odd step would overflow 64 bits; the caller finishes those trajectories
with Python integers.
"""

import numba as nb
import numpy as np

DONE = 0
OVERFLOW = 1
OVER_BUDGET = 2

# largest odd v with 3v + 1 < 2**64
ODD_LIMIT = (2**64 - 2) // 3


@nb.njit(cache=True, nogil=True)
def _run(starts, budget, ks, xs, ys, peaks, lasts, status):
    one = np.uint64(1)
    three = np.uint64(3)
    limit = np.uint64(ODD_LIMIT)
    for i in range(starts.shape[0]):
        v = starts[i]
        peak = v
        k = 0
        x = 0
        y = 0
        st = DONE
        while v != one:
            if k >= budget:
                st = OVER_BUDGET
                break
            if v & one:
                if v > limit:
                    st = OVERFLOW
                    break
                v = three * v + one
                x += 1
            else:
                v = v >> one
                y += 1
            k += 1
            if v > peak:
                peak = v
        ks[i] = k
        xs[i] = x
        ys[i] = y
        peaks[i] = peak
        lasts[i] = v
        status[i] = st


def run_kernel(starts: np.ndarray, budget: int):
    """Run the kernel over ``starts`` (uint64, all >= 1).

    Returns ``(k, x, y, peak, last, status)`` arrays.
    """
    starts = np.ascontiguousarray(starts, dtype=np.uint64)
    m = starts.shape[0]
    ks = np.empty(m, np.int64)
    xs = np.empty(m, np.int64)
    ys = np.empty(m, np.int64)
    peaks = np.empty(m, np.uint64)
    lasts = np.empty(m, np.uint64)
    status = np.empty(m, np.int8)
    _run(starts, np.int64(budget), ks, xs, ys, peaks, lasts, status)
    return ks, xs, ys, peaks, lasts, status
