"""Numba kernel for the subsampled randomized Hadamard transform.

The transform runs in float32: the sketch feeds a constant-factor score
approximation, so single precision is far below the noise floor while halving
memory traffic. Sign flipping, zero padding and the f32 cast are fused into
the load pass; the butterfly then proceeds radix-8 with radix-4/2 finishers.
Column blocks keep each thread's working set cache-resident and make the
output independent of thread scheduling.
"""

import numba
import numpy as np
from numba import njit, prange

numba.config.THREADING_LAYER = "workqueue"  # always available; avoids the TBB probe


@njit(parallel=True, fastmath=True, cache=True)
def _srht_kernel(x, signs, work, block):
    n, d = x.shape
    n2 = work.shape[0]
    nblk = (d + block - 1) // block
    for b in prange(nblk):
        c0 = b * block
        c1 = min(c0 + block, d)
        for i in range(n2):
            if i < n:
                s = signs[i]
                for c in range(c0, c1):
                    work[i, c] = np.float32(s * x[i, c])
            else:
                for c in range(c0, c1):
                    work[i, c] = np.float32(0.0)
        h = 1
        while h * 8 <= n2:
            for start in range(0, n2, 8 * h):
                for i in range(start, start + h):
                    for c in range(c0, c1):
                        x0 = work[i, c]
                        x1 = work[i + h, c]
                        x2 = work[i + 2 * h, c]
                        x3 = work[i + 3 * h, c]
                        x4 = work[i + 4 * h, c]
                        x5 = work[i + 5 * h, c]
                        x6 = work[i + 6 * h, c]
                        x7 = work[i + 7 * h, c]
                        s0 = x0 + x1
                        d0 = x0 - x1
                        s1 = x2 + x3
                        d1 = x2 - x3
                        s2 = x4 + x5
                        d2 = x4 - x5
                        s3 = x6 + x7
                        d3 = x6 - x7
                        t0 = s0 + s1
                        t1 = s0 - s1
                        t2 = d0 + d1
                        t3 = d0 - d1
                        t4 = s2 + s3
                        t5 = s2 - s3
                        t6 = d2 + d3
                        t7 = d2 - d3
                        work[i, c] = t0 + t4
                        work[i + h, c] = t2 + t6
                        work[i + 2 * h, c] = t1 + t5
                        work[i + 3 * h, c] = t3 + t7
                        work[i + 4 * h, c] = t0 - t4
                        work[i + 5 * h, c] = t2 - t6
                        work[i + 6 * h, c] = t1 - t5
                        work[i + 7 * h, c] = t3 - t7
            h *= 8
        while h * 4 <= n2:
            for start in range(0, n2, 4 * h):
                for i in range(start, start + h):
                    for c in range(c0, c1):
                        x0 = work[i, c]
                        x1 = work[i + h, c]
                        x2 = work[i + 2 * h, c]
                        x3 = work[i + 3 * h, c]
                        s0 = x0 + x1
                        d0 = x0 - x1
                        s1 = x2 + x3
                        d1 = x2 - x3
                        work[i, c] = s0 + s1
                        work[i + h, c] = d0 + d1
                        work[i + 2 * h, c] = s0 - s1
                        work[i + 3 * h, c] = d0 - d1
            h *= 4
        while h < n2:
            for start in range(0, n2, 2 * h):
                for i in range(start, start + h):
                    for c in range(c0, c1):
                        u = work[i, c]
                        v = work[i + h, c]
                        work[i, c] = u + v
                        work[i + h, c] = u - v
            h *= 2


def srht_transform(x: np.ndarray, signs: np.ndarray, block: int = 32) -> np.ndarray:
    """Return H @ diag(signs) @ pad(x) in float32.

    H is the unnormalized +-1 Walsh-Hadamard matrix of the padded size; the
    caller folds the 1/sqrt(n2) normalization into its row-sampling scale.
    """
    n, d = x.shape
    n2 = 1 << max(0, n - 1).bit_length()
    work = np.empty((n2, d), dtype=np.float32)
    _srht_kernel(x, signs, work, block)
    return work
