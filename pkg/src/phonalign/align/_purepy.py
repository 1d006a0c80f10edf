"""Pure-python (numpy) fallback for the alignment DP kernels.

Same contract as the compiled extension: `last_row` and `full_matrix` over
int16 label codes with copy/replace/delete/insert costs.  Rows are
vectorized; the in-row insert dependency is resolved with a running-minimum
trick, so the fallback stays usable on large inputs, just slower than the
compiled kernel.
"""

import numpy as np


def _row_step(prev, a_i, b, c_copy, c_replace, c_delete, c_insert, i, ins_ramp):
    diag = prev[:-1] + np.where(b == a_i, c_copy, c_replace)
    base = np.minimum(prev[1:] + c_delete, diag)
    # cur[j] = min_{k<=j} cand[k] + c_insert*j, where cand[k] is the best
    # cost of reaching column k without a same-row insert afterwards.
    cand = np.empty(prev.shape[0])
    cand[0] = c_delete * i
    cand[1:] = base - ins_ramp[1:]
    return np.minimum.accumulate(cand) + ins_ramp


def last_row(a, b, c_copy, c_replace, c_delete, c_insert):
    a = np.asarray(a, dtype=np.int16)
    b = np.asarray(b, dtype=np.int16)
    n = b.shape[0]
    ins_ramp = c_insert * np.arange(n + 1, dtype=np.float64)
    prev = ins_ramp.copy()
    for i in range(1, a.shape[0] + 1):
        prev = _row_step(prev, a[i - 1], b, c_copy, c_replace,
                         c_delete, c_insert, i, ins_ramp)
    return prev


def full_matrix(a, b, c_copy, c_replace, c_delete, c_insert):
    a = np.asarray(a, dtype=np.int16)
    b = np.asarray(b, dtype=np.int16)
    m, n = a.shape[0], b.shape[0]
    ins_ramp = c_insert * np.arange(n + 1, dtype=np.float64)
    d = np.empty((m + 1, n + 1), dtype=np.float64)
    d[0] = ins_ramp
    for i in range(1, m + 1):
        d[i] = _row_step(d[i - 1], a[i - 1], b, c_copy, c_replace,
                         c_delete, c_insert, i, ins_ramp)
    return d
