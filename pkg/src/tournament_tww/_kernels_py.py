"""numpy implementation of the contraction-state kernels.

State layout shared with the compiled module:

- ``st[r, a, b]`` (int8): for relation ``r`` between parts ``a`` and ``b``,
  0 when no pair is related, 1 when every pair is, 2 when mixed;
- ``alive[a]`` (uint8): part ``a`` (named by its smallest vertex) exists;
- ``red[a, b]`` (uint8): ``a`` and ``b`` are not homogeneous;
- ``deg[a]`` (int32): number of red neighbours of ``a``.
"""

import numpy as np

MIXED = 2


def _merged(st, alive, p, q):
    rp, rq = st[:, p, :], st[:, q, :]
    cp, cq = st[:, :, p], st[:, :, q]
    mrow = np.where(rp == rq, rp, MIXED)
    mcol = np.where(cp == cq, cp, MIXED)
    redm = ((mrow == MIXED) | (mcol == MIXED)).any(axis=0) & (alive != 0)
    redm[p] = False
    redm[q] = False
    return mrow, mcol, redm


def trial_merge(st, alive, red, deg, p, q):
    """Maximum error degree after merging parts ``p`` and ``q``; no mutation."""
    _, _, redm = _merged(st, alive, p, q)
    others = deg.astype(np.int64) - red[:, p] - red[:, q] + redm
    live = alive != 0
    live[p] = False
    live[q] = False
    best = int(redm.sum())
    if live.any():
        best = max(best, int(others[live].max()))
    return best


def apply_merge(st, alive, red, deg, p, q):
    """Merge ``q`` into ``p`` in place; return the new maximum error degree."""
    mrow, mcol, redm = _merged(st, alive, p, q)
    st[:, p, :] = mrow
    st[:, :, p] = mcol
    st[:, q, :] = 0
    st[:, :, q] = 0
    alive[q] = 0
    deg -= red[:, p] + red[:, q]
    red[p, :] = redm
    red[:, p] = redm
    red[q, :] = 0
    red[:, q] = 0
    deg += redm
    deg[p] = int(redm.sum())
    deg[q] = 0
    live = alive != 0
    return int(deg[live].max()) if live.any() else 0
