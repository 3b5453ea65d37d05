# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled contraction-state kernels; same contract as ``_kernels_py``."""

cimport cython

cdef inline signed char _mix(signed char a, signed char b) nogil:
    return a if a == b else 2


def trial_merge(signed char[:, :, ::1] st, unsigned char[::1] alive,
                unsigned char[:, ::1] red, int[::1] deg, Py_ssize_t p, Py_ssize_t q):
    cdef Py_ssize_t R = st.shape[0], N = st.shape[1]
    cdef Py_ssize_t r, x
    cdef int best = 0, dm = 0, d
    cdef bint hit
    with nogil:
        for x in range(N):
            if not alive[x] or x == p or x == q:
                continue
            hit = False
            for r in range(R):
                if _mix(st[r, p, x], st[r, q, x]) == 2 or _mix(st[r, x, p], st[r, x, q]) == 2:
                    hit = True
                    break
            d = deg[x] - red[x, p] - red[x, q] + hit
            if hit:
                dm += 1
            if d > best:
                best = d
    return dm if dm > best else best


def apply_merge(signed char[:, :, ::1] st, unsigned char[::1] alive,
                unsigned char[:, ::1] red, int[::1] deg, Py_ssize_t p, Py_ssize_t q):
    cdef Py_ssize_t R = st.shape[0], N = st.shape[1]
    cdef Py_ssize_t r, x
    cdef int best = 0, dm = 0
    cdef bint hit
    with nogil:
        alive[q] = 0
        for x in range(N):
            if not alive[x] or x == p:
                for r in range(R):
                    st[r, q, x] = 0
                    st[r, x, q] = 0
                red[q, x] = 0
                red[x, q] = 0
                continue
            hit = False
            for r in range(R):
                st[r, p, x] = _mix(st[r, p, x], st[r, q, x])
                st[r, x, p] = _mix(st[r, x, p], st[r, x, q])
                st[r, q, x] = 0
                st[r, x, q] = 0
                if st[r, p, x] == 2 or st[r, x, p] == 2:
                    hit = True
            deg[x] += hit - red[x, p] - red[x, q]
            red[p, x] = hit
            red[x, p] = hit
            red[q, x] = 0
            red[x, q] = 0
            dm += hit
        deg[p] = dm
        deg[q] = 0
        for x in range(N):
            if alive[x] and deg[x] > best:
                best = deg[x]
    return best
