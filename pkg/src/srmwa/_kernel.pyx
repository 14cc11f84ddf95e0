# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled recommendation kernel.

Draw mapping must stay identical to ``_pykernel`` and ``rng``.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.stdint cimport uint64_t, int64_t, int32_t, uint8_t
from numpy.random cimport bitgen_t

cdef double INV53 = 1.0 / 9007199254740992.0


cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"


cdef inline uint64_t _below(bitgen_t *rng, uint64_t n) noexcept nogil:
    cdef u128 m = <u128>rng.next_uint64(rng.state) * n
    cdef uint64_t low = <uint64_t>m
    cdef uint64_t threshold
    if low < n:
        threshold = (<uint64_t>0 - n) % n
        while low < threshold:
            m = <u128>rng.next_uint64(rng.state) * n
            low = <uint64_t>m
    return <uint64_t>(m >> 64)


def advance(int32_t[:, ::1] stocks, uint8_t[:, ::1] owns, int64_t[::1] counts,
            object bitgen, Py_ssize_t n_steps, double pressure, int64_t[::1] hist=None):
    """Apply ``n_steps`` recommendations in place; return the last step's kind."""
    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(bitgen.capsule, "BitGenerator")
    cdef uint64_t n_agents = stocks.shape[0]
    cdef uint64_t capacity = stocks.shape[1]
    cdef int32_t adv = <int32_t>(owns.shape[1] - 1)
    cdef bint record = hist is not None
    cdef Py_ssize_t step
    cdef uint64_t g, t, k
    cdef int32_t r, beta, f
    cdef int kind = 0

    with nogil:
        for step in range(n_steps):
            g = _below(rng, n_agents)
            t = _below(rng, n_agents - 1)
            if t >= g:
                t += 1
            r = stocks[g, _below(rng, capacity)]
            if (rng.next_uint64(rng.state) >> 11) * INV53 < pressure:
                beta = adv
            else:
                beta = r
            if owns[t, beta]:
                kind = 0
            else:
                k = _below(rng, capacity)
                f = stocks[t, k]
                stocks[t, k] = beta
                owns[t, f] = 0
                owns[t, beta] = 1
                counts[f] -= 1
                counts[beta] += 1
                if beta == adv:
                    kind = 1
                elif f == adv:
                    kind = -1
                else:
                    kind = 0
            if record:
                hist[counts[adv]] += 1
    return kind
