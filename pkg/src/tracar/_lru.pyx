# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled LRU replay kernel. Mirrors tracar._lru_py.lru_run exactly."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def lru_run(const int[::1] pages, const unsigned char[::1] dirty,
            Py_ssize_t n_pages, Py_ssize_t capacity, Py_ssize_t start=0):
    cdef Py_ssize_t n = pages.shape[0]
    if dirty.shape[0] != n:
        raise ValueError("pages and dirty must have equal length")
    if capacity < 1:
        raise ValueError("capacity must be >= 1")

    # doubly linked recency list over page ids; head = MRU, tail = LRU
    cdef cnp.ndarray[cnp.int32_t, ndim=1] prev_a = np.full(n_pages, -1, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] next_a = np.full(n_pages, -1, dtype=np.int32)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] state_a = np.zeros(n_pages, dtype=np.uint8)
    cdef int[::1] prev = prev_a
    cdef int[::1] nxt = next_a
    # bit 0: resident, bit 1: dirty, bit 2: ever seen
    cdef unsigned char[::1] state = state_a

    cdef int head = -1, tail = -1, p, victim, a, b
    cdef Py_ssize_t size = 0, i
    cdef long long misses = 0, cold = 0, misses_after = 0, cold_after = 0, writebacks = 0

    for i in range(n):
        p = pages[i]
        if p < 0 or p >= n_pages:
            raise IndexError("page id out of range")
        if state[p] & 1:
            if p != head:
                a = prev[p]
                b = nxt[p]
                nxt[a] = b
                if b >= 0:
                    prev[b] = a
                else:
                    tail = a
                prev[p] = -1
                nxt[p] = head
                prev[head] = p
                head = p
        else:
            misses += 1
            if i >= start:
                misses_after += 1
            if not (state[p] & 4):
                cold += 1
                if i >= start:
                    cold_after += 1
            if size == capacity:
                victim = tail
                if state[victim] & 2:
                    writebacks += 1
                tail = prev[victim]
                if tail >= 0:
                    nxt[tail] = -1
                else:
                    head = -1
                prev[victim] = -1
                state[victim] = 4
                size -= 1
            state[p] = 5
            prev[p] = -1
            nxt[p] = head
            if head >= 0:
                prev[head] = p
            head = p
            if tail < 0:
                tail = p
            size += 1
        if dirty[i]:
            state[p] |= 2
    return misses, cold, misses_after, cold_after, writebacks
