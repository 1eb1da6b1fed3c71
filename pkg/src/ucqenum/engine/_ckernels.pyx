# cython: boundscheck=False, wraparound=False
"""Compiled versions of the kernels in ``_kernels_py``."""

cdef tuple _cut(tuple row, tuple positions):
    cdef Py_ssize_t n = len(positions)
    cdef Py_ssize_t i
    cdef list vals = [None] * n
    for i in range(n):
        vals[i] = row[<Py_ssize_t>positions[i]]
    return tuple(vals)


def project(rows, positions, eq_pairs=()):
    cdef set seen = set()
    cdef list out = []
    cdef tuple pos = tuple(positions)
    cdef tuple eqs = tuple(eq_pairs)
    cdef tuple row, t, pair
    cdef bint ok
    for row in rows:
        ok = True
        for pair in eqs:
            if row[<Py_ssize_t>pair[0]] != row[<Py_ssize_t>pair[1]]:
                ok = False
                break
        if not ok:
            continue
        t = _cut(row, pos)
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def key_set(rows, positions, into=None):
    cdef set keys = set() if into is None else into
    cdef tuple pos = tuple(positions)
    cdef tuple row
    for row in rows:
        keys.add(_cut(row, pos))
    return keys


def semijoin(rows, positions, keys):
    cdef tuple pos = tuple(positions)
    cdef list out = []
    cdef tuple row
    for row in rows:
        if _cut(row, pos) in keys:
            out.append(row)
    return out


def build_index(rows, positions, into=None):
    cdef dict index = {} if into is None else into
    cdef tuple pos = tuple(positions)
    cdef tuple row, k
    cdef list bucket
    for row in rows:
        k = _cut(row, pos)
        bucket = index.get(k)
        if bucket is None:
            index[k] = [row]
        else:
            bucket.append(row)
    return index


def intersect(rows, other):
    cdef list out = []
    cdef tuple row
    for row in rows:
        if row in other:
            out.append(row)
    return out
