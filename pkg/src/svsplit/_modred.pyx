# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled reduced row echelon form mod p (p < 2^31, so products fit in
64-bit).  Mirrors ``_modred_py.rref_mod`` exactly."""

from libc.stdlib cimport malloc, free


cdef long long _inv_mod(long long a, long long p):
    # extended Euclid; a is nonzero mod p
    cdef long long t = 0, newt = 1, r = p, newr = a % p, q, tmp
    while newr != 0:
        q = r / newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += p
    return t


def rref_mod(rows, long long p):
    """Reduce ``rows`` (list of equal-length lists of ints) in place modulo
    p; returns the pivot column list."""
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t ncols = len(rows[0]) if nrows else 0
    cdef Py_ssize_t i, j, c, r, pr
    cdef long long inv, factor, v
    cdef long long *a
    if nrows == 0 or ncols == 0:
        return []
    a = <long long *> malloc(nrows * ncols * sizeof(long long))
    if a == NULL:
        raise MemoryError()
    try:
        for i in range(nrows):
            row = rows[i]
            for j in range(ncols):
                a[i * ncols + j] = row[j] % p
        pivots = []
        r = 0
        for c in range(ncols):
            if r == nrows:
                break
            pr = -1
            for i in range(r, nrows):
                if a[i * ncols + c] != 0:
                    pr = i
                    break
            if pr < 0:
                continue
            if pr != r:
                for j in range(c, ncols):
                    v = a[pr * ncols + j]
                    a[pr * ncols + j] = a[r * ncols + j]
                    a[r * ncols + j] = v
            inv = _inv_mod(a[r * ncols + c], p)
            if inv != 1:
                for j in range(c, ncols):
                    a[r * ncols + j] = a[r * ncols + j] * inv % p
            for i in range(nrows):
                if i == r:
                    continue
                factor = a[i * ncols + c]
                if factor != 0:
                    for j in range(c, ncols):
                        v = (a[i * ncols + j] - factor * a[r * ncols + j]) % p
                        if v < 0:
                            v += p
                        a[i * ncols + j] = v
            pivots.append(c)
            r += 1
        for i in range(nrows):
            row = rows[i]
            for j in range(ncols):
                row[j] = a[i * ncols + j]
        return pivots
    finally:
        free(a)
