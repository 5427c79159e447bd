"""Pure-Python reduced row echelon form mod p.

Reference implementation for the compiled kernel in ``_modred.pyx``; both
produce byte-identical output (first nonzero pivot, pivots scaled to 1,
elimination above and below).
"""


def rref_mod(rows: list[list[int]], p: int) -> list[int]:
    """Reduce ``rows`` in place modulo p; returns the pivot column list."""
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pr = -1
        for i in range(r, nrows):
            if rows[i][c] % p:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            rows[pr], rows[r] = rows[r], rows[pr]
        inv = pow(rows[r][c], -1, p)
        if inv != 1:
            row = rows[r]
            for j in range(c, ncols):
                row[j] = row[j] * inv % p
        prow = rows[r]
        for i in range(nrows):
            if i == r:
                continue
            factor = rows[i][c] % p
            if factor:
                row = rows[i]
                for j in range(c, ncols):
                    row[j] = (row[j] - factor * prow[j]) % p
        pivots.append(c)
        r += 1
    return pivots
