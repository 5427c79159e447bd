"""Dense exact linear algebra over Q and GF(p).

Row reduction is the hot kernel of the whole toolkit: every annihilator
piece, centroid solve, kernel and idempotent computation funnels into it.
For GF(p) with p < 2^31 a compiled kernel is used when available, with a
pure-Python twin selected at import time as fallback.  Rational matrices
always take the Fraction path (arbitrary-precision arithmetic does not
benefit from compilation).

All reductions follow one deterministic convention: scan columns left to
right, pivot on the first row with a nonzero entry, scale pivots to 1,
eliminate above and below.  Outputs are therefore reproducible across runs
and across the two kernels.
"""

from __future__ import annotations

from .errors import FieldMismatchError
from ._modred_py import rref_mod as _rref_mod_py

try:
    from ._modred import rref_mod as _rref_mod_fast

    HAVE_COMPILED_KERNEL = True
except ImportError:  # pragma: no cover - depends on the build
    _rref_mod_fast = None
    HAVE_COMPILED_KERNEL = False

_MOD_LIMIT = 1 << 31


def rref_in_place(rows: list[list], field) -> list[int]:
    """Reduced row echelon form of ``rows`` (mutated); returns pivot columns."""
    if not rows or not rows[0]:
        return []
    if field.is_modular and field.char < _MOD_LIMIT:
        kern = _rref_mod_fast if HAVE_COMPILED_KERNEL else _rref_mod_py
        return kern(rows, field.char)
    return _rref_generic(rows, field)


def _rref_generic(rows, field):
    nrows, ncols = len(rows), len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pr = next((i for i in range(r, nrows) if not field.is_zero(rows[i][c])), -1)
        if pr < 0:
            continue
        if pr != r:
            rows[pr], rows[r] = rows[r], rows[pr]
        inv = field.inv(rows[r][c])
        if not field.is_zero(field.sub(inv, field.one)):
            rows[r] = [field.mul(inv, v) for v in rows[r]]
        prow = rows[r]
        for i in range(nrows):
            if i == r or field.is_zero(rows[i][c]):
                continue
            f = rows[i][c]
            rows[i] = [field.sub(v, field.mul(f, pv)) for v, pv in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return pivots


class Matrix:
    """Immutable-by-convention dense matrix over an exact field."""

    __slots__ = ("field", "rows", "nrows", "ncols")

    def __init__(self, field, rows):
        self.field = field
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.ncols for r in self.rows):
            raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, field, n):
        z, o = field.zero, field.one
        return cls(field, [[o if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, field, nrows, ncols):
        z = field.zero
        return cls(field, [[z] * ncols for _ in range(nrows)])

    @classmethod
    def from_columns(cls, field, cols):
        n = len(cols[0]) if cols else 0
        return cls(field, [[col[i] for col in cols] for i in range(n)])

    def column(self, j):
        return [r[j] for r in self.rows]

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    def copy_rows(self):
        return [list(r) for r in self.rows]

    def _check(self, other):
        if self.field != other.field:
            raise FieldMismatchError("matrices over different fields")

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.field == other.field
                and self.rows == other.rows)

    def __hash__(self):
        return hash((self.field, tuple(tuple(r) for r in self.rows)))

    def __add__(self, other):
        self._check(other)
        F = self.field
        return Matrix(F, [[F.add(a, b) for a, b in zip(ra, rb)]
                          for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._check(other)
        F = self.field
        return Matrix(F, [[F.sub(a, b) for a, b in zip(ra, rb)]
                          for ra, rb in zip(self.rows, other.rows)])

    def scale(self, c):
        F = self.field
        return Matrix(F, [[F.mul(c, a) for a in r] for r in self.rows])

    def __matmul__(self, other):
        self._check(other)
        if self.ncols != other.nrows:
            raise ValueError("matrix size mismatch")
        F = self.field
        bt = list(zip(*other.rows))
        out = []
        for row in self.rows:
            out.append([_dot(F, row, col) for col in bt])
        return Matrix(F, out)

    def __mul__(self, other):
        return self.__matmul__(other)

    def apply(self, vec):
        F = self.field
        return [_dot(F, row, vec) for row in self.rows]

    def power(self, n: int):
        result = Matrix.identity(self.field, self.nrows)
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def transpose(self):
        return Matrix(self.field, [list(col) for col in zip(*self.rows)]) \
            if self.rows else Matrix(self.field, [])

    def is_zero(self):
        return all(self.field.is_zero(v) for r in self.rows for v in r)

    def is_identity(self):
        F = self.field
        if self.nrows != self.ncols:
            return False
        for i, row in enumerate(self.rows):
            for j, v in enumerate(row):
                want = F.one if i == j else F.zero
                if not F.is_zero(F.sub(v, want)):
                    return False
        return True

    def rref(self):
        """Returns (rref rows, pivot columns); self is unchanged."""
        rows = self.copy_rows()
        pivots = rref_in_place(rows, self.field)
        return rows, pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols} over {self.field.name})"


def _dot(F, u, v):
    acc = F.zero
    for a, b in zip(u, v):
        if not (F.is_zero(a) or F.is_zero(b)):
            acc = F.add(acc, F.mul(a, b))
    return acc


def kernel_basis(A: Matrix) -> list[list]:
    """Basis of the right null space, one vector per free column.

    Vector k for free column f has 1 at position f, zeros at the other free
    columns, and -R[i][f] at pivot columns (R the reduced echelon form);
    this normalization is deterministic and canonical for a fixed column
    order.
    """
    F = A.field
    rows, pivots = A.rref()
    free = [c for c in range(A.ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [F.zero] * A.ncols
        v[f] = F.one
        for i, p in enumerate(pivots):
            v[p] = F.neg(rows[i][f])
        basis.append(v)
    return basis


def solve_multi(A: Matrix, rhs_cols: list[list]):
    """Solve A x = b for several right-hand sides at once.

    Returns a list of solution vectors (free variables set to zero), with
    None entries for inconsistent systems.  A joint reduction is valid only
    while no pivot falls into the right-hand block (i.e. all systems are
    consistent); on the rare inconsistent input the systems are re-solved
    one at a time.
    """
    F = A.field
    ncols = A.ncols
    aug = [list(r) + [col[i] for col in rhs_cols] for i, r in enumerate(A.rows)]
    pivots = rref_in_place(aug, F)
    if pivots and pivots[-1] >= ncols:
        return [_solve_single(A, col) for col in rhs_cols]
    sols = []
    for t in range(len(rhs_cols)):
        col = ncols + t
        x = [F.zero] * ncols
        for i, p in enumerate(pivots):
            x[p] = aug[i][col]
        sols.append(x)
    return sols


def _solve_single(A: Matrix, b: list):
    F = A.field
    ncols = A.ncols
    aug = [list(r) + [b[i]] for i, r in enumerate(A.rows)]
    pivots = rref_in_place(aug, F)
    if pivots and pivots[-1] == ncols:
        return None
    x = [F.zero] * ncols
    for i, p in enumerate(pivots):
        x[p] = aug[i][ncols]
    return x


def solve(A: Matrix, b: list):
    """One solution of A x = b (free variables zero), or None."""
    return _solve_single(A, b)


def inverse(A: Matrix) -> Matrix:
    if A.nrows != A.ncols:
        raise ValueError("inverse of a non-square matrix")
    eye = Matrix.identity(A.field, A.nrows)
    aug = [list(r) + list(e) for r, e in zip(A.rows, eye.rows)]
    pivots = rref_in_place(aug, A.field)
    if pivots != list(range(A.nrows)):
        raise ValueError("matrix is singular")
    return Matrix(A.field, [row[A.nrows:] for row in aug])


def matrix_minimal_polynomial(X: Matrix):
    """Monic minimal polynomial of a square matrix, via the first linear
    dependence among its powers (flattened)."""
    from .fields import UniPoly
    F = X.field
    n = X.nrows
    span = SpanBuilder(F, n * n)
    powers = []
    current = Matrix.identity(F, n)
    while True:
        flat = [v for row in current.rows for v in row]
        if span.contains(flat):
            break
        span.add(flat)
        powers.append(flat)
        current = current @ X
    flat = [v for row in current.rows for v in row]
    m = len(powers)
    M = Matrix(F, [[powers[k][i] for k in range(m)] for i in range(n * n)])
    sol = solve(M, flat)
    if sol is None:
        raise ValueError("power dependence inconsistent")
    return UniPoly(F, [F.neg(c) for c in sol] + [F.one])


def row_space_basis(vectors: list[list], field) -> list[list]:
    """Canonical (RREF) basis of the span of the given vectors."""
    if not vectors:
        return []
    rows = [list(v) for v in vectors]
    rref_in_place(rows, field)
    return [r for r in rows if any(not field.is_zero(x) for x in r)]


def in_row_space(vectors_rref: list[list], v: list, field) -> bool:
    """Membership test against an RREF basis."""
    rows = [list(r) for r in vectors_rref] + [list(v)]
    rref_in_place(rows, field)
    nonzero = [r for r in rows if any(not field.is_zero(x) for x in r)]
    return len(nonzero) == len(vectors_rref)


class SpanBuilder:
    """Incremental row space with membership queries (kept in echelon form)."""

    def __init__(self, field, width):
        self.field = field
        self.width = width
        self.rows = []

    @property
    def dim(self):
        return len(self.rows)

    def contains(self, v) -> bool:
        return self._reduce(v) is None

    def add(self, v) -> bool:
        """Add v to the span; returns True if the dimension grew."""
        red = self._reduce(v)
        if red is None:
            return False
        self.rows.append(red)
        self.rows.sort(key=_leading_index_key(self.field))
        return True

    def _reduce(self, v):
        F = self.field
        v = list(v)
        for row in self.rows:
            lead = next(i for i, x in enumerate(row) if not F.is_zero(x))
            if not F.is_zero(v[lead]):
                c = v[lead]
                v = [F.sub(a, F.mul(c, b)) for a, b in zip(v, row)]
        if all(F.is_zero(x) for x in v):
            return None
        lead = next(i for i, x in enumerate(v) if not F.is_zero(x))
        v = [F.mul(F.inv(v[lead]), x) for x in v]
        return v


def _leading_index_key(field):
    def key(row):
        return next(i for i, x in enumerate(row) if not field.is_zero(x))
    return key
