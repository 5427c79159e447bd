"""Partially symmetric tensors in Segre-Veronese format and the two
endomorphism actions on them.

A tensor T in S^{d_1}V_1 x ... x S^{d_e}V_e is stored as a sparse map from
exponent keys to nonzero coefficients.  A key is an e-tuple of exponent
tuples; the j-th entry has length dim(V_j) and total degree d_j.
Coefficients are plain monomial coefficients (T = sum c_m x^m), so the
dual-ring action below is literal partial differentiation; symmetrization
factors appear only inside the desymmetrize/symmetrize helpers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import (CharacteristicError, FieldMismatchError, NotConciseError,
                     ZeroTensorError)
from .linalg import Matrix, inverse, kernel_basis


@dataclass(frozen=True)
class Format:
    """Shape descriptor: per-factor (dimension, degree) plus coefficient field.

    Degree-0 factors are legal in derived formats (full contractions);
    analysis entry points require every degree to be at least 1.
    """

    field: object
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple((int(n), int(d)) for n, d in self.factors))
        for n, d in self.factors:
            if n < 1 or d < 0:
                raise ValueError(f"bad factor (dim={n}, degree={d})")
        if getattr(self.field, "is_modular", False) and any(d >= 2 for _, d in self.factors):
            if self.field.char <= self.total_degree:
                raise CharacteristicError(
                    f"characteristic {self.field.char} must exceed total degree "
                    f"{self.total_degree} for symmetric factors")

    @property
    def nfactors(self) -> int:
        return len(self.factors)

    @property
    def dims(self) -> tuple:
        return tuple(n for n, _ in self.factors)

    @property
    def degrees(self) -> tuple:
        return tuple(d for _, d in self.factors)

    @property
    def total_degree(self) -> int:
        return sum(d for _, d in self.factors)

    def with_degree(self, j: int, degree: int) -> "Format":
        factors = list(self.factors)
        factors[j] = (factors[j][0], degree)
        return Format(self.field, factors)

    def with_dim(self, j: int, dim: int) -> "Format":
        factors = list(self.factors)
        factors[j] = (dim, factors[j][1])
        return Format(self.field, factors)

    def with_field(self, field) -> "Format":
        return Format(field, self.factors)

    def space_dim(self) -> int:
        total = 1
        for n, d in self.factors:
            total *= _binom(n + d - 1, d)
        return total

    def monomial_keys(self) -> list:
        """All exponent keys in the fixed deterministic order."""
        per_factor = [monomials(n, d) for n, d in self.factors]
        return [tuple(combo) for combo in itertools.product(*per_factor)]


def _binom(n, k):
    from math import comb
    return comb(n, k)


def monomials(nvars: int, degree: int) -> list:
    """Exponent tuples of the given total degree, lexicographically
    descending (leading variable first); the global ordering convention."""
    if nvars == 1:
        return [(degree,)]
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials(nvars - 1, degree - first):
            out.append((first,) + rest)
    return out


def _tuple_add(m, i, delta):
    lst = list(m)
    lst[i] += delta
    return tuple(lst)


class SVTensor:
    """Sparse Segre-Veronese tensor (immutable by convention)."""

    __slots__ = ("format", "coeffs")

    def __init__(self, format: Format, coeffs, validate: bool = True):
        ring = format.field
        clean = {}
        for key, c in dict(coeffs).items():
            if _ring_is_zero(ring, c):
                continue
            clean[key] = c
        if validate:
            for key in clean:
                _validate_key(format, key)
        self.format = format
        self.coeffs = clean

    @classmethod
    def zero(cls, format: Format) -> "SVTensor":
        return cls(format, {}, validate=False)

    @classmethod
    def from_terms(cls, format: Format, terms) -> "SVTensor":
        ring = format.field
        acc = {}
        for key, c in terms:
            key = tuple(tuple(part) for part in key)
            acc[key] = _ring_add(ring, acc.get(key), c)
        return cls(format, acc)

    def terms(self):
        """Deterministically ordered (key, coefficient) pairs."""
        return sorted(self.coeffs.items(), key=lambda kv: kv[0])

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "SVTensor"):
        if self.format != other.format:
            raise FieldMismatchError("tensors in different formats")

    def __add__(self, other):
        self._check(other)
        ring = self.format.field
        acc = dict(self.coeffs)
        for key, c in other.coeffs.items():
            acc[key] = _ring_add(ring, acc.get(key), c)
        return SVTensor(self.format, acc, validate=False)

    def __sub__(self, other):
        self._check(other)
        ring = self.format.field
        acc = dict(self.coeffs)
        for key, c in other.coeffs.items():
            acc[key] = _ring_add(ring, acc.get(key), _ring_neg(ring, c))
        return SVTensor(self.format, acc, validate=False)

    def __neg__(self):
        ring = self.format.field
        return SVTensor(self.format,
                        {k: _ring_neg(ring, c) for k, c in self.coeffs.items()},
                        validate=False)

    def scale(self, c) -> "SVTensor":
        ring = self.format.field
        return SVTensor(self.format,
                        {k: ring.mul(c, v) for k, v in self.coeffs.items()},
                        validate=False)

    def __eq__(self, other):
        return (isinstance(other, SVTensor) and self.format == other.format
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.format, tuple(self.terms())))

    def coefficient(self, key):
        key = tuple(tuple(p) for p in key)
        return self.coeffs.get(key, self.format.field.zero)

    def slot_support(self, j: int) -> set:
        """Variable indices of factor j that occur with nonzero exponent."""
        used = set()
        for key in self.coeffs:
            for i, ex in enumerate(key[j]):
                if ex:
                    used.add(i)
        return used

    def map_coefficients(self, fn, new_ring) -> "SVTensor":
        fmt = self.format.with_field(new_ring)
        return SVTensor(fmt, {k: fn(c) for k, c in self.coeffs.items()})

    def __repr__(self):
        n = len(self.coeffs)
        return f"SVTensor({self.format.factors}, {n} terms over {self.format.field.name})"


def _ring_is_zero(ring, c):
    return ring.is_zero(c)


def _ring_add(ring, a, b):
    if a is None:
        return b
    return ring.add(a, b)


def _ring_neg(ring, c):
    return ring.neg(c)


def _validate_key(format: Format, key):
    if len(key) != format.nfactors:
        raise ValueError(f"key {key} has {len(key)} factors, format has {format.nfactors}")
    for part, (n, d) in zip(key, format.factors):
        if len(part) != n or any(e < 0 for e in part) or sum(part) != d:
            raise ValueError(f"exponent part {part} violates (dim={n}, degree={d})")


class MixedTensor:
    """Element of S^{d_1}V_1 x ... x (V_j x S^{d_j-1}V_j) x ... with the
    j-th slot split; keys are (i, key) with i the index of the split-off
    basis vector and key an exponent key of the lowered format."""

    __slots__ = ("format", "slot", "coeffs")

    def __init__(self, format: Format, slot: int, coeffs):
        ring = format.field
        self.format = format
        self.slot = slot
        self.coeffs = {k: c for k, c in dict(coeffs).items() if not ring.is_zero(c)}

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return (isinstance(other, MixedTensor) and self.format == other.format
                and self.slot == other.slot and self.coeffs == other.coeffs)

    def __sub__(self, other):
        ring = self.format.field
        acc = dict(self.coeffs)
        for k, c in other.coeffs.items():
            acc[k] = _ring_add(ring, acc.get(k), ring.neg(c))
        return MixedTensor(self.format, self.slot, acc)

    def terms(self):
        return sorted(self.coeffs.items(), key=lambda kv: kv[0])

    def __repr__(self):
        return f"MixedTensor(slot={self.slot}, {len(self.coeffs)} terms)"


class EndoTuple:
    """An element of End(V_1) x ... x End(V_e) matched to a format."""

    __slots__ = ("format", "mats")

    def __init__(self, format: Format, mats):
        mats = tuple(mats)
        if len(mats) != format.nfactors:
            raise ValueError("wrong number of matrices")
        for X, n in zip(mats, format.dims):
            if X.nrows != n or X.ncols != n:
                raise ValueError(f"matrix size {X.nrows}x{X.ncols} does not match dim {n}")
            if X.field != format.field:
                raise FieldMismatchError("matrix field differs from tensor field")
        self.format = format
        self.mats = mats

    @classmethod
    def identity(cls, format: Format) -> "EndoTuple":
        return cls(format, [Matrix.identity(format.field, n) for n in format.dims])

    def flatten(self) -> list:
        out = []
        for X in self.mats:
            for row in X.rows:
                out.extend(row)
        return out

    @classmethod
    def from_flat(cls, format: Format, vec) -> "EndoTuple":
        mats = []
        pos = 0
        for n in format.dims:
            rows = [vec[pos + i * n: pos + (i + 1) * n] for i in range(n)]
            mats.append(Matrix(format.field, rows))
            pos += n * n
        return cls(format, mats)

    def __eq__(self, other):
        return (isinstance(other, EndoTuple) and self.format == other.format
                and self.mats == other.mats)

    def __repr__(self):
        return f"EndoTuple(dims={self.format.dims})"


def contract_op(T: SVTensor, j: int, X: Matrix) -> SVTensor:
    """The differential-operator action of X on slot j:
    sum_{i,k} X[i][k] * x_i d/dx_k applied to the j-th symmetric factor."""
    fmt = T.format
    F = fmt.field
    n = fmt.dims[j]
    if X.nrows != n or X.ncols != n:
        raise ValueError("matrix size mismatch for slot")
    acc = {}
    for key, c in T.coeffs.items():
        m = key[j]
        for k in range(n):
            if not m[k]:
                continue
            base = F.mul(c, F.from_int(m[k]))
            row_entries = [(i, X.rows[i][k]) for i in range(n) if not F.is_zero(X.rows[i][k])]
            for i, lam in row_entries:
                newm = _tuple_add(_tuple_add(m, k, -1), i, 1)
                newkey = key[:j] + (newm,) + key[j + 1:]
                acc[newkey] = _ring_add(F, acc.get(newkey), F.mul(base, lam))
    return SVTensor(fmt, acc, validate=False)


def desymmetrize_slot(T: SVTensor, j: int) -> MixedTensor:
    """Canonical embedding of slot j into V_j x S^{d_j-1}V_j:
    x^m -> sum_k (m_k / d_j) x_k (x) x^(m - e_k)."""
    fmt = T.format
    F = fmt.field
    d = fmt.degrees[j]
    if d < 1:
        raise ValueError("cannot split a degree-0 slot")
    inv_d = _inv_int(F, d)
    acc = {}
    for key, c in T.coeffs.items():
        m = key[j]
        for k, mk in enumerate(m):
            if not mk:
                continue
            lowered = key[:j] + (_tuple_add(m, k, -1),) + key[j + 1:]
            coeff = F.mul(c, F.mul(F.from_int(mk), inv_d))
            acc[(k, lowered)] = _ring_add(F, acc.get((k, lowered)), coeff)
    return MixedTensor(fmt, j, acc)


def _inv_int(F, n: int):
    if getattr(F, "is_modular", False) and n % F.char == 0:
        raise CharacteristicError(f"{n} is not invertible in {F.name}")
    return F.inv(F.from_int(n))


def symmetrize_slot(M: MixedTensor) -> SVTensor:
    """Projection V_j x S^{d_j-1}V_j -> S^{d_j}V_j:
    x_i (x) x^m -> x^(m + e_i)."""
    fmt = M.format
    F = fmt.field
    j = M.slot
    acc = {}
    for (i, lowered), c in M.coeffs.items():
        m = _tuple_add(lowered[j], i, 1)
        key = lowered[:j] + (m,) + lowered[j + 1:]
        acc[key] = _ring_add(F, acc.get(key), c)
    return SVTensor(fmt, acc, validate=False)


def mode_apply(T: SVTensor, j: int, X: Matrix) -> MixedTensor:
    """Apply X to the split-off V_j copy: X acting on the first leg of the
    canonical desymmetrization.  d_j * symmetrize(mode_apply(T, j, X))
    equals contract_op(T, j, X)."""
    fmt = T.format
    F = fmt.field
    n = fmt.dims[j]
    if X.nrows != n or X.ncols != n:
        raise ValueError("matrix size mismatch for slot")
    D = desymmetrize_slot(T, j)
    acc = {}
    for (k, lowered), c in D.coeffs.items():
        for i in range(n):
            lam = X.rows[i][k]
            if F.is_zero(lam):
                continue
            acc[(i, lowered)] = _ring_add(F, acc.get((i, lowered)), F.mul(c, lam))
    return MixedTensor(fmt, j, acc)


def is_symmetric_image(M: MixedTensor):
    """The tensor G with desymmetrize(G) == M, or None if M is not in the
    image of the embedding."""
    G = symmetrize_slot(M)
    if desymmetrize_slot(G, M.slot) == M:
        return G
    return None


def apolar_act(T: SVTensor, r) -> SVTensor:
    """Action of the dual monomial r (an e-tuple of exponent tuples) by
    iterated partial differentiation; lowers slot degrees by deg(r)."""
    fmt = T.format
    F = fmt.field
    r = tuple(tuple(part) for part in r)
    if len(r) != fmt.nfactors:
        raise ValueError("dual monomial has wrong number of factors")
    drops = [sum(part) for part in r]
    new_fmt = Format(F, [(n, d - drop) if d - drop >= 0 else (n, 0)
                         for (n, d), drop in zip(fmt.factors, drops)])
    if any(drop > d for (_, d), drop in zip(fmt.factors, drops)):
        return SVTensor.zero(new_fmt)
    acc = {}
    for key, c in T.coeffs.items():
        coeff_int = 1
        new_key = []
        dead = False
        for part, rpart in zip(key, r):
            new_part = []
            for m, a in zip(part, rpart):
                if a > m:
                    dead = True
                    break
                for step in range(a):
                    coeff_int *= (m - step)
                new_part.append(m - a)
            if dead:
                break
            new_key.append(tuple(new_part))
        if dead:
            continue
        val = F.mul(c, F.from_int(coeff_int))
        if F.is_zero(val):
            continue
        nk = tuple(new_key)
        acc[nk] = _ring_add(F, acc.get(nk), val)
    return SVTensor(new_fmt, acc, validate=False)


def apply_dual(dual: SVTensor, T: SVTensor) -> SVTensor:
    """Apply a dual-ring element (stored in the shared sparse encoding)."""
    result = None
    for key, c in dual.terms():
        piece = apolar_act(T, key).scale(c)
        result = piece if result is None else result + piece
    if result is None:
        drops = dual.format.degrees
        fmt = Format(T.format.field,
                     [(n, d - drop) for (n, d), drop in zip(T.format.factors, drops)])
        return SVTensor.zero(fmt)
    return result


def unit_dual(format: Format, j: int, i: int):
    """The dual basis monomial alpha_{j,i} as an exponent key."""
    parts = []
    for s, (n, _) in enumerate(format.factors):
        part = [0] * n
        if s == j:
            part[i] = 1
        parts.append(tuple(part))
    return tuple(parts)


def slot_contractions(T: SVTensor, j: int) -> list:
    """The tensors alpha_i -| T for the dual basis of slot j."""
    return [apolar_act(T, unit_dual(T.format, j, i)) for i in range(T.format.dims[j])]


def coefficient_vector(T: SVTensor, key_index: dict) -> list:
    F = T.format.field
    vec = [F.zero] * len(key_index)
    for key, c in T.coeffs.items():
        vec[key_index[key]] = c
    return vec


def key_index_for(tensors) -> dict:
    """Index map over the union of supports (deterministic order)."""
    keys = set()
    for t in tensors:
        keys.update(t.coeffs)
    return {k: i for i, k in enumerate(sorted(keys))}


@dataclass
class ConcisenessResult:
    ranks: tuple
    concise: bool
    reduced: SVTensor
    embeddings: list  # per slot: dims[j] x rank[j] matrix, columns = essential basis


def conciseness(T: SVTensor) -> ConcisenessResult:
    """Per-slot contraction ranks, plus T re-expressed on its essential
    subspaces (with the change-of-basis columns).

    T is concise iff every rank equals the slot dimension.
    """
    if T.is_zero():
        raise ZeroTensorError("conciseness of the zero tensor is undefined")
    fmt = T.format
    F = fmt.field
    ranks = []
    embeddings = []
    for j in range(fmt.nfactors):
        if fmt.degrees[j] == 0:
            ranks.append(1 if fmt.dims[j] >= 1 else 0)
            embeddings.append(Matrix.identity(F, fmt.dims[j]))
            continue
        contractions = slot_contractions(T, j)
        idx = key_index_for(contractions)
        A = Matrix(F, [coefficient_vector(t, idx) for t in contractions]) \
            if idx else Matrix.zeros(F, fmt.dims[j], 1)
        # left kernel of the contraction matrix = dual vectors killing T
        left_kernel = kernel_basis(A.transpose())
        if left_kernel:
            K = Matrix(F, left_kernel)
            essential = kernel_basis(K)
        else:
            essential = Matrix.identity(F, fmt.dims[j]).columns()
        ranks.append(fmt.dims[j] - len(left_kernel))
        embeddings.append(Matrix.from_columns(F, essential) if essential
                          else Matrix.zeros(F, fmt.dims[j], 0))
    concise = all(r == n for r, n in zip(ranks, fmt.dims))
    if concise:
        reduced = T
        embeddings = [Matrix.identity(F, n) for n in fmt.dims]
    else:
        reduced = T
        for j in range(fmt.nfactors):
            if ranks[j] == fmt.dims[j]:
                continue
            P = _complete_to_basis(embeddings[j])
            local = substitute_slot(reduced, j, inverse(P).columns())
            support = local.slot_support(j)
            if any(i >= ranks[j] for i in support):
                raise ValueError("essential subspace reduction failed")
            reduced = _restrict_slot(local, j, ranks[j])
    return ConcisenessResult(tuple(ranks), concise, reduced, embeddings)


def _complete_to_basis(B: Matrix) -> Matrix:
    """Extend the columns of B to an invertible matrix using standard basis
    vectors, chosen greedily in index order."""
    F = B.field
    n = B.nrows
    cols = B.columns()
    from .linalg import SpanBuilder
    span = SpanBuilder(F, n)
    for col in cols:
        if not span.add(col):
            raise ValueError("embedding columns are dependent")
    for i in range(n):
        if span.dim == n:
            break
        e = [F.zero] * n
        e[i] = F.one
        if span.add(e):
            cols.append(e)
    return Matrix.from_columns(F, cols)


def _restrict_slot(T: SVTensor, j: int, new_dim: int) -> SVTensor:
    fmt = T.format
    new_fmt = fmt.with_dim(j, new_dim)
    acc = {}
    for key, c in T.coeffs.items():
        part = key[j][:new_dim]
        if sum(part) != sum(key[j]):
            raise ValueError("support outside restricted slot")
        acc[key[:j] + (tuple(part),) + key[j + 1:]] = c
    return SVTensor(new_fmt, acc)


def embed_slot(T: SVTensor, j: int, new_dim: int) -> SVTensor:
    """Pad slot j with fresh trailing variables (inverse of _restrict_slot)."""
    fmt = T.format
    pad = new_dim - fmt.dims[j]
    if pad < 0:
        raise ValueError("cannot shrink via embed_slot")
    new_fmt = fmt.with_dim(j, new_dim)
    acc = {key[:j] + (key[j] + (0,) * pad,) + key[j + 1:]: c
           for key, c in T.coeffs.items()}
    return SVTensor(new_fmt, acc, validate=False)


def substitute_slot(T: SVTensor, j: int, cols, ring=None) -> SVTensor:
    """Multiplicative substitution on slot j: variable x_l is replaced by the
    linear form with coordinate vector cols[l].

    This is the algebra map induced by the linear map with the given
    columns; on degree-1 slots it reduces to applying the matrix.
    """
    fmt = T.format
    R = ring if ring is not None else fmt.field
    out_fmt = fmt if ring is None else fmt.with_field(ring)
    n = fmt.dims[j]
    lin_forms = []
    for l in range(n):
        col = cols[l]
        form = {}
        for k in range(n):
            c = col[k]
            if not R.is_zero(c):
                form[_unit_exp(n, k)] = c
        lin_forms.append(form)
    power_cache = {}

    def var_power(l, e):
        if e == 0:
            return {(0,) * n: R.from_int(1)}
        key = (l, e)
        if key not in power_cache:
            power_cache[key] = _slot_poly_mul(var_power(l, e - 1), lin_forms[l], R)
        return power_cache[key]

    acc = {}
    for key, c in T.coeffs.items():
        c = c if ring is None else _coerce_scalar(fmt.field, R, c)
        poly = {(0,) * n: R.from_int(1)}
        for l, e in enumerate(key[j]):
            if e:
                poly = _slot_poly_mul(poly, var_power(l, e), R)
        for mono, pc in poly.items():
            val = R.mul(c, pc)
            if R.is_zero(val):
                continue
            nk = key[:j] + (mono,) + key[j + 1:]
            acc[nk] = _ring_add(R, acc.get(nk), val)
    return SVTensor(out_fmt, acc, validate=False)


def _coerce_scalar(old_ring, new_ring, c):
    if old_ring == new_ring:
        return c
    from .fields import PolyRing
    if isinstance(new_ring, PolyRing) and new_ring.base == old_ring:
        return new_ring.from_base(c)
    raise FieldMismatchError(f"cannot coerce scalar from {old_ring!r} to {new_ring!r}")


def _unit_exp(n, k):
    e = [0] * n
    e[k] = 1
    return tuple(e)


def _slot_poly_mul(p1: dict, p2: dict, R) -> dict:
    out = {}
    for m1, c1 in p1.items():
        for m2, c2 in p2.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            v = R.mul(c1, c2)
            if R.is_zero(v):
                continue
            prev = out.get(m)
            out[m] = v if prev is None else R.add(prev, v)
    return {m: c for m, c in out.items() if not R.is_zero(c)}


def change_basis(T: SVTensor, mats: list) -> SVTensor:
    """Rewrite T through the per-slot substitutions given by matrices."""
    out = T
    for j, P in enumerate(mats):
        if P is None:
            continue
        out = substitute_slot(out, j, P.columns())
    return out


def euler_identity_check(T: SVTensor, j: int) -> bool:
    """d_j * desymmetrize_j(T) == sum_i x_i (x) (alpha_i -| T), computed
    through the two independent code paths."""
    fmt = T.format
    F = fmt.field
    d = fmt.degrees[j]
    lhs = desymmetrize_slot(T, j)
    lhs_scaled = MixedTensor(fmt, j, {k: F.mul(F.from_int(d), c)
                                      for k, c in lhs.coeffs.items()})
    acc = {}
    for i, piece in enumerate(slot_contractions(T, j)):
        for key, c in piece.coeffs.items():
            acc[(i, key)] = _ring_add(F, acc.get((i, key)), c)
    rhs = MixedTensor(fmt, j, acc)
    return lhs_scaled == rhs


def desymmetrize_full(F_poly: SVTensor) -> SVTensor:
    """Embed a single-factor symmetric tensor into the d-fold Segre format
    (one degree-1 factor per copy), dividing by the usual word counts."""
    fmt = F_poly.format
    if fmt.nfactors != 1:
        raise ValueError("desymmetrize_full expects a single-factor tensor")
    F = fmt.field
    n, d = fmt.factors[0]
    segre_fmt = Format(F, [(n, 1)] * d)
    from math import factorial
    acc = {}
    for (m,), c in F_poly.coeffs.items():
        letters = []
        for i, e in enumerate(m):
            letters.extend([i] * e)
        weight = 1
        for e in m:
            weight *= factorial(e)
        coeff = F.mul(c, F.div(F.from_int(weight), F.from_int(factorial(d))))
        for word in set(itertools.permutations(letters)):
            key = tuple(_unit_exp(n, i) for i in word)
            acc[key] = _ring_add(F, acc.get(key), coeff)
    return SVTensor(segre_fmt, acc, validate=False)


def symmetrize_full(T: SVTensor, n: int, d: int) -> SVTensor:
    """Project a d-fold Segre tensor on copies of one space back to the
    symmetric format (sum over word contents)."""
    F = T.format.field
    fmt = Format(F, [(n, d)])
    acc = {}
    for key, c in T.coeffs.items():
        content = [0] * n
        for part in key:
            content[part.index(1)] += 1
        k = ((tuple(content)),)
        acc[k] = _ring_add(F, acc.get(k), c)
    return SVTensor(fmt, acc, validate=False)
