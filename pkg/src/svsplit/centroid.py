"""The centroid of a concise tensor: the commutative unital algebra of
endomorphism tuples acting identically on every slot.

Two independent computations are provided: the definitional joint linear
solve, and recovery from the annihilator-side companion space.  They agree
as subspaces and are cross-checked in the pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

from .apolar import companion_space
from .errors import (InternalCheckError, NotCentroidMemberError,
                     NotConciseError, UnsupportedFormatError)
from .fields import UniPoly
from .linalg import Matrix, kernel_basis, row_space_basis, solve_multi
from .tensors import (EndoTuple, Format, SVTensor, apolar_act,
                      coefficient_vector, conciseness, contract_op,
                      desymmetrize_slot, is_symmetric_image, key_index_for,
                      mode_apply, slot_contractions, symmetrize_slot)


@dataclass
class CentroidAlgebra:
    """Basis (identity tuple first) plus exact structure constants
    c[a][b][k] for basis_a * basis_b = sum_k c[a][b][k] basis_k."""

    format: Format
    basis: list          # list[EndoTuple]
    structure: list      # dim x dim x dim nested lists of scalars

    @property
    def dim(self) -> int:
        return len(self.basis)

    def unit_coords(self) -> list:
        F = self.format.field
        return [F.one] + [F.zero] * (self.dim - 1)

    def multiply(self, a: list, b: list) -> list:
        F = self.format.field
        out = [F.zero] * self.dim
        for i, ai in enumerate(a):
            if F.is_zero(ai):
                continue
            for j, bj in enumerate(b):
                if F.is_zero(bj):
                    continue
                cij = F.mul(ai, bj)
                for k, s in enumerate(self.structure[i][j]):
                    if not F.is_zero(s):
                        out[k] = F.add(out[k], F.mul(cij, s))
        return out

    def add(self, a: list, b: list) -> list:
        F = self.format.field
        return [F.add(x, y) for x, y in zip(a, b)]

    def scale(self, c, a: list) -> list:
        F = self.format.field
        return [F.mul(c, x) for x in a]

    def power(self, a: list, n: int) -> list:
        out = self.unit_coords()
        for _ in range(n):
            out = self.multiply(out, a)
        return out

    def element_tuple(self, coords: list) -> EndoTuple:
        F = self.format.field
        flat = [F.zero] * len(self.basis[0].flatten())
        for c, b in zip(coords, self.basis):
            if F.is_zero(c):
                continue
            flat = [F.add(v, F.mul(c, w)) for v, w in zip(flat, b.flatten())]
        return EndoTuple.from_flat(self.format, flat)

    def coordinates_of(self, tup: EndoTuple) -> list:
        """Coordinates of a tuple in the basis; raises if not a member."""
        F = self.format.field
        cols = [b.flatten() for b in self.basis]
        A = Matrix(F, [[col[i] for col in cols] for i in range(len(cols[0]))])
        sol = solve_multi(A, [tup.flatten()])[0]
        if sol is None:
            raise NotCentroidMemberError("tuple is not in the centroid span")
        return sol

    def subspace_rref(self) -> list:
        """Canonical echelon form of the flattened basis (for comparisons)."""
        return row_space_basis([b.flatten() for b in self.basis], self.format.field)


def _require_supported(T: SVTensor):
    fmt = T.format
    if any(d < 1 for d in fmt.degrees):
        raise UnsupportedFormatError("every factor must have degree at least 1")
    if fmt.total_degree < 3:
        raise UnsupportedFormatError(
            f"total degree {fmt.total_degree} < 3: the centroid need not be "
            "commutative there (binary forms, matrices); refusing")
    if not conciseness(T).concise:
        raise NotConciseError("centroid requires a concise tensor")


def _pairwise_rows(T: SVTensor, unknown_tuples):
    """Rows of the joint system: for each unknown basis endomorphism, the
    stacked equality residuals (1/d_1) Y_1 -|_1 T - (1/d_j) Y_j -|_j T and,
    for symmetric slots, the symmetric-image residuals of Y_j o_j T."""
    fmt = T.format
    F = fmt.field
    e = fmt.nfactors
    degrees = fmt.degrees
    inv_d = [F.inv(F.from_int(d)) for d in degrees]

    eq_blocks = []
    mixed_blocks = []
    for (slot, X) in unknown_tuples:
        scaled = contract_op(T, slot, X).scale(inv_d[slot])
        eq = []
        for j in range(1, e):
            if slot == 0:
                eq.append(scaled)
            elif slot == j:
                eq.append(-scaled)
            else:
                eq.append(None)
        eq_blocks.append(eq)
        mixed = {}
        if degrees[slot] >= 2:
            M = mode_apply(T, slot, X)
            resid = M - desymmetrize_slot(symmetrize_slot(M), slot)
            mixed[slot] = resid
        mixed_blocks.append(mixed)
    return eq_blocks, mixed_blocks


def compute_centroid(T: SVTensor) -> CentroidAlgebra:
    """Definitional centroid: solve the joint linear system in the entries
    of (Y_1, ..., Y_e)."""
    _require_supported(T)
    fmt = T.format
    F = fmt.field
    e = fmt.nfactors
    dims = fmt.dims

    unknowns = []
    for j in range(e):
        n = dims[j]
        for i in range(n):
            for k in range(n):
                E = Matrix.zeros(F, n, n)
                E.rows[i][k] = F.one
                unknowns.append((j, E))
    eq_blocks, mixed_blocks = _pairwise_rows(T, unknowns)

    # column index spaces for each equality block and each mixed block
    eq_indices = []
    for j in range(1, e):
        tensors = [blk[j - 1] for blk in eq_blocks if blk[j - 1] is not None]
        eq_indices.append(key_index_for(tensors))
    mixed_indices = {}
    for slot in range(e):
        if fmt.degrees[slot] >= 2:
            keys = set()
            for blk in mixed_blocks:
                if slot in blk:
                    keys.update(blk[slot].coeffs)
            mixed_indices[slot] = {k: i for i, k in enumerate(sorted(keys))}

    columns = []
    for blk_eq, blk_mixed in zip(eq_blocks, mixed_blocks):
        col = []
        for j in range(1, e):
            idx = eq_indices[j - 1]
            vec = [F.zero] * len(idx)
            t = blk_eq[j - 1]
            if t is not None:
                for key, c in t.coeffs.items():
                    vec[idx[key]] = c
            col.extend(vec)
        for slot in sorted(mixed_indices):
            idx = mixed_indices[slot]
            vec = [F.zero] * len(idx)
            if slot in blk_mixed:
                for key, c in blk_mixed[slot].coeffs.items():
                    vec[idx[key]] = c
            col.extend(vec)
        columns.append(col)

    A = Matrix.from_columns(F, columns) if columns else Matrix.zeros(F, 1, 0)
    members = kernel_basis(A)
    tuples = [EndoTuple.from_flat(fmt, v) for v in members]
    return algebra_from_tuples(fmt, tuples)


def centroid_via_apolar(T: SVTensor) -> CentroidAlgebra:
    """Centroid recovered from the companion space: each member G gives,
    per slot, the unique matrix expressing the contractions of G in the
    contractions of T."""
    _require_supported(T)
    fmt = T.format
    F = fmt.field
    comp = companion_space(T)
    tuples = []
    solvers = []
    for j in range(fmt.nfactors):
        parts = slot_contractions(T, j)
        idx = key_index_for(parts + [apolar_act(G, _unit(fmt, j, i))
                                     for G in comp for i in range(fmt.dims[j])])
        S = Matrix.from_columns(F, [coefficient_vector(p, idx) for p in parts])
        solvers.append((S, idx))
    for G in comp:
        mats = []
        for j in range(fmt.nfactors):
            S, idx = solvers[j]
            rhs = [coefficient_vector(apolar_act(G, _unit(fmt, j, i)), idx)
                   for i in range(fmt.dims[j])]
            sols = solve_multi(S, rhs)
            if any(s is None for s in sols):
                raise InternalCheckError("companion member not expressible in contractions")
            # row i of X_j is the solution for alpha_i -| G
            mats.append(Matrix(F, sols))
        tuples.append(EndoTuple(fmt, mats))
    return algebra_from_tuples(fmt, tuples)


def _unit(fmt, j, i):
    from .tensors import unit_dual
    return unit_dual(fmt, j, i)


def algebra_from_tuples(fmt: Format, tuples: list) -> CentroidAlgebra:
    """Normalize a spanning set to an identity-first echelon basis and
    compute exact structure constants."""
    F = fmt.field
    identity = EndoTuple.identity(fmt)
    u = identity.flatten()
    span = row_space_basis([t.flatten() for t in tuples], F)
    # the identity tuple is a member (Euler); subtract its (coordinate-0)
    # component from every echelon row, then re-echelon the complement
    if not span:
        raise InternalCheckError("centroid span is empty")
    residues = []
    for r in span:
        c = r[0]
        residues.append([F.sub(a, F.mul(c, b)) for a, b in zip(r, u)])
    rest = row_space_basis(residues, F)
    if len(rest) != len(span) - 1:
        raise InternalCheckError("identity tuple is not in the computed centroid")
    basis = [identity] + [EndoTuple.from_flat(fmt, r) for r in rest]

    flat_cols = [b.flatten() for b in basis]
    width = len(flat_cols[0])
    B = Matrix(F, [[col[i] for col in flat_cols] for i in range(width)])
    dim = len(basis)
    products = []
    for a in range(dim):
        for b in range(dim):
            prod = EndoTuple(fmt, [X @ Y for X, Y in zip(basis[a].mats, basis[b].mats)])
            products.append(prod.flatten())
    sols = solve_multi(B, products)
    structure = [[None] * dim for _ in range(dim)]
    pos = 0
    for a in range(dim):
        for b in range(dim):
            s = sols[pos]
            pos += 1
            if s is None:
                raise InternalCheckError("centroid is not closed under product")
            structure[a][b] = s
    for a in range(dim):
        for b in range(dim):
            if structure[a][b] != structure[b][a]:
                raise InternalCheckError("centroid product is not commutative")
    return CentroidAlgebra(fmt, basis, structure)


def is_member(T: SVTensor, tup: EndoTuple) -> bool:
    """Direct check of the defining conditions for one tuple."""
    fmt = T.format
    F = fmt.field
    ref = None
    for j in range(fmt.nfactors):
        G = contract_op(T, j, tup.mats[j]).scale(F.inv(F.from_int(fmt.degrees[j])))
        if ref is None:
            ref = G
        elif G != ref:
            return False
    for j in range(fmt.nfactors):
        if fmt.degrees[j] >= 2:
            if is_symmetric_image(mode_apply(T, j, tup.mats[j])) is None:
                return False
    return True


def act(T: SVTensor, tup: EndoTuple, check: bool = True) -> SVTensor:
    """The common tensor (1/d_j) X_j -|_j T of a centroid member."""
    fmt = T.format
    F = fmt.field
    result = contract_op(T, 0, tup.mats[0]).scale(F.inv(F.from_int(fmt.degrees[0])))
    if check:
        for j in range(1, fmt.nfactors):
            other = contract_op(T, j, tup.mats[j]).scale(F.inv(F.from_int(fmt.degrees[j])))
            if other != result:
                raise NotCentroidMemberError("slot actions disagree; tuple is not in the centroid")
    return result


def act_coords(A: CentroidAlgebra, coords: list, T: SVTensor, check: bool = True) -> SVTensor:
    return act(T, A.element_tuple(coords), check=check)


def minimal_polynomial(A: CentroidAlgebra, coords: list) -> UniPoly:
    """Monic least-degree polynomial annihilating the element, computed by
    the first linear dependence among its powers."""
    F = A.format.field
    from .linalg import SpanBuilder
    span = SpanBuilder(F, A.dim)
    powers = [A.unit_coords()]
    span.add(powers[0])
    current = A.unit_coords()
    while True:
        current = A.multiply(current, coords)
        if span.contains(current):
            break
        span.add(current)
        powers.append(current)
    m = len(powers)
    width = A.dim
    M = Matrix(F, [[powers[k][i] for k in range(m)] for i in range(width)])
    sol = solve_multi(M, [current])[0]
    if sol is None:
        raise InternalCheckError("power dependence inconsistent")
    coeffs = [F.neg(c) for c in sol] + [F.one]
    return UniPoly(F, coeffs)
