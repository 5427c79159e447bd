"""Graded pieces of the annihilator ideal of a tensor under the
partial-derivation action, minimal-generator counts, and the space of
tensors whose slot contractions lie inside those of T.

Everything here is finite linear algebra in a fixed multidegree; no global
Groebner machinery is needed or used.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import NotConciseError
from .linalg import Matrix, kernel_basis, row_space_basis, rref_in_place
from .tensors import (Format, SVTensor, apolar_act, coefficient_vector,
                      conciseness, key_index_for, monomials, slot_contractions,
                      unit_dual)


def dual_monomials(format: Format, deg) -> list:
    """All dual monomials of the given multidegree, as exponent keys."""
    deg = tuple(deg)
    if len(deg) != format.nfactors:
        raise ValueError("multidegree length mismatch")
    per_factor = [monomials(n, a) for (n, _), a in zip(format.factors, deg)]
    return [tuple(combo) for combo in itertools.product(*per_factor)]


def dual_format(format: Format, deg) -> Format:
    return Format(format.field, [(n, a) for (n, _), a in zip(format.factors, deg)])


@dataclass
class GradedPiece:
    """A multidegree piece of the annihilator: canonical basis of dual
    elements (each stored in the shared sparse tensor encoding)."""

    degree: tuple
    basis: list

    @property
    def dim(self) -> int:
        return len(self.basis)


def ann_piece(T: SVTensor, deg) -> GradedPiece:
    """Basis of the dual elements of multidegree ``deg`` annihilating T,
    i.e. the kernel of r -> r -| T on that graded piece."""
    fmt = T.format
    F = fmt.field
    deg = tuple(deg)
    duals = dual_monomials(fmt, deg)
    dfmt = dual_format(fmt, deg)
    if any(a > d for a, d in zip(deg, fmt.degrees)):
        basis = [SVTensor(dfmt, {r: F.one}, validate=False) for r in duals]
        return GradedPiece(deg, basis)
    images = [apolar_act(T, r) for r in duals]
    idx = key_index_for(images)
    if not idx:
        basis = [SVTensor(dfmt, {r: F.one}, validate=False) for r in duals]
        return GradedPiece(deg, basis)
    A = Matrix(F, [coefficient_vector(img, idx) for img in images])
    combos = kernel_basis(A.transpose())
    basis = [SVTensor(dfmt, {r: c for r, c in zip(duals, combo)}) for combo in combos]
    return GradedPiece(deg, basis)


def min_generator_count(T: SVTensor, deg) -> int:
    """Number of minimal generators of the annihilator in exactly this
    multidegree: dim of the piece minus the dim of the span of products of
    dual linear forms with the pieces one degree lower."""
    fmt = T.format
    F = fmt.field
    deg = tuple(deg)
    piece = ann_piece(T, deg)
    duals = dual_monomials(fmt, deg)
    pos = {r: i for i, r in enumerate(duals)}
    product_rows = []
    for j in range(fmt.nfactors):
        if deg[j] == 0:
            continue
        lower = tuple(a - 1 if s == j else a for s, a in enumerate(deg))
        lower_piece = ann_piece(T, lower)
        for g in lower_piece.basis:
            for i in range(fmt.dims[j]):
                shift = unit_dual(fmt, j, i)
                vec = [F.zero] * len(duals)
                for key, c in g.coeffs.items():
                    shifted = tuple(tuple(a + b for a, b in zip(part, spart))
                                    for part, spart in zip(key, shift))
                    vec[pos[shifted]] = F.add(vec[pos[shifted]], c)
                product_rows.append(vec)
    if not product_rows:
        return piece.dim
    product_dim = len(row_space_basis(product_rows, F))
    return piece.dim - product_dim


def companion_space(T: SVTensor) -> list:
    """Canonical basis of the space of tensors G with every slot
    contraction contained in the corresponding contraction space of T.

    Always contains T in its span; for concise T its dimension is one more
    than the number of top-multidegree minimal generators of the
    annihilator.
    """
    fmt = T.format
    F = fmt.field
    if not conciseness(T).concise:
        raise NotConciseError("companion space requires a concise tensor")
    all_keys = fmt.monomial_keys()
    full_idx = {k: i for i, k in enumerate(all_keys)}
    nfull = len(all_keys)
    condition_rows = []
    for j in range(fmt.nfactors):
        parts = slot_contractions(T, j)
        lowered_degs = tuple(d - (1 if s == j else 0) for s, d in enumerate(fmt.degrees))
        target_keys = dual_format(fmt, lowered_degs).monomial_keys()
        tidx = {k: i for i, k in enumerate(target_keys)}
        span_rows = [coefficient_vector(p, tidx) for p in parts]
        pivots = rref_in_place(span_rows, F)
        pivot_index = {p: k for k, p in enumerate(pivots)}
        for i in range(fmt.dims[j]):
            # alpha_{j,i} -| x^m lands at the lowered key with coefficient m_{j,i}
            deriv_cols = {}
            for key in all_keys:
                e = key[j][i]
                if not e:
                    continue
                lowered = key[:j] + (tuple(
                    v - 1 if s == i else v for s, v in enumerate(key[j])),) + key[j + 1:]
                deriv_cols[key] = (tidx[lowered], F.from_int(e))
            # membership of alpha_i -| G in the contraction span of T is the
            # vanishing of every non-pivot coordinate after elimination:
            # residue_c(v) = v_c - sum_k R_k[c] * v_{p_k}
            for c in range(len(target_keys)):
                if c in pivot_index:
                    continue
                row = [F.zero] * nfull
                nonzero = False
                for key, (tpos, coeff) in deriv_cols.items():
                    if tpos == c:
                        pos = full_idx[key]
                        row[pos] = F.add(row[pos], coeff)
                        nonzero = True
                    elif tpos in pivot_index:
                        rkc = span_rows[pivot_index[tpos]][c]
                        if not F.is_zero(rkc):
                            pos = full_idx[key]
                            row[pos] = F.sub(row[pos], F.mul(rkc, coeff))
                            nonzero = True
                if nonzero:
                    condition_rows.append(row)
    if not condition_rows:
        vectors = [[F.one if i == t else F.zero for i in range(nfull)]
                   for t in range(nfull)]
    else:
        A = Matrix(F, condition_rows)
        vectors = kernel_basis(A)
    vectors = row_space_basis(vectors, F)
    return [SVTensor(fmt, {k: v[i] for k, i in full_idx.items()}, validate=False)
            for v in vectors]


def gradient_fiber_dimension(F_poly: SVTensor) -> int:
    """For a concise form in one symmetric factor: the dimension of the
    fiber of the gradient map, which equals the number of top-degree
    minimal generators of the annihilator."""
    fmt = F_poly.format
    if fmt.nfactors != 1:
        raise NotConciseError("gradient fiber requires a single symmetric factor")
    if not conciseness(F_poly).concise:
        raise NotConciseError("gradient fiber requires a concise form")
    return min_generator_count(F_poly, fmt.degrees)
