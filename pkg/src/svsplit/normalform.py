"""Jordan staircases of nilpotent centroid elements and the layered normal
form of tensors carrying them: extraction of the components T_1, ..., T_n,
exact reconstruction, and the single-factor differential-operator form.

Conventions.  A Jordan basis is a family x^(q,r) (1 <= q <= index,
0 <= r <= q-1) with L x^(q,r) = x^(q,r+1) and L x^(q,q-1) = 0; the bottom
row r = q-1 lies in Ker L.  The partial inverse M sends x^(q,r) to
x^(q,r-1) and kills the top row.  Reconstruction applies, per slot, the
operators D_i induced by M^i on bottom-row variables, weighted by inverse
factorials; on degree-1 slots this reduces to plain matrix powers of M.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial

from .centroid import act, is_member
from .errors import (InternalCheckError, NotCentroidMemberError,
                     NotConciseError, NotNilpotentError)
from .linalg import Matrix, SpanBuilder, inverse, kernel_basis
from .tensors import (EndoTuple, Format, SVTensor, change_basis, conciseness,
                      contract_op, desymmetrize_full, symmetrize_full)


@dataclass
class JordanSlot:
    """Jordan data of one nilpotent slot matrix."""

    index: int              # nilpotency index
    heights: dict           # q -> number of columns of height q (q with t_q > 0)
    labels: list            # jordan coordinate labels (q, s, r), basis order
    basis: Matrix           # columns = jordan basis vectors, ambient coords
    basis_inv: Matrix
    partial_inverse: Matrix  # M in ambient coordinates

    def bottom_indices(self, min_height: int = 1) -> list:
        return [i for i, (q, _, r) in enumerate(self.labels)
                if r == q - 1 and q >= min_height]

    def depth_operator(self, i: int) -> Matrix:
        """M^i restricted to bottom-row variables (zero elsewhere), ambient."""
        F = self.basis.field
        dim = self.basis.nrows
        cols = []
        bottoms = set(self.bottom_indices())
        for idx, (q, s, r) in enumerate(self.labels):
            if idx in bottoms and r - i >= 0:
                target = self.labels.index((q, s, r - i))
                col = [F.one if t == target else F.zero for t in range(dim)]
            else:
                col = [F.zero] * dim
            cols.append(col)
        Njord = Matrix.from_columns(F, cols)
        return self.basis @ Njord @ self.basis_inv


def jordan_data(L: Matrix) -> JordanSlot:
    """Deterministic Jordan staircase of a nilpotent matrix.

    Tops x^(q,0) are chosen by greedy echelon complements against
    Ker L^(q-1) plus the pushed-down tops of taller columns; the rest of
    each column is filled by applying L.
    """
    F = L.field
    dim = L.nrows
    if L.nrows != L.ncols:
        raise ValueError("jordan data requires a square matrix")
    kernels = [[]]
    power = Matrix.identity(F, dim)
    index = None
    for i in range(1, dim + 1):
        power = power @ L
        kernels.append(kernel_basis(power))
        if len(kernels[i]) == dim:
            index = i
            break
    if index is None:
        raise NotNilpotentError("matrix is not nilpotent")

    tops = {}
    for q in range(index, 0, -1):
        span = SpanBuilder(F, dim)
        for v in kernels[q - 1]:
            span.add(v)
        for q2 in sorted(tops, reverse=True):
            shift = L.power(q2 - q)
            for v in tops[q2]:
                span.add(shift.apply(v))
        chosen = []
        for v in kernels[q]:
            if span.add(v):
                chosen.append(v)
        if chosen:
            tops[q] = chosen

    labels = []
    columns = []
    for q in sorted(tops, reverse=True):
        for s, top in enumerate(tops[q]):
            vec = top
            for r in range(q):
                labels.append((q, s, r))
                columns.append(vec)
                if r < q - 1:
                    vec = L.apply(vec)
        # bottom rows are killed by L by construction of the kernel flag
    if len(labels) != dim:
        raise InternalCheckError("jordan staircase does not fill the space")
    P = Matrix.from_columns(F, columns)
    Pinv = inverse(P)

    mcols = []
    for idx, (q, s, r) in enumerate(labels):
        if r >= 1:
            target = labels.index((q, s, r - 1))
            mcols.append([F.one if t == target else F.zero for t in range(dim)])
        else:
            mcols.append([F.zero] * dim)
    Mjord = Matrix.from_columns(F, mcols)
    M_amb = P @ Mjord @ Pinv

    heights = {q: len(v) for q, v in tops.items()}
    slot = JordanSlot(index, heights, labels, P, Pinv, M_amb)
    _verify_jordan(L, slot)
    return slot


def _verify_jordan(L: Matrix, slot: JordanSlot):
    F = L.field
    for idx, (q, s, r) in enumerate(slot.labels):
        img = L.apply(slot.basis.column(idx))
        if r < q - 1:
            want = slot.basis.column(slot.labels.index((q, s, r + 1)))
        else:
            want = [F.zero] * L.nrows
        if any(not F.is_zero(F.sub(a, b)) for a, b in zip(img, want)):
            raise InternalCheckError("jordan basis does not implement the shift")


@dataclass
class NormalForm:
    format: Format
    element: EndoTuple
    index: int
    components: list    # T_1 ... T_n, ambient coordinates
    jordans: list       # per slot JordanSlot

    def components_jordan(self) -> list:
        invs = [j.basis_inv for j in self.jordans]
        return [change_basis(Tk, invs) for Tk in self.components]


def _weighted_assignments(e: int, index: int, weight: int, degree_caps):
    """All ways to pick counts nu[(j, i)] (slot j, depth 1 <= i < index)
    with sum of i * nu = weight and per-slot total order <= degree cap."""
    items = [(j, i) for j in range(e) for i in range(1, index)]

    def rec(pos, remaining, orders):
        if remaining == 0:
            yield {}
            return
        if pos == len(items):
            return
        j, i = items[pos]
        max_count = min(remaining // i, degree_caps[j] - orders[j])
        for count in range(max_count, -1, -1):
            if count:
                orders[j] += count
            for rest in rec(pos + 1, remaining - count * i, orders):
                if count:
                    rest = dict(rest)
                    rest[(j, i)] = count
                yield rest
            if count:
                orders[j] -= count
        return

    yield from rec(0, weight, [0] * e)


def _layer(nf_format: Format, jordans, k: int, Tk: SVTensor) -> SVTensor:
    """The k-th reconstruction layer: weighted sum of depth-operator
    applications of total weight k-1 to T_k."""
    F = nf_format.field
    e = nf_format.nfactors
    index = max(j.index for j in jordans) if jordans else 1
    result = SVTensor.zero(nf_format)
    ops = {}
    for assignment in _weighted_assignments(e, index, k - 1, nf_format.degrees):
        t = Tk
        denom = 1
        for (j, i), count in sorted(assignment.items()):
            if (j, i) not in ops:
                ops[(j, i)] = jordans[j].depth_operator(i)
            for _ in range(count):
                t = contract_op(t, j, ops[(j, i)])
            denom *= factorial(count)
        result = result + t.scale(F.inv(F.from_int(denom)))
    return result


def extract_components(T: SVTensor, element: EndoTuple, check: bool = True) -> NormalForm:
    """Peel the layered components of T along a nilpotent centroid element:
    T_k is the (k-1)-fold action on the not-yet-explained remainder, and
    each layer is subtracted via the reconstruction formula.

    Conciseness is not required: membership, the exact vanishing of the
    final remainder, and the per-component support checks validate the
    result step by step.  (The top component is guaranteed nonzero only
    for concise input, and is asserted only there.)
    """
    fmt = T.format
    if check and not is_member(T, element):
        raise NotCentroidMemberError("element is not in the centroid of the tensor")
    jordans = [jordan_data(X) for X in element.mats]
    indexes = {j.index for j in jordans}
    if len(indexes) != 1:
        raise NotCentroidMemberError(
            f"slot nilpotency indexes differ ({sorted(indexes)}); "
            "not a centroid element of a concise tensor")
    n = indexes.pop()

    components = [None] * (n + 1)
    remainder = T
    for k in range(n, 0, -1):
        Tk = remainder
        for _ in range(k - 1):
            Tk = act(Tk, element, check=check)
        components[k] = Tk
        remainder = remainder - _layer(fmt, jordans, k, Tk)
    if not remainder.is_zero():
        raise InternalCheckError("layer peeling left a nonzero remainder")

    nf = NormalForm(fmt, element, n, components[1:], jordans)
    _verify_supports(nf)
    if check and nf.components[-1].is_zero() and conciseness(T).concise:
        raise InternalCheckError("top component vanished for a concise tensor")
    return nf


def _verify_supports(nf: NormalForm):
    """Each T_k must involve only bottom-row variables of height >= k."""
    for k, Tk in enumerate(nf.components, start=1):
        local = change_basis(Tk, [j.basis_inv for j in nf.jordans])
        for j, slot in enumerate(nf.jordans):
            allowed = set(slot.bottom_indices(min_height=k))
            if not local.slot_support(j) <= allowed:
                raise InternalCheckError(
                    f"component {k} leaves its bottom-row subspace in slot {j}")


def reconstruct(nf: NormalForm) -> SVTensor:
    """Evaluate the layered sum; exact inverse of extract_components."""
    total = SVTensor.zero(nf.format)
    for k, Tk in enumerate(nf.components, start=1):
        total = total + _layer(nf.format, nf.jordans, k, Tk)
    return total


@dataclass
class DepthOperator:
    depth: int
    matrix: Matrix
    description: str


@dataclass
class VeroneseForm:
    polynomial: SVTensor
    element: EndoTuple
    index: int
    components: list
    operators: list     # DepthOperator per depth 1..index-1
    jordans: list

    @property
    def normal_form(self) -> NormalForm:
        return NormalForm(self.polynomial.format, self.element, self.index,
                          self.components, self.jordans)


def veronese_form(F_poly: SVTensor, element: EndoTuple, check: bool = True) -> VeroneseForm:
    """Single-factor specialization: components F_k plus the explicit
    differential operators D_i; the multinomial-weighted summation is
    cross-checked against an independent evaluation on the full
    desymmetrization (plain matrix actions on every tensor copy)."""
    fmt = F_poly.format
    if fmt.nfactors != 1:
        raise NotConciseError("veronese form requires a single symmetric factor")
    nf = extract_components(F_poly, element, check=check)
    slot = nf.jordans[0]
    ops = []
    for i in range(1, nf.index):
        mat = slot.depth_operator(i)
        pieces = []
        for idx, (q, s, r) in enumerate(slot.labels):
            if r == q - 1 and r - i >= 0:
                pieces.append(f"x({q},{q - 1 - i};{s}) d/dx({q},{q - 1};{s})")
        ops.append(DepthOperator(i, mat, " + ".join(pieces) if pieces else "0"))

    _check_against_full_desymmetrization(nf)
    return VeroneseForm(F_poly, element, nf.index, nf.components, ops, nf.jordans)


def _check_against_full_desymmetrization(nf: NormalForm):
    """Independent route: embed each component in the d-fold tensor power,
    apply plain powers of the partial inverse on every copy (one exponent
    tuple per composition of k-1), symmetrize, compare."""
    fmt = nf.format
    F = fmt.field
    n_dim, d = fmt.factors[0]
    M = nf.jordans[0].partial_inverse
    Mpows = [Matrix.identity(F, n_dim)]
    for _ in range(nf.index):
        Mpows.append(Mpows[-1] @ M)
    total = SVTensor.zero(fmt)
    for k, Tk in enumerate(nf.components, start=1):
        segre = desymmetrize_full(Tk)
        acc = SVTensor.zero(segre.format)
        for deltas in _compositions(k - 1, d):
            t = segre
            for copy, delta in enumerate(deltas):
                if delta:
                    t = contract_op(t, copy, Mpows[delta])
            acc = acc + t
        total = total + symmetrize_full(acc, n_dim, d)
    if total != reconstruct(nf):
        raise InternalCheckError(
            "multinomial summation disagrees with the desymmetrized evaluation")


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest
