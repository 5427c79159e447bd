"""One-parameter families certifying that a tensor carrying a nilpotent
centroid element of index n is a limit of n-fold direct sums.

The family is assembled in the Jordan coordinates of the element: the
staircase operators Id + t*w_j*M + ... + (t*w_j*M)^(q-1) are applied
multiplicatively to each slot of every component T_k, combined with
coefficients solving a Vandermonde system in the pairwise distinct weights
w_1, ..., w_n.  All coefficients are exact polynomials in the formal
parameter t; evaluation happens only when extracting the split witness at
a concrete t0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, InternalCheckError, Refusal
from .fields import PolyRing, UniPoly
from .linalg import Matrix, inverse, solve_multi
from .normalform import NormalForm, extract_components
from .tensors import (EndoTuple, Format, SVTensor, change_basis, conciseness,
                      substitute_slot)


def default_omegas(field, n: int) -> list:
    """The weight pattern 0, 1, -1, 2, -2, ... mapped into the field."""
    if getattr(field, "is_modular", False) and n > field.char:
        raise Refusal(f"need {n} distinct weights, field has {field.char} elements")
    out = [field.zero]
    k = 1
    while len(out) < n:
        out.append(field.from_int(k))
        if len(out) < n:
            out.append(field.from_int(-k))
        k += 1
    return out[:n]


def vandermonde_coefficients(field, omegas: list) -> list:
    """The unique alpha with sum_j alpha_j w_j^(g-1) = 0 for g < k and = 1
    for g = k, where k = len(omegas)."""
    k = len(omegas)
    if len({field.fmt(w) for w in omegas}) != k:
        raise InputError("weights must be pairwise distinct")
    rows = []
    power = [field.one] * k
    for _ in range(k):
        rows.append(list(power))
        power = [field.mul(p, w) for p, w in zip(power, omegas)]
    rhs = [field.zero] * (k - 1) + [field.one]
    sol = solve_multi(Matrix(field, rows), [rhs])[0]
    if sol is None:
        raise InternalCheckError("vandermonde system is singular")
    return sol


@dataclass
class DegenFamily:
    """S_t = sum_k t^(n-k) sum_{j<=k} alpha_{k,j} (staircase_j applied to T_k),
    stored with exact polynomial coefficients plus everything needed to
    evaluate and split at concrete parameter values."""

    tensor: SVTensor          # the certified tensor T
    normal_form: NormalForm
    omegas: list
    alphas: list              # alphas[k-1] = coefficients for k weights
    family: SVTensor          # over PolyRing(field), ambient coordinates
    components_jordan: list   # T_k in jordan coordinates

    @property
    def index(self) -> int:
        return self.normal_form.index

    @property
    def field(self):
        return self.tensor.format.field


def _staircase_columns(slot, omega_val, tring: PolyRing):
    """Columns (over the polynomial ring) of Id + t*w*M + (t*w*M)^2 + ...
    on bottom-row variables of the jordan staircase; zero elsewhere.  Each
    column runs to its full height q-1."""
    F = tring.base
    dim = len(slot.labels)
    t = UniPoly.x(F)
    cols = []
    for idx, (q, s, r) in enumerate(slot.labels):
        col = [tring.zero] * dim
        if r == q - 1:
            wpow = F.one
            for step in range(q):
                target = slot.labels.index((q, s, r - step))
                col[target] = (t ** step).scale(wpow)
                wpow = F.mul(wpow, omega_val)
        cols.append(col)
    return cols


def build_family(T: SVTensor, element: EndoTuple, omegas=None,
                 check: bool = True) -> DegenFamily:
    """Assemble the certifying family for (T, element)."""
    nf = extract_components(T, element, check=check)
    F = T.format.field
    n = nf.index
    omegas = list(omegas) if omegas is not None else default_omegas(F, n)
    if len(omegas) != n:
        raise InputError(f"need exactly {n} weights, got {len(omegas)}")
    alphas = [vandermonde_coefficients(F, omegas[:k]) for k in range(1, n + 1)]

    tring = PolyRing(F)
    comps_jordan = nf.components_jordan()
    fmt = T.format
    e = fmt.nfactors
    family_jordan = SVTensor.zero(fmt.with_field(tring))
    for k in range(1, n + 1):
        Tk = comps_jordan[k - 1]
        if Tk.is_zero():
            continue
        t_weight = UniPoly.x(F) ** (n - k)
        for j in range(1, k + 1):
            piece = Tk
            for slot_i in range(e):
                cols = _staircase_columns(nf.jordans[slot_i], omegas[j - 1], tring)
                piece = substitute_slot(piece, slot_i, cols, ring=tring)
            coeff = t_weight.scale(alphas[k - 1][j - 1])
            family_jordan = family_jordan + piece.map_coefficients(
                lambda c: c * coeff, tring)
    # back to ambient coordinates
    family = family_jordan
    for slot_i in range(e):
        P = nf.jordans[slot_i].basis
        cols = [[tring.from_base(v) for v in P.column(l)]
                for l in range(P.ncols)]
        family = substitute_slot(family, slot_i, cols, ring=tring)
    return DegenFamily(T, nf, omegas, alphas, family, comps_jordan)


@dataclass
class LimitReport:
    ok: bool
    order: int                # required valuation (index - 1)
    discrepancies: list       # (key, polynomial) pairs violating the order/limit

    def __str__(self):
        if self.ok:
            return f"family = t^{self.order} * T + O(t^{self.order + 1}): verified"
        return f"limit verification FAILED at {len(self.discrepancies)} keys"


def verify_limit(fam: DegenFamily, T: SVTensor | None = None) -> LimitReport:
    """Check coefficientwise that the family equals t^(n-1) T plus terms of
    t-order at least n."""
    T = T if T is not None else fam.tensor
    F = fam.field
    n = fam.index
    discrepancies = []
    keys = set(fam.family.coeffs) | set(T.coeffs)
    for key in sorted(keys):
        poly = fam.family.coeffs.get(key, UniPoly.zero(F))
        want_lead = T.coeffs.get(key, F.zero)
        for i, c in enumerate(poly.coeffs):
            if i < n - 1 and not F.is_zero(c):
                discrepancies.append((key, poly))
                break
        else:
            got = poly.coeff(n - 1)
            if not F.is_zero(F.sub(got, want_lead)):
                discrepancies.append((key, poly))
    return LimitReport(not discrepancies, n - 1, discrepancies)


@dataclass
class SplitWitness:
    t0: object
    value: SVTensor           # the family evaluated at t0
    summands: list            # ambient SVTensors, one per weight group
    subspaces: list           # per slot: list (per group) of ambient basis vectors
    concise_flags: list
    sum_matches: bool


def evaluate_family(fam: DegenFamily, t0) -> SVTensor:
    F = fam.field
    return fam.family.map_coefficients(lambda p: p.evaluate(t0), F)


def evaluate_and_split(fam: DegenFamily, t0) -> SplitWitness:
    """Evaluate at t0 != 0 and exhibit the n-fold direct sum: summand j
    collects the weight-j staircase images of T_j, ..., T_n; its slot
    subspaces are the corresponding staircase images of the bottom rows.

    Admissibility of t0 amounts to the invertibility of the per-height
    Vandermonde blocks, checked exactly.
    """
    F = fam.field
    if F.is_zero(t0):
        raise InputError("t0 = 0 is the limit point itself; pick a nonzero value")
    n = fam.index
    nf = fam.normal_form
    fmt = fam.tensor.format
    e = fmt.nfactors
    for k in range(1, n + 1):
        nodes = [F.mul(t0, w) for w in fam.omegas[:k]]
        det = F.one
        for b in range(k):
            for a in range(b):
                det = F.mul(det, F.sub(nodes[b], nodes[a]))
        if F.is_zero(det):
            raise Refusal(f"t0 = {F.fmt(t0)} makes a Vandermonde block singular")

    tring = PolyRing(F)
    summands = []
    for j in range(1, n + 1):
        acc = SVTensor.zero(fmt.with_field(tring))
        for k in range(j, n + 1):
            Tk = fam.components_jordan[k - 1]
            if Tk.is_zero():
                continue
            piece = Tk
            for slot_i in range(e):
                cols = _staircase_columns(nf.jordans[slot_i], fam.omegas[j - 1], tring)
                piece = substitute_slot(piece, slot_i, cols, ring=tring)
            scalar = (UniPoly.x(F) ** (n - k)).scale(fam.alphas[k - 1][j - 1])
            acc = acc + piece.map_coefficients(lambda c: c * scalar, tring)
        val = acc.map_coefficients(lambda p: p.evaluate(t0), F)
        summands.append(val)
    # transport to ambient coordinates
    summands = [change_basis(s, [nf.jordans[i].basis for i in range(e)])
                for s in summands]

    value = evaluate_family(fam, t0)
    total = summands[0]
    for s in summands[1:]:
        total = total + s
    sum_matches = total == value

    subspaces = []
    for slot_i in range(e):
        slot = nf.jordans[slot_i]
        groups = []
        for j in range(1, n + 1):
            cols = _staircase_columns(slot, fam.omegas[j - 1], tring)
            gens = []
            for idx in slot.bottom_indices(min_height=j):
                vec = [p.evaluate(t0) for p in cols[idx]]
                gens.append(slot.basis.apply(vec))
            groups.append(gens)
        flat = [v for g in groups for v in g]
        if len(flat) != fmt.dims[slot_i]:
            raise InternalCheckError("witness subspaces have wrong total dimension")
        P = Matrix.from_columns(F, flat)
        inverse(P)  # raises if the groups fail to be complementary
        subspaces.append(groups)

    concise_flags = []
    for j, S in enumerate(summands, start=1):
        local = _restrict_to_groups(S, subspaces, group=j - 1, fmt=fmt)
        concise_flags.append((not local.is_zero())
                             and conciseness(local).concise)
    return SplitWitness(t0, value, summands, subspaces, concise_flags, sum_matches)


def _restrict_to_groups(S: SVTensor, subspaces, group: int, fmt: Format) -> SVTensor:
    """Express a summand on its own witness subspaces (raising if its
    support leaves them)."""
    F = fmt.field
    mats = []
    offsets = []
    for slot_i in range(fmt.nfactors):
        cols = []
        offs = []
        pos = 0
        for g, gens in enumerate(subspaces[slot_i]):
            offs.append((pos, pos + len(gens)))
            cols.extend(gens)
            pos += len(gens)
        mats.append(inverse(Matrix.from_columns(F, cols)))
        offsets.append(offs)
    local_full = change_basis(S, mats)
    acc = {}
    dims = []
    for slot_i in range(fmt.nfactors):
        lo, hi = offsets[slot_i][group]
        dims.append(hi - lo)
    for key, c in local_full.coeffs.items():
        new_key = []
        for slot_i, part in enumerate(key):
            lo, hi = offsets[slot_i][group]
            if sum(part) != sum(part[lo:hi]):
                raise InternalCheckError("summand support escapes its witness subspaces")
            new_key.append(tuple(part[lo:hi]))
        acc[tuple(new_key)] = c
    local_fmt = Format(F, [(d, fmt.degrees[i]) for i, d in enumerate(dims)])
    return SVTensor(local_fmt, acc)
