"""JSON schemas for tensors and analysis artifacts.

Tensor files look like

    {"field": "Q" | "Fp:<p>",
     "factors": [{"dim": n, "degree": d}, ...],
     "terms": [{"exps": [[..], [..], ...], "coeff": "<scalar>"}, ...]}

with scalars as strings ("3/4", "-2", "7 mod 101").  Every artifact embeds
the tensor it was computed from, so saved artifacts re-verify standalone.
"""

from __future__ import annotations

import json

from .errors import InputError
from .fields import PolyRing, UniPoly, field_from_name
from .linalg import Matrix
from .normalform import JordanSlot, NormalForm
from .tensors import EndoTuple, Format, SVTensor


def format_to_json(fmt: Format) -> dict:
    return {
        "field": fmt.field.name,
        "factors": [{"dim": n, "degree": d} for n, d in fmt.factors],
    }


def format_from_json(obj: dict, require_positive_degrees: bool = True) -> Format:
    try:
        field = field_from_name(obj["field"])
        factors = [(f["dim"], f["degree"]) for f in obj["factors"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad format description: {exc}") from exc
    if require_positive_degrees and any(d < 1 for _, d in factors):
        raise InputError("all factor degrees must be at least 1")
    return Format(field, factors)


def tensor_to_json(T: SVTensor) -> dict:
    F = T.format.field
    obj = format_to_json(T.format)
    obj["terms"] = [{"exps": [list(part) for part in key], "coeff": F.fmt(c)}
                    for key, c in T.terms()]
    return obj


def tensor_from_json(obj: dict, require_positive_degrees: bool = True) -> SVTensor:
    fmt = format_from_json(obj, require_positive_degrees)
    F = fmt.field
    terms = []
    try:
        for t in obj.get("terms", []):
            key = tuple(tuple(int(e) for e in part) for part in t["exps"])
            terms.append((key, F.parse(t["coeff"])))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad tensor term: {exc}") from exc
    try:
        return SVTensor.from_terms(fmt, terms)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def matrix_to_json(X: Matrix) -> list:
    F = X.field
    return [[F.fmt(v) for v in row] for row in X.rows]


def matrix_from_json(rows: list, field) -> Matrix:
    return Matrix(field, [[field.parse(v) for v in row] for row in rows])


def endotuple_to_json(tup: EndoTuple) -> dict:
    return {"slots": [matrix_to_json(X) for X in tup.mats]}


def endotuple_from_json(obj: dict, fmt: Format) -> EndoTuple:
    try:
        mats = [matrix_from_json(rows, fmt.field) for rows in obj["slots"]]
        return EndoTuple(fmt, mats)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad endomorphism tuple: {exc}") from exc


def poly_to_json(p: UniPoly) -> list:
    F = p.field
    return [F.fmt(c) for c in p.coeffs]


def poly_from_json(coeffs: list, field) -> UniPoly:
    return UniPoly(field, [field.parse(c) for c in coeffs])


def vector_to_json(v: list, field) -> list:
    return [field.fmt(c) for c in v]


def vector_from_json(v: list, field) -> list:
    return [field.parse(c) for c in v]


def algebra_to_json(A) -> dict:
    F = A.format.field
    return {
        "kind": "centroid",
        "format": format_to_json(A.format),
        "dimension": A.dim,
        "basis": [endotuple_to_json(b) for b in A.basis],
        "structure_constants": [[[F.fmt(s) for s in row] for row in plane]
                                for plane in A.structure],
    }


def algebra_from_json(obj: dict):
    from .centroid import CentroidAlgebra
    fmt = format_from_json(obj["format"])
    F = fmt.field
    basis = [endotuple_from_json(b, fmt) for b in obj["basis"]]
    structure = [[[F.parse(s) for s in row] for row in plane]
                 for plane in obj["structure_constants"]]
    return CentroidAlgebra(fmt, basis, structure)


def split_to_json(result) -> dict:
    F = result.tensor.format.field
    return {
        "kind": "split",
        "tensor": tensor_to_json(result.tensor),
        "complete": result.complete,
        "blocking_factors": [poly_to_json(p) for p in result.blocking_factors],
        "summands": [{
            "tensor": tensor_to_json(s.tensor),
            "local_tensor": tensor_to_json(s.local_tensor),
            "slot_bases": [[vector_to_json(v, F) for v in basis]
                           for basis in s.slot_bases],
            "idempotent": endotuple_to_json(s.idempotent),
        } for s in result.summands],
    }


def jordan_to_json(slot: JordanSlot) -> dict:
    return {
        "index": slot.index,
        "heights": {str(q): t for q, t in sorted(slot.heights.items())},
        "labels": [list(lbl) for lbl in slot.labels],
        "basis": matrix_to_json(slot.basis),
        "partial_inverse": matrix_to_json(slot.partial_inverse),
    }


def jordan_from_json(obj: dict, field) -> JordanSlot:
    from .linalg import inverse
    basis = matrix_from_json(obj["basis"], field)
    return JordanSlot(
        index=int(obj["index"]),
        heights={int(q): t for q, t in obj["heights"].items()},
        labels=[tuple(lbl) for lbl in obj["labels"]],
        basis=basis,
        basis_inv=inverse(basis),
        partial_inverse=matrix_from_json(obj["partial_inverse"], field),
    )


def normal_form_to_json(nf: NormalForm, tensor: SVTensor) -> dict:
    return {
        "kind": "normal_form",
        "tensor": tensor_to_json(tensor),
        "element": endotuple_to_json(nf.element),
        "index": nf.index,
        "jordan": [jordan_to_json(j) for j in nf.jordans],
        "components": [tensor_to_json(c) for c in nf.components],
    }


def normal_form_from_json(obj: dict):
    tensor = tensor_from_json(obj["tensor"])
    fmt = tensor.format
    element = endotuple_from_json(obj["element"], fmt)
    jordans = [jordan_from_json(j, fmt.field) for j in obj["jordan"]]
    components = [tensor_from_json(c, require_positive_degrees=False)
                  for c in obj["components"]]
    nf = NormalForm(fmt, element, int(obj["index"]), components, jordans)
    return tensor, nf


def family_to_json(fam) -> dict:
    F = fam.field
    return {
        "kind": "degeneration",
        "tensor": tensor_to_json(fam.tensor),
        "element": endotuple_to_json(fam.normal_form.element),
        "index": fam.index,
        "omegas": vector_to_json(fam.omegas, F),
        "alphas": [vector_to_json(a, F) for a in fam.alphas],
        "jordan": [jordan_to_json(j) for j in fam.normal_form.jordans],
        "components": [tensor_to_json(c) for c in fam.normal_form.components],
        "family_terms": [{"exps": [list(part) for part in key],
                          "coeff_t": poly_to_json(p)}
                         for key, p in fam.family.terms()],
    }


def family_from_json(obj: dict):
    from .degeneration import DegenFamily
    from .tensors import change_basis
    tensor = tensor_from_json(obj["tensor"])
    fmt = tensor.format
    F = fmt.field
    element = endotuple_from_json(obj["element"], fmt)
    jordans = [jordan_from_json(j, F) for j in obj["jordan"]]
    components = [tensor_from_json(c, require_positive_degrees=False)
                  for c in obj["components"]]
    nf = NormalForm(fmt, element, int(obj["index"]), components, jordans)
    omegas = vector_from_json(obj["omegas"], F)
    alphas = [vector_from_json(a, F) for a in obj["alphas"]]
    tring = PolyRing(F)
    fam_terms = {}
    for t in obj["family_terms"]:
        key = tuple(tuple(int(e) for e in part) for part in t["exps"])
        fam_terms[key] = poly_from_json(t["coeff_t"], F)
    family = SVTensor(fmt.with_field(tring), fam_terms)
    comps_jordan = [change_basis(c, [j.basis_inv for j in jordans])
                    for c in components]
    return DegenFamily(tensor, nf, omegas, alphas, family, comps_jordan)


def dump(obj: dict, path: str | None):
    text = json.dumps(obj, indent=2)
    if path is None or path == "-":
        print(text)
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def load(path: str) -> dict:
    try:
        if path == "-":
            import sys
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
