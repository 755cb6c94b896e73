"""JSON encoding and decoding for every starmod value type."""

from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from starmod.core.algebras import TORUS, AlgebraDescriptor, AlgebraElement, constant, element
from starmod.core.bundle import ClassicalProjection, CocycleData, DeformedProjection, FullnessReport
from starmod.core.errors import DescriptorMismatchError, ParseError
from starmod.core.matrix import StarMatrix
from starmod.core.picard import (
    CharacteristicClass,
    CohomologyModel,
    DiffeoAction,
    KernelDescription,
    MoritaReport,
    OutEquivElement,
    Witness,
)
from starmod.core.reports import CheckReport, IdentityCheck
from starmod.core.scalars import GaussianRational, format_scalar, parse_scalar
from starmod.core.series import FormalSeries, ScalarSeries
from starmod.core.star import (
    Automorphism,
    DifferentialOperator,
    EquivalenceTransform,
    IdentityAutomorphism,
    LatticeMap,
    StarProduct,
    TorusTranslation,
)
from starmod.core.trace_index import IndexInvarianceReport, IndexValue


def _require(data: Dict[str, Any], key: str, what: str) -> Any:
    if not isinstance(data, dict) or key not in data:
        raise ParseError(f"{what}: missing field {key!r}")
    return data[key]


# Scalars and algebras


def encode_scalar(z: GaussianRational) -> str:
    return format_scalar(z)


def decode_scalar(data: Any) -> GaussianRational:
    if isinstance(data, bool) or not isinstance(data, (str, int)):
        raise ParseError(f"Expected a scalar string, got {data!r}")
    return parse_scalar(data)


def _rational(data: Any) -> Fraction:
    value = decode_scalar(data)
    if not value.is_real():
        raise ParseError(f"Expected a real rational, got {data!r}")
    return value.re


def encode_descriptor(descriptor: AlgebraDescriptor) -> Dict[str, Any]:
    if descriptor.kind == TORUS:
        return {"kind": TORUS, "theta": encode_scalar(GaussianRational(descriptor.theta))}
    return {
        "kind": descriptor.kind,
        "dim": descriptor.dim,
        "poisson": [[encode_scalar(GaussianRational(v)) for v in row] for row in descriptor.poisson],
    }


def decode_descriptor(data: Dict[str, Any]) -> AlgebraDescriptor:
    kind = _require(data, "kind", "algebra")
    if kind == TORUS:
        return AlgebraDescriptor.torus(_rational(_require(data, "theta", "torus algebra")))
    if "poisson" not in data and "n" in data:
        return AlgebraDescriptor.canonical_plane(int(data["n"]))
    poisson = [[_rational(v) for v in row] for row in _require(data, "poisson", "plane algebra")]
    dim = int(data.get("dim", len(poisson)))
    return AlgebraDescriptor(kind, dim, tuple(tuple(row) for row in poisson))


def encode_element(f: AlgebraElement) -> List[Dict[str, Any]]:
    key_name = "mode" if f.descriptor.kind == TORUS else "exp"
    return [{key_name: list(k), "coeff": encode_scalar(c)} for k, c in f.terms()]


def decode_element(descriptor: AlgebraDescriptor, data: Any) -> AlgebraElement:
    """Element from its term list; a bare scalar string is read as a constant."""
    if isinstance(data, (str, int)) and not isinstance(data, bool):
        return constant(descriptor, decode_scalar(data))
    if not isinstance(data, list):
        raise ParseError(f"Expected a term list, got {data!r}")
    key_name = "mode" if descriptor.kind == TORUS else "exp"
    terms: Dict[tuple, GaussianRational] = {}
    for term in data:
        key = tuple(int(k) for k in _require(term, key_name, "term"))
        terms[key] = terms.get(key, GaussianRational()) + decode_scalar(_require(term, "coeff", "term"))
    return element(descriptor, terms)


# Series, transforms and matrices


def encode_series(f: FormalSeries) -> Dict[str, Any]:
    return {"K": f.order, "coeffs": [encode_element(c) for c in f.coeffs]}


def decode_series(descriptor: AlgebraDescriptor, data: Any, K: int) -> FormalSeries:
    """Series object, or a classical element lifted to a constant series."""
    if isinstance(data, dict):
        if "K" in data and int(data["K"]) != K:
            raise DescriptorMismatchError(f"Series truncated at K={data['K']}, expected K={K}")
        coeffs = [decode_element(descriptor, c) for c in _require(data, "coeffs", "series")]
        if len(coeffs) > K + 1:
            raise ParseError(f"Series has {len(coeffs)} coefficients, more than K+1 = {K + 1}")
        return FormalSeries(descriptor, K, coeffs)
    return FormalSeries.from_element(decode_element(descriptor, data), K)


def encode_transform(T: EquivalenceTransform) -> Dict[str, Any]:
    ops = []
    for r, op in enumerate(T.ops, start=1):
        if op.is_zero():
            continue
        ops.append({
            "order": r,
            "terms": [{"coeff": encode_element(c), "alpha": list(alpha)} for alpha, c in op.terms()],
        })
    return {"ops": ops}


def decode_transform(descriptor: AlgebraDescriptor, data: Dict[str, Any], K: int) -> EquivalenceTransform:
    ops = [DifferentialOperator.zero(descriptor) for _ in range(K)]
    for entry in _require(data, "ops", "transform"):
        r = int(_require(entry, "order", "transform operator"))
        if not 1 <= r <= K:
            raise ParseError(f"Transform operator order {r} outside 1..{K}")
        terms = {}
        for term in _require(entry, "terms", "transform operator"):
            alpha = tuple(int(a) for a in _require(term, "alpha", "operator term"))
            terms[alpha] = decode_element(descriptor, _require(term, "coeff", "operator term"))
        ops[r - 1] = ops[r - 1] + DifferentialOperator(descriptor, terms)
    return EquivalenceTransform(descriptor, K, ops)


def encode_matrix(A: StarMatrix) -> Dict[str, Any]:
    return {
        "rows": A.n_rows,
        "cols": A.n_cols,
        "entries": [[encode_series(s) for s in row] for row in A.entries],
    }


def decode_matrix(star: StarProduct, data: Dict[str, Any]) -> StarMatrix:
    rows = _require(data, "entries", "matrix")
    matrix = StarMatrix(star, [[decode_series(star.descriptor, s, star.order) for s in row] for row in rows])
    if ("rows" in data and int(data["rows"]) != matrix.n_rows) or ("cols" in data and int(data["cols"]) != matrix.n_cols):
        raise ParseError(f"Declared shape does not match the {matrix.n_rows}x{matrix.n_cols} entries")
    return matrix


def decode_grid(descriptor: AlgebraDescriptor, data: Sequence[Sequence[Any]]) -> List[List[AlgebraElement]]:
    return [[decode_element(descriptor, f) for f in row] for row in data]


def encode_grid(grid: Sequence[Sequence[AlgebraElement]]) -> List[List[Any]]:
    return [[encode_element(f) for f in row] for row in grid]


# Bundle data


def encode_projection(P0: ClassicalProjection) -> Dict[str, Any]:
    return {"N": P0.size, "entries": encode_grid(P0.grid), "hermitian": P0.hermitian}


def decode_projection(descriptor: AlgebraDescriptor, data: Dict[str, Any]) -> ClassicalProjection:
    """Accepts {"N", "entries", "hermitian"} or {"projection": {...}, "hermitian"}."""
    body = data.get("projection", data) if isinstance(data, dict) else data
    grid = decode_grid(descriptor, _require(body, "entries", "projection"))
    if "N" in body and int(body["N"]) != len(grid):
        raise ParseError(f"Projection declares N={body['N']} but has {len(grid)} rows")
    hermitian = bool(data.get("hermitian", body.get("hermitian", False)))
    return ClassicalProjection(grid, hermitian=hermitian)


def encode_deformed_projection(D: DeformedProjection) -> Dict[str, Any]:
    return {
        "N": D.size,
        "hermitian": D.hermitian,
        "P": encode_matrix(D.P),
        "classical": encode_projection(D.classical),
    }


def encode_cocycle(C: CocycleData) -> Dict[str, Any]:
    return {
        "charts": list(C.chart_ids),
        "overlaps": [{"pair": list(pair), "matrix": encode_matrix(M)} for pair, M in C.overlaps.items()],
        "triples": [list(t) for t in C.triples],
    }


def decode_cocycle(star: StarProduct, data: Dict[str, Any]) -> CocycleData:
    overlaps = {}
    for entry in _require(data, "overlaps", "cocycle"):
        a, b = _require(entry, "pair", "overlap")
        overlaps[(str(a), str(b))] = decode_matrix(star, _require(entry, "matrix", "overlap"))
    triples = [tuple(str(x) for x in t) for t in data.get("triples", [])]
    return CocycleData([str(c) for c in _require(data, "charts", "cocycle")], overlaps, triples)


def encode_fullness(report: FullnessReport) -> Dict[str, Any]:
    return {"full": report.full, "rank": report.rank}


# Trace and index


def encode_scalar_series(s: ScalarSeries) -> List[str]:
    return s.to_strings()


def encode_index(value: IndexValue) -> Dict[str, Any]:
    return {"index": value.to_strings()}


def encode_index_invariance(report: IndexInvarianceReport) -> Dict[str, Any]:
    return {
        "pass": report.passed,
        "first_failing_order": report.first_failing_order,
        "index": report.original.to_strings(),
        "conjugated_index": report.conjugated.to_strings(),
    }


# Picard data


def _int_matrix(data: Any, what: str):
    if not isinstance(data, list) or any(not isinstance(row, list) for row in data):
        raise ParseError(f"{what}: expected a list of integer rows")
    return tuple(tuple(int(v) for v in row) for row in data)


def encode_model(model: CohomologyModel) -> Dict[str, Any]:
    return {
        "d1": model.d1,
        "d2": model.d2,
        "omega": [encode_scalar(w) for w in model.omega],
        "actions": [{"name": a.name, "A1": [list(r) for r in a.A1], "A2": [list(r) for r in a.A2]}
                    for a in model.actions],
        "symplectic": model.symplectic,
    }


def decode_model(data: Dict[str, Any]) -> CohomologyModel:
    actions = [
        DiffeoAction(
            str(_require(a, "name", "action")),
            _int_matrix(_require(a, "A1", "action"), "A1"),
            _int_matrix(_require(a, "A2", "action"), "A2"),
        )
        for a in data.get("actions", [])
    ]
    return CohomologyModel(
        d1=int(_require(data, "d1", "model")),
        d2=int(_require(data, "d2", "model")),
        omega=tuple(decode_scalar(w) for w in _require(data, "omega", "model")),
        actions=actions,
        symplectic=bool(data.get("symplectic", True)),
    )


def encode_class(c: CharacteristicClass) -> Dict[str, Any]:
    return {
        "leading": [encode_scalar(x) for x in c.leading],
        "orders": [[encode_scalar(x) for x in v] for v in c.orders],
    }


def decode_class(data: Dict[str, Any], model: Optional[CohomologyModel] = None) -> CharacteristicClass:
    """Class object; without "leading" the leading term is taken from the model's ω."""
    orders = [[decode_scalar(x) for x in v] for v in _require(data, "orders", "class")]
    if "leading" not in data:
        if model is None:
            raise ParseError("class: missing field 'leading' and no model to derive it from")
        return CharacteristicClass.from_model(model, orders)
    return CharacteristicClass(tuple(decode_scalar(x) for x in data["leading"]), tuple(tuple(v) for v in orders))


def encode_witness(w: Optional[Witness]) -> Optional[Dict[str, Any]]:
    if w is None:
        return None
    return {"action": w.action, "class": list(w.vector)}


def decode_witness(data: Dict[str, Any]) -> Witness:
    return Witness(str(_require(data, "action", "witness")), tuple(int(v) for v in _require(data, "class", "witness")))


def encode_morita(report: MoritaReport) -> Dict[str, Any]:
    return {"equivalent": report.equivalent, "witness": encode_witness(report.witness)}


def encode_outequiv(e: OutEquivElement) -> Dict[str, Any]:
    return {"v0": [encode_scalar(x) for x in e.v0], "higher": [[encode_scalar(x) for x in v] for v in e.higher]}


def decode_outequiv(data: Dict[str, Any]) -> OutEquivElement:
    return OutEquivElement(
        tuple(decode_scalar(x) for x in _require(data, "v0", "outequiv")),
        tuple(tuple(decode_scalar(x) for x in v) for v in data.get("higher", [])),
    )


def encode_kernel(k: KernelDescription) -> Dict[str, Any]:
    return {
        "d1": k.d1,
        "K": k.order,
        "torus_dimension": k.torus_dimension,
        "free_layers": list(k.free_layers),
        "generator_count": k.generator_count,
        "torsion": k.torsion,
        "trivial": k.trivial,
    }


# Reports


def _encode_witness_item(item: Any) -> Any:
    if isinstance(item, AlgebraElement):
        return encode_element(item)
    if isinstance(item, FormalSeries):
        return encode_series(item)
    if isinstance(item, GaussianRational):
        return encode_scalar(item)
    if isinstance(item, (str, int)) or item is None:
        return item
    return str(item)


def encode_identity_check(check: IdentityCheck) -> Dict[str, Any]:
    return {
        "axiom": check.name,
        "pass": check.passed,
        "first_failing_order": check.first_failing_order,
        "witness": None if check.witness is None else [_encode_witness_item(x) for x in check.witness],
        "samples": check.samples,
    }


def encode_check_report(report: CheckReport) -> Dict[str, Any]:
    return {
        "subject": report.subject,
        "pass": report.passed,
        "conventions": dict(sorted(report.conventions.items())),
        "checks": [encode_identity_check(c) for c in report.checks],
    }


# Automorphisms


def decode_automorphism(data: Dict[str, Any]) -> Automorphism:
    kind = _require(data, "kind", "automorphism")
    if kind == "identity":
        return IdentityAutomorphism()
    if kind == "translation":
        return TorusTranslation([_rational(p) for p in _require(data, "periods", "translation")])
    if kind == "lattice":
        return LatticeMap(_int_matrix(_require(data, "matrix", "lattice map"), "matrix"))
    raise ParseError(f"Unknown automorphism kind {kind!r}")
