"""JSON document formats for series, truncated series and even elements.

All rationals travel as strings ("a/b", "a/b+c/d*i"); exponent vectors are
comma-separated integers in the variable order. Keys are emitted in a fixed
order and terms in canonical order, so printing a parsed canonical document
reproduces it byte for byte.
"""
import json
from typing import Any, Dict, List, Mapping, Optional, Tuple

from algebra.gaussian import format_gaussian, parse_gaussian
from algebra.poly import LAMBDA, Monomial, MultiPoly
from algebra.truncated import Truncation, TruncSeries
from core.errors import DocumentError, DonaldsonError, ParityError
from invariants.insertion import EvenElement, InsertionMode, PointShift, SurfaceShift
from invariants.series import (
    DonaldsonSeries,
    OneCycleWord,
    Sector,
    SeriesFlags,
    series_variables,
    validate_flags,
)
from lattice.forms import CohClass, Lattice, ManifoldData, d0_mod4


def dumps(document: Any, indent: Optional[int] = 2) -> str:
    """Serialize a document; key order is whatever the encoder built."""
    return json.dumps(document, indent=indent, ensure_ascii=False) + "\n"


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"invalid JSON: {e.msg} at line {e.lineno}") from e


def _require(doc: Mapping[str, Any], key: str, kind: type) -> Any:
    if not isinstance(doc, Mapping) or key not in doc:
        raise DocumentError(f"missing field {key!r}")
    value = doc[key]
    if kind is int and isinstance(value, bool):
        raise DocumentError(f"field {key!r} must be an integer")
    if not isinstance(value, kind):
        raise DocumentError(f"field {key!r} must be {kind.__name__}")
    return value


def _int_list(value: Any, what: str) -> List[int]:
    if not isinstance(value, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in value):
        raise DocumentError(f"{what} must be a list of integers")
    return list(value)


# polynomials

def encode_monomial(monom: Monomial) -> str:
    return ",".join(str(e) for e in monom)


def decode_monomial(text: str, width: int) -> Monomial:
    try:
        monom = tuple(int(part) for part in text.split(","))
    except ValueError as e:
        raise DocumentError(f"malformed exponent vector {text!r}") from e
    if len(monom) != width or any(e < 0 for e in monom):
        raise DocumentError(f"exponent vector {text!r} needs {width} non-negative entries")
    return monom


def encode_poly(poly: MultiPoly) -> Dict[str, str]:
    return {encode_monomial(m): format_gaussian(c) for m, c in poly.terms()}


def decode_poly(doc: Any, variables: Tuple[str, ...]) -> MultiPoly:
    if not isinstance(doc, Mapping):
        raise DocumentError("polynomial must be an object of exponent -> coefficient")
    terms = {}
    for key, value in doc.items():
        monom = decode_monomial(key, len(variables))
        if monom in terms:
            raise DocumentError(f"exponent vector {key!r} repeated")
        terms[monom] = parse_gaussian(value)
    return MultiPoly.from_terms(variables, terms)


# manifold header

def encode_manifold(manifold: ManifoldData, w: CohClass, zword: OneCycleWord) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "name": manifold.name,
        "b1": manifold.b1,
        "bplus": manifold.bplus,
        "lattice": manifold.lattice.to_dict(),
        "w": w.to_list(),
        "zword": zword.to_dict(),
    }
    try:
        report = d0_mod4(manifold, w, zword.deg2z)
        doc["d0"] = str(report.d0)
        doc["d0mod4"] = report.residue
    except ParityError:
        doc["d0"] = None
        doc["d0mod4"] = None
    except DonaldsonError:
        # degenerate lattice with nonzero w: d0 is undefined
        doc["d0"] = None
        doc["d0mod4"] = None
    doc["strong_simple_type"] = manifold.strong_simple_type
    return doc


def decode_manifold(doc: Mapping[str, Any]) -> Tuple[ManifoldData, CohClass, OneCycleWord]:
    lattice_doc = _require(doc, "lattice", Mapping)
    gram = _require(lattice_doc, "gram", list)
    rows = [_int_list(row, "gram row") for row in gram]
    labels = lattice_doc.get("labels") or ()
    if "rank" in lattice_doc and lattice_doc["rank"] != len(rows):
        raise DocumentError(f"lattice rank {lattice_doc['rank']} does not match Gram size {len(rows)}")
    lattice = Lattice(tuple(tuple(r) for r in rows), tuple(labels))

    sst = doc.get("strong_simple_type")
    if sst is not None and not isinstance(sst, bool):
        raise DocumentError("strong_simple_type must be true, false or null")
    manifold = ManifoldData(
        lattice=lattice,
        b1=_require(doc, "b1", int),
        bplus=_require(doc, "bplus", int),
        name=doc.get("name", "X"),
        strong_simple_type=sst,
    )
    w = lattice.check(CohClass.of(_int_list(_require(doc, "w", list), "w")), "w")
    z_doc = doc.get("zword") or {}
    zword = OneCycleWord(tuple(z_doc.get("labels", ())), z_doc.get("deg2z"))

    expected = encode_manifold(manifold, w, zword)
    for key in ("d0", "d0mod4"):
        if key in doc and doc[key] != expected[key]:
            raise DocumentError(f"stored {key} {doc[key]!r} differs from derived {expected[key]!r}")
    return manifold, w, zword


# series

def encode_series(S: DonaldsonSeries) -> Dict[str, Any]:
    """Canonical series document."""
    doc = encode_manifold(S.manifold, S.w, S.zword)
    doc["flags"] = S.flags.to_dict()
    doc["terms"] = [
        {"sector": t.sector.value, "K": t.K.to_list(), "poly": encode_poly(t.poly)} for t in S.terms
    ]
    return doc


def decode_series(doc: Any, validate: bool = True) -> DonaldsonSeries:
    """Parse a series document and check its declared flags.

    Raises:
        DocumentError: On malformed input
        FlagViolationError: If ``validate`` and a claimed flag fails
    """
    if not isinstance(doc, Mapping):
        raise DocumentError("series document must be a JSON object")
    manifold, w, zword = decode_manifold(doc)
    variables = series_variables(manifold.rank)

    flags_doc = doc.get("flags") or {}
    unknown = set(flags_doc) - set(SeriesFlags().to_dict())
    if unknown:
        raise DocumentError(f"unknown flags {sorted(unknown)}")
    flags = SeriesFlags(**{k: bool(v) for k, v in flags_doc.items()})

    terms = []
    seen = set()
    for term in _require(doc, "terms", list):
        sector_text = _require(term, "sector", str)
        try:
            sector = Sector(sector_text)
        except ValueError as e:
            raise DocumentError(f"unknown sector {sector_text!r}") from e
        K = manifold.lattice.check(CohClass.of(_int_list(_require(term, "K", list), "K")), "K")
        if (sector, K) in seen:
            raise DocumentError(f"two {sector.value} terms for class {K.to_list()}")
        seen.add((sector, K))
        poly = decode_poly(_require(term, "poly", Mapping), variables)
        if poly.is_zero():
            raise DocumentError(f"zero polynomial stored for class {K.to_list()}")
        terms.append((sector, K, poly))

    series = DonaldsonSeries.build(manifold, w, terms, zword, flags)
    if validate:
        validate_flags(series)
    return series


# truncated series

def encode_truncated(G: TruncSeries, header: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    doc: Dict[str, Any] = {}
    if header is not None:
        doc["manifold"] = header
    doc["variables"] = list(G.variables)
    doc["truncation"] = G.truncation.to_dict()
    doc["terms"] = {encode_monomial(m): format_gaussian(c) for m, c in G.terms()}
    return doc


def decode_truncated(doc: Any) -> TruncSeries:
    if not isinstance(doc, Mapping):
        raise DocumentError("truncated series document must be a JSON object")
    variables = tuple(_require(doc, "variables", list))
    if not variables or not all(isinstance(v, str) for v in variables):
        raise DocumentError("variables must be a non-empty list of names")
    trunc_doc = dict(_require(doc, "truncation", Mapping))
    total = trunc_doc.pop("total", None)
    if isinstance(total, bool) or not isinstance(total, int):
        raise DocumentError("truncation.total must be an integer")
    for name, limit in trunc_doc.items():
        if name not in variables or isinstance(limit, bool) or not isinstance(limit, int):
            raise DocumentError(f"bad separate cutoff {name!r}: {limit!r}")
    truncation = Truncation(total, tuple(trunc_doc.items()))

    terms = decode_poly(_require(doc, "terms", Mapping), variables)
    admits = truncation.admitter(variables)
    for monom, _ in terms.terms():
        if not admits(monom):
            raise DocumentError(f"term {encode_monomial(monom)} lies beyond the truncation")
    return TruncSeries.from_poly(terms, truncation)


def decode_truncated_with_manifold(doc: Any) -> Tuple[TruncSeries, ManifoldData, CohClass, OneCycleWord]:
    """A truncated series whose header names the manifold it came from."""
    G = decode_truncated(doc)
    header = _require(doc, "manifold", Mapping)
    manifold, w, zword = decode_manifold(header)
    if G.variables != series_variables(manifold.rank):
        raise DocumentError(
            f"variables {list(G.variables)} do not match a rank-{manifold.rank} lattice"
        )
    if not G.truncation.is_separate(LAMBDA):
        raise DocumentError("truncation must give a separate lam cutoff")
    return G, manifold, w, zword


# even elements

def encode_even(e: EvenElement) -> Dict[str, Any]:
    factors = []
    for f in e.factors:
        if isinstance(f, PointShift):
            factors.append({"kind": "point", "c": format_gaussian(f.c), "power": f.power})
        else:
            factors.append(
                {
                    "kind": "surface",
                    "v": f.v.to_list(),
                    "c": format_gaussian(f.c),
                    "mode": f.mode.value,
                    "power": f.power,
                }
            )
    return {"scale": format_gaussian(e.scale), "factors": factors}


def decode_even(doc: Any) -> EvenElement:
    if not isinstance(doc, Mapping):
        raise DocumentError("even element must be a JSON object")
    factors = []
    for f in doc.get("factors", []):
        kind = _require(f, "kind", str)
        power = f.get("power", 1)
        c = parse_gaussian(_require(f, "c", str))
        if kind == "point":
            factors.append(PointShift(c, power))
        elif kind == "surface":
            try:
                mode = InsertionMode(f.get("mode", "reduced"))
            except ValueError as e:
                raise DocumentError(f"unknown insertion mode {f.get('mode')!r}") from e
            factors.append(SurfaceShift(CohClass.of(_int_list(_require(f, "v", list), "v")), c, mode, power))
        else:
            raise DocumentError(f"unknown factor kind {kind!r}")
    return EvenElement(tuple(factors), parse_gaussian(doc.get("scale", "1")))
