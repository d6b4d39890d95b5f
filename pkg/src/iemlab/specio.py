"""JSON interchange for maps and piecewise functions.

Numbers never travel as binary floats: rational scalars serialize as "p/q"
strings, tracked reals as decimal strings with an explicit precision field,
and eigen-mode lengths as the loop that generates them (the lengths are
reconstructed exactly on parse, which is both smaller and safer than
shipping coordinates).  Parsers raise ParseError with enough context to
locate the offending field.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .core import Iem, PermutationPair
from .errors import NotAdmissible, ParseError
from .exact import EIGEN, RATIONAL, REAL, FieldElement, TrackedReal, to_float
from .functions import PiecewiseFunction, PolyPiece, SampledPiece

MIN_PRECISION_BITS = 64
DEFAULT_PRECISION_BITS = 256

MODES = (RATIONAL, REAL, EIGEN)


def parse_fraction(text, where: str = "") -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}", where=where) from exc


def format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def parse_tracked(text, bits: int, where: str = "") -> TrackedReal:
    center = parse_fraction(text, where)
    return TrackedReal(center, Fraction(1, 1 << bits))


def format_tracked(x: TrackedReal) -> dict:
    return {
        "center": format_fraction(Fraction(x.center)),
        "radius": format_fraction(Fraction(x.radius)),
    }


def format_scalar(x):
    """Mode-tagged exact rendering, with a float alongside for plotting."""
    if isinstance(x, Fraction) or isinstance(x, int):
        return {"rational": format_fraction(Fraction(x)), "float": to_float(x)}
    if isinstance(x, TrackedReal):
        out = format_tracked(x)
        out["float"] = to_float(x)
        return out
    if isinstance(x, FieldElement):
        return {
            "coords": [format_fraction(c) for c in x.coeffs],
            "float": to_float(x),
        }
    return {"float": float(x)}


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ParseError(f"missing field {key!r}", where=where)
    return obj[key]


def _parse_pair(obj: dict, where: str) -> PermutationPair:
    alphabet = _require(obj, "alphabet", where)
    pi0 = _require(obj, "pi0", where)
    pi1 = _require(obj, "pi1", where)
    try:
        pair = PermutationPair.from_maps(tuple(alphabet), pi0, pi1)
        return pair.require_admissible()
    except (ValueError, KeyError, TypeError, NotAdmissible) as exc:
        raise ParseError(f"bad permutation data: {exc}", where=where) from exc


def _length_values(lengths_obj, alphabet, where: str) -> list:
    values = _require(lengths_obj, "values", where)
    if isinstance(values, dict):
        missing = [a for a in alphabet if a not in values]
        if missing:
            raise ParseError(f"missing lengths for {missing}", where=where)
        return [values[a] for a in alphabet]
    if len(values) != len(alphabet):
        raise ParseError(
            "length count does not match the alphabet",
            where=where,
            expected=len(alphabet),
            got=len(values),
        )
    return list(values)


def parse_iem(obj: dict, precision_bits: int = DEFAULT_PRECISION_BITS) -> Iem:
    """Build a map from its JSON description.

    The pair travels as {"alphabet": [...], "pi0": {letter: rank},
    "pi1": {...}} and the lengths as an object keyed by "mode":
    rational  {"mode": "rational", "values": ["p/q", ...]}
    real      {"mode": "real", "values": [...], "precision_bits": 256}
    eigen     {"mode": "eigen", "types": [0, 1, ...]}  (a loop at the pair's
              vertex; lengths are its exact Perron data)
    """
    where = "iem"
    pair = _parse_pair(obj, where)
    lengths_obj = _require(obj, "lengths", where)
    if not isinstance(lengths_obj, dict):
        raise ParseError("lengths must be an object with a mode", where=where)
    mode = _require(lengths_obj, "mode", f"{where}.lengths")
    if mode not in MODES:
        raise ParseError(f"unknown mode {mode!r}", where=where, allowed=MODES)
    if mode == EIGEN:
        from .induction import self_similar_iem

        types = _require(lengths_obj, "types", f"{where}.lengths")
        try:
            return self_similar_iem(pair, tuple(int(t) for t in types))
        except (ValueError, TypeError) as exc:
            raise ParseError(f"bad loop types: {exc}", where=where) from exc
    values = _length_values(lengths_obj, pair.alphabet, f"{where}.lengths")
    bits = int(lengths_obj.get("precision_bits", precision_bits))
    if bits < MIN_PRECISION_BITS:
        raise ParseError(
            f"precision_bits below the floor {MIN_PRECISION_BITS}",
            where=where,
            got=bits,
        )
    if mode == RATIONAL:
        lengths = [parse_fraction(v, f"{where}.lengths") for v in values]
    else:
        lengths = [parse_tracked(v, bits, f"{where}.lengths") for v in values]
    try:
        return Iem(pair, lengths)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"bad lengths: {exc}", where=where) from exc


def emit_iem(iem: Iem) -> dict:
    """JSON description that parse_iem restores (exactly, mode included)."""
    pair = iem.pair
    out = {
        "alphabet": list(pair.alphabet),
        "pi0": {a: pair.rank(0, a) for a in pair.alphabet},
        "pi1": {a: pair.rank(1, a) for a in pair.alphabet},
    }
    if iem.mode == EIGEN:
        ss = iem.self_similarity
        if ss is None:
            raise ParseError(
                "eigen-mode map has no recorded loop; cannot serialize exactly"
            )
        out["lengths"] = {
            "mode": EIGEN,
            "types": list(ss.types),
            "floats": [to_float(v) for v in iem.lengths],
        }
        return out
    if iem.mode == RATIONAL:
        out["lengths"] = {
            "mode": RATIONAL,
            "values": [format_fraction(v) for v in iem.lengths],
        }
        return out
    radius = Fraction(iem.lengths[0].radius)
    bits = radius.denominator.bit_length() - 1 if radius > 0 else DEFAULT_PRECISION_BITS
    out["lengths"] = {
        "mode": REAL,
        "values": [format_fraction(Fraction(v.center)) for v in iem.lengths],
        "precision_bits": max(MIN_PRECISION_BITS, min(4096, bits)),
    }
    return out


def parse_function(obj: dict, iem: Iem) -> PiecewiseFunction:
    """Piecewise data over the map's level-0 partition.

    Either {"global_coeffs": [...]} (one polynomial restricted to every
    piece) or {"pieces": {letter: {"kind": "poly", "coeffs": [...]} |
    {"kind": "sampled", "breaks": [...], "values": [...]}}}.  Scalars are
    rational strings coerced into the map's arithmetic mode; the exact
    dict forms emitted for tracked ({"center", "radius"}) and eigen
    ({"coords"}) scalars are accepted back unchanged.
    """
    where = "function"
    level = int(obj.get("level", 0))

    def coerce(text, spot):
        from .exact import ensure_scalar

        if isinstance(text, dict):
            if "coords" in text:
                like = iem.lengths[0]
                if not isinstance(like, FieldElement):
                    raise ParseError(
                        "coords scalar needs an eigen-mode map", where=spot
                    )
                coords = [parse_fraction(c, spot) for c in text["coords"]]
                try:
                    return FieldElement(like.field, coords)
                except ValueError as exc:
                    raise ParseError(str(exc), where=spot) from exc
            if "center" in text:
                center = parse_fraction(text["center"], spot)
                radius = (
                    parse_fraction(text["radius"], spot)
                    if "radius" in text
                    else Fraction(0)
                )
                return TrackedReal(center, radius)
            raise ParseError("unrecognized scalar object", where=spot)
        q = parse_fraction(text, spot)
        return ensure_scalar(q, iem.lengths[0])

    if "global_coeffs" in obj:
        coeffs = [
            coerce(c, f"{where}.global_coeffs") for c in obj["global_coeffs"]
        ]
        return PiecewiseFunction.from_global_poly(iem, coeffs, level=level)
    pieces_obj = _require(obj, "pieces", where)
    pieces = {}
    for letter in iem.pair.alphabet:
        spec = pieces_obj.get(letter)
        if spec is None:
            raise ParseError(f"missing piece for letter {letter!r}", where=where)
        kind = spec.get("kind", "poly")
        spot = f"{where}.pieces.{letter}"
        if kind == "poly":
            coeffs = [coerce(c, spot) for c in _require(spec, "coeffs", spot)]
            pieces[letter] = PolyPiece(tuple(coeffs))
        elif kind == "sampled":
            breaks = [coerce(c, spot) for c in _require(spec, "breaks", spot)]
            values = [coerce(c, spot) for c in _require(spec, "values", spot)]
            try:
                pieces[letter] = SampledPiece(tuple(breaks), tuple(values))
            except ValueError as exc:
                raise ParseError(str(exc), where=spot) from exc
        else:
            raise ParseError(f"unknown piece kind {kind!r}", where=spot)
    return PiecewiseFunction(iem, pieces, level=level)


def format_exact_scalar(x):
    """Lossless rendering that parse_function's coercion reads back."""
    if isinstance(x, (Fraction, int)):
        return format_fraction(Fraction(x))
    if isinstance(x, TrackedReal):
        if x.radius == 0:
            return format_fraction(Fraction(x.center))
        return format_tracked(x)
    if isinstance(x, FieldElement):
        if x.is_rational():
            return format_fraction(x.as_fraction())
        return {"coords": [format_fraction(c) for c in x.coeffs]}
    raise ParseError(f"cannot serialize scalar of type {type(x).__name__}")


def emit_function(fn: PiecewiseFunction) -> dict:
    """JSON description that parse_function restores exactly."""
    pieces = {}
    for letter, piece in fn.pieces.items():
        if isinstance(piece, PolyPiece):
            pieces[letter] = {
                "kind": "poly",
                "coeffs": [format_exact_scalar(c) for c in piece.coeffs],
            }
        else:
            pieces[letter] = {
                "kind": "sampled",
                "breaks": [format_exact_scalar(b) for b in piece.breaks],
                "values": [format_exact_scalar(v) for v in piece.values],
            }
    return {"level": 0 if fn.level is None else fn.level, "pieces": pieces}


def load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ParseError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
