"""JSON interchange: round trips must be exact, errors must locate the field."""

import json
from fractions import Fraction

import pytest

import support
from iemlab.core import Iem, rational_iem
from iemlab.errors import ParseError
from iemlab.exact import EIGEN, RATIONAL, REAL, FieldElement, TrackedReal
from iemlab.functions import PiecewiseFunction, PolyPiece, SampledPiece
from iemlab.induction import golden_iem, self_similar_iem
from iemlab.specio import (
    DEFAULT_PRECISION_BITS,
    MIN_PRECISION_BITS,
    dump_json,
    emit_function,
    emit_iem,
    format_exact_scalar,
    format_fraction,
    load_json,
    parse_fraction,
    parse_function,
    parse_iem,
)

F = Fraction


def rat3():
    return rational_iem("ABC", "CBA", (F(1, 3), F(1, 4), F(5, 12)))


class TestScalars:
    def test_fraction_text_roundtrip(self):
        for q in (F(0), F(7), F(-3, 8), F(10**30 + 1, 10**30)):
            assert parse_fraction(format_fraction(q)) == q

    def test_integer_fraction_has_no_denominator(self):
        assert format_fraction(F(5)) == "5"
        assert format_fraction(F(5, 2)) == "5/2"

    def test_bad_rational_raises(self):
        with pytest.raises(ParseError):
            parse_fraction("3/0", where="x")
        with pytest.raises(ParseError):
            parse_fraction("one half")

    def test_exact_scalar_forms(self):
        assert format_exact_scalar(F(3, 7)) == "3/7"
        assert format_exact_scalar(4) == "4"
        # radius-0 tracked reals collapse to a plain rational string
        assert format_exact_scalar(TrackedReal(F(1, 2), F(0))) == "1/2"
        x = TrackedReal(F(1, 3), F(1, 1 << 70))
        out = format_exact_scalar(x)
        assert parse_fraction(out["center"]) == F(1, 3)
        assert parse_fraction(out["radius"]) == F(1, 1 << 70)

    def test_exact_scalar_field_element(self):
        iem = golden_iem()
        rho = iem.lengths[0]
        out = format_exact_scalar(rho)
        assert set(out) == {"coords"}
        # rational elements of the field collapse to the plain string form
        one = rho / rho
        assert format_exact_scalar(one) == "1"

    def test_exact_scalar_rejects_floats(self):
        with pytest.raises(ParseError):
            format_exact_scalar(0.25)


class TestIemRoundtrip:
    def test_rational(self):
        iem = rat3()
        back = parse_iem(emit_iem(iem))
        assert back.pair.top == iem.pair.top
        assert back.pair.bottom == iem.pair.bottom
        assert back.lengths == iem.lengths
        assert back.mode == RATIONAL

    def test_real_keeps_center_and_bits(self):
        bits = 128
        iem = support.tracked_copy(rat3(), bits=bits)
        blob = emit_iem(iem)
        assert blob["lengths"]["mode"] == REAL
        assert blob["lengths"]["precision_bits"] == bits
        back = parse_iem(blob)
        assert back.mode == REAL
        for a, b in zip(back.lengths, iem.lengths):
            assert Fraction(a.center) == Fraction(b.center)
            assert Fraction(a.radius) == Fraction(b.radius)

    def test_eigen_travels_as_loop(self):
        iem = self_similar_iem(
            support.admissible_pairs(3)[0].from_rows("ABC", "CBA"),
            (0, 0, 1, 0, 1),
        )
        blob = emit_iem(iem)
        assert blob["lengths"]["mode"] == EIGEN
        assert blob["lengths"]["types"] == [0, 0, 1, 0, 1]
        back = parse_iem(blob)
        assert back.mode == EIGEN
        # the parse builds a fresh number field; equality is coordinatewise
        for a, b in zip(back.lengths, iem.lengths):
            assert a.coeffs == b.coeffs

    def test_emitted_shape_is_rank_maps(self):
        blob = emit_iem(rat3())
        assert blob["alphabet"] == ["A", "B", "C"]
        assert blob["pi0"] == {"A": 1, "B": 2, "C": 3}
        assert blob["pi1"] == {"A": 3, "B": 2, "C": 1}

    def test_survives_json_text(self):
        iem = rat3()
        back = parse_iem(json.loads(dump_json(emit_iem(iem))))
        assert back.lengths == iem.lengths

    def test_letter_keyed_lengths_accepted(self):
        blob = emit_iem(rat3())
        blob["lengths"]["values"] = {"A": "1/3", "C": "5/12", "B": "1/4"}
        back = parse_iem(blob)
        assert list(back.lengths) == [F(1, 3), F(1, 4), F(5, 12)]


class TestIemParseErrors:
    def base(self):
        return emit_iem(rat3())

    def test_missing_fields(self):
        for key in ("alphabet", "pi0", "pi1", "lengths"):
            blob = self.base()
            del blob[key]
            with pytest.raises(ParseError):
                parse_iem(blob)

    def test_lengths_must_be_object(self):
        blob = self.base()
        blob["lengths"] = ["1/3", "1/4", "5/12"]
        with pytest.raises(ParseError, match="object"):
            parse_iem(blob)

    def test_unknown_mode(self):
        blob = self.base()
        blob["lengths"]["mode"] = "decimal"
        with pytest.raises(ParseError, match="mode"):
            parse_iem(blob)

    def test_wrong_value_count(self):
        blob = self.base()
        blob["lengths"]["values"] = ["1/2", "1/2"]
        with pytest.raises(ParseError, match="count"):
            parse_iem(blob)

    def test_letter_keyed_missing_letter(self):
        blob = self.base()
        blob["lengths"]["values"] = {"A": "1/2", "B": "1/2"}
        with pytest.raises(ParseError, match="C"):
            parse_iem(blob)

    def test_precision_floor(self):
        blob = self.base()
        blob["lengths"]["mode"] = REAL
        blob["lengths"]["precision_bits"] = 16
        with pytest.raises(ParseError, match="floor"):
            parse_iem(blob)
        assert MIN_PRECISION_BITS == 64

    def test_non_permutation_rank_map(self):
        blob = self.base()
        blob["pi1"] = {"A": 1, "B": 1, "C": 3}
        with pytest.raises(ParseError, match="permutation"):
            parse_iem(blob)

    def test_inadmissible_pair(self):
        blob = self.base()
        blob["pi1"] = {"A": 1, "B": 3, "C": 2}  # fixes the leftmost letter
        with pytest.raises(ParseError):
            parse_iem(blob)

    def test_bad_loop_types(self):
        blob = emit_iem(golden_iem())
        blob["lengths"]["types"] = [0, 3]
        with pytest.raises(ParseError, match="types"):
            parse_iem(blob)

    def test_eigen_emit_needs_recorded_loop(self):
        golden = golden_iem()
        bare = Iem(golden.pair, list(golden.lengths))
        assert bare.self_similarity is None
        with pytest.raises(ParseError, match="loop"):
            emit_iem(bare)


class TestFunctionRoundtrip:
    def test_rational_poly(self):
        iem = rat3()
        fn = PiecewiseFunction.from_coeffs(
            iem,
            {"A": (F(1, 5), F(1, 2)), "B": (F(-1, 10),), "C": (F(0), F(1, 7), F(2))},
            level=0,
        )
        back = parse_function(emit_function(fn), iem)
        assert back.level == 0
        for letter in "ABC":
            assert back.pieces[letter].coeffs == fn.pieces[letter].coeffs

    def test_level_survives(self):
        iem = rat3()
        fn = PiecewiseFunction.constants(iem, {"A": F(1), "B": F(2), "C": F(3)}, level=4)
        assert emit_function(fn)["level"] == 4
        tr = support.rational_trace  # noqa: F841  (level-4 partition unused here)
        # parsing back only needs the letter set, not the deeper partition
        back = parse_function(emit_function(fn), iem)
        assert back.level == 4

    def test_sampled_roundtrip(self):
        iem = rat3()
        piece = SampledPiece((F(1, 16), F(1, 8)), (F(2), F(-1), F(5)))
        fn = PiecewiseFunction(
            iem,
            {
                "A": piece,
                "B": PolyPiece((F(0),)),
                "C": PolyPiece((F(1), F(1))),
            },
            level=0,
        )
        blob = emit_function(fn)
        assert blob["pieces"]["A"]["kind"] == "sampled"
        back = parse_function(blob, iem)
        assert back.pieces["A"].breaks == piece.breaks
        assert back.pieces["A"].values == piece.values

    def test_eigen_coeffs_roundtrip_exactly(self):
        iem = golden_iem()
        fn = PiecewiseFunction.from_global_poly(iem, (F(-1, 2), F(1)), level=0)
        blob = emit_function(fn)
        # the B piece picks up an irrational shift: coords form on the wire
        assert any(
            isinstance(c, dict) and "coords" in c
            for piece in blob["pieces"].values()
            for c in piece["coeffs"]
        )
        back = parse_function(json.loads(dump_json(blob)), iem)
        assert (back - fn).integral().is_zero()
        for letter in iem.pair.alphabet:
            for a, b in zip(back.pieces[letter].coeffs, fn.pieces[letter].coeffs):
                assert (a - b).is_zero()

    def test_tracked_coeffs_roundtrip(self):
        iem = support.tracked_copy(rat3(), bits=96)
        fn = PiecewiseFunction.constants(
            iem,
            {
                "A": TrackedReal(F(1, 3), F(1, 1 << 90)),
                "B": TrackedReal(F(-2, 3), F(0)),
                "C": TrackedReal(F(1, 4), F(1, 1 << 90)),
            },
            level=0,
        )
        back = parse_function(emit_function(fn), iem)
        for letter in "ABC":
            a = back.pieces[letter].coeffs[0]
            b = fn.pieces[letter].coeffs[0]
            assert Fraction(a.center) == Fraction(b.center)
            assert Fraction(a.radius) == Fraction(b.radius)

    def test_global_coeffs_input(self):
        iem = rat3()
        fn = parse_function({"global_coeffs": ["-1/2", "1"]}, iem)
        direct = PiecewiseFunction.from_global_poly(iem, (F(-1, 2), F(1)), level=0)
        for letter in "ABC":
            assert fn.pieces[letter].coeffs == direct.pieces[letter].coeffs

    def test_scalars_coerce_to_map_mode(self):
        fn = parse_function({"global_coeffs": ["1"]}, golden_iem())
        assert isinstance(fn.pieces["A"].coeffs[0], FieldElement)
        fn2 = parse_function(
            {"global_coeffs": ["1"]}, support.tracked_copy(rat3())
        )
        assert isinstance(fn2.pieces["A"].coeffs[0], TrackedReal)


class TestFunctionParseErrors:
    def test_missing_piece_letter(self):
        iem = rat3()
        blob = {"pieces": {"A": {"coeffs": ["1"]}, "B": {"coeffs": ["1"]}}}
        with pytest.raises(ParseError, match="'C'"):
            parse_function(blob, iem)

    def test_unknown_kind(self):
        iem = rat3()
        blob = {
            "pieces": {
                a: {"kind": "spline", "coeffs": ["1"]} for a in "ABC"
            }
        }
        with pytest.raises(ParseError, match="spline"):
            parse_function(blob, iem)

    def test_coords_on_non_eigen_map(self):
        blob = {"global_coeffs": [{"coords": ["1", "0"]}]}
        with pytest.raises(ParseError, match="eigen"):
            parse_function(blob, rat3())

    def test_sampled_break_value_mismatch(self):
        iem = rat3()
        blob = {
            "pieces": {
                "A": {"kind": "sampled", "breaks": ["0", "1/8"], "values": ["1"]},
                "B": {"coeffs": ["0"]},
                "C": {"coeffs": ["0"]},
            }
        }
        with pytest.raises(ParseError):
            parse_function(blob, iem)

    def test_unrecognized_scalar_object(self):
        with pytest.raises(ParseError, match="scalar"):
            parse_function({"global_coeffs": [{"float": 0.5}]}, rat3())

    def test_missing_pieces_and_coeffs(self):
        with pytest.raises(ParseError, match="pieces"):
            parse_function({"level": 0}, rat3())
        with pytest.raises(ParseError, match="coeffs"):
            parse_function({"pieces": {a: {} for a in "ABC"}}, rat3())


class TestFiles:
    def test_load_json_missing_file(self, tmp_path):
        with pytest.raises(ParseError, match="no such file"):
            load_json(str(tmp_path / "absent.json"))

    def test_load_json_invalid_text(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ParseError, match="invalid JSON"):
            load_json(str(path))

    def test_dump_is_deterministic_and_sorted(self):
        text = dump_json({"b": 1, "a": {"z": 2, "y": 3}})
        assert text == dump_json({"a": {"y": 3, "z": 2}, "b": 1})
        assert text.index('"a"') < text.index('"b"')
        assert text.endswith("\n")

    def test_file_roundtrip(self, tmp_path):
        iem = rat3()
        path = tmp_path / "iem.json"
        path.write_text(dump_json(emit_iem(iem)), encoding="utf-8")
        assert parse_iem(load_json(str(path))).lengths == iem.lengths

    def test_default_precision(self):
        assert DEFAULT_PRECISION_BITS == 256
        blob = emit_iem(rat3())
        blob["lengths"]["mode"] = REAL
        iem = parse_iem(blob, precision_bits=256)
        assert iem.lengths[0].radius == F(1, 1 << 256)
