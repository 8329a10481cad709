import string
import unicodedata
from collections import Counter

import pytest

from toklab.errors import ResourceError, ValidationError
from toklab.perturb import (
    Category,
    MappingTable,
    NFKC_INVERTIBLE_STYLES,
    PerturbationSpec,
    Style,
    build_style_table,
    load_table,
    perturb,
)

ALNUM = string.ascii_letters + string.digits


class TestPaperVectors:
    def test_doctor_final_pair_swap(self):
        # seed 0 at rate 0.3 selects exactly the final adjacent pair
        result = perturb("doctor", PerturbationSpec(Category.CHAR_SWAP, rate=0.3, seed=0))
        assert result.text == "doctro"
        assert result.changed

    def test_ocr_confusions(self):
        result = perturb("OIL", PerturbationSpec(Category.OCR, rate=1.0, seed=1))
        assert result.text == "0lL"

    def test_zero_width_insert_single_position(self):
        result = perturb("ab", PerturbationSpec(Category.ZERO_WIDTH_INSERT, rate=1.0, seed=0))
        assert result.text == "a​b"

    def test_fullwidth_style(self):
        spec = PerturbationSpec(Category.UNICODE_STYLE, style=Style.FULLWIDTH)
        result = perturb("A2", spec)
        assert result.text == "Ａ２"
        assert unicodedata.normalize("NFKC", result.text) == "A2"

    def test_space_remove_all(self):
        result = perturb("a b c", PerturbationSpec(Category.SPACE_REMOVE, rate=1.0, seed=0))
        assert result.text == "abc"

    def test_superscript_two(self):
        table = build_style_table(Style.SUPERSCRIPT)
        assert table.entries["2"] == "²"
        assert unicodedata.normalize("NFKC", "²") == "2"

    def test_upside_down_a(self):
        table = build_style_table(Style.UPSIDE_DOWN)
        assert table.entries["a"] == "ɐ"


class TestDeterminism:
    @pytest.mark.parametrize("category", [
        Category.HOMOGLYPH, Category.KEYBOARD_TYPO, Category.OCR,
        Category.CHAR_DELETE, Category.SPACE_REMOVE, Category.CHAR_SWAP,
        Category.ZERO_WIDTH_INSERT, Category.DIACRITICIZED,
    ])
    def test_pure_in_text_and_spec(self, category):
        spec = PerturbationSpec(category, rate=0.5, seed=1234)
        text = "The quick brown fox jumps Over 12 lazy dogs ISOBEl"
        assert perturb(text, spec).text == perturb(text, spec).text

    def test_seed_changes_output(self):
        text = "the quick brown fox jumps over the lazy dog"
        outs = {
            perturb(text, PerturbationSpec(Category.KEYBOARD_TYPO, rate=0.5, seed=s)).text
            for s in range(8)
        }
        assert len(outs) > 1

    def test_edit_stability_under_position(self):
        # the same (seed, position) decision does not depend on text length
        spec = PerturbationSpec(Category.OCR, rate=0.5, seed=9)
        short = perturb("OIO", spec).text
        longer = perturb("OIO" + "zzz", spec).text
        assert longer.startswith(short)


class TestLaws:
    @pytest.mark.parametrize("style", sorted(NFKC_INVERTIBLE_STYLES, key=lambda s: s.value))
    def test_nfkc_elimination_law(self, style):
        spec = PerturbationSpec(Category.UNICODE_STYLE, style=style)
        for chunk in (ALNUM, "Hello42World", "XYZ", "abc007"):
            styled = perturb(chunk, spec).text
            assert unicodedata.normalize("NFKC", styled) == chunk

    def test_change_guarantee_at_rate_one(self):
        for category in (Category.OCR, Category.CHAR_DELETE, Category.SPACE_REMOVE,
                         Category.CHAR_SWAP, Category.ZERO_WIDTH_INSERT):
            spec = PerturbationSpec(category, rate=1.0, seed=3)
            result = perturb("Old 5 Bikes I saw", spec)
            assert result.eligible > 0
            assert result.changed, category

    def test_noop_flag_when_nothing_eligible(self):
        result = perturb("zzz", PerturbationSpec(Category.OCR, rate=1.0, seed=0))
        assert result.noop and not result.changed and result.text == "zzz"

    def test_outputs_valid_utf8(self):
        for category in Category:
            spec = PerturbationSpec(
                category,
                style=Style.SCRIPT if category is Category.UNICODE_STYLE else None,
                rate=1.0,
                seed=7,
            )
            out = perturb("Mixed 42 text, IOBS!", spec).text
            out.encode("utf-8")  # must not raise

    def test_delete_and_swap_preserve_other_chars(self):
        text = "abcdef abcdef"
        deleted = perturb(text, PerturbationSpec(Category.CHAR_DELETE, rate=0.4, seed=5)).text
        assert not Counter(deleted) - Counter(text)  # no new characters
        swapped = perturb(text, PerturbationSpec(Category.CHAR_SWAP, rate=0.4, seed=5)).text
        assert Counter(swapped) == Counter(text)  # permutation only

    def test_case_styles(self):
        assert perturb("Big Cat", PerturbationSpec(Category.CASE_LOWER)).text == "big cat"
        assert perturb("big cat", PerturbationSpec(Category.CASE_CAPITALIZED)).text == "Big Cat"
        assert perturb("cat", PerturbationSpec(Category.SPACED)).text == "c a t"
        assert perturb("big cat", PerturbationSpec(Category.HYPHENATED)).text == "b-i-g c-a-t"

    def test_diacriticized(self):
        out = perturb("cafe", PerturbationSpec(Category.DIACRITICIZED, rate=1.0, seed=0)).text
        assert out != "cafe"
        assert unicodedata.normalize("NFKD", out).replace("́", "").replace(
            "̀", "").replace("̂", "").replace("̈", "").replace(
            "̃", "").replace("̧", "").replace("̌", "").replace(
            "̇", "") == "cafe"


class TestSpecValidation:
    def test_style_only_with_unicode_style(self):
        with pytest.raises(ValidationError):
            PerturbationSpec(Category.OCR, style=Style.FULLWIDTH)
        with pytest.raises(ValidationError):
            PerturbationSpec(Category.UNICODE_STYLE)

    def test_rate_bounds(self):
        with pytest.raises(ValidationError):
            PerturbationSpec(Category.OCR, rate=0.0)
        with pytest.raises(ValidationError):
            PerturbationSpec(Category.OCR, rate=1.5)

    def test_unknown_table(self):
        with pytest.raises(ResourceError):
            load_table("no_such_table")
        with pytest.raises(ResourceError):
            perturb("x", PerturbationSpec(Category.OCR, table="missing_table"))


class TestTables:
    def test_identity_mapping_rejected(self):
        with pytest.raises(ValidationError):
            MappingTable(name="bad", entries={"a": "a"})

    def test_bidirectional_must_be_injective(self):
        with pytest.raises(ValidationError):
            MappingTable(name="bad", entries={"a": "x", "b": "x"}, bidirectional=True)

    def test_user_table_from_path(self, tmp_path):
        import json

        p = tmp_path / "mine.json"
        p.write_text(json.dumps({"name": "mine", "entries": {"0061": "b"}}))
        table = load_table(str(p))
        assert table.entries == {"a": "b"}
        out = perturb("aaa", PerturbationSpec(Category.HOMOGLYPH, rate=1.0, seed=0, table=str(p)))
        assert out.text == "bbb"

    def test_shipped_tables_load(self):
        for name in ("qwerty_en", "homoglyphs_latin", "ocr_confusions",
                     "upside_down", "decorative", "diacritics_latin"):
            table = load_table(name)
            assert table.entries

    def test_homoglyphs_change_bytes_not_appearance_class(self):
        table = load_table("homoglyphs_latin")
        for src, repl in table.entries.items():
            assert src != repl
            assert unicodedata.category(repl).startswith("L")
