"""Loader, validation and segmentation behavior."""
from __future__ import annotations

import json

import pytest

from helpers import fixture_doc, make_doc, mark, payload
from slistref import (DanglingReferenceError, ParseError, ValidationError,
                      derive_segments, is_excluded, is_resolvable,
                      load_document, load_document_file,
                      referring_expressions_in_order, segment_of_sentence)
from slistref.document import dumps, markable_sort_key


def test_round_trip_basic_fields():
    doc = make_doc([(0, "Ava met Bo ."), (0, "She waved .")],
                   [mark("m_ava", 0, 0, form="proper_name", g="fem",
                         role="subject", chain="ava"),
                    mark("m_bo", 2, 2, form="proper_name", g="masc",
                         role="direct_object", chain="bo"),
                    mark("m_she", 4, 4, form="personal_pronoun", g="fem",
                         role="subject", chain="ava")])
    assert len(doc.tokens) == 7
    assert len(doc.sentences) == 2
    assert doc.text(doc.markable("m_bo")) == "Bo"
    assert doc.markable("m_bo").start == 2
    assert doc.sentence_of(doc.markable("m_she")) == 1
    assert doc.clause_of(doc.markable("m_she")).id == "c1"
    assert doc.chains["ava"] == ["m_ava", "m_she"]


def test_empty_body_loads_as_empty_document():
    doc = load_document("{}")
    assert doc.tokens == []
    assert doc.markables == []
    assert derive_segments(doc) == []


def test_doc_id_defaults_and_file_stem(tmp_path):
    doc = load_document('{"id": "inner"}')
    assert doc.doc_id == "inner"
    body = payload([(0, "Hi .")], [])
    del body["id"]  # unnamed documents take the file stem
    path = tmp_path / "named.json"
    path.write_text(json.dumps(body))
    assert load_document_file(path).doc_id == "named"


def test_file_errors_carry_the_path(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("nope")
    with pytest.raises(ParseError) as err:
        load_document_file(path)
    assert "broken.json" in str(err.value)


def test_parse_error_on_malformed_json():
    with pytest.raises(ParseError):
        load_document("[not json")


def test_dangling_clause_reference():
    p = payload([(0, "Al ran .")], [mark("m0", 0, 0, chain="al")])
    p["tokens"][1]["clause"] = "nowhere"
    with pytest.raises(DanglingReferenceError):
        load_document(json.dumps(p))


def test_validation_collects_every_violation():
    p = payload([(0, "Al ran fast .")],
                [mark("m0", 0, 9, chain="al"),    # span out of range
                 mark("m1", 2, 1, chain="x")])    # inverted span
    with pytest.raises(ValidationError) as err:
        load_document(json.dumps(p))
    assert len(err.value.violations) >= 2


def test_chain_required_unless_excluded():
    p = payload([(0, "Al is boss .")],
                [mark("m0", 0, 0, form="proper_name", chain="al"),
                 mark("m1", 2, 2, chain=None, flags={"pred": True})])
    doc = load_document(json.dumps(p))
    assert doc.markable("m1").chain_id is None
    bad = payload([(0, "Al ran .")], [mark("m0", 0, 0, chain=None)])
    with pytest.raises(ValidationError):
        load_document(json.dumps(bad))


def test_pleonastic_must_be_a_personal_pronoun():
    bad = payload([(0, "It rained .")],
                  [mark("m0", 0, 0, form="definite_np", chain=None,
                        flags={"pleo": True})])
    with pytest.raises(ValidationError):
        load_document(json.dumps(bad))
    good = payload([(0, "It rained .")],
                   [mark("m0", 0, 0, form="personal_pronoun", chain=None,
                         flags={"pleo": True})])
    doc = load_document(json.dumps(good))
    assert is_excluded(doc.markable("m0"))


def test_anchor_must_not_point_forward():
    bad = payload([(0, "the door the house .")],
                  [mark("m_door", 0, 1, chain="door", anchor="m_house"),
                   mark("m_house", 2, 3, chain="house")])
    with pytest.raises(ValidationError):
        load_document(json.dumps(bad))


def test_untensed_clause_needs_a_parent():
    p = payload([(0, "to run .")], [])
    p["clauses"][0]["tensed"] = False
    p["clauses"][0]["class"] = "untensed"
    with pytest.raises(ValidationError):
        load_document(json.dumps(p))


def test_span_confined_to_one_sentence():
    p = payload([(0, "Al ran ."), (0, "Bo sat .")],
                [mark("m0", 2, 3, chain="x")])
    with pytest.raises(ValidationError):
        load_document(json.dumps(p))


def test_markable_order_and_resolvability():
    doc = make_doc([(0, "he his ε the dog .")],
                   [mark("m_dog", 3, 4, chain="dog"),
                    mark("m_he", 0, 0, form="personal_pronoun", g="masc",
                         chain="dog"),
                    mark("m_his", 1, 1, form="possessive_pronoun", g="masc",
                         chain="dog"),
                    mark("m_eps", 2, 2, form="ellipsis", chain="dog")])
    in_order = [m.id for m in doc.markables_in_sentence(0)]
    assert in_order == ["m_he", "m_his", "m_eps", "m_dog"]
    assert [m.id for m in referring_expressions_in_order(doc)] == in_order
    assert all(is_resolvable(doc.markable(m))
               for m in ("m_he", "m_his", "m_eps"))
    assert not is_resolvable(doc.markable("m_dog"))
    key = markable_sort_key(doc.markable("m_he"))
    assert key < markable_sort_key(doc.markable("m_his"))


def test_dumps_round_trips():
    doc = fixture_doc("alfa_d")
    again = load_document(dumps(doc), doc_id=doc.doc_id)
    assert [t.surface for t in again.tokens] == \
        [t.surface for t in doc.tokens]
    assert [m.id for m in again.markables] == [m.id for m in doc.markables]


def test_single_paragraph_is_one_segment():
    doc = fixture_doc("alfa_d")
    segs = derive_segments(doc)
    assert [(s.id, s.first_sentence, s.last_sentence) for s in segs] == \
        [(0, 0, 3)]
    assert segment_of_sentence(segs) == {0: 0, 1: 0, 2: 0, 3: 0}


def test_new_paragraph_without_pronouns_opens_a_segment():
    doc = fixture_doc("boundary")
    segs = derive_segments(doc)
    assert [(s.first_sentence, s.last_sentence) for s in segs] == \
        [(0, 0), (1, 2)]
    assert segment_of_sentence(segs)[2] == 1


def test_pronoun_subject_of_main_clause_continues_the_segment():
    doc = make_doc([(0, "Mia left ."), (1, "She smiled .")],
                   [mark("m_mia", 0, 0, form="proper_name", g="fem",
                         role="subject", chain="mia"),
                    mark("m_she", 3, 3, form="personal_pronoun", g="fem",
                         role="subject", chain="mia")])
    segs = derive_segments(doc)
    assert len(segs) == 1


def test_unmatched_pronoun_continues_the_segment():
    # "her" is not a subject, but nothing earlier in the sentence agrees
    # with it, so the paragraph is treated as a continuation.
    doc = make_doc([(0, "Mia left ."), (1, "Then Bob saw her .")],
                   [mark("m_mia", 0, 0, form="proper_name", g="fem",
                         role="subject", chain="mia"),
                    mark("m_bob", 4, 4, form="proper_name", g="masc",
                         role="subject", chain="bob"),
                    mark("m_her", 6, 6, form="personal_pronoun", g="fem",
                         role="direct_object", chain="mia")])
    assert len(derive_segments(doc)) == 1


def test_matched_nonsubject_pronoun_opens_a_segment():
    doc = make_doc([(0, "Mia left ."), (1, "Then Ana saw her .")],
                   [mark("m_mia", 0, 0, form="proper_name", g="fem",
                         role="subject", chain="mia"),
                    mark("m_ana", 4, 4, form="proper_name", g="fem",
                         role="subject", chain="ana"),
                    mark("m_her", 6, 6, form="personal_pronoun", g="fem",
                         role="direct_object", chain="mia")])
    segs = derive_segments(doc)
    assert [(s.first_sentence, s.last_sentence) for s in segs] == \
        [(0, 0), (1, 1)]


def test_curtis_body_opens_a_new_segment():
    # the lead sentence stands alone; the embedded pronouns of the next
    # sentence must not glue the paragraphs together
    doc = fixture_doc("curtis")
    segs = derive_segments(doc)
    assert [(s.first_sentence, s.last_sentence) for s in segs] == \
        [(0, 0), (1, 3)]
