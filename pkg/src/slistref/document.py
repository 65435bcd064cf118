"""Annotated-document data model: loading, validation, segmentation.

A document is one JSON object with three required top-level keys:

``tokens``
    array of ``{i, w, sent, clause, para}`` -- token index, surface form,
    sentence id, clause id, paragraph id.
``clauses``
    array of ``{id, sent, tensed, class, parent}`` -- clause id, sentence id,
    whether the clause is tensed, its class (``main``, ``reported_speech``,
    ``non_report_complement``, ``relative``, ``other_tensed``, ``untensed``)
    and the id of the clause it is embedded in (or null).
``markables``
    array of ``{id, span: [a, b], form, agr: {p, n, g}, role, chain, sort,
    flags: {pred, pleo, quote}, coord, anchor, elaborated_by, sel_sort}``.
    ``span`` is an inclusive token range.  ``form`` is the NP form, ``agr``
    the agreement triple (person, number, gender), ``role`` the grammatical
    role inside the markable's clause, ``chain`` the gold coreference chain
    id, ``sort`` a free-form sort tag.  ``flags`` mark predicative NPs,
    pleonastic pronouns and material inside direct speech, all of which are
    excluded from resolution.  ``coord`` names a coordination group,
    ``anchor`` points at the markable that licenses an anchored brand-new
    entity, ``elaborated_by`` points at an appositive or relative phrase
    that elaborates a first-mention proper name, and ``sel_sort`` is a
    selectional sort restriction for anaphors.

Optional extras: document-level ``id`` and ``group`` (report aggregation),
markable-level ``infer`` ("I" or "IC" for explicitly annotated
inferrables) and ``flags.split`` / ``flags.event`` (gold-side marks used
to route the scoring of split antecedents and event anaphora).

Everything linguistic is annotation.  Tokenisation, sentence and clause
structure, agreement, grammatical roles and gold chains are read from the
file, never computed from raw text.  Chains are implicit in the markables'
``chain`` ids.  A machine-readable schema ships in ``fixtures/schema.json``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

NP_FORMS = frozenset({
    "personal_pronoun", "possessive_pronoun", "proper_name", "title",
    "definite_np", "indefinite_np", "relative_pronoun", "appositive_np",
    "ellipsis",
})
CLAUSE_CLASSES = frozenset({
    "main", "reported_speech", "non_report_complement", "relative",
    "other_tensed", "untensed",
})
ROLES = frozenset({"subject", "direct_object", "indirect_object", "other"})
NUMBERS = frozenset({"sg", "pl"})
GENDERS = frozenset({"masc", "fem", "neut", "unknown"})
INFER_CLASSES = frozenset({"I", "IC"})

# NP forms the resolvers treat as anaphors to be looked up.
RESOLVABLE_FORMS = frozenset({"personal_pronoun", "possessive_pronoun", "ellipsis"})


class DocumentError(Exception):
    """Base class for everything the loader can raise."""


class ParseError(DocumentError):
    """Malformed JSON or a structurally wrong field (carries line/field info)."""


class DanglingReferenceError(DocumentError):
    """An id field points at a token, clause or markable that does not exist."""


class ValidationError(DocumentError):
    """One or more document invariants are violated; lists all of them."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid document:\n" + "\n".join(
            "  - " + v for v in self.violations))


@dataclass(frozen=True)
class Token:
    index: int
    surface: str
    sentence_id: int
    clause_id: str
    paragraph_id: int


@dataclass(frozen=True)
class Clause:
    id: str
    sentence_id: int
    tensed: bool
    clause_class: str
    parent_id: str | None


@dataclass(frozen=True)
class Agreement:
    person: int
    number: str
    gender: str


@dataclass(frozen=True)
class Markable:
    id: str
    start: int
    end: int
    np_form: str
    agreement: Agreement
    role: str
    chain_id: str | None
    sort_tag: str | None = None
    predicative: bool = False
    pleonastic: bool = False
    in_direct_speech: bool = False
    split_antecedent: bool = False
    event_anaphor: bool = False
    coordination_group: str | None = None
    anchor_id: str | None = None
    elaborated_by: str | None = None
    selectional_sort: str | None = None
    infer: str | None = None


@dataclass(frozen=True)
class Sentence:
    id: int
    start: int
    end: int
    paragraph_id: int


@dataclass(frozen=True)
class Paragraph:
    id: int
    first_sentence: int
    last_sentence: int


@dataclass(frozen=True)
class Segment:
    id: int
    first_sentence: int
    last_sentence: int


@dataclass
class Document:
    doc_id: str
    group: str
    tokens: list[Token]
    sentences: list[Sentence]
    paragraphs: list[Paragraph]
    clauses: list[Clause]
    markables: list[Markable]
    chains: dict[str, list[str]] = field(default_factory=dict)
    _clause_index: dict[str, Clause] = field(default_factory=dict, repr=False)
    _markable_index: dict[str, Markable] = field(default_factory=dict, repr=False)
    _by_sentence: dict[int, list[Markable]] = field(default_factory=dict, repr=False)

    def clause(self, clause_id: str) -> Clause:
        return self._clause_index[clause_id]

    def markable(self, markable_id: str) -> Markable:
        return self._markable_index[markable_id]

    def text(self, m: Markable) -> str:
        return " ".join(t.surface for t in self.tokens[m.start:m.end + 1])

    def sentence_of(self, m: Markable) -> int:
        return self.tokens[m.start].sentence_id

    def clause_of(self, m: Markable) -> Clause:
        """Clause of the markable's first token."""
        return self.clause(self.tokens[m.start].clause_id)

    def markables_in_sentence(self, sentence_id: int) -> list[Markable]:
        """Markables of one sentence in span order (see markable_sort_key)."""
        return self._by_sentence.get(sentence_id, [])

    def to_payload(self) -> dict:
        """Rebuild the JSON payload; load(dumps(to_payload())) round-trips."""
        payload = {
            "id": self.doc_id,
            "group": self.group,
            "tokens": [
                {"i": t.index, "w": t.surface, "sent": t.sentence_id,
                 "clause": t.clause_id, "para": t.paragraph_id}
                for t in self.tokens
            ],
            "clauses": [
                {"id": c.id, "sent": c.sentence_id, "tensed": c.tensed,
                 "class": c.clause_class, "parent": c.parent_id}
                for c in self.clauses
            ],
            "markables": [_markable_payload(m) for m in self.markables],
        }
        return payload


def _markable_payload(m: Markable) -> dict:
    entry = {
        "id": m.id,
        "span": [m.start, m.end],
        "form": m.np_form,
        "agr": {"p": m.agreement.person, "n": m.agreement.number,
                "g": m.agreement.gender},
        "role": m.role,
        "chain": m.chain_id,
        "sort": m.sort_tag,
        "flags": {"pred": m.predicative, "pleo": m.pleonastic,
                  "quote": m.in_direct_speech},
        "coord": m.coordination_group,
        "anchor": m.anchor_id,
        "elaborated_by": m.elaborated_by,
        "sel_sort": m.selectional_sort,
    }
    if m.split_antecedent:
        entry["flags"]["split"] = True
    if m.event_anaphor:
        entry["flags"]["event"] = True
    if m.infer is not None:
        entry["infer"] = m.infer
    return entry


def is_excluded(m: Markable) -> bool:
    """Predicative, pleonastic and direct-speech markables never resolve
    and never enter a salience list or Cf."""
    return m.predicative or m.pleonastic or m.in_direct_speech


def is_resolvable(m: Markable) -> bool:
    """True for the anaphors the engines look up: personal and possessive
    pronouns and elliptical NPs, unless excluded."""
    return m.np_form in RESOLVABLE_FORMS and not is_excluded(m)


def markable_sort_key(m: Markable) -> tuple[int, int, str]:
    """Referring expressions are processed by span start; when two share a
    start, the shorter one (the head) comes before its containing phrase."""
    return (m.start, m.end, m.id)


def referring_expressions_in_order(doc: Document) -> list[Markable]:
    """All non-excluded markables in processing order.

    The order is stable under any permutation of the input ``markables``
    array because the key is derived from spans alone.
    """
    return sorted((m for m in doc.markables if not is_excluded(m)),
                  key=markable_sort_key)


# ---------------------------------------------------------------------------
# loading


def _expect(obj, key, kind, where, optional=False, default=None):
    if key not in obj or obj[key] is None:
        if optional:
            return default
        raise ParseError(f"{where}: missing required field {key!r}")
    value = obj[key]
    if kind is int and isinstance(value, bool):
        raise ParseError(f"{where}.{key}: expected {kind.__name__}, got bool")
    if not isinstance(value, kind):
        raise ParseError(
            f"{where}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _parse_agreement(obj, where) -> Agreement:
    agr = _expect(obj, "agr", dict, where)
    person = _expect(agr, "p", int, where + ".agr")
    number = _expect(agr, "n", str, where + ".agr")
    gender = _expect(agr, "g", str, where + ".agr", optional=True,
                     default="unknown")
    if person not in (1, 2, 3):
        raise ParseError(f"{where}.agr.p: person must be 1, 2 or 3")
    if number not in NUMBERS:
        raise ParseError(f"{where}.agr.n: unknown number {number!r}")
    if gender not in GENDERS:
        raise ParseError(f"{where}.agr.g: unknown gender {gender!r}")
    return Agreement(person, number, gender)


def _parse_markable(obj, where) -> Markable:
    span = _expect(obj, "span", list, where)
    if len(span) != 2 or not all(isinstance(v, int) and not isinstance(v, bool)
                                 for v in span):
        raise ParseError(f"{where}.span: expected [start, end]")
    form = _expect(obj, "form", str, where)
    if form not in NP_FORMS:
        raise ParseError(f"{where}.form: unknown NP form {form!r}")
    role = _expect(obj, "role", str, where)
    if role not in ROLES:
        raise ParseError(f"{where}.role: unknown role {role!r}")
    flags = _expect(obj, "flags", dict, where, optional=True, default={})
    infer = _expect(obj, "infer", str, where, optional=True)
    if infer is not None and infer not in INFER_CLASSES:
        raise ParseError(f"{where}.infer: expected 'I' or 'IC', got {infer!r}")
    return Markable(
        id=_expect(obj, "id", str, where),
        start=span[0],
        end=span[1],
        np_form=form,
        agreement=_parse_agreement(obj, where),
        role=role,
        chain_id=_expect(obj, "chain", str, where, optional=True),
        sort_tag=_expect(obj, "sort", str, where, optional=True),
        predicative=bool(flags.get("pred", False)),
        pleonastic=bool(flags.get("pleo", False)),
        in_direct_speech=bool(flags.get("quote", False)),
        split_antecedent=bool(flags.get("split", False)),
        event_anaphor=bool(flags.get("event", False)),
        coordination_group=_expect(obj, "coord", str, where, optional=True),
        anchor_id=_expect(obj, "anchor", str, where, optional=True),
        elaborated_by=_expect(obj, "elaborated_by", str, where, optional=True),
        selectional_sort=_expect(obj, "sel_sort", str, where, optional=True),
        infer=infer,
    )


def load_document(data: bytes | str, doc_id: str | None = None) -> Document:
    """Parse and fully validate one document.

    :param data: raw JSON file content.
    :param doc_id: fallback document id when the payload carries none.
    :raises ParseError: malformed JSON or structurally wrong fields, with
        line or field-path information.
    :raises DanglingReferenceError: an id points at nothing.
    :raises ValidationError: one or more invariants are violated; the
        exception lists every violation found, not just the first.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(payload, dict):
        raise ParseError("top level: expected a JSON object")

    tokens = []
    for k, obj in enumerate(_expect(payload, "tokens", list, "document",
                                    optional=True, default=[])):
        where = f"tokens[{k}]"
        if not isinstance(obj, dict):
            raise ParseError(f"{where}: expected an object")
        tokens.append(Token(
            index=_expect(obj, "i", int, where),
            surface=_expect(obj, "w", str, where),
            sentence_id=_expect(obj, "sent", int, where),
            clause_id=_expect(obj, "clause", str, where),
            paragraph_id=_expect(obj, "para", int, where),
        ))

    clauses = []
    for k, obj in enumerate(_expect(payload, "clauses", list, "document",
                                    optional=True, default=[])):
        where = f"clauses[{k}]"
        if not isinstance(obj, dict):
            raise ParseError(f"{where}: expected an object")
        cls = _expect(obj, "class", str, where)
        if cls not in CLAUSE_CLASSES:
            raise ParseError(f"{where}.class: unknown clause class {cls!r}")
        clauses.append(Clause(
            id=_expect(obj, "id", str, where),
            sentence_id=_expect(obj, "sent", int, where),
            tensed=_expect(obj, "tensed", bool, where),
            clause_class=cls,
            parent_id=_expect(obj, "parent", str, where, optional=True),
        ))

    markables = []
    for k, obj in enumerate(_expect(payload, "markables", list, "document",
                                    optional=True, default=[])):
        where = f"markables[{k}]"
        if not isinstance(obj, dict):
            raise ParseError(f"{where}: expected an object")
        markables.append(_parse_markable(obj, where))

    _check_references(tokens, clauses, markables)
    sentences, paragraphs = _derive_layout(tokens)
    violations = _validate(tokens, sentences, paragraphs, clauses, markables)
    if violations:
        raise ValidationError(violations)

    chains: dict[str, list[str]] = {}
    for m in sorted(markables, key=markable_sort_key):
        if m.chain_id is not None:
            chains.setdefault(m.chain_id, []).append(m.id)

    by_sentence: dict[int, list[Markable]] = {}
    for m in sorted(markables, key=markable_sort_key):
        by_sentence.setdefault(tokens[m.start].sentence_id, []).append(m)

    return Document(
        doc_id=payload.get("id") or doc_id or "document",
        group=payload.get("group") or "ungrouped",
        tokens=tokens,
        sentences=sentences,
        paragraphs=paragraphs,
        clauses=clauses,
        markables=markables,
        chains=chains,
        _clause_index={c.id: c for c in clauses},
        _markable_index={m.id: m for m in markables},
        _by_sentence=by_sentence,
    )


def load_document_file(path) -> Document:
    from pathlib import Path
    p = Path(path)
    try:
        return load_document(p.read_bytes(), doc_id=p.stem)
    except DocumentError as exc:
        raise type(exc)(f"{p}: {exc}") if not isinstance(exc, ValidationError) \
            else ValidationError([f"{p}: {v}" for v in exc.violations])


def dumps(doc: Document) -> str:
    return json.dumps(doc.to_payload(), ensure_ascii=False, indent=2,
                      sort_keys=False)


def _check_references(tokens, clauses, markables):
    clause_ids = {c.id for c in clauses}
    markable_ids = {m.id for m in markables}
    dangling = []
    seen = set()
    for c in clauses:
        if c.id in seen:
            dangling.append(f"duplicate clause id {c.id!r}")
        seen.add(c.id)
        if c.parent_id is not None and c.parent_id not in clause_ids:
            dangling.append(f"clause {c.id!r}: parent {c.parent_id!r} undeclared")
    for t in tokens:
        if t.clause_id not in clause_ids:
            dangling.append(f"token {t.index}: clause {t.clause_id!r} undeclared")
    seen = set()
    for m in markables:
        if m.id in seen:
            dangling.append(f"duplicate markable id {m.id!r}")
        seen.add(m.id)
        if m.anchor_id is not None and m.anchor_id not in markable_ids:
            dangling.append(f"markable {m.id!r}: anchor {m.anchor_id!r} undeclared")
        if m.elaborated_by is not None and m.elaborated_by not in markable_ids:
            dangling.append(
                f"markable {m.id!r}: elaborated_by {m.elaborated_by!r} undeclared")
    if dangling:
        raise DanglingReferenceError("; ".join(dangling))


def _derive_layout(tokens):
    """Sentences and paragraphs are implicit in the token annotations."""
    sentences, paragraphs = [], []
    for t in tokens:
        if not sentences or t.sentence_id != sentences[-1][0]:
            sentences.append([t.sentence_id, t.index, t.index, t.paragraph_id])
        else:
            sentences[-1][2] = t.index
        if not paragraphs or t.paragraph_id != paragraphs[-1][0]:
            paragraphs.append([t.paragraph_id, t.sentence_id, t.sentence_id])
        else:
            paragraphs[-1][2] = t.sentence_id
    return ([Sentence(*s) for s in sentences],
            [Paragraph(*p) for p in paragraphs])


def _validate(tokens, sentences, paragraphs, clauses, markables):
    violations = []
    for k, t in enumerate(tokens):
        if t.index != k:
            violations.append(
                f"token {k}: index {t.index} breaks dense increasing order")
            break
    for k, s in enumerate(sentences):
        if s.id != k:
            violations.append(f"sentence ids must be dense from 0, got {s.id}")
            break
    for k, p in enumerate(paragraphs):
        if p.id != k:
            violations.append(f"paragraph ids must be dense from 0, got {p.id}")
            break
    sentence_paragraph = {}
    for t in tokens:
        prior = sentence_paragraph.setdefault(t.sentence_id, t.paragraph_id)
        if prior != t.paragraph_id:
            violations.append(
                f"sentence {t.sentence_id} straddles paragraphs {prior} "
                f"and {t.paragraph_id}")

    clause_tokens: dict[str, list[int]] = {}
    for t in tokens:
        clause_tokens.setdefault(t.clause_id, []).append(t.index)
    clause_index = {c.id: c for c in clauses}
    for c in clauses:
        span = clause_tokens.get(c.id)
        if not span:
            violations.append(f"clause {c.id!r} has no tokens")
            continue
        sents = {tokens[i].sentence_id for i in span}
        if sents != {c.sentence_id}:
            violations.append(
                f"clause {c.id!r}: declared in sentence {c.sentence_id} but "
                f"tokens lie in {sorted(sents)}")
        if not c.tensed and c.parent_id is None:
            violations.append(f"clause {c.id!r}: untensed clause needs a parent")
    hulls = [(min(v), max(v), cid) for cid, v in clause_tokens.items()
             if cid in clause_index]
    for i, (a1, b1, c1) in enumerate(hulls):
        for a2, b2, c2 in hulls[i + 1:]:
            nested = (a1 <= a2 and b2 <= b1) or (a2 <= a1 and b1 <= b2)
            disjoint = b1 < a2 or b2 < a1
            if not (nested or disjoint):
                violations.append(
                    f"clauses {c1!r} and {c2!r} overlap without nesting")

    markable_index = {m.id: m for m in markables}
    for m in markables:
        if not (0 <= m.start <= m.end < len(tokens)):
            violations.append(f"markable {m.id!r}: span out of range")
            continue
        sents = {tokens[i].sentence_id for i in range(m.start, m.end + 1)}
        if len(sents) != 1:
            violations.append(f"markable {m.id!r}: span crosses sentences")
        if m.chain_id is None and not (m.predicative or m.pleonastic):
            violations.append(
                f"markable {m.id!r}: non-predicative, non-pleonastic markable "
                "needs a chain")
        if m.pleonastic and m.np_form != "personal_pronoun":
            violations.append(
                f"markable {m.id!r}: pleonastic flag on a {m.np_form}")
        if m.anchor_id is not None:
            anchor = markable_index[m.anchor_id]
            if anchor.start > m.start:
                violations.append(
                    f"markable {m.id!r}: anchor {m.anchor_id!r} is not earlier "
                    "or containing")
        if m.elaborated_by is not None:
            elab = markable_index[m.elaborated_by]
            if elab.start < m.start:
                violations.append(
                    f"markable {m.id!r}: elaborating phrase {elab.id!r} "
                    "precedes its host")
    return violations


# ---------------------------------------------------------------------------
# segments


def derive_segments(doc: Document,
                    prior_resolution_probe=None) -> list[Segment]:
    """Partition the sentences into discourse segments.

    Each paragraph opens a new segment unless its first sentence signals a
    dependency on prior context, namely when it contains (a) a personal
    pronoun that is the subject of a main clause, or (b) a personal or
    possessive pronoun none of whose preceding same-sentence markables
    matches its agreement features.  Such a paragraph continues the
    previous segment.

    :param prior_resolution_probe: optional ``(pronoun, candidate) -> bool``
        test used for clause (b); defaults to the standard agreement match.
        Segmentation runs before any resolution, so the probe sees only
        annotation-level features.
    """
    if not doc.sentences:
        return []
    probe = prior_resolution_probe
    if probe is None:
        from .compatibility import agreement_match
        probe = lambda pron, cand: agreement_match(pron.agreement, cand.agreement)

    boundaries = [doc.paragraphs[0].first_sentence]
    for para in doc.paragraphs[1:]:
        if not _continues_segment(doc, para.first_sentence, probe):
            boundaries.append(para.first_sentence)
    boundaries.append(doc.sentences[-1].id + 1)
    return [Segment(i, boundaries[i], boundaries[i + 1] - 1)
            for i in range(len(boundaries) - 1)]


def _continues_segment(doc, sentence_id, probe) -> bool:
    here = [m for m in doc.markables_in_sentence(sentence_id)
            if not is_excluded(m)]
    for m in here:
        if m.np_form == "personal_pronoun" and m.role == "subject" \
                and doc.clause_of(m).clause_class == "main":
            return True
        if m.np_form in ("personal_pronoun", "possessive_pronoun"):
            preceding = [c for c in here if c.start < m.start]
            if not any(probe(m, c) for c in preceding):
                return True
    return False


def segment_of_sentence(segments: list[Segment]) -> dict[int, int]:
    """Map sentence id -> segment id."""
    table = {}
    for seg in segments:
        for s in range(seg.first_sentence, seg.last_sentence + 1):
            table[s] = seg.id
    return table
