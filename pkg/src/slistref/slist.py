"""Incremental salience-list engine.

The attentional state is a single ordered list of entity realizations,
ranked first by information status (hearer-old before mediated before
brand-new), then by recency of utterance, then by text position.  The
engine walks the document word by word (operationally: referring
expression by referring expression), resolving each pronoun-like markable
against the list front-to-back, re-inserting the chosen entity, and
purging at every sentence end all entities that the finished sentence did
not realize.  The list empties at segment starts; familiarity history
does not (it is document-global).

The length cap (``max_len``, default 5) bounds the *operative* list: the
slice that resolution consults and that traces display.  Internally the
engine retains the full ranked buffer between purges, so an entity pushed
below the cap by denser recent context reappears once the purge clears
the intervening material.  ``SList.items`` is always the capped view.
"""

from __future__ import annotations

import logging
from bisect import bisect_right
from dataclasses import dataclass, field, replace

from .compatibility import compatible, context_for
from .document import (Agreement, Document, Markable, derive_segments,
                       is_excluded, is_resolvable, segment_of_sentence)
from .evaluate import ResolutionRecord

log = logging.getLogger(__name__)

# Familiarity classes.
E = "E"      # evoked: previously co-referring
U = "U"      # unused: known by name (proper names, titles)
I = "I"      # inferrable
IC = "IC"    # containing inferrable
BNA = "BNA"  # brand-new anchored to an old entity
BN = "BN"    # brand-new

FAMILIARITY_CLASSES = (E, U, I, IC, BNA, BN)

OLD, MED, NEW = "OLD", "MED", "NEW"
_STATUS_SET = {E: OLD, U: OLD, I: MED, IC: MED, BNA: MED, BN: NEW}
_STATUS_RANK = {OLD: 0, MED: 1, NEW: 2}


def status_set(familiarity: str) -> str:
    """OLD = {E, U}; MED = {I, IC, BNA}; NEW = {BN}."""
    return _STATUS_SET[familiarity]


@dataclass(frozen=True)
class Realization:
    """One entity's current standing in the list: the (entity, utterance,
    position) triple plus its familiarity class and surface bookkeeping."""

    entity: str
    utt: int
    pos: int
    familiarity: str
    surface: str = ""
    agreement: Agreement = Agreement(3, "sg", "unknown")
    sort: str | None = None
    markable_id: str | None = None

    def rank_key(self) -> tuple[int, int, int]:
        return (_STATUS_RANK[_STATUS_SET[self.familiarity]], -self.utt, self.pos)


def precedes(a: Realization, b: Realization) -> bool:
    """True iff ``a`` outranks ``b``: better status set; else the later
    utterance; else the smaller text position."""
    return a.rank_key() < b.rank_key()


def updated_realization(old: Realization | None, new: Realization) -> Realization:
    """Merge a fresh realization of an entity with its previous standing.

    Within one utterance and one status set an entity keeps the position
    of its earliest realization there; a status-set change or a new
    utterance restamps the position.  Familiarity is always the latest
    classification, the sort tag persists when the new mention carries
    none, and surface/agreement/markable follow the latest mention.
    """
    if old is None:
        return new
    keep_pos = (status_set(old.familiarity) == status_set(new.familiarity)
                and old.utt == new.utt)
    return replace(new,
                   pos=old.pos if keep_pos else new.pos,
                   sort=new.sort if new.sort is not None else old.sort)


@dataclass
class SList:
    """The ranked attentional state.  ``items`` is the operative view,
    capped at ``max_len``; the full retention buffer lives behind it."""

    max_len: int = 5
    current_utt: int = 0
    _items: list[Realization] = field(default_factory=list)

    @property
    def items(self) -> tuple[Realization, ...]:
        return tuple(self._items[:self.max_len])

    @property
    def retained(self) -> tuple[Realization, ...]:
        """The full ranked buffer, including entities below the cap."""
        return tuple(self._items)

    def realization_of(self, entity: str) -> Realization | None:
        for r in self._items:
            if r.entity == entity:
                return r
        return None

    def insert(self, r: Realization) -> "SList":
        """Upsert ``r``: drop any previous realization of the same entity,
        then place ``r`` at its rank (after equal-rank neighbours)."""
        self._items = [x for x in self._items if x.entity != r.entity]
        keys = [x.rank_key() for x in self._items]
        self._items.insert(bisect_right(keys, r.rank_key()), r)
        return self

    def resolve(self, anaphor: Markable, ctx_builder) -> Realization | None:
        """First listed entity (in the operative view) whose candidate
        context passes :func:`slistref.compatibility.compatible`."""
        for r in self.items:
            if compatible(ctx_builder(r)):
                return r
        return None

    def end_of_utterance(self, realized: set[str]) -> "SList":
        """Purge: keep only entities the finished utterance realized."""
        self._items = [x for x in self._items if x.entity in realized]
        self.current_utt += 1
        return self

    def clear(self) -> "SList":
        self._items = []
        return self

    def snapshot(self) -> tuple[tuple[str, str, str], ...]:
        """(entity, familiarity, surface) triples of the operative view."""
        return tuple((r.entity, r.familiarity, r.surface) for r in self.items)


class FamiliarityTracker:
    """Document-global mention history backing familiarity classification.

    Unlike the S-list itself, the history never resets: an entity evoked
    in one segment stays hearer-old in the next.
    """

    def __init__(self):
        self._mentioned: set[str] = set()
        self.status: dict[str, str] = {}
        self.diagnostics: list[str] = []

    def seen(self, entity: str) -> bool:
        return entity in self._mentioned

    def classify_realization(self, m: Markable, entity: str,
                             anchor_entity: str | None = None) -> str:
        """Familiarity of a new realization of ``entity`` by markable ``m``.

        Evoked when the entity was mentioned before (or the markable is an
        appositive/relative phrase co-referring with its host); unused for
        first-mention names and titles, except that a proper name carrying
        an ``elaborated_by`` annotation starts brand-new and turns evoked
        only once the elaborating phrase itself is processed; inferrables
        come from explicit annotation only; anchored brand-new requires the
        anchor's entity to currently be hearer-old, otherwise the class
        degrades to plain brand-new with a diagnostic.
        """
        if self.seen(entity) or m.np_form in ("relative_pronoun", "appositive_np"):
            fam = E
        elif m.np_form == "title":
            fam = U
        elif m.np_form == "proper_name" and m.elaborated_by is None:
            fam = U
        elif m.infer is not None:
            fam = m.infer
        elif m.anchor_id is not None:
            if anchor_entity is not None and self.status.get(anchor_entity) in (E, U):
                fam = BNA
            else:
                note = (f"markable {m.id}: anchor entity is not hearer-old; "
                        "downgrading anchored brand-new to brand-new")
                self.diagnostics.append(note)
                log.warning(note)
                fam = BN
        else:
            fam = BN
        self._mentioned.add(entity)
        self.status[entity] = fam
        return fam

    def classify_group(self, group: str) -> str:
        """A coordination set-entity is evoked if the set itself was
        mentioned before, brand-new otherwise."""
        fam = E if self.seen(group) else BN
        self._mentioned.add(group)
        self.status[group] = fam
        return fam


def classify_realization(m: Markable, history: FamiliarityTracker,
                         entity: str | None = None,
                         anchor_entity: str | None = None) -> str:
    """Functional form of :meth:`FamiliarityTracker.classify_realization`;
    the entity defaults to the markable's gold chain."""
    if entity is None:
        entity = m.chain_id or m.id
    return history.classify_realization(m, entity, anchor_entity)


@dataclass(frozen=True)
class TraceStep:
    token_index: int
    action: str  # insert | resolve | purge | reset
    slist: tuple[tuple[str, str, str], ...]

    def to_dict(self) -> dict:
        return {
            "token_index": self.token_index,
            "action": self.action,
            "slist": [{"entity": e, "class": f, "surface": s}
                      for (e, f, s) in self.slist],
        }


@dataclass
class SListRun:
    records: list[ResolutionRecord]
    steps: list[TraceStep]
    assignments: dict[str, str]
    diagnostics: list[str]

    def trace_dicts(self) -> list[dict]:
        return [s.to_dict() for s in self.steps]


def run_slist(doc: Document, segments=None, max_len: int = 5,
              forced: dict[str, str] | None = None) -> SListRun:
    """Run the salience-list engine over one document.

    Utterance = sentence.  The list empties at each segment start, every
    referring expression is classified and upserted as it is read,
    pronoun-like markables resolve against the current view first, and
    each sentence end purges entities the sentence did not realize.
    Coordinated NPs additionally realize a set-entity named by their
    ``coordination_group`` (plural agreement).

    :param segments: precomputed segments; derived from the document
        when omitted.
    :param forced: optional anaphor-id -> entity overrides, used by the
        evaluation module's counterfactual re-runs.
    :returns: records (one per pronoun-like markable), the per-word trace,
        the full markable -> entity assignment map, and any familiarity
        diagnostics.
    """
    if segments is None:
        segments = derive_segments(doc)
    forced = forced or {}
    seg_of = segment_of_sentence(segments)
    segment_starts = {seg.first_sentence for seg in segments}

    slist = SList(max_len=max_len)
    history = FamiliarityTracker()
    steps: list[TraceStep] = []
    records: list[ResolutionRecord] = []
    assignments: dict[str, str] = {}

    for sentence in doc.sentences:
        slist.current_utt = sentence.id
        if sentence.id in segment_starts:
            slist.clear()
            steps.append(TraceStep(sentence.start, "reset", slist.snapshot()))
        realized: set[str] = set()
        groups_done: set[str] = set()

        for m in doc.markables_in_sentence(sentence.id):
            if is_excluded(m):
                continue
            if is_resolvable(m):
                entity, action = _resolve_pronoun(
                    doc, m, slist, history, forced, records,
                    seg_of[sentence.id], sentence.id)
            else:
                entity = m.chain_id or m.id
                anchor_entity = (assignments.get(m.anchor_id)
                                 if m.anchor_id else None)
                fam = history.classify_realization(m, entity, anchor_entity)
                _upsert(slist, Realization(
                    entity=entity, utt=sentence.id, pos=m.start,
                    familiarity=fam, surface=doc.text(m),
                    agreement=m.agreement, sort=m.sort_tag, markable_id=m.id))
                action = "insert"
            assignments[m.id] = entity
            realized.add(entity)

            group = m.coordination_group
            if group is not None and group not in groups_done:
                groups_done.add(group)
                _upsert(slist, _group_realization(doc, sentence.id, group,
                                                  history))
                realized.add(group)
            steps.append(TraceStep(m.start, action, slist.snapshot()))

        slist.end_of_utterance(realized)
        steps.append(TraceStep(sentence.end, "purge", slist.snapshot()))

    return SListRun(records=records, steps=steps, assignments=assignments,
                    diagnostics=list(history.diagnostics))


def _resolve_pronoun(doc, m, slist, history, forced, records, segment_id,
                     sentence_id):
    def ctx_builder(r: Realization, anaphor=m):
        cand = doc.markable(r.markable_id) if r.markable_id else None
        return context_for(doc, anaphor, candidate_markable=cand,
                           candidate_id=r.entity, agreement=r.agreement,
                           sort=r.sort)

    if m.id in forced:
        entity = forced[m.id]
    else:
        match = slist.resolve(m, ctx_builder)
        entity = match.entity if match is not None else f"new:{m.id}"
    fam = history.classify_realization(m, entity)
    _upsert(slist, Realization(
        entity=entity, utt=sentence_id, pos=m.start, familiarity=fam,
        surface=doc.text(m), agreement=m.agreement, sort=m.sort_tag,
        markable_id=m.id))
    records.append(ResolutionRecord(
        anaphor_id=m.id, system=entity, gold=m.chain_id,
        algorithm="slist", segment_id=segment_id))
    return entity, "resolve"


def _upsert(slist: SList, new: Realization) -> None:
    slist.insert(updated_realization(slist.realization_of(new.entity), new))


def _group_realization(doc, sentence_id, group, history) -> Realization:
    members = [m for m in doc.markables_in_sentence(sentence_id)
               if m.coordination_group == group and not is_excluded(m)]
    start = min(m.start for m in members)
    end = max(m.end for m in members)
    surface = " ".join(t.surface for t in doc.tokens[start:end + 1])
    return Realization(
        entity=group, utt=sentence_id, pos=start,
        familiarity=history.classify_group(group), surface=surface,
        agreement=Agreement(3, "pl", "unknown"), sort=None, markable_id=None)
