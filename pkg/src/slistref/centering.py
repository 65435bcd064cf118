"""Centering baseline: generate-filter-rank resolution over utterances.

Each utterance gets a forward-looking center list (``cf``: realized
entities ranked by grammatical role, then text position), a backward
center (``cb``: the highest-ranked entity of the previous utterance's cf
realized again here) and a transition class.  Pronouns are resolved by
enumerating candidate assignments (previous cf in rank order, then
earlier same-utterance non-pronominal markables in text order), filtering
readings by compatibility, contra-indexing and the pronoun rule — if some
element of the previous cf is realized as a pronoun, the cb must be too —
and ranking the survivors by transition preference.  Readings that tie on
the best transition with different assignments raise the ambiguity flag;
an explicit tie-break (previous-cf salience by default, text recency
optionally) still picks a single answer.

A pronoun with no compatible candidate anywhere in the previous cf or
earlier in its own utterance falls back to scanning older utterances' cf
lists within the segment (most recent first, skipping inaccessible ones);
fallback assignments are pinned before reading generation and never
influence transition ranking.

The utterance inventory comes from a pluggable splitter.  The default
(:func:`split_utterances_bfp`) makes one utterance per sentence, except
that a sentence coordinating two or more main clauses yields one
utterance per main clause.  The clause-level splitter lives in
:mod:`slistref.kameyama`.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field, replace
from enum import IntEnum

from .compatibility import compatible, context_for, co_arguments
from .document import (Agreement, Document, Markable, derive_segments,
                       is_excluded, is_resolvable, markable_sort_key,
                       segment_of_sentence)
from .evaluate import ResolutionRecord

log = logging.getLogger(__name__)

ROLE_RANK = {"subject": 0, "direct_object": 1, "indirect_object": 2, "other": 3}

SEQUENTIAL = "sequential"
EMBEDDED_ACCESSIBLE = "embedded_accessible"
EMBEDDED_INACCESSIBLE = "embedded_inaccessible"

# Hard ceiling on enumerated readings per utterance; documents are
# hand-annotated and small, so hitting this means degenerate annotation.
READING_CAP = 200_000


class Transition(IntEnum):
    """Lower is preferred."""

    CONTINUE = 0
    RETAIN = 1
    SMOOTH_SHIFT = 2
    ROUGH_SHIFT = 3


def classify_transition(cb_i: str | None, cb_prev: str | None,
                        cp_i: str | None) -> Transition | None:
    """Transition grid: keeping the backward center (or establishing the
    first one) continues or retains depending on whether it is also the
    preferred center; changing it shifts smoothly or roughly on the same
    test.  No backward center means no transition."""
    if cb_i is None:
        return None
    if cb_prev is None or cb_i == cb_prev:
        return Transition.CONTINUE if cb_i == cp_i else Transition.RETAIN
    return Transition.SMOOTH_SHIFT if cb_i == cp_i else Transition.ROUGH_SHIFT


@dataclass
class CenteringUtterance:
    """One utterance shell plus, after a run, its centering data.

    ``level``, ``access`` and ``superordinate`` matter only for the
    clause-level splitter; the sentence splitter leaves them at their
    defaults.  ``prev_sources`` lists the utterance indexes whose cf
    lists serve as this utterance's previous cf, most salient first.
    """

    index: int
    sentence_ids: tuple[int, ...]
    clause_ids: tuple[str, ...]
    markable_ids: tuple[str, ...]
    segment_id: int = 0
    level: int = 0
    access: str = SEQUENTIAL
    superordinate: int | None = None
    prev_sources: tuple[int, ...] = ()
    cf: tuple[str, ...] = ()
    cb: str | None = None
    transition: Transition | None = None
    ambiguous: bool = False
    assignments: dict[str, str] = field(default_factory=dict)

    @property
    def cp(self) -> str | None:
        return self.cf[0] if self.cf else None

    def trace_dict(self) -> dict:
        return {
            "utt": self.index,
            "cf": list(self.cf),
            "cb": self.cb,
            "transition": self.transition.name if self.transition is not None else None,
            "ambiguous": self.ambiguous,
            "assignments": dict(self.assignments),
        }


@dataclass(frozen=True)
class PrevContext:
    """The previous-utterance view an utterance resolves against: a merged
    cf (most salient source first) and the cb the transition compares to."""

    cf: tuple[str, ...] = ()
    cb: str | None = None


@dataclass(frozen=True)
class Candidate:
    entity: str
    index: int               # rank in the pronoun's candidate list
    position: int            # text position of the latest realization
    markable_id: str | None  # latest realizing markable
    agreement: Agreement
    sort: str | None
    source: str              # "prev" or "intra"


@dataclass(frozen=True)
class Reading:
    """One complete assignment of the utterance's pronouns, with the
    centering data it induces."""

    assignments: dict[str, str]
    choices: tuple[tuple[str, Candidate], ...]  # unpinned pronoun id, pick
    pronoun_ids: tuple[str, ...]                # all pronouns, text order
    prev_cf: tuple[str, ...]
    cf: tuple[str, ...]
    cb: str | None
    transition: Transition | None


@dataclass
class EntityState:
    """Latest realization bookkeeping per entity across a run."""

    markable_id: str
    sort: str | None = None


@dataclass
class CenteringRun:
    records: list[ResolutionRecord]
    utterances: list[CenteringUtterance]
    assignments: dict[str, str]
    reading_sets: list[list[Reading]]  # surviving readings per utterance
    algorithm: str = "bfp"

    def trace_dicts(self) -> list[dict]:
        return [u.trace_dict() for u in self.utterances]


# ---------------------------------------------------------------------------
# splitting


def split_utterances_bfp(doc: Document, segments=None) -> list[CenteringUtterance]:
    """One utterance per sentence; a sentence with two or more main
    clauses yields one utterance per main clause, subordinate clauses
    joining their nearest main ancestor."""
    if segments is None:
        segments = derive_segments(doc)
    seg_of = segment_of_sentence(segments)
    utterances: list[CenteringUtterance] = []
    for sentence in doc.sentences:
        clauses = [c for c in doc.clauses if c.sentence_id == sentence.id]
        mains = sorted((c for c in clauses if c.clause_class == "main"),
                       key=lambda c: _clause_start(doc, c.id))
        if len(mains) >= 2:
            owner = {c.id: _nearest_main(doc, c, mains) for c in clauses}
            for main in mains:
                members = [c.id for c in clauses if owner[c.id] == main.id]
                utterances.append(_shell(doc, len(utterances), sentence,
                                         members, seg_of))
        else:
            utterances.append(_shell(doc, len(utterances), sentence,
                                     [c.id for c in clauses], seg_of))
    for u in utterances:
        if u.index > 0 and utterances[u.index - 1].segment_id == u.segment_id:
            u.prev_sources = (u.index - 1,)
    return utterances


split_utterances_bfp.algorithm_tag = "bfp"


def _clause_start(doc: Document, clause_id: str) -> int:
    return min(t.index for t in doc.tokens if t.clause_id == clause_id)


def _nearest_main(doc: Document, clause, mains) -> str:
    main_ids = {c.id for c in mains}
    seen = set()
    current = clause
    while current is not None and current.id not in seen:
        if current.id in main_ids:
            return current.id
        seen.add(current.id)
        current = (doc.clause(current.parent_id)
                   if current.parent_id is not None else None)
    # Detached subordinate clause in a coordinated sentence: attach to the
    # last main clause starting at or before it, else the first one.
    start = _clause_start(doc, clause.id)
    best = None
    for c in mains:
        if _clause_start(doc, c.id) <= start:
            best = c
    return (best or mains[0]).id


def _shell(doc, index, sentence, clause_ids, seg_of) -> CenteringUtterance:
    members = set(clause_ids)
    markables = sorted(
        (m for m in doc.markables_in_sentence(sentence.id)
         if doc.tokens[m.start].clause_id in members),
        key=markable_sort_key)
    return CenteringUtterance(
        index=index,
        sentence_ids=(sentence.id,),
        clause_ids=tuple(clause_ids),
        markable_ids=tuple(m.id for m in markables),
        segment_id=seg_of[sentence.id],
    )


# ---------------------------------------------------------------------------
# cf ranking


def rank_cf(realized: list[tuple[Markable, str]]) -> list[str]:
    """Rank the realized entities of one utterance.

    :param realized: (realizing markable, entity) pairs; excluded
        markables must already be filtered out.
    :returns: entity ids sorted by (subject < direct object < indirect
        object < other, then text position), first realization winning
        on duplicates.
    """
    ranked = sorted(realized,
                    key=lambda pair: (ROLE_RANK.get(pair[0].role, 3),
                                      pair[0].start))
    out: list[str] = []
    seen: set[str] = set()
    for _, entity in ranked:
        if entity not in seen:
            seen.add(entity)
            out.append(entity)
    return out


# ---------------------------------------------------------------------------
# generate / filter / rank


def candidate_lists(doc: Document, utterance: CenteringUtterance,
                    pronouns: list[Markable], prev_cf: tuple[str, ...],
                    entity_state: dict[str, EntityState]) -> list[list[Candidate]]:
    """Per-pronoun candidate lists: previous-cf entities in rank order,
    then earlier same-utterance non-pronominal markables in text order.
    An entity present in both keeps its previous-cf rank but takes its
    agreement, binding and recency data from the intra-sentential
    realization (the more recent one)."""
    intra = [m for m in (doc.markable(i) for i in utterance.markable_ids)
             if not is_excluded(m) and not is_resolvable(m)]
    lists: list[list[Candidate]] = []
    for p in pronouns:
        cands: list[Candidate] = []
        where: dict[str, int] = {}
        for entity in prev_cf:
            state = entity_state.get(entity)
            mk = doc.markable(state.markable_id) if state else None
            cands.append(Candidate(
                entity=entity, index=len(cands),
                position=mk.start if mk else -1,
                markable_id=mk.id if mk else None,
                agreement=mk.agreement if mk else Agreement(3, "sg", "unknown"),
                sort=state.sort if state else None,
                source="prev"))
            where[entity] = len(cands) - 1
        for m in intra:
            if m.start >= p.start:
                break
            entity = m.chain_id or m.id
            inherited = entity_state.get(entity)
            sort = m.sort_tag or (inherited.sort if inherited else None)
            if entity in where:
                old = cands[where[entity]]
                cands[where[entity]] = replace(
                    old, position=m.start, markable_id=m.id,
                    agreement=m.agreement, sort=m.sort_tag or old.sort)
            else:
                cands.append(Candidate(
                    entity=entity, index=len(cands), position=m.start,
                    markable_id=m.id, agreement=m.agreement, sort=sort,
                    source="intra"))
                where[entity] = len(cands) - 1
        lists.append(cands)
    return lists


def generate_readings(doc: Document, utterance: CenteringUtterance,
                      prev: PrevContext | None = None,
                      entity_state: dict[str, EntityState] | None = None,
                      pinned: dict[str, str] | None = None,
                      cap: int = READING_CAP) -> list[Reading]:
    """Enumerate every candidate assignment of the utterance's pronouns
    (the cartesian product of the per-pronoun candidate lists) and compute
    each reading's cf, cb and transition.  No filtering happens here.

    :param prev: previous-utterance view (merged cf + cb); omit at
        segment starts.
    :param pinned: pronoun id -> entity assignments fixed in advance
        (fallback resolutions and forced counterfactuals); pinned
        pronouns take no part in the product.
    """
    prev = prev or PrevContext()
    entity_state = entity_state or {}
    pinned = pinned or {}
    members = [doc.markable(i) for i in utterance.markable_ids]
    pronouns = [m for m in members if is_resolvable(m)]
    unpinned = [p for p in pronouns if p.id not in pinned]
    lists = candidate_lists(doc, utterance, unpinned, prev.cf, entity_state)

    fixed_realized = [(m, m.chain_id or m.id) for m in members
                      if not is_excluded(m) and not is_resolvable(m)]
    readings: list[Reading] = []
    for combo in itertools.product(*lists):
        assignments = dict(pinned)
        for p, cand in zip(unpinned, combo):
            assignments[p.id] = cand.entity
        realized = fixed_realized + [(p, assignments[p.id]) for p in pronouns]
        realized.sort(key=lambda pair: markable_sort_key(pair[0]))
        cf = tuple(rank_cf(realized))
        present = {entity for _, entity in realized}
        cb = next((e for e in prev.cf if e in present), None)
        readings.append(Reading(
            assignments=assignments,
            choices=tuple((p.id, cand) for p, cand in zip(unpinned, combo)),
            pronoun_ids=tuple(p.id for p in pronouns),
            prev_cf=prev.cf,
            cf=cf,
            cb=cb,
            transition=classify_transition(cb, prev.cb, cf[0] if cf else None),
        ))
        if len(readings) >= cap:
            log.warning("utterance %d: reading cap (%d) reached; candidate "
                        "space truncated", utterance.index, cap)
            break
    return readings


def filter_readings(doc: Document, readings: list[Reading],
                    compat=compatible, contra: bool = True,
                    rule_one: bool = True) -> list[Reading]:
    """Drop readings violating the per-candidate compatibility test, the
    contra-indexing of co-argument pronouns, or the pronoun rule (a
    previous-cf entity realized as a pronoun forces the cb to be realized
    as a pronoun too)."""
    out = []
    for r in readings:
        if all(compat(_choice_context(doc, pid, cand))
               for pid, cand in r.choices) \
                and not (contra and _contra_indexed(doc, r)) \
                and (not rule_one or _satisfies_rule_one(r)):
            out.append(r)
    return out


def _choice_context(doc, pronoun_id, cand: Candidate):
    pronoun = doc.markable(pronoun_id)
    mk = doc.markable(cand.markable_id) if cand.markable_id else None
    return context_for(doc, pronoun, candidate_markable=mk,
                       candidate_id=cand.entity, agreement=cand.agreement,
                       sort=cand.sort)


def _contra_indexed(doc, r: Reading) -> bool:
    for i, p in enumerate(r.pronoun_ids):
        for q in r.pronoun_ids[i + 1:]:
            if r.assignments[p] == r.assignments[q] \
                    and co_arguments(doc, doc.markable(p), doc.markable(q)):
                return True
    return False


def _satisfies_rule_one(r: Reading) -> bool:
    realized_by_pronoun = {r.assignments[p] for p in r.pronoun_ids}
    if any(e in realized_by_pronoun for e in r.prev_cf):
        return r.cb is not None and r.cb in realized_by_pronoun
    return True


def _order_key(r: Reading, tie_break: str):
    transition = 1 + Transition.ROUGH_SHIFT if r.transition is None \
        else int(r.transition)
    if tie_break == "recency":
        return (transition, tuple(-cand.position for _, cand in r.choices))
    return (transition, tuple(cand.index for _, cand in r.choices))


def rank_readings(readings: list[Reading], tie_break: str = "salience"
                  ) -> tuple[Reading, bool, list[Reading]]:
    """Order readings by transition preference and return the best one,
    whether the top transition is shared by materially different readings
    (the ambiguity flag), and all readings tied on the top transition.

    The tie-break picks a single answer anyway: ``salience`` prefers
    candidates ranked higher in the previous cf, ``recency`` prefers the
    textually latest realization.
    """
    if not readings:
        raise ValueError("rank_readings needs at least one reading")
    if tie_break not in ("salience", "recency"):
        raise ValueError(f"unknown tie_break {tie_break!r}")
    ranked = sorted(readings, key=lambda r: _order_key(r, tie_break))
    best = ranked[0]
    tied = [r for r in ranked if r.transition == best.transition]
    distinct = {tuple(sorted(r.assignments.items())) for r in tied}
    return best, len(distinct) > 1, tied


# ---------------------------------------------------------------------------
# the run


def run_bfp(doc: Document, splitter=split_utterances_bfp, segments=None,
            tie_break: str = "salience",
            forced: dict[str, str] | None = None) -> CenteringRun:
    """Run the centering engine over one document.

    :param splitter: utterance splitter; the default is sentence-grained,
        :func:`slistref.kameyama.split_utterances_kameyama` is
        clause-grained.  A splitter may return either the utterance list
        or an (utterances, predecessor map) pair.
    :param tie_break: how to pick one answer among equally ranked
        readings ("salience" or "recency"); the ambiguity flag is raised
        either way.
    :param forced: anaphor id -> entity overrides for counterfactual
        re-runs.
    """
    if segments is None:
        segments = derive_segments(doc)
    forced = forced or {}
    split = splitter(doc, segments)
    utterances = split[0] if isinstance(split, tuple) else split
    algorithm = getattr(splitter, "algorithm_tag", "bfp")

    records: list[ResolutionRecord] = []
    assignments: dict[str, str] = {}
    reading_sets: list[list[Reading]] = []
    entity_state: dict[str, EntityState] = {}

    for u in utterances:
        prev = _prev_context(utterances, u)
        members = [doc.markable(i) for i in u.markable_ids]
        pronouns = [m for m in members if is_resolvable(m)]

        pinned = {p.id: forced[p.id] for p in pronouns if p.id in forced}
        fallback_depth: dict[str, int | None] = {}
        free = [p for p in pronouns if p.id not in pinned]
        for p, cands in zip(free, candidate_lists(doc, u, free, prev.cf,
                                                  entity_state)):
            if not any(compatible(_choice_context(doc, p.id, c))
                       for c in cands):
                entity, depth = _fallback_scan(doc, utterances, u, p,
                                               entity_state)
                pinned[p.id] = entity
                fallback_depth[p.id] = depth

        readings = generate_readings(doc, u, prev, entity_state, pinned)
        surviving = filter_readings(doc, readings)
        if not surviving:
            surviving = filter_readings(doc, readings, rule_one=False)
            if surviving:
                log.info("utterance %d: pronoun rule filtered out every "
                         "reading; relaxed", u.index)
        if not surviving:
            surviving = filter_readings(doc, readings, rule_one=False,
                                        contra=False)
            if surviving:
                log.warning("utterance %d: contra-indexing filtered out "
                            "every reading; relaxed", u.index)
        if not surviving:
            surviving = readings

        best, ambiguous, tied = rank_readings(surviving, tie_break)
        ties_per_pronoun = _ties_per_pronoun(tied, tie_break)

        u.cf = best.cf
        u.cb = best.cb
        u.transition = best.transition
        u.ambiguous = ambiguous
        u.assignments = {p.id: best.assignments[p.id] for p in pronouns}
        reading_sets.append(sorted(surviving,
                                   key=lambda r: _order_key(r, tie_break)))

        for m in members:
            if is_excluded(m):
                continue
            entity = best.assignments[m.id] if is_resolvable(m) \
                else (m.chain_id or m.id)
            assignments[m.id] = entity
            state = entity_state.get(entity)
            entity_state[entity] = EntityState(
                markable_id=m.id,
                sort=m.sort_tag or (state.sort if state else None))
        for p in pronouns:
            ties = ties_per_pronoun.get(p.id, ())
            records.append(ResolutionRecord(
                anaphor_id=p.id,
                system=best.assignments[p.id],
                gold=p.chain_id,
                algorithm=algorithm,
                segment_id=u.segment_id,
                ambiguous=len(ties) > 1,
                ties=ties,
                fallback_depth=fallback_depth.get(p.id),
            ))

    return CenteringRun(records=records, utterances=utterances,
                        assignments=assignments, reading_sets=reading_sets,
                        algorithm=algorithm)


def _prev_context(utterances, u: CenteringUtterance) -> PrevContext:
    cf: list[str] = []
    seen: set[str] = set()
    for j in u.prev_sources:
        for entity in utterances[j].cf:
            if entity not in seen:
                seen.add(entity)
                cf.append(entity)
    cb_prev = utterances[u.prev_sources[0]].cb if u.prev_sources else None
    return PrevContext(cf=tuple(cf), cb=cb_prev)


def _fallback_scan(doc, utterances, u, pronoun, entity_state):
    """Step beyond the previous utterance: test older cf lists within the
    segment, most recent first, skipping inaccessible utterances."""
    for j in range(u.index - 1, -1, -1):
        v = utterances[j]
        if v.segment_id != u.segment_id:
            break
        if j in u.prev_sources or v.access == EMBEDDED_INACCESSIBLE:
            continue
        for entity in v.cf:
            state = entity_state.get(entity)
            if state is None:
                continue
            mk = doc.markable(state.markable_id)
            ctx = context_for(doc, pronoun, candidate_markable=mk,
                              candidate_id=entity, agreement=mk.agreement,
                              sort=state.sort)
            if compatible(ctx):
                log.debug("pronoun %s: fallback to cf of utterance %d",
                          pronoun.id, j)
                return entity, u.index - j
    return f"new:{pronoun.id}", None


def _ties_per_pronoun(tied: list[Reading], tie_break: str) -> dict[str, tuple[str, ...]]:
    ordered = sorted(tied, key=lambda r: _order_key(r, tie_break))
    out: dict[str, list[str]] = {}
    for r in ordered:
        for pid, entity in r.assignments.items():
            bucket = out.setdefault(pid, [])
            if entity not in bucket:
                bucket.append(entity)
    return {pid: tuple(entities) for pid, entities in out.items()}
