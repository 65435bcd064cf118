"""Scoring against gold chains and the wrong-resolution taxonomy.

A resolution is correct iff the system entity equals the gold chain id.
Wrong resolutions are routed into exactly one category, checked in fixed
priority order:

``ambiguous``
    the engine flagged a tie between top-ranked readings and the gold
    antecedent was among the tied answers (centering engines only; the
    salience-list engine never produces ties);
``chain``
    a counterfactual re-run with every earlier same-segment pronoun forced
    to its gold antecedent resolves this pronoun correctly — the error is
    downstream fallout of an earlier one;
``split_antecedent`` / ``event_anaphora`` / ``segment_boundary``
    jointly the "other" bucket: plural reference to split antecedents and
    event reference are gold-side annotations (``flags.split`` /
    ``flags.event``); the boundary case is detected from the gold chain
    having prior realizations only in earlier segments;
``intra``
    centering engines only: the gold antecedent's nearest prior
    realization sits in the anaphor's own sentence, which the
    sentence-grained strategy handles poorly;
``strategic``
    everything else — the engine's ranking simply preferred the wrong
    candidate.  Intra-sentential misses of the salience-list engine land
    here by design.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, fields

from .document import (Document, Markable, ValidationError, derive_segments,
                       segment_of_sentence)

log = logging.getLogger(__name__)

STRATEGIC = "strategic"
AMBIGUOUS = "ambiguous"
INTRA = "intra"
CHAIN = "chain"
SPLIT_ANTECEDENT = "split_antecedent"
SEGMENT_BOUNDARY = "segment_boundary"
EVENT_ANAPHORA = "event_anaphora"

CATEGORIES = (STRATEGIC, AMBIGUOUS, INTRA, CHAIN, SPLIT_ANTECEDENT,
              SEGMENT_BOUNDARY, EVENT_ANAPHORA)
OTHER_CATEGORIES = (SPLIT_ANTECEDENT, SEGMENT_BOUNDARY, EVENT_ANAPHORA)

# Engines whose sentence-grained candidate structure warrants the intra
# category; the salience-list engine counts those misses as strategic.
CENTERING_ALGORITHMS = frozenset({"bfp", "bfp-kameyama"})


@dataclass(frozen=True)
class ResolutionRecord:
    """One pronoun-like markable's outcome under one engine run."""

    anaphor_id: str
    system: str | None
    gold: str | None
    algorithm: str
    segment_id: int = 0
    ambiguous: bool = False
    ties: tuple[str, ...] = ()
    fallback_depth: int | None = None

    @property
    def correct(self) -> bool:
        return self.gold is not None and self.system == self.gold


@dataclass
class ScoreTable:
    total: int = 0
    correct: int = 0
    wrong: int = 0
    wrong_strategic: int = 0
    wrong_ambiguous: int = 0
    wrong_intra: int = 0
    wrong_chain: int = 0
    wrong_split_antecedent: int = 0
    wrong_segment_boundary: int = 0
    wrong_event_anaphora: int = 0

    @property
    def wrong_other(self) -> int:
        return (self.wrong_split_antecedent + self.wrong_segment_boundary
                + self.wrong_event_anaphora)

    def __add__(self, other: "ScoreTable") -> "ScoreTable":
        return ScoreTable(**{f.name: getattr(self, f.name) + getattr(other, f.name)
                             for f in fields(self)})

    def check(self) -> "ScoreTable":
        """Raise unless the counts partition: correct + wrong = total and
        the categories sum to wrong."""
        if self.correct + self.wrong != self.total:
            raise ValueError(f"correct {self.correct} + wrong {self.wrong} "
                             f"!= total {self.total}")
        by_category = (self.wrong_strategic + self.wrong_ambiguous
                       + self.wrong_intra + self.wrong_chain + self.wrong_other)
        if by_category != self.wrong:
            raise ValueError(f"category sum {by_category} != wrong {self.wrong}")
        return self

    def as_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["wrong_other"] = self.wrong_other
        return out


_CATEGORY_FIELD = {
    STRATEGIC: "wrong_strategic",
    AMBIGUOUS: "wrong_ambiguous",
    INTRA: "wrong_intra",
    CHAIN: "wrong_chain",
    SPLIT_ANTECEDENT: "wrong_split_antecedent",
    SEGMENT_BOUNDARY: "wrong_segment_boundary",
    EVENT_ANAPHORA: "wrong_event_anaphora",
}


def classify_errors(records: list[ResolutionRecord], doc: Document,
                    rerun=None, segments=None) -> dict[str, str]:
    """Category per wrong record, keyed by anaphor id.

    :param rerun: ``rerun(forced: dict) -> list[ResolutionRecord]`` — the
        engine re-run with the given anaphors forced to the given
        entities.  Without it the chain category cannot be detected and
        such errors fall through to later categories.
    :param segments: the segments the run used; derived afresh when
        omitted.
    """
    if segments is None:
        segments = derive_segments(doc)
    seg_of = segment_of_sentence(segments)
    out: dict[str, str] = {}
    for idx, rec in enumerate(records):
        if rec.correct:
            continue
        out[rec.anaphor_id] = _classify_one(records, idx, doc, rerun, seg_of)
    return out


def _classify_one(records, idx, doc, rerun, seg_of) -> str:
    rec = records[idx]
    if rec.ambiguous and rec.gold is not None and rec.gold in rec.ties:
        return AMBIGUOUS
    if rerun is not None and _chain_error(records, idx, rerun):
        return CHAIN
    m = doc.markable(rec.anaphor_id)
    if m.split_antecedent:
        return SPLIT_ANTECEDENT
    if m.event_anaphor:
        return EVENT_ANAPHORA
    if rec.gold is not None and _beyond_segment_boundary(doc, m, rec.gold, seg_of):
        return SEGMENT_BOUNDARY
    if rec.algorithm in CENTERING_ALGORITHMS and rec.gold is not None \
            and _gold_is_intra(doc, m, rec.gold):
        return INTRA
    return STRATEGIC


def _chain_error(records, idx, rerun) -> bool:
    rec = records[idx]
    forced = {r.anaphor_id: r.gold for r in records[:idx]
              if r.segment_id == rec.segment_id and r.gold is not None}
    if not forced:
        return False
    for r in rerun(forced):
        if r.anaphor_id == rec.anaphor_id:
            return r.correct
    return False


def _prior_gold_realizations(doc: Document, m: Markable, gold: str):
    return [doc.markable(i) for i in doc.chains.get(gold, ())
            if doc.markable(i).start < m.start]


def _beyond_segment_boundary(doc, m, gold, seg_of) -> bool:
    """All prior realizations of the gold chain lie in earlier segments."""
    prior = _prior_gold_realizations(doc, m, gold)
    if not prior:
        return False
    seg = seg_of.get(doc.sentence_of(m))
    return all(seg_of.get(doc.sentence_of(x)) != seg for x in prior)


def _gold_is_intra(doc, m, gold) -> bool:
    prior = _prior_gold_realizations(doc, m, gold)
    if not prior:
        return False
    nearest = max(prior, key=lambda x: x.start)
    return doc.sentence_of(nearest) == doc.sentence_of(m)


def score(records: list[ResolutionRecord], doc: Document,
          categories: dict[str, str] | None = None,
          ambig_mode: str = "lenient", rerun=None,
          segments=None) -> ScoreTable:
    """Aggregate one run into a :class:`ScoreTable`.

    ``ambig_mode="lenient"`` (default) counts a flagged tie as wrong only
    when the final answer is wrong; ``"strict"`` also moves answers that
    happened to pick gold out of a tie into the ambiguous column.
    """
    if ambig_mode not in ("lenient", "strict"):
        raise ValueError(f"unknown ambig_mode {ambig_mode!r}")
    if categories is None:
        categories = classify_errors(records, doc, rerun=rerun,
                                     segments=segments)
    table = ScoreTable()
    for rec in records:
        try:
            doc.markable(rec.anaphor_id)
        except KeyError:
            raise ValidationError(
                [f"record references unknown markable {rec.anaphor_id!r}"])
        table.total += 1
        if rec.correct and not (ambig_mode == "strict" and rec.ambiguous
                                and len(set(rec.ties)) > 1):
            table.correct += 1
            continue
        table.wrong += 1
        if rec.correct:
            category = AMBIGUOUS
        else:
            category = categories.get(rec.anaphor_id, STRATEGIC)
        setattr(table, _CATEGORY_FIELD[category],
                getattr(table, _CATEGORY_FIELD[category]) + 1)
    return table.check()
