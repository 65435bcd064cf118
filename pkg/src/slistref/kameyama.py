"""Clause-grained utterance splitting for the centering engine.

Tensed clauses are utterances of their own; untensed clauses merge into
the utterance of their nearest tensed ancestor.  Three clause classes
shape the context each utterance resolves against:

* reported speech is embedded and *inaccessible*: its pronouns never see
  the superordinate's cf, and a following quoted clause chains off the
  previous quoted sibling only;
* complement clauses (other than reports) and relative clauses are
  embedded but *accessible*: they resolve against their superordinate's
  cf, and when the superordinate's chain continues, their entities are
  consulted after (less salient than) the superordinate's own;
* all other tensed clauses chain *sequentially* on their level: the
  predecessor is the latest same-level utterance of the segment, with the
  accessible embedded utterances opened since then appended after it.

The function returns the utterance shells plus the predecessor map
(utterance index -> cf source indexes, most salient first) and plugs into
:func:`slistref.centering.run_bfp` as the ``splitter`` argument.
"""

from __future__ import annotations

import logging

from .centering import (CenteringUtterance, EMBEDDED_ACCESSIBLE,
                        EMBEDDED_INACCESSIBLE, SEQUENTIAL)
from .document import Document, derive_segments, markable_sort_key, \
    segment_of_sentence

log = logging.getLogger(__name__)

ClauseUtterance = CenteringUtterance

_ACCESS_BY_CLASS = {
    "reported_speech": EMBEDDED_INACCESSIBLE,
    "non_report_complement": EMBEDDED_ACCESSIBLE,
    "relative": EMBEDDED_ACCESSIBLE,
    "main": SEQUENTIAL,
    "other_tensed": SEQUENTIAL,
}


def split_utterances_kameyama(doc: Document, segments=None
                              ) -> tuple[list[CenteringUtterance], dict[int, tuple[int, ...]]]:
    """Build clause-level utterances and their predecessor map."""
    if segments is None:
        segments = derive_segments(doc)
    seg_of = segment_of_sentence(segments)

    host = _tensed_hosts(doc)
    order = sorted({c.id for c in doc.clauses if c.tensed},
                   key=lambda cid: (doc.clause(cid).sentence_id,
                                    _clause_start(doc, cid)))
    index_of = {cid: i for i, cid in enumerate(order)}

    utterances: list[CenteringUtterance] = []
    for i, cid in enumerate(order):
        clause = doc.clause(cid)
        members = tuple(c for c in order_members(doc, host, cid))
        markables = sorted(
            (m for m in doc.markables_in_sentence(clause.sentence_id)
             if host[doc.tokens[m.start].clause_id] == cid),
            key=markable_sort_key)
        access = _ACCESS_BY_CLASS.get(clause.clause_class, SEQUENTIAL)
        parent_utt = None
        if clause.parent_id is not None:
            parent_utt = index_of.get(host[clause.parent_id])
        utterances.append(CenteringUtterance(
            index=i,
            sentence_ids=(clause.sentence_id,),
            clause_ids=members,
            markable_ids=tuple(m.id for m in markables),
            segment_id=seg_of[clause.sentence_id],
            access=access,
            superordinate=parent_utt if access != SEQUENTIAL else None,
        ))

    for u in utterances:
        clause = doc.clause(order[u.index])
        if u.access == SEQUENTIAL:
            parent_utt = (index_of.get(host[clause.parent_id])
                          if clause.parent_id is not None else None)
            u.level = utterances[parent_utt].level if parent_utt is not None else 0
        else:
            u.level = utterances[u.superordinate].level + 1

    for u in utterances:
        u.prev_sources = _predecessors(utterances, u)

    predecessor_map = {u.index: u.prev_sources for u in utterances}
    return utterances, predecessor_map


split_utterances_kameyama.algorithm_tag = "bfp-kameyama"


def _clause_start(doc: Document, clause_id: str) -> int:
    return min(t.index for t in doc.tokens if t.clause_id == clause_id)


def _tensed_hosts(doc: Document) -> dict[str, str]:
    """Map every clause to the tensed clause whose utterance absorbs it:
    itself when tensed, else the nearest tensed ancestor."""
    host: dict[str, str] = {}

    def resolve(cid: str, trail=()):
        if cid in host:
            return host[cid]
        clause = doc.clause(cid)
        if clause.tensed:
            host[cid] = cid
        else:
            if clause.parent_id is None or cid in trail:
                raise ValueError(f"untensed clause {cid!r} has no tensed ancestor")
            host[cid] = resolve(clause.parent_id, trail + (cid,))
        return host[cid]

    for c in doc.clauses:
        resolve(c.id)
    return host


def order_members(doc: Document, host: dict[str, str], cid: str) -> list[str]:
    members = [c.id for c in doc.clauses if host[c.id] == cid]
    return sorted(members, key=lambda x: _clause_start(doc, x))


def _predecessors(utterances, u: CenteringUtterance) -> tuple[int, ...]:
    if u.access == EMBEDDED_ACCESSIBLE:
        if u.superordinate is not None \
                and utterances[u.superordinate].segment_id == u.segment_id:
            return (u.superordinate,)
        return ()
    if u.access == EMBEDDED_INACCESSIBLE:
        for j in range(u.index - 1, -1, -1):
            v = utterances[j]
            if v.segment_id != u.segment_id:
                break
            if v.access == EMBEDDED_INACCESSIBLE \
                    and v.superordinate == u.superordinate:
                return (j,)
        return ()
    # sequential: hierarchical return to the latest same-level utterance,
    # with the accessible embedded material opened since then appended
    # after it (less salient).
    for j in range(u.index - 1, -1, -1):
        v = utterances[j]
        if v.segment_id != u.segment_id:
            break
        if v.access == EMBEDDED_INACCESSIBLE or v.level != u.level:
            continue
        sources = [j]
        sources.extend(k for k in range(j + 1, u.index)
                       if _accessible_descendant(utterances, k, j))
        return tuple(sources)
    return ()


def _accessible_descendant(utterances, k: int, ancestor: int) -> bool:
    v = utterances[k]
    while v.access == EMBEDDED_ACCESSIBLE and v.superordinate is not None:
        if v.superordinate == ancestor:
            return True
        v = utterances[v.superordinate]
    return False
