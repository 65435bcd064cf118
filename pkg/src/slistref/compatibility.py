"""Anaphor/candidate compatibility: agreement, binding, selectional sorts.

Every resolver — the salience-list engine and both centering variants —
funnels candidate tests through :func:`compatible` so that the three
filters stay identical across algorithms:

* agreement: person and number must match exactly; gender matches when
  equal or when either side is ``unknown``;
* binding: a personal pronoun must not corefer with a co-argument of its
  own clause (possessives, relative pronouns and ellipses are exempt);
* selectional sort: when the anaphor carries a ``sel_sort`` restriction,
  the candidate's ``sort`` must equal it (no restriction means the test
  is vacuously true).
"""

from __future__ import annotations

from dataclasses import dataclass

from .document import Agreement, Document, Markable

# Roles that count as arguments of a clause for binding purposes.
ARGUMENT_ROLES = frozenset({"subject", "direct_object", "indirect_object"})


@dataclass(frozen=True)
class CandidateContext:
    """Everything :func:`compatible` needs to know about one candidate.

    ``candidate_id`` is the entity (or markable) the anaphor would be
    resolved to; ``same_clause`` and ``co_arguments`` describe the
    syntactic relation between the anaphor and the candidate's most
    recent realization, when there is one in the same sentence.
    """

    anaphor: Markable
    candidate_id: str
    candidate_agreement: Agreement
    candidate_sort: str | None = None
    same_clause: bool = False
    co_arguments: bool = False


def agreement_match(a: Agreement, b: Agreement) -> bool:
    if a.person != b.person or a.number != b.number:
        return False
    return a.gender == b.gender or "unknown" in (a.gender, b.gender)


def binding_permits(ctx: CandidateContext) -> bool:
    """Coreference between co-arguments of one clause is out for personal
    pronouns ("Tom saw him": him != Tom).  All other anaphor forms are
    exempt ("Tom lost his keys" is fine)."""
    if ctx.anaphor.np_form != "personal_pronoun":
        return True
    return not ctx.co_arguments


def sort_permits(ctx: CandidateContext) -> bool:
    if ctx.anaphor.selectional_sort is None:
        return True
    return ctx.candidate_sort == ctx.anaphor.selectional_sort


def compatible(ctx: CandidateContext) -> bool:
    return (agreement_match(ctx.anaphor.agreement, ctx.candidate_agreement)
            and binding_permits(ctx)
            and sort_permits(ctx))


def co_arguments(doc: Document, a: Markable, b: Markable) -> bool:
    """Two markables are co-arguments when they sit in the same clause
    (judged by each one's first token) and both fill argument roles."""
    if doc.tokens[a.start].clause_id != doc.tokens[b.start].clause_id:
        return False
    return a.role in ARGUMENT_ROLES and b.role in ARGUMENT_ROLES


def context_for(doc: Document, anaphor: Markable,
                candidate_markable: Markable | None = None,
                candidate_id: str | None = None,
                agreement: Agreement | None = None,
                sort: str | None = None) -> CandidateContext:
    """Build a :class:`CandidateContext`.

    When ``candidate_markable`` is given, the syntactic relation and any
    missing agreement/sort default from it; otherwise the candidate is an
    abstract entity known only through ``agreement`` and ``sort``.
    """
    same = False
    co_args = False
    if candidate_markable is not None:
        if candidate_id is None:
            candidate_id = candidate_markable.chain_id or candidate_markable.id
        if agreement is None:
            agreement = candidate_markable.agreement
        if sort is None:
            sort = candidate_markable.sort_tag
        same = (doc.tokens[anaphor.start].clause_id
                == doc.tokens[candidate_markable.start].clause_id)
        co_args = co_arguments(doc, anaphor, candidate_markable)
    if candidate_id is None or agreement is None:
        raise ValueError("candidate needs a markable or explicit id+agreement")
    return CandidateContext(
        anaphor=anaphor,
        candidate_id=candidate_id,
        candidate_agreement=agreement,
        candidate_sort=sort,
        same_clause=same,
        co_arguments=co_args,
    )
