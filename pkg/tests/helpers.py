"""Builders shared across the test modules.

``payload``/``make_doc`` assemble small documents from sentence strings
(one main clause per sentence); ``random_document`` produces arbitrary
valid annotated documents for the property tests.
"""
from __future__ import annotations

import json
import pathlib
import random

from slistref import Document, load_document

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

PRONOUN_FORMS = ("personal_pronoun", "possessive_pronoun")
NOUN_FORMS = ("definite_np", "indefinite_np", "proper_name", "title")


def fixture_doc(name: str) -> Document:
    from slistref import load_document_file
    return load_document_file(FIXTURES / f"{name}.json")


def mark(mid, start, end, form="definite_np", p=3, n="sg", g="neut",
         role="other", chain=None, **extra):
    """One markable entry in the JSON field vocabulary."""
    entry = {"id": mid, "span": [start, end], "form": form,
             "agr": {"p": p, "n": n, "g": g}, "role": role, "chain": chain}
    entry.update(extra)
    return entry


def payload(sentences, markables, doc_id="doc", group="constructed"):
    """Document payload from (paragraph, text) sentence pairs.

    Sentence ``i`` becomes the single main clause ``c{i}``; markable spans
    use absolute token indexes.
    """
    tokens = []
    clauses = []
    for sent_id, (para, text) in enumerate(sentences):
        cid = f"c{sent_id}"
        clauses.append({"id": cid, "sent": sent_id, "tensed": True,
                        "class": "main", "parent": None})
        for word in text.split():
            tokens.append({"i": len(tokens), "w": word, "sent": sent_id,
                           "clause": cid, "para": para})
    return {"id": doc_id, "group": group, "tokens": tokens,
            "clauses": clauses, "markables": markables}


def make_doc(sentences, markables, doc_id="doc", group="constructed"):
    return load_document(json.dumps(payload(sentences, markables,
                                            doc_id=doc_id, group=group)))


def random_document(rng: random.Random, max_sentences: int = 5) -> Document:
    """A small random—but valid—document exercising mentions, pronouns,
    re-mentions, coordination, anchors and excluded markables."""
    n_sent = rng.randint(1, max_sentences)
    sentences = []
    markables = []
    chains = []
    para = 0
    base = 0
    for sent_id in range(n_sent):
        if sent_id and rng.random() < 0.3:
            para += 1
        n_tok = rng.randint(3, 8)
        sentences.append((para, " ".join(f"w{base + k}"
                                         for k in range(n_tok))))
        free = list(range(base, base + n_tok))
        picked = []
        for _ in range(rng.randint(0, 3)):
            if not free:
                break
            start = rng.choice(free)
            end = start + 1 if (start + 1 in free and rng.random() < 0.3) \
                else start
            for k in (start, end):
                if k in free:
                    free.remove(k)
            picked.append((start, end))
        picked.sort()
        group_id = None
        nouns_here = []
        for start, end in picked:
            mid = f"m{len(markables)}"
            pronoun = bool(chains) and rng.random() < 0.35
            if pronoun:
                form = rng.choice(PRONOUN_FORMS + ("ellipsis",))
                extra = {}
                if form == "ellipsis" and rng.random() < 0.3:
                    extra["sel_sort"] = "person"
                markables.append(mark(
                    mid, start, end if form != "ellipsis" else start,
                    form=form, p=3, n=rng.choice(("sg", "pl")),
                    g=rng.choice(("masc", "fem", "neut", "unknown")),
                    role=rng.choice(("subject", "direct_object", "other")),
                    chain=rng.choice(chains), **extra))
                continue
            form = rng.choice(NOUN_FORMS)
            if rng.random() < 0.05:
                flags = {"pred": True} if form != "personal_pronoun" \
                    else {"pleo": True}
                markables.append(mark(mid, start, end, form=form,
                                      role="other", chain=None, flags=flags))
                continue
            if chains and rng.random() < 0.4:
                chain = rng.choice(chains)
            else:
                chain = f"e{len(chains)}"
                chains.append(chain)
            extra = {}
            if rng.random() < 0.2:
                extra["sort"] = rng.choice(("person", "thing"))
            earlier = [m for m in markables
                       if m.get("chain") and m["span"][1] < start]
            if earlier and rng.random() < 0.1:
                extra["anchor"] = rng.choice(earlier)["id"]
            entry = mark(mid, start, end, form=form,
                         p=3, n=rng.choice(("sg", "pl")),
                         g=rng.choice(("masc", "fem", "neut", "unknown")),
                         role=rng.choice(("subject", "direct_object",
                                          "indirect_object", "other")),
                         chain=chain, **extra)
            markables.append(entry)
            nouns_here.append(entry)
        if len(nouns_here) >= 2 and rng.random() < 0.25:
            group_id = f"g{sent_id}"
            for entry in nouns_here[:2]:
                entry["coord"] = group_id
        base += n_tok
    return make_doc(sentences, markables,
                    doc_id=f"rand{rng.randint(0, 10**6)}")


def realized_entities(doc: Document, sentence_id: int,
                      assignments: dict[str, str]) -> set[str]:
    """Independent account of which entities a sentence realizes under a
    given resolution: the oracle for the retention invariant."""
    from slistref import is_excluded, is_resolvable
    out = set()
    for m in doc.markables_in_sentence(sentence_id):
        if is_excluded(m):
            continue
        if is_resolvable(m):
            out.add(assignments[m.id])
        else:
            out.add(m.chain_id)
        if m.coordination_group:
            out.add(m.coordination_group)
    return out
