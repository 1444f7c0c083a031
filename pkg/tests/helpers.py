"""Hand-annotated fixtures and random generators shared by the tests.

Parses here are written by hand in a UD-flavoured scheme; every template
records its tokens, tree, and mentions explicitly so tests can reason
about expected paths and modifiers without running any parser.
"""

from __future__ import annotations

import random
from typing import Optional, Sequence

from deerkg.corpus import (
    AnnotatedSentence,
    DependencyEdge,
    EntityMention,
    ROOT,
    Token,
    make_sentence,
)
from deerkg.graph import ScoredRecord

# (entity_id, display name, types)
ENTITIES = {
    "chloroquine": ("CHEM:chloroquine", "Chloroquine", {"Chemical"}),
    "hcq": ("CHEM:hcq", "Hydroxychloroquine", {"Chemical"}),
    "remdesivir": ("CHEM:remdesivir", "Remdesivir", {"Chemical"}),
    "metformin": ("CHEM:metformin", "Metformin", {"Chemical"}),
    "malaria": ("DIS:malaria", "Malaria", {"Disease or Syndrome"}),
    "covid": ("DIS:covid", "COVID-19", {"Disease or Syndrome"}),
    "pneumonia": ("DIS:pneumonia", "Pneumonia", {"Disease or Syndrome"}),
    "diabetes": ("DIS:diabetes", "Diabetes", {"Disease or Syndrome"}),
    "fever": ("SYM:fever", "Fever", {"Sign or Symptom"}),
    "sars2": ("VIR:sars2", "SARS-CoV-2", {"Virus"}),
    "ace2": ("GENE:ace2", "ACE2", {"Gene"}),
    "vaccine": ("PHSU:vaccine", "Vaccines", {"Pharmacologic Substance"}),
}


def mention(key: str, start: int, end: int) -> EntityMention:
    eid, name, types = ENTITIES[key]
    return EntityMention(
        start=start,
        end=end,
        entity_id=eid,
        entity_name=name,
        types=frozenset(types),
        ontology_links=frozenset({("MESH", eid.split(":", 1)[1])}),
    )


def sent(
    sid: str,
    doc: str,
    words: Sequence[tuple[str, str, str]],  # (text, lemma, pos)
    deps: Sequence[tuple[int, str]],  # per token: (head index or ROOT, label)
    mentions: Sequence[EntityMention],
) -> AnnotatedSentence:
    tokens = [Token(i, w[0], w[1], w[2]) for i, w in enumerate(words)]
    edges = [
        DependencyEdge(head=h, dependent=i, label=lbl)
        for i, (h, lbl) in enumerate(deps)
    ]
    text = " ".join(w[0] for w in words)
    return make_sentence(sid, doc, text, tokens, edges, mentions)


# -- sentence templates ------------------------------------------------


def svo(sid, doc, subj_key, verb, verb_lemma, obj_key):
    """"{Subj} {verb} {Obj} ." """
    _, sname, _ = ENTITIES[subj_key]
    _, oname, _ = ENTITIES[obj_key]
    return sent(
        sid,
        doc,
        [
            (sname, sname.lower(), "PROPN"),
            (verb, verb_lemma, "VERB"),
            (oname, oname.lower(), "PROPN"),
            (".", ".", "PUNCT"),
        ],
        [(1, "nsubj"), (ROOT, "root"), (1, "obj"), (1, "punct")],
        [mention(subj_key, 0, 1), mention(obj_key, 2, 3)],
    )


def copular_treatment(sid, doc, subj_key, adj, adj_lemma, obj_key, obj_adj=None):
    """"{Subj} is a {adj} treatment for [{obj_adj}] {Obj} ."

    Copular frame in the attr/prep/pobj scheme: "treatment" is the
    attribute of "is", the tail entity hangs off "for" as pobj.
    """
    _, sname, _ = ENTITIES[subj_key]
    _, oname, _ = ENTITIES[obj_key]
    words = [
        (sname, sname.lower(), "PROPN"),
        ("is", "be", "AUX"),
        ("a", "a", "DET"),
        (adj, adj_lemma, "ADJ"),
        ("treatment", "treatment", "NOUN"),
        ("for", "for", "ADP"),
    ]
    deps = [(1, "nsubj"), (ROOT, "root"), (4, "det"), (4, "amod"), (1, "attr"), (4, "prep")]
    if obj_adj:
        words.append((obj_adj, obj_adj.lower(), "ADJ"))
        obj_idx = len(words)
        deps.append((obj_idx, "amod"))
        words.append((oname, oname.lower(), "PROPN"))
        deps.append((5, "pobj"))
        m = mention(obj_key, obj_idx - 1, obj_idx + 1)  # span covers adj + name
    else:
        obj_idx = len(words)
        words.append((oname, oname.lower(), "PROPN"))
        deps.append((5, "pobj"))
        m = mention(obj_key, obj_idx, obj_idx + 1)
    words.append((".", ".", "PUNCT"))
    deps.append((1, "punct"))
    return sent(sid, doc, words, deps, [mention(subj_key, 0, 1), m])


def passive(sid, doc, subj_key, verb, verb_lemma, agent_key):
    """"{Subj} is {verb} by {Agent} ." """
    _, sname, _ = ENTITIES[subj_key]
    _, aname, _ = ENTITIES[agent_key]
    return sent(
        sid,
        doc,
        [
            (sname, sname.lower(), "PROPN"),
            ("is", "be", "AUX"),
            (verb, verb_lemma, "VERB"),
            ("by", "by", "ADP"),
            (aname, aname.lower(), "PROPN"),
            (".", ".", "PUNCT"),
        ],
        [(2, "nsubjpass"), (2, "auxpass"), (ROOT, "root"), (2, "agent"), (3, "pobj"), (2, "punct")],
        [mention(subj_key, 0, 1), mention(agent_key, 4, 5)],
    )


def relclause(sid, doc, subj_key, obj_key):
    """"{Subj} inhibits the protein that regulates {Obj} ." """
    _, sname, _ = ENTITIES[subj_key]
    _, oname, _ = ENTITIES[obj_key]
    return sent(
        sid,
        doc,
        [
            (sname, sname.lower(), "PROPN"),
            ("inhibits", "inhibit", "VERB"),
            ("the", "the", "DET"),
            ("protein", "protein", "NOUN"),
            ("that", "that", "PRON"),
            ("regulates", "regulate", "VERB"),
            (oname, oname.lower(), "PROPN"),
            (".", ".", "PUNCT"),
        ],
        [
            (1, "nsubj"),
            (ROOT, "root"),
            (3, "det"),
            (1, "obj"),
            (5, "nsubj"),
            (3, "acl:relcl"),
            (5, "obj"),
            (1, "punct"),
        ],
        [mention(subj_key, 0, 1), mention(obj_key, 6, 7)],
    )


def no_subject(sid, doc, a_key, b_key):
    """"Analysis of {A} and {B} ." — fails the subject filter."""
    _, aname, _ = ENTITIES[a_key]
    _, bname, _ = ENTITIES[b_key]
    return sent(
        sid,
        doc,
        [
            ("Analysis", "analysis", "NOUN"),
            ("of", "of", "ADP"),
            (aname, aname.lower(), "PROPN"),
            ("and", "and", "CCONJ"),
            (bname, bname.lower(), "PROPN"),
            (".", ".", "PUNCT"),
        ],
        [(ROOT, "root"), (0, "prep"), (1, "pobj"), (2, "cc"), (2, "conj"), (0, "punct")],
        [mention(a_key, 2, 3), mention(b_key, 4, 5)],
    )


def adverb_svo(sid, doc, subj_key, obj_key):
    """"{Subj} effectively treats {Obj} ." — same path signature as svo."""
    _, sname, _ = ENTITIES[subj_key]
    _, oname, _ = ENTITIES[obj_key]
    return sent(
        sid,
        doc,
        [
            (sname, sname.lower(), "PROPN"),
            ("effectively", "effectively", "ADV"),
            ("treats", "treat", "VERB"),
            (oname, oname.lower(), "PROPN"),
            (".", ".", "PUNCT"),
        ],
        [(2, "nsubj"), (2, "advmod"), (ROOT, "root"), (2, "obj"), (2, "punct")],
        [mention(subj_key, 0, 1), mention(obj_key, 3, 4)],
    )


def pipeline_corpus() -> list[AnnotatedSentence]:
    """The 20-sentence hand-annotated corpus behind the golden pipeline."""
    return [
        # "treat" frame: 5 occurrences of the same signature
        svo("s01", "d01", "chloroquine", "treats", "treat", "malaria"),
        adverb_svo("s02", "d01", "chloroquine", "malaria"),
        svo("s03", "d02", "hcq", "treats", "treat", "covid"),
        svo("s04", "d02", "remdesivir", "treats", "treat", "covid"),
        svo("s05", "d03", "metformin", "treats", "treat", "diabetes"),
        # "cause" frame: 4 occurrences
        svo("s06", "d03", "covid", "causes", "cause", "pneumonia"),
        svo("s07", "d04", "covid", "causes", "cause", "fever"),
        svo("s08", "d04", "sars2", "causes", "cause", "covid"),
        svo("s09", "d05", "pneumonia", "causes", "cause", "fever"),
        # copular "treatment" frame: 4 occurrences
        copular_treatment("s10", "d05", "chloroquine", "effective", "effective", "covid"),
        copular_treatment("s11", "d06", "hcq", "effective", "effective", "malaria", obj_adj="severe"),
        copular_treatment("s12", "d06", "remdesivir", "promising", "promising", "pneumonia"),
        copular_treatment("s13", "d07", "metformin", "possible", "possible", "covid"),
        # below-threshold frames
        svo("s14", "d07", "chloroquine", "inhibits", "inhibit", "ace2"),
        svo("s15", "d08", "remdesivir", "inhibits", "inhibit", "ace2"),
        svo("s16", "d08", "vaccine", "prevents", "prevent", "pneumonia"),
        passive("s17", "d09", "covid", "caused", "cause", "sars2"),
        relclause("s18", "d09", "chloroquine", "ace2"),
        # filtered out: no subject entity
        no_subject("s19", "d10", "chloroquine", "covid"),
        no_subject("s20", "d10", "remdesivir", "pneumonia"),
    ]


def drug_corpus() -> list[AnnotatedSentence]:
    """30 sentences between COVID-19 and chemicals, for modifier counts."""
    out = []
    chems = ["chloroquine", "hcq", "remdesivir", "metformin"]
    i = 0
    for n in range(12):
        chem = chems[n % 4]
        out.append(svo(f"m{i:02d}", f"dd{n % 5}", chem, "treats", "treat", "covid"))
        i += 1
    for n in range(10):
        chem = chems[n % 4]
        out.append(
            copular_treatment(
                f"m{i:02d}", f"dd{n % 5}", chem, "effective", "effective", "covid"
            )
        )
        i += 1
    for n in range(8):
        chem = chems[n % 4]
        out.append(svo(f"m{i:02d}", f"dd{n % 5}", chem, "shows", "show", "covid"))
        i += 1
    return out


# -- random generators -------------------------------------------------

LABELS = ["nsubj", "obj", "nmod", "amod", "advmod", "conj", "det", "case", "obl", "iobj"]
POSES = ["NOUN", "VERB", "ADJ", "ADP", "DET", "ADV", "PROPN"]
VOCAB = [
    "alpha", "beta", "gamma", "delta", "treat", "cause", "show", "bind",
    "protein", "cell", "level", "drug", "dose", "effect",
]


def random_sentence(rng: random.Random, sid: str) -> AnnotatedSentence:
    n = rng.randint(3, 10)
    words = []
    deps = []
    for i in range(n):
        lemma = rng.choice(VOCAB)
        words.append((lemma, lemma, rng.choice(POSES)))
        if i == 0:
            deps.append((ROOT, "root"))
        else:
            deps.append((rng.randrange(i), rng.choice(LABELS)))
    k = rng.randint(2, min(4, n))
    positions = rng.sample(range(n), k)
    mentions = []
    for j, p in enumerate(positions):
        eid = f"E{j}"
        mentions.append(
            EntityMention(
                start=p,
                end=p + 1,
                entity_id=eid,
                entity_name=eid,
                types=frozenset({rng.choice(["T1", "T2", "T3"])}),
            )
        )
    return sent(sid, f"doc-{sid}", words, deps, mentions)


def random_corpus(rng: random.Random, n: int, prefix: str = "r") -> list[AnnotatedSentence]:
    return [random_sentence(rng, f"{prefix}{i:04d}") for i in range(n)]


# -- scored-record helpers ---------------------------------------------


def scored(
    sid: str,
    head_id: str,
    tail_id: str,
    score: float,
    text: Optional[str] = None,
    modifiers=(),
    model_tag: str = "fixture-model",
    head_name: Optional[str] = None,
    tail_name: Optional[str] = None,
    head_types=("T",),
    tail_types=("T",),
    doc_id: str = "doc",
) -> ScoredRecord:
    return ScoredRecord(
        sentence_id=sid,
        doc_id=doc_id,
        text=text if text is not None else f"sentence {sid}",
        score=score,
        model_tag=model_tag,
        head_id=head_id,
        head_name=head_name or head_id,
        head_types=frozenset(head_types),
        head_links=frozenset(),
        head_span=(0, 1),
        tail_id=tail_id,
        tail_name=tail_name or tail_id,
        tail_types=frozenset(tail_types),
        tail_links=frozenset(),
        tail_span=(2, 3),
        modifiers=frozenset(modifiers),
    )


def random_records(
    rng: random.Random, n_nodes: int, n_records: int, prefix: str = "rs"
) -> list[ScoredRecord]:
    nodes = [f"N{i}" for i in range(n_nodes)]
    types = ["TA", "TB", "TC"]
    out = []
    for i in range(n_records):
        h, t = rng.sample(nodes, 2)
        out.append(
            scored(
                f"{prefix}{i:04d}",
                h,
                t,
                round(rng.uniform(0.0, 1.0), 3),
                modifiers={
                    (rng.choice(["noun", "verb", "adj"]), rng.choice(VOCAB))
                    for _ in range(rng.randint(0, 3))
                },
                head_types=(rng.choice(types),),
                tail_types=(rng.choice(types),),
            )
        )
    return out
