"""Built-in biomedical entity lexicon.

Each entry maps a surface form (token sequence, lowercased) to the
linked entity.  The table is intentionally small: it covers the hepatic
toxicology and COVID-19 vocabulary exercised by the test corpus, and is
the place to plug in a real dictionary dump when one is available.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class LexEntry:
    entity_id: str
    name: str
    types: tuple[str, ...]
    links: tuple[tuple[str, str], ...] = ()


CHEMICAL = "Chemical"
DISEASE = "Disease or Syndrome"
GENE = "Gene"
CELL = "Cell"
VIRUS = "Virus"
PHSU = "Pharmacologic Substance"

_AMOX = LexEntry("CHEM:amoxicillin", "Amoxicillin", (CHEMICAL,), (("MESH", "D000658"),))
_CLAV = LexEntry("CHEM:clavulanic-acid", "Clavulanic acid", (CHEMICAL,))
_NRF2 = LexEntry("GENE:nfe2l2", "NRF2", (GENE,), (("NCBIGene", "4780"),))
_FXR = LexEntry("GENE:nr1h4", "FXR", (GENE,), (("NCBIGene", "9971"),))
_BA = LexEntry("CHEM:bile-acid", "Bile acid", (CHEMICAL,))
_IDILI = LexEntry("DIS:dili", "Drug-induced liver injury", (DISEASE,))
_INFECTION = LexEntry("DIS:bacterial-infection", "Bacterial infections", (DISEASE,))
_COVID = LexEntry(
    "DIS:covid-19", "COVID-19", (DISEASE,), (("MESH", "D000086382"),)
)

# surface token sequence (lowercased) -> entity
ENTRIES: dict[tuple[str, ...], LexEntry] = {
    ("amoxicillin",): _AMOX,
    ("amox",): _AMOX,
    ("clavulanic", "acid"): _CLAV,
    ("clavulanate",): _CLAV,
    ("clav",): _CLAV,
    ("nrf2",): _NRF2,
    ("nuclear", "factor", "erythroid", "2-related", "factor", "2"): _NRF2,
    ("fxr",): _FXR,
    ("farnesoid", "x", "receptor",): _FXR,
    ("bile", "acid"): _BA,
    ("bile", "acids"): _BA,
    ("cholestasis",): LexEntry("DIS:cholestasis", "Cholestasis", (DISEASE,)),
    ("intrahepatic", "cholestasis"): LexEntry(
        "DIS:intrahepatic-cholestasis", "Intrahepatic cholestasis", (DISEASE,)
    ),
    ("idili",): _IDILI,
    ("drug-induced", "liver", "injury"): _IDILI,
    ("bacterial", "infections"): _INFECTION,
    ("infections",): _INFECTION,
    ("hepatocytes",): LexEntry("CELL:hepatocyte", "Hepatocytes", (CELL,)),
    ("hepg2",): LexEntry("CELL:hepg2", "HepG2", (CELL,)),
    ("sulforaphane",): LexEntry("CHEM:sulforaphane", "Sulforaphane", (CHEMICAL,)),
    ("bsep",): LexEntry("GENE:abcb11", "BSEP", (GENE,)),
    ("ntcp",): LexEntry("GENE:slc10a1", "NTCP", (GENE,)),
    ("ostalpha",): LexEntry("GENE:slc51a", "OSTalpha", (GENE,)),
    ("mdr2",): LexEntry("GENE:abcb4", "MDR2", (GENE,)),
    ("cyp7a1",): LexEntry("GENE:cyp7a1", "CYP7A1", (GENE,)),
    ("cyp8b1",): LexEntry("GENE:cyp8b1", "CYP8B1", (GENE,)),
    ("abcg5",): LexEntry("GENE:abcg5", "ABCG5", (GENE,)),
    ("gsh",): LexEntry("CHEM:glutathione", "Glutathione", (CHEMICAL,)),
    ("ros",): LexEntry("CHEM:ros", "Reactive oxygen species", (CHEMICAL,)),
    ("covid-19",): _COVID,
    ("covid",): _COVID,
    ("sars-cov-2",): LexEntry("VIR:sars-cov-2", "SARS-CoV-2", (VIRUS,)),
    ("pneumonia",): LexEntry(
        "DIS:pneumonia", "Pneumonia", (DISEASE,), (("MESH", "D011014"),)
    ),
    ("chloroquine",): LexEntry("CHEM:chloroquine", "Chloroquine", (CHEMICAL,)),
    ("hydroxychloroquine",): LexEntry(
        "CHEM:hydroxychloroquine", "Hydroxychloroquine", (CHEMICAL,)
    ),
    ("remdesivir",): LexEntry("CHEM:remdesivir", "Remdesivir", (CHEMICAL,)),
    ("vaccines",): LexEntry("PHSU:vaccine", "Vaccines", (PHSU,)),
    ("vaccine",): LexEntry("PHSU:vaccine", "Vaccines", (PHSU,)),
}

MAX_ENTRY_LEN = max(len(k) for k in ENTRIES)
