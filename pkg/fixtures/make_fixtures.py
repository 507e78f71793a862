#!/usr/bin/env python3
"""Regenerate the synthetic fixture corpora in this directory.

paper.jsonl    synthetic corpus whose tag totals and outcome tallies equal the
               published TowerLLM / mBART figures (1559 source tags, 754 / 751
               target tags); one source entity per record.
examples.jsonl the four worked example sentences (ids 110, 164, 125, 526).
clean.jsonl    one guideline-clean sentence pair.
lint.jsonl     five records, each tripping exactly one validator rule.

Usage: python fixtures/make_fixtures.py [OUTDIR]
"""

import json
import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))

SOURCE_TEMPLATES = {
    "M": ["he <M1> was tired", "the father <M1> arrived late", "my brother <M1> is happy",
          "the king <M1> felt ready", "her husband <M1> seemed sure"],
    "F": ["she <F1> was tired", "the mother <F1> arrived late", "my sister <F1> is happy",
          "the queen <F1> felt ready", "his wife <F1> seemed sure"],
    "A": ["I <A1> was tired", "the doctor <A1> arrived late", "you <A1> are happy",
          "the teacher <A1> felt ready", "my friend <A1> seemed sure"],
}
# Italian predicate per template slot, masculine / feminine realisation.
TARGET_PREDICATES = [
    ("era stanco", "era stanca"),
    ("è arrivato", "è arrivata"),
    ("è contento", "è contenta"),
    ("si sentiva pronto", "si sentiva pronta"),
    ("sembrava sicuro", "sembrava sicura"),
]
NEUTRAL_PREDICATES = ["era lì", "ha parlato", "è felice", "ha risposto", "sembrava tranquillo"]
EXTRA_CLAUSE = {"M": "e qualcuno è rimasto <M2>", "F": "e qualcuna è rimasta <F2>"}

# Per source-gender group: (system -> list of (count, target gender)).
# Remaining records of the group get no target tag for entity 1.
PLAN = {
    "M": (356, {"tower": [(173, "M")], "mbart": [(165, "M"), (2, "F")]}),
    "F": (294, {"tower": [(104, "F"), (8, "M")], "mbart": [(88, "F"), (25, "M")]}),
    "A": (909, {"tower": [(215, "M"), (35, "F")], "mbart": [(221, "M"), (29, "F")]}),
}
# Target tags with no source counterpart (entity 2), placed on A-group records
# after the first 250.
UNMATCHED_TARGET = {"tower": [(148, "M"), (71, "F")], "mbart": [(159, "M"), (62, "F")]}
UNMATCHED_OFFSET = 250


def _expand(plan):
    out = []
    for count, gender in plan:
        out += [gender] * count
    return out


def _target(slot, gender, extra):
    if gender is None:
        main = NEUTRAL_PREDICATES[slot]
    else:
        main = f"{TARGET_PREDICATES[slot][gender == 'F']} <{gender}1>"
    parts = [main]
    if extra is not None:
        parts.append(EXTRA_CLAUSE[extra])
    return " ".join(parts) + " ."


def reference_records():
    records = []
    n = 0
    for group in ("M", "F", "A"):
        size, systems = PLAN[group]
        assigned = {name: _expand(plan) for name, plan in systems.items()}
        extras = {name: _expand(plan) for name, plan in UNMATCHED_TARGET.items()}
        for i in range(size):
            n += 1
            slot = i % 5
            targets = {}
            for name in ("tower", "mbart"):
                gender = assigned[name][i] if i < len(assigned[name]) else None
                extra = None
                k = i - UNMATCHED_OFFSET
                if group == "A" and 0 <= k < len(extras[name]):
                    extra = extras[name][k]
                targets[name] = _target(slot, gender, extra)
            records.append({
                "id": f"p{n:04d}",
                "source": SOURCE_TEMPLATES[group][slot] + " .",
                "targets": targets,
            })
    return records


EXAMPLES = [
    {
        "id": "110",
        "source": "Women have been trained to think that we <F1> are overreacting or that we <F1> 're "
                  "being too sensitive or unreasonable .",
        "targets": {
            "tower": "Alle donne è stato insegnato a pensare che siamo troppo reattive <F1> o che siamo "
                     "troppo sensibili o irragionevoli .",
            "mbart": "Le donne sono state addestrate a pensare che siamo troppo reattive <F1> o che siamo "
                     "troppo sensibili o irragionevoli .",
        },
    },
    {
        # "me" is left untagged here so entity 2 is the only source entity.
        "id": "164",
        "source": "Many of the women working with me had to leave once they <F2> got married , because "
                  "their husbands would n't let them <F2> work .",
        "targets": {
            "tower": "Molte delle donne che lavoravano con me hanno dovuto lasciare il lavoro non appena si "
                     "sono sposate <F2> perché i mariti non li <M2> volevano vedere lavorare .",
            "mbart": "Molte delle donne che lavoravano con me dovevano andare via una volta sposate <F2> "
                     "perché i loro mariti non li <M2> lasciavano lavorare .",
        },
    },
    {
        "id": "125",
        "source": "And he said , “ No , you <A1> 're still dry , you <A1> 're just being nice . ”",
        "targets": {
            "tower": "sei ancora asciutta <F1> stai solo facendo il bravo <M1>",
            "mbart": "“ No , sei ancora secco <M1> , stai solo facendo bene . ”",
        },
    },
    {
        "id": "526",
        "source": "Lindsay Malloy <A1> : They <A2> told Brendan <M3> that honesty would “ set him <M3> "
                  "free , ” but they <A2> were completely convinced of his guilt at that point .",
        "targets": {
            "tower": "Lindsay Malloy : A Brendan dissero che l’onestà lo avrebbe “ liberato <M3> ” , ma "
                     "erano completamente convinti <M2> della sua colpevolezza a quel punto .",
            "mbart": "Lindsay Malloy : Hanno detto a Brendan che l’onestà lo avrebbe liberato <M3> ma "
                     "erano completamente convinti <M2> della sua colpa a quel punto .",
        },
    },
]

CLEAN = [
    {
        "id": "t1",
        "source": "Women have been trained to think that we <F1> are overreacting or that we <F1> are "
                  "being too sensitive or unreasonable .",
        "targets": {
            "tower": "Alle donne è stato insegnato a pensare che ( noi ) siamo troppo reattive <F1> o che "
                     "( noi ) siamo troppo sensibili o irragionevoli .",
        },
    },
]

LINT = [
    {"id": "v001", "source": "you <A1> are brave", "targets": {"tower": "sei coraggioso <A1>"}},
    {"id": "v002", "source": "he <M1> said she <F1> left", "targets": {"tower": "ha detto che è andata via"}},
    {"id": "v003", "source": "we <A2> left", "targets": {"tower": "siamo andati via"}},
    {"id": "v004", "source": "she <F1> left", "targets": {"tower": "è partita <F1> e lui è rimasto <M2>"}},
    {"id": "v005", "source": "the rain stopped", "targets": {"tower": "la pioggia è finita"}},
]


def dump(records):
    return "".join(json.dumps(r, ensure_ascii=False, separators=(",", ":")) + "\n" for r in records)


def build():
    return {
        "paper.jsonl": dump(reference_records()),
        "examples.jsonl": dump(EXAMPLES),
        "clean.jsonl": dump(CLEAN),
        "lint.jsonl": dump(LINT),
    }


def main(outdir=HERE):
    for name, text in build().items():
        with open(os.path.join(outdir, name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


if __name__ == "__main__":
    main(*sys.argv[1:])
