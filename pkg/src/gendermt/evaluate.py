"""Entity-index alignment and outcome classification.

Every target tag gets exactly one outcome. Source entities that no target tag
refers to get one ``unmatched_source`` outcome each.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .corpus import Corpus, CorpusRecord
from .tagged import GenderClass, entity_map

__all__ = [
    "Category",
    "Outcome",
    "EvaluationError",
    "UnknownSystemError",
    "PreconditionViolated",
    "source_genders",
    "classify_record",
    "classify_corpus",
]

A = GenderClass.AMBIGUOUS


class Category(str, enum.Enum):
    MATCH = "match"
    ERROR = "error"
    BIAS = "bias"
    UNMATCHED_SOURCE = "unmatched_source"
    UNMATCHED_TARGET = "unmatched_target"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Outcome:
    category: Category
    record_id: str
    system: str
    entity_index: int
    position: int | None = None
    source_gender: GenderClass | None = None
    target_gender: GenderClass | None = None

    def __post_init__(self):
        cat, src, tgt = self.category, self.source_gender, self.target_gender
        gendered = (GenderClass.MASCULINE, GenderClass.FEMININE)
        if cat is Category.UNMATCHED_SOURCE:
            ok = src is not None and tgt is None and self.position is None
        elif cat is Category.UNMATCHED_TARGET:
            ok = src is None and tgt in gendered
        elif cat is Category.MATCH:
            ok = src in gendered and src == tgt
        elif cat is Category.ERROR:
            ok = src in gendered and tgt in gendered and src != tgt
        else:
            ok = src is A and tgt in gendered
        if not ok:
            raise ValueError(f"inconsistent outcome: {self!r}")

    @classmethod
    def match(cls, record_id, system, index, position, gender):
        return cls(Category.MATCH, record_id, system, index, position, gender, gender)

    @classmethod
    def error(cls, record_id, system, index, position, source, target):
        return cls(Category.ERROR, record_id, system, index, position, source, target)

    @classmethod
    def bias(cls, record_id, system, index, position, target):
        return cls(Category.BIAS, record_id, system, index, position, A, target)

    @classmethod
    def unmatched_source(cls, record_id, system, index, source):
        return cls(Category.UNMATCHED_SOURCE, record_id, system, index, None, source, None)

    @classmethod
    def unmatched_target(cls, record_id, system, index, position, target):
        return cls(Category.UNMATCHED_TARGET, record_id, system, index, position, None, target)


class EvaluationError(ValueError):
    def __init__(self, record_id: str, message: str):
        super().__init__(f"record {record_id!r}: {message}")
        self.record_id = record_id


class UnknownSystemError(EvaluationError):
    def __init__(self, record_id: str | None, system: str, known: Iterable[str]):
        known = list(known)
        where = "corpus" if record_id is None else f"record {record_id!r}"
        ValueError.__init__(self, f"{where}: no system {system!r} (have: {', '.join(known) or 'none'})")
        self.record_id = record_id
        self.system = system


class PreconditionViolated(EvaluationError):
    pass


def source_genders(rec: CorpusRecord) -> dict[int, GenderClass]:
    """Entity index -> gender for the source side; refuses conflicting genders."""
    out = {}
    for idx, mentions in entity_map(rec.source).items():
        genders = {g for _, g in mentions}
        if len(genders) > 1:
            raise PreconditionViolated(
                rec.id, f"source entity {idx} has conflicting genders {sorted(g.value for g in genders)}"
            )
        out[idx] = mentions[0][1]
    return out


def classify_record(rec: CorpusRecord, system: str) -> list[Outcome]:
    if system not in rec.targets:
        raise UnknownSystemError(rec.id, system, rec.targets)
    src = source_genders(rec)
    outcomes: list[Outcome] = []
    realised: set[int] = set()

    for pos, tag in rec.targets[system].tags():
        idx, tgt = tag.entity_index, tag.gender
        if tgt is A:
            raise PreconditionViolated(rec.id, f"{system}: ambiguous tag {tag} at token {pos} on target side")
        realised.add(idx)
        s = src.get(idx)
        if s is None:
            outcomes.append(Outcome.unmatched_target(rec.id, system, idx, pos, tgt))
        elif s is A:
            outcomes.append(Outcome.bias(rec.id, system, idx, pos, tgt))
        elif s == tgt:
            outcomes.append(Outcome.match(rec.id, system, idx, pos, tgt))
        else:
            outcomes.append(Outcome.error(rec.id, system, idx, pos, s, tgt))

    for idx in sorted(src):
        if idx not in realised:
            outcomes.append(Outcome.unmatched_source(rec.id, system, idx, src[idx]))
    return outcomes


def classify_corpus(
    corpus: Corpus | Iterable[CorpusRecord],
    system: str,
    skip_invalid: bool = False,
    skipped: list[EvaluationError] | None = None,
) -> list[Outcome]:
    """Classify every record for one system, in record order.

    With ``skip_invalid`` records that fail the preconditions are left out
    and their errors appended to ``skipped`` instead of raised.
    """
    if isinstance(corpus, Corpus) and corpus.records and system not in corpus.systems:
        raise UnknownSystemError(None, system, corpus.systems)
    outcomes: list[Outcome] = []
    for rec in corpus:
        try:
            outcomes.extend(classify_record(rec, system))
        except EvaluationError as exc:
            if not skip_invalid:
                raise
            if skipped is not None:
                skipped.append(exc)
    return outcomes
