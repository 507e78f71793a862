"""Annotation guideline checks.

Rule table:

====  ========  ===========================================================
code  severity  condition
====  ========  ===========================================================
V001  error     ambiguous ``<A>`` tag on a target sentence
V002  error     one source entity tagged with more than one gender
V003  warning   source entity indices are not exactly 1..k
V004  warning   target tag whose entity index is absent from the source
V005  warning   source sentence carries no tags
====  ========  ===========================================================

Mixed genders for one entity on the target side are legal data and produce
no diagnostic. Proper-name conventions cannot be checked mechanically and
are not enforced.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterable

from .corpus import Corpus, CorpusRecord
from .tagged import GenderClass, entity_map

__all__ = [
    "Severity",
    "Diagnostic",
    "RULES",
    "validate",
    "validate_record",
    "has_errors",
    "diagnostics_to_jsonl",
]


class Severity(str, enum.Enum):
    ERROR = "error"
    WARNING = "warning"

    def __str__(self) -> str:
        return self.value


RULES = {
    "V001": (Severity.ERROR, "ambiguous tag on target side"),
    "V002": (Severity.ERROR, "conflicting genders for one source entity"),
    "V003": (Severity.WARNING, "source entity indices not contiguous from 1"),
    "V004": (Severity.WARNING, "target entity index absent from source"),
    "V005": (Severity.WARNING, "source sentence has no tags"),
}

SOURCE = "source"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    record_id: str
    side: str  # "source" or "target:<system>"
    position: int | None
    message: str

    def __post_init__(self):
        if self.code not in RULES:
            raise ValueError(f"unknown rule code {self.code!r}")

    @property
    def severity(self) -> Severity:
        return RULES[self.code][0]

    @property
    def system(self) -> str | None:
        if self.side == SOURCE:
            return None
        return self.side.split(":", 1)[1]

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity.value,
            "record_id": self.record_id,
            "side": self.side,
            "position": self.position,
            "message": self.message,
        }

    def __str__(self) -> str:
        pos = "-" if self.position is None else str(self.position)
        return f"{self.record_id}\t{self.side}\t{pos}\t{self.code} {self.severity}: {self.message}"


def _target_side(system: str) -> str:
    return f"target:{system}"


def validate_record(rec: CorpusRecord) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    src = entity_map(rec.source)

    if not src:
        diags.append(Diagnostic("V005", rec.id, SOURCE, None, "source sentence has no gender tags"))

    for idx, mentions in src.items():
        first_gender = mentions[0][1]
        for pos, gender in mentions[1:]:
            if gender != first_gender:
                seen = sorted({g.value for _, g in mentions})
                diags.append(Diagnostic(
                    "V002", rec.id, SOURCE, pos,
                    f"entity {idx} tagged as {'/'.join(seen)}; the source fixes one gender per referent",
                ))
                break

    if src:
        k = len(src)
        if list(src) != list(range(1, k + 1)):
            # Point at the first tag lying outside 1..k.
            pos = min(p for i, ms in src.items() if i > k for p, _ in ms)
            diags.append(Diagnostic(
                "V003", rec.id, SOURCE, pos,
                f"entity indices {sorted(src)} are not the contiguous range 1..{k}",
            ))

    for system, target in rec.targets.items():
        side = _target_side(system)
        for pos, tag in target.tags():
            if tag.gender is GenderClass.AMBIGUOUS:
                diags.append(Diagnostic(
                    "V001", rec.id, side, pos, f"{tag} on target side; only <F> and <M> are allowed",
                ))
            if tag.entity_index not in src:
                diags.append(Diagnostic(
                    "V004", rec.id, side, pos,
                    f"{tag} refers to entity {tag.entity_index}, which the source does not tag",
                ))

    side_rank = {SOURCE: 0}
    for i, system in enumerate(rec.targets, start=1):
        side_rank[_target_side(system)] = i
    diags.sort(key=lambda d: (side_rank[d.side], -1 if d.position is None else d.position, d.code))
    return diags


def validate(corpus: Corpus | Iterable[CorpusRecord]) -> list[Diagnostic]:
    """Run every rule over the corpus, ordered by (record, side, position)."""
    out: list[Diagnostic] = []
    for rec in corpus:
        out.extend(validate_record(rec))
    return out


def has_errors(diags: Iterable[Diagnostic], strict: bool = False) -> bool:
    if strict:
        return any(True for _ in diags)
    return any(d.severity is Severity.ERROR for d in diags)


def diagnostics_to_jsonl(diags: Iterable[Diagnostic]) -> str:
    return "".join(json.dumps(d.to_dict(), ensure_ascii=False) + "\n" for d in diags)
