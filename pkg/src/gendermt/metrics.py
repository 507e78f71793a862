"""Outcome tallies and per-gender precision / recall / F1.

precision(g) = matches(g) / target tags of gender g
recall(g)    = matches(g) / source tags of gender g
f1           = harmonic mean of the two

Counting is per tag, so recall can exceed 1 when several target tags match
one source mention. It is flagged, never clamped.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterable, Mapping

from .corpus import Corpus
from .evaluate import Category, Outcome
from .tagged import GenderClass

__all__ = [
    "GenderCounts",
    "Score",
    "GenderMetrics",
    "AmbiguityStats",
    "TagDistribution",
    "aggregate",
    "precision",
    "recall",
    "f1",
    "gender_metrics",
    "ambiguity_stats",
    "tag_distribution",
    "ZERO_DENOMINATOR",
    "OVER_UNITY",
]

M = GenderClass.MASCULINE
F = GenderClass.FEMININE
A = GenderClass.AMBIGUOUS

ZERO_DENOMINATOR = "zero_denominator"
OVER_UNITY = "over_unity"


def _g(gender) -> GenderClass:
    return gender if isinstance(gender, GenderClass) else GenderClass(gender)


@dataclass(frozen=True)
class GenderCounts:
    match_m: int = 0
    match_f: int = 0
    error_f_to_m: int = 0
    error_m_to_f: int = 0
    bias_a_to_m: int = 0
    bias_a_to_f: int = 0
    unmatched_target_m: int = 0
    unmatched_target_f: int = 0
    unmatched_source: int = 0
    source_m: int = 0
    source_f: int = 0
    source_a: int = 0

    def __post_init__(self):
        for f_ in fields(self):
            v = getattr(self, f_.name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{f_.name} must be a non-negative int, got {v!r}")

    def __add__(self, other: "GenderCounts") -> "GenderCounts":
        if not isinstance(other, GenderCounts):
            return NotImplemented
        return GenderCounts(**{f_.name: getattr(self, f_.name) + getattr(other, f_.name) for f_ in fields(self)})

    merge = __add__

    def matches(self, gender) -> int:
        return {M: self.match_m, F: self.match_f}[_g(gender)]

    def errors_into(self, gender) -> int:
        return {M: self.error_f_to_m, F: self.error_m_to_f}[_g(gender)]

    def biases_into(self, gender) -> int:
        return {M: self.bias_a_to_m, F: self.bias_a_to_f}[_g(gender)]

    def unmatched_target(self, gender) -> int:
        return {M: self.unmatched_target_m, F: self.unmatched_target_f}[_g(gender)]

    def target_tags(self, gender) -> int:
        g = _g(gender)
        return self.matches(g) + self.errors_into(g) + self.biases_into(g) + self.unmatched_target(g)

    def source_tags(self, gender) -> int:
        return {M: self.source_m, F: self.source_f, A: self.source_a}[_g(gender)]

    @property
    def total_matches(self) -> int:
        return self.match_m + self.match_f

    @property
    def total_mismatches(self) -> int:
        return self.error_f_to_m + self.error_m_to_f + self.bias_a_to_m + self.bias_a_to_f

    def to_dict(self) -> dict[str, int]:
        return {f_.name: getattr(self, f_.name) for f_ in fields(self)}

    @classmethod
    def from_dict(cls, d: Mapping[str, int]) -> "GenderCounts":
        return cls(**d)


_OUTCOME_FIELD = {
    (Category.MATCH, M): "match_m",
    (Category.MATCH, F): "match_f",
    (Category.ERROR, M): "error_f_to_m",
    (Category.ERROR, F): "error_m_to_f",
    (Category.BIAS, M): "bias_a_to_m",
    (Category.BIAS, F): "bias_a_to_f",
    (Category.UNMATCHED_TARGET, M): "unmatched_target_m",
    (Category.UNMATCHED_TARGET, F): "unmatched_target_f",
}


def aggregate(outcomes: Iterable[Outcome], source_tags: Mapping | None = None) -> GenderCounts:
    """Tally outcomes of one (corpus, system) pair.

    Source tag totals are not recoverable from outcomes, so recall
    denominators come in through ``source_tags`` (gender -> count, e.g. a
    ``TagDistribution`` of the source side). They default to zero.
    """
    tally = {name: 0 for name in _OUTCOME_FIELD.values()}
    unmatched_source = 0
    for o in outcomes:
        if o.category is Category.UNMATCHED_SOURCE:
            unmatched_source += 1
        else:
            tally[_OUTCOME_FIELD[o.category, o.target_gender]] += 1
    src = {M: 0, F: 0, A: 0}
    if source_tags is not None:
        for g, n in source_tags.items():
            src[_g(g)] = int(n)
    return GenderCounts(
        **tally, unmatched_source=unmatched_source, source_m=src[M], source_f=src[F], source_a=src[A]
    )


@dataclass(frozen=True)
class Score:
    numerator: int
    denominator: int

    @property
    def value(self) -> float:
        if self.denominator == 0:
            return 0.0
        return self.numerator / self.denominator

    @property
    def flags(self) -> tuple[str, ...]:
        if self.denominator == 0:
            return (ZERO_DENOMINATOR,)
        if self.numerator > self.denominator:
            return (OVER_UNITY,)
        return ()

    def __float__(self) -> float:
        return self.value


def precision(counts: GenderCounts, gender) -> Score:
    return Score(counts.matches(gender), counts.target_tags(gender))


def recall(counts: GenderCounts, gender) -> Score:
    return Score(counts.matches(gender), counts.source_tags(gender))


def f1(p: float, r: float) -> float:
    p, r = float(p), float(r)
    if p < 0 or r < 0:
        raise ValueError("precision and recall must be non-negative")
    if p + r == 0:
        return 0.0
    # 2pr/(p+r) rearranged: no underflow of p*r, exactly symmetric.
    lo, hi = sorted((p, r))
    return 2 * lo * (hi / (lo + hi))


@dataclass(frozen=True)
class GenderMetrics:
    gender: GenderClass
    precision: Score
    recall: Score

    @property
    def f1(self) -> float:
        return f1(self.precision.value, self.recall.value)

    @property
    def flags(self) -> list[str]:
        return [f"precision:{f}" for f in self.precision.flags] + [f"recall:{f}" for f in self.recall.flags]

    def to_dict(self, system: str | None = None) -> dict:
        d = {} if system is None else {"system": system}
        d.update(
            gender=self.gender.value,
            precision=self.precision.value,
            recall=self.recall.value,
            f1=self.f1,
            flags=self.flags,
        )
        return d


def gender_metrics(counts: GenderCounts) -> dict[GenderClass, GenderMetrics]:
    return {g: GenderMetrics(g, precision(counts, g), recall(counts, g)) for g in (M, F)}


@dataclass(frozen=True)
class AmbiguityStats:
    a_to_m: int
    a_to_f: int

    @property
    def total(self) -> int:
        return self.a_to_m + self.a_to_f

    @property
    def masculine_share(self) -> float | None:
        return self.a_to_m / self.total if self.total else None

    @property
    def feminine_share(self) -> float | None:
        return self.a_to_f / self.total if self.total else None


def ambiguity_stats(counts: GenderCounts) -> AmbiguityStats:
    return AmbiguityStats(counts.bias_a_to_m, counts.bias_a_to_f)


@dataclass(frozen=True)
class TagDistribution:
    m: int = 0
    f: int = 0
    a: int = 0

    @property
    def total(self) -> int:
        return self.m + self.f + self.a

    def items(self):
        return ((M, self.m), (F, self.f), (A, self.a))

    def __getitem__(self, gender) -> int:
        return {M: self.m, F: self.f, A: self.a}[_g(gender)]

    def to_dict(self) -> dict[str, int]:
        return {"M": self.m, "F": self.f, "A": self.a, "total": self.total}

    @classmethod
    def from_dict(cls, d: Mapping[str, int]) -> "TagDistribution":
        return cls(d["M"], d["F"], d["A"])


def tag_distribution(corpus: Corpus, side: str = "source") -> TagDistribution:
    """Token-level tag counts on the source side or on one system's targets."""
    counts = {M: 0, F: 0, A: 0}
    for rec in corpus:
        if side == "source":
            sentence = rec.source
        elif side in rec.targets:
            sentence = rec.targets[side]
        else:
            continue
        for _, tag in sentence.tags():
            counts[tag.gender] += 1
    return TagDistribution(counts[M], counts[F], counts[A])
