"""Outcome CSVs, per-sentence logs and summary reports."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field, fields
from typing import Iterable, Sequence

from . import __version__
from .corpus import Corpus
from .evaluate import Category, EvaluationError, Outcome, classify_corpus
from .metrics import (
    AmbiguityStats,
    GenderCounts,
    GenderMetrics,
    TagDistribution,
    aggregate,
    ambiguity_stats,
    gender_metrics,
    tag_distribution,
)
from .tagged import GenderClass

__all__ = [
    "OUTCOME_COLUMNS",
    "LOG_COLUMNS",
    "SystemResult",
    "SentenceLogRow",
    "EvaluationReport",
    "MetricDelta",
    "FewerThanTwoSystems",
    "corpus_digest",
    "build_report",
    "emit_outcome_csv",
    "read_outcome_csv",
    "emit_sentence_log",
    "emit_summary",
    "compare_systems",
    "emit_deltas",
    "emit_tag_distribution",
    "pct",
]

M = GenderClass.MASCULINE
F = GenderClass.FEMININE

OUTCOME_COLUMNS = (
    "record_id", "system", "entity_index", "token_position", "category", "source_gender", "target_gender",
)
COUNT_FIELDS = tuple(f.name for f in fields(GenderCounts))
LOG_COLUMNS = ("record_id", "system") + COUNT_FIELDS


def pct(x: float | None) -> str:
    return "n/a" if x is None else f"{100 * x:.1f}%"


def corpus_digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


@dataclass(frozen=True)
class SystemResult:
    system: str
    counts: GenderCounts
    target_distribution: TagDistribution

    @property
    def metrics(self) -> dict[GenderClass, GenderMetrics]:
        return gender_metrics(self.counts)

    @property
    def ambiguity(self) -> AmbiguityStats:
        return ambiguity_stats(self.counts)

    def to_dict(self) -> dict:
        amb = self.ambiguity
        return {
            "system": self.system,
            "counts": self.counts.to_dict(),
            "target_distribution": self.target_distribution.to_dict(),
            "metrics": [m.to_dict(self.system) for m in self.metrics.values()],
            "ambiguity": {
                "a_to_m": amb.a_to_m,
                "a_to_f": amb.a_to_f,
                "masculine_share": amb.masculine_share,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SystemResult":
        return cls(d["system"], GenderCounts.from_dict(d["counts"]), TagDistribution.from_dict(d["target_distribution"]))


@dataclass(frozen=True)
class SentenceLogRow:
    record_id: str
    system: str
    counts: GenderCounts

    def to_dict(self) -> dict:
        return {"record_id": self.record_id, "system": self.system, **self.counts.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "SentenceLogRow":
        return cls(d["record_id"], d["system"], GenderCounts.from_dict({k: d[k] for k in COUNT_FIELDS}))


@dataclass(frozen=True)
class EvaluationReport:
    input_digest: str
    source_distribution: TagDistribution
    systems: tuple[SystemResult, ...]
    sentences: tuple[SentenceLogRow, ...] = ()
    skipped: tuple[str, ...] = ()
    version: str = __version__

    def system(self, name: str) -> SystemResult:
        for s in self.systems:
            if s.system == name:
                return s
        raise KeyError(name)

    @property
    def system_names(self) -> list[str]:
        return [s.system for s in self.systems]

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "input_digest": self.input_digest,
            "source_distribution": self.source_distribution.to_dict(),
            "systems": [s.to_dict() for s in self.systems],
            "skipped": list(self.skipped),
            "sentences": [r.to_dict() for r in self.sentences],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvaluationReport":
        return cls(
            input_digest=d["input_digest"],
            source_distribution=TagDistribution.from_dict(d["source_distribution"]),
            systems=tuple(SystemResult.from_dict(s) for s in d["systems"]),
            sentences=tuple(SentenceLogRow.from_dict(r) for r in d["sentences"]),
            skipped=tuple(d.get("skipped", ())),
            version=d["version"],
        )


def build_report(
    corpus: Corpus,
    systems: Sequence[str],
    input_digest: str,
    skip_invalid: bool = False,
) -> tuple[EvaluationReport, dict[str, list[Outcome]]]:
    """Classify ``corpus`` for each system and assemble the report.

    Returns the report and the outcome lists keyed by system name.
    """
    source_dist = tag_distribution(corpus, "source")
    all_outcomes: dict[str, list[Outcome]] = {}
    results = []
    log_rows = []
    skipped: dict[str, None] = {}
    for system in systems:
        errors: list[EvaluationError] = []
        outcomes = classify_corpus(corpus, system, skip_invalid=skip_invalid, skipped=errors)
        bad = {e.record_id for e in errors}
        for e in errors:
            skipped.setdefault(f"{system}:{e.record_id}", None)
        all_outcomes[system] = outcomes

        by_record: dict[str, list[Outcome]] = {}
        for o in outcomes:
            by_record.setdefault(o.record_id, []).append(o)
        total = GenderCounts()
        for rec in corpus:
            if rec.id in bad:
                continue
            src = {g: n for g, n in tag_distribution(Corpus((rec,)), "source").items()}
            row_counts = aggregate(by_record.get(rec.id, ()), src)
            log_rows.append(SentenceLogRow(rec.id, system, row_counts))
            total = total + row_counts
        results.append(SystemResult(system, total, tag_distribution(corpus, system)))

    report = EvaluationReport(
        input_digest=input_digest,
        source_distribution=source_dist,
        systems=tuple(results),
        sentences=tuple(log_rows),
        skipped=tuple(skipped),
    )
    return report, all_outcomes


def _csv_writer(buf: io.StringIO):
    return csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)


def _cell(v) -> str:
    return "" if v is None else str(v)


def emit_outcome_csv(outcomes: Iterable[Outcome]) -> bytes:
    buf = io.StringIO()
    w = _csv_writer(buf)
    w.writerow(OUTCOME_COLUMNS)
    for o in outcomes:
        w.writerow([
            o.record_id, o.system, o.entity_index, _cell(o.position), o.category.value,
            _cell(o.source_gender), _cell(o.target_gender),
        ])
    return buf.getvalue().encode("utf-8")


def read_outcome_csv(data: bytes) -> list[Outcome]:
    reader = csv.DictReader(io.StringIO(data.decode("utf-8")))
    out = []
    for row in reader:
        out.append(Outcome(
            category=Category(row["category"]),
            record_id=row["record_id"],
            system=row["system"],
            entity_index=int(row["entity_index"]),
            position=int(row["token_position"]) if row["token_position"] else None,
            source_gender=GenderClass(row["source_gender"]) if row["source_gender"] else None,
            target_gender=GenderClass(row["target_gender"]) if row["target_gender"] else None,
        ))
    return out


def emit_sentence_log(report: EvaluationReport) -> bytes:
    buf = io.StringIO()
    w = _csv_writer(buf)
    w.writerow(LOG_COLUMNS)
    for row in report.sentences:
        d = row.to_dict()
        w.writerow([d[c] for c in LOG_COLUMNS])
    return buf.getvalue().encode("utf-8")


# ---------------------------------------------------------------------------
# Text tables


def _render(rows: list[list[str]], title: str | None = None) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = [] if title is None else [title]
    for n, row in enumerate(rows):
        cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
        if n == 0:
            lines.append("-" * len(lines[-1]))
    return "\n".join(lines) + "\n"


def emit_tag_distribution(source: TagDistribution, targets: dict[str, TagDistribution]) -> str:
    names = list(targets)
    rows = [["Gender Tags", "EN"] + [f"IT {n}" for n in names]]
    for label, key in (("M", "M"), ("F", "F"), ("A", "A")):
        rows.append([label, str(source[key])] + [str(targets[n][key]) for n in names])
    rows.append(["Total Tags", str(source.total)] + [str(targets[n].total) for n in names])
    return _render(rows, "Tag distribution by gender")


def _outcome_table(report: EvaluationReport) -> str:
    res = report.systems
    rows = [[""] + [s.system for s in res]]

    def add(label, fn):
        rows.append([label] + [str(fn(s.counts)) for s in res])

    add("Match M", lambda c: c.match_m)
    add("Match F", lambda c: c.match_f)
    add("Total Matches", lambda c: c.total_matches)
    add("Bias A→M", lambda c: c.bias_a_to_m)
    add("Bias A→F", lambda c: c.bias_a_to_f)
    add("Error M→F", lambda c: c.error_m_to_f)
    add("Error F→M", lambda c: c.error_f_to_m)
    add("Total Mismatches", lambda c: c.total_mismatches)
    add("Unmatched source entities", lambda c: c.unmatched_source)
    add("Unmatched target tags M", lambda c: c.unmatched_target_m)
    add("Unmatched target tags F", lambda c: c.unmatched_target_f)
    rows.append(["A→M share"] + [pct(s.ambiguity.masculine_share) for s in res])
    return _render(rows, "Matches and mismatches")


def _metric_table(report: EvaluationReport) -> tuple[str, list[str]]:
    rows = [["Gender", "System", "Match", "Target Tags", "Source Tags", "Precision", "Recall", "F1"]]
    notes = []
    for gender, label in ((M, "Male"), (F, "Female")):
        for s in report.systems:
            m = s.metrics[gender]
            rows.append([
                label, s.system, str(s.counts.matches(gender)), str(s.counts.target_tags(gender)),
                str(s.counts.source_tags(gender)), pct(m.precision.value), pct(m.recall.value), pct(m.f1),
            ])
            for flag in m.flags:
                notes.append(f"note: {s.system} {gender.value} {flag}")
    return _render(rows, "Precision, recall and F1 by gender"), notes


def emit_summary(report: EvaluationReport, format: str = "table") -> bytes:
    if format == "json":
        return (json.dumps(report.to_dict(), ensure_ascii=False, indent=2) + "\n").encode("utf-8")
    if format != "table":
        raise ValueError(f"unknown summary format {format!r}")
    parts = [f"# gendermt {report.version}  input {report.input_digest}\n"]
    parts.append(emit_tag_distribution(
        report.source_distribution, {s.system: s.target_distribution for s in report.systems}
    ))
    parts.append(_outcome_table(report))
    metric_text, notes = _metric_table(report)
    parts.append(metric_text)
    if report.skipped:
        notes.append(f"note: {len(report.skipped)} record(s) skipped: {', '.join(report.skipped)}")
    text = "\n".join(parts)
    if notes:
        text += "\n" + "\n".join(notes) + "\n"
    return text.encode("utf-8")


# ---------------------------------------------------------------------------
# System comparison


class FewerThanTwoSystems(ValueError):
    pass


@dataclass(frozen=True)
class MetricDelta:
    metric: str
    gender: GenderClass
    first: str
    second: str
    first_value: float
    second_value: float

    @property
    def delta(self) -> float:
        """Full-precision difference, first minus second."""
        return self.first_value - self.second_value

    @property
    def delta_pp(self) -> float:
        """Difference of the displayed one-decimal percentages."""
        return round(float(pct(self.first_value)[:-1]) - float(pct(self.second_value)[:-1]), 1)

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "gender": self.gender.value,
            "first": self.first,
            "second": self.second,
            "first_value": self.first_value,
            "second_value": self.second_value,
            "delta": self.delta,
            "delta_pp": self.delta_pp,
        }


def compare_systems(report: EvaluationReport, first: str | None = None, second: str | None = None) -> list[MetricDelta]:
    if len(report.systems) < 2:
        raise FewerThanTwoSystems(f"comparison needs two systems, report has {report.system_names}")
    a = report.system(first) if first else report.systems[0]
    b = report.system(second) if second else report.systems[1]
    deltas = []
    for metric in ("precision", "recall", "f1"):
        for g in (M, F):
            ma, mb = a.metrics[g], b.metrics[g]
            va = ma.f1 if metric == "f1" else getattr(ma, metric).value
            vb = mb.f1 if metric == "f1" else getattr(mb, metric).value
            deltas.append(MetricDelta(metric, g, a.system, b.system, va, vb))
    return deltas


def emit_deltas(deltas: Sequence[MetricDelta], format: str = "table") -> bytes:
    if format == "json":
        return (json.dumps([d.to_dict() for d in deltas], ensure_ascii=False, indent=2) + "\n").encode("utf-8")
    if format == "csv":
        buf = io.StringIO()
        w = _csv_writer(buf)
        cols = ("metric", "gender", "first", "second", "first_value", "second_value", "delta", "delta_pp")
        w.writerow(cols)
        for d in deltas:
            row = d.to_dict()
            w.writerow([row[c] for c in cols])
        return buf.getvalue().encode("utf-8")
    if not deltas:
        return b""
    a, b = deltas[0].first, deltas[0].second
    rows = [["Metric", "Gender", "Delta", a, b]]
    for d in deltas:
        rows.append([d.metric, d.gender.value, f"{d.delta_pp:+.1f}pp", pct(d.first_value), pct(d.second_value)])
    return _render(rows, f"{a} minus {b}").encode("utf-8")
