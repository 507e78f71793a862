"""Corpus records and the JSONL / TSV on-disk formats.

JSONL (canonical), one record per line::

    {"id":"110","source":"... we <F1> ...","targets":{"tower":"... reattive <F1> ..."}}

TSV (single system, named ``default``)::

    id<TAB>source<TAB>target
"""

from __future__ import annotations

import io
import json
import os
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, TextIO, Union

from .tagged import TaggedSentence, TagParseError, parse_tagged, serialize_tagged

__all__ = [
    "CorpusRecord",
    "Corpus",
    "CorpusError",
    "DuplicateIdError",
    "RecordTagError",
    "SchemaError",
    "CorpusLoadError",
    "SerializationError",
    "TSV_SYSTEM",
    "MAX_ERRORS",
    "FORMATS",
    "guess_format",
    "load_corpus",
    "loads_corpus",
    "save_corpus",
]

TSV_SYSTEM = "default"
MAX_ERRORS = 100
FORMATS = ("jsonl", "tsv")

PathOrStream = Union[str, os.PathLike, BinaryIO, TextIO]


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    source: TaggedSentence
    targets: dict[str, TaggedSentence] = field(default_factory=dict)
    # Diagnostics only; not part of record identity.
    line: int | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ValueError("record id must be a non-empty string")
        for name in self.targets:
            if not isinstance(name, str) or not name:
                raise ValueError(f"record {self.id}: system name must be a non-empty string")

    @property
    def systems(self) -> list[str]:
        return list(self.targets)


@dataclass(frozen=True)
class Corpus:
    records: tuple[CorpusRecord, ...] = ()

    def __post_init__(self):
        if not isinstance(self.records, tuple):
            object.__setattr__(self, "records", tuple(self.records))
        seen = set()
        for rec in self.records:
            if rec.id in seen:
                raise ValueError(f"duplicate record id {rec.id!r}")
            seen.add(rec.id)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def systems(self) -> list[str]:
        """Union of target system names, in order of first appearance."""
        names: dict[str, None] = {}
        for rec in self.records:
            for name in rec.targets:
                names.setdefault(name, None)
        return list(names)


class CorpusError(ValueError):
    """One defect found while loading, tied to a 1-based input line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class DuplicateIdError(CorpusError):
    def __init__(self, line: int, record_id: str, first_line: int):
        super().__init__(line, f"duplicate id {record_id!r} (first seen on line {first_line})")
        self.record_id = record_id
        self.first_line = first_line


class RecordTagError(CorpusError):
    def __init__(self, line: int, field_name: str, cause: TagParseError):
        super().__init__(line, f"{field_name}: {cause}")
        self.field = field_name
        self.offset = cause.offset
        self.detail = cause.detail
        self.cause = cause


class SchemaError(CorpusError):
    pass


class CorpusLoadError(ValueError):
    """Loading aborted. ``errors`` lists every defect found, capped at MAX_ERRORS."""

    def __init__(self, errors: list[CorpusError], name: str = "<corpus>"):
        self.errors = errors
        self.name = name
        more = " (stopped at cap)" if len(errors) >= MAX_ERRORS else ""
        lines = [f"{name}: {len(errors)} error(s){more}"]
        lines += [f"  {name}:{e}" for e in errors]
        super().__init__("\n".join(lines))


class SerializationError(ValueError):
    pass


def guess_format(path: str | os.PathLike) -> str:
    ext = os.path.splitext(os.fspath(path))[1].lower()
    if ext in (".tsv", ".tab", ".txt"):
        return "tsv"
    return "jsonl"


def load_corpus(source: PathOrStream, format: str | None = None) -> Corpus:
    """Read a corpus from a path or an open (binary or text) stream.

    ``format`` defaults to the file extension for paths (``.tsv`` means TSV,
    anything else JSONL) and to JSONL for streams.
    """
    if isinstance(source, (str, os.PathLike)):
        name = os.fspath(source)
        with open(source, "rb") as fh:
            data = fh.read()
        fmt = format or guess_format(name)
    else:
        name = getattr(source, "name", "<stream>")
        data = source.read()
        fmt = format or "jsonl"
    return loads_corpus(data, fmt, name=str(name))


def loads_corpus(data: bytes | str, format: str = "jsonl", name: str = "<corpus>") -> Corpus:
    if format not in FORMATS:
        raise ValueError(f"unknown corpus format {format!r}; expected one of {FORMATS}")
    if isinstance(data, str):
        data = data.encode("utf-8")
    if data.startswith(b"\xef\xbb\xbf"):
        data = data[3:]

    parse_line = _parse_jsonl_line if format == "jsonl" else _parse_tsv_line
    errors: list[CorpusError] = []
    records: list[CorpusRecord] = []
    first_seen: dict[str, int] = {}

    for lineno, raw in enumerate(data.split(b"\n"), start=1):
        if len(errors) >= MAX_ERRORS:
            break
        if raw.endswith(b"\r"):
            raw = raw[:-1]
        try:
            line = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            errors.append(SchemaError(lineno, f"invalid UTF-8 at byte {exc.start}"))
            continue
        if not line.strip():
            continue
        try:
            rec = parse_line(line, lineno)
        except CorpusError as exc:
            errors.append(exc)
            continue
        if rec.id in first_seen:
            errors.append(DuplicateIdError(lineno, rec.id, first_seen[rec.id]))
            continue
        first_seen[rec.id] = lineno
        records.append(rec)

    if errors:
        raise CorpusLoadError(errors[:MAX_ERRORS], name)
    return Corpus(tuple(records))


def _parse_text(text: str, lineno: int, field_name: str) -> TaggedSentence:
    try:
        return parse_tagged(text)
    except TagParseError as exc:
        raise RecordTagError(lineno, field_name, exc) from None


def _parse_jsonl_line(line: str, lineno: int) -> CorpusRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise SchemaError(lineno, f"invalid JSON: {exc.msg} (column {exc.colno})") from None
    if not isinstance(obj, dict):
        raise SchemaError(lineno, "record must be a JSON object")
    keys = set(obj)
    missing = {"id", "source", "targets"} - keys
    extra = keys - {"id", "source", "targets"}
    if missing:
        raise SchemaError(lineno, f"missing key(s): {', '.join(sorted(missing))}")
    if extra:
        raise SchemaError(lineno, f"unknown key(s): {', '.join(sorted(extra))}")
    rid, source, targets = obj["id"], obj["source"], obj["targets"]
    if not isinstance(rid, str) or not rid:
        raise SchemaError(lineno, "'id' must be a non-empty string")
    if not isinstance(source, str):
        raise SchemaError(lineno, "'source' must be a string")
    if not isinstance(targets, dict):
        raise SchemaError(lineno, "'targets' must be an object mapping system name to text")
    parsed_targets = {}
    for sysname, text in targets.items():
        if not sysname:
            raise SchemaError(lineno, "system names must be non-empty")
        if not isinstance(text, str):
            raise SchemaError(lineno, f"target {sysname!r} must be a string")
        parsed_targets[sysname] = _parse_text(text, lineno, f"targets.{sysname}")
    return CorpusRecord(rid, _parse_text(source, lineno, "source"), parsed_targets, line=lineno)


def _parse_tsv_line(line: str, lineno: int) -> CorpusRecord:
    cols = line.split("\t")
    if len(cols) != 3:
        raise SchemaError(lineno, f"expected 3 tab-separated columns (id, source, target), got {len(cols)}")
    rid, source, target = cols
    if not rid:
        raise SchemaError(lineno, "empty id")
    return CorpusRecord(
        rid,
        _parse_text(source, lineno, "source"),
        {TSV_SYSTEM: _parse_text(target, lineno, "target")},
        line=lineno,
    )


def save_corpus(corpus: Corpus | Iterable[CorpusRecord], format: str = "jsonl") -> bytes:
    if format not in FORMATS:
        raise ValueError(f"unknown corpus format {format!r}; expected one of {FORMATS}")
    records = corpus.records if isinstance(corpus, Corpus) else tuple(corpus)
    out = io.StringIO()
    for rec in records:
        if format == "jsonl":
            obj = {
                "id": rec.id,
                "source": serialize_tagged(rec.source),
                "targets": {name: serialize_tagged(s) for name, s in rec.targets.items()},
            }
            out.write(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))
        else:
            out.write(_tsv_line(rec))
        out.write("\n")
    return out.getvalue().encode("utf-8")


def _tsv_line(rec: CorpusRecord) -> str:
    if list(rec.targets) != [TSV_SYSTEM]:
        raise SerializationError(
            f"record {rec.id!r}: TSV holds exactly one system named {TSV_SYSTEM!r}, "
            f"record has {list(rec.targets)}"
        )
    if any(ch in rec.id for ch in "\t\r\n"):
        raise SerializationError(f"record {rec.id!r}: TSV cannot encode tab or newline in id")
    return "\t".join((rec.id, serialize_tagged(rec.source), serialize_tagged(rec.targets[TSV_SYSTEM])))
