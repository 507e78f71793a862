"""Inline gender tag grammar.

Annotated text is whitespace-tokenized. A chunk of the form ``<M1>``,
``<F12>`` or ``<A3>`` is a tag and binds to the token right before it::

    we <F1> are overreacting

Clitics are expected to be split by the corpus author (``you <A1> 're``).
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator

__all__ = [
    "GenderClass",
    "GenderTag",
    "TaggedToken",
    "TaggedSentence",
    "TagParseError",
    "TagAtSentenceStart",
    "DoubleTag",
    "MalformedTag",
    "TAG_RE",
    "parse_tagged",
    "serialize_tagged",
    "entity_map",
    "is_tag_shaped",
]

# [0-9] rather than \d: only ASCII digits are part of the grammar.
TAG_RE = re.compile(r"<([MFA])([1-9][0-9]*)>")
_CHUNK_RE = re.compile(r"\S+")


class GenderClass(str, enum.Enum):
    MASCULINE = "M"
    FEMININE = "F"
    AMBIGUOUS = "A"

    def __str__(self) -> str:
        return self.value


M = GenderClass.MASCULINE
F = GenderClass.FEMININE
A = GenderClass.AMBIGUOUS


@dataclass(frozen=True)
class GenderTag:
    gender: GenderClass
    entity_index: int

    def __post_init__(self):
        if not isinstance(self.gender, GenderClass):
            object.__setattr__(self, "gender", GenderClass(self.gender))
        if isinstance(self.entity_index, bool) or not isinstance(self.entity_index, int):
            raise TypeError(f"entity index must be an int, got {self.entity_index!r}")
        if self.entity_index < 1:
            raise ValueError(f"entity index must be >= 1, got {self.entity_index}")

    def __str__(self) -> str:
        return f"<{self.gender.value}{self.entity_index}>"

    @classmethod
    def parse(cls, chunk: str) -> "GenderTag | None":
        m = TAG_RE.fullmatch(chunk)
        if m is None:
            return None
        return cls(GenderClass(m.group(1)), int(m.group(2)))


def is_tag_shaped(chunk: str) -> bool:
    """True for chunks the parser treats as tags, well-formed or not."""
    return len(chunk) >= 2 and chunk.startswith("<") and chunk.endswith(">")


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    tag: GenderTag | None = None

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")
        if any(ch.isspace() for ch in self.surface):
            raise ValueError(f"token surface contains whitespace: {self.surface!r}")
        # Anything starting with '<' and ending with '>' would re-parse as a
        # tag (or a malformed one), breaking round-trip.
        if is_tag_shaped(self.surface):
            raise ValueError(f"token surface looks like a tag: {self.surface!r}")

    def __str__(self) -> str:
        if self.tag is None:
            return self.surface
        return f"{self.surface} {self.tag}"


@dataclass(frozen=True)
class TaggedSentence:
    tokens: tuple[TaggedToken, ...] = ()

    def __post_init__(self):
        if not isinstance(self.tokens, tuple):
            object.__setattr__(self, "tokens", tuple(self.tokens))

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[TaggedToken]:
        return iter(self.tokens)

    def __str__(self) -> str:
        return serialize_tagged(self)

    def tags(self) -> Iterator[tuple[int, GenderTag]]:
        """Yield ``(token_position, tag)`` for every tagged token."""
        for pos, tok in enumerate(self.tokens):
            if tok.tag is not None:
                yield pos, tok.tag

    @property
    def tag_count(self) -> int:
        return sum(1 for tok in self.tokens if tok.tag is not None)

    @property
    def plain_text(self) -> str:
        return " ".join(tok.surface for tok in self.tokens)


class TagParseError(ValueError):
    """A tag chunk that cannot be bound. ``offset`` is a UTF-8 byte offset."""

    def __init__(self, detail: str, offset: int, chunk: str):
        super().__init__(f"{detail} at byte {offset}: {chunk!r}")
        self.detail = detail
        self.offset = offset
        self.chunk = chunk


class TagAtSentenceStart(TagParseError):
    pass


class DoubleTag(TagParseError):
    pass


class MalformedTag(TagParseError):
    pass


def parse_tagged(text: str) -> TaggedSentence:
    tokens: list[TaggedToken] = []
    last_was_tag = False
    for m in _CHUNK_RE.finditer(text):
        chunk = m.group()
        if not is_tag_shaped(chunk):
            tokens.append(TaggedToken(chunk))
            last_was_tag = False
            continue
        tag = GenderTag.parse(chunk)
        if tag is None:
            raise MalformedTag("malformed tag", _byte_offset(text, m.start()), chunk)
        if not tokens:
            raise TagAtSentenceStart("tag with no preceding token", _byte_offset(text, m.start()), chunk)
        if last_was_tag:
            raise DoubleTag("second tag on one token", _byte_offset(text, m.start()), chunk)
        tokens[-1] = TaggedToken(tokens[-1].surface, tag)
        last_was_tag = True
    return TaggedSentence(tuple(tokens))


def _byte_offset(text: str, char_offset: int) -> int:
    return len(text[:char_offset].encode("utf-8"))


def serialize_tagged(sentence: TaggedSentence) -> str:
    return " ".join(str(tok) for tok in sentence.tokens)


def entity_map(sentence: TaggedSentence) -> dict[int, list[tuple[int, GenderClass]]]:
    """Group tag mentions by entity index, keys ascending, mentions in token order."""
    buckets: dict[int, list[tuple[int, GenderClass]]] = {}
    for pos, tag in sentence.tags():
        buckets.setdefault(tag.entity_index, []).append((pos, tag.gender))
    return dict(sorted(buckets.items()))
