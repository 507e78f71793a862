"""Collect candidate translations from an HTTP JSON provider.

The output is raw material for annotation: a TSV of ``id, source,
translation`` plus a JSON manifest recording model, temperature and
timestamp. Translations are never tagged; tag-shaped chunks returned by a
provider are dropped.

The default request template targets an Ollama-style ``/api/generate``
endpoint. Any other provider works with a custom template and response
field path.
"""

from __future__ import annotations

import datetime as _dt
import io
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

import requests

from . import __version__
from .tagged import is_tag_shaped

log = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_TEMPERATURE",
    "DEFAULT_TEMPLATE",
    "DEFAULT_PROMPT",
    "DEFAULT_RESPONSE_FIELD",
    "MAX_ATTEMPTS",
    "ProviderRequest",
    "ProviderResponse",
    "ProviderError",
    "render_template",
    "extract_field",
    "strip_tags",
    "translate_one",
    "translate_batch",
    "emit_translation_tsv",
    "build_manifest",
]

DEFAULT_TEMPERATURE = 0.2
MAX_ATTEMPTS = 3
DEFAULT_BACKOFF = 1.0
DEFAULT_TIMEOUT = 120.0

DEFAULT_PROMPT = (
    "Translate the following text from {source_lang} to {target_lang}.\n"
    "{source_lang}: {text}\n"
    "{target_lang}:"
)
DEFAULT_TEMPLATE: dict[str, Any] = {
    "model": "{model}",
    "prompt": "{prompt}",
    "stream": False,
    "options": {"temperature": "{temperature}"},
}
DEFAULT_RESPONSE_FIELD = "response"


@dataclass(frozen=True)
class ProviderRequest:
    text: str
    model: str
    source_lang: str = "en"
    target_lang: str = "it"
    temperature: float = DEFAULT_TEMPERATURE

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must lie in [0, 2], got {self.temperature}")
        if not self.model:
            raise ValueError("model identifier must be non-empty")

    def values(self, prompt: str = DEFAULT_PROMPT) -> dict[str, Any]:
        v: dict[str, Any] = {
            "text": self.text,
            "model": self.model,
            "source_lang": self.source_lang,
            "target_lang": self.target_lang,
            "temperature": self.temperature,
        }
        v["prompt"] = _substitute(prompt, v)
        return v


@dataclass
class ProviderResponse:
    line_id: str
    source: str
    translation: str | None = None
    latency: float | None = None
    attempts: int = 0
    raw: Any = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and bool(self.translation)


class ProviderError(RuntimeError):
    pass


def _substitute(s: str, values: dict[str, Any]) -> str:
    for key, val in values.items():
        s = s.replace("{" + key + "}", str(val))
    return s


def render_template(template: Any, values: dict[str, Any]) -> Any:
    """Fill ``{name}`` placeholders inside a JSON-like template.

    A string that is exactly one placeholder takes the raw value, so
    ``"{temperature}"`` becomes the number 0.2 rather than the text "0.2".
    """
    if isinstance(template, dict):
        return {k: render_template(v, values) for k, v in template.items()}
    if isinstance(template, list):
        return [render_template(v, values) for v in template]
    if isinstance(template, str):
        if template.startswith("{") and template.endswith("}") and template[1:-1] in values:
            return values[template[1:-1]]
        return _substitute(template, values)
    return template


def extract_field(payload: Any, path: str) -> Any:
    """Follow a dotted path (``choices.0.message.content``) into a JSON value."""
    cur = payload
    for part in path.split(".") if path else ():
        if isinstance(cur, list):
            try:
                cur = cur[int(part)]
            except (ValueError, IndexError):
                raise ProviderError(f"response has no element {part!r} on path {path!r}") from None
        elif isinstance(cur, dict):
            if part not in cur:
                raise ProviderError(f"response has no field {part!r} on path {path!r}")
            cur = cur[part]
        else:
            raise ProviderError(f"cannot descend into {type(cur).__name__} at {part!r} on path {path!r}")
    return cur


def strip_tags(text: str) -> str:
    """Drop tag-shaped chunks and collapse whitespace to single spaces."""
    return " ".join(chunk for chunk in text.split() if not is_tag_shaped(chunk))


def translate_one(
    request: ProviderRequest,
    endpoint: str,
    line_id: str = "",
    template: Any = None,
    prompt: str = DEFAULT_PROMPT,
    response_field: str = DEFAULT_RESPONSE_FIELD,
    attempts: int = MAX_ATTEMPTS,
    backoff: float = DEFAULT_BACKOFF,
    timeout: float = DEFAULT_TIMEOUT,
    sleep: Callable[[float], None] = time.sleep,
    session: requests.Session | None = None,
) -> ProviderResponse:
    """Send one request, retrying with exponential backoff; never raises."""
    body = render_template(DEFAULT_TEMPLATE if template is None else template, request.values(prompt))
    post = (session or requests).post
    resp = ProviderResponse(line_id, request.text)
    for attempt in range(1, attempts + 1):
        resp.attempts = attempt
        start = time.perf_counter()
        try:
            r = post(endpoint, json=body, timeout=timeout)
            elapsed = time.perf_counter() - start
            try:
                payload = r.json()
            except ValueError:
                payload = r.text
            resp.raw = payload
            if not r.ok:
                raise ProviderError(f"HTTP {r.status_code}")
            value = extract_field(payload, response_field)
            if not isinstance(value, str):
                raise ProviderError(f"field {response_field!r} is {type(value).__name__}, not a string")
            text = strip_tags(value)
            if not text:
                raise ProviderError("empty translation")
        except (requests.RequestException, ProviderError) as exc:
            resp.error = str(exc) or type(exc).__name__
            log.warning("line %s attempt %d/%d failed: %s", line_id, attempt, attempts, resp.error)
            if attempt < attempts:
                sleep(backoff * 2 ** (attempt - 1))
            continue
        resp.translation = text
        resp.latency = elapsed
        resp.error = None
        return resp
    return resp


def translate_batch(
    lines: Iterable[str] | Iterable[tuple[str, str]],
    endpoint: str,
    model: str,
    template: Any = None,
    prompt: str = DEFAULT_PROMPT,
    response_field: str = DEFAULT_RESPONSE_FIELD,
    temperature: float = DEFAULT_TEMPERATURE,
    source_lang: str = "en",
    target_lang: str = "it",
    parallel: int = 1,
    **kwargs,
) -> list[ProviderResponse]:
    """Translate every line; output order matches input order.

    ``lines`` holds plain strings (ids become 1, 2, ...) or ``(id, text)``
    pairs. Per-line failures are recorded on the response, not raised.
    """
    items = [(str(i), x) if isinstance(x, str) else (str(x[0]), x[1]) for i, x in enumerate(lines, start=1)]
    if not items:
        raise ValueError("no input lines")
    if parallel < 1:
        raise ValueError("parallel must be >= 1")

    def work(item):
        line_id, text = item
        req = ProviderRequest(text, model, source_lang, target_lang, temperature)
        return translate_one(req, endpoint, line_id, template, prompt, response_field, **kwargs)

    if parallel == 1:
        return [work(it) for it in items]
    with ThreadPoolExecutor(max_workers=parallel) as pool:
        return list(pool.map(work, items))


def emit_translation_tsv(responses: Sequence[ProviderResponse]) -> bytes:
    """``id<TAB>source<TAB>translation`` for successful lines only."""
    out = io.StringIO()
    for r in responses:
        if r.ok:
            out.write(f"{r.line_id}\t{' '.join(r.source.split())}\t{r.translation}\n")
    return out.getvalue().encode("utf-8")


def build_manifest(
    responses: Sequence[ProviderResponse],
    endpoint: str,
    model: str,
    temperature: float,
    source_lang: str = "en",
    target_lang: str = "it",
    template: Any = None,
    prompt: str = DEFAULT_PROMPT,
    response_field: str = DEFAULT_RESPONSE_FIELD,
    timestamp: str | None = None,
) -> dict:
    if timestamp is None:
        timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return {
        "tool": f"gendermt {__version__}",
        "timestamp": timestamp,
        "endpoint": endpoint,
        "model": model,
        "temperature": temperature,
        "source_lang": source_lang,
        "target_lang": target_lang,
        "template": DEFAULT_TEMPLATE if template is None else template,
        "prompt": prompt,
        "response_field": response_field,
        "lines": len(responses),
        "succeeded": sum(r.ok for r in responses),
        "failed": [r.line_id for r in responses if not r.ok],
        "responses": [
            {
                "id": r.line_id,
                "ok": r.ok,
                "attempts": r.attempts,
                "latency": r.latency,
                "error": r.error,
                "raw": r.raw,
            }
            for r in responses
        ],
    }
