"""Command-line entry point.

Exit codes: 0 success, 1 validation failure (or failed translation lines),
2 usage, I/O or parse failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Sequence

from . import __version__
from .corpus import FORMATS, CorpusLoadError, guess_format, loads_corpus
from .evaluate import EvaluationError, UnknownSystemError
from .harness import (
    DEFAULT_PROMPT,
    DEFAULT_RESPONSE_FIELD,
    DEFAULT_TEMPERATURE,
    build_manifest,
    emit_translation_tsv,
    translate_batch,
)
from .metrics import tag_distribution
from .report import (
    build_report,
    compare_systems,
    corpus_digest,
    emit_deltas,
    emit_outcome_csv,
    emit_sentence_log,
    emit_summary,
    emit_tag_distribution,
)
from .validate import diagnostics_to_jsonl, has_errors, validate

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2


class CliError(Exception):
    """Reported on stderr, exit code 2."""


def _temperature(value: str) -> float:
    t = float(value)
    if not 0.0 <= t <= 2.0:
        raise argparse.ArgumentTypeError(f"temperature must lie in [0, 2], got {value}")
    return t


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return n


def _systems(value: str) -> list[str]:
    names = [v.strip() for v in value.split(",") if v.strip()]
    if len(names) != 2:
        raise argparse.ArgumentTypeError("expected exactly two comma-separated system names")
    return names


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gendermt",
        description="Validate and score gender-tagged bilingual corpora.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def corpus_args(p):
        p.add_argument("corpus", help="corpus file (.jsonl or .tsv)")
        p.add_argument("--format", choices=FORMATS, help="override format detection from the file extension")

    p = sub.add_parser("validate", help="check annotations against the tagging guidelines")
    corpus_args(p)
    p.add_argument("--strict", action="store_true", help="treat warnings as errors")
    p.add_argument("--json", action="store_true", help="print diagnostics as JSON lines")

    p = sub.add_parser("stats", help="tag distribution by gender and side")
    corpus_args(p)
    p.add_argument("--json", action="store_true", help="print JSON instead of a table")

    for name, help_ in (("evaluate", "score one system"), ("compare", "score two systems and report deltas")):
        p = sub.add_parser(name, help=help_)
        corpus_args(p)
        if name == "evaluate":
            p.add_argument("--system", required=True, help="system name in the corpus targets")
        else:
            p.add_argument("--systems", required=True, type=_systems, help="two names, e.g. tower,mbart")
        p.add_argument("--out", metavar="DIR", help="write CSV/JSON/text outputs here")
        p.add_argument("--force", action="store_true",
                       help="evaluate despite validation errors, skipping records that cannot be classified")
        p.add_argument("--strict", action="store_true", help="treat validation warnings as errors")

    p = sub.add_parser("translate", help="fetch candidate translations from an HTTP JSON provider")
    p.add_argument("input", help="plain text, one source sentence per line")
    p.add_argument("--endpoint", required=True, help="provider URL, e.g. http://localhost:11434/api/generate")
    p.add_argument("--model", required=True)
    p.add_argument("--temperature", type=_temperature, default=DEFAULT_TEMPERATURE)
    p.add_argument("--parallel", type=_positive, default=1, help="concurrent requests (default 1)")
    p.add_argument("--source-lang", default="en")
    p.add_argument("--target-lang", default="it")
    p.add_argument("--template", help="JSON request template, inline or @file")
    p.add_argument("--prompt", default=DEFAULT_PROMPT, help="prompt text with {text}, {source_lang}, {target_lang}")
    p.add_argument("--response-field", default=DEFAULT_RESPONSE_FIELD, help="dotted path to the translation")
    p.add_argument("--out", metavar="FILE", help="TSV output (default: stdout)")
    p.add_argument("--manifest", metavar="FILE", help="JSON manifest (default: <out>.manifest.json)")
    p.add_argument("--backoff", type=float, default=1.0, help=argparse.SUPPRESS)
    return parser


def _load(args):
    path = args.corpus
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        corpus = loads_corpus(data, args.format or guess_format(path), name=path)
    except CorpusLoadError as exc:
        raise CliError(str(exc)) from None
    return corpus, corpus_digest(data)


def _write(out_dir: str, name: str, data: bytes) -> None:
    path = os.path.join(out_dir, name)
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror or exc}") from None


def cmd_validate(args) -> int:
    corpus, _ = _load(args)
    diags = validate(corpus)
    if args.json:
        sys.stdout.write(diagnostics_to_jsonl(diags))
    else:
        for d in diags:
            print(d)
    n_err = sum(d.severity.value == "error" for d in diags)
    logging.info("%d record(s), %d error(s), %d warning(s)", len(corpus), n_err, len(diags) - n_err)
    return EXIT_INVALID if has_errors(diags, strict=args.strict) else EXIT_OK


def cmd_stats(args) -> int:
    corpus, _ = _load(args)
    source = tag_distribution(corpus, "source")
    targets = {name: tag_distribution(corpus, name) for name in corpus.systems}
    if args.json:
        obj = {"source": source.to_dict(), "targets": {k: v.to_dict() for k, v in targets.items()}}
        sys.stdout.write(json.dumps(obj, indent=2) + "\n")
    else:
        sys.stdout.write(emit_tag_distribution(source, targets))
    return EXIT_OK


def _evaluate(args, systems: list[str]):
    corpus, digest = _load(args)
    for name in systems:
        if name not in corpus.systems:
            raise CliError(str(UnknownSystemError(None, name, corpus.systems)))
    diags = validate(corpus)
    if has_errors(diags, strict=args.strict):
        if not args.force:
            for d in diags:
                print(d, file=sys.stderr)
            print("validation failed; fix the corpus or pass --force", file=sys.stderr)
            return None
        logging.warning("proceeding despite %d diagnostic(s)", len(diags))
    try:
        report, outcomes = build_report(corpus, systems, digest, skip_invalid=args.force)
    except EvaluationError as exc:
        raise CliError(str(exc)) from None
    for rec in report.skipped:
        print(f"skipped {rec}", file=sys.stderr)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write(args.out, "outcomes.csv", emit_outcome_csv(o for s in systems for o in outcomes[s]))
        _write(args.out, "sentences.csv", emit_sentence_log(report))
        _write(args.out, "summary.json", emit_summary(report, "json"))
        _write(args.out, "summary.txt", emit_summary(report, "table"))
    return report


def cmd_evaluate(args) -> int:
    report = _evaluate(args, [args.system])
    if report is None:
        return EXIT_INVALID
    sys.stdout.write(emit_summary(report, "table").decode("utf-8"))
    return EXIT_OK


def cmd_compare(args) -> int:
    report = _evaluate(args, args.systems)
    if report is None:
        return EXIT_INVALID
    deltas = compare_systems(report, *args.systems)
    if args.out:
        _write(args.out, "deltas.csv", emit_deltas(deltas, "csv"))
        _write(args.out, "deltas.txt", emit_deltas(deltas, "table"))
    sys.stdout.write(emit_summary(report, "table").decode("utf-8"))
    sys.stdout.write("\n")
    sys.stdout.write(emit_deltas(deltas, "table").decode("utf-8"))
    return EXIT_OK


def _read_template(spec: str | None):
    if spec is None:
        return None
    try:
        if spec.startswith("@"):
            with open(spec[1:], encoding="utf-8") as fh:
                spec = fh.read()
        return json.loads(spec)
    except OSError as exc:
        raise CliError(f"cannot read template: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"template is not valid JSON: {exc}") from None


def cmd_translate(args) -> int:
    template = _read_template(args.template)
    try:
        with open(args.input, encoding="utf-8") as fh:
            lines = [(str(n), line.strip()) for n, line in enumerate(fh, start=1) if line.strip()]
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {args.input}: {exc}") from None
    if not lines:
        raise CliError(f"{args.input}: no input lines")
    responses = translate_batch(
        lines, args.endpoint, args.model,
        template=template, prompt=args.prompt, response_field=args.response_field,
        temperature=args.temperature, source_lang=args.source_lang, target_lang=args.target_lang,
        parallel=args.parallel, backoff=args.backoff,
    )
    tsv = emit_translation_tsv(responses)
    manifest = build_manifest(
        responses, args.endpoint, args.model, args.temperature, args.source_lang, args.target_lang,
        template, args.prompt, args.response_field,
    )
    manifest_path = args.manifest or (args.out + ".manifest.json" if args.out else None)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(tsv)
    else:
        sys.stdout.write(tsv.decode("utf-8"))
    if manifest_path:
        with open(manifest_path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, ensure_ascii=False, indent=2)
            fh.write("\n")
    failed = manifest["failed"]
    if failed:
        print(f"{len(failed)} of {len(responses)} line(s) failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "stats": cmd_stats,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
    "translate": cmd_translate,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"gendermt: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
