"""Gender-tagged bilingual corpus evaluation: parse, validate, classify, score."""

__version__ = "0.1.0"

from .tagged import (  # noqa: E402
    GenderClass,
    GenderTag,
    TaggedSentence,
    TaggedToken,
    entity_map,
    parse_tagged,
    serialize_tagged,
)
from .corpus import Corpus, CorpusRecord, load_corpus, loads_corpus, save_corpus  # noqa: E402
from .validate import Diagnostic, Severity, validate  # noqa: E402
from .evaluate import Category, Outcome, classify_corpus, classify_record  # noqa: E402
from .metrics import (  # noqa: E402
    GenderCounts,
    aggregate,
    gender_metrics,
    ambiguity_stats,
    f1,
    precision,
    recall,
    tag_distribution,
)
from .report import EvaluationReport, build_report, compare_systems, emit_outcome_csv, emit_summary  # noqa: E402
