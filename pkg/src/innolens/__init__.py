"""innolens: prompted-LLM measurement of innovation signals in app texts.

Library surface: corpus and scheme types, prompt templates, rule baselines,
batch inference orchestration, output cleaning, reliability-aware metrics,
and an experiment runner with a CLI (`innolens`).
"""

from .baselines import (
    KeywordDictionary,
    UnparseableVersion,
    VersionPair,
    agarwal_kapoor_dictionary,
    classify_dictionary,
    classify_dictionary_character,
    classify_version,
    kircher_foerderer_dictionary,
    load_builtin_dictionary,
    preprocess,
)
from .cleaning import (
    CleaningResult,
    clean,
    clean_rows,
    predictions_from_cleaned,
    read_cleaned,
    write_cleaned,
)
from .corpus import (
    BUILTIN_SCHEMES,
    STUDY1_UPDATES,
    STUDY2_REVIEWS,
    Document,
    EmptyCorpus,
    InvalidLabelSet,
    LabeledCorpus,
    MissingLabel,
    TaskScheme,
    WrongSchemeKind,
    binarize_innovative,
    class_distribution,
    corpus_from_pairs,
    encode_one_vs_rest,
    load_corpus,
    save_corpus,
)
from .metrics import (
    ClassMetrics,
    IdSetMismatch,
    KappaResult,
    MetricsReport,
    NotEnoughRuns,
    binary_report,
    cohens_kappa,
    consistency_rate,
    multiclass_report,
    multilabel_report,
    report_to_csv,
    report_to_json,
)
from .prompts import (
    AUTO_COT_SENTENCE,
    PromptTemplate,
    RenderedPrompt,
    TASKS,
    TemplateFormatError,
    UnknownTemplate,
    VARIANTS,
    builtin_pairs,
    builtin_template_source,
    load_builtin,
    load_template_file,
    parse_template,
    serialize_template,
)
from .sampling import (
    BALANCED,
    REPRESENTATIVE,
    SamplingSpec,
    SizeTooSmall,
    balanced_quotas,
    largest_remainder_quotas,
    subsample,
)
from .stemming import porter_stem

__version__ = "0.1.0"
