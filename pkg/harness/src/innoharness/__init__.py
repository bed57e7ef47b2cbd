"""innoharness: benchmark suites around the innolens formats.

Classical classifiers over term-weighting or averaged word-vector features,
a convolutional text network, and fine-tuned encoder language models, all
emitting the innolens cleaned-prediction format so the innolens metrics
module scores them.
"""

from .embeddings import (
    EMBEDDING_VARIANTS,
    EmbeddingVariant,
    document_vectors,
    fetch,
    load_vectors,
)
from .errors import (
    ConfigMismatch,
    EmbeddingUnavailable,
    IntegrityError,
    SearchFailed,
    StratificationError,
    UnavailableFamily,
    WeightsUnavailable,
)
from .families import (
    CLASSICAL_TRIALS,
    CNN_TRIALS,
    PLM_TRIALS,
    classifier_families,
)
from .features import (
    PRETRAINED_EMBEDDING,
    TERM_WEIGHTING,
    FeatureSpec,
    feature_spec_from_dict,
    sample_term_weighting,
)
from .plm import PLM_FAMILIES, PlmResult, PlmTrial, plm_finetune_eval, sample_plm_params
from .predict import fit_predict, load_config
from .records import (
    decode_one_vs_rest,
    prediction_rows,
    targets,
    validate_prediction_rows,
)
from .search import (
    SearchResult,
    SearchSpec,
    TrialResult,
    check_stratifiable,
    search,
    write_trial_log,
)
from .textcnn import sample_cnn_params
from .tokens import build_vocabulary, encode, tokenize

__version__ = "0.1.0"
