"""Error types shared across the harness."""


class ConfigMismatch(Exception):
    """Raised when a persisted configuration does not fit the given inputs."""


class StratificationError(Exception):
    """Raised when the train corpus cannot support stratified folding."""


class SearchFailed(Exception):
    """Raised when every trial of a search errored out."""


class WeightsUnavailable(Exception):
    """Raised when pretrained weights cannot be fetched or loaded."""


class EmbeddingUnavailable(Exception):
    """Raised when a word-vector file is neither cached nor fetchable."""


class IntegrityError(Exception):
    """Raised when a downloaded artifact does not match its recorded digest."""


class UnavailableFamily(Exception):
    """Raised when a classifier family needs an optional package that is absent."""
