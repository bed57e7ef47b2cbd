from .batch import (
    DEFAULT_MAX_OUTPUT_TOKENS,
    DEFAULT_REASONING_EFFORT,
    DEFAULT_SEED,
    BatchJob,
    BatchRequest,
    ExperimentCoord,
    MalformedCustomId,
    ModelSpec,
    RequestConfig,
    TemperatureCapExceeded,
    build_batch,
    encode_custom_id,
    parse_custom_id,
    read_batch_rows,
    read_raw_rows,
    write_batch_file,
    write_raw_rows,
)
from .finetune import (
    FineTuneRecord,
    completion_for,
    export_hash,
    prepare_finetune_export,
    serialize_finetune,
    write_finetune_file,
)
from .mock import MockProvider
from .providers import (
    AnthropicBatchAdapter,
    BatchClient,
    OpenAIStyleBatchAdapter,
    PermanentProviderError,
    PollStatus,
    ProviderError,
    TransientProviderError,
    with_retries,
)

__all__ = [
    "DEFAULT_MAX_OUTPUT_TOKENS",
    "DEFAULT_REASONING_EFFORT",
    "DEFAULT_SEED",
    "BatchJob",
    "BatchRequest",
    "ExperimentCoord",
    "MalformedCustomId",
    "ModelSpec",
    "RequestConfig",
    "TemperatureCapExceeded",
    "build_batch",
    "encode_custom_id",
    "parse_custom_id",
    "read_batch_rows",
    "read_raw_rows",
    "write_batch_file",
    "write_raw_rows",
    "FineTuneRecord",
    "completion_for",
    "export_hash",
    "prepare_finetune_export",
    "serialize_finetune",
    "write_finetune_file",
    "MockProvider",
    "AnthropicBatchAdapter",
    "BatchClient",
    "OpenAIStyleBatchAdapter",
    "PermanentProviderError",
    "PollStatus",
    "ProviderError",
    "TransientProviderError",
    "with_retries",
]
