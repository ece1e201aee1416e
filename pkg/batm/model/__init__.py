"""The bi-level attention model: parameters and forward pass."""

from .attention import (
    DocumentLayer,
    HeadLayer,
    classify,
    document_attention,
    head_attention,
    head_scores,
    log_classify,
    masked_softmax,
    multi_head,
    pool_scores,
)
from .forward import ForwardRecord, forward
from .params import (
    TENSOR_NAMES,
    ClassifierParams,
    HeadParams,
    ModelParams,
    PoolParams,
    init_params,
    xavier_bound,
)
