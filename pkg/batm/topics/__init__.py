"""Topic descriptors and entropy diagnostics built from the first-level attention."""

from .descriptors import topic_descriptor, topic_descriptors
from .entropy import (
    entropy_report,
    head_token_means,
    token_entropies,
    token_entropy,
    vocabulary_entropy,
)
from .matrix import CorpusScan, TopicMatrix, build_topic_matrices, scan_corpus
from .models import EntropyReport, TopicDescriptor, TopicTerm
