"""C_v topic coherence over boolean sliding windows."""

from .models import CoherenceResult, TopicCoherence, WindowCounts
from .scoring import (
    DEFAULT_EPS,
    context_vectors,
    coherence_report,
    cv_score,
    format_coherence_table,
    npmi,
    topic_coherence,
)
from .windows import DEFAULT_WINDOW_SIZE, build_window_counts, count_document, iter_windows
