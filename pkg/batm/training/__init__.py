"""Loss, gradients, optimization, training loop, evaluation and checkpoints."""

from .backward import (
    GradientSet,
    NonFiniteError,
    backward,
    cross_entropy_gradients,
    entropy_weight_gradient,
    mean_gradients,
)
from .checkpoint import load_checkpoint, save_checkpoint
from .gradcheck import DEFAULT_THRESHOLD, finite_diff_check, random_gradcheck, relative_error
from .loss import cross_entropy, doc_entropy, head_doc_entropies, total_loss
from .metrics import classification_metrics, evaluate, predict
from .models import EpochRecord, EvaluationResult, GradCheckReport, GradCheckSummary, LossBreakdown
from .optimizer import AdamState, adam_step, lr_for_epoch
from .trainer import TrainResult, build_embedding, train, train_step
