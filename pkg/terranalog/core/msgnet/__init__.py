from .activations import export_activations, write_activations
from .checkpoint import load_checkpoint, save_checkpoint
from .evaluation import CrossValidationReport, FoldResult, kfold_evaluate
from .gcn import gcn_backward, gcn_forward, node_activations, pooled_count, sigmoid
from .metrics import (
    ClassificationMetrics,
    confusion,
    f1_from,
    format_mean_std,
    metrics,
    score_metrics,
    summarize,
)
from .mlp import mlp_backward, mlp_forward
from .optim import AdamW, clip_gradients
from .pairs import LabeledPair, resolve_pairs, stratified_folds
from .params import GcnParams, Gradients, MlpParams
from .siamese import SiameseModel, bce_loss, bce_logit_gradient
from .trainer import EpochRecord, TrainingResult, train, write_history
