from terranalog.core.msgnet.metrics import (
    ClassificationMetrics,
    confusion,
    f1_from,
    format_mean_std,
    metrics,
)

from .ablation import ABLATION_COLUMNS, AblationRow, ablation_run, parse_variant
from .dataset import (
    balance_summary,
    load_graph_directory,
    load_pair_dataset,
    write_pair_dataset,
)
from .funnel import PipelineResult, run_pipeline
from .histogram import SimilarityHistogram, similarity_histogram, write_histogram
from .manifest import load_candidates, save_candidates, write_manifest
from .retrieval import (
    RankedCandidate,
    pairwise_distances,
    rank_scores,
    retrieve,
    write_distance_matrix,
)
