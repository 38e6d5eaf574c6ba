"""Task similarity between partition-defined classification tasks.

Exact directed similarity (and its tie-adjusted variant) between
distributions whose Bayes rules are constant on convex cells, plus
sample-based estimation through composeable histogram/tree learners,
transfer-efficiency experiments, and a CLI harness.
"""

__version__ = "0.1.0"

from .distributions import (
    LabeledSample,
    PartitionDistribution,
    SampleSet,
    bayes_label,
    bayes_labels,
    bayes_risk,
    builtin,
    fxor,
    grid_distribution,
    load_distribution,
    optimal_partition,
    permute_labels,
    quads,
    rxor,
    sample,
    sample_transfer,
    save_distribution,
    with_label_noise,
    xor,
)
from .empirical import (
    EtsEstimate,
    LearnerConfig,
    ReplicationReport,
    convergence_study,
    empirical_matrix,
    ets,
    run_replications,
    transfer_efficiency,
    transfer_experiment,
)
from .geometry import (
    ConvexPolygon,
    HalfPlane,
    Partition,
    Point2,
    area,
    clip_convex_polygon,
    diameter,
    intersect,
    is_subpartition,
    make_grid_partition,
    validate_partition,
)
from .learners import (
    ComposeableDecisionFunction,
    FittedModel,
    TreeNode,
    adapt_to_target,
    empirical_risk,
    fit_histogram,
    fit_tree,
    induced_partition,
    load_model,
    predict,
    save_model,
)
from .similarity import (
    AnalyticMatrices,
    LabelMassProfile,
    SimilarityResult,
    analytic_matrix,
    are_orthogonal,
    ats,
    is_adversarial,
    label_mass_profiles,
    symmetric_ats,
    symmetric_ts,
    ts,
)

__all__ = [name for name in dir() if not name.startswith("_")]
