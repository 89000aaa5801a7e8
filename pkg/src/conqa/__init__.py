"""Logical-implication consistency for binary question answering.

Tools to annotate implication relations between yes/no propositions, score a
model's answers for accuracy and consistency, penalize violations with a
differentiable loss, generate a synthetic benchmark with exactly known
relations, and train a toy model that exposes the accuracy/consistency
trade-off.
"""

from .converter import AUXILIARIES, BinaryQA, qa_to_proposition
from .errors import (
    ConflictError,
    ConqaError,
    DanglingReferenceError,
    DimensionMismatchError,
    EmptyGraphError,
    InfeasibleError,
    MissingPredictionError,
    NonBinaryAnswerError,
    UnsupportedQuestionError,
)
from .loss import (
    EPSILON,
    LossConfig,
    ProbabilityPair,
    clamp_probability,
    consistency_loss,
    consistency_loss_grad,
    joint_loss,
)
from .metric import (
    FLIP_FIRST,
    FLIP_RANDOM,
    FLIP_SECOND,
    FLIP_STRATEGIES,
    ConsistencyReport,
    Prediction,
    PredictionSet,
    accuracy,
    build_report,
    consistency_ratio,
    count_inconsistencies,
    evaluate_truth,
    flip_correction,
    inconsistent_arrows,
    normalize_answer,
)
from .relations import (
    ImplicationArrow,
    ImplicationGraph,
    Proposition,
    RelationKind,
    RelationRecord,
    build_graph,
    invert,
    to_arrows,
)
from .synth import (
    Formula,
    Literal,
    Query,
    SyntheticDataset,
    TARGET_RELATION_MIX,
    World,
    evaluate_formula,
    formula_truth_table,
    generate,
    oracle_relation,
    parse_question,
    render_question,
)
from .trainer import (
    EpochMetrics,
    MetricsHistory,
    SweepResult,
    SweepSummary,
    ToyModel,
    TrainConfig,
    TrainResult,
    batch_loss_and_grad,
    feature_length,
    featurize,
    predict_prob,
    sample_batches,
    summarize_sweep,
    sweep,
    train,
)

__version__ = "0.1.0"
