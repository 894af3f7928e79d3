"""Manager models: the board-token transformer, feature-based students,
training, checkpoints, and the policy-iteration loop."""

from centaur.models.checkpoint import CheckpointError, load_model, save_model
from centaur.models.feature_models import (
    FEATURE_DIM,
    FeatureMLP,
    FeatureMLPConfig,
    LogisticConfig,
    LogisticManagerModel,
)
from centaur.models.rollouts import (
    IterationArtifacts,
    PolicyIterationResult,
    policy_iteration,
    rollout_label,
)
from centaur.models.train import (
    DistillReport,
    GradientCheckReport,
    LabeledDecision,
    TrainConfig,
    TrainReport,
    TrainingError,
    accuracy,
    distill,
    fit_classifier,
    gradient_check,
    train_supervised,
)
from centaur.models.transformer import (
    TransformerConfig,
    TransformerManager,
    extract_cls_attention,
    forward,
)

__all__ = [
    "CheckpointError", "load_model", "save_model", "FEATURE_DIM",
    "FeatureMLP", "FeatureMLPConfig", "LogisticConfig",
    "LogisticManagerModel", "IterationArtifacts", "PolicyIterationResult",
    "policy_iteration", "rollout_label", "DistillReport",
    "GradientCheckReport", "LabeledDecision", "TrainConfig", "TrainReport",
    "TrainingError", "accuracy", "distill", "fit_classifier",
    "gradient_check", "train_supervised", "TransformerConfig",
    "TransformerManager", "extract_cls_attention", "forward",
]
