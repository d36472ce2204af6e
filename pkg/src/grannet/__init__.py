"""Granular neural network regression, granularity allocation and channel matching."""

from .errors import (
    ConfigurationError,
    DimensionError,
    DivergenceError,
    GrannetError,
    InvalidInputError,
    OptimizerError,
    ParseError,
)
from .interval import Interval, add, affine_image, apply_monotone, contains, scale
from .mlp import NetworkModel, TrainingConfig, forward, gradient, load_model, predict, save_model, train
from .granulation import (
    GranularityAllocation,
    ObjectiveConfig,
    Scores,
    balance,
    coverage,
    evaluate,
    granulate,
    interval_forward,
    objective_q1,
    specificity,
)
from .allocator import AllocationResult, PsoConfig, optimize, project_to_budget
from .channels import Channel, ChannelCatalog, default_catalog, load_catalog, match_degree, recommend
from .cf import RatingMatrix, cosine_similarity, mae, predict_knn
from .data import Dataset, Scaler, load_bundled_dataset, load_dataset, normalize, split

__version__ = "0.1.0"
