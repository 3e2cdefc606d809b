"""Participant-grouped splitting, classifiers, and evaluation metrics."""

from .forest import ForestModel, train_forest
from .linear import LinearModel, train_linear
from .metrics import EvalReport, evaluate, evaluate_predictions, kappa_band
from .persist import load_model, model_document, save_model
from .split import SplitPlan, grouped_split, split_matrix

__all__ = [
    "EvalReport",
    "ForestModel",
    "LinearModel",
    "SplitPlan",
    "evaluate",
    "evaluate_predictions",
    "grouped_split",
    "kappa_band",
    "load_model",
    "model_document",
    "save_model",
    "split_matrix",
    "train_forest",
    "train_linear",
]
