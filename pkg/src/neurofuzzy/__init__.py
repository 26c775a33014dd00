"""Adaptive neuro-fuzzy inference for one-step-ahead forecasting of monthly series."""

from .anfis import TrainConfig, TrainHistory, forward, lse_consequents, predict, premise_gradient, train
from .fis import FuzzyVariable, Rule, SugenoFis, architecture_string, grid_partition, subtractive_clustering
from .membership import Gaussian, GeneralizedBell, Trapezoidal, Triangular
from .metrics import evaluate, mape, rmse
from .timeseries import Dataset, SeriesPoint, forecast_one_step, lag_embed, split

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "FuzzyVariable",
    "Gaussian",
    "GeneralizedBell",
    "Rule",
    "SeriesPoint",
    "SugenoFis",
    "TrainConfig",
    "TrainHistory",
    "Trapezoidal",
    "Triangular",
    "architecture_string",
    "evaluate",
    "forecast_one_step",
    "forward",
    "grid_partition",
    "lag_embed",
    "lse_consequents",
    "mape",
    "predict",
    "premise_gradient",
    "rmse",
    "split",
    "subtractive_clustering",
    "train",
]
