"""Maxima of binary branching random walks in piecewise-constant variance environments."""
from .env import Regime, VarianceProfile, classify, variance_at
from .theory import Model, Prediction, evaluate_centering, predict

__version__ = "0.1.0"

__all__ = [
    "Model", "Prediction", "Regime", "VarianceProfile", "classify",
    "evaluate_centering", "predict", "variance_at", "__version__",
]
