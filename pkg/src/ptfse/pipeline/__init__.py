"""Dataset mixing, training loop, enhancement inference, and evaluation."""

from .dataset import MixItem, drop_band_select, dynamic_mix_batch, load_pool
from .evaluation import EvaluationRecord, evaluate
from .inference import enhance, load_params
from .training import TrainConfig, TrainReport, report_line, train, train_step

__all__ = [
    "MixItem",
    "drop_band_select",
    "dynamic_mix_batch",
    "load_pool",
    "EvaluationRecord",
    "evaluate",
    "enhance",
    "load_params",
    "TrainConfig",
    "TrainReport",
    "report_line",
    "train",
    "train_step",
]
