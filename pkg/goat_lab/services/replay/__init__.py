from .normalizer import Normalizer, fit_normalizer
from .queues import FifoQueue, extremes, fifo_push, fifo_push_many, quantile
from .relabel import Batch, RelabeledSample, relabel, sample_batch
from .summary import summarize_dataset

__all__ = [
    "Batch",
    "FifoQueue",
    "Normalizer",
    "RelabeledSample",
    "extremes",
    "fifo_push",
    "fifo_push_many",
    "fit_normalizer",
    "quantile",
    "relabel",
    "sample_batch",
    "summarize_dataset",
]
