from __future__ import annotations

import math
from typing import Tuple

import numpy as np

from ...core.exceptions import ConfigurationError, StateError, require_finite


class FifoQueue:
    """Bounded ring buffer of reals; once full, every push evicts the oldest entry."""

    def __init__(self, capacity: int) -> None:
        if capacity < 1:
            raise ConfigurationError("Queue capacity must be positive", payload={"capacity": capacity})
        self.capacity = int(capacity)
        self._buffer = np.zeros(self.capacity)
        self._head = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def values(self) -> np.ndarray:
        """Current contents, oldest first."""
        if self._size < self.capacity:
            return self._buffer[: self._size].copy()
        return np.concatenate([self._buffer[self._head :], self._buffer[: self._head]])

    def _raw(self) -> np.ndarray:
        return self._buffer[: self._size] if self._size < self.capacity else self._buffer

    def push_many(self, values: np.ndarray) -> None:
        batch = np.asarray(values, dtype=float).reshape(-1)
        require_finite("queue value", batch)
        if batch.size >= self.capacity:
            self._buffer[:] = batch[-self.capacity :]
            self._head = 0
            self._size = self.capacity
            return
        end = self._head + batch.size
        if end <= self.capacity:
            self._buffer[self._head : end] = batch
        else:
            split = self.capacity - self._head
            self._buffer[self._head :] = batch[:split]
            self._buffer[: end - self.capacity] = batch[split:]
        self._head = end % self.capacity
        self._size = min(self._size + batch.size, self.capacity)


def fifo_push(q: FifoQueue, v: float) -> FifoQueue:
    q.push_many(np.array([v], dtype=float))
    return q


def fifo_push_many(q: FifoQueue, values: np.ndarray) -> FifoQueue:
    q.push_many(values)
    return q


def quantile(q: FifoQueue, alpha: float) -> float:
    """Nearest-rank percentile: element at index ceil(alpha/100 * n) - 1 of the sorted contents."""
    if len(q) == 0:
        raise StateError("Quantile of an empty queue; warm the queue up first")
    if not 0.0 <= alpha <= 100.0:
        raise ConfigurationError("Percentile must lie in [0, 100]", payload={"alpha": alpha})
    contents = q._raw()
    n = contents.size
    rank = max(math.ceil(alpha * n / 100.0) - 1, 0)
    return float(np.partition(contents, rank)[rank])


def extremes(q: FifoQueue) -> Tuple[float, float]:
    if len(q) == 0:
        raise StateError("Extremes of an empty queue")
    contents = q._raw()
    return float(contents.min()), float(contents.max())
