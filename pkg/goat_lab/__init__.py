"""Offline goal-conditioned RL laboratory on a 2D point-reaching task."""

__version__ = "0.1.0"
