"""
Imitation weights.

    w(s, a, g') = uw(s, g') * eaw(A) * dsw(A) * drw(i - t)

Every factor works on scalars and on numpy arrays. Disabled factors (use_* flags, drw_enabled) are 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..replay.relabel import Batch, RelabeledSample
from ...core.exceptions import RelabelIndexError, require_finite
from ...schemas.configs import WeightConfig

ArrayLike = np.ndarray | float


def _out(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def eaw(A: ArrayLike, cfg: WeightConfig) -> ArrayLike:
    """min(exp(beta * A), M), evaluated in log space so large advantages cannot overflow."""
    adv = np.asarray(A, dtype=float)
    require_finite("advantage", adv)
    log_clip = np.log(cfg.eaw_clip)
    return _out(np.exp(np.minimum(cfg.beta * adv, log_clip)))


def chi2_weight(A: ArrayLike, cfg: WeightConfig) -> ArrayLike:
    """clip(max(A + c, 0), 0, M); replaces eaw when cfg.kind == "chi2"."""
    adv = np.asarray(A, dtype=float)
    require_finite("advantage", adv)
    return _out(np.clip(adv + cfg.chi2_offset, 0.0, cfg.eaw_clip))


def dsw(A: ArrayLike, c: float, cfg: WeightConfig) -> ArrayLike:
    adv = np.asarray(A, dtype=float)
    return _out(np.where(adv >= c, 1.0, cfg.eps_low))


def normalized_std(std_raw: ArrayLike, std_min: float, std_max: float) -> ArrayLike:
    raw = np.asarray(std_raw, dtype=float)
    span = std_max - std_min
    if span <= 0.0:
        return _out(np.zeros_like(raw))
    return _out(np.clip((raw - std_min) / span, 0.0, 1.0))


def uw(std_raw: ArrayLike, std_min: float, std_max: float, cfg: WeightConfig) -> ArrayLike:
    """clip(tanh(Std_norm * w) + w_min, 0, 1) with Std_norm clamped to [0, 1]."""
    raw = np.asarray(std_raw, dtype=float)
    require_finite("ensemble std", raw)
    std_norm = np.asarray(normalized_std(raw, std_min, std_max))
    return _out(np.clip(np.tanh(std_norm * cfg.uw_sharpness) + cfg.w_min, 0.0, 1.0))


def drw(i: ArrayLike, t: ArrayLike, gamma: float, cfg: Optional[WeightConfig] = None) -> ArrayLike:
    """gamma ** (i - t). Entries with i < 0 (sample kept its original goal) get 1."""
    if cfg is not None and not cfg.drw_enabled:
        return _out(np.ones(np.broadcast(np.asarray(i), np.asarray(t)).shape))
    index = np.asarray(i, dtype=np.int64)
    step = np.asarray(t, dtype=np.int64)
    relabeled = index >= 0
    if np.any(relabeled & (index < step)):
        raise RelabelIndexError(
            "Relabel index precedes the transition index",
            payload={"i": np.asarray(index).tolist(), "t": np.asarray(step).tolist()},
        )
    gap = np.where(relabeled, index - step, 0)
    return _out(np.power(gamma, gap.astype(float)))


def alpha_schedule(step: int, total: int, cfg: WeightConfig) -> float:
    """Selection percentile, rising linearly from 0 to alpha_max over the first ramp fraction of updates."""
    ramp = max(cfg.alpha_ramp_fraction * total, 1.0)
    return float(cfg.alpha_max * min(step / ramp, 1.0))


@dataclass(frozen=True)
class WeightContext:
    """Queue-derived quantities for one update: the DSW threshold (None while warming up) and Std extremes."""

    threshold: Optional[float] = None
    std_min: float = 0.0
    std_max: float = 0.0
    gamma: float = 0.98


@dataclass(frozen=True)
class WeightBundle:
    eaw: ArrayLike
    dsw: ArrayLike
    uw: ArrayLike
    drw: ArrayLike
    product: ArrayLike


def combine_batch(
    A: np.ndarray,
    std_raw: np.ndarray,
    relabel_index: np.ndarray,
    t: np.ndarray,
    ctx: WeightContext,
    cfg: WeightConfig,
) -> WeightBundle:
    size = np.asarray(A).shape
    ones = np.ones(size)

    if not cfg.use_eaw:
        adv_weight = ones
    elif cfg.kind == "chi2":
        adv_weight = np.asarray(chi2_weight(A, cfg))
    else:
        adv_weight = np.asarray(eaw(A, cfg))

    if cfg.use_dsw and ctx.threshold is not None:
        select = np.asarray(dsw(A, ctx.threshold, cfg))
    else:
        select = ones

    uncertainty = np.asarray(uw(std_raw, ctx.std_min, ctx.std_max, cfg)) if cfg.use_uw else ones
    relabel = np.asarray(drw(relabel_index, t, ctx.gamma, cfg))
    product = uncertainty * adv_weight * select * relabel
    return WeightBundle(eaw=adv_weight, dsw=select, uw=uncertainty, drw=relabel, product=product)


def combine(
    sample: RelabeledSample, A: float, std_raw: float, ctx: WeightContext, cfg: WeightConfig
) -> WeightBundle:
    """Weights of a single sample. Queue pushes stay with the caller."""
    index = -1 if sample.relabel_index is None else sample.relabel_index
    bundle = combine_batch(
        np.asarray(A, dtype=float), np.asarray(std_raw, dtype=float), np.asarray(index), np.asarray(sample.t), ctx, cfg
    )
    return WeightBundle(
        eaw=float(bundle.eaw),
        dsw=float(bundle.dsw),
        uw=float(bundle.uw),
        drw=float(bundle.drw),
        product=float(bundle.product),
    )


def batch_weights(A: np.ndarray, std_raw: np.ndarray, batch: Batch, ctx: WeightContext, cfg: WeightConfig) -> WeightBundle:
    return combine_batch(A, std_raw, batch.relabel_index, batch.t, ctx, cfg)
