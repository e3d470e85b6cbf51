"""
Variation divergence and worst-case shift over density-capped distributions on a finite ground set.

The capped family is {z : 0 <= z_i <= C, sum z = 1}. Its vertices put mass C on m = floor(1/C) points
and the remainder 1 - mC on one more point; the L1 distance to a fixed s is convex in z, so the
supremum is attained at a vertex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Literal

import numpy as np

from ...core.exceptions import ConfigurationError, ShapeError, TheoremCheckFailure
from ...core.logging_config import get_logger
from ...schemas.reports import TheoryReport

logger = get_logger(__name__)

SUM_TOLERANCE = 1e-12
EXACT_MAX_N = 12
NON_UNIFORM_MIN_DISTANCE = 1e-6


@dataclass(frozen=True)
class DiscreteDist:
    p: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ShapeError("A distribution is a non-empty 1-D probability vector", payload={"shape": list(p.shape)})
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ConfigurationError("Probabilities must be finite and non-negative")
        if abs(p.sum() - 1.0) > SUM_TOLERANCE:
            raise ConfigurationError("Probabilities must sum to 1", payload={"sum": float(p.sum())})
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return int(self.p.size)

    @classmethod
    def uniform(cls, n: int) -> "DiscreteDist":
        return cls(np.full(n, 1.0 / n))


@dataclass(frozen=True)
class CapFamily:
    n: int
    C: float

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigurationError("Ground set must be non-empty", payload={"n": self.n})
        if self.C * self.n < 1.0 - SUM_TOLERANCE:
            raise ConfigurationError(
                "Density cap admits no distribution (C * n < 1)", payload={"n": self.n, "C": self.C}
            )

    @property
    def full_points(self) -> int:
        return min(int(math.floor(1.0 / self.C + SUM_TOLERANCE)), self.n)

    @property
    def remainder(self) -> float:
        return max(1.0 - self.full_points * self.C, 0.0)


def _check_same_support(p: DiscreteDist, q: DiscreteDist) -> None:
    if p.n != q.n:
        raise ShapeError("Distributions live on different ground sets", payload={"n_p": p.n, "n_q": q.n})


def variation_divergence(p: DiscreteDist, q: DiscreteDist) -> float:
    _check_same_support(p, q)
    return float(np.abs(p.p - q.p).sum())


def _subset_masks(n: int) -> np.ndarray:
    return ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(float)


def variation_divergence_subsets(p: DiscreteDist, q: DiscreteDist) -> float:
    """2 * max over all subsets J of |P(J) - Q(J)|, by exhaustive enumeration."""
    _check_same_support(p, q)
    if p.n > EXACT_MAX_N:
        raise ConfigurationError("Subset enumeration is limited to n <= 12", payload={"n": p.n})
    return float(2.0 * np.max(np.abs(_subset_masks(p.n) @ (p.p - q.p))))


def worst_case_witness(s: DiscreteDist, fam: CapFamily) -> np.ndarray:
    """The maximizing vertex: cap mass on the smallest-mass points of s (lowest index first on ties)."""
    if s.n != fam.n:
        raise ShapeError("Distribution and family ground sets differ", payload={"n": s.n, "family_n": fam.n})
    order = np.argsort(s.p, kind="stable")
    z = np.zeros(fam.n)
    m = fam.full_points
    z[order[:m]] = fam.C
    if m < fam.n and fam.remainder > 0.0:
        z[order[m]] = fam.remainder
    return z


def worst_case_d1(s: DiscreteDist, fam: CapFamily) -> float:
    return float(np.abs(worst_case_witness(s, fam) - s.p).sum())


def uniform_worst_case_closed_form(n: int, C: float) -> float:
    """2 (1 - 1 / (C n)); matches the vertex value whenever 1/C is an integer."""
    return 2.0 * (1.0 - 1.0 / (C * n))


def _vertices(fam: CapFamily):
    m, r = fam.full_points, fam.remainder
    indices = range(fam.n)
    for full in itertools.combinations(indices, m):
        z = np.zeros(fam.n)
        z[list(full)] = fam.C
        if r <= 0.0 or m == fam.n:
            yield z
            continue
        for k in indices:
            if k in full:
                continue
            vertex = z.copy()
            vertex[k] = r
            yield vertex


def brute_force_worst_case(
    s: DiscreteDist,
    fam: CapFamily,
    mode: Literal["exact", "random"] = "exact",
    *,
    samples: int = 10_000,
    seed: int = 0,
) -> float:
    """
    Independent oracle for worst_case_d1.

    exact: every vertex of the capped family, each scored with the subset definition of d1 (n <= 12).
    random: a lower bound from `samples` random vertices, scored with the L1 form.
    """
    if s.n != fam.n:
        raise ShapeError("Distribution and family ground sets differ", payload={"n": s.n, "family_n": fam.n})
    if mode == "exact":
        if fam.n > EXACT_MAX_N:
            raise ConfigurationError("Exact enumeration is limited to n <= 12; use mode='random'", payload={"n": fam.n})
        masks = _subset_masks(fam.n)
        best = 0.0
        for z in _vertices(fam):
            best = max(best, float(2.0 * np.max(np.abs(masks @ (z - s.p)))))
        return best
    if mode != "random":
        raise ConfigurationError(f"Unknown brute-force mode {mode!r}")

    rng = np.random.default_rng(seed)
    m, r = fam.full_points, fam.remainder
    best = 0.0
    for _ in range(samples):
        order = rng.permutation(fam.n)
        z = np.zeros(fam.n)
        z[order[:m]] = fam.C
        if m < fam.n:
            z[order[m]] = r
        best = max(best, float(np.abs(z - s.p).sum()))
    return best


def sample_non_uniform(
    n: int,
    rng: np.random.Generator,
    *,
    concentration: float = 1.0,
    min_distance: float = NON_UNIFORM_MIN_DISTANCE,
    max_tries: int = 1000,
) -> DiscreteDist:
    """Dirichlet draw with full support and L-infinity distance from uniform above `min_distance`."""
    if n < 2:
        raise ConfigurationError("Every distribution on one point is uniform", payload={"n": n})
    for _ in range(max_tries):
        p = rng.dirichlet(np.full(n, concentration))
        if np.all(p > 0.0) and np.max(np.abs(p - 1.0 / n)) > min_distance:
            return DiscreteDist(p / p.sum())
    raise ConfigurationError("Could not sample a non-uniform distribution", payload={"n": n, "tries": max_tries})


def verify_uniform_minimax(n: int, C: float, trials: int, seed: int, *, strict: bool = True) -> TheoryReport:
    """
    Check worst_case_d1(S) > worst_case_d1(uniform) on `trials` random non-uniform S.

    With strict=True any violation raises TheoremCheckFailure carrying the counterexamples.
    """
    if trials < 1:
        raise ConfigurationError("trials must be at least 1", payload={"trials": trials})
    fam = CapFamily(n, C)
    uniform_value = worst_case_d1(DiscreteDist.uniform(n), fam)
    rng = np.random.default_rng(seed)

    margins = np.empty(trials)
    failures: List[Dict[str, object]] = []
    for trial in range(trials):
        s = sample_non_uniform(n, rng)
        value = worst_case_d1(s, fam)
        margins[trial] = value - uniform_value
        if margins[trial] <= 0.0:
            failures.append({"trial": trial, "s": s.p.tolist(), "worst_case": value, "uniform": uniform_value})

    report = TheoryReport(
        n=n,
        C=C,
        trials=trials,
        seed=seed,
        passes=trials - len(failures),
        failures=failures,
        uniform_worst_case=uniform_value,
        closed_form=uniform_worst_case_closed_form(n, C),
        min_margin=float(margins.min()),
        mean_margin=float(margins.mean()),
        max_margin=float(margins.max()),
    )
    logger.info(
        "Uniform minimax check finished",
        extra={"n": n, "C": C, "trials": trials, "passes": report.passes, "min_margin": report.min_margin},
    )
    if failures and strict:
        raise TheoremCheckFailure(
            "Non-uniform distribution with worst-case shift not above the uniform one",
            payload={"failures": failures[:10], "count": len(failures)},
        )
    return report


def closed_form_is_exact(C: float, tol: float = 1e-9) -> bool:
    inverse = 1.0 / C
    return abs(inverse - round(inverse)) <= tol

