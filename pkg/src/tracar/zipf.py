"""Zipf rank distributions calibrated to an X%-of-keys / Y%-of-accesses rule."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import InvalidArgumentError

S_MAX = 16.0


class CalibrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ZipfSpec:
    n_items: int
    exponent: float
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_items < 1:
            raise InvalidArgumentError("n_items must be >= 1")
        if self.exponent < 0:
            raise InvalidArgumentError("zipf exponent must be >= 0")

    def probabilities(self) -> np.ndarray:
        return rank_probabilities(self.n_items, self.exponent)

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``size`` zero-based ranks by inverse-CDF lookup."""
        cdf = np.cumsum(self.probabilities())
        cdf[-1] = 1.0
        ranks = np.searchsorted(cdf, rng.random(size), side="right")
        return np.minimum(ranks, self.n_items - 1)


def rank_probabilities(n_items: int, exponent: float) -> np.ndarray:
    ranks = np.arange(1, n_items + 1, dtype=np.float64)
    w = np.exp(-exponent * np.log(ranks))
    return w / w.sum()


def hot_count(n_items: int, hot_key_fraction: float) -> int:
    # guard against 0.2 * n landing one ulp above an integer
    return max(1, math.ceil(hot_key_fraction * n_items - 1e-9))


def top_mass(n_items: int, exponent: float, k: int) -> float:
    """Share of probability carried by the ``k`` most popular ranks."""
    logs = np.log(np.arange(1, n_items + 1, dtype=np.float64))
    w = np.exp(-exponent * logs)
    return float(w[:k].sum() / w.sum())


def calibrate_zipf(
    n_items: int,
    hot_key_fraction: float = 0.2,
    hot_mass_fraction: float = 0.8,
    tol: float = 1e-3,
) -> float:
    """Bisect the exponent on [0, 16] until the top ranks carry the target mass."""
    if n_items < 10:
        raise InvalidArgumentError("calibration needs n_items >= 10")
    if not 0.0 < hot_key_fraction < 1.0:
        raise InvalidArgumentError("hot_key_fraction must lie in (0, 1)")
    if not hot_key_fraction <= hot_mass_fraction < 1.0:
        raise InvalidArgumentError("need hot_key_fraction <= hot_mass_fraction < 1")

    k = hot_count(n_items, hot_key_fraction)
    lo_mass = top_mass(n_items, 0.0, k)
    if abs(lo_mass - hot_mass_fraction) <= tol:
        return 0.0
    hi_mass = top_mass(n_items, S_MAX, k)
    if not lo_mass < hot_mass_fraction <= hi_mass:
        raise CalibrationError(
            f"target mass {hot_mass_fraction} outside achievable "
            f"[{lo_mass:.6f}, {hi_mass:.6f}] for top {k} of {n_items}"
        )

    # top-k mass is increasing in the exponent
    lo, hi = 0.0, S_MAX
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if top_mass(n_items, mid, k) < hot_mass_fraction:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    s = hi if abs(top_mass(n_items, hi, k) - hot_mass_fraction) <= abs(
        top_mass(n_items, lo, k) - hot_mass_fraction
    ) else lo
    achieved = top_mass(n_items, s, k)
    if abs(achieved - hot_mass_fraction) > tol:
        raise CalibrationError(
            f"bisection stalled at s={s}: mass {achieved:.6f} vs {hot_mass_fraction}"
        )
    return s
