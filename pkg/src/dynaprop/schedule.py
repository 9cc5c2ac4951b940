"""Geometric weight schedules for graph filters and their error-bound arithmetic.

A schedule is the pair (gamma0, gamma) defining step weights gamma0 * gamma**k,
together with the convolution exponent beta (splitting the degree normalization
as d(i)**beta, d(j)**(1-beta)) and the push threshold r_max.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class FilterSchedule:
    """Immutable filter definition; freely shareable across workers."""

    gamma0: float
    gamma: float
    beta: float = 0.5
    r_max: float = 1e-7
    tag: str = "custom"

    def __post_init__(self):
        if self.gamma0 == 0.0:
            raise ValueError("gamma0 must be nonzero")
        if not 0.0 < abs(self.gamma) < 1.0:
            raise ValueError(f"common ratio must satisfy 0 < |gamma| < 1, got {self.gamma}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if self.r_max <= 0.0:
            raise ValueError(f"r_max must be positive, got {self.r_max}")

    def weight_at(self, k: int) -> float:
        """Weight of the k-th propagation step, gamma0 * gamma**k."""
        if k < 0:
            raise ValueError("step index must be non-negative")
        return self.gamma0 * self.gamma**k

    def total_weight(self) -> float:
        """Sum of absolute step weights, |gamma0| / (1 - |gamma|)."""
        return abs(self.gamma0) / (1.0 - abs(self.gamma))

    def error_bound(self, degree):
        """Per-node estimate error bound at convergence.

        r_max * d**(1-beta) * |gamma0| / (1 - |gamma|); the absolute-ratio
        form stays valid for sign-alternating schedules. Accepts scalars or
        arrays. A zero degree gives a zero bound for beta < 1 (such nodes
        are maintained exactly).
        """
        scale = self.r_max * abs(self.gamma0) / (1.0 - abs(self.gamma))
        return scale * np.power(degree, 1.0 - self.beta)

    def threshold(self, degree):
        """Push threshold r_max * d**(1-beta) (scalar or array)."""
        return self.r_max * np.power(degree, 1.0 - self.beta)

    def with_r_max(self, r_max: float) -> "FilterSchedule":
        return replace(self, r_max=r_max)


def ppr_schedule(alpha: float, beta: float = 0.5, r_max: float = 1e-7) -> FilterSchedule:
    """Low-pass schedule with weights alpha * (1-alpha)**k (restart mass alpha)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return FilterSchedule(gamma0=alpha, gamma=1.0 - alpha, beta=beta, r_max=r_max, tag="ppr")


def highpass_schedule(alpha: float, beta: float = 0.5, r_max: float = 1e-7) -> FilterSchedule:
    """Sign-alternating schedule with weights alpha * (alpha-1)**k."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return FilterSchedule(gamma0=alpha, gamma=alpha - 1.0, beta=beta, r_max=r_max, tag="highpass")
