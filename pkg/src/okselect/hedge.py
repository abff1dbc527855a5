"""Prediction-with-expert-advice aggregation over the kernel grid.

Weights are never materialized: only cumulative losses and the running
second moment are stored, and the distribution is derived on demand with
max-subtraction, so nothing underflows for long streams. The adaptive rate
is eta_t = sqrt(2 ln K) / sqrt(1 + sum_tau sum_i p_{tau,i} c_{tau,i}^2),
with eta_1 = sqrt(2 ln K).
"""

from __future__ import annotations

import numpy as np

__all__ = ["HedgeState"]


class HedgeState:
    """Adaptive multiplicative-weights state over K experts."""

    def __init__(self, num_experts: int):
        if num_experts < 1:
            raise ValueError("need at least one expert")
        self.num_experts = num_experts
        self.cum_loss = np.zeros(num_experts)
        self.second_moment = 0.0
        self.round = 0

    def rate(self) -> float:
        return float(np.sqrt(2.0 * np.log(self.num_experts)) / np.sqrt(1.0 + self.second_moment))

    def distribution(self) -> np.ndarray:
        """Current simplex point: softmax of -eta * cum_loss."""
        z = -self.rate() * self.cum_loss
        z -= z.max()
        w = np.exp(z)
        return w / w.sum()

    def update(self, losses) -> np.ndarray:
        """Charge one round of non-negative losses; returns the p used.

        The second moment accumulates with the distribution held *before*
        this update.
        """
        c = np.asarray(losses, dtype=float)
        if c.shape != (self.num_experts,):
            raise ValueError(f"expected {self.num_experts} losses, got shape {c.shape}")
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise ValueError("losses must be finite and non-negative")
        p = self.distribution()
        self.second_moment += float(p @ (c * c))
        self.cum_loss += c
        self.round += 1
        return p
