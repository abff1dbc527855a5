"""Budgeted online kernel selection for smooth losses.

All K kernels share a single buffer: every update anchors at the same
example for every kernel, so the buffers stay element-wise identical. The
per-kernel gradient is the surrogate l'(f_t(x_t), y_t) * k_i(x_t, .) built
from the *aggregate* prediction's derivative d. When no nearby buffered
proxy exists, one shared coin with success probability |d| / (|d| + G1)
decides whether the round's example is stepped on (importance-weighted by
1/P) and inserted; a success against a full buffer first discards the
oldest half (keeping the newest), projects, and then steps. The Hedge
losses are the gap-to-best form: d * (v_i - min_j v_j) when d > 0, else
d * (v_i - max_j v_j), which is non-negative with at least one zero.

A failed coin performs no update at all; the asymmetry with the hinge
learner (which still steps on the guess) is deliberate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .hedge import HedgeState
from .hinge_learner import Prediction, RoundRecord
from .kernels import KernelSpec, feature_distance
from .losses import LogisticLoss, check_label
from .rkhs import BudgetedFunction, ExampleStore

__all__ = ["SmoothSelectorConfig", "SmoothKernelSelector", "pea_losses"]


@dataclass
class SmoothSelectorConfig:
    """Configuration of the smooth-loss selector.

    ``budget`` is the shared buffer size; odd values are floored to the
    next even value (half-removal needs an even buffer) with a warning.
    ``lambda_rule="scaled"`` gives lambda_i = lambda_scale * U / sqrt(B);
    ``"theory"`` gives lambda_i = 2 U / (G1 sqrt(B)).
    """

    kernels: tuple[KernelSpec, ...]
    dim: int
    budget: int
    loss: object = None  # smooth loss with value/deriv and G1/G2; default logistic
    ball_radius: float | None = None
    lambda_scale: float = 1.0
    lambda_rule: str = "scaled"
    removal: str = "half"
    seed: int = 0

    def __post_init__(self):
        if not self.kernels:
            raise ValueError("need at least one kernel")
        if self.budget < 2:
            raise ValueError("budget must be >= 2")
        if self.budget % 2 != 0:
            warnings.warn(
                f"buffer budget {self.budget} is odd; using {self.budget - 1} "
                "(half-removal needs an even buffer)",
                stacklevel=2,
            )
            self.budget -= 1
        if self.loss is None:
            self.loss = LogisticLoss()
        if self.removal not in ("half", "restart"):
            raise ValueError("removal must be 'half' or 'restart'")
        if self.lambda_rule not in ("scaled", "theory"):
            raise ValueError("lambda_rule must be 'scaled' or 'theory'")

    @property
    def radius(self) -> float:
        return float(self.ball_radius) if self.ball_radius is not None else math.sqrt(self.budget)

    def learning_rate(self) -> float:
        if self.lambda_rule == "theory":
            return 2.0 * self.radius / (self.loss.G1 * math.sqrt(self.budget))
        return self.lambda_scale * self.radius / math.sqrt(self.budget)


def pea_losses(values: np.ndarray, d: float) -> np.ndarray:
    """Hedge losses from per-kernel values and the aggregate derivative.

    d > 0 charges each kernel its gap to the smallest value, d < 0 the gap
    to the largest; every entry is >= 0 and at least one is exactly 0.
    """
    values = np.asarray(values, dtype=float)
    if d > 0:
        return d * (values - values.min())
    if d < 0:
        return d * (values - values.max())
    return np.zeros_like(values)


class SmoothKernelSelector:
    """Online kernel selection with one shared buffer, for smooth losses."""

    def __init__(self, config: SmoothSelectorConfig):
        self.config = config
        self.kernels = tuple(config.kernels)
        self.loss = config.loss
        self.radius = config.radius
        self.rate = config.learning_rate()
        self.budget = config.budget
        k = len(self.kernels)
        if k > config.dim:
            warnings.warn(
                f"K={k} exceeds the feature dimension d={config.dim}; the memory "
                "reduction behind the shared buffer assumes K <= d",
                stacklevel=2,
            )
        theory_cap = math.sqrt(max(self.budget - (4.0 / 3.0) * math.log(100.0), 0.0)) / (
            8.0 * self.loss.G2
        )
        if self.radius > theory_cap:
            warnings.warn(
                f"ball radius {self.radius:.3g} exceeds the analysed range "
                f"{theory_cap:.3g}; keeping the configured value",
                stacklevel=2,
            )

        self.store = ExampleStore(config.dim)
        self.functions = [BudgetedFunction(spec, self.store) for spec in self.kernels]
        self.buffer: list[int] = []  # the shared buffer; mirrored in every function
        self.hedge = HedgeState(k)
        self.rng = np.random.default_rng(np.random.SeedSequence(config.seed))
        self.deriv_sum = 0.0  # sum of |l'(f_t(x_t), y_t)| over rounds
        self.cum_loss = 0.0  # sum of l(f_t(x_t), y_t) over rounds
        self.removals = 0
        self.t = 0
        self._last: Prediction | None = None

    def predict(self, x) -> Prediction:
        x = np.asarray(x, dtype=float)
        xsq = float(x @ x)
        vals = np.array([f.value(x, xsq) for f in self.functions])
        p = self.hedge.distribution()
        agg = float(p @ vals)
        pred = Prediction(
            x=x,
            x_sqnorm=xsq,
            per_kernel=vals,
            guess_values=np.zeros(len(self.kernels)),
            weights=p,
            aggregate=agg,
            label=1 if agg >= 0 else -1,
        )
        self._last = pred
        return pred

    def _nearest_buffered(self, x, xsq) -> int | None:
        """Euclidean-nearest buffered id (for Gaussian kernels this is the
        per-kernel feature-space argmin for every bandwidth at once); ties
        resolve to the earliest insertion."""
        if not self.buffer:
            return None
        bx, bsq, _ = self.store.rows(self.buffer)
        sqd = np.maximum(bsq + xsq - 2.0 * (bx @ x), 0.0)
        return self.buffer[int(np.argmin(sqd))]

    def update(self, x, y) -> RoundRecord:
        y = check_label(y)
        x = np.asarray(x, dtype=float)
        pred = self._last
        if pred is None or pred.x.shape != x.shape or not np.array_equal(pred.x, x):
            pred = self.predict(x)
        self._last = None
        self.t += 1
        k = len(self.kernels)

        d = self.loss.deriv(pred.aggregate, y)
        if not math.isfinite(d):
            raise FloatingPointError(f"non-finite loss derivative at round {self.t}")
        ad = abs(d)

        branch = "skip"
        prob = np.nan
        coin = -1
        did_remove = False

        if ad > 0.0:
            gamma = math.sqrt(2.0 * math.log(k)) / math.sqrt(1.0 + self.deriv_sum + ad)
            anchor = self._nearest_buffered(x, pred.x_sqnorm)
            use_proxy = False
            if anchor is not None:
                xa = self.store.features(anchor)
                maxdist = max(feature_distance(spec, xa, x) for spec in self.kernels)
                use_proxy = maxdist <= gamma
            if use_proxy:
                branch = "proxy"
                for f in self.functions:
                    f.add_scaled(-self.rate * d, anchor)
                    f.project_ball(self.radius)
            else:
                branch = "sampled"
                prob = ad / (ad + self.loss.G1)
                accepted = bool(self.rng.random() < prob)
                coin = 1 if accepted else 0
                if accepted:
                    if len(self.buffer) == self.budget:
                        for f in self.functions:
                            if self.config.removal == "half":
                                f.split_half(keep="newest")
                            else:
                                f.clear()
                            f.project_ball(self.radius)
                        self.buffer = [] if self.config.removal == "restart" else self.buffer[self.budget // 2 :]
                        self.removals += 1
                        did_remove = True
                    eid = self.store.add(x, y)
                    for f in self.functions:
                        f.add_scaled(-self.rate * d / prob, eid)
                        f.project_ball(self.radius)
                        f.buffer_append(eid)
                    self.buffer.append(eid)

        losses = pea_losses(pred.per_kernel, d)
        self.hedge.update(losses)
        self.deriv_sum += ad
        self.cum_loss += self.loss.value(pred.aggregate, y)

        return RoundRecord(
            t=self.t,
            label=pred.label,
            truth=int(y),
            mistake=pred.label != int(y),
            aggregate=pred.aggregate,
            per_kernel=pred.per_kernel,
            losses=losses,
            branch=[branch] * k,
            prob=np.full(k, prob),
            coin=np.full(k, coin, dtype=int),
            gap_sq=np.zeros(k),
            removed=np.full(k, did_remove),
            extras={"deriv": d},
        )

    # -- diagnostics -----------------------------------------------------

    def removal_bound(self, delta: float = 0.01) -> float:
        """ceil(4 G2 L / ((B - (4/3) ln(1/delta)) G1)): the removals scale."""
        denom = (self.budget - (4.0 / 3.0) * math.log(1.0 / delta)) * self.loss.G1
        if denom <= 0:
            return math.inf
        return math.ceil(4.0 * self.loss.G2 * self.cum_loss / denom)

    def check_invariants(self):
        first = self.functions[0].own_buffer
        for f in self.functions:
            assert f.own_buffer == first, "shared buffer lost coherence"
            assert f.buffer_size() <= self.budget, "buffer over budget"
            assert f.norm() <= self.radius + 1e-8, "iterate escaped the ball"
        assert self.buffer == first, "learner buffer diverged from functions"
