"""Budgeted online kernel selection for the hinge loss.

Per kernel, the learner runs optimistic mirror descent: the prediction-side
hypothesis is the ball-constrained iterate minus the learning rate times a
reservoir-based guess of the next gradient. On a margin violation the
update either reuses a nearby buffered example as a proxy anchor (buffer
unchanged), or draws a Bernoulli coin whose success probability is
||grad - guess||^2 / (||grad - guess||^2 + ||guess||^2) and applies an
importance-weighted combination of the true gradient and the guess. A
successful draw against a full buffer first discards the newest half of the
buffer (or restarts, if configured), projects the survivor onto the ball,
and then steps. Predictions across kernels are mixed by an adaptive Hedge
distribution over the per-kernel hinge losses.

Within a round the K per-kernel updates depend only on the shared round
inputs and on per-kernel random streams derived from the master seed, so
the outcome does not depend on the order (or parallel schedule) in which
kernels are processed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hedge import HedgeState
from .kernels import KernelSpec, feature_distance_column, self_eval
from .losses import HingeLoss, check_label
from .reservoir import Reservoir
from .rkhs import BudgetedFunction, ExampleStore

__all__ = [
    "HingeSelectorConfig",
    "HingeKernelSelector",
    "Prediction",
    "RoundRecord",
    "allocate_budgets",
    "importance_weighted_coeffs",
    "BudgetError",
]


class BudgetError(ValueError):
    """The example budget cannot accommodate the configuration."""


@dataclass
class HingeSelectorConfig:
    """Configuration of the hinge-loss selector.

    ``budget`` is the total number of stored examples (reservoir archive
    plus all per-kernel buffers). ``horizon`` is the stream length, or an
    estimate of it in streaming mode (the archive slice depends on ln T);
    the estimate used is echoed into run reports by the bench layer.
    ``lambda_rule`` picks the learning-rate rule: ``"scaled"`` gives
    lambda_i = lambda_scale * U / sqrt(B) (the benchmark rule, with
    lambda_scale in {2, 1, 0.5}), ``"theory"`` gives
    lambda_i = U * sqrt(K) / sqrt(2 B).
    """

    kernels: tuple[KernelSpec, ...]
    dim: int
    budget: int
    horizon: int
    reservoir_size: int = 10
    ball_radius: float | None = None  # default sqrt(budget)
    lambda_scale: float = 1.0
    lambda_rule: str = "scaled"
    removal: str = "half"  # or "restart"
    seed: int = 0

    def __post_init__(self):
        if not self.kernels:
            raise ValueError("need at least one kernel")
        if self.reservoir_size < 1:
            raise ValueError("reservoir size must be >= 1")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.removal not in ("half", "restart"):
            raise ValueError("removal must be 'half' or 'restart'")
        if self.lambda_rule not in ("scaled", "theory"):
            raise ValueError("lambda_rule must be 'scaled' or 'theory'")
        if self.budget < 2 * len(self.kernels) + 2:
            raise BudgetError(
                f"budget {self.budget} too small for K={len(self.kernels)} kernels"
            )

    @property
    def radius(self) -> float:
        return float(self.ball_radius) if self.ball_radius is not None else math.sqrt(self.budget)

    def learning_rate(self, num_kernels: int) -> float:
        if self.lambda_rule == "theory":
            return self.radius * math.sqrt(num_kernels) / math.sqrt(2.0 * self.budget)
        return self.lambda_scale * self.radius / math.sqrt(self.budget)


def allocate_budgets(config: HingeSelectorConfig) -> tuple[int, int]:
    """Split the total budget into (archive cap, per-kernel buffer cap).

    archive cap B0 = min(ceil(M * (1 + ceil(ln T))), floor(B / 2)); the
    floor(B/2) cap keeps at least half of the budget for the kernel
    buffers. Per-kernel cap B_i = 2 * floor((B - B0) / (2K)), forced even
    so half-removal is always well defined.
    """
    expected_archive = math.ceil(config.reservoir_size * (1 + math.ceil(math.log(config.horizon))))
    archive_cap = min(expected_archive, config.budget // 2)
    per_kernel = 2 * ((config.budget - archive_cap) // (2 * len(config.kernels)))
    if per_kernel < 2:
        raise BudgetError(
            f"budget {config.budget} leaves per-kernel buffers of size {per_kernel}; "
            f"need at least 2 per kernel"
        )
    return archive_cap, per_kernel


def importance_weighted_coeffs(
    grad_coeffs: dict[int, float],
    guess_coeffs: dict[int, float],
    prob: float,
    accepted: bool,
) -> dict[int, float]:
    """Coefficients of (grad - guess)/prob * 1[accepted] + guess.

    This is the unbiased surrogate applied by the sampled branch:
    E[result] equals ``grad_coeffs`` whenever prob matches the acceptance
    probability.
    """
    out = dict(guess_coeffs)
    if accepted:
        for eid, c in grad_coeffs.items():
            out[eid] = out.get(eid, 0.0) + c / prob
        for eid, c in guess_coeffs.items():
            out[eid] = out[eid] - c / prob
    return {eid: c for eid, c in out.items() if c != 0.0}


@dataclass
class Prediction:
    """Pre-update view of one round."""

    x: np.ndarray
    x_sqnorm: float
    per_kernel: np.ndarray  # f_{t,i}(x_t)
    guess_values: np.ndarray  # guess gradient evaluated at x_t, per kernel
    weights: np.ndarray  # Hedge distribution p_t
    aggregate: float
    label: int


@dataclass
class RoundRecord:
    """What happened in one round, per kernel where applicable."""

    t: int
    label: int
    truth: int
    mistake: bool
    aggregate: float
    per_kernel: np.ndarray
    losses: np.ndarray
    branch: list  # "skip" | "proxy" | "sampled"
    prob: np.ndarray  # Bernoulli success probability (nan when not drawn)
    coin: np.ndarray  # realized draw (-1 not drawn / 0 / 1)
    gap_sq: np.ndarray  # ||grad - guess||^2 (0 when the margin held)
    removed: np.ndarray  # True where a half-removal (or restart) fired
    reservoir_accepted: bool = False
    extras: dict = field(default_factory=dict)


class HingeKernelSelector:
    """Online kernel selection with per-kernel budgets, for the hinge loss."""

    def __init__(self, config: HingeSelectorConfig):
        self.config = config
        self.kernels = tuple(config.kernels)
        k = len(self.kernels)
        self.archive_cap, self.per_kernel_cap = allocate_budgets(config)
        self.radius = config.radius
        self.rate = config.learning_rate(k)
        self.loss = HingeLoss()

        seeds = np.random.SeedSequence(config.seed).spawn(k + 1)
        self._rngs = [np.random.default_rng(s) for s in seeds[:k]]
        self.store = ExampleStore(config.dim)
        self.reservoir = Reservoir(
            self.store,
            capacity=config.reservoir_size,
            archive_cap=self.archive_cap,
            rng=np.random.default_rng(seeds[k]),
            specs=self.kernels,
        )
        self.functions = [BudgetedFunction(spec, self.store) for spec in self.kernels]
        self.hedge = HedgeState(k)
        self.gap_sums = np.zeros(k)  # per-kernel alignment proxy accumulator
        self.removals = np.zeros(k, dtype=int)
        self.t = 0
        self._last: Prediction | None = None

    def predict(self, x) -> Prediction:
        """f_{t,i}(x) = f'_i(x) - lambda_i * guess_i(x); mixture and sign.

        sign(0) is +1.
        """
        x = np.asarray(x, dtype=float)
        xsq = float(x @ x)
        guesses = self.reservoir.optimistic_value_many(self.kernels, x, xsq)
        vals = np.empty(len(self.kernels))
        for i, f in enumerate(self.functions):
            vals[i] = f.value(x, xsq) - self.rate * guesses[i]
        p = self.hedge.distribution()
        agg = float(p @ vals)
        pred = Prediction(
            x=x,
            x_sqnorm=xsq,
            per_kernel=vals,
            guess_values=guesses,
            weights=p,
            aggregate=agg,
            label=1 if agg >= 0 else -1,
        )
        self._last = pred
        return pred

    def update(self, x, y) -> RoundRecord:
        """Consume the round's true label; one call per round, after predict."""
        y = check_label(y)
        x = np.asarray(x, dtype=float)
        pred = self._last
        if pred is None or pred.x.shape != x.shape or not np.array_equal(pred.x, x):
            pred = self.predict(x)
        self._last = None
        self.t += 1
        k = len(self.kernels)

        round_id = None

        def ensure_stored() -> int:
            nonlocal round_id
            if round_id is None:
                round_id = self.store.add(x, y)
            return round_id

        branch = ["skip"] * k
        prob = np.full(k, np.nan)
        coin = np.full(k, -1, dtype=int)
        gap_sq_rec = np.zeros(k)
        removed = np.zeros(k, dtype=bool)
        losses = np.empty(k)

        for i, spec in enumerate(self.kernels):
            f = self.functions[i]
            vi = pred.per_kernel[i]
            losses[i] = self.loss.value(vi, y)
            if y * vi >= 1.0:
                f.project_ball(self.radius)  # no-op while feasible
                continue
            # margin violated: grad = -y k(x_t, .)
            kxx = self_eval(spec, x, pred.x_sqnorm)
            guess_sq = self.reservoir.optimistic_sq_norm(spec)
            gap_sq = max(kxx + 2.0 * y * pred.guess_values[i] + guess_sq, 0.0)
            gap_sq_rec[i] = gap_sq
            self.gap_sums[i] += gap_sq
            gamma = gap_sq / math.sqrt(1.0 + self.gap_sums[i])

            anchor = None
            if f.own_buffer:
                bx, bsq, _ = self.store.rows(f.own_buffer)
                dists = feature_distance_column(spec, bx, bsq, x, pred.x_sqnorm)
                j = int(np.argmin(dists))  # ties resolve to the earliest insertion
                if dists[j] <= gamma:
                    anchor = f.own_buffer[j]

            if anchor is not None:
                branch[i] = "proxy"
                f.add_scaled(self.rate * y, anchor)
                f.project_ball(self.radius)
                continue

            branch[i] = "sampled"
            guess = self.reservoir.optimistic_coeffs()
            if gap_sq == 0.0:
                # grad coincides with the guess: exact deterministic step
                prob[i] = 0.0
                coin[i] = 0
                accepted = False
                p_i = 1.0  # unused
            else:
                p_i = gap_sq / (gap_sq + guess_sq)
                prob[i] = p_i
                accepted = bool(self._rngs[i].random() < p_i)
                coin[i] = 1 if accepted else 0
            if accepted and f.buffer_size() == self.per_kernel_cap:
                if self.config.removal == "half":
                    f.split_half(keep="oldest")
                else:
                    f.clear()
                f.project_ball(self.radius)
                self.removals[i] += 1
                removed[i] = True
            grad = {ensure_stored(): -y} if accepted else {}
            tilde = importance_weighted_coeffs(grad, guess, p_i, accepted)
            f.add_scaled_many({eid: -self.rate * c for eid, c in tilde.items()})
            if accepted:
                f.buffer_append(ensure_stored())
            f.project_ball(self.radius)

        pre_hedge = losses.copy()
        self.hedge.update(pre_hedge)
        accepted_by_reservoir = self.reservoir.observe(x, y, example_id=round_id)
        if round_id is not None:
            self.store.release_if_unreferenced(round_id)

        return RoundRecord(
            t=self.t,
            label=pred.label,
            truth=int(y),
            mistake=pred.label != int(y),
            aggregate=pred.aggregate,
            per_kernel=pred.per_kernel,
            losses=pre_hedge,
            branch=branch,
            prob=prob,
            coin=coin,
            gap_sq=gap_sq_rec,
            removed=removed,
            reservoir_accepted=accepted_by_reservoir,
        )

    # -- diagnostics -----------------------------------------------------

    def alignment_proxies(self) -> np.ndarray:
        """Per-kernel accumulated ||grad - guess||^2 over violated rounds."""
        return self.gap_sums.copy()

    def removal_bounds(self, k1: float = 1.0) -> np.ndarray:
        """ceil(4 K A_i / (B k1)) per kernel: the expected-removals scale."""
        k = len(self.kernels)
        return np.ceil(4.0 * k * self.gap_sums / (self.config.budget * k1))

    def check_invariants(self):
        """Hard budget/norm invariants; raises AssertionError on violation."""
        for f in self.functions:
            assert f.buffer_size() <= self.per_kernel_cap, "buffer over budget"
            assert f.norm() <= self.radius + 1e-8, "iterate escaped the ball"
        assert len(self.reservoir.archive) <= self.archive_cap, "archive over cap"
        assert len(self.reservoir) <= self.config.reservoir_size, "reservoir over capacity"
