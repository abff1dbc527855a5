import math

import numpy as np
import pytest

from okselect import (
    BudgetError,
    HingeKernelSelector,
    HingeSelectorConfig,
    allocate_budgets,
    gaussian,
)
from okselect.hinge_learner import importance_weighted_coeffs
from okselect.kernels import kernel_eval

from conftest import assert_refcounts_conserved, blob_stream

GRID = tuple(gaussian(s, i) for i, s in enumerate((0.25, 1.0, 4.0, 16.0, 64.0)))


def make_config(**kw):
    base = dict(kernels=GRID, dim=4, budget=60, horizon=2000, seed=0)
    base.update(kw)
    return HingeSelectorConfig(**base)


class TestBudgetAllocation:
    def test_benchmark_shapes(self):
        # T=8124: ceil(ln 8124) = 10 since e^9 ~ 8103 < 8124
        cfg = make_config(budget=400, horizon=8124, reservoir_size=10)
        archive, per_kernel = allocate_budgets(cfg)
        assert archive == 110
        assert per_kernel == 58

    def test_small_budget_caps_archive(self):
        cfg = make_config(budget=100, horizon=8124, reservoir_size=10)
        archive, per_kernel = allocate_budgets(cfg)
        assert archive == 50  # floor(B/2) cap active
        assert per_kernel == 10

    def test_boundary_budget(self):
        # smallest legal budget: one even slot pair per kernel plus archive
        cfg = make_config(budget=2 * 5 + 2, horizon=2, reservoir_size=1)
        archive, per_kernel = allocate_budgets(cfg)
        assert archive == 2
        assert per_kernel == 2
        with pytest.raises(BudgetError):
            make_config(budget=2 * 5 + 1)
        # a huge reservoir slice starves the per-kernel buffers: error path
        with pytest.raises(BudgetError):
            allocate_budgets(make_config(budget=2 * 5 + 2, horizon=10**6, reservoir_size=100))

    def test_per_kernel_budget_is_even(self):
        for budget in (30, 44, 61, 87, 123):
            try:
                cfg = make_config(budget=budget, horizon=500)
            except BudgetError:
                continue
            _, per_kernel = allocate_budgets(cfg)
            assert per_kernel % 2 == 0 and per_kernel >= 2


class TestPredict:
    def test_fresh_learner_predicts_zero_and_plus_one(self):
        learner = HingeKernelSelector(make_config())
        pred = learner.predict(np.array([0.5, -0.5, 0.1, 0.0]))
        assert np.allclose(pred.per_kernel, 0.0)
        assert pred.aggregate == 0.0
        assert pred.label == 1  # sign(0) = +1

    def test_single_reservoir_entry_shifts_prediction(self):
        learner = HingeKernelSelector(make_config())
        x1 = np.array([1.0, 0.0, 0.0, 0.0])
        learner.reservoir.observe(x1, 1)  # t=1: accepted with probability 1
        x = np.array([0.2, 0.1, 0.0, 0.0])
        pred = learner.predict(x)
        for i, spec in enumerate(GRID):
            expect = learner.rate * kernel_eval(spec, x1, x)
            assert pred.per_kernel[i] == pytest.approx(expect, rel=1e-10)

    def test_concentrated_mixture(self):
        learner = HingeKernelSelector(make_config())
        # force the Hedge mass onto kernel 2
        learner.hedge.cum_loss = np.array([50.0, 50.0, 0.0, 50.0, 50.0])
        learner.hedge.second_moment = 1.0
        learner.reservoir.observe(np.array([1.0, 1.0, 0.0, 0.0]), -1)
        x = np.array([0.5, 0.5, 0.0, 0.0])
        pred = learner.predict(x)
        assert pred.weights[2] > 0.999
        assert pred.aggregate == pytest.approx(pred.per_kernel[2], abs=1e-2 * abs(pred.per_kernel[2]) + 1e-12)


class TestFirstRound:
    def test_forced_acceptance_step(self):
        learner = HingeKernelSelector(make_config())
        x = np.array([1.0, 0.0, 0.0, 0.0])
        learner.predict(x)
        rec = learner.update(x, 1)
        # empty guess: P = 1 and the step is a plain projected gradient step
        assert np.allclose(rec.prob, 1.0)
        assert np.all(rec.coin == 1)
        for i, f in enumerate(learner.functions):
            assert f.buffer_size() == 1
            eid = f.own_buffer[0]
            expect = min(1.0, learner.radius / learner.rate) * learner.rate * 1.0
            assert f.coeffs[eid] == pytest.approx(expect, rel=1e-12)

    def test_first_round_gap_is_kernel_diagonal(self):
        learner = HingeKernelSelector(make_config())
        x = np.array([0.3, 0.3, 0.0, 0.0])
        learner.predict(x)
        rec = learner.update(x, -1)
        assert np.allclose(rec.gap_sq, 1.0)  # k(x,x) = 1, guess = 0
        assert np.allclose(learner.gap_sums, 1.0)


class TestSamplingProbability:
    def test_half_probability_when_gap_equals_guess_norm(self):
        # one reservoir entry (x0, +1) at feature distance with k(x0,x)=1/2
        # makes ||grad - guess||^2 = ||guess||^2 for the sigma=1 kernel
        learner = HingeKernelSelector(make_config())
        x0 = np.zeros(4)
        learner.reservoir.observe(x0, 1)
        x = np.array([math.sqrt(2.0 * math.log(2.0)), 0.0, 0.0, 0.0])
        learner.predict(x)
        rec = learner.update(x, 1)
        i = 1  # sigma = 1
        assert rec.branch[i] == "sampled"
        assert rec.prob[i] == pytest.approx(0.5, abs=1e-12)

    def test_gap_scalar_matches_brute_force(self):
        # ||grad - guess||^2 assembled from scalars must equal the norm of
        # the explicit coefficient expansion of (grad - guess)
        learner = HingeKernelSelector(make_config(seed=5))
        rng = np.random.default_rng(50)
        for t in range(6):
            learner.reservoir.observe(rng.normal(size=4), int(rng.choice([-1, 1])))
        x = rng.normal(size=4)
        y = 1
        # snapshot the guess sample before update() observes the round's example
        store = learner.store
        snapshot = [
            (store.features(e).copy(), store.label(e)) for e in learner.reservoir.sample
        ]
        learner.predict(x)
        rec = learner.update(x, y)
        for i, spec in enumerate(GRID):
            if rec.gap_sq[i] == 0.0 and rec.branch[i] == "skip":
                continue
            m = len(snapshot)
            anchors = [(x, -float(y))] + [(xs, lab / m) for xs, lab in snapshot]
            brute = 0.0
            for xa, ca in anchors:
                for xb, cb in anchors:
                    brute += ca * cb * kernel_eval(spec, xa, xb)
            assert rec.gap_sq[i] == pytest.approx(brute, rel=1e-8, abs=1e-10)


class TestSurrogateGradient:
    def test_unbiasedness_monte_carlo(self):
        rng = np.random.default_rng(21)
        grad = {100: -1.0}
        guess = {1: -0.25, 2: 0.25, 3: -0.5}
        gap_sq = 1.7
        guess_sq = 0.9
        prob = gap_sq / (gap_sq + guess_sq)
        draws = 100_000
        keys = [100, 1, 2, 3]
        acc = {k: np.zeros(draws) for k in keys}
        for n in range(draws):
            coeffs = importance_weighted_coeffs(grad, guess, prob, rng.random() < prob)
            for k in keys:
                acc[k][n] = coeffs.get(k, 0.0)
        for k in keys:
            mean = acc[k].mean()
            se = acc[k].std(ddof=1) / math.sqrt(draws)
            target = grad.get(k, 0.0)
            assert abs(mean - target) <= 3 * se + 1e-12

    def test_acceptance_recovers_importance_weight(self):
        coeffs = importance_weighted_coeffs({7: -1.0}, {3: -0.5}, 0.25, True)
        assert coeffs[7] == pytest.approx(-4.0)
        assert coeffs[3] == pytest.approx(-0.5 * (1.0 - 4.0))
        coeffs0 = importance_weighted_coeffs({7: -1.0}, {3: -0.5}, 0.25, False)
        assert coeffs0 == {3: -0.5}


class TestFullRuns:
    def run_stream(self, learner, X, y, check_every=1):
        records = []
        for t in range(len(y)):
            learner.predict(X[t])
            rec = learner.update(X[t], y[t])
            records.append(rec)
            if t % check_every == 0:
                learner.check_invariants()
        learner.check_invariants()
        return records

    def test_budget_and_norm_invariants_hold_every_round(self):
        X, y = blob_stream(600, 4, seed=22)
        learner = HingeKernelSelector(make_config(seed=1, horizon=600))
        records = self.run_stream(learner, X, y)
        # a removal leaves the half buffer plus the newly inserted example
        for rec in records:
            for i in range(len(GRID)):
                if rec.removed[i]:
                    assert learner.per_kernel_cap // 2 + 1 <= learner.per_kernel_cap
        assert_refcounts_conserved(
            learner.store,
            functions=learner.functions,
            buffers=[learner.reservoir.sample, learner.reservoir.archive],
        )

    def test_removal_leaves_half_plus_one(self):
        X, y = blob_stream(600, 4, seed=23)
        learner = HingeKernelSelector(make_config(seed=2, horizon=600))
        sizes_after_removal = []
        for t in range(len(y)):
            learner.predict(X[t])
            rec = learner.update(X[t], y[t])
            for i in range(len(GRID)):
                if rec.removed[i]:
                    sizes_after_removal.append(learner.functions[i].buffer_size())
        assert sizes_after_removal, "no removal was exercised; change the seed"
        assert set(sizes_after_removal) == {learner.per_kernel_cap // 2 + 1}

    def test_determinism(self):
        X, y = blob_stream(400, 4, seed=24)
        runs = []
        for _ in range(2):
            learner = HingeKernelSelector(make_config(seed=7, horizon=400))
            recs = self.run_stream(learner, X, y, check_every=100)
            runs.append(
                (
                    [r.mistake for r in recs],
                    np.vstack([r.prob for r in recs]),
                    np.vstack([r.coin for r in recs]),
                    learner.gap_sums.copy(),
                    learner.removals.copy(),
                )
            )
        assert runs[0][0] == runs[1][0]
        assert np.array_equal(runs[0][1], runs[1][1], equal_nan=True)
        assert np.array_equal(runs[0][2], runs[1][2])
        assert np.array_equal(runs[0][3], runs[1][3])
        assert np.array_equal(runs[0][4], runs[1][4])

    def test_alignment_accumulator_matches_records(self):
        X, y = blob_stream(300, 4, seed=25)
        learner = HingeKernelSelector(make_config(seed=3, horizon=300))
        records = self.run_stream(learner, X, y, check_every=50)
        total = np.zeros(len(GRID))
        for rec in records:
            total += rec.gap_sq
        assert np.allclose(learner.alignment_proxies(), total, rtol=1e-10)

    def test_removal_count_against_expected_scale(self):
        X, y = blob_stream(800, 4, seed=26)
        learner = HingeKernelSelector(make_config(seed=4, horizon=800))
        self.run_stream(learner, X, y, check_every=100)
        bound = learner.removal_bounds(k1=1.0)
        assert np.all(learner.removals <= 3 * bound)

    def test_restart_mode(self):
        X, y = blob_stream(500, 4, seed=27)
        learner = HingeKernelSelector(make_config(seed=5, horizon=500, removal="restart"))
        self.run_stream(learner, X, y, check_every=50)
        assert learner.removals.sum() > 0

    def test_proxy_branch_fires_and_keeps_buffer(self):
        X, y = blob_stream(800, 3, seed=28, noise=0.3)
        learner = HingeKernelSelector(
            HingeSelectorConfig(kernels=GRID, dim=3, budget=60, horizon=800, seed=6)
        )
        proxies = 0
        for t in range(len(y)):
            learner.predict(X[t])
            before = [f.buffer_size() for f in learner.functions]
            rec = learner.update(X[t], y[t])
            for i in range(len(GRID)):
                if rec.branch[i] == "proxy":
                    proxies += 1
                    assert learner.functions[i].buffer_size() == before[i]
        assert proxies > 0
