"""Exact block-count deviations vs brute-force ensembles of independent runs."""

import numpy as np
import pytest

from qstoch.process import CausalMachine, block_distribution, sample_sequence
from qstoch.stats import (
    block_count_sigma,
    block_law_check,
    conditional_block_probs,
    disjoint_block_counts,
    two_sample_block_check,
)


class TestDisjointBlockCounts:
    def test_hand_counted_example(self):
        outputs = np.array([1, 0, 1, 1, 0, 1, 0])   # windows: 10, 11, 01; tail dropped
        counts = disjoint_block_counts(outputs, 2)
        np.testing.assert_array_equal(counts, [0, 1, 1, 1])

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            disjoint_block_counts(np.array([1, 0]), 3)


class TestConditionalBlockProbs:
    def test_rows_sum_to_one_per_start_state(self):
        cond = conditional_block_probs(CausalMachine(0.9, 0.3), 4)
        np.testing.assert_allclose(cond.sum(axis=0), [1.0, 1.0], atol=1e-12)

    def test_stationary_mixture_recovers_block_law(self):
        machine = CausalMachine(0.9, 0.3)
        cond = conditional_block_probs(machine, 3)
        law = cond @ np.array([0.25, 0.75])
        np.testing.assert_allclose(law, block_distribution(machine, 3), atol=1e-12)


class TestBlockCountSigma:
    @pytest.mark.parametrize("probs,block_len", [((0.8, 0.8), 2), ((0.2, 0.2), 1),
                                                 ((0.9, 0.3), 3)])
    def test_matches_independent_trace_ensemble(self, probs, block_len):
        # oracle: the empirical count spread over thousands of separate runs
        machine = CausalMachine(*probs)
        n_steps = 240
        m = n_steps // block_len
        reps = 3000
        all_counts = np.empty((reps, 2 ** block_len))
        for i in range(reps):
            trace = sample_sequence(machine, n_steps, seed=10_000 + i)
            all_counts[i] = disjoint_block_counts(trace.outputs, block_len)
        empirical = all_counts.std(axis=0, ddof=1)
        predicted = block_count_sigma(machine, block_len, m)
        np.testing.assert_allclose(empirical, predicted, rtol=0.12)

    def test_period_two_machine_exact(self):
        # deterministic alternation: every length-2 window is 01 or 10 for the
        # whole run, decided by the start state, so the count std is m/2
        machine = CausalMachine(1.0, 1.0)
        m = 500
        sigma = block_count_sigma(machine, 2, m)
        np.testing.assert_allclose(sigma[0b01], m / 2, atol=1e-9)
        np.testing.assert_allclose(sigma[0b10], m / 2, atol=1e-9)
        np.testing.assert_allclose(sigma[0b00], 0.0, atol=1e-9)

    def test_period_two_trace_passes_check(self):
        machine = CausalMachine(1.0, 1.0)
        trace = sample_sequence(machine, 50_000, seed=77)
        for block_len in (1, 2, 3, 4):
            assert block_law_check(machine, trace.outputs, block_len).passed

    def test_nearly_frozen_machine_is_finite(self):
        sigma = block_count_sigma(CausalMachine(1e-6, 1e-6), 2, 10_000)
        assert np.all(np.isfinite(sigma))

    def test_iid_case_reduces_to_multinomial(self):
        machine = CausalMachine(0.5, 0.5)
        m = 1000
        probs = block_distribution(machine, 2)
        expected = np.sqrt(m * probs * (1 - probs))
        np.testing.assert_allclose(block_count_sigma(machine, 2, m), expected,
                                   atol=1e-9)


class TestChecks:
    def test_matching_traces_pass(self):
        machine = CausalMachine(0.8, 0.8)
        a = sample_sequence(machine, 40_000, seed=1)
        b = sample_sequence(machine, 40_000, seed=2)
        for block_len in (1, 2, 3):
            assert two_sample_block_check(machine, a.outputs, b.outputs, block_len)

    def test_mismatched_law_detected(self):
        machine = CausalMachine(0.8, 0.8)
        other = sample_sequence(CausalMachine(0.6, 0.6), 40_000, seed=3)
        check = block_law_check(machine, other.outputs, 2)
        assert not check.passed
        assert check.tv > check.tv_bound

    def test_check_fields_consistent(self):
        machine = CausalMachine(0.9, 0.3)
        trace = sample_sequence(machine, 30_000, seed=4)
        check = block_law_check(machine, trace.outputs, 3)
        assert check.passed
        assert check.counts.sum() == check.n_blocks
        assert abs(check.freqs.sum() - 1.0) < 1e-12
        assert 0.0 <= check.tv <= 1.0
