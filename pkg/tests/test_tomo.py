"""Finite-shot tomography: sampling, reconstruction, error bars."""

import numpy as np
import pytest

from qstoch.process import CausalMachine
from qstoch.qmath import DensityMatrix, Ket, trace_distance, von_neumann_entropy
from qstoch.qmodel import quantum_causal_states, quantum_complexity, steady_state_rho
from qstoch.seeding import make_rng
from qstoch.tomo import (
    TomographyCounts,
    ensemble_density,
    entropy_with_error,
    reconstruct_rho,
    simulate_counts,
)


def exact_counts(rho, shots):
    """Counts at the rounded exact rates, bypassing sampling."""
    r = [2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real]
    pairs = []
    for val in r:
        plus = round(shots * (1 + val) / 2)
        pairs.append((plus, shots - plus))
    return TomographyCounts(shots_per_basis=shots, x=pairs[0], y=pairs[1], z=pairs[2])


class TestSimulateCounts:
    def test_maximally_mixed_all_bases_balanced(self):
        rng = make_rng(81)
        shots = 10_000
        counts = simulate_counts(DensityMatrix(np.eye(2) / 2), shots, rng)
        sigma = np.sqrt(shots * 0.25)
        for plus, minus in (counts.x, counts.y, counts.z):
            assert abs(plus - shots / 2) < 4 * sigma
            assert plus + minus == shots

    def test_equal_mixture_coherence_shows_in_x(self):
        machine = CausalMachine(0.8, 0.8)
        model = quantum_causal_states(machine)
        rng = make_rng(82)
        shots = 10_000
        counts = simulate_counts([model.ket0, model.ket1], shots, rng)
        rx = (counts.x[0] - counts.x[1]) / shots
        rz = (counts.z[0] - counts.z[1]) / shots
        assert abs(rx - 0.8) < 4 * np.sqrt((1 - 0.64) / shots)
        assert abs(rz) < 4 * np.sqrt(1.0 / shots)

    def test_pure_logical_state_deterministic_z(self):
        rng = make_rng(83)
        counts = simulate_counts(Ket([1.0, 0.0]), 10_000, rng)
        assert counts.z == (10_000, 0)

    def test_empty_ensemble_rejected(self):
        with pytest.raises(ValueError):
            simulate_counts([], 100, make_rng(0))

    def test_weighted_ensemble_form(self):
        machine = CausalMachine(0.9, 0.3)
        model = quantum_causal_states(machine)
        weighted = [(0.25, model.ket0), (0.75, model.ket1)]
        rho = ensemble_density(weighted)
        np.testing.assert_allclose(rho.entries,
                                   steady_state_rho(model).entries, atol=1e-12)

    def test_ket_array_form(self):
        kets = np.array([[1.0, 0.0], [0.0, 1.0]], dtype=complex)
        rho = ensemble_density(kets)
        np.testing.assert_allclose(rho.entries, np.eye(2) / 2, atol=1e-15)


class TestReconstructRho:
    def test_balanced_counts_give_maximally_mixed(self):
        counts = TomographyCounts(100, x=(50, 50), y=(50, 50), z=(50, 50))
        np.testing.assert_allclose(reconstruct_rho(counts).entries, np.eye(2) / 2,
                                   atol=1e-15)

    def test_exact_rate_limit_recovers_benchmark_matrix(self):
        rho = steady_state_rho(quantum_causal_states(CausalMachine(0.8, 0.8)))
        counts = exact_counts(rho.entries, 10_000_000)
        np.testing.assert_allclose(reconstruct_rho(counts).entries, rho.entries,
                                   atol=1e-6)

    def test_bloch_vector_projected_radially(self):
        # two near-extreme axes push |r| above 1; the hand-applied rule is
        # radial scaling onto the unit sphere
        counts = TomographyCounts(100, x=(98, 2), y=(50, 50), z=(75, 25))
        r = np.array([0.96, 0.0, 0.5])
        expected = r / np.linalg.norm(r)
        rho = reconstruct_rho(counts).entries
        got = np.array([2 * rho[0, 1].real, -2 * rho[0, 1].imag,
                        (rho[0, 0] - rho[1, 1]).real])
        np.testing.assert_allclose(got, expected, atol=1e-12)
        assert von_neumann_entropy(reconstruct_rho(counts)) < 1e-9

    def test_adversarial_counts_stay_physical(self):
        cases = [
            TomographyCounts(10, x=(10, 0), y=(10, 0), z=(10, 0)),
            TomographyCounts(10, x=(0, 10), y=(0, 10), z=(0, 10)),
            TomographyCounts(1, x=(1, 0), y=(0, 1), z=(1, 0)),
        ]
        for counts in cases:
            rho = reconstruct_rho(counts)        # constructor enforces invariants
            assert 0.0 <= von_neumann_entropy(rho) <= 1.0

    def test_counts_validated(self):
        with pytest.raises(ValueError):
            TomographyCounts(100, x=(60, 30), y=(50, 50), z=(50, 50))


class TestEntropyWithError:
    def test_maximally_mixed_counts(self):
        counts = TomographyCounts(10_000, x=(5000, 5000), y=(5000, 5000),
                                  z=(5000, 5000))
        result = entropy_with_error(counts, make_rng(84))
        assert result.entropy == pytest.approx(1.0, abs=1e-12)
        assert result.entropy_std < 0.01

    def test_asymmetric_ensemble_matches_model_entropy(self):
        machine = CausalMachine(0.9, 0.3)
        model = quantum_causal_states(machine)
        rng = make_rng(85)
        counts = simulate_counts([(0.25, model.ket0), (0.75, model.ket1)],
                                 10_000, rng)
        result = entropy_with_error(counts, rng)
        ideal = quantum_complexity(machine)
        print(f"tomographic entropy {result.entropy:.4f} +/- {result.entropy_std:.4f} "
              f"(construction value {ideal:.4f}, published theory figure 0.12)")
        assert abs(result.entropy - ideal) < 3 * result.entropy_std

    def test_bootstrap_rounds_validated(self):
        counts = TomographyCounts(100, x=(50, 50), y=(50, 50), z=(50, 50))
        with pytest.raises(ValueError):
            entropy_with_error(counts, make_rng(0), bootstrap_rounds=10)


class TestEstimatorBehaviour:
    def test_consistency_with_growing_shots(self):
        rho = steady_state_rho(quantum_causal_states(CausalMachine(0.8, 0.8)))
        rng = make_rng(86)
        distances = []
        for shots in (10 ** 3, 10 ** 4, 10 ** 5, 10 ** 6):
            reps = [trace_distance(reconstruct_rho(simulate_counts(rho, shots, rng)), rho)
                    for _ in range(20)]
            distances.append(np.mean(reps))
        assert all(b < a for a, b in zip(distances, distances[1:]))
        # root-N scaling: three decades of shots shrink the error ~ sqrt(1000)
        assert distances[-1] < distances[0] / 10.0

    def test_one_sigma_coverage(self):
        rho = steady_state_rho(quantum_causal_states(CausalMachine(0.8, 0.8)))
        truth = von_neumann_entropy(rho)
        rng = make_rng(87)
        hits = 0
        experiments = 200
        for _ in range(experiments):
            counts = simulate_counts(rho, 10_000, rng)
            result = entropy_with_error(counts, rng)
            hits += abs(result.entropy - truth) <= result.entropy_std
        assert 0.55 * experiments <= hits <= 0.80 * experiments

    def test_classical_ensemble_reconstruction_near_one_bit(self):
        # orthogonal logical states with equal weights: the simulated analogue
        # of the measured near-unity classical entropy
        rng = make_rng(88)
        counts = simulate_counts(DensityMatrix(np.eye(2) / 2), 10_000, rng)
        result = entropy_with_error(counts, rng)
        assert abs(result.entropy - 1.0) <= 3 * max(result.entropy_std, 1e-4)

    def test_upward_bias_near_pure_states(self):
        # quantified, not corrected: pure-state entropy estimates sit above 0
        ket = Ket([np.sqrt(0.5), np.sqrt(0.5)])
        rng = make_rng(89)
        estimates = [entropy_with_error(simulate_counts(ket, 10_000, rng), rng).entropy
                     for _ in range(50)]
        assert np.mean(estimates) >= 0.0
        assert np.mean(estimates) < 0.01
