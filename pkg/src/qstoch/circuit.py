"""Two-qubit step circuits: classical bit version and quantum statevector version.

One simulation step entangles the memory with a fresh meter, reads the meter
out in the logical basis (Born rule, destructive), discards the collapsed
memory qubit and freshly prepares the encoding of the observed output bit.
Because each output bit equals the destination causal state, repreparing by
output bit reproduces the process law exactly.

Gate imperfections are modelled as Monte Carlo Pauli trajectories: with
probability lam, one of the 15 non-identity two-qubit Paulis (uniformly
chosen) hits the state right after the entangling gate.  The exact average
of that channel is kept alongside for calibration against a Bell-state
fidelity target.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import qmath
from .process import CausalMachine, Trace, stationary_distribution
from .qmodel import QuantumModel, construct_cu, quantum_causal_states
from .qmath import DensityMatrix, Ket
from .seeding import make_rng

GATES = ("cnot", "cu")
MODES = ("classical", "quantum")

# model qubit is the first (most significant) factor and controls the meter
CNOT4 = np.array([[1, 0, 0, 0],
                  [0, 1, 0, 0],
                  [0, 0, 0, 1],
                  [0, 0, 1, 0]], dtype=complex)

_SINGLE_PAULIS = (qmath.IDENTITY2, qmath.PAULI_X, qmath.PAULI_Y, qmath.PAULI_Z)
TWO_QUBIT_PAULIS = tuple(
    np.kron(_SINGLE_PAULIS[i], _SINGLE_PAULIS[j])
    for i in range(4) for j in range(4) if (i, j) != (0, 0)
)


def bell_state() -> Ket:
    """(|00> + |11>) / sqrt(2)."""
    return Ket(np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0))


@dataclass(frozen=True)
class CircuitState:
    """Joint statevector of the step circuit.

    Fresh states hold both qubits (dim 4, model (x) meter); after a
    destructive measurement only the surviving qubit remains (dim 2).
    """

    joint: Ket
    step_index: int = 0


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing trajectory rate plus optional preparation misalignment.

    lam is the per-gate probability of a uniformly random non-identity
    two-qubit Pauli; prep_angle_error is the standard deviation (radians) of
    a Y-rotation error applied to every freshly prepared memory ket.
    """

    lam: float = 0.0
    prep_angle_error: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.lam <= 1.0):
            raise ValueError(f"lam must be in [0, 1], got {self.lam!r}")
        if self.prep_angle_error < 0.0:
            raise ValueError(f"prep_angle_error must be >= 0, got {self.prep_angle_error!r}")


@dataclass(frozen=True)
class RunResult:
    """Trace of an n-step run plus the per-step prepared memory kets."""

    trace: Trace
    memory_kets: np.ndarray     # (n, 2) complex; row j entered step j

    def __post_init__(self):
        kets = np.asarray(self.memory_kets, dtype=complex)
        kets.setflags(write=False)
        object.__setattr__(self, "memory_kets", kets)


# ---------------------------------------------------------------------------
# measurement
# ---------------------------------------------------------------------------

def _born_pick(p_one: float, rng: np.random.Generator) -> int:
    return int(rng.random() < p_one)


def measure_qubit(state: CircuitState, which: str,
                  rng: np.random.Generator) -> tuple[int, CircuitState]:
    """Logical-basis measurement of one qubit of a dim-4 state.

    Destructive: the outcome is Born-sampled, the measured qubit is removed,
    and the surviving qubit is returned renormalized as a dim-2 state.
    """
    if state.joint.dim != 4:
        raise ValueError("measure_qubit needs both qubits present (dim-4 state)")
    if which not in ("model", "meter"):
        raise ValueError(f"which must be 'model' or 'meter', got {which!r}")
    psi = state.joint.amplitudes
    if which == "model":
        branches = (psi[0:2], psi[2:4])
    else:
        branches = (psi[0::2], psi[1::2])
    p_one = float(np.real(np.vdot(branches[1], branches[1])))
    outcome = _born_pick(p_one, rng)
    kept = branches[outcome]
    norm = np.sqrt(np.real(np.vdot(kept, kept)))
    assert norm > 0.0, "Born rule selected a zero-norm branch"
    return outcome, CircuitState(joint=Ket(kept / norm), step_index=state.step_index)


# ---------------------------------------------------------------------------
# single steps
# ---------------------------------------------------------------------------

def classical_step(s: int, machine: CausalMachine,
                   rng: np.random.Generator) -> tuple[int, int]:
    """One step of the classical bit circuit: returns (output bit, next state).

    The state flips with its transition probability, is XORed onto a fresh
    zero meter bit, and the meter readout is both the output and the next
    state.
    """
    if s not in (0, 1):
        raise ValueError(f"causal state must be 0 or 1, got {s!r}")
    flip_prob = machine.p_right if s == 0 else machine.p_left
    flipped = s ^ int(rng.random() < flip_prob)
    meter = 0 ^ flipped
    return meter, meter


@lru_cache(maxsize=None)
def _step_operators(machine: CausalMachine, gate: str):
    """(meter input ket, entangling 4x4, pre-readout 4x4 frame or None).

    The cnot path uses a plain |0> meter and no extra frame.  The cu path
    prepares the meter in v|0> and reads it out in the v-rotated basis
    (realized as an inverse rotation before the logical measurement); this
    folding of the rotation into preparation and readout is what makes the
    controlled-u statistics match the cnot ones exactly.
    """
    if gate == "cnot":
        return np.array([1.0, 0.0], dtype=complex), CNOT4, None
    ops = construct_cu(machine)
    v = ops.v.entries
    meter_in = v[:, 0].copy()
    frame = np.kron(np.eye(2, dtype=complex), v.conj().T)
    return meter_in, ops.cu.entries, frame


def _apply_noise_raw(psi: np.ndarray, lam: float, rng: np.random.Generator) -> np.ndarray:
    if rng.random() < lam:
        return TWO_QUBIT_PAULIS[int(rng.integers(15))] @ psi
    return psi


def _quantum_step_raw(mem: np.ndarray, preps, meter_in, gate4, frame,
                      lam: float, prep_sigma: float,
                      rng: np.random.Generator) -> tuple[int, np.ndarray]:
    psi = gate4 @ np.kron(mem, meter_in)
    if lam > 0.0:
        psi = _apply_noise_raw(psi, lam, rng)
    if frame is not None:
        psi = frame @ psi
    odd = psi[1::2]
    outcome = _born_pick(float(np.real(np.vdot(odd, odd))), rng)
    nxt = preps[outcome]
    if prep_sigma > 0.0:
        eps = rng.normal(0.0, prep_sigma)
        c, s = np.cos(eps / 2.0), np.sin(eps / 2.0)
        nxt = np.array([[c, -s], [s, c]], dtype=complex) @ nxt
    return outcome, nxt


def quantum_step(memory: Ket, model: QuantumModel, rng: np.random.Generator,
                 gate: str = "cnot",
                 noise: NoiseModel | None = None) -> tuple[int, Ket]:
    """One quantum step: entangle, read the meter, reprepare by output bit.

    The memory (dim 2) meets a fresh meter, the chosen two-qubit gate runs
    with the model qubit as control, trajectory noise may strike, and the
    meter is measured in the logical basis.  The collapsed model qubit is
    discarded and the returned memory is the encoding of the output bit.
    """
    if memory.dim != 2:
        raise ValueError("memory must be a single-qubit ket")
    if gate not in GATES:
        raise ValueError(f"gate must be one of {GATES}, got {gate!r}")
    noise = noise or NoiseModel()
    meter_in, gate4, frame = _step_operators(model.machine, gate)
    preps = (model.ket0.amplitudes, model.ket1.amplitudes)
    outcome, nxt = _quantum_step_raw(memory.amplitudes, preps, meter_in, gate4,
                                     frame, noise.lam, noise.prep_angle_error, rng)
    return outcome, Ket(nxt)


def apply_noise(state: CircuitState, noise: NoiseModel,
                rng: np.random.Generator) -> CircuitState:
    """Depolarizing trajectory: with probability lam, a random non-identity
    two-qubit Pauli hits the joint state; otherwise it passes unchanged."""
    if state.joint.dim != 4:
        raise ValueError("apply_noise acts on the two-qubit joint state")
    psi = _apply_noise_raw(state.joint.amplitudes, noise.lam, rng)
    if psi is state.joint.amplitudes:
        return state
    return CircuitState(joint=Ket(psi), step_index=state.step_index)


# ---------------------------------------------------------------------------
# exact noise channel and calibration
# ---------------------------------------------------------------------------

def depolarizing_average(rho: DensityMatrix, lam: float) -> DensityMatrix:
    """Exact trajectory average: (1 - lam) rho + (lam / 15) sum_P P rho P."""
    if not (0.0 <= lam <= 1.0):
        raise ValueError(f"lam must be in [0, 1], got {lam!r}")
    if rho.dim != 4:
        raise ValueError("depolarizing_average acts on two-qubit states")
    arr = rho.entries
    acc = np.zeros_like(arr)
    for pauli in TWO_QUBIT_PAULIS:
        acc += pauli @ arr @ pauli.conj().T
    return DensityMatrix((1.0 - lam) * arr + (lam / 15.0) * acc)


def to_mixing_rate(lam: float) -> float:
    """Equivalent replace-with-maximally-mixed rate: 16 lam / 15."""
    return 16.0 * lam / 15.0


def from_mixing_rate(rate: float) -> float:
    """Pauli-trajectory rate matching a replace-with-maximally-mixed rate."""
    return 15.0 * rate / 16.0


def noisy_bell_average(lam: float) -> DensityMatrix:
    """Average state from the noisy entangler on separable Bell-prep inputs."""
    plus = Ket(np.array([1.0, 1.0]) / np.sqrt(2.0))
    ideal = Ket(CNOT4 @ np.kron(plus.amplitudes, np.array([1.0, 0.0], dtype=complex)))
    return depolarizing_average(ideal.projector(), lam)


def calibrate_noise(target_fidelity: float) -> NoiseModel:
    """Trajectory rate whose exact channel average hits a Bell fidelity target.

    Root-found against the exact average channel (not Monte Carlo).  Targets
    below 0.25 are rejected as unachievable.
    """
    if not (0.25 <= target_fidelity <= 1.0):
        raise ValueError(f"target fidelity must be in [0.25, 1], got {target_fidelity!r}")
    bell = bell_state()

    def gap(lam: float) -> float:
        return qmath.fidelity(noisy_bell_average(lam), bell) - target_fidelity

    if gap(0.0) <= 0.0:        # target is the clean-gate fidelity (float-exactly)
        return NoiseModel(lam=0.0)
    lam = float(brentq(gap, 0.0, 1.0, xtol=1e-14))
    return NoiseModel(lam=lam)


# ---------------------------------------------------------------------------
# trace runs
# ---------------------------------------------------------------------------

def run_trace(machine: CausalMachine, mode: str, n: int, seed: int,
              gate: str = "cnot", noise: NoiseModel | None = None) -> RunResult:
    """Iterate the step circuit n times from a stationary start.

    Returns the output trace plus, for every step, the memory ket that
    entered it: encoded causal states in quantum mode, logical basis states
    in classical mode.  That ket record is the tomography ensemble.
    Reproducible for a fixed seed.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if gate not in GATES:
        raise ValueError(f"gate must be one of {GATES}, got {gate!r}")
    if n < 1:
        raise ValueError(f"step count must be >= 1, got {n!r}")
    noise = noise or NoiseModel()

    rng = make_rng(seed)
    w0, _ = stationary_distribution(machine)
    state = 0 if rng.random() < w0 else 1

    outputs = np.empty(n, dtype=np.int8)
    kets = np.empty((n, 2), dtype=complex)

    if mode == "classical":
        logical = (np.array([1.0, 0.0], dtype=complex), np.array([0.0, 1.0], dtype=complex))
        for j in range(n):
            kets[j] = logical[state]
            x, state = classical_step(state, machine, rng)
            outputs[j] = x
    else:
        model = quantum_causal_states(machine)
        preps = (model.ket0.amplitudes, model.ket1.amplitudes)
        meter_in, gate4, frame = _step_operators(machine, gate)
        lam, sigma = noise.lam, noise.prep_angle_error
        mem = preps[state]
        if sigma > 0.0:
            eps = rng.normal(0.0, sigma)
            c, s = np.cos(eps / 2.0), np.sin(eps / 2.0)
            mem = np.array([[c, -s], [s, c]], dtype=complex) @ mem
        for j in range(n):
            kets[j] = mem
            x, mem = _quantum_step_raw(mem, preps, meter_in, gate4, frame,
                                       lam, sigma, rng)
            outputs[j] = x

    trace = Trace(outputs=outputs, states=outputs.copy(), seed=int(seed))
    return RunResult(trace=trace, memory_kets=kets)
