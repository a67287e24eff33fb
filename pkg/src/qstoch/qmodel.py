"""Qubit encoding of the causal states and its memory cost.

Each causal state s gets a real-amplitude ket: state 0 encodes its transition
law as (sqrt(1 - p_right), sqrt(p_right)), state 1 as
(sqrt(p_left), sqrt(1 - p_left)).  The kets are generally non-orthogonal,
which is what pushes the steady-state memory entropy below the classical
stationary entropy.  Also synthesized here: the controlled step operator for
the asymmetric circuit, built from a Y-axis rotation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import qmath
from .qmath import DensityMatrix, Ket, Unitary
from .process import CausalMachine, stationary_distribution

SYNTH_TOL = 1e-12


class SynthesisError(RuntimeError):
    """No Y-rotation maps ket0 onto ket1; cannot happen for a valid machine."""


@dataclass(frozen=True)
class QuantumModel:
    """Causal machine together with its qubit encoding and equilibrium law."""

    machine: CausalMachine
    ket0: Ket
    ket1: Ket
    stationary: tuple[float, float]


class StepGates(NamedTuple):
    """Operators for one asymmetric circuit step.

    v:  Y-rotation defining the frame in which ket0 and ket1 are mirror
        images under a bit flip.
    u:  involution with u ket0 = ket1 (exactly, not just up to phase).
    cu: two-qubit gate applying u on the target conditioned on the control
        qubit's logical |1> component.
    """

    v: Unitary
    u: Unitary
    cu: Unitary


def quantum_causal_states(machine: CausalMachine) -> QuantumModel:
    """Encode both causal states as real non-negative amplitude kets."""
    pr, pl = machine.p_right, machine.p_left
    ket0 = Ket(np.array([np.sqrt(1.0 - pr), np.sqrt(pr)], dtype=complex))
    ket1 = Ket(np.array([np.sqrt(pl), np.sqrt(1.0 - pl)], dtype=complex))
    return QuantumModel(machine=machine, ket0=ket0, ket1=ket1,
                        stationary=stationary_distribution(machine))


def steady_state_rho(model: QuantumModel) -> DensityMatrix:
    """Memory state averaged over the equilibrium causal-state law."""
    return qmath.mixture(model.stationary, (model.ket0, model.ket1))


def quantum_complexity(machine: CausalMachine) -> float:
    """Entropy (bits) of the steady-state memory; never exceeds the classical cost."""
    return qmath.von_neumann_entropy(steady_state_rho(quantum_causal_states(machine)))


def _bloch_angle(ket: Ket) -> float:
    """Polar angle of a real-amplitude ket: amplitudes (cos a/2, sin a/2)."""
    return 2.0 * np.arctan2(ket.amplitudes[1].real, ket.amplitudes[0].real)


@lru_cache(maxsize=None)
def construct_cu(machine: CausalMachine, control: str = "model") -> StepGates:
    """Synthesize (v, u, cu) with u = v X v-dagger and u ket0 = ket1.

    For real-amplitude kets at polar angles a0, a1, the rotation angle
    theta = (a0 + a1 - pi) / 2 makes u the reflection exchanging them; the
    smallest non-negative exact solution is returned (it lies in [0, pi)
    whenever p_right >= p_left).  In the symmetric case theta = 0, so v is
    the identity and u the plain bit flip.  By default the model qubit
    (first tensor factor) controls and the meter is the target; pass
    control="meter" to swap the assignment.
    """
    if control not in ("model", "meter"):
        raise ValueError(f"control must be 'model' or 'meter', got {control!r}")
    model = quantum_causal_states(machine)
    theta = (_bloch_angle(model.ket0) + _bloch_angle(model.ket1) - np.pi) / 2.0
    theta %= 2.0 * np.pi
    v = qmath.ry(theta)
    x = qmath.PAULI_X
    u = v.entries @ x @ v.entries.conj().T

    err = np.linalg.norm(u @ model.ket0.amplitudes - model.ket1.amplitudes)
    if err > SYNTH_TOL:
        raise SynthesisError(f"u ket0 differs from ket1 by {err!r} at {machine!r}")
    if np.linalg.norm(u @ u - np.eye(2)) > SYNTH_TOL:
        raise SynthesisError(f"synthesized u is not an involution at {machine!r}")

    proj0 = np.diag([1.0, 0.0]).astype(complex)
    proj1 = np.diag([0.0, 1.0]).astype(complex)
    eye = np.eye(2, dtype=complex)
    if control == "model":
        cu = np.kron(proj0, eye) + np.kron(proj1, u)
    else:
        cu = np.kron(eye, proj0) + np.kron(u, proj1)
    return StepGates(v=v, u=Unitary(u), cu=Unitary(cu))
