"""Two-switch stochastic process and its minimal causal-state machine.

The ground truth is a pair of binary switches: each step one switch is picked
at random and flipped with a probability that depends on whether the switches
currently agree (p_right when aligned, p_left when anti-aligned); the step
then outputs 0 if the switches agree and 1 otherwise.  Only the switch parity
matters for the output law, so the process reduces to a two-state Markov
machine on parity.

Conventions used throughout the package:
  * causal state = parity (0 = aligned), and the emitted bit equals the
    DESTINATION state of each step, i.e. output 0 iff aligned after the flip.
  * all entropies are in bits;
  * length-L output blocks are indexed as integers with the first emitted
    bit in the most significant position.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qmath import shannon_entropy
from .seeding import make_rng

MERGE_TOL = 1e-12   # |1 - p_right - p_left| below this collapses the two states

MAX_BLOCK_LEN = 12
MAX_HALF_WINDOW = 6


class ReducibleChainError(ValueError):
    """Raised when p_right = p_left = 0: no unique stationary distribution."""


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

def _check_prob(p: float, name: str) -> None:
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"{name} must be in [0, 1], got {p!r}")


@dataclass(frozen=True)
class SwitchConfig:
    """Settings of the two ground-truth switches."""

    b1: int
    b2: int

    def __post_init__(self):
        if self.b1 not in (0, 1) or self.b2 not in (0, 1):
            raise ValueError(f"switch settings must be bits, got ({self.b1!r}, {self.b2!r})")

    @property
    def parity(self) -> int:
        """Causal-state label: 0 when the switches agree."""
        return self.b1 ^ self.b2


@dataclass(frozen=True)
class CausalMachine:
    """Two-state Markov machine on switch parity.

    p_right is the 0 -> 1 transition probability, p_left the 1 -> 0 one.
    The symmetric process of the main demonstration has p_right == p_left.
    """

    p_right: float
    p_left: float

    def __post_init__(self):
        _check_prob(self.p_right, "p_right")
        _check_prob(self.p_left, "p_left")

    def transition_matrix(self) -> np.ndarray:
        """t[s, x] = probability of moving from state s to state x."""
        return np.array([[1.0 - self.p_right, self.p_right],
                         [self.p_left, 1.0 - self.p_left]])


@dataclass(frozen=True)
class IidMachine:
    """Degenerate single-state machine: outputs are iid Bernoulli(p_one)."""

    p_one: float

    def __post_init__(self):
        _check_prob(self.p_one, "p_one")


@dataclass(frozen=True)
class Trace:
    """Emitted bits plus the per-step memory-state record of one run."""

    outputs: np.ndarray
    states: np.ndarray
    seed: int

    def __post_init__(self):
        out = np.asarray(self.outputs, dtype=np.int8)
        st = np.asarray(self.states, dtype=np.int8)
        if out.shape != st.shape or out.ndim != 1:
            raise ValueError("outputs and states must be 1-d arrays of equal length")
        # emission convention: every output bit is the destination causal state
        if not np.array_equal(out, st):
            raise ValueError("trace violates the emission rule (outputs != states)")
        out.setflags(write=False)
        st.setflags(write=False)
        object.__setattr__(self, "outputs", out)
        object.__setattr__(self, "states", st)

    def __len__(self) -> int:
        return self.outputs.shape[0]


# ---------------------------------------------------------------------------
# ground-truth switch dynamics
# ---------------------------------------------------------------------------

def two_switch_step(cfg: SwitchConfig, machine: CausalMachine,
                    rng: np.random.Generator) -> tuple[SwitchConfig, int]:
    """Advance the switch pair one step; returns (new config, emitted bit).

    One switch is chosen uniformly and flipped with probability p_right when
    the switches currently agree, p_left otherwise.  Two RNG draws are
    consumed per call regardless of outcome, keeping streams aligned.
    """
    flip_prob = machine.p_right if cfg.parity == 0 else machine.p_left
    which = int(rng.integers(2))
    do_flip = rng.random() < flip_prob
    b1, b2 = cfg.b1, cfg.b2
    if do_flip:
        if which == 0:
            b1 ^= 1
        else:
            b2 ^= 1
    new_cfg = SwitchConfig(b1, b2)
    return new_cfg, new_cfg.parity


def reduce_to_causal_machine(p_align: float, p_anti: float | None = None) -> CausalMachine:
    """Minimal parity machine for a two-switch process.

    p_align is the flip probability when the switches agree, p_anti when they
    disagree (defaults to p_align for the symmetric process).  Flipping either
    switch toggles the parity, so the parity chain transitions 0 -> 1 with
    p_align and 1 -> 0 with p_anti; length-L output block laws of the 4-state
    switch chain and of the returned machine coincide exactly.
    """
    if p_anti is None:
        p_anti = p_align
    return CausalMachine(p_right=p_align, p_left=p_anti)


def _emission_resolved_4state(machine: CausalMachine) -> tuple[np.ndarray, np.ndarray]:
    """t4[x][c_next, c] for the 4-config chain; configs indexed (b1 << 1) | b2."""
    t4 = np.zeros((2, 4, 4))
    for c in range(4):
        parity = ((c >> 1) & 1) ^ (c & 1)
        p = machine.p_right if parity == 0 else machine.p_left
        stay = 1.0 - p
        t4[parity, c, c] += stay                       # no flip: parity unchanged
        for flipped in (c ^ 2, c ^ 1):                 # flip b1 / flip b2
            new_parity = ((flipped >> 1) & 1) ^ (flipped & 1)
            t4[new_parity, flipped, c] += p / 2.0
    return t4[0], t4[1]


def two_switch_stationary(machine: CausalMachine) -> np.ndarray:
    """Stationary law over the four switch configs [00, 01, 10, 11].

    The dynamics are symmetric under flipping both switches, so the two
    configs within each parity class carry equal mass; boundary cases where
    the 4-state chain is not irreducible inherit this uniform-within-class
    convention from the parity chain.
    """
    w0, w1 = stationary_distribution(machine)
    return np.array([w0 / 2.0, w1 / 2.0, w1 / 2.0, w0 / 2.0])


def two_switch_block_distribution(machine: CausalMachine, block_len: int) -> np.ndarray:
    """Exact length-L output block law of the 4-state switch chain.

    Computed by propagating emission-resolved 4x4 transition matrices from
    the stationary configuration law; independent of the reduced 2-state
    path in block_distribution.
    """
    if not (1 <= block_len <= MAX_BLOCK_LEN):
        raise ValueError(f"block length must be in [1, {MAX_BLOCK_LEN}], got {block_len!r}")
    t_emit0, t_emit1 = _emission_resolved_4state(machine)
    vecs = two_switch_stationary(machine)[np.newaxis, :]    # (n_prefixes, 4)
    for _ in range(block_len):
        nxt = np.empty((vecs.shape[0] * 2, 4))
        nxt[0::2] = vecs @ t_emit0.T
        nxt[1::2] = vecs @ t_emit1.T
        vecs = nxt
    return vecs.sum(axis=1)


def naive_switch_entropy(machine: CausalMachine) -> float:
    """Memory cost of tracking both switches: entropy of the 4-config law."""
    return shannon_entropy(two_switch_stationary(machine))


# ---------------------------------------------------------------------------
# causal-machine analysis
# ---------------------------------------------------------------------------

def merge_equivalent_states(machine: CausalMachine | IidMachine) -> CausalMachine | IidMachine:
    """Collapse the two states when their output laws coincide.

    State 0 emits 1 with probability p_right, state 1 with 1 - p_left; the
    laws agree exactly when p_right + p_left = 1 (within 1e-12), in which
    case the process is iid and a single state suffices.  Idempotent.
    """
    if isinstance(machine, IidMachine):
        return machine
    if abs(1.0 - machine.p_right - machine.p_left) <= MERGE_TOL:
        return IidMachine(p_one=machine.p_right)
    return machine


def stationary_distribution(machine: CausalMachine) -> tuple[float, float]:
    """Equilibrium (w0, w1) solving w0 * p_right = w1 * p_left.

    p_right = p_left = 0 has no unique equilibrium and raises
    ReducibleChainError.  p_right = p_left = 1 is a valid period-2 chain;
    (0.5, 0.5) is its time-average occupation.
    """
    total = machine.p_right + machine.p_left
    if total == 0.0:
        raise ReducibleChainError("p_right = p_left = 0: stationary distribution is not unique")
    return machine.p_left / total, machine.p_right / total


def classical_complexity(machine: CausalMachine | IidMachine) -> float:
    """Entropy (bits) of the stationary causal-state law of the minimal machine."""
    minimal = merge_equivalent_states(machine)
    if isinstance(minimal, IidMachine):
        return 0.0
    return shannon_entropy(stationary_distribution(minimal))


def block_distribution(machine: CausalMachine, block_len: int) -> np.ndarray:
    """Exact law of length-L output blocks from a stationary start.

    Returns a vector of 2**L probabilities indexed with the first bit most
    significant.  Because each output equals the destination state, a block
    pins the whole state path, so probabilities are simple products.
    """
    if not (1 <= block_len <= MAX_BLOCK_LEN):
        raise ValueError(f"block length must be in [1, {MAX_BLOCK_LEN}], got {block_len!r}")
    t = machine.transition_matrix()
    w = np.array(stationary_distribution(machine))
    probs = w @ t                                           # law of the first bit
    for size in (2 ** k for k in range(1, block_len)):
        last_bit = np.arange(size) & 1                      # = current state
        nxt = np.empty(size * 2)
        nxt[0::2] = probs * t[last_bit, 0]
        nxt[1::2] = probs * t[last_bit, 1]
        probs = nxt
    return probs


def excess_entropy(machine: CausalMachine, half_window: int) -> float:
    """Mutual information (bits) between L past and L future outputs.

    I(X_1..X_L ; X_{L+1}..X_2L) = 2 H_L - H_2L by stationarity, evaluated on
    exact block laws.  Limited to L <= 6 so the joint block stays enumerable.
    """
    if not (1 <= half_window <= MAX_HALF_WINDOW):
        raise ValueError(f"half-window must be in [1, {MAX_HALF_WINDOW}], got {half_window!r}")
    h_half = shannon_entropy(block_distribution(machine, half_window))
    h_full = shannon_entropy(block_distribution(machine, 2 * half_window))
    return max(2.0 * h_half - h_full, 0.0)


def sample_sequence(machine: CausalMachine, n: int, seed: int,
                    start: int | None = None, burn_in: int = 0) -> Trace:
    """Sample an n-step output trace, reproducible for a fixed seed.

    The initial state is drawn from the stationary distribution unless a
    start state is forced (needed e.g. for reducible parameter choices).
    burn_in extra steps may be discarded first; the default relies on the
    exact stationary draw instead.
    """
    if n < 1:
        raise ValueError(f"sequence length must be >= 1, got {n!r}")
    if burn_in < 0:
        raise ValueError(f"burn_in must be >= 0, got {burn_in!r}")
    rng = make_rng(seed)
    if start is None:
        w0, _ = stationary_distribution(machine)
        state = 0 if rng.random() < w0 else 1
    else:
        if start not in (0, 1):
            raise ValueError(f"start state must be 0 or 1, got {start!r}")
        state = start
    move_prob = (machine.p_right, 1.0 - machine.p_left)     # P(next state = 1 | state)
    draws = rng.random(burn_in + n)
    for j in range(burn_in):
        state = int(draws[j] < move_prob[state])
    outputs = np.empty(n, dtype=np.int8)
    for j in range(n):
        state = int(draws[burn_in + j] < move_prob[state])
        outputs[j] = state
    return Trace(outputs=outputs, states=outputs.copy(), seed=int(seed))
