"""Complex linear algebra for one and two qubits.

Everything here is deterministic and pure: entropies in bits, a closed-form
2x2 Hermitian eigensolver (bit-reproducible across platforms), state fidelity,
Y-axis rotations and tensor products.  Dimensions are restricted to 2 and 4;
the composite ordering is fixed repo-wide as model (x) meter, with the model
qubit as the most significant factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ATOL_UNIT = 1e-12      # normalization / hermiticity / unitarity tolerance
ATOL_PSD = 1e-10       # most negative eigenvalue tolerated in a density matrix
ATOL_DIST = 1e-9       # probability vectors must sum to 1 within this
EIG_ZERO = 1e-12       # eigenvalues below this count as 0 in entropies

_DIMS = (2, 4)


class InvalidDistributionError(ValueError):
    """Raised when a probability vector has negative mass or wrong total."""


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

def _as_complex(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if arr.ndim == 0:
        raise ValueError(f"{name} must be array-like")
    return arr


@dataclass(frozen=True)
class Ket:
    """Unit-norm complex amplitude vector over 1 or 2 qubits."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = _as_complex(self.amplitudes, "amplitudes")
        if amp.ndim != 1 or amp.shape[0] not in _DIMS:
            raise ValueError(f"ket must have dimension 2 or 4, got shape {amp.shape}")
        norm_sq = float(np.real(np.vdot(amp, amp)))
        if abs(norm_sq - 1.0) > ATOL_UNIT:
            raise ValueError(f"ket is not normalized: sum |a|^2 = {norm_sq!r}")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix (dim 2 or 4)."""

    entries: np.ndarray

    def __post_init__(self):
        m = _as_complex(self.entries, "entries")
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in _DIMS:
            raise ValueError(f"density matrix must be 2x2 or 4x4, got shape {m.shape}")
        if not np.allclose(m, m.conj().T, rtol=0.0, atol=ATOL_UNIT):
            raise ValueError("density matrix is not Hermitian")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > ATOL_UNIT:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        if float(_hermitian_eigvals(m).min()) < -ATOL_PSD:
            raise ValueError("density matrix is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class Unitary:
    """Unitary matrix of dimension 2 or 4."""

    entries: np.ndarray

    def __post_init__(self):
        m = _as_complex(self.entries, "entries")
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in _DIMS:
            raise ValueError(f"unitary must be 2x2 or 4x4, got shape {m.shape}")
        if not np.allclose(m @ m.conj().T, np.eye(m.shape[0]), rtol=0.0, atol=ATOL_UNIT):
            raise ValueError("matrix is not unitary")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


# logical basis kets and single-qubit operators
KET0 = Ket(np.array([1.0, 0.0]))
KET1 = Ket(np.array([0.0, 1.0]))

IDENTITY2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def basis_ket(index: int, dim: int = 2) -> Ket:
    amp = np.zeros(dim, dtype=complex)
    amp[index] = 1.0
    return Ket(amp)


def overlap(a: Ket, b: Ket) -> complex:
    """Inner product <a|b>."""
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def same_state(a: Ket, b: Ket, atol: float = ATOL_UNIT) -> bool:
    """State equality up to global phase, via |<a|b>| = 1."""
    return abs(abs(overlap(a, b)) - 1.0) <= atol


# ---------------------------------------------------------------------------
# eigensolver
# ---------------------------------------------------------------------------

def _eigh2(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigensystem of a 2x2 Hermitian matrix, descending order."""
    a = m[0, 0].real
    c = m[1, 1].real
    b = m[0, 1]
    half_gap = 0.5 * (a - c)
    disc = np.hypot(half_gap, abs(b))
    mean = 0.5 * (a + c)
    vals = np.array([mean + disc, mean - disc])

    if abs(b) == 0.0:
        vecs = np.eye(2, dtype=complex)
        if a < c:
            vecs = vecs[:, ::-1]
        return vals, np.ascontiguousarray(vecs)

    vecs = np.empty((2, 2), dtype=complex)
    for k, lam in enumerate(vals):
        # rows of (m - lam I) are proportional; pick the better-conditioned one
        v1 = np.array([b, lam - a])
        v2 = np.array([lam - c, np.conj(b)])
        v = v1 if np.vdot(v1, v1).real >= np.vdot(v2, v2).real else v2
        v = v / np.sqrt(np.vdot(v, v).real)
        # fix phase: largest-magnitude component made real positive
        pivot = v[np.argmax(np.abs(v))]
        v = v * (np.conj(pivot) / abs(pivot))
        vecs[:, k] = v
    return vals, vecs


def _hermitian_eigvals(m: np.ndarray) -> np.ndarray:
    if m.shape[0] == 2:
        return _eigh2(m)[0]
    return np.linalg.eigvalsh(m)[::-1]


def eig_hermitian(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian matrix.

    Accepts a DensityMatrix or a raw 2x2 / 4x4 array.  The 2x2 path is the
    closed-form solution of the characteristic polynomial; 4x4 defers to
    numpy's symmetric solver.  Eigenvectors are returned as matrix columns.
    """
    arr = m.entries if isinstance(m, DensityMatrix) else _as_complex(m, "matrix")
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] not in _DIMS:
        raise ValueError(f"expected a 2x2 or 4x4 matrix, got shape {arr.shape}")
    if not np.allclose(arr, arr.conj().T, rtol=0.0, atol=ATOL_UNIT):
        raise ValueError("matrix is not Hermitian")
    if arr.shape[0] == 2:
        return _eigh2(arr)
    vals, vecs = np.linalg.eigh(arr)
    return vals[::-1], np.ascontiguousarray(vecs[:, ::-1])


# ---------------------------------------------------------------------------
# entropies and fidelity
# ---------------------------------------------------------------------------

def shannon_entropy(dist) -> float:
    """Shannon entropy in bits, with the convention 0 log 0 = 0.

    Raises InvalidDistributionError for negative entries or a total that
    deviates from 1 by more than 1e-9.
    """
    p = np.asarray(dist, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InvalidDistributionError("distribution must be a non-empty vector")
    if np.any(p < 0.0) or np.any(p > 1.0 + ATOL_DIST):
        raise InvalidDistributionError(f"entries outside [0, 1] in {p!r}")
    total = float(p.sum())
    if abs(total - 1.0) > ATOL_DIST:
        raise InvalidDistributionError(f"probabilities sum to {total!r}, expected 1")
    nz = np.minimum(p[p > 0.0], 1.0)    # shave float dust above 1 before the log
    return max(0.0, float(-(nz * np.log2(nz)).sum()))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-Tr(rho log2 rho), evaluated on the eigenvalue spectrum.

    Eigenvalues in [-1e-10, 0) are clipped to 0 (floating residue of a
    physical matrix); anything more negative is an error upstream.
    Eigenvalues below 1e-12 contribute nothing.
    """
    vals, _ = eig_hermitian(rho)
    if float(vals.min()) < -ATOL_PSD:
        raise ValueError(f"matrix has a significantly negative eigenvalue: {vals.min()!r}")
    vals = np.where(vals < EIG_ZERO, 0.0, vals)
    return shannon_entropy(vals)


def fidelity(rho: DensityMatrix, target: Ket) -> float:
    """State fidelity <target| rho |target> with a pure target."""
    if rho.dim != target.dim:
        raise ValueError(f"dimension mismatch: rho dim {rho.dim}, target dim {target.dim}")
    t = target.amplitudes
    val = complex(np.vdot(t, rho.entries @ t))
    if abs(val.imag) > ATOL_UNIT:
        raise ValueError(f"fidelity came out complex: {val!r}")
    return float(val.real)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Half the trace norm of (a - b)."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    vals, _ = eig_hermitian(a.entries - b.entries)
    return 0.5 * float(np.abs(vals).sum())


# ---------------------------------------------------------------------------
# rotations and composition
# ---------------------------------------------------------------------------

def ry(theta: float) -> Unitary:
    """Rotation about the Bloch Y-axis: |0> -> cos(t/2)|0> + sin(t/2)|1>."""
    if not np.isfinite(theta):
        raise ValueError(f"rotation angle must be finite, got {theta!r}")
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return Unitary(np.array([[c, -s], [s, c]], dtype=complex))


def tensor(a, b):
    """Tensor product of two dim-2 objects; first factor is most significant.

    Ket (x) Ket -> Ket, Unitary (x) Unitary -> Unitary.
    """
    if isinstance(a, Ket) and isinstance(b, Ket):
        if a.dim != 2 or b.dim != 2:
            raise ValueError("tensor factors must both have dimension 2")
        return Ket(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, Unitary) and isinstance(b, Unitary):
        if a.dim != 2 or b.dim != 2:
            raise ValueError("tensor factors must both have dimension 2")
        return Unitary(np.kron(a.entries, b.entries))
    raise TypeError("tensor expects two Kets or two Unitaries")


def mixture(weights, kets) -> DensityMatrix:
    """Weighted mixture of pure states: sum_i w_i |k_i><k_i|."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1.0) > ATOL_DIST:
        raise InvalidDistributionError(f"mixture weights must be a distribution, got {w!r}")
    rho = np.zeros((kets[0].dim, kets[0].dim), dtype=complex)
    for wi, ki in zip(w, kets):
        rho += wi * np.outer(ki.amplitudes, ki.amplitudes.conj())
    return DensityMatrix(rho)
