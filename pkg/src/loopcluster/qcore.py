"""Dense few-qubit complex linear algebra: states, gates, projections, Pauli strings.

Conventions:
    * qubit 0 is the first-emitted photon and maps to the most significant
      bit of the computational basis index,
    * |h> = [1, 0], |v> = [0, 1]; |p> = (|h>+|v>)/sqrt(2), |m> = (|h>-|v>)/sqrt(2),
    * pure states are kept as amplitude vectors until a non-unitary channel
      forces a density matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ATOL_ALGEBRA = 1e-12
ATOL_ACCUM = 1e-10

MAX_PURE_QUBITS = 24
MAX_MIXED_QUBITS = 12

SQRT2 = np.sqrt(2.0)

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / SQRT2

PAULI_MATRICES = {"I": I2, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


class CapacityError(Exception):
    """Requested state exceeds the dense representation limits."""


class BranchImpossibleError(Exception):
    """A projection was requested onto an outcome of (numerically) zero probability."""


def phase_z(phi: float) -> np.ndarray:
    """Birefringent phase gate diag(e^{-i phi/2}, e^{+i phi/2})."""
    return np.array([[np.exp(-0.5j * phi), 0], [0, np.exp(0.5j * phi)]], dtype=complex)


# single-qubit measurement bases; columns are the outcome-(+) and outcome-(-) kets
_BASIS_VECTORS = {
    "z": (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
    "x": (np.array([1, 1], dtype=complex) / SQRT2, np.array([1, -1], dtype=complex) / SQRT2),
    "y": (np.array([1, 1j], dtype=complex) / SQRT2, np.array([1, -1j], dtype=complex) / SQRT2),
}
_BASIS_ALIASES = {"hv": "z", "pm": "x", "y+-": "y", "z": "z", "x": "x", "y": "y"}


class QuantumState:
    """A pure state vector or density matrix over n polarization qubits."""

    def __init__(self, data: np.ndarray, labels=None):
        data = np.asarray(data, dtype=complex)
        if data.ndim == 1:
            n = int(round(np.log2(data.size)))
            if 2**n != data.size:
                raise ValueError(f"vector length {data.size} is not a power of two")
            if n > MAX_PURE_QUBITS:
                raise CapacityError(f"{n} qubits exceeds pure-state capacity {MAX_PURE_QUBITS}")
        elif data.ndim == 2:
            if data.shape[0] != data.shape[1]:
                raise ValueError("density matrix must be square")
            n = int(round(np.log2(data.shape[0])))
            if 2**n != data.shape[0]:
                raise ValueError(f"matrix dimension {data.shape[0]} is not a power of two")
            if n > MAX_MIXED_QUBITS:
                raise CapacityError(f"{n} qubits exceeds density-matrix capacity {MAX_MIXED_QUBITS}")
        else:
            raise ValueError("state data must be a vector or a square matrix")
        self.data = data
        self.num_qubits = n
        self.labels = tuple(labels) if labels is not None else tuple(range(n))
        if len(self.labels) != n:
            raise ValueError("label count does not match qubit count")

    # -- constructors -------------------------------------------------

    @classmethod
    def from_amplitudes(cls, amps, labels=None) -> "QuantumState":
        return cls(np.asarray(amps, dtype=complex), labels)

    @classmethod
    def basis_state(cls, bits: str) -> "QuantumState":
        """Computational basis ket from an h/v string, e.g. 'hv' -> |hv>."""
        n = len(bits)
        idx = 0
        for b in bits:
            idx = (idx << 1) | (0 if b in "h0" else 1)
        v = np.zeros(2**n, dtype=complex)
        v[idx] = 1.0
        return cls(v)

    @classmethod
    def plus_state(cls, n: int = 1) -> "QuantumState":
        """|p>^{tensor n}."""
        return cls(np.full(2**n, 2.0 ** (-n / 2), dtype=complex))

    # -- representation handling --------------------------------------

    @property
    def is_matrix(self) -> bool:
        return self.data.ndim == 2

    def to_density(self) -> "QuantumState":
        if self.is_matrix:
            return self
        if self.num_qubits > MAX_MIXED_QUBITS:
            raise CapacityError(
                f"cannot promote {self.num_qubits}-qubit vector to a density matrix"
            )
        return QuantumState(np.outer(self.data, self.data.conj()), self.labels)

    def norm_or_trace(self) -> float:
        if self.is_matrix:
            return float(np.real(np.trace(self.data)))
        return float(np.vdot(self.data, self.data).real)

    def normalized(self) -> "QuantumState":
        w = self.norm_or_trace()
        if w <= ATOL_ALGEBRA:
            raise BranchImpossibleError("state has (numerically) vanished")
        if self.is_matrix:
            return QuantumState(self.data / w, self.labels)
        return QuantumState(self.data / np.sqrt(w), self.labels)

    def copy(self) -> "QuantumState":
        return QuantumState(self.data.copy(), self.labels)


@dataclass(frozen=True)
class PauliString:
    """Signed tensor product of I/X/Y/Z letters, with exact phase tracking."""

    letters: str
    phase: complex = 1 + 0j

    def __post_init__(self):
        if any(c not in "IXYZ" for c in self.letters):
            raise ValueError(f"invalid Pauli letters {self.letters!r}")
        if self.phase not in (1, -1, 1j, -1j):
            raise ValueError(f"phase must be a fourth root of unity, got {self.phase}")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        prefix = {1 + 0j: "+", -1 + 0j: "-", 1j: "+i", -1j: "-i"}[complex(self.phase)]
        return prefix + self.letters

    def __mul__(self, other: "PauliString") -> "PauliString":
        if len(self) != len(other):
            raise ValueError("Pauli string lengths differ")
        phase = self.phase * other.phase
        letters = []
        for a, b in zip(self.letters, other.letters):
            f, c = _PAULI_PRODUCT[(a, b)]
            phase *= f
            letters.append(c)
        return PauliString("".join(letters), phase)

    @property
    def sign(self) -> int:
        if self.phase == 1:
            return 1
        if self.phase == -1:
            return -1
        raise ValueError(f"Pauli string has imaginary phase {self.phase}")

    def matrix(self) -> np.ndarray:
        m = np.array([[self.phase]], dtype=complex)
        for c in self.letters:
            m = np.kron(m, PAULI_MATRICES[c])
        return m


def _pauli_product_table():
    table = {}
    single = {"I": I2, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}
    for a, ma in single.items():
        for b, mb in single.items():
            prod = ma @ mb
            for c, mc in single.items():
                for f in (1, -1, 1j, -1j):
                    if np.allclose(prod, f * mc):
                        table[(a, b)] = (f, c)
    return table


_PAULI_PRODUCT = _pauli_product_table()


# -- operations --------------------------------------------------------


def tensor(a: QuantumState, b: QuantumState) -> QuantumState:
    """Tensor product; labels of b are shifted past those of a."""
    n = a.num_qubits + b.num_qubits
    labels = a.labels + tuple(x + a.num_qubits for x in b.labels)
    if a.is_matrix or b.is_matrix:
        if n > MAX_MIXED_QUBITS:
            raise CapacityError(f"{n} qubits exceeds density-matrix capacity")
        return QuantumState(np.kron(a.to_density().data, b.to_density().data), labels)
    if n > MAX_PURE_QUBITS:
        raise CapacityError(f"{n} qubits exceeds pure-state capacity")
    return QuantumState(np.kron(a.data, b.data), labels)


def _check_qubit(s: QuantumState, qubit: int):
    if not 0 <= qubit < s.num_qubits:
        raise IndexError(f"qubit {qubit} out of range for {s.num_qubits}-qubit state")


def apply_gate(s: QuantumState, gate: np.ndarray, qubit: int) -> QuantumState:
    """Apply a single-qubit unitary to the addressed tensor factor."""
    _check_qubit(s, qubit)
    gate = np.asarray(gate, dtype=complex)
    n = s.num_qubits
    if s.is_matrix:
        rho = _apply_one_side(s.data, gate, qubit, n, left=True)
        rho = _apply_one_side(rho, gate.conj(), qubit, n, left=False)
        return QuantumState(rho, s.labels)
    v = s.data.reshape(2**qubit, 2, 2 ** (n - qubit - 1))
    v = np.einsum("ab,ibj->iaj", gate, v)
    return QuantumState(v.reshape(-1), s.labels)


def _apply_one_side(rho, gate, qubit, n, left):
    dim = 2**n
    if left:
        r = rho.reshape(2**qubit, 2, 2 ** (n - qubit - 1) * dim)
        r = np.einsum("ab,ibj->iaj", gate, r)
    else:
        r = rho.reshape(dim * 2**qubit, 2, 2 ** (n - qubit - 1))
        r = np.einsum("ibj,ab->iaj", r, gate)
    return r.reshape(dim, dim)


def apply_two_qubit_diag(s: QuantumState, diag: np.ndarray, q0: int, q1: int) -> QuantumState:
    """Apply an operator diagonal in the computational basis of qubits (q0, q1).

    `diag` has four entries ordered (hh, hv, vh, vv). Used for the fusion
    projectors; the result is generally unnormalized.
    """
    _check_qubit(s, q0)
    _check_qubit(s, q1)
    n = s.num_qubits
    idx = np.arange(2**n)
    b0 = (idx >> (n - 1 - q0)) & 1
    b1 = (idx >> (n - 1 - q1)) & 1
    full = np.asarray(diag, dtype=complex)[2 * b0 + b1]
    if s.is_matrix:
        return QuantumState(full[:, None] * s.data * full.conj()[None, :], s.labels)
    return QuantumState(full * s.data, s.labels)


def project(s: QuantumState, qubit: int, basis: str, outcome: int):
    """Project a qubit onto a basis outcome and remove it from the state.

    basis is one of 'hv'/'z', 'pm'/'x', 'y'; outcome is +1 or -1 (h/p/y+
    map to +1). Returns (post-measurement state, probability).
    """
    _check_qubit(s, qubit)
    key = _BASIS_ALIASES.get(basis)
    if key is None:
        raise ValueError(f"unknown basis {basis!r}")
    if outcome not in (1, -1):
        raise ValueError("outcome must be +1 or -1")
    ket = _BASIS_VECTORS[key][0 if outcome == 1 else 1]
    n = s.num_qubits
    labels = s.labels[:qubit] + s.labels[qubit + 1 :]
    if s.is_matrix:
        r = s.data.reshape(2**qubit, 2, 2 ** (n - qubit - 1), 2**qubit, 2, 2 ** (n - qubit - 1))
        red = np.einsum("a,iajkbl,b->ijkl", ket.conj(), r, ket)
        red = red.reshape(2 ** (n - 1), 2 ** (n - 1))
        prob = float(np.real(np.trace(red)))
        if prob <= ATOL_ALGEBRA:
            raise BranchImpossibleError(f"outcome probability {prob:.3e} vanishes")
        return QuantumState(red / prob, labels), prob
    v = s.data.reshape(2**qubit, 2, 2 ** (n - qubit - 1))
    red = np.einsum("a,iaj->ij", ket.conj(), v).reshape(-1)
    prob = float(np.vdot(red, red).real)
    if prob <= ATOL_ALGEBRA:
        raise BranchImpossibleError(f"outcome probability {prob:.3e} vanishes")
    return QuantumState(red / np.sqrt(prob), labels), prob


def outcome_probabilities(s: QuantumState, qubit: int, basis: str):
    """Probabilities of the (+1, -1) outcomes without collapsing."""
    _check_qubit(s, qubit)
    key = _BASIS_ALIASES.get(basis)
    if key is None:
        raise ValueError(f"unknown basis {basis!r}")
    probs = []
    for ket in _BASIS_VECTORS[key]:
        n = s.num_qubits
        if s.is_matrix:
            r = s.data.reshape(
                2**qubit, 2, 2 ** (n - qubit - 1), 2**qubit, 2, 2 ** (n - qubit - 1)
            )
            red = np.einsum("a,iajibl,b->", ket.conj(), r, ket)
            probs.append(float(np.real(red)))
        else:
            v = s.data.reshape(2**qubit, 2, 2 ** (n - qubit - 1))
            red = np.einsum("a,iaj->ij", ket.conj(), v)
            probs.append(float(np.sum(np.abs(red) ** 2)))
    return tuple(probs)


def _apply_pauli_axis0(arr: np.ndarray, p: PauliString) -> np.ndarray:
    """Left action of a Pauli string on axis 0 of a vector or matrix."""
    n = len(p)
    shape = arr.shape
    rest = arr.size // 2**n
    out = arr.reshape(2**n, rest)
    for q, c in enumerate(p.letters):
        if c == "I":
            continue
        out = out.reshape(2**q, 2, -1)
        if c == "X":
            out = out[:, ::-1, :]
        elif c == "Y":
            out = out[:, ::-1, :] * np.array([-1j, 1j])[None, :, None]
        else:  # Z
            out = out * np.array([1, -1])[None, :, None]
        out = out.reshape(2**n, rest)
    return (out * p.phase).reshape(shape)


def expectation(s: QuantumState, p: PauliString) -> float:
    """<P> for a signed Pauli string; real within ATOL_ACCUM by construction."""
    if len(p) != s.num_qubits:
        raise ValueError(f"Pauli length {len(p)} != qubit count {s.num_qubits}")
    if s.is_matrix:
        return float(np.real(np.trace(_apply_pauli_axis0(s.data, p))))
    val = np.vdot(s.data, _apply_pauli_axis0(s.data, p))
    return float(np.real(val))


def partial_trace(s: QuantumState, keep) -> QuantumState:
    """Reduced density matrix on the kept qubit positions (ascending order)."""
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep set must be nonempty")
    n = s.num_qubits
    if any(not 0 <= q < n for q in keep):
        raise IndexError("keep indices out of range")
    rho = s.to_density().data
    traced = [q for q in range(n) if q not in keep]
    t = rho.reshape([2] * (2 * n))
    for q in sorted(traced, reverse=True):
        t = np.trace(t, axis1=q, axis2=q + (t.ndim // 2))
    k = len(keep)
    labels = tuple(s.labels[q] for q in keep)
    return QuantumState(t.reshape(2**k, 2**k), labels)


def fidelity(a: QuantumState, b: QuantumState) -> float:
    """State fidelity, insensitive to global phase."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("qubit counts differ")
    if not a.is_matrix and not b.is_matrix:
        return float(abs(np.vdot(a.data, b.data)) ** 2)
    if a.is_matrix and not b.is_matrix:
        return float(np.real(np.vdot(b.data, a.data @ b.data)))
    if b.is_matrix and not a.is_matrix:
        return float(np.real(np.vdot(a.data, b.data @ a.data)))
    # general mixed-mixed case via eigen square roots
    wa, va = np.linalg.eigh(a.data)
    sq = (va * np.sqrt(np.clip(wa, 0, None))) @ va.conj().T
    w = np.linalg.eigvalsh(sq @ b.data @ sq)
    return float(np.sum(np.sqrt(np.clip(w, 0, None))) ** 2)
