"""Loop-entangler simulation: photon injection, PBS fusion, noise channels.

The chain of n photons is grown by repeating inject -> fuse -> rotate. Fusion
post-selects the even-polarization-parity subspace of the (loop, fresh) photon
pair; the loop photon is rotated back to the diagonal basis between fusions.
The birefringent scan phase acts as diag(e^{-i phi/2}, e^{+i phi/2}) on each
photon that has completed a loop transit, i.e. on photons 1..n-1; it is applied
as a final dressing since it commutes with the parity projection.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import qcore
from .qcore import CapacityError, QuantumState, apply_gate, apply_two_qubit_diag, tensor


class ProtocolOrderError(Exception):
    """An operation was requested in an order the loop architecture cannot realize."""


@dataclass(frozen=True)
class NoiseModel:
    """Fusion-noise description.

    kind is one of 'ideal', 'distinguishing' (mean wave-packet overlap M < 1)
    or 'depolarizing' (two-qubit white noise of strength delta after each
    fusion). g2 is the two-photon emission probability of the source; it only
    enters the closed-form visibility correction and the Monte Carlo module.
    """

    kind: str = "ideal"
    M: float = 1.0
    delta: float = 0.0
    g2: float = 0.0

    def __post_init__(self):
        if self.kind not in ("ideal", "distinguishing", "depolarizing"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.M <= 1.0:
            raise ValueError("M must be in [0, 1]")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError("delta must be in [0, 1]")
        if not 0.0 <= self.g2 < 1.0:
            raise ValueError("g2 must be in [0, 1)")
        if self.kind == "ideal" and (self.M != 1.0 or self.delta != 0.0):
            raise ValueError("ideal noise requires M=1 and delta=0")
        if self.kind == "distinguishing" and self.delta != 0.0:
            raise ValueError("distinguishing noise does not use delta")
        if self.kind == "depolarizing" and self.M != 1.0:
            raise ValueError("depolarizing noise does not use M")

    @classmethod
    def ideal(cls) -> "NoiseModel":
        return cls()

    @classmethod
    def distinguishing(cls, M: float, g2: float = 0.0) -> "NoiseModel":
        return cls(kind="distinguishing", M=M, g2=g2)

    @classmethod
    def depolarizing(cls, delta: float) -> "NoiseModel":
        return cls(kind="depolarizing", delta=delta)

    @property
    def is_unitary_path(self) -> bool:
        return self.kind == "ideal" or (self.kind == "distinguishing" and self.M == 1.0)


@dataclass(frozen=True)
class ProtocolState:
    """State of the loop entangler plus post-selection bookkeeping."""

    state: QuantumState | None
    photons_emitted: int
    loop_occupied: bool
    cumulative_success_probability: float

    @classmethod
    def initial(cls) -> "ProtocolState":
        return cls(None, 0, False, 1.0)


def inject_photon(ps: ProtocolState) -> ProtocolState:
    """Append a fresh |p> photon; the first photon enters the loop (prob 1/2)."""
    fresh = QuantumState.plus_state(1)
    if ps.state is None:
        return ProtocolState(fresh, 1, True, ps.cumulative_success_probability * 0.5)
    return replace(
        ps,
        state=tensor(ps.state, fresh),
        photons_emitted=ps.photons_emitted + 1,
    )


# diagonal entries over (hh, hv, vh, vv) of the halved parity operators
_E0_DIAG = np.array([1.0, 0.0, 0.0, 1.0])  # (II + ZZ)/2
_E1_DIAG = np.array([1.0, 0.0, 0.0, -1.0])  # (IZ + ZI)/2


def fuse(ps: ProtocolState, noise: NoiseModel) -> ProtocolState:
    """PBS fusion of the loop photon with the freshly injected photon.

    The loop and fresh photons are the last two qubits. Ideal post-selection
    applies the even-parity projector (II+ZZ)/2; distinguishing noise mixes in
    the (IZ+ZI)/2 branch with weight (1-M)/2; depolarizing noise follows the
    ideal projection with two-qubit white noise on the fused pair. The branch
    probability is folded into cumulative_success_probability.
    """
    if ps.state is None or not ps.loop_occupied:
        raise ProtocolOrderError("fuse requires an occupied loop")
    if ps.state.num_qubits < 2:
        raise ProtocolOrderError("fuse requires a fresh photon alongside the loop photon")
    s = ps.state
    n = s.num_qubits
    q0, q1 = n - 2, n - 1

    if noise.is_unitary_path:
        out = apply_two_qubit_diag(s, _E0_DIAG, q0, q1)
        prob = out.norm_or_trace()
        out = out.normalized()
    elif noise.kind == "distinguishing":
        rho = s.to_density()
        even = apply_two_qubit_diag(rho, _E0_DIAG, q0, q1)
        odd = apply_two_qubit_diag(rho, _E1_DIAG, q0, q1)
        mixed = QuantumState(
            0.5 * (1.0 + noise.M) * even.data + 0.5 * (1.0 - noise.M) * odd.data,
            rho.labels,
        )
        prob = mixed.norm_or_trace()
        out = mixed.normalized()
    else:  # depolarizing
        out = apply_two_qubit_diag(s, _E0_DIAG, q0, q1)
        prob = out.norm_or_trace()
        out = out.normalized()
        out = _pair_depolarize(out.to_density(), noise.delta)

    return replace(ps, state=out, cumulative_success_probability=ps.cumulative_success_probability * prob)


def _pair_depolarize(rho: QuantumState, delta: float) -> QuantumState:
    """Two-qubit white noise on the last two qubits (the just-fused pair)."""
    if delta == 0.0:
        return rho
    rest = qcore.partial_trace(rho, range(rho.num_qubits - 2)) if rho.num_qubits > 2 else None
    if rest is None:
        white = np.eye(4, dtype=complex) / 4.0
    else:
        white = np.kron(rest.data, np.eye(4, dtype=complex) / 4.0)
    return QuantumState((1.0 - delta) * rho.data + delta * white, rho.labels)


def rotate_loop_photon(ps: ProtocolState, phi: float) -> ProtocolState:
    """Apply the in-loop phase and basis rotation (Z_phi then Hadamard)."""
    if ps.state is None or not ps.loop_occupied:
        raise ProtocolOrderError("rotate requires an occupied loop")
    q = ps.state.num_qubits - 1
    s = apply_gate(ps.state, qcore.phase_z(phi), q)
    s = apply_gate(s, qcore.HADAMARD, q)
    return replace(ps, state=s)


def _dress_phase(state: QuantumState, phi: float, qubits) -> QuantumState:
    if phi == 0.0:
        return state
    zphi = qcore.phase_z(phi)
    for q in qubits:
        state = apply_gate(state, zphi, q)
    return state


def build_chain(n: int, phi: float, noise: NoiseModel) -> ProtocolState:
    """Grow an n-photon linear cluster chain at scan phase phi.

    The returned state follows the analysis convention: the last photon is
    left unrotated, and the scan phase dresses photons 1..n-1.
    """
    if n < 2:
        raise ValueError("chain needs at least 2 photons")
    limit = qcore.MAX_PURE_QUBITS if noise.is_unitary_path else qcore.MAX_MIXED_QUBITS
    if n > limit:
        raise CapacityError(f"{n} photons exceeds the {limit}-qubit representation limit")
    ps = ProtocolState.initial()
    ps = inject_photon(ps)
    for k in range(2, n + 1):
        ps = inject_photon(ps)
        ps = fuse(ps, noise)
        if k < n:
            ps = rotate_loop_photon(ps, 0.0)
    state = _dress_phase(ps.state, phi, range(n - 1))
    return replace(ps, state=state)


# closed-form X-basis-free amplitude tables of the dressed chain states,
# written out directly from the printed h/v expansions (independent of the
# simulator path). Index bit 0 = most significant = photon 1; h=0, v=1.
def reference_state(n: int, phi: float) -> QuantumState:
    if n not in (2, 3, 4):
        raise ValueError("closed-form reference states exist for n in {2, 3, 4}")
    e = np.exp(1j * phi)
    if n == 2:
        amps = np.zeros(4, dtype=complex)
        amps[0b00] = 1.0
        amps[0b11] = e
        amps /= np.sqrt(2.0)
    elif n == 3:
        amps = np.zeros(8, dtype=complex)
        amps[0b000] = 1.0
        amps[0b100] = e
        amps[0b011] = e
        amps[0b111] = -e * e
        amps /= 2.0
    else:
        amps = np.zeros(16, dtype=complex)
        amps[0b0000] = 1.0
        amps[0b1000] = e
        amps[0b0011] = e
        amps[0b1011] = e * e
        amps[0b0100] = e
        amps[0b1100] = -e * e
        amps[0b0111] = -e * e
        amps[0b1111] = e * e * e
        amps /= 2.0 * np.sqrt(2.0)
    return QuantumState(amps)


def two_photon_visibility_with_g2(M: float, g2: float) -> float:
    """Closed-form two-photon visibility (1 - g2/2) * M."""
    if not 0.0 <= M <= 1.0:
        raise ValueError("M must be in [0, 1]")
    if not 0.0 <= g2 < 1.0:
        raise ValueError("g2 must be in [0, 1)")
    return (1.0 - 0.5 * g2) * M
