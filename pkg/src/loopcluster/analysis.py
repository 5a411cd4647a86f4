"""Observables and phase scans: visibilities, amplitude tables, stabilizers.

Visibilities follow the convention that the produced chain is analyzed before
the final in-loop rotation of the last photon; `amplitudes` returns the
diagonal-basis (X-outcome) amplitude tables of the dressed chain states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import qcore
from .protocol import NoiseModel, build_chain
from .qcore import PauliString, QuantumState


@dataclass(frozen=True)
class MeasurementPlan:
    """Per-photon basis plan: first n-1 photons in the X-type basis, last in h/v."""

    num_photons: int
    observable: PauliString
    rotate_last_photon: bool = False

    def __post_init__(self):
        if len(self.observable) != self.num_photons:
            raise ValueError("observable length must equal the photon count")


@dataclass(frozen=True)
class PhaseScan:
    """Configuration for a phase scan of one observable at one noise setting."""

    phis: tuple
    n: int
    noise: NoiseModel = field(default_factory=NoiseModel.ideal)
    observable: str = "xn"  # 'xn' (X tensor n) or 'svnp' (stabilizer product)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("phase scans need n >= 2")
        phis = np.asarray(self.phis, dtype=float)
        if phis.ndim != 1 or phis.size == 0 or np.any(np.diff(phis) <= 0):
            raise ValueError("phi grid must be strictly increasing and nonempty")
        if self.observable not in ("xn", "svnp"):
            raise ValueError(f"unknown observable tag {self.observable!r}")
        if self.observable == "svnp" and self.n % 2:
            raise ValueError("svnp observable requires an even photon count")


def amplitudes(n: int, phi: float) -> np.ndarray:
    """Diagonal-basis amplitude table of the n-photon chain state, normalized.

    Index bits are X-basis outcomes (0 for the +/'h'-labeled port), photon 1
    first. Closed forms, independent of the simulator path.
    """
    if n not in (2, 3, 4):
        raise ValueError("closed-form amplitude tables exist for n in {2, 3, 4}")
    e = np.exp(1j * phi)
    a = np.zeros(2**n, dtype=complex)
    if n == 2:
        plus = (1 + e) * 2.0**-1.5
        minus = (1 - e) * 2.0**-1.5
        a[0b00] = a[0b11] = plus
        a[0b01] = a[0b10] = minus
    elif n == 3:
        c = 2.0**-2.5
        hi = (1 + 2 * e - e * e) * c
        mid = (1 + e * e) * c
        lo = (1 - 2 * e - e * e) * c
        a[0b000] = a[0b011] = hi
        a[0b001] = a[0b010] = a[0b100] = a[0b111] = mid
        a[0b101] = a[0b110] = lo
    else:
        c = 2.0**-3.5
        e2, e3 = e * e, e * e * e
        g1 = (1 + 3 * e - e2 + e3) * c
        g2 = (1 - e) * (1 + e) ** 2 * c
        g3 = (1 + e) * (1 - e) ** 2 * c
        g4 = (1 + e + 3 * e2 - e3) * c
        for idx in (0b0000, 0b0011, 0b1001, 0b1010):
            a[idx] = g1
        for idx in (0b0001, 0b0010, 0b1000, 0b1011):
            a[idx] = g2
        for idx in (0b0101, 0b0110, 0b1100, 0b1111):
            a[idx] = g3
        for idx in (0b0100, 0b0111, 0b1101, 0b1110):
            a[idx] = g4
    return a


def simulated_amplitudes(n: int, phi: float) -> np.ndarray:
    """Diagonal-basis amplitudes extracted from the ideal simulator chain."""
    state = build_chain(n, phi, NoiseModel.ideal()).state
    for q in range(n):
        state = qcore.apply_gate(state, qcore.HADAMARD, q)
    return state.data


def visibility(state: QuantumState, observable: PauliString) -> float:
    """Expectation value of a signed Pauli observable."""
    return qcore.expectation(state, observable)


def stabilizer_generators(n: int) -> list[PauliString]:
    """Generators stabilizing the produced n-photon chain (last photon unrotated)."""
    if n < 2:
        raise ValueError("stabilizer generators need n >= 2")
    if n == 2:
        return [PauliString("XX"), PauliString("ZZ")]
    gens = [PauliString("XZ" + "I" * (n - 2))]
    for k in range(2, n - 1):
        gens.append(PauliString("I" * (k - 2) + "ZXZ" + "I" * (n - k - 1)))
    gens.append(PauliString("I" * (n - 3) + "ZXX"))
    gens.append(PauliString("I" * (n - 2) + "ZZ"))
    return gens


def svn_prime(n: int) -> PauliString:
    """Closed-form stabilizer (X I)^{n/2-1} X X used as the even-n visibility observable."""
    if n < 4 or n % 2:
        raise ValueError("svn_prime requires an even n >= 4")
    return PauliString("XI" * (n // 2 - 1) + "XX")


def predicted_visibility(n: int, phi, M: float = 1.0, observable: str = "xn"):
    """Closed-form noise-scaled visibility curves.

    xn:   V_2 = M cos(phi); V_n = M^{n-1} (-1)^{n-1} cos^{n-3}(phi) sin^2(phi)
    svnp: V_n' = M^{n/2} cos^{n/2}(phi)
    """
    phi = np.asarray(phi, dtype=float)
    if observable == "xn":
        if n == 2:
            out = M * np.cos(phi)
        else:
            out = M ** (n - 1) * (-1.0) ** (n - 1) * np.cos(phi) ** (n - 3) * np.sin(phi) ** 2
    elif observable == "svnp":
        if n % 2:
            raise ValueError("svnp prediction requires even n")
        out = M ** (n // 2) * np.cos(phi) ** (n // 2)
    else:
        raise ValueError(f"unknown observable tag {observable!r}")
    return out if out.ndim else float(out)


def _scan_observable(cfg: PhaseScan) -> PauliString:
    if cfg.observable == "xn":
        return PauliString("X" * cfg.n)
    return svn_prime(cfg.n)


def phase_scan(cfg: PhaseScan) -> list[dict]:
    """Simulate the visibility over the phi grid, paired with the closed form."""
    obs = _scan_observable(cfg)
    M = cfg.noise.M if cfg.noise.kind == "distinguishing" else 1.0
    rows = []
    for phi in cfg.phis:
        state = build_chain(cfg.n, float(phi), cfg.noise).state
        sim = visibility(state, obs)
        pred = predicted_visibility(cfg.n, float(phi), M, cfg.observable)
        rows.append({"phi": float(phi), "visibility": sim, "predicted": float(pred)})
    return rows


def hom_dip(M: float, delay: str = "zero") -> float:
    """Balanced-splitter coincidence probability: (1-M)/2 at zero delay, 1/2 far away."""
    if not 0.0 <= M <= 1.0:
        raise ValueError("M must be in [0, 1]")
    if delay == "zero":
        return 0.5 * (1.0 - M)
    if delay == "far":
        return 0.5
    raise ValueError("delay must be 'zero' or 'far'")


def m_lower_bound(v_hom: float, g2: float) -> float:
    """Lower bound on the wave-packet overlap, V_HOM + g2, clipped to [0, 1]."""
    if not 0.0 <= v_hom <= 1.0 or not 0.0 <= g2 <= 1.0:
        raise ValueError("inputs must be in [0, 1]")
    return float(min(1.0, max(0.0, v_hom + g2)))
