"""Coincidence Monte Carlo of the pulsed loop experiment.

Models the timing-level experiment around the chain simulator: pulse-train
slots with loss and EOM leakage, cw background photons that hijack slots,
source g2 decorrelation, post-selected fusion, two click detectors with dead
time, and background runs obtained by blanking one excitation slot at a time.
Outcome statistics for clean shots come from the diagonal-basis populations
of the simulated chain state.
"""

from __future__ import annotations

import io
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import qcore
from ._mc_kernels import backend_name, run_kernel, seed_base
from .protocol import NoiseModel, build_chain
from .qcore import PauliString
from .scaling import EfficiencyBudget

_CHUNK_SHOTS = 1 << 18
_BG_SEED_STRIDE = 1000003


@dataclass(frozen=True)
class PulseSequence:
    """Excitation pattern over time bins; each bin holds one protocol slot.

    pattern is a string of '1'/'0' bins and must end with two empty bins so
    the final loop transit and the delayed exit port stay inside the record.
    The number of protocol photons n is the length of the pattern minus the
    two trailing guard bins.
    """

    pattern: str
    bin_ns: float = 74.0
    pulses_per_bin: int = 6
    laser_period_ns: float = 12.3

    def __post_init__(self):
        if len(self.pattern) < 4 or set(self.pattern) - {"0", "1"}:
            raise ValueError("pattern must be a '0'/'1' string with at least 4 bins")
        if not self.pattern.endswith("00"):
            raise ValueError("pattern must end with two empty guard bins")
        if self.bin_ns <= 0 or self.laser_period_ns <= 0 or self.pulses_per_bin < 1:
            raise ValueError("bin and laser timing must be positive")
        if abs(self.pulses_per_bin * self.laser_period_ns - self.bin_ns) > 0.02 * self.bin_ns:
            raise ValueError("pulses_per_bin * laser_period_ns must match the bin length")

    @classmethod
    def for_photons(cls, n: int, **kwargs) -> "PulseSequence":
        if n < 2:
            raise ValueError("need at least 2 photons")
        return cls("1" * n + "00", **kwargs)

    @property
    def num_photons(self) -> int:
        return len(self.pattern) - 2

    @property
    def slots(self) -> str:
        return self.pattern[:-2]

    def blanked(self, k: int) -> "PulseSequence":
        """Copy with excitation slot k (1-based) switched off, for background runs."""
        if not 1 <= k <= self.num_photons:
            raise ValueError("slot index out of range")
        s = self.slots
        if s[k - 1] != "1":
            raise ValueError(f"slot {k} is already off")
        return PulseSequence(
            s[: k - 1] + "0" + s[k:] + "00",
            bin_ns=self.bin_ns,
            pulses_per_bin=self.pulses_per_bin,
            laser_period_ns=self.laser_period_ns,
        )


@dataclass(frozen=True)
class DetectorModel:
    """Two click detectors behind the exit PBS with non-paralyzable dead time."""

    efficiency: float = 1.0
    dead_time_ns: float = 60.0
    num_detectors: int = 2

    def __post_init__(self):
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError("efficiency must be in (0, 1]")
        if self.dead_time_ns < 0:
            raise ValueError("dead time must be nonnegative")
        if self.num_detectors != 2:
            raise ValueError("the exit PBS feeds exactly two detectors")


@dataclass(frozen=True)
class BackgroundModel:
    """Uncorrelated background reaching the detectors.

    cw_fraction is the fraction of detected events attributable to background
    over a full excitation train; eom_extinction is the residual excitation
    probability of a blanked slot relative to an open one. window_ns is the
    software coincidence window (recorded in the tally metadata).
    """

    cw_fraction: float = 0.10
    eom_extinction: float = 0.01
    window_ns: float = 5.0

    def __post_init__(self):
        if not 0.0 <= self.cw_fraction < 1.0:
            raise ValueError("cw_fraction must be in [0, 1)")
        if not 0.0 <= self.eom_extinction <= 1.0:
            raise ValueError("eom_extinction must be in [0, 1]")
        if self.window_ns <= 0:
            raise ValueError("window must be positive")

    @classmethod
    def none(cls) -> "BackgroundModel":
        return cls(cw_fraction=0.0, eom_extinction=0.0)


@dataclass(frozen=True)
class CoincidenceTally:
    """n-fold coincidence counts indexed by the detection pattern.

    Pattern bit 0 (most significant) is the first photon; 0 means the
    'h'-labeled exit port.
    """

    counts: np.ndarray
    shots: int
    seed: int
    pattern: str
    phi: float
    meta: dict = field(default_factory=dict)

    @property
    def num_photons(self) -> int:
        return int(round(math.log2(len(self.counts))))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def rate_per_shot(self) -> float:
        return self.total / self.shots if self.shots else 0.0

    def to_text(self) -> str:
        out = io.StringIO()
        out.write(f"# pattern={self.pattern}\n")
        out.write(f"# shots={self.shots}\n")
        out.write(f"# seed={self.seed}\n")
        out.write(f"# phi={self.phi!r}\n")
        for key in sorted(self.meta):
            out.write(f"# {key}={self.meta[key]}\n")
        out.write("outcome,count\n")
        n = self.num_photons
        for idx, c in enumerate(self.counts):
            out.write(f"{idx:0{n}b},{int(c)}\n")
        return out.getvalue()

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text())


def _populations(n: int, phi: float, noise: NoiseModel) -> np.ndarray:
    """Diagonal-basis outcome probabilities of the simulated chain."""
    state = build_chain(n, phi, noise).state
    for q in range(n):
        state = qcore.apply_gate(state, qcore.HADAMARD, q)
    if state.is_matrix:
        probs = np.real(np.diag(state.data))
    else:
        probs = np.abs(state.data) ** 2
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def _kernel_params(seq, noise, budget, detectors, background, phi):
    n = seq.num_photons
    q_open = budget.eta_b * budget.eta_s * budget.eta_l
    q_closed = q_open * background.eom_extinction
    p_bg = background.cw_fraction * q_open / n
    p_success = 0.5**n
    p_decor = 0.5 * noise.g2
    probs = _populations(n, phi, noise)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    open_mask = np.frombuffer(seq.slots.encode(), dtype=np.uint8) == ord("1")
    return dict(
        n=n,
        open_mask=open_mask.astype(np.uint8),
        q_open=q_open,
        q_closed=q_closed,
        p_bg=p_bg,
        eta_d=budget.eta_d * detectors.efficiency,
        p_success=p_success,
        p_decor=p_decor,
        cdf=cdf,
        bin_ns=seq.bin_ns,
        dead_ns=detectors.dead_time_ns,
    )


def run_sequence(
    seq: PulseSequence,
    noise: NoiseModel,
    budget: EfficiencyBudget,
    shots: int,
    seed: int,
    phi: float = 0.0,
    detectors: DetectorModel | None = None,
    background: BackgroundModel | None = None,
    threads: int = 1,
) -> CoincidenceTally:
    """Simulate a pulse train for the given number of shots.

    The tally is a deterministic function of the seed alone: chunking,
    thread count, and kernel backend do not change a single count.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    if threads < 1:
        raise ValueError("threads must be positive")
    detectors = detectors or DetectorModel()
    background = background or BackgroundModel.none()
    params = _kernel_params(seq, noise, budget, detectors, background, phi)
    base = seed_base(seed)

    spans = [(s0, min(_CHUNK_SHOTS, shots - s0)) for s0 in range(0, shots, _CHUNK_SHOTS)]

    def one(span):
        s0, m = span
        return run_kernel(s0, m, base=base, **params)

    if threads == 1 or len(spans) == 1:
        pieces = [one(sp) for sp in spans]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pieces = list(pool.map(one, spans))
    counts = np.sum(pieces, axis=0).astype(np.int64)
    meta = {
        "backend": backend_name(),
        "noise": noise.kind,
        "window_ns": background.window_ns,
        "cw_fraction": background.cw_fraction,
    }
    return CoincidenceTally(counts, shots, seed, seq.pattern, phi, meta)


def background_runs(
    seq: PulseSequence,
    noise: NoiseModel,
    budget: EfficiencyBudget,
    shots: int,
    seed: int,
    phi: float = 0.0,
    detectors: DetectorModel | None = None,
    background: BackgroundModel | None = None,
    threads: int = 1,
) -> list[CoincidenceTally]:
    """One run per excitation slot with that slot blanked.

    Any n-fold coincidence surviving a blanked slot involves background or
    EOM leakage, so the summed tallies estimate the accidental contribution.
    """
    background = background or BackgroundModel()
    runs = []
    for k in range(1, seq.num_photons + 1):
        runs.append(
            run_sequence(
                seq.blanked(k),
                noise,
                budget,
                shots,
                seed + _BG_SEED_STRIDE * k,
                phi=phi,
                detectors=detectors,
                background=background,
                threads=threads,
            )
        )
    return runs


@dataclass(frozen=True)
class CorrectedTally:
    """Background-subtracted counts; entries may be negative."""

    counts: np.ndarray
    raw: CoincidenceTally
    background_total: int
    has_negative: bool

    @property
    def total(self) -> float:
        return float(self.counts.sum())


def subtract_background(measurement: CoincidenceTally, backgrounds) -> CorrectedTally:
    """Subtract summed background-run counts pattern by pattern.

    Negative corrected counts are kept as is (they carry the fluctuation
    information) and flagged with a warning.
    """
    bg = np.zeros_like(measurement.counts)
    for run in backgrounds:
        if len(run.counts) != len(measurement.counts):
            raise ValueError("background tally size does not match the measurement")
        bg = bg + run.counts
    corrected = measurement.counts - bg
    neg = bool(np.any(corrected < 0))
    if neg:
        warnings.warn("background subtraction produced negative counts", stacklevel=2)
    return CorrectedTally(corrected, measurement, int(bg.sum()), neg)


def visibility_with_errors(counts, observable: PauliString) -> tuple[float, float]:
    """Visibility of a signed Pauli observable from pattern counts.

    V = sum_i s_i N_i / N_tot with s_i the outcome parity over the non-identity
    positions; the error is the Poisson propagation sqrt(sum s_i^2 N_i) / N_tot.
    """
    if isinstance(counts, (CoincidenceTally, CorrectedTally)):
        counts = counts.counts
    counts = np.asarray(counts, dtype=float)
    dim = len(counts)
    n = int(round(math.log2(dim)))
    if 2**n != dim:
        raise ValueError("counts length must be a power of two")
    if len(observable) != n:
        raise ValueError("observable length must match the pattern width")
    signs = np.ones(dim)
    for pos, letter in enumerate(observable.letters):
        if letter == "I":
            continue
        bit = (np.arange(dim) >> (n - 1 - pos)) & 1
        signs *= 1.0 - 2.0 * bit
    signs *= observable.sign
    total = counts.sum()
    if total <= 0:
        raise ValueError("no counts to analyze")
    v = float(np.dot(signs, counts) / total)
    sigma = float(np.sqrt(np.dot(signs**2, np.abs(counts))) / total)
    return v, sigma
