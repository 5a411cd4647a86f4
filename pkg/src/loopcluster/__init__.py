"""Simulation and analysis toolkit for loop-based linear photonic cluster states."""

from .analysis import (
    MeasurementPlan,
    PhaseScan,
    amplitudes,
    hom_dip,
    m_lower_bound,
    phase_scan,
    predicted_visibility,
    stabilizer_generators,
    svn_prime,
    visibility,
)
from .entlen import (
    ChainSweep,
    EntanglementLengthResult,
    concurrence,
    depolarizing_length_analytic,
    entanglement_length,
    min_v2_threshold,
    vn_from_v2,
)
from .montecarlo import (
    BackgroundModel,
    CoincidenceTally,
    CorrectedTally,
    DetectorModel,
    PulseSequence,
    background_runs,
    run_sequence,
    subtract_background,
    visibility_with_errors,
)
from .protocol import (
    NoiseModel,
    ProtocolOrderError,
    ProtocolState,
    build_chain,
    fuse,
    inject_photon,
    reference_state,
    rotate_loop_photon,
    two_photon_visibility_with_g2,
)
from .qcore import (
    BranchImpossibleError,
    CapacityError,
    PauliString,
    QuantumState,
)
from .scaling import (
    EfficiencyBudget,
    PRESETS,
    PdcSource,
    detection_rate,
    source_comparison_curves,
    pdc_scaling_ratio,
    pdc_visibility,
    scaling_ratio,
)

__version__ = "0.1.0"

__all__ = [
    "BackgroundModel",
    "BranchImpossibleError",
    "CapacityError",
    "ChainSweep",
    "CoincidenceTally",
    "CorrectedTally",
    "DetectorModel",
    "EfficiencyBudget",
    "EntanglementLengthResult",
    "MeasurementPlan",
    "NoiseModel",
    "PRESETS",
    "PauliString",
    "PdcSource",
    "PhaseScan",
    "ProtocolOrderError",
    "ProtocolState",
    "PulseSequence",
    "QuantumState",
    "amplitudes",
    "background_runs",
    "build_chain",
    "concurrence",
    "depolarizing_length_analytic",
    "detection_rate",
    "entanglement_length",
    "source_comparison_curves",
    "fuse",
    "hom_dip",
    "inject_photon",
    "m_lower_bound",
    "min_v2_threshold",
    "pdc_scaling_ratio",
    "pdc_visibility",
    "phase_scan",
    "predicted_visibility",
    "reference_state",
    "rotate_loop_photon",
    "run_sequence",
    "scaling_ratio",
    "stabilizer_generators",
    "subtract_background",
    "svn_prime",
    "two_photon_visibility_with_g2",
    "visibility",
    "visibility_with_errors",
    "vn_from_v2",
]
