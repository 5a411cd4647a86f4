"""Detection-rate and scaling-ratio models for the loop source and PDC sources."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EfficiencyBudget:
    """System efficiencies entering the n-photon detection rate."""

    R: float = 1.0  # single-photon repetition rate, Hz
    eta_d: float = 1.0  # detector
    eta_s: float = 1.0  # system loss outside the loop
    eta_l: float = 1.0  # delay-loop (memory cycle) loss
    eta_b: float = 1.0  # in-fiber source brightness
    eta_g: float = 1.0  # entangling gate

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError("repetition rate must be positive")
        for name in ("eta_d", "eta_s", "eta_l", "eta_b", "eta_g"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must be in (0, 1]")


# measured efficiencies of the reported setup (81 MHz excitation laser,
# brightest source at eta_b = 0.15, probabilistic PBS gate)
PRESETS = {
    "paper": EfficiencyBudget(R=81e6, eta_d=0.25, eta_s=0.7, eta_l=0.75, eta_b=0.15, eta_g=0.5),
    "ideal": EfficiencyBudget(),
}


def detection_rate(budget: EfficiencyBudget, n: int) -> float:
    """n-photon event rate R (eta_d eta_s eta_l eta_b)^n eta_g^{n-1}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    per_photon = budget.eta_d * budget.eta_s * budget.eta_l * budget.eta_b
    return budget.R * per_photon**n * budget.eta_g ** (n - 1)


def scaling_ratio(budget: EfficiencyBudget) -> float:
    """Rate drop per added photon, (eta_d eta_s eta_b eta_g eta_l)^{-1}."""
    return 1.0 / (budget.eta_d * budget.eta_s * budget.eta_b * budget.eta_g * budget.eta_l)


@dataclass(frozen=True)
class PdcSource:
    """Two-mode squeezed vacuum source with interaction parameter tau."""

    tau: float

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError("tau must be >= 0")

    @property
    def lam(self) -> float:
        return float(np.tanh(self.tau))


def pdc_pair_probability(src: PdcSource) -> float:
    """Detection probability per pulse with bucket detectors, tanh^2(tau)."""
    return src.lam**2


def pdc_visibility(src: PdcSource) -> float:
    """Two-photon visibility (1 - tanh^2 tau) / (1 + tanh^2 tau)."""
    t2 = src.lam**2
    return (1.0 - t2) / (1.0 + t2)


def pdc_scaling_ratio(v2: float, include_gate: bool = False) -> float:
    """Heralded-PDC scaling ratio (1+V2)/(1-V2), doubled for the eta_g=0.5 gate."""
    if not 0.0 < v2 < 1.0:
        raise ValueError("v2 must be in (0, 1); the v2 -> 1 limit diverges")
    r = (1.0 + v2) / (1.0 - v2)
    return 2.0 * r if include_gate else r


GATE_FLOOR = 2.0  # probabilistic gate limit at unit efficiencies, eta_g = 0.5
_REFERENCE_ETA_D = 0.9  # available superconducting-nanowire detector efficiency


def source_comparison_curves(v2_grid, budgets=None, budget_v2=None) -> dict:
    """Scaling-ratio comparison curves plus budget point markers.

    Returns {'curve': [(v2, r_pdc_with_gate, gate_floor), ...],
             'points': [{name, v2, r, r_eta_d_09}, ...]}.
    """
    curve = []
    for v2 in v2_grid:
        curve.append((float(v2), pdc_scaling_ratio(float(v2), include_gate=True), GATE_FLOOR))
    points = []
    budgets = budgets if budgets is not None else {"paper": PRESETS["paper"]}
    budget_v2 = budget_v2 or {}
    for name, budget in budgets.items():
        r = scaling_ratio(budget)
        points.append(
            {
                "name": name,
                "v2": float(budget_v2.get(name, float("nan"))),
                "r": r,
                "r_eta_d_09": r * budget.eta_d / _REFERENCE_ETA_D,
            }
        )
    return {"curve": curve, "points": points}
