import numpy as np
import pytest

from loopcluster import scaling
from loopcluster.scaling import EfficiencyBudget, PdcSource


class TestEfficiencyBudget:
    def test_validation(self):
        with pytest.raises(ValueError):
            EfficiencyBudget(R=0.0)
        with pytest.raises(ValueError):
            EfficiencyBudget(eta_d=0.0)
        with pytest.raises(ValueError):
            EfficiencyBudget(eta_g=1.5)

    def test_presets(self):
        paper = scaling.PRESETS["paper"]
        assert paper.eta_d == 0.25
        assert paper.eta_b == 0.15
        assert scaling.PRESETS["ideal"].eta_d == 1.0


class TestDetectionRate:
    def test_single_photon_rate(self):
        b = EfficiencyBudget(R=100.0, eta_d=0.5)
        assert scaling.detection_rate(b, 1) == pytest.approx(50.0)

    def test_consecutive_ratio_is_constant(self):
        b = scaling.PRESETS["paper"]
        r = scaling.scaling_ratio(b)
        for n in range(1, 7):
            ratio = scaling.detection_rate(b, n) / scaling.detection_rate(b, n + 1)
            assert ratio == pytest.approx(r, rel=1e-12)

    def test_paper_preset_ratio(self):
        r = scaling.scaling_ratio(scaling.PRESETS["paper"])
        assert r == pytest.approx(101.587301587, abs=1e-6)

    def test_n_validation(self):
        with pytest.raises(ValueError):
            scaling.detection_rate(EfficiencyBudget(), 0)


class TestPdc:
    def test_lambda_is_tanh(self):
        src = PdcSource(0.4)
        assert src.lam == pytest.approx(np.tanh(0.4))
        with pytest.raises(ValueError):
            PdcSource(-0.1)

    def test_visibility_limits(self):
        assert scaling.pdc_visibility(PdcSource(0.0)) == pytest.approx(1.0)
        assert scaling.pdc_visibility(PdcSource(10.0)) == pytest.approx(0.0, abs=1e-6)

    def test_ratio_visibility_identity(self):
        # r(V2(tau)) * tanh^2(tau) = 1 for the heralded source
        for tau in (0.05, 0.2, 0.5, 1.0, 1.7):
            src = PdcSource(tau)
            v2 = scaling.pdc_visibility(src)
            r = scaling.pdc_scaling_ratio(v2)
            assert r * np.tanh(tau) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_gate_floor(self):
        # unit efficiencies except the probabilistic gate leave a factor 2
        b = EfficiencyBudget(eta_g=0.5)
        assert scaling.scaling_ratio(b) == pytest.approx(scaling.GATE_FLOOR)

    def test_ratio_validation(self):
        with pytest.raises(ValueError):
            scaling.pdc_scaling_ratio(1.0)
        with pytest.raises(ValueError):
            scaling.pdc_scaling_ratio(0.0)


class TestComparisonCurves:
    def test_curve_contents(self):
        out = scaling.source_comparison_curves([0.5, 0.9], budget_v2={"paper": 0.85})
        (v2a, ra, fa), (v2b, rb, fb) = out["curve"]
        assert (v2a, fa) == (0.5, scaling.GATE_FLOOR)
        assert ra == pytest.approx(2.0 * 3.0)
        assert rb == pytest.approx(2.0 * 19.0)
        point = out["points"][0]
        assert point["name"] == "paper"
        assert point["v2"] == 0.85
        assert point["r"] == pytest.approx(101.587301587, abs=1e-6)

    def test_high_efficiency_detector_extrapolation(self):
        out = scaling.source_comparison_curves([0.5])
        point = out["points"][0]
        assert point["r_eta_d_09"] == pytest.approx(point["r"] * 0.25 / 0.9)

    def test_pdc_curve_dominates_gate_floor(self):
        out = scaling.source_comparison_curves(np.linspace(0.35, 0.99, 20))
        for v2, r, floor in out["curve"]:
            assert r > floor
