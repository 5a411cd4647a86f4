"""Acceptance suite: ten end-to-end criteria, one printed pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines. Every criterion asserts at its stated tolerance; a failed assertion
prints its FAIL line before raising.
"""

import math
import time

import numpy as np
import pytest

from loopcluster import (
    amplitudes,
    analysis,
    entlen,
    montecarlo as mc,
    qcore,
    scaling,
)
from loopcluster.analysis import PhaseScan
from loopcluster.cli import parse_and_dispatch
from loopcluster.entlen import ChainSweep
from loopcluster.protocol import NoiseModel, build_chain, reference_state
from loopcluster.qcore import PauliString
from loopcluster.scaling import PRESETS, EfficiencyBudget, PdcSource


def report(num, name, ok):
    print(f"acceptance {num:2d} [{name}]: {'PASS' if ok else 'FAIL'}")
    assert ok, f"acceptance criterion {num} ({name}) failed"


def test_01_closed_form_states():
    t0 = time.perf_counter()
    worst = 1.0
    for n in (2, 3, 4):
        for phi in (0.0, 0.7, 1.9):
            produced = build_chain(n, phi, NoiseModel.ideal()).state
            worst = min(worst, qcore.fidelity(produced, reference_state(n, phi)))
    elapsed = time.perf_counter() - t0
    report(1, "closed-form state fidelity", worst > 1 - 1e-10 and elapsed < 1.0)


def test_02_visibility_laws():
    t0 = time.perf_counter()
    phis = np.linspace(0, np.pi, 41)
    laws = {
        (2, "xn"): np.cos(phis),
        (3, "xn"): np.sin(phis) ** 2,
        (4, "xn"): -np.cos(phis) * np.sin(phis) ** 2,
        (4, "svnp"): np.cos(phis) ** 2,
    }
    worst = 0.0
    for (n, obs), law in laws.items():
        rows = analysis.phase_scan(PhaseScan(tuple(phis), n, observable=obs))
        sim = np.array([r["visibility"] for r in rows])
        worst = max(worst, float(np.max(np.abs(sim - law))))
    phi_star = np.arccos(-1.0 / np.sqrt(3.0))
    state = build_chain(4, float(phi_star), NoiseModel.ideal()).state
    peak = qcore.expectation(state, PauliString("XXXX"))
    peak_err = abs(peak - 2.0 / (3.0 * np.sqrt(3.0)))
    elapsed = time.perf_counter() - t0
    report(2, "ideal visibility laws", worst < 1e-9 and peak_err < 1e-9 and elapsed < 10.0)


def test_03_m_scaling():
    # peak visibilities relative to the ideal curve scale as M^{n-1} (X^n)
    # and M^{n/2} (closed-form stabilizer)
    ok = True
    phi_peak = {2: 0.0, 3: np.pi / 2}
    for m in (0.5, 0.77, 0.9, 0.95):
        noise = NoiseModel.distinguishing(m)
        for n in range(2, 7):
            phi = phi_peak.get(n, float(np.arccos(-1.0 / np.sqrt(3.0))))
            obs = PauliString("X" * n)
            v = qcore.expectation(build_chain(n, phi, noise).state, obs)
            v0 = qcore.expectation(build_chain(n, phi, NoiseModel.ideal()).state, obs)
            ok = ok and abs(v / v0 - m ** (n - 1)) < 1e-9
        for n in (4, 6):
            obs = analysis.svn_prime(n)
            v = qcore.expectation(build_chain(n, 0.0, noise).state, obs)
            ok = ok and abs(v - m ** (n // 2)) < 1e-9
    # the model must land inside the quoted experimental error bars
    v2 = qcore.expectation(
        build_chain(2, 0.0, NoiseModel.distinguishing(0.77)).state, PauliString("XX")
    )
    v4p = qcore.expectation(
        build_chain(4, 0.0, NoiseModel.distinguishing(0.77)).state, analysis.svn_prime(4)
    )
    ok = ok and abs(v2 - 0.76) <= 0.01 + 1e-9
    ok = ok and abs(v4p - 0.59) <= 0.04 + 1e-9
    report(3, "M-scaling of peak visibilities", ok)


def test_04_amplitude_oracle():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for n in (2, 3, 4):
        for phi in rng.uniform(0, 2 * np.pi, size=25):
            table = np.abs(amplitudes(n, float(phi))) ** 2
            sim = np.abs(analysis.simulated_amplitudes(n, float(phi))) ** 2
            worst = max(worst, float(np.max(np.abs(table - sim))))
    report(4, "closed-form amplitude tables", worst < 1e-9)


def test_05_stabilizer_suite():
    ok = True
    for n in range(2, 9):
        state = build_chain(n, 0.0, NoiseModel.ideal()).state
        for gen in analysis.stabilizer_generators(n):
            ok = ok and abs(qcore.expectation(state, gen) - 1.0) < 1e-10
    for n in (4, 6, 8):
        gens = analysis.stabilizer_generators(n)
        prod = gens[0]
        for g in gens[2::2]:
            prod = prod * g
        ok = ok and prod == analysis.svn_prime(n) and prod.sign == 1
    report(5, "stabilizer generators", ok)


def test_06_entanglement_length():
    t0 = time.perf_counter()
    targets = [
        (0.93, "distinguishing", 23),
        (0.76, "distinguishing", 7),
        (0.93, "depolarizing", 16),
        (0.76, "depolarizing", 5),
    ]
    ok = True
    for v2, kind, expected in targets:
        result = entlen.entanglement_length(ChainSweep(v2, kind))
        ok = ok and result.length == expected
    for v2 in np.linspace(0.45, 0.97, 50):
        sweep = ChainSweep(float(v2), "depolarizing", n_max=40)
        ok = ok and entlen.entanglement_length(sweep).length == entlen.depolarizing_length_analytic(float(v2))
    elapsed = time.perf_counter() - t0
    report(6, "entanglement lengths", ok and elapsed < 60.0)


def test_07_threshold_formulas():
    ok = entlen.min_v2_threshold(2) == pytest.approx(1.0 / 3.0, abs=1e-15)
    for n in range(2, 40):
        v2 = entlen.min_v2_threshold(n)
        ok = ok and abs(entlen.vn_from_v2(v2, n) - 1.0 / 3.0) < 1e-12
    v2 = 0.88
    for a, b in ((2, 9), (4, 6), (3, 3)):
        lhs = entlen.vn_from_v2(v2, a) * entlen.vn_from_v2(v2, b)
        ok = ok and abs(lhs - entlen.vn_from_v2(v2, a + b - 1)) < 1e-12
    report(7, "threshold formulas", ok)


def test_08_scaling_ratios():
    r = scaling.scaling_ratio(PRESETS["paper"])
    ok = abs(r - 101.587301587) < 1e-6
    for empirical in (480.0 / 4.3, 4.3 / 0.04):
        ok = ok and abs(empirical - r) / r < 0.25
    for tau in (0.1, 0.4, 0.9, 1.5):
        v2 = scaling.pdc_visibility(PdcSource(tau))
        ok = ok and abs(scaling.pdc_scaling_ratio(v2) * math.tanh(tau) ** 2 - 1.0) < 1e-12
    ok = ok and abs(scaling.scaling_ratio(EfficiencyBudget(eta_g=0.5)) - 2.0) < 1e-12
    report(8, "scaling ratios", ok)


def test_09_monte_carlo_statistics():
    t0 = time.perf_counter()
    seq = mc.PulseSequence.for_photons(2)
    budget = EfficiencyBudget()
    shots = 1_000_000
    ok = True
    for i, phi in enumerate(np.linspace(0.2, 2.8, 5)):
        tally = mc.run_sequence(seq, NoiseModel.ideal(), budget, shots, 100 + i, phi=float(phi))
        v, sigma = mc.visibility_with_errors(tally, PauliString("XX"))
        ok = ok and abs(v - np.cos(phi)) < 3 * sigma
    # matched-seed background injection and subtraction
    bg = mc.BackgroundModel(cw_fraction=0.10)
    phi = 0.6
    clean = mc.run_sequence(seq, NoiseModel.ideal(), budget, shots, 7, phi=phi)
    dirty = mc.run_sequence(seq, NoiseModel.ideal(), budget, shots, 7, phi=phi, background=bg)
    runs = mc.background_runs(seq, NoiseModel.ideal(), budget, shots, 7, phi=phi, background=bg)
    corr = mc.subtract_background(dirty, runs)
    v_clean, s_clean = mc.visibility_with_errors(clean, PauliString("XX"))
    v_corr, s_corr = mc.visibility_with_errors(corr, PauliString("XX"))
    ok = ok and abs(v_corr - v_clean) < 3 * math.hypot(s_clean, s_corr)
    elapsed = time.perf_counter() - t0
    report(9, "Monte Carlo statistics", ok and elapsed < 120.0)


def test_10_cli_determinism(tmp_path):
    ok = True
    for args, name in (
        (["montecarlo", "--photons", "3", "--shots", "400000", "--seed", "19",
          "--preset", "ideal", "--phi", "1.0"], "mc"),
        (["phase-scan", "--photons", "3", "--points", "11"], "scan"),
    ):
        paths = [tmp_path / f"{name}{i}.csv" for i in range(2)]
        for p in paths:
            ok = ok and parse_and_dispatch(args + ["--output", str(p)]) == 0
        ok = ok and paths[0].read_bytes() == paths[1].read_bytes()
    threaded = [
        tmp_path / "th1.csv",
        tmp_path / "th8.csv",
    ]
    base = ["montecarlo", "--photons", "2", "--shots", "600000", "--seed", "23", "--preset", "ideal"]
    ok = ok and parse_and_dispatch(base + ["--threads", "1", "--output", str(threaded[0])]) == 0
    ok = ok and parse_and_dispatch(base + ["--threads", "8", "--output", str(threaded[1])]) == 0
    ok = ok and threaded[0].read_bytes() == threaded[1].read_bytes()
    report(10, "CLI determinism", ok)
