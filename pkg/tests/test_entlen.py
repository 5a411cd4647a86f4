import numpy as np
import pytest

from loopcluster import entlen, protocol, qcore
from loopcluster.entlen import ChainSweep, concurrence, entanglement_length
from loopcluster.protocol import NoiseModel, ProtocolState
from loopcluster.qcore import QuantumState


class TestConcurrence:
    def test_bell_pair_is_maximal(self):
        bell = QuantumState(np.array([1, 0, 0, 1]) / np.sqrt(2))
        assert concurrence(bell) == pytest.approx(1.0, abs=1e-10)

    def test_product_state_is_zero(self):
        assert concurrence(QuantumState.plus_state(2)) == pytest.approx(0.0, abs=1e-10)

    def test_werner_state_threshold(self):
        # the Werner state stays entangled exactly for p > 1/3
        bell = np.outer([1, 0, 0, 1], [1, 0, 0, 1]) / 2.0
        for p in (0.2, 1.0 / 3.0, 0.34, 0.8):
            rho = QuantumState(p * bell + (1 - p) * np.eye(4) / 4.0)
            c = concurrence(rho)
            expected = max(0.0, (3.0 * p - 1.0) / 2.0)
            assert c == pytest.approx(expected, abs=1e-10)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            concurrence(np.eye(8) / 8.0)
        with pytest.raises(ValueError):
            concurrence(np.diag([2.0, 0, 0, 0]))


class TestChainSweep:
    def test_validation(self):
        with pytest.raises(ValueError):
            ChainSweep(0.0)
        with pytest.raises(ValueError):
            ChainSweep(0.9, noise_kind="white")
        with pytest.raises(ValueError):
            ChainSweep(0.9, n_max=1)

    def test_noise_factory(self):
        assert ChainSweep(0.9).noise().kind == "distinguishing"
        dep = ChainSweep(0.9, noise_kind="depolarizing").noise()
        assert dep.kind == "depolarizing"
        assert dep.delta == pytest.approx(0.1)


class TestEndPair:
    def test_outcome_independence(self):
        # with the local correction both middle-photon branches agree
        sweep = ChainSweep(0.85)
        for n in (3, 4, 5):
            plus = entlen.chain_end_pair(n, sweep, branch=1)
            minus = entlen.chain_end_pair(n, sweep, branch=-1)
            assert np.allclose(plus.data, minus.data, atol=1e-10)

    def test_streaming_matches_full_chain(self):
        # measure-on-exit must agree with building the full chain first
        sweep = ChainSweep(0.8)
        n = 5
        streaming = entlen.chain_end_pair(n, sweep)
        ps = protocol.build_chain(n, 0.0, sweep.noise())
        state = ps.state
        for _ in range(n - 2):
            state, _ = qcore.project(state, 1, "y", 1)
        assert np.allclose(streaming.data, state.to_density().data, atol=1e-10)

    def test_n_range_check(self):
        with pytest.raises(ValueError):
            entlen.chain_end_pair(1, ChainSweep(0.9))


class TestEntanglementLength:
    @pytest.mark.parametrize(
        "v2,kind,expected",
        [
            (0.93, "distinguishing", 23),
            (0.76, "distinguishing", 7),
            (0.93, "depolarizing", 16),
            (0.76, "depolarizing", 5),
        ],
    )
    def test_reference_lengths(self, v2, kind, expected):
        result = entanglement_length(ChainSweep(v2, kind))
        assert result.length == expected
        assert not result.cap_limited

    def test_concurrence_table_is_decreasing(self):
        result = entanglement_length(ChainSweep(0.9))
        values = [c for _, c in result.concurrence_by_n]
        assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))

    def test_perfect_chain_hits_cap(self):
        result = entanglement_length(ChainSweep(1.0, n_max=8))
        assert result.length == 8
        assert result.cap_limited

    def test_depolarizing_matches_analytic_threshold(self):
        for v2 in np.linspace(0.45, 0.97, 50):
            sweep = ChainSweep(float(v2), "depolarizing", n_max=40)
            result = entanglement_length(sweep)
            assert result.length == entlen.depolarizing_length_analytic(float(v2))


class TestThresholds:
    def test_two_photon_threshold_is_one_third(self):
        assert entlen.min_v2_threshold(2) == pytest.approx(1.0 / 3.0, abs=1e-15)

    def test_threshold_consistency_identity(self):
        # vn at the threshold visibility equals 1/3 for every n
        for n in range(2, 30):
            v2 = entlen.min_v2_threshold(n)
            assert entlen.vn_from_v2(v2, n) == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_vn_composition_identity(self):
        # growing by a+b-1 photons composes the per-link attenuations
        v2 = 0.91
        for a, b in ((3, 4), (2, 7), (5, 5)):
            lhs = entlen.vn_from_v2(v2, a) * entlen.vn_from_v2(v2, b)
            rhs = entlen.vn_from_v2(v2, a + b - 1)
            assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            entlen.min_v2_threshold(1)
        with pytest.raises(ValueError):
            entlen.vn_from_v2(1.2, 3)
        with pytest.raises(ValueError):
            entlen.depolarizing_length_analytic(1.0)
