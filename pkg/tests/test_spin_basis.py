import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dickesim.errors import ContractViolationError, DomainError, SingularStateError
from dickesim.spin_basis import (
    DickeState,
    SpinQuantum,
    apply_sx,
    apply_sy,
    apply_sz,
    binomial_amplitudes,
    initial_coherent_spin_state,
    log_binomial_amplitude,
    mean_spin_with_decay,
    min_orthogonal_variance,
    spin_matrices,
    spin_moments,
    squeezing_parameter,
)


class TestSpinQuantum:
    def test_basic_properties(self):
        spin = SpinQuantum(20)
        assert spin.s_twice == 20
        assert spin.s == 10.0
        assert spin.dim == 21
        m = spin.m_values()
        assert m[0] == -10.0 and m[-1] == 10.0 and m[10] == 0.0

    def test_half_integer_spin(self):
        spin = SpinQuantum(3)
        assert spin.s == 1.5
        assert list(spin.m_values()) == [-1.5, -0.5, 0.5, 1.5]

    def test_zero_atoms_rejected(self):
        with pytest.raises(DomainError):
            SpinQuantum(0)


class TestDickeState:
    def test_shape_mismatch_rejected(self):
        with pytest.raises(DomainError):
            DickeState(SpinQuantum(2), np.ones(2))

    def test_require_normalized(self):
        state = DickeState(SpinQuantum(2), np.array([1.0, 1.0, 1.0]))
        with pytest.raises(ContractViolationError):
            state.require_normalized()
        assert abs(state.normalized().norm_sq - 1.0) < 1e-14

    def test_normalize_zero_vector_rejected(self):
        with pytest.raises(DomainError):
            DickeState(SpinQuantum(2), np.zeros(3)).normalized()


class TestLogBinomialAmplitude:
    def test_edge_values(self):
        assert log_binomial_amplitude(2, 2) == pytest.approx(math.log(0.5), abs=1e-14)
        assert log_binomial_amplitude(2, 0) == pytest.approx(
            math.log(math.sqrt(2) / 2), abs=1e-14
        )

    def test_central_population_s10(self):
        log_a = log_binomial_amplitude(20, 0)
        assert math.exp(2 * log_a) == pytest.approx(0.176197, rel=1e-4)

    @pytest.mark.parametrize("s_twice", [1, 2, 7, 20, 33, 60])
    def test_against_exact_integer_factorials(self, s_twice):
        for m_twice in range(-s_twice, s_twice + 1, 2):
            k_plus = (s_twice + m_twice) // 2
            k_minus = (s_twice - m_twice) // 2
            exact_sq = Fraction(
                math.factorial(s_twice),
                math.factorial(k_plus) * math.factorial(k_minus),
            ) / Fraction(2**s_twice)
            got = math.exp(2 * log_binomial_amplitude(s_twice, m_twice))
            assert got == pytest.approx(float(exact_sq), rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            log_binomial_amplitude(-2, 0)
        with pytest.raises(DomainError):
            log_binomial_amplitude(2, 4)
        with pytest.raises(DomainError):
            log_binomial_amplitude(2, 1)  # parity mismatch


class TestInitialState:
    def test_two_atoms(self):
        state = initial_coherent_spin_state(2)
        np.testing.assert_allclose(
            state.amplitudes.real, [0.5, math.sqrt(2) / 2, 0.5], atol=1e-14
        )

    @pytest.mark.parametrize("n_atoms", [1, 2, 5, 20, 101])
    def test_normalized(self, n_atoms):
        assert abs(initial_coherent_spin_state(n_atoms).norm_sq - 1.0) < 1e-12

    def test_sx_eigenstate(self):
        state = initial_coherent_spin_state(20)
        residual = apply_sx(state.spin, state.amplitudes) - 10.0 * state.amplitudes
        assert np.max(np.abs(residual)) <= 1e-10

    def test_zero_atoms_rejected(self):
        with pytest.raises(DomainError):
            initial_coherent_spin_state(0)


class TestSpinMoments:
    def test_initial_state_moments(self):
        state = initial_coherent_spin_state(20)
        mom = spin_moments(state)
        assert mom.mean_sx == pytest.approx(10.0, abs=1e-10)
        assert mom.mean_sy == pytest.approx(0.0, abs=1e-12)
        assert mom.mean_sz == pytest.approx(0.0, abs=1e-12)
        assert mom.var_sz == pytest.approx(5.0, rel=1e-12)  # N_a / 4
        assert mom.var_sy == pytest.approx(5.0, rel=1e-12)
        assert mom.mean_spin_length == pytest.approx(10.0, abs=1e-10)

    def test_ladder_consistency_with_dense_matrices(self):
        rng = np.random.default_rng(3)
        spin = SpinQuantum(7)
        amps = rng.normal(size=spin.dim) + 1j * rng.normal(size=spin.dim)
        amps /= np.linalg.norm(amps)
        sx, sy, sz = spin_matrices(spin)
        np.testing.assert_allclose(apply_sx(spin, amps), sx @ amps, atol=1e-12)
        np.testing.assert_allclose(apply_sy(spin, amps), sy @ amps, atol=1e-12)
        np.testing.assert_allclose(apply_sz(spin, amps), sz @ amps, atol=1e-12)

    def test_commutator_algebra(self):
        sx, sy, sz = spin_matrices(SpinQuantum(5))
        np.testing.assert_allclose(sx @ sy - sy @ sx, 1j * sz, atol=1e-12)

    def test_unnormalized_rejected(self):
        state = DickeState(SpinQuantum(2), np.array([1.0, 1.0, 0.0]))
        with pytest.raises(ContractViolationError):
            spin_moments(state)

    @given(st.integers(min_value=1, max_value=12), st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_mean_spin_bounded_by_s(self, n_atoms, seed):
        rng = np.random.default_rng(seed)
        spin = SpinQuantum(n_atoms)
        amps = rng.normal(size=spin.dim) + 1j * rng.normal(size=spin.dim)
        amps /= np.linalg.norm(amps)
        mom = spin_moments(DickeState(spin, amps))
        assert mom.mean_spin_length <= spin.s + 1e-9
        assert mom.var_sz >= 0.0 and mom.var_sy >= 0.0

    @given(st.integers(min_value=1, max_value=10), st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_symmetric_real_amplitudes_have_zero_sz_sy(self, half, seed):
        rng = np.random.default_rng(seed)
        spin = SpinQuantum(2 * half)
        raw = rng.uniform(0.1, 1.0, size=half + 1)
        amps = np.concatenate([raw[:0:-1], raw]).astype(complex)
        amps /= np.linalg.norm(amps)
        mom = spin_moments(DickeState(spin, amps))
        assert abs(mom.mean_sz) <= 1e-12
        assert abs(mom.mean_sy) <= 1e-12


class TestSqueezing:
    def test_coherent_state_is_unity(self):
        for n_atoms in (2, 20, 100):
            state = initial_coherent_spin_state(n_atoms)
            assert squeezing_parameter(state) == pytest.approx(1.0, rel=1e-10)

    def test_min_orthogonal_variance_coherent(self):
        state = initial_coherent_spin_state(20)
        assert min_orthogonal_variance(state) == pytest.approx(5.0, rel=1e-10)

    def test_zero_mean_spin_raises(self):
        spin = SpinQuantum(2)
        amps = np.zeros(3, dtype=complex)
        amps[1] = 1.0  # the pure M = 0 state has no mean spin
        with pytest.raises(SingularStateError):
            squeezing_parameter(DickeState(spin, amps))
        with pytest.raises(SingularStateError):
            min_orthogonal_variance(DickeState(spin, amps))


class TestDecay:
    def test_mean_spin_with_decay(self):
        assert mean_spin_with_decay(10.0, 0.0) == 10.0
        assert mean_spin_with_decay(10.0, 1.0) == pytest.approx(10.0 / math.e)
        with pytest.raises(DomainError):
            mean_spin_with_decay(10.0, -0.1)


def test_binomial_amplitudes_match_scalar_form():
    spin = SpinQuantum(15)
    vec = binomial_amplitudes(spin)
    for k, m_twice in enumerate(range(-15, 16, 2)):
        assert vec[k] == pytest.approx(
            math.exp(log_binomial_amplitude(15, m_twice)), rel=1e-12
        )
