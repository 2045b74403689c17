from fractions import Fraction
from functools import reduce
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import binom

from dickeprep.spin import CssAngles, DomainError, SymmetricState, coherent_spin_state, dicke_basis_state, m_values, pauli, symmetric_embedding
from dickeprep.targets import TargetSpec, haar_random_symmetric, materialize
from dickeprep.tomography import (
    MAX_CONDITION,
    ConditioningError,
    ExcitationHistogram,
    MeasurementSetting,
    collective_power_expansion,
    dicke_projector_coefficients,
    fidelity_proxy,
    jz_moment_from_histogram,
    pi_setting_decomposition,
    pi_sum_expectations,
    populations_from_moments,
    projector_residual,
    proxy_report,
    random_settings,
    sample_excitation_histogram,
    setting_count,
    setting_expectations,
    setting_populations,
    vandermonde_condition,
)


def _kron(ops):
    return reduce(np.kron, ops)


def _pi_sum(n, axis, i):
    """Sum over i-subsets of products of sigma_axis, as an explicit 2^N matrix."""
    s = pauli(axis)
    return sum(_kron([s if q in sub else np.eye(2) for q in range(n)]) for sub in combinations(range(n), i))


# --- counts -------------------------------------------------------------------

@pytest.mark.parametrize("n,d", [(1, 3), (2, 6), (13, 105)])
def test_setting_count(n, d):
    assert setting_count(n) == d


def test_setting_count_matches_binomial():
    from math import comb

    assert all(setting_count(n) == comb(n + 2, n) for n in range(1, 40))


# --- sampler -------------------------------------------------------------------

def test_pole_histogram():
    h = sample_excitation_histogram(dicke_basis_state(5, -2.5), 1000, seed=0)
    assert h.counts[0] == 1000 and h.n_shots == 1000


def test_css_histogram_binomial():
    n, shots = 4, 100_000
    h = sample_excitation_histogram(coherent_spin_state(n, CssAngles(np.pi / 2, 0.0)), shots, seed=1)
    p = binom.pmf(np.arange(n + 1), n, 0.5)
    sigma = np.sqrt(shots * p * (1 - p))
    assert np.all(np.abs(h.counts - shots * p) < 4 * sigma)


def test_ghz_histogram_support():
    h = sample_excitation_histogram(materialize(TargetSpec("ghz", 4)), 5000, seed=2)
    assert set(np.flatnonzero(h.counts)) <= {0, 4}


def test_sampler_deterministic_and_validated():
    s = haar_random_symmetric(6, 0)
    assert np.array_equal(sample_excitation_histogram(s, 100, 3).counts, sample_excitation_histogram(s, 100, 3).counts)
    with pytest.raises(DomainError):
        sample_excitation_histogram(s, 0, 3)
    with pytest.raises(DomainError):
        ExcitationHistogram(2, [1, -1, 0])


# --- proxy -------------------------------------------------------------------

def test_proxy_examples():
    n = 6
    for m in m_values(n):
        t = dicke_basis_state(n, m)
        assert fidelity_proxy(t.populations, t) == pytest.approx(1)
        assert fidelity_proxy(np.full(n + 1, 1 / (n + 1)), t) == pytest.approx(1 / (n + 1))


def test_proxy_rejects_complex_target():
    t = SymmetricState.from_amplitudes([1, 1j, 0])
    with pytest.raises(DomainError, match="real"):
        fidelity_proxy([0.5, 0.5, 0], t)
    # a global phase on a real target is fine
    r = SymmetricState.from_amplitudes(np.array([1, -2, 0]) * np.exp(0.7j))
    assert fidelity_proxy(r.populations, r) == pytest.approx(0.2 ** 2 + 0.8 ** 2)


def test_proxy_is_one_only_for_matching_single_dicke():
    n = 4
    t = dicke_basis_state(n, 0)
    rng = np.random.default_rng(0)
    for _ in range(20):
        p = rng.dirichlet(np.ones(n + 1))
        assert fidelity_proxy(p, t) < 1
    sup = materialize(TargetSpec("ghz", n))
    assert fidelity_proxy(sup.populations, sup) == pytest.approx(0.5)


@pytest.mark.parametrize("shots", [10 ** 4, 10 ** 5, 10 ** 6])
def test_histogram_proxy_consistency(shots):
    state = haar_random_symmetric(9, 4)
    target = materialize(TargetSpec("ruskai-r1", 9))
    rep = proxy_report(sample_excitation_histogram(state, shots, seed=shots), target, exact_state=state)
    assert abs(rep.proxy - rep.exact_proxy) < 3 * rep.std_error


# --- Vandermonde ----------------------------------------------------------------

def test_projector_coefficients_n1():
    assert np.allclose(dicke_projector_coefficients(1, Fraction(-1, 2)), [0.5, -1.0])
    assert np.allclose(dicke_projector_coefficients(1, Fraction(1, 2)), [0.5, 1.0])


def test_projector_n3_matrix_residual():
    from dickeprep.spin import jz

    for m in m_values(3):
        c = dicke_projector_coefficients(3, m)
        op = sum(ci * np.linalg.matrix_power(jz(3), i) for i, ci in enumerate(c))
        assert np.max(np.abs(op - np.diag((m_values(3) == m).astype(float)))) < 1e-10


@pytest.mark.parametrize("n", range(1, 13))
def test_projector_residual_all_m(n):
    assert max(projector_residual(n, m, dicke_projector_coefficients(n, m)) for m in m_values(n)) < 1e-8


def test_projector_refuses_ill_conditioned():
    n = next(k for k in range(1, 40) if vandermonde_condition(k) > MAX_CONDITION)
    with pytest.raises(ConditioningError, match="condition"):
        dicke_projector_coefficients(n, 0 if n % 2 == 0 else 0.5)
    with pytest.raises(DomainError):
        dicke_projector_coefficients(4, 0.5)


def test_populations_from_moments_match_counts():
    state = haar_random_symmetric(8, 1)
    h = sample_excitation_histogram(state, 10 ** 4, seed=2)
    moments = [jz_moment_from_histogram(h, i) for i in range(9)]
    assert np.allclose(populations_from_moments(8, moments), h.frequencies, atol=1e-8)


def test_jz_moment_examples():
    h = sample_excitation_histogram(dicke_basis_state(4, -2), 100, seed=0)
    assert jz_moment_from_histogram(h, 0) == pytest.approx(1)
    assert jz_moment_from_histogram(h, 1) == pytest.approx(-2)
    exact = ExcitationHistogram(4, np.round(coherent_spin_state(4, CssAngles(np.pi / 2, 0)).populations * 16).astype(int))
    assert jz_moment_from_histogram(exact, 1) == pytest.approx(0, abs=1e-15)
    with pytest.raises(DomainError):
        jz_moment_from_histogram(h, 5)


# --- collective powers -----------------------------------------------------------

def test_jx_cubed_coefficients():
    assert collective_power_expansion(3, 3, "x") == (0, Fraction(7, 8), 0, Fraction(6, 8))


def test_first_power():
    for n in (1, 4, 9):
        assert collective_power_expansion(1, n, "y") == (0, Fraction(1, 2))


def test_power_too_large():
    with pytest.raises(DomainError):
        collective_power_expansion(4, 3)


def test_second_power_n2_matrix():
    d = collective_power_expansion(2, 2, "z")
    j = (_pi_sum(2, "z", 1)) / 2
    assert np.allclose(j @ j, sum(float(d[i]) * _pi_sum(2, "z", i) for i in range(3)))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_expansion_duality_on_random_states(n):
    rng = np.random.default_rng(n)
    for axis in "xyz":
        j = _pi_sum(n, axis, 1) / 2
        for power in range(n + 1):
            d = collective_power_expansion(power, n, axis)
            rhs = sum(float(d[i]) * _pi_sum(n, axis, i) for i in range(power + 1))
            lhs = np.linalg.matrix_power(j, power)
            for _ in range(20):
                v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
                v /= np.linalg.norm(v)
                assert abs(np.vdot(v, lhs @ v) - np.vdot(v, rhs @ v)) < 1e-9


def test_z_pi_sums_from_populations():
    state = haar_random_symmetric(4, 7)
    v = symmetric_embedding(state)
    sums = pi_sum_expectations(state.populations, 4)
    for i in range(5):
        assert sums[i] == pytest.approx(np.vdot(v, _pi_sum(4, "z", i) @ v).real, abs=1e-12)


# --- settings ----------------------------------------------------------------------

def test_setting_must_be_unit():
    with pytest.raises(DomainError):
        MeasurementSetting((1.0, 1.0, 0.0))


def test_setting_populations_match_full_space():
    state = haar_random_symmetric(3, 2)
    s = MeasurementSetting.from_vector([0.3, -0.5, 0.8])
    a = sum(c * pauli(ax) for c, ax in zip(s.direction, "xyz"))
    w, vecs = np.linalg.eigh(a)
    up = vecs[:, np.argmax(w)]
    down = vecs[:, np.argmin(w)]
    v = symmetric_embedding(state)
    probs = np.zeros(4)
    for idx in range(8):
        bits = [(idx >> (2 - q)) & 1 for q in range(3)]
        basis = _kron([up if b else down for b in bits])
        probs[sum(bits)] += abs(np.vdot(basis, v)) ** 2
    assert np.allclose(setting_populations(state, s), probs, atol=1e-12)


def test_decomposition_pauli_basis_n1():
    dec = pi_setting_decomposition(1, [MeasurementSetting(v) for v in np.eye(3)])
    c = np.array([dec.coeffs[1][lab] for lab in [(1, 0, 0), (0, 1, 0), (0, 0, 1)]])
    assert np.allclose(c, np.eye(3))


def test_decomposition_reconstructs_xy_n2():
    n = 2
    settings = random_settings(setting_count(n), seed=3)
    dec = pi_setting_decomposition(n, settings)
    assert dec.residual < 1e-8
    xy = np.kron(pauli("x"), pauli("y"))
    for seed in range(50):
        state = haar_random_symmetric(n, seed)
        exps = np.array([setting_expectations(setting_populations(state, s), n) for s in settings])
        v = symmetric_embedding(state)
        direct = np.vdot(v, xy @ v).real
        assert dec.monomial_expectations(exps)[(1, 1, 0)] == pytest.approx(direct, abs=1e-8)


@pytest.mark.parametrize("n", [3, 4])
def test_decomposition_all_monomials(n):
    settings = random_settings(setting_count(n), seed=n)
    dec = pi_setting_decomposition(n, settings)
    state = haar_random_symmetric(n, 1)
    v = symmetric_embedding(state)
    exps = np.array([setting_expectations(setting_populations(state, s), n) for s in settings])
    got = dec.monomial_expectations(exps)
    for (k, l, m), value in got.items():
        op = _kron([pauli("x")] * k + [pauli("y")] * l + [pauli("z")] * m + [np.eye(2)] * (n - k - l - m))
        assert value == pytest.approx(np.vdot(v, op @ v).real, abs=1e-8)


def test_coplanar_settings_rejected():
    t = np.linspace(0, np.pi, 6, endpoint=False)
    settings = [MeasurementSetting((np.cos(a), np.sin(a), 0.0)) for a in t]
    with pytest.raises(DomainError, match="settings"):
        pi_setting_decomposition(2, settings)
    with pytest.raises(DomainError):
        pi_setting_decomposition(2, settings[:5])


@given(seed=st.integers(0, 10 ** 6))
def test_random_settings_are_full_rank(seed):
    assert pi_setting_decomposition(2, random_settings(6, seed)).residual < 1e-8
