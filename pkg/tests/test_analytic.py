import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from ramancomb.data.states import (
    Coherent,
    Fock,
    SqueezedVacuum,
    Thermal,
    Vacuum,
    input_squeezing_factor,
    normalized_autocorrelation,
    optimal_quadrature,
)
from ramancomb.exceptions import DomainError, OrderRangeError, UndefinedStatisticError
from ramancomb.model.analytic import (
    SingleModeScenario,
    autocorrelation,
    best_squeezing,
    coherent_output,
    cross_correlation,
    cross_gamma,
    enumerate_occupations,
    equivalent_squeezing_parameter,
    fock_output_coefficient,
    joint_pnd,
    marginal_pnd,
    mean_photon,
    normalized_autocorrelation_out,
    normalized_squeezing_out,
    optimal_kappa_L,
    peak_fraction,
    photon_statistics_class,
    sideband_moment,
    single_mode_record,
    single_photon_concurrence,
    squeezing_factor_out,
    squeezing_profile,
)
from ramancomb.model.scattering import SidebandWindow, phase, recommend_window
from ramancomb.model.specfun import bessel_j

REPLICATED_STATES = [Fock(5), Thermal(1.0), Coherent(2.0)]
KAPPAS = [0.5, 2.0, 5.0, 8.0]


@pytest.mark.parametrize("state", REPLICATED_STATES, ids=lambda s: s.kind)
@pytest.mark.parametrize("kappa_L", KAPPAS)
def test_normalized_statistics_are_replicated(state, kappa_L):
    scn = SingleModeScenario(state, kappa_L)
    for order in (2, 3):
        g_in = normalized_autocorrelation(state, order)
        for q in range(-10, 11):
            if abs(bessel_j(q, kappa_L)) > 1e-6:
                assert normalized_autocorrelation_out(scn, q, order) == pytest.approx(g_in, abs=1e-12)


@pytest.mark.parametrize("kappa_L", KAPPAS)
def test_photon_number_is_conserved(kappa_L):
    scn = SingleModeScenario(Fock(5), kappa_L, recommend_window(kappa_L))
    total = sum(mean_photon(scn, q) for q in scn.window)
    assert total == pytest.approx(5.0, abs=1e-11)
    record = single_mode_record(scn, orders=[0])
    assert record.scalars["conservation_defect"] <= 1e-11


def test_moments_scale_with_bessel_factors():
    scn = SingleModeScenario(Fock(5), 5.0)
    j1 = bessel_j(1, 5.0)
    assert mean_photon(scn, 1) == pytest.approx(5.0 * j1**2, rel=1e-13)
    assert sideband_moment(scn, 1, 2) == pytest.approx(20.0 * j1**4, rel=1e-13)
    assert autocorrelation(scn, 1, 2) == pytest.approx(-5.0 * j1**4, rel=1e-13)
    assert cross_gamma(scn, 1, 2) == pytest.approx(-5.0 * j1**2 * bessel_j(2, 5.0) ** 2, rel=1e-13)
    assert cross_gamma(scn, 1, 1) == autocorrelation(scn, 1, 2)


def test_cross_correlation_of_fock_input():
    scn = SingleModeScenario(Fock(5), 3.0)
    gamma, g_kl = cross_correlation(scn, 1, -2)
    assert g_kl == pytest.approx(0.8, abs=1e-12)
    assert gamma < 0
    assert cross_correlation(scn, 2, 2)[1] == pytest.approx(0.8, abs=1e-12)


def test_empty_sideband_is_undefined():
    scn = SingleModeScenario(Fock(5), 0.0)
    assert mean_photon(scn, 1) == 0.0
    with pytest.raises(UndefinedStatisticError):
        normalized_autocorrelation_out(scn, 1, 2)
    with pytest.raises(UndefinedStatisticError):
        cross_correlation(scn, 0, 1)
    with pytest.raises(UndefinedStatisticError):
        normalized_squeezing_out(scn, 1, 0.0)
    assert normalized_autocorrelation_out(scn, 0, 2) == pytest.approx(0.8)


def test_weak_sideband_keeps_input_statistics():
    scn = SingleModeScenario(Fock(5), 0.01, SidebandWindow.symmetric(30))
    assert 0.0 < abs(scn.j(25)) < 1e-80
    assert normalized_autocorrelation_out(scn, 25, 2) == normalized_autocorrelation(Fock(5), 2)
    assert normalized_autocorrelation_out(scn, 25, 3) == normalized_autocorrelation(Fock(5), 3)
    assert cross_correlation(scn, 0, 25)[1] == normalized_autocorrelation(Fock(5), 2)
    assert single_mode_record(scn, orders=[25]).sidebands[25]["g2"] == pytest.approx(0.8, abs=1e-15)


def test_argument_checks():
    scn = SingleModeScenario(Fock(2), 1.0, SidebandWindow.symmetric(3))
    with pytest.raises(OrderRangeError):
        mean_photon(scn, 4)
    with pytest.raises(DomainError):
        sideband_moment(scn, 0, 0)
    with pytest.raises(DomainError):
        normalized_autocorrelation_out(scn, 0, 5)
    with pytest.raises(DomainError):
        marginal_pnd(scn, 0, -1)
    with pytest.raises(DomainError):
        SingleModeScenario(Fock(2), -0.1)


@pytest.mark.parametrize("kappa_L", [0.7, 2.4, 6.0])
def test_marginal_of_fock_input_is_binomial(kappa_L):
    scn = SingleModeScenario(Fock(5), kappa_L)
    for q in (0, 1, 3):
        expected = stats.binom.pmf(np.arange(8), 5, bessel_j(q, kappa_L) ** 2)
        np.testing.assert_allclose(marginal_pnd(scn, q, 7), expected, atol=1e-12)


@pytest.mark.parametrize("kappa_L", [0.7, 2.4, 6.0])
def test_marginal_of_thermal_input_stays_thermal(kappa_L):
    scn = SingleModeScenario(Thermal(1.0), kappa_L)
    for q in (0, 2):
        mean = bessel_j(q, kappa_L) ** 2
        n = np.arange(11)
        expected = mean**n / (1.0 + mean) ** (n + 1)
        np.testing.assert_allclose(marginal_pnd(scn, q, 10), expected, atol=1e-12)


@pytest.mark.parametrize("kappa_L", [0.7, 2.4, 6.0])
def test_marginal_of_coherent_input_stays_poissonian(kappa_L):
    scn = SingleModeScenario(Coherent(2.0), kappa_L)
    for q in (0, -1, 2):
        expected = stats.poisson.pmf(np.arange(15), 4.0 * bessel_j(q, kappa_L) ** 2)
        np.testing.assert_allclose(marginal_pnd(scn, q, 14), expected, atol=1e-12)


@pytest.mark.parametrize("n_photons", [1, 2, 3])
@pytest.mark.parametrize("kappa_L", [0.5, 2.0])
def test_joint_distribution_of_fock_input(n_photons, kappa_L):
    window = SidebandWindow.symmetric(4)
    scn = SingleModeScenario(Fock(n_photons), kappa_L, window)
    occupations = list(enumerate_occupations(window, n_photons))
    assert len(occupations) == math.comb(window.width + n_photons - 1, n_photons)

    held = sum(bessel_j(q, kappa_L) ** 2 for q in window)
    joint = [joint_pnd(scn, occ) for occ in occupations]
    assert sum(joint) == pytest.approx(held**n_photons, abs=1e-12)

    for occ, probability in zip(occupations, joint):
        amplitude = fock_output_coefficient(n_photons, occ, kappa_L)
        assert abs(amplitude) ** 2 == pytest.approx(probability, abs=1e-14)

    for q in (0, 1, -2):
        share = bessel_j(q, kappa_L) ** 2
        for n in range(n_photons + 1):
            summed = sum(p for occ, p in zip(occupations, joint) if occ.get(q, 0) == n)
            expected = math.comb(n_photons, n) * share**n * (held - share) ** (n_photons - n)
            assert summed == pytest.approx(expected, abs=1e-12)


def test_joint_distribution_rejects_bad_occupations():
    scn = SingleModeScenario(Fock(2), 1.0, SidebandWindow.symmetric(2))
    with pytest.raises(OrderRangeError):
        joint_pnd(scn, {3: 1})
    with pytest.raises(DomainError):
        joint_pnd(scn, {0: -1})
    assert joint_pnd(scn, {0: 1}) == 0.0


def test_enumeration_limits():
    with pytest.raises(DomainError):
        list(enumerate_occupations(SidebandWindow.symmetric(2), 7))
    with pytest.raises(DomainError):
        list(enumerate_occupations(SidebandWindow(-7, 6), 2))


def test_fock_output_coefficient():
    assert fock_output_coefficient(1, {3: 1}, 2.0) == pytest.approx(phase(3) * bessel_j(3, 2.0))
    assert fock_output_coefficient(2, {0: 1}, 2.0) == 0
    two = fock_output_coefficient(2, {0: 1, 1: 1}, 1.0)
    assert two == pytest.approx(math.sqrt(2.0) * 1j * bessel_j(0, 1.0) * bessel_j(1, 1.0))


@given(
    r=st.floats(min_value=0.05, max_value=2.0),
    theta=st.floats(min_value=0.0, max_value=6.28),
    phi=st.floats(min_value=0.0, max_value=3.14),
    kappa_L=st.floats(min_value=0.0, max_value=10.0),
    q=st.integers(min_value=-6, max_value=6),
)
def test_squeezing_follows_rotated_quadrature(r, theta, phi, kappa_L, q):
    state = SqueezedVacuum(r, theta)
    scn = SingleModeScenario(state, kappa_L)
    rotated = squeezing_factor_out(scn, q, phi + q * math.pi / 2)
    assert rotated == pytest.approx(bessel_j(q, kappa_L) ** 2 * input_squeezing_factor(state, phi), abs=1e-12)


def test_normalized_squeezing_is_replicated():
    state = SqueezedVacuum(1.0)
    scn = SingleModeScenario(state, 2.0)
    expected = input_squeezing_factor(state, 0.0) / state.mean_photon
    for q in (-2, 0, 1, 3):
        assert normalized_squeezing_out(scn, q, q * math.pi / 2) == pytest.approx(expected, abs=1e-12)


def test_best_squeezing_and_profile():
    state = SqueezedVacuum(0.8, 0.6)
    scn = SingleModeScenario(state, 1.7)
    _, best_in = optimal_quadrature(state.moments().n_mean, 0j, state.moments().m_b2)
    phi, best = best_squeezing(scn, 1)
    assert best == pytest.approx(bessel_j(1, 1.7) ** 2 * best_in, abs=1e-12)
    assert squeezing_factor_out(scn, 1, phi) == pytest.approx(best, abs=1e-12)
    phis, values = squeezing_profile(scn, 1)
    assert phis.shape == values.shape == (64,)
    assert values.min() >= best - 1e-12


def test_coherent_output_amplitudes():
    scn = SingleModeScenario(Coherent(1.0 + 1.0j), 2.5)
    output = coherent_output(scn)
    for q in (-2, 0, 1, 4):
        assert output[q] == pytest.approx(phase(q) * bessel_j(q, 2.5) * (1.0 + 1.0j), abs=1e-14)
    with pytest.raises(DomainError):
        coherent_output(SingleModeScenario(Fock(1), 2.5))


def test_single_photon_concurrence():
    assert single_photon_concurrence(0, 1, 1.0) == pytest.approx(
        2.0 * bessel_j(0, 1.0) * bessel_j(1, 1.0)
    )
    assert single_photon_concurrence(0, 1, 0.0) == 0.0
    with pytest.raises(DomainError):
        single_photon_concurrence(2, 2, 1.0)


def test_optimal_kappa_L_and_peak_fraction():
    assert optimal_kappa_L(1) == pytest.approx(1.8411837813406593, abs=1e-9)
    assert peak_fraction(1) == pytest.approx(0.338567, abs=1e-6)
    assert optimal_kappa_L(2) == pytest.approx(3.0542369282271404, abs=1e-9)
    assert optimal_kappa_L(-2) == optimal_kappa_L(2)
    assert optimal_kappa_L(0) == 0.0
    assert peak_fraction(0) == 1.0


def test_equivalent_squeezing_parameter():
    assert equivalent_squeezing_parameter(math.exp(-2.0) - 1.0) == pytest.approx(1.0)
    assert equivalent_squeezing_parameter(0.0) == 0.0
    with pytest.raises(DomainError):
        equivalent_squeezing_parameter(-1.0)


@pytest.mark.parametrize(
    "g2, label", [(0.8, "sub-Poissonian"), (1.0, "Poissonian"), (2.0, "super-Poissonian")]
)
def test_photon_statistics_class(g2, label):
    assert photon_statistics_class(g2) == label


def test_single_mode_record():
    scn = SingleModeScenario(Fock(1), 1.2)
    record = single_mode_record(scn, orders=[0, 1], pairs=[(0, 1)], n_max=2)
    flat = record.observables()
    assert flat["mean_photon[1]"] == pytest.approx(bessel_j(1, 1.2) ** 2)
    assert flat["g2[0]"] == 0.0
    assert flat["concurrence[0,1]"] == pytest.approx(single_photon_concurrence(0, 1, 1.2))
    assert flat["marginal[1][1]"] == pytest.approx(bessel_j(1, 1.2) ** 2)
    assert flat["marginal[1][2]"] == 0.0
    assert "total_mean" in flat and "conservation_defect" in flat


def test_record_marks_empty_sidebands_as_nan():
    record = single_mode_record(SingleModeScenario(Fock(3), 0.0), orders=[0, 2], pairs=[(0, 2)])
    assert math.isnan(record.sidebands[2]["g2"])
    assert math.isnan(record.pairs[(0, 2)]["g_kl"])
    assert record.sidebands[0]["g2"] == pytest.approx(2.0 / 3.0)
    assert "concurrence" not in record.pairs[(0, 2)]


def test_vacuum_input_stays_dark():
    scn = SingleModeScenario(Vacuum(), 3.0)
    assert mean_photon(scn, 1) == 0.0
    np.testing.assert_allclose(marginal_pnd(scn, 1, 3), [1.0, 0.0, 0.0, 0.0])
