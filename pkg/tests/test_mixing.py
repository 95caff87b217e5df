import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ramancomb.data.states import Coherent, Fock, SqueezedVacuum, Thermal, Vacuum, input_squeezing_factor
from ramancomb.exceptions import DomainError, OrderRangeError, UndefinedStatisticError
from ramancomb.model.analytic import (
    SingleModeScenario,
    autocorrelation,
    mean_photon,
    normalized_autocorrelation_out,
    squeezing_factor_out,
)
from ramancomb.model.mixing import (
    TwoModeScenario,
    two_mode_best_squeezing,
    two_mode_g2,
    two_mode_gamma2,
    two_mode_mean,
    two_mode_normalized_squeezing,
    two_mode_record,
    two_mode_second_moment,
    two_mode_squeezing,
    two_mode_squeezing_superposition,
)
from ramancomb.model.scattering import SidebandWindow, phase, recommend_window
from ramancomb.model.specfun import bessel_j

J1_FIRST_ZERO = 3.831705970207512
J2_FIRST_ZERO = 5.135622301840683


def test_fock_and_thermal_limits():
    fock, thermal = Fock(5), Thermal(1.0)
    at_j2_zero = TwoModeScenario(fock, thermal, 1, J2_FIRST_ZERO)
    assert two_mode_g2(at_j2_zero, 2) == pytest.approx(2.0, abs=1e-10)
    at_j1_zero = TwoModeScenario(fock, thermal, 1, J1_FIRST_ZERO)
    assert two_mode_g2(at_j1_zero, 2) == pytest.approx(0.8, abs=1e-10)


def test_squeezing_with_strong_coherent_neighbour():
    squeezed, coherent = SqueezedVacuum(1.0, 0.0), Coherent(20.0)

    early = TwoModeScenario(squeezed, coherent, 1, 1.84)
    squeezing = two_mode_squeezing(early, 1, math.pi / 2)
    assert abs(squeezing + 0.29) <= 0.01
    assert abs(two_mode_mean(early, 1) - 41.0) <= 1.0

    late = TwoModeScenario(squeezed, coherent, 1, 4.2)
    squeezing = two_mode_squeezing(late, 3, 3 * math.pi / 2)
    assert abs(squeezing + 0.16) <= 0.01
    assert abs(two_mode_mean(late, 3) - 39.0) <= 1.0
    assert squeezing == pytest.approx(bessel_j(3, 4.2) ** 2 * (math.exp(-2.0) - 1.0), abs=1e-12)


def test_normalized_squeezing_where_thermal_neighbour_vanishes():
    scn = TwoModeScenario(SqueezedVacuum(1.0), Thermal(1.0), 1, J1_FIRST_ZERO)
    expected = (math.exp(-2.0) - 1.0) / math.sinh(1.0) ** 2
    assert two_mode_normalized_squeezing(scn, 2, math.pi) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("state", [Fock(5), Coherent(1.0 - 2.0j), SqueezedVacuum(0.5, 1.0)], ids=lambda s: s.kind)
@pytest.mark.parametrize("kappa_L", [0.5, 2.0, 5.0])
def test_vacuum_neighbour_reduces_to_single_mode(state, kappa_L):
    window = SidebandWindow.symmetric(20)
    two = TwoModeScenario(state, Vacuum(), 1, kappa_L, window)
    one = SingleModeScenario(state, kappa_L, window)
    for q in range(-5, 6):
        assert two_mode_mean(two, q) == pytest.approx(mean_photon(one, q), abs=1e-14)
        assert two_mode_gamma2(two, q) == pytest.approx(autocorrelation(one, q, 2), abs=1e-14)
        angle = q * math.pi / 2
        assert two_mode_squeezing(two, q, angle) == pytest.approx(squeezing_factor_out(one, q, angle), abs=1e-14)
        if abs(bessel_j(q, kappa_L)) > 1e-3:
            assert two_mode_g2(two, q) == pytest.approx(normalized_autocorrelation_out(one, q, 2), abs=1e-12)


@given(
    alpha=st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False),
    r=st.floats(min_value=0.0, max_value=1.5),
    theta=st.floats(min_value=0.0, max_value=6.28),
    kappa_L=st.floats(min_value=0.0, max_value=8.0),
    nu=st.sampled_from([-2, -1, 1, 3]),
    q=st.integers(min_value=-4, max_value=4),
)
def test_gamma2_matches_moments(alpha, r, theta, kappa_L, nu, q):
    scn = TwoModeScenario(Coherent(alpha), SqueezedVacuum(r, theta), nu, kappa_L)
    mean = two_mode_mean(scn, q)
    expected = two_mode_second_moment(scn, q) - mean**2
    assert two_mode_gamma2(scn, q) == pytest.approx(expected, abs=1e-9 * (1.0 + mean**2))


@given(
    alpha=st.complex_numbers(max_magnitude=5.0, allow_nan=False, allow_infinity=False),
    r=st.floats(min_value=0.0, max_value=1.5),
    theta=st.floats(min_value=0.0, max_value=6.28),
    kappa_L=st.floats(min_value=0.0, max_value=8.0),
    phi=st.floats(min_value=0.0, max_value=3.14),
    q=st.integers(min_value=-4, max_value=4),
)
def test_squeezing_is_a_weighted_superposition(alpha, r, theta, kappa_L, phi, q):
    scn = TwoModeScenario(SqueezedVacuum(r, theta), Coherent(alpha), 1, kappa_L)
    assert two_mode_squeezing(scn, q, phi) == pytest.approx(
        two_mode_squeezing_superposition(scn, q, phi), abs=1e-9
    )


def test_two_coherent_inputs_stay_coherent():
    alpha, beta = 1.0 + 0.5j, -0.7j
    scn = TwoModeScenario(Coherent(alpha), Coherent(beta), 2, 2.3)
    for q in (-1, 0, 1, 3):
        amplitude = phase(q) * bessel_j(q, 2.3) * alpha + phase(q - 2) * bessel_j(q - 2, 2.3) * beta
        assert two_mode_mean(scn, q) == pytest.approx(abs(amplitude) ** 2, abs=1e-13)
        assert two_mode_gamma2(scn, q) == pytest.approx(0.0, abs=1e-13)
        assert two_mode_g2(scn, q) == pytest.approx(1.0, abs=1e-10)
        assert two_mode_squeezing(scn, q, 0.3) == pytest.approx(0.0, abs=1e-13)


@pytest.mark.parametrize("kappa_L", [0.5, 3.0, 7.0])
def test_photon_number_is_conserved(kappa_L):
    radius = recommend_window(kappa_L).q_max + 4
    scn = TwoModeScenario(Coherent(1.5), SqueezedVacuum(0.5, 0.7), 2, kappa_L, SidebandWindow.symmetric(radius))
    record = two_mode_record(scn, orders=[0, 2])
    assert record.scalars["conservation_defect"] <= 1e-10
    assert record.input_total == pytest.approx(2.25 + math.sinh(0.5) ** 2)


def test_best_squeezing_bounds_every_angle():
    scn = TwoModeScenario(SqueezedVacuum(0.9, 0.2), Thermal(0.3), -1, 1.1)
    phi, best = two_mode_best_squeezing(scn, 0)
    assert two_mode_squeezing(scn, 0, phi) == pytest.approx(best, abs=1e-12)
    for step in range(16):
        assert two_mode_squeezing(scn, 0, step * math.pi / 16) >= best - 1e-12


def test_record_marks_empty_sidebands():
    scn = TwoModeScenario(Fock(5), Vacuum(), 1, 0.0, SidebandWindow.symmetric(2))
    record = two_mode_record(scn, orders=[0, 1])
    assert record.sidebands[0]["g2"] == pytest.approx(0.8)
    assert math.isnan(record.sidebands[1]["g2"])
    assert math.isnan(record.sidebands[1]["normalized_squeezing"])
    with pytest.raises(UndefinedStatisticError):
        two_mode_g2(scn, 1)
    assert input_squeezing_factor(Fock(5), 0.0) == record.sidebands[0]["squeezing"]


def test_weak_sidebands_never_divide_by_zero():
    scn = TwoModeScenario(Fock(5), Thermal(1.0), 1, 0.01, SidebandWindow.symmetric(60))
    for q in range(-60, 61):
        try:
            g2 = two_mode_g2(scn, q)
        except UndefinedStatisticError:
            assert two_mode_mean(scn, q) ** 2 == 0.0
        else:
            assert math.isfinite(g2)
    with pytest.raises(UndefinedStatisticError):
        two_mode_g2(scn, 60)
    record = two_mode_record(scn, orders=[25, 60])
    assert math.isnan(record.sidebands[60]["g2"])


def test_scenario_validation():
    with pytest.raises(DomainError):
        TwoModeScenario(Fock(1), Fock(1), 0, 1.0)
    with pytest.raises(DomainError):
        TwoModeScenario(Fock(1), Fock(1), 4, 1.0, SidebandWindow.symmetric(3))
    with pytest.raises(DomainError):
        TwoModeScenario(Fock(1), Fock(1), 1, -1.0)
    scn = TwoModeScenario(Fock(1), Fock(1), 1, 1.0, SidebandWindow.symmetric(3))
    with pytest.raises(OrderRangeError):
        scn.coefficients(4)
    assert TwoModeScenario(Fock(1), Fock(1), 30, 1.0).window.q_max >= 30
