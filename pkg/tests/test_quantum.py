import math

import pytest
from hypothesis import given, strategies as st

from wvamp import fock_oracle
from wvamp.errors import DegeneratePostSelection, DomainError
from wvamp.quantum import (BSMode, FirstOrderWarning, InterferometerParams, arm2_weak_value_fock,
                           bs_coefficients, first_order_valid, is_anomalous, mean_photons_arm1,
                           quantum_shift, quantum_shift_exact, weak_value_coherent, weak_value_fock)

SQ2 = math.sqrt(2)
deltas = st.floats(min_value=1e-3, max_value=1.0)
small_deltas = st.floats(min_value=1e-3, max_value=0.2)


def test_first_order_coefficients():
    t, r = bs_coefficients(0.1, BSMode.FIRST_ORDER)
    assert t == 1.1 / SQ2
    assert r == 0.9 / SQ2


def test_exact_unitary_at_full_imbalance():
    t, r = bs_coefficients(1.0, BSMode.EXACT_UNITARY)
    assert t == pytest.approx(1 / SQ2, abs=1e-15)
    assert r == pytest.approx(-1 / SQ2, abs=1e-15)


def test_exact_unitary_small_delta():
    t, r = bs_coefficients(0.05, "exact")
    assert t == pytest.approx((SQ2 * 0.05 + math.sqrt(2 - 2 * 0.0025)) / 2, rel=1e-15)
    assert t * t + r * r == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("delta", [0.0, -0.1, 1.5, float("nan")])
def test_bs_coefficients_domain(delta):
    with pytest.raises(DomainError):
        bs_coefficients(delta)


@given(deltas, st.sampled_from(list(BSMode)))
def test_difference_is_sqrt2_delta(delta, mode):
    t, r = bs_coefficients(delta, mode)
    assert abs((t - r) - SQ2 * delta) < 1e-12
    if mode is BSMode.EXACT_UNITARY:
        assert abs(t * t + r * r - 1) < 1e-12
        assert t >= abs(r) - 1e-15


def test_params_carry_coefficients():
    p = InterferometerParams(0.1, "first_order")
    assert (p.t, p.r) == bs_coefficients(0.1)
    with pytest.raises(DomainError):
        InterferometerParams(0.1, eta=1.5)


def test_weak_value_fock_values(quiet_first_order):
    assert weak_value_fock(0.1) == pytest.approx(5.5, abs=1e-12)
    assert weak_value_fock(0.5) == 1.5
    assert weak_value_fock(1.0) == 1.0


def test_weak_value_fock_matches_single_photon_oracle(quiet_first_order):
    for d in (0.1, 0.5):
        t, r = bs_coefficients(d)
        oracle = fock_oracle.weak_value_single_photon(d, BSMode.FIRST_ORDER)
        assert oracle == pytest.approx(t / (t - r), rel=1e-12)
        assert weak_value_fock(d) == pytest.approx(oracle, rel=1e-12)


def test_validity_flag_is_raised_outside_first_order():
    with pytest.warns(FirstOrderWarning):
        quantum_shift(1.0)
    assert first_order_valid(0.2)
    assert not first_order_valid(0.21)


def test_weak_value_coherent(quiet_first_order):
    assert weak_value_coherent(3, 0.1) == pytest.approx(10.0, abs=1e-12)
    assert weak_value_coherent(1, 0.5) == pytest.approx(2.0, abs=1e-12)
    # small-alpha limit reduces to the single-photon value
    assert weak_value_coherent(1e-9, 0.1) == pytest.approx(weak_value_fock(0.1), abs=1e-12)
    with pytest.raises(DegeneratePostSelection):
        weak_value_coherent(0.0, 0.1)


@pytest.mark.parametrize("alpha,delta,expected", [(3, 0.1, 10.0), (1, 0.5, 2.0)])
def test_weak_value_coherent_against_fock_oracle(alpha, delta, expected, quiet_first_order):
    oracle = fock_oracle.weak_value_exact(alpha, delta, BSMode.FIRST_ORDER, cutoff=40)
    assert oracle == pytest.approx(expected, abs=1e-6)
    assert weak_value_coherent(alpha, delta) == pytest.approx(oracle, abs=1e-6)


def test_mean_photons():
    assert mean_photons_arm1(0) == 0
    assert mean_photons_arm1(math.sqrt(2)) == pytest.approx(1.0, abs=1e-15)
    assert mean_photons_arm1(10) == 50


def test_quantum_shift_values(quiet_first_order):
    assert quantum_shift(0.1) == pytest.approx(5.5, abs=1e-12)
    assert quantum_shift(0.5) == pytest.approx(1.5)
    assert quantum_shift(1.0) == 1.0
    # the correct all-orders value at full imbalance is the base shift
    assert quantum_shift_exact(1.0) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(DomainError):
        quantum_shift(0.0)


def test_arm2_weak_value(quiet_first_order):
    assert arm2_weak_value_fock(0.1) == pytest.approx(-4.5, abs=1e-12)
    assert arm2_weak_value_fock(1.0) == 0.0
    assert arm2_weak_value_fock(1 / 3) == pytest.approx(-1.0, abs=1e-12)
    oracle = fock_oracle.weak_value_single_photon(0.1, BSMode.FIRST_ORDER, arm=2)
    assert arm2_weak_value_fock(0.1) == pytest.approx(oracle, abs=1e-12)


def test_is_anomalous_examples():
    assert is_anomalous(0.0, 0.1)
    assert not is_anomalous(10, 0.1)
    assert is_anomalous(3, 0.1)  # 10 <= 10, boundary inclusive


@given(st.floats(min_value=1e-3, max_value=30.0), small_deltas)
def test_coherent_minus_mean_is_shift(alpha, delta):
    diff = weak_value_coherent(alpha, delta) - mean_photons_arm1(alpha)
    assert diff == pytest.approx(quantum_shift(delta), rel=1e-12, abs=1e-9 * alpha * alpha)


@given(small_deltas)
def test_arm_sum_rule(delta):
    assert arm2_weak_value_fock(delta) + weak_value_fock(delta) == pytest.approx(1.0, abs=1e-12 / delta)


@given(st.floats(min_value=1e-3, max_value=0.999))
def test_shift_above_base_shift(delta):
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FirstOrderWarning)
        assert quantum_shift(delta) > 0.5


@given(small_deltas)
def test_anomalous_flips_at_boundary(delta):
    edge = 1 / delta - 1
    assert is_anomalous(math.sqrt(edge * (1 - 1e-9)), delta)
    assert not is_anomalous(math.sqrt(edge * (1 + 1e-9) + 1e-12), delta)
