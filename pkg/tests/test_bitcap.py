import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from bdmqam.bitcap import (BitCapacities, all_bit_capacities, bit_capacity, capacity_table,
                           mc_bit_capacities, mc_bit_capacity, subchannel_capacity)
from bdmqam.constellation import build_constellation

U = build_constellation(1)
THR_90 = 10.293138569468283  # 90 % coverage threshold of the default cell

# Monte Carlo oracle, full 2-D constellation, 1e7 draws, seed 20240601
MC_10DB = np.array([0.86073988, 0.86034699, 0.72125699, 0.72158713])
MC_10DB_SE = np.array([0.0001697, 0.00017011, 0.00023128, 0.00023113])
MC_90 = np.array([0.87194632, 0.8715687, 0.74360432, 0.74391926])
MC_90_SE = np.array([0.00016463, 0.00016505, 0.00022541, 0.00022527])


@pytest.mark.parametrize("i", [1, 2, 3, 4])
def test_limits(i):
    assert bit_capacity(U, -40, i) <= 0.01
    assert bit_capacity(U, 40, i) >= 0.999


def test_totals_at_limits():
    assert abs(all_bit_capacities(U, 40).total - 4.0) <= 0.005
    assert all_bit_capacities(U, -40).total <= 0.04


@pytest.mark.parametrize("i", [1, 3])
def test_against_frozen_oracle_10db(i):
    assert abs(bit_capacity(U, 10.0, i) - MC_10DB[i - 1]) <= 3 * MC_10DB_SE[i - 1]


def test_total_against_frozen_oracle_90():
    caps = all_bit_capacities(U, THR_90)
    for i in range(4):
        assert abs(caps.c[i] - MC_90[i]) <= 3 * MC_90_SE[i]
    # std of a sum of correlated estimates is at most the sum of stds
    assert abs(caps.total - MC_90.sum()) <= 3 * MC_90_SE.sum()


@pytest.mark.parametrize("snr", [5, 10, 15])
def test_alpha_two_vs_one(snr):
    c1 = all_bit_capacities(U, snr)
    c2 = all_bit_capacities(build_constellation(2), snr)
    assert c2[1] > c1[1]
    assert c2[3] < c1[3]


def test_symmetry_and_bounds_grid():
    grid = np.arange(-10, 30.01, 0.5)
    for alpha in (0, 0.5, 1, 2, 5, 15):
        tab = np.array([capacity_table([alpha], s)[0] for s in grid])
        assert np.all(tab >= 0) and np.all(tab <= 1)
        np.testing.assert_allclose(tab[:, 0], tab[:, 1], atol=1e-9)
        np.testing.assert_allclose(tab[:, 2], tab[:, 3], atol=1e-9)
        assert np.all(np.diff(tab, axis=0) >= -1e-12)
        if alpha >= 1:
            assert np.all(tab[:, 0] >= tab[:, 2] - 1e-12)


@pytest.mark.parametrize("snr", [5, 10, 15])
def test_alpha_trend(snr):
    tab = capacity_table([0.5, 1, 2, 4], snr)
    assert np.all(np.diff(tab[:, 0]) >= 0)
    assert np.all(np.diff(tab[:, 2]) <= 0)


def test_quadrature_converged_at_hardest_point():
    c = build_constellation(15)
    a = all_bit_capacities(c, 30, nodes=64).as_array()
    b = all_bit_capacities(c, 30, nodes=128).as_array()
    assert np.max(np.abs(a - b)) < 1e-6


def test_table_matches_scalar():
    tab = capacity_table([0, 1, 3.3], 7.0)
    for row, a in zip(tab, [0, 1, 3.3]):
        np.testing.assert_allclose(row, all_bit_capacities(build_constellation(a), 7.0).as_array(),
                                   rtol=0, atol=1e-14)


def test_errors():
    with pytest.raises(ValueError):
        bit_capacity(U, 10, 0)
    with pytest.raises(ValueError):
        bit_capacity(U, float("nan"), 1)
    with pytest.raises(ValueError):
        mc_bit_capacity(U, 10, 1, 0, 1)


def test_subchannel():
    caps = BitCapacities((0.9, 0.8, 0.6, 0.5))
    assert subchannel_capacity(caps, (0, 1 / 3, 1, 1)) == pytest.approx(0.8 / 3 + 0.6 + 0.5)
    assert subchannel_capacity(caps, (1, 1, 1, 1)) == pytest.approx(caps.total)
    assert subchannel_capacity(caps, (0, 0, 0, 0)) == 0
    with pytest.raises(ValueError):
        subchannel_capacity(caps, (0, 0, 1.2, 0))


def test_mc_seeded():
    a = mc_bit_capacity(U, 8, 3, 20_000, 7)
    b = mc_bit_capacity(U, 8, 3, 20_000, 7)
    assert a == b


def test_mc_error_scaling():
    _, se1 = mc_bit_capacities(U, 8, 100_000, 3)
    _, se4 = mc_bit_capacities(U, 8, 400_000, 4)
    assert np.all(np.abs(se1 / se4 - 2) <= 0.4)


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 15), st.floats(-5, 20), st.integers(1, 4), st.integers(0, 2**31))
def test_mc_agrees_with_quadrature(alpha, snr, i, seed):
    c = build_constellation(alpha)
    q = bit_capacity(c, snr, i)
    # bit errors too rare for 2e5 draws make the sample std error meaningless
    assume(1 - q > 1e-4)
    est, se = mc_bit_capacity(c, snr, i, 200_000, seed)
    # 4 sigma keeps random-seed false alarms negligible over many runs
    assert abs(q - est) <= 4 * se + 1e-6


def test_alpha_zero_saturates_at_three_bits():
    # coincident inner points leave the sign bit a coin flip half the time
    caps = all_bit_capacities(build_constellation(0), 60)
    np.testing.assert_allclose(caps.as_array(), [0.5, 0.5, 1.0, 1.0], atol=1e-9)
