import io
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coexsim.errors import ParameterError, PreconditionError, WindowError
from coexsim.percolation import (OrientedSiteField, advance_frontier, dependence_estimator, exact_survival,
                                 frontier_batch, frontiers, read_field, sample_iid_bits, sample_iid_field,
                                 survival_curve, theorem32_bound, write_field)

CONE = [(x, n) for n in (1, 2, 3) for x in range(-n, n + 1, 2)]


def enumerate_survival(p, n_max=3):
    """Sum over every open/closed pattern of the 9 light-cone sites."""
    width = n_max + 1
    ne = [Fraction(0)] * (n_max + 1)
    org = [Fraction(0)] * (n_max + 1)
    for pattern in itertools.product((0, 1), repeat=len(CONE)):
        bits = np.zeros((n_max + 1, 2 * width + 1), np.uint8)
        for (x, n), b in zip(CONE, pattern):
            bits[n, x + width] = b
        k = sum(pattern)
        w = p ** k * (1 - p) ** (len(CONE) - k)
        for n, W in enumerate(frontiers(OrientedSiteField(bits, width))):
            if W.sites:
                ne[n] += w
            if 0 in W.sites:
                org[n] += w
    return ne, org


# ---- sampling

def test_extreme_thetas():
    assert np.array_equal(sample_iid_field(0.0, 4, 5, 1).bits, OrientedSiteField.all_open(4, 5).bits)
    assert not sample_iid_field(1.0, 4, 5, 1).bits.any()


def test_closed_fraction_binomial():
    bits = sample_iid_bits(0.3, 1000, 1000, 1, seed=2)[0]
    from coexsim.percolation import lattice_mask
    mask = lattice_mask(1000, 1000)
    sites = int(mask.sum())
    closed = sites - int(bits.sum())
    assert sites >= 10**6
    p = closed / sites
    assert abs(p - 0.3) <= 3 * math.sqrt(0.3 * 0.7 / sites)


def test_common_random_numbers_are_monotone():
    a = sample_iid_bits(0.2, 10, 12, 50, seed=3)
    b = sample_iid_bits(0.4, 10, 12, 50, seed=3)
    assert np.all(b <= a)


def test_non_lattice_sites_stay_zero():
    bits = sample_iid_bits(0.0, 5, 6, 3, seed=1)
    x = np.arange(-6, 7)
    for n in range(6):
        assert not bits[:, n, (x + n) % 2 == 1].any()


# ---- frontiers

def test_open_field_spreads():
    assert advance_frontier({0}, OrientedSiteField.all_open(2, 3), 0).sites == {-1, 1}


def test_closed_field_dies():
    assert not advance_frontier({0}, OrientedSiteField.all_closed(2, 3), 0)


def test_frontier_leaving_window():
    with pytest.raises(WindowError):
        advance_frontier({2}, OrientedSiteField.all_open(2, 2), 0)


def test_non_lattice_start_rejected():
    with pytest.raises(ParameterError):
        advance_frontier({1}, OrientedSiteField.all_open(2, 3), 0)


@given(seed=st.integers(0, 2**31), theta=st.floats(0, 1))
def test_batch_matches_set_recursion(seed, theta):
    bits = sample_iid_bits(theta, 6, 8, 4, seed)
    x = np.arange(-8, 9)
    reach = frontier_batch(bits, 8, x == 0)
    for r in range(4):
        for n, W in enumerate(frontiers(OrientedSiteField(bits[r], 8))):
            assert set(x[reach[r, n]].tolist()) == set(W.sites)


def test_first_level_survival_formula():
    for p in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
        assert exact_survival(p, 1)[0][1] == 1 - (1 - p) ** 2


def test_recursion_agrees_with_enumeration():
    for p in (Fraction(1, 4), Fraction(1, 2), Fraction(2, 3)):
        ne, org = exact_survival(p, 3)
        ne2, org2 = enumerate_survival(p)
        assert ne == ne2 and org == org2


def test_half_density_values():
    ne, org = exact_survival(Fraction(1, 2), 3)
    assert ne == [1, Fraction(3, 4), Fraction(19, 32), Fraction(123, 256)]
    assert org == [1, 0, Fraction(3, 8), 0]


def test_monte_carlo_first_level():
    rows = survival_curve([0.5], 1, 3, 100000, seed=4)
    r1 = [r for r in rows if r["n"] == 1][0]
    assert abs(r1["nonempty"] - 0.75) <= 3 * r1["nonempty_se"]


def test_zero_theta_full_survival():
    for r in survival_curve([0.0], 6, 8, 50, seed=5):
        assert r["nonempty"] == 1.0
        if r["n"] % 2 == 0:
            assert r["origin"] == 1.0


def test_low_theta_origin_occupied():
    rows = survival_curve([0.01], 40, 42, 10000, seed=6)
    last = [r for r in rows if r["n"] == 40][0]
    assert last["origin"] > 0.9


def test_survival_nonincreasing_in_theta():
    rows = survival_curve([0.1, 0.3, 0.5], 10, 12, 2000, seed=7)
    at10 = [r["nonempty"] for r in rows if r["n"] == 10]
    assert at10 == sorted(at10, reverse=True)


# ---- bound arithmetic

def test_bound_at_threshold():
    theta = 6.0 ** (-100)
    ok, bound = theorem32_bound(theta, 1)
    assert ok
    assert bound == pytest.approx(55 / 1296, rel=1e-12)
    assert bound <= 0.05


def test_bound_in_log_space_for_underflowing_theta():
    k = 9 ** 2
    ok, bound = theorem32_bound(None, 2, log_theta=-4 * k * math.log(6.0))
    assert ok and bound == pytest.approx(55 / 1296, rel=1e-12)


def test_zero_theta_bound():
    assert theorem32_bound(0.0, 3) == (True, 0.0)


def test_above_threshold_not_admissible():
    ok, _ = theorem32_bound(None, 1, log_theta=-80 * math.log(6.0))
    assert not ok


# ---- dependence estimator

def test_iid_ratios_near_one():
    theta = 0.4
    bits = sample_iid_bits(theta, 30, 30, 20000, seed=8)
    tuples = [[(0, 0)], [(0, 0), (6, 0)], [(-6, 10), (0, 10), (6, 10)], [(1, 1), (1, 7)]]
    rep = dependence_estimator(bits, 2, tuples, theta=theta)
    assert np.all(np.abs(rep.ratios - 1) <= 3 * rep.stderrs)
    assert np.all(rep.upper >= rep.ratios)


def test_close_sites_rejected():
    bits = sample_iid_bits(0.4, 4, 6, 10, seed=0)
    with pytest.raises(PreconditionError):
        dependence_estimator(bits, 2, [[(0, 0), (4, 0)]], theta=0.4)


def test_estimator_accepts_field_list():
    flds = [sample_iid_field(0.5, 2, 3, seed=s) for s in range(200)]
    rep = dependence_estimator(flds, 1, [[(0, 0)]])
    assert rep.samples == 200


# ---- file format

def test_field_round_trip():
    fld = sample_iid_field(0.3, 7, 5, seed=9)
    buf = io.StringIO()
    write_field(buf, fld)
    back = read_field(io.StringIO(buf.getvalue()))
    np.testing.assert_array_equal(back.bits, fld.bits)
    assert back.dependence == fld.dependence and back.width == 5


def test_dependent_tag_round_trip(tmp_path):
    fld = OrientedSiteField(sample_iid_field(0.3, 3, 4, seed=1).bits, 4, ("dependent", 3, 0.25))
    path = tmp_path / "f.txt"
    write_field(path, fld)
    assert read_field(path).dependence == ("dependent", 3, 0.25)


def test_bad_header_rejected():
    with pytest.raises(ParameterError):
        read_field(io.StringIO("nope\n"))
