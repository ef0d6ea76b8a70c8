import math

import pytest

from sphdesign.dimfilter import (
    C_DENSITY,
    count_valid_m,
    euler_product_constant,
    excluded_dims,
    thm37_filter,
)
from sphdesign.errors import BudgetExceeded

# frozen by the independent pre-build enumeration oracle
ORACLE_F_1E5 = {"thm38": 9234, "thm37": 13833}
ORACLE_F_1E3 = {"thm38": 97, "thm37": 141}


def test_m5_applies():
    v = thm37_filter(5)
    assert v.applies and v.d == 119


def test_m11_applies():
    v = thm37_filter(11)
    assert v.applies and v.d == 527


def test_m7_rejected_by_mod8():
    v = thm37_filter(7)
    assert not v.applies
    assert not v.conditions["mod8"][0]  # m + 1 = 8


def test_m9_rejected_by_odd_square():
    v = thm37_filter(9)
    assert not v.applies
    assert not v.conditions["oddsquarefree"][0]  # 90 = 3^2 * 10


def test_m1_not_excluded():
    v = thm37_filter(1)
    assert not v.applies
    assert not v.conditions["mod3"][0]  # 1 = 1 mod 3; d = 7 admits the property


def test_m3_odd_square_free_but_not_square_free():
    v = thm37_filter(3)
    assert v.applies  # 12 = 2^2 * 3 has no odd prime square
    r38 = count_valid_m(10, "thm38")
    r37 = count_valid_m(10, "thm37")
    assert r37.f_x - r38.f_x >= 1  # m = 3 counted only under thm37


def test_excluded_dims_to_14():
    flagged = excluded_dims(14)
    assert [v.m for v in flagged] == [3, 5, 11]
    assert [v.d for v in flagged] == [47, 119, 527]


def test_excluded_dims_to_30():
    ms = [v.m for v in excluded_dims(30)]
    assert 21 in ms and 29 in ms
    assert thm37_filter(21).d == 1847


def test_applies_consistent_with_excluded():
    flagged = {v.m for v in excluded_dims(40)}
    for m in range(1, 41):
        assert (m in flagged) == thm37_filter(m).applies


def test_norm_integrality_matches_mod3():
    # <alpha,alpha> = (2m+1)/3 is an integer exactly when m = 1 mod 3
    for m in range(1, 200):
        assert ((2 * m + 1) % 3 == 0) == (m % 3 == 1)


def test_counts_match_oracle():
    for variant, expect in ORACLE_F_1E5.items():
        assert count_valid_m(100000, variant).f_x == expect
    for variant, expect in ORACLE_F_1E3.items():
        assert count_valid_m(1000, variant).f_x == expect


def test_count_against_bruteforce():
    def squarefree(n):
        i = 2
        while i * i <= n:
            if n % (i * i) == 0:
                return False
            i += 1
        return True

    def odd_squarefree(n):
        while n % 2 == 0:
            n //= 2
        return squarefree(n)

    for variant, cond in (("thm38", squarefree), ("thm37", odd_squarefree)):
        direct = sum(
            1
            for m in range(1, 501)
            if m % 2 and m % 3 != 1 and (m + 1) % 8 and cond(m * (m + 1))
        )
        assert count_valid_m(500, variant).f_x == direct


def test_count_monotone_and_variant_order():
    prev = 0
    for x in (100, 400, 1600, 6400):
        f38 = count_valid_m(x, "thm38").f_x
        f37 = count_valid_m(x, "thm37").f_x
        assert f38 >= prev
        assert f37 >= f38
        prev = f38


def test_density_exceeds_lower_bound_scale():
    # the (C/24) x scale is a proved lower bound; enumeration sits above it
    report = count_valid_m(100000, "thm38")
    assert report.f_x >= 0.85 * float(report.predicted)
    assert report.relative_gap.startswith("+")


def test_budget():
    with pytest.raises(BudgetExceeded):
        count_valid_m(10**7 + 1)


def test_euler_product_matches_hardcoded_constant():
    c = euler_product_constant(10**6)
    assert abs(c - float(C_DENSITY)) < 1e-5
    # truncation stability: the tail beyond 10^6 is below 2/(p ln p) ~ 2e-7
    c2 = euler_product_constant(2 * 10**6)
    assert abs(c - c2) < 2e-7
