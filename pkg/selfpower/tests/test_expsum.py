import cmath
import math

import numpy as np
import pytest

import selfpower.expsum as expsum
from selfpower.common import CapExceededError, DomainError
from selfpower.numtheory import make_context, subgroup_elements


def direct_sum(a, H, p):
    return sum(cmath.exp(2j * math.pi * a * h / p) for h in H.elements.tolist())


def test_subgroup_sum():
    ctx = make_context(7)
    H3 = subgroup_elements(3, ctx)
    s = expsum.subgroup_sum(1, H3, 7)
    # A Gauss period: (-1 + i sqrt(7)) / 2.
    assert s.re == pytest.approx(-0.5)
    assert s.im == pytest.approx(math.sqrt(7) / 2)
    assert s.magnitude == pytest.approx(math.sqrt(2))
    # The complete sum over F_7^*.
    assert expsum.subgroup_sum(2, subgroup_elements(6, ctx), 7).re == pytest.approx(-1)
    assert expsum.subgroup_sum(0, H3, 7).re == 3
    with pytest.raises(DomainError):
        expsum.subgroup_sum(7, H3, 7)


def test_subgroup_sums_agree_with_direct():
    ctx = make_context(101)
    for d in [4, 5, 20, 100]:
        H = subgroup_elements(d, ctx)
        frequencies = np.arange(0, 101)
        re, im = expsum.subgroup_sums(H, 101, frequencies)
        for a in frequencies.tolist():
            z = direct_sum(a, H, 101)
            assert abs(complex(re[a], im[a]) - z) < 1e-10


def test_max_subgroup_sum():
    ctx = make_context(7)
    stat = expsum.max_subgroup_sum(subgroup_elements(3, ctx), ctx)
    assert stat.max_magnitude == pytest.approx(math.sqrt(2))
    # Every frequency ties, so the smallest wins.
    assert stat.a_max == 1
    assert stat.exact
    stat = expsum.max_subgroup_sum(subgroup_elements(2, ctx), ctx)
    assert stat.max_magnitude == pytest.approx(2 * math.cos(math.pi / 7))
    assert stat.a_max == 3
    stat = expsum.max_subgroup_sum(subgroup_elements(6, ctx), ctx)
    assert stat.max_magnitude == pytest.approx(1)
    assert stat.curve_classical == pytest.approx(math.sqrt(7))
    assert expsum.max_subgroup_sum(subgroup_elements(1, ctx), ctx).max_magnitude == pytest.approx(1)


def test_max_subgroup_sum_modes():
    ctx = make_context(10007)
    H = subgroup_elements(2, ctx)
    with pytest.raises(CapExceededError, match="--cap-expsum-work"):
        expsum.max_subgroup_sum(H, ctx, work_cap=1000)
    sampled = expsum.max_subgroup_sum(H, ctx, mode='sampled', sample=50, seed=3)
    assert not sampled.exact
    assert 1000 <= sampled.sample_size <= 1050
    exhaustive = expsum.max_subgroup_sum(H, ctx)
    assert sampled.max_magnitude <= exhaustive.max_magnitude + 1e-12
    # Same answer however many workers scan the frequencies.
    threaded = expsum.max_subgroup_sum(H, ctx, threads=2)
    assert (threaded.a_max, threaded.max_magnitude) == (exhaustive.a_max, exhaustive.max_magnitude)


def test_gauss_bound_and_parseval():
    for p in [3, 5, 7, 11, 13, 31, 101, 211]:
        ctx = make_context(p)
        for d in ctx.divisors:
            H = subgroup_elements(d, ctx)
            assert expsum.max_subgroup_sum(H, ctx).max_magnitude <= math.sqrt(p) + 1e-6
            assert abs(expsum.parseval_total(H, ctx) - p * d) <= 1e-9 * p * d


def test_interval_l1_sum():
    l1 = expsum.interval_l1_sum(1, 3, 7)
    direct = sum(abs(sum(cmath.exp(2j * math.pi * a * z / 7) for z in range(1, 4))) for a in range(1, 7))
    assert l1.value == pytest.approx(direct, abs=1e-9)
    assert l1.value == pytest.approx(7.20775, abs=1e-5)
    assert l1.ratio_p == pytest.approx(l1.value / 7)
    assert l1.ratio_log_bound == pytest.approx(l1.value / (7 * (1 + math.log(7))))
    # One term: |e_p(a U)| = 1 for every a.
    assert expsum.interval_l1_sum(5, 5, 7).value == pytest.approx(6)
    # A whole period sums to zero.
    assert expsum.interval_l1_sum(0, 6, 7).value == pytest.approx(0)
    rng = np.random.default_rng(0)
    for p in [101, 1009]:
        for U in rng.integers(0, 10**6, 10).tolist():
            V = U + int(rng.integers(0, 3 * p))
            assert expsum.interval_l1_sum(U, V, p).value <= p * (1 + math.log(p))
    with pytest.raises(DomainError):
        expsum.interval_l1_sum(3, 1, 7)



def test_interval_sums():
    p = 101
    frequencies = np.array([0, 1, 50, 100, 101, 237])
    for U, V in [(0, 0), (1, 7), (3, 250), (90, 100)]:
        sums = expsum.interval_sums(frequencies, U, V, p)
        for b, s in zip(frequencies.tolist(), sums.tolist()):
            direct = sum(cmath.exp(2j * math.pi * (b * z % p) / p) for z in range(U, V + 1))
            assert abs(s - direct) <= 1e-9
    assert expsum.interval_sums([0, 3], 1, 7, 7).tolist() == pytest.approx([7, 0])
    with pytest.raises(DomainError):
        expsum.interval_sums([1], 5, 4, 7)


def test_dilated_interval_count():
    for p in [7, 31, 101]:
        ctx = make_context(p)
        for e in ctx.divisors:
            H = subgroup_elements(e, ctx)
            members = set(H.elements.tolist())
            for d in [1, 2, 3, 5]:
                upper = ctx.n // d
                expected = sum(d * z % p in members for z in range(1, upper + 1))
                assert expsum.dilated_interval_count(H, ctx, d, upper) == pytest.approx(expected, abs=1e-9)
    ctx = make_context(101)
    with pytest.raises(CapExceededError, match="--cap-expsum-work"):
        expsum.dilated_interval_count(subgroup_elements(100, ctx), ctx, 1, 100, work_cap=10**4)

def test_bound_curves():
    curves = expsum.bound_curves(101, d=10)
    assert curves['classical'].value == pytest.approx(math.sqrt(101))
    assert curves['shteinikov'].value == pytest.approx(101**(1 / 18) * 10**(101 / 126))
    assert curves['shkredov'].value == pytest.approx(101**(1 / 6) * 10**0.5)
    # 10^2 < 101 and 10^3 < 101^2.
    assert curves['shteinikov'].in_range
    assert curves['shkredov'].in_range
    # Boundary cases around d = p^(1/2) and d = p^(2/3).
    assert not expsum.bound_curves(100, d=10)['shteinikov'].in_range
    assert expsum.bound_curves(101, d=21)['shkredov'].in_range
    assert not expsum.bound_curves(101, d=22)['shkredov'].in_range
    curves = expsum.bound_curves(101, t=4)
    assert 'shteinikov' not in curves
    assert curves['bbs_order_sum'].value == pytest.approx(4 + math.sqrt(101))
    assert curves['bbs_fiber'].value == pytest.approx(101 * 4**(-1 / 12))


def test_lemma1_curves():
    assert expsum.lemma1_curve(49, 4, 7, 2) == pytest.approx(4)
    assert expsum.lemma1_corollary(100, 4, 1, 2) == pytest.approx(2 + 5)
