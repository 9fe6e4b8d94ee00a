"""
Bound reports: evaluate each bound curve at given parameters, set it
against the exactly computed quantity, and fit empirical exponents over
prime sweeps.

Bounds with a p^(o(1)) factor or an unspecified constant are report-only:
rows carry a ratio, never a pass/fail.
"""

import math
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
import pandas as pd
import scipy.stats as stats

from selfpower.common import EXPONENTS, DomainError, power, require
from selfpower.config import default_params
from selfpower.congruence import (count_J, count_Jd, count_power_congruence, count_Td, gcd_class_counts,
                                  order_decomposition, order_max_fiber, order_range_split, order_stratified_sum,
                                  range_split, xx_spectrum)
from selfpower.expsum import bound_curves, interval_l1_sum, lemma1_corollary, max_subgroup_sum
from selfpower.numtheory import subgroup_elements

QUANTITIES = ('J1', 'ORDER_SUM_T', 'MAX_FIBER_T', 'I', 'JD', 'TD', 'LEMMA1', 'EXPSUM_MAX', 'L1SUM')
THEOREMS = ('T1', 'T2', 'T3', 'LEMMA1', 'L1SUM', 'JD', 'TD', 'SPLIT', 'ORDER_SPLIT')


class BoundReportRow(NamedTuple):
    p: int
    quantity: str
    observed: float
    bound_name: str
    bound_value: float
    ratio: float
    in_hypothesis: bool
    t: Optional[int] = None
    d: Optional[int] = None
    n: Optional[int] = None
    M: Optional[int] = None
    k: Optional[int] = None
    mode: str = ''


class ExponentFit(NamedTuple):
    points: List[Tuple[int, float]]
    slope: float
    intercept: float
    r2: float
    excluded: int


def make_row(p, quantity, observed, bound_name, bound_value, in_hypothesis, **params):
    """
    Build a row, computing the ratio observed / bound_value.
    """
    assert quantity in QUANTITIES
    assert bound_value > 0, f"bound {bound_name} is not positive at p={p}"
    return BoundReportRow(
        p=p,
        quantity=quantity,
        observed=observed,
        bound_name=bound_name,
        bound_value=bound_value,
        ratio=observed / bound_value,
        in_hypothesis=bool(in_hypothesis),
        **params)


def _jd_rows(ctx, divisors):
    p = ctx.p
    rows = []
    for d in divisors:
        jd = count_Jd(ctx, d, algorithm='auto')
        shteinikov = bound_curves(p, d)['shteinikov']
        rows += [
            make_row(p, 'JD', jd, 'p/d', p / d, True, d=d),
            make_row(p, 'JD', jd, 'lemma1_corollary_k2', lemma1_corollary(p, d, 1, 2), True, d=d, k=2),
            make_row(p, 'JD', jd, 'shteinikov', shteinikov.value, shteinikov.in_range, d=d),
        ]
    return rows


def _td_rows(ctx, t, divisors):
    p = ctx.p
    rows = []
    for d in divisors:
        td = count_Td(ctx, d, t, algorithm='auto')
        shkredov = bound_curves(p, d * t)['shkredov']
        rows += [
            make_row(p, 'TD', td, 'p/d', p / d, True, t=t, d=d),
            make_row(p, 'TD', td, 'lemma1_corollary_k2', lemma1_corollary(p, d, t, 2), True, t=t, d=d, k=2),
            # Separating the zero frequency leaves t plus the subgroup-sum term.
            make_row(p, 'TD', td, 't+shkredov', t + shkredov.value, shkredov.in_range, t=t, d=d),
        ]
    return rows


def _order_split_rows(ctx, t, params):
    """
    sum_d T_d over d | (p-1)/t, split by the size of d, each part against
    the sum of the curve used for that range: p/d above p^(2/3), the k = 2
    power-congruence corollary between p^(1/3) and p^(2/3), and
    t + p^(1/6) (dt)^(1/2) below p^(1/3). Empty parts get no row.
    """
    p = ctx.p
    parts = order_range_split(order_decomposition(ctx, t, chunk=params['chunk_size']), p)
    curves = {
        'S1': ('sum p/d', lambda d: p / d, True, None),
        'S2': ('sum lemma1_corollary_k2', lambda d: lemma1_corollary(p, d, t, 2), True, 2),
        'S0': ('sum t+shkredov', lambda d: t + bound_curves(p, d * t)['shkredov'].value, t**3 < p, None),
    }
    rows = []
    for name in ('S1', 'S2', 'S0'):
        part = parts[name]
        if not part.divisors:
            continue
        label, curve, in_hypothesis, k = curves[name]
        rows.append(
            make_row(
                p, 'TD', part.total, f'{name}:{label}', sum(curve(d) for d in part.divisors), in_hypothesis, t=t,
                k=k))
    return rows


def theorem_report(ctx, which, t=None, d=None, n=None, M=None, lam=None, U=None, V=None, params=None):
    """
    Rows comparing an exactly computed quantity with every applicable bound
    curve.

    :param which: one of T1, T2 (needs t), T3, LEMMA1 (needs n, M, lam),
        L1SUM (needs U, V), JD (optionally d), TD (needs t, optionally d),
        SPLIT and ORDER_SPLIT (needs t).
    """
    params = default_params() if params is None else params
    p = ctx.p
    require(which in THEOREMS, f"Unknown report '{which}'")

    if which == 'T1':
        j1 = count_J(ctx, 1, chunk=params['chunk_size'])
        return [
            make_row(p, 'J1', j1, 'p^27/82', power(p, EXPONENTS['theorem1']), True),
            make_row(p, 'J1', j1, 'p^1/3', power(p, EXPONENTS['earlier_j1']), True),
        ]

    if which == 'T2':
        require(t is not None, "T2 needs t")
        ctx.check_divisor(t)
        total = order_stratified_sum(ctx, t, algorithm='via_x_scan', chunk=params['chunk_size'])
        curve = t + power(p, EXPONENTS['theorem2_p']) * power(t, EXPONENTS['theorem2_t'])
        return [
            make_row(p, 'ORDER_SUM_T', total, 't+p^1/3*t^1/2', curve, t**3 < p, t=t),
            make_row(p, 'ORDER_SUM_T', total, 't+p^1/2', bound_curves(p, t=t)['bbs_order_sum'].value, True, t=t),
            make_row(
                p, 'MAX_FIBER_T', order_max_fiber(ctx, t, chunk=params['chunk_size']), 'p*t^-1/12',
                bound_curves(p, t=t)['bbs_fiber'].value, True, t=t),
        ]

    if which == 'T3':
        spectrum = xx_spectrum(ctx, cap=params['cap_spectrum'], chunk=params['chunk_size'])
        return [make_row(p, 'I', spectrum.I, 'p^23/12', power(p, EXPONENTS['theorem3']), True)]

    if which == 'LEMMA1':
        require(None not in (n, M, lam), "LEMMA1 needs n, M and lambda")
        result = count_power_congruence(
            ctx, n, lam, M, ks=params['lemma1_ks'], subgroup_cap=params['cap_subgroup'], chunk=params['chunk_size'])
        return [
            make_row(p, 'LEMMA1', result.count, f'lemma1_k{k}', value, True, n=n, M=M, k=k)
            for k, value in result.curves.items()
        ]

    if which == 'L1SUM':
        require(None not in (U, V), "L1SUM needs U and V")
        l1 = interval_l1_sum(U, V, p)
        return [
            make_row(p, 'L1SUM', l1.value, 'p(1+ln p)', p * (1 + math.log(p)), True),
            make_row(p, 'L1SUM', l1.value, 'p', p, True),
        ]

    if which == 'JD':
        if d is not None:
            ctx.check_divisor(d)
        return _jd_rows(ctx, ctx.divisors if d is None else [d])

    if which == 'TD':
        require(t is not None, "TD needs t")
        ctx.check_divisor(t)
        m = ctx.n // t
        if d is not None:
            ctx.check_divisor(d, of=m)
        return _td_rows(ctx, t, [e for e in ctx.divisors if m % e == 0] if d is None else [d])

    if which == 'ORDER_SPLIT':
        require(t is not None, "ORDER_SPLIT needs t")
        ctx.check_divisor(t)
        return _order_split_rows(ctx, t, params)

    # SPLIT: the parts of sum_d J_d against the scale p^(2/7) each is shown
    # to be below.
    parts = range_split(gcd_class_counts(ctx, chunk=params['chunk_size']), p)
    scale = power(p, EXPONENTS['split_scale'])
    return [make_row(p, 'JD', parts[name], f'{name}:p^2/7', scale, True) for name in ('R1', 'R2', 'R3')]


def expsum_report(ctx, d, mode='exhaustive', params=None, threads=1):
    """
    The maximal subgroup sum for H_d against the classical, Shteinikov and
    Shkredov curves.
    """
    params = default_params() if params is None else params
    ctx.check_divisor(d)
    H = subgroup_elements(d, ctx, cap=params['cap_subgroup'])
    stat = max_subgroup_sum(
        H, ctx, mode=mode, sample=params['sample_a'], seed=params['seed'], work_cap=params['cap_expsum_work'],
        threads=threads)
    mode_note = 'exhaustive' if stat.exact else f'sampled({stat.sample_size})'
    curves = bound_curves(ctx.p, d)
    return [
        make_row(
            ctx.p, 'EXPSUM_MAX', stat.max_magnitude, name, curves[name].value, curves[name].in_range, d=d,
            mode=mode_note) for name in ('classical', 'shteinikov', 'shkredov')
    ]


def exponent_fit(points):
    """
    Least squares slope of log(value) against log(p).

    Points with value 0 are left out and counted in `excluded`.
    """
    points = [(int(p), float(v)) for p, v in points]
    require(all(v >= 0 for _, v in points), "values must be nonnegative")
    primes = [p for p, _ in points]
    require(len(set(primes)) == len(primes), "points must have distinct p")
    usable = [(p, v) for p, v in points if v > 0]
    if len(usable) < 2:
        raise DomainError(f"need at least 2 points with positive value, got {len(usable)}")

    x = np.log([p for p, _ in usable])
    y = np.log([v for _, v in usable])
    fit = stats.linregress(x, y)
    # linregress reports r = 0 for a constant series, which is fitted exactly.
    r2 = 1.0 if np.ptp(y) == 0 else float(fit.rvalue**2)
    return ExponentFit(
        points=usable, slope=float(fit.slope), intercept=float(fit.intercept), r2=r2,
        excluded=len(points) - len(usable))


def rows_to_frame(rows):
    """
    BoundReportRows as a data frame with the row fields as columns.
    """
    return pd.DataFrame(list(rows), columns=BoundReportRow._fields)
