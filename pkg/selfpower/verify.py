"""
The invariant suites behind `selfpower verify`.

Every suite checks exact identities or unconditional inequalities, never a
bound with a hidden constant. A suite returns how many comparisons it made
and the list of those that failed, each as (p, key, expected, got).

The `quick` level keeps every suite to primes of a few hundred; `full` runs
at the scales we quote in the README.
"""

import cmath
import math
from typing import List, NamedTuple, Tuple

import numpy as np

from selfpower.common import DomainError
from selfpower.congruence import (count_J, count_Jd, count_power_congruence, count_Td, gcd_class_counts,
                                  order_decomposition, order_stratified_sum, pairwise_I, xx_spectrum)
from selfpower.expsum import dilated_interval_count, interval_l1_sum, max_subgroup_sum, parseval_total, subgroup_sum
from selfpower.modmath import inv_mod, naive_pow, pow_mod, pow_mod_array
from selfpower.numtheory import (coset_representatives, discrete_log, make_context, multiplicative_order,
                                 multiplicative_orders, primes_in_range, subgroup_elements)
from selfpower.reports import exponent_fit, theorem_report

FAULTS = ('jd-range',)

# Per-suite prime limits.
LEVELS = {
    'quick': dict(
        modmath=200,
        structure=500,
        exhaustive_order=500,
        root_scan=500,
        dlog_large=20,
        lemma6=60,
        spectrum=500,
        pairwise=300,
        decomposition=500,
        decomposition_sample=0,
        order=300,
        dual=300,
        fourier=60,
        gauss=200,
        l1=300,
        l1_pairs=10,
        lemma1=60,
        lemma1_n=12),
    'full': dict(
        modmath=2000,
        structure=10**4,
        exhaustive_order=500,
        root_scan=2000,
        dlog_large=1000,
        lemma6=300,
        spectrum=10**5,
        pairwise=500,
        decomposition=2000,
        decomposition_sample=200,
        order=10**4,
        dual=10**4,
        fourier=500,
        gauss=2000,
        l1=10**4,
        l1_pairs=100,
        lemma1=300,
        lemma1_n=50),
}

DECOMPOSITION_SAMPLE_MAX = 10**5
# 998244353 - 1 = 2^23 * 7 * 17 is smooth; 10^9 + 7 - 1 = 2 * 500000003 is not.
DLOG_LARGE_PRIMES = (998244353, 999999937, 1000000007)
FOURIER_TOLERANCE = 1e-6
GAUSS_TOLERANCE = 1e-6
PARSEVAL_TOLERANCE = 1e-9
SYMMETRY_TOLERANCE = 1e-9


class SuiteResult(NamedTuple):
    name: str
    checked: int
    violations: List[Tuple]


class Tally:
    """
    Accumulates comparisons for one suite.
    """

    def __init__(self):
        self.checked = 0
        self.violations = []

    def check(self, ok, p, key, expected, got):
        self.checked += 1
        if not ok:
            self.violations.append((p, key, expected, got))

    def equal(self, p, key, expected, got):
        self.check(expected == got, p, key, expected, got)


def primes_up_to(limit):
    return [int(p) for p in primes_in_range(3, limit)]


def decomposition_primes(scale, rng):
    """
    Every prime up to the decomposition limit, plus a seeded sample of primes
    spread over the rest of the range up to 10^5.
    """
    primes = primes_up_to(scale['decomposition'])
    if scale['decomposition_sample']:
        rest = primes_in_range(scale['decomposition'] + 1, DECOMPOSITION_SAMPLE_MAX)
        sample = rng.choice(rest, size=min(scale['decomposition_sample'], len(rest)), replace=False)
        primes += sorted(int(p) for p in sample)
    return primes


def _count_jd_short_range(ctx, d, algorithm='direct_scan', subgroup_cap=None):
    """
    A broken J_d whose scan stops at (p-1)/d - 1, used to check that the
    suites notice.
    """
    p = ctx.p
    ctx.check_divisor(d)
    target = inv_mod(pow_mod(d, d, p), p)
    zs = np.arange(1, ctx.n // d, dtype=np.int64)
    return int(np.count_nonzero(pow_mod_array(zs, d, p) == target))


def _jd_counter(fault):
    return _count_jd_short_range if fault == 'jd-range' else count_Jd


# ### Suites ###


def suite_modmath(scale, fault, rng):
    tally = Tally()
    for p in primes_up_to(scale['modmath']):
        bases = rng.integers(0, p, size=20)
        exponents = rng.integers(0, 3 * p, size=20)
        for b, e in zip(bases.tolist(), exponents.tolist()):
            tally.equal(p, f'{b}^{e}', naive_pow(b, e, p), pow_mod(b, e, p))
        vectorized = pow_mod_array(bases, exponents, p)
        for b, e, v in zip(bases.tolist(), exponents.tolist(), vectorized.tolist()):
            tally.equal(p, f'array {b}^{e}', pow_mod(b, e, p), v)
    # The Python-integer path above 2^31.
    p = 2**61 - 1
    bases = rng.integers(1, 2**62, size=50) % p
    exponents = rng.integers(0, 2**62, size=50)
    for b, e, v in zip(bases.tolist(), exponents.tolist(), pow_mod_array(bases, exponents, p).tolist()):
        tally.equal(p, f'array {b}^{e}', pow(b, e, p), v)
    return tally


def suite_inverse(scale, fault, rng):
    tally = Tally()
    for p in primes_up_to(scale['modmath']):
        for m in range(1, p):
            m_star = inv_mod(m, p)
            tally.check(1 <= m_star <= p - 1 and m * m_star % p == 1, p, f'm={m}', 1, m * m_star % p)
            tally.equal(p, f'involution m={m}', m, inv_mod(m_star, p))
    return tally


def suite_subgroups(scale, fault, rng):
    """
    |H_d| = d, every element satisfies h^d = 1, and the cosets of H_d
    partition the units. Up to the root-scan limit, a scan over all of
    [1, p-1] finds exactly d solutions of h^d = 1.
    """
    tally = Tally()
    for p in primes_up_to(scale['structure']):
        ctx = make_context(p)
        for d in ctx.divisors:
            H = subgroup_elements(d, ctx).elements
            tally.equal(p, f'|H_{d}|', d, len(np.unique(H)))
            tally.equal(p, f'H_{d} roots', d, int(np.count_nonzero(pow_mod_array(H, d, p) == 1)))
            reps = coset_representatives(d, ctx)
            cosets = np.outer(reps, H) % p
            covered = len(np.unique(cosets))
            tally.check(covered == p - 1 and cosets.size == p - 1, p, f'cosets of H_{d}', p - 1, covered)
            if p <= scale['root_scan']:
                roots = int(np.count_nonzero(pow_mod_array(np.arange(1, p, dtype=np.int64), d, p) == 1))
                tally.equal(p, f'h^{d} = 1 scan', d, roots)
    return tally


def suite_discrete_log(scale, fault, rng):
    """
    g^ind(a) = a, and ord(a) = (p-1)/gcd(ind(a), p-1): for every a up to the
    exhaustive limit, for 30 random a per prime beyond it, and for random a
    modulo primes near 10^9.
    """
    tally = Tally()
    for p in primes_up_to(scale['structure']):
        ctx = make_context(p)
        if p <= scale['exhaustive_order']:
            values = list(range(1, p))
        else:
            values = sorted(set(rng.integers(1, p, size=min(p - 1, 30)).tolist()))
        orders = multiplicative_orders(values, ctx).tolist()
        for a, order in zip(values, orders):
            k = discrete_log(a, ctx)
            tally.equal(p, f'g^ind({a})', a, pow(ctx.g, k, p))
            tally.equal(p, f'ord({a}) from ind', ctx.n // math.gcd(k, ctx.n), multiplicative_order(a, ctx))
            tally.equal(p, f'ord({a}) vectorized', multiplicative_order(a, ctx), order)
    for p in DLOG_LARGE_PRIMES:
        ctx = make_context(p)
        for a in rng.integers(1, p, size=scale['dlog_large']).tolist():
            k = discrete_log(a, ctx)
            tally.check(0 <= k < ctx.n and pow(ctx.g, k, p) == a, p, f'g^ind({a})', a, pow(ctx.g, k, p))
    return tally


def suite_lemma6(scale, fault, rng):
    """
    If a^x = 1 then a^gcd(x, p-1) = 1, for every a and x in [1, p-1].
    """
    tally = Tally()
    for p in primes_up_to(scale['lemma6']):
        a = np.arange(1, p, dtype=np.int64)
        for x in range(1, p):
            holds = pow_mod_array(a, x, p) == 1
            reduced = pow_mod_array(a[holds], math.gcd(x, p - 1), p)
            tally.checked += int(np.count_nonzero(holds))
            for bad in a[holds][reduced != 1].tolist():
                tally.violations.append((p, f'x={x} a={bad}', 1, pow(bad, math.gcd(x, p - 1), p)))
    return tally


def suite_spectrum(scale, fault, rng):
    """
    sum_lambda J = p-1, I = sum J^2, the order strata add up, and the image
    size counts the attained values. The image is not checked against
    (p-1)/2: p = 19 and p = 1321 fall below it.
    """
    tally = Tally()
    for p in primes_up_to(scale['spectrum']):
        ctx = make_context(p)
        spectrum = xx_spectrum(ctx)
        tally.equal(p, 'sum J', p - 1, int(spectrum.counts.sum()))
        tally.equal(p, 'J(p;0)', 0, int(spectrum.counts[0]))
        tally.equal(p, 'I', int(np.dot(spectrum.counts, spectrum.counts)), spectrum.I)
        tally.equal(p, 'sum over orders', p - 1, sum(spectrum.by_order.values()))
        tally.equal(p, 'image_size', int(np.count_nonzero(spectrum.counts)), spectrum.image_size)
        if p <= scale['pairwise']:
            tally.equal(p, 'pairwise I', pairwise_I(ctx), spectrum.I)
    return tally


def suite_decomposition(scale, fault, rng):
    """
    sum_d J'_d = J(p;1) and J'_d <= J_d for every d | p-1.
    """
    tally = Tally()
    counter = _jd_counter(fault)
    for p in decomposition_primes(scale, rng):
        ctx = make_context(p)
        table = gcd_class_counts(ctx, count_jd=counter, check=False)
        rows = table.rows
        tally.equal(p, "sum J'_d", count_J(ctx, 1), int(rows['primary_count'].sum()))
        for d, primary, bound in rows[['d', 'primary_count', 'bound_count']].itertuples(index=False):
            tally.check(primary <= bound, p, f'd={d}', f'<= {bound}', int(primary))
    return tally


def suite_order_decomposition(scale, fault, rng):
    """
    The two stratified sums agree, the gcd classes add up to them, and each
    class is at most its T_d.
    """
    tally = Tally()
    for p in primes_up_to(scale['order']):
        ctx = make_context(p)
        spectrum = xx_spectrum(ctx)
        for t in ctx.divisors:
            total = order_stratified_sum(ctx, t, spectrum=spectrum)
            tally.equal(p, f't={t} scan', total, order_stratified_sum(ctx, t, algorithm='via_x_scan'))
            rows = order_decomposition(ctx, t, check=False).rows
            tally.equal(p, f't={t} classes', total, int(rows['primary_count'].sum()))
            tally.check(
                total <= rows['bound_count'].sum(), p, f't={t} sum T_d', f"<= {rows['bound_count'].sum()}", total)
            for d, primary, bound in rows[['d', 'primary_count', 'bound_count']].itertuples(index=False):
                tally.check(primary <= bound, p, f't={t} d={d}', f'<= {bound}', int(primary))
    return tally


def suite_dual_counters(scale, fault, rng):
    """
    J_d and T_d by scanning and by walking the subgroup agree, and up to the
    Fourier limit the exponential-sum evaluation lands within 1e-6 of the
    same integer.
    """
    tally = Tally()
    counter = _jd_counter(fault)
    for p in primes_up_to(scale['dual']):
        ctx = make_context(p)
        fourier = p <= scale['fourier']
        for t in ctx.divisors:
            for d in ctx.divisors:
                if (ctx.n // t) % d:
                    continue
                walked = count_Td(ctx, d, t, algorithm='subgroup_walk')
                if t == 1:
                    tally.equal(p, f'd={d}', walked, counter(ctx, d, algorithm='direct_scan'))
                else:
                    tally.equal(p, f'd={d} t={t}', walked, count_Td(ctx, d, t, algorithm='direct_scan'))
                if fourier:
                    H = subgroup_elements(d * t, ctx)
                    value = dilated_interval_count(H, ctx, d, ctx.n // d)
                    tally.check(
                        abs(value - walked) <= FOURIER_TOLERANCE, p, f'd={d} t={t} fourier', walked, value)
    return tally


def suite_gauss(scale, fault, rng):
    """
    max_a |S(a, H_d)| <= p^(1/2), exhaustively over a.
    """
    tally = Tally()
    for p in primes_up_to(scale['gauss']):
        ctx = make_context(p)
        for d in ctx.divisors:
            stat = max_subgroup_sum(subgroup_elements(d, ctx), ctx)
            tally.check(
                stat.max_magnitude <= math.sqrt(p) + GAUSS_TOLERANCE, p, f'd={d} a={stat.a_max}', f'<= {math.sqrt(p)}',
                stat.max_magnitude)
    return tally


def suite_parseval(scale, fault, rng):
    tally = Tally()
    for p in primes_up_to(scale['gauss']):
        ctx = make_context(p)
        for d in ctx.divisors:
            total = parseval_total(subgroup_elements(d, ctx), ctx)
            tally.check(abs(total - p * d) <= PARSEVAL_TOLERANCE * p * d, p, f'd={d}', p * d, total)
    return tally


def suite_symmetry(scale, fault, rng):
    """
    S(-a) is the conjugate of S(a), and S is constant on the cosets a H_d.
    """
    tally = Tally()
    for p in primes_up_to(scale['gauss']):
        ctx = make_context(p)
        for d in ctx.divisors:
            H = subgroup_elements(d, ctx)
            h = pow(ctx.g, ctx.n // d, p)
            for a in sorted(set(rng.integers(1, p, size=3).tolist())):
                s = subgroup_sum(a, H, p)
                minus = subgroup_sum(p - a, H, p)
                shifted = subgroup_sum(a * h % p, H, p)
                gap = abs(complex(s.re, -s.im) - complex(minus.re, minus.im))
                tally.check(gap <= SYMMETRY_TOLERANCE, p, f'd={d} a={a} conjugate', 0, gap)
                gap = abs(complex(s.re, s.im) - complex(shifted.re, shifted.im))
                tally.check(gap <= SYMMETRY_TOLERANCE, p, f'd={d} a={a} coset', 0, gap)
    return tally


def direct_interval_l1(U, V, p):
    """
    The interval L1 sum by summing e_p(a z) term by term.
    """
    return math.fsum(
        abs(sum(cmath.exp(2j * math.pi * (a * z % p) / p) for z in range(U, V + 1))) for a in range(1, p))


def suite_interval_l1(scale, fault, rng):
    """
    The L1 sum is at most p(1 + ln p), and matches direct summation where
    that is affordable.
    """
    tally = Tally()
    for p in primes_up_to(scale['l1']):
        for _ in range(scale['l1_pairs']):
            U = int(rng.integers(0, p))
            V = U + int(rng.integers(0, p))
            value = interval_l1_sum(U, V, p).value
            tally.check(value <= p * (1 + math.log(p)), p, f'U={U} V={V}', f'<= {p * (1 + math.log(p))}', value)
            if p <= 50:
                expected = direct_interval_l1(U, V, p)
                tally.check(abs(value - expected) <= 1e-9 * max(1, expected), p, f'U={U} V={V} direct', expected, value)
    expected = direct_interval_l1(1, 3, 7)
    value = interval_l1_sum(1, 3, 7).value
    tally.check(abs(value - expected) <= 1e-9, 7, 'U=1 V=3 direct', expected, value)
    return tally


def suite_lemma1(scale, fault, rng):
    """
    x^n = mu has at most gcd(n, p-1) solutions in [1, p-1], and the scan and
    root-enumeration counters agree.
    """
    tally = Tally()
    for p in primes_up_to(scale['lemma1']):
        ctx = make_context(p)
        xs = np.arange(1, p, dtype=np.int64)
        for n in range(1, scale['lemma1_n'] + 1):
            counts = np.bincount(pow_mod_array(xs, n, p), minlength=p)[1:]
            g = math.gcd(n, p - 1)
            tally.checked += p - 1
            for mu in np.flatnonzero(counts > g).tolist():
                tally.violations.append((p, f'n={n} mu={mu + 1}', f'<= {g}', int(counts[mu])))
            lam = int(rng.integers(1, p))
            M = int(rng.integers(1, p + 1))
            tally.equal(
                p, f'n={n} lambda={lam} M={M}',
                count_power_congruence(ctx, n, lam, M, method='scan').count,
                count_power_congruence(ctx, n, lam, M, method='roots').count)
    return tally


SPOT_VALUES = [
    (7, 'J(p;1)', 2, lambda ctx: count_J(ctx, 1)),
    (5, 'J(p;1)', 2, lambda ctx: count_J(ctx, 1)),
    (5, 'I', 6, lambda ctx: xx_spectrum(ctx).I),
    (7, 'I', 10, lambda ctx: xx_spectrum(ctx).I),
    (7, 'J_2', 1, lambda ctx: count_Jd(ctx, 2)),
    (7, 'T_2 t=3', 3, lambda ctx: count_Td(ctx, 2, 3)),
    (19, 'image_size', 8, lambda ctx: xx_spectrum(ctx).image_size),
    (1321, 'image_size', 656, lambda ctx: xx_spectrum(ctx).image_size),
]


def suite_reports(scale, fault, rng):
    """
    Spot values, the p = 7 report rows, stored ratios, and exponent fits on
    exact power laws.
    """
    tally = Tally()
    for p, key, expected, compute in SPOT_VALUES:
        tally.equal(p, key, expected, compute(make_context(p)))
    ctx = make_context(7)
    for which, t, expected in [('T1', None, 2), ('T2', 3, 2), ('T3', None, 10)]:
        rows = theorem_report(ctx, which, t=t)
        for row in rows:
            tally.equal(7, f'{which} {row.bound_name}', expected, row.observed)
            tally.check(
                abs(row.observed / row.bound_value - row.ratio) <= 1e-12 * abs(row.ratio), 7,
                f'{which} {row.bound_name} ratio', row.observed / row.bound_value, row.ratio)
    primes = [101, 1009, 10007, 100003]
    for alpha in [0, 1 / 3, 27 / 82, 1 / 2, 23 / 12]:
        fit = exponent_fit([(p, 3.0 * p**alpha) for p in primes])
        tally.check(abs(fit.slope - alpha) <= 1e-9, 0, f'fit alpha={alpha}', alpha, fit.slope)
    return tally


SUITES = [
    ('modmath-oracle', suite_modmath),
    ('inverse-involution', suite_inverse),
    ('subgroup-structure', suite_subgroups),
    ('discrete-log', suite_discrete_log),
    ('lemma6-corrected', suite_lemma6),
    ('spectrum', suite_spectrum),
    ('gcd-decomposition', suite_decomposition),
    ('order-decomposition', suite_order_decomposition),
    ('dual-counters', suite_dual_counters),
    ('gauss-bound', suite_gauss),
    ('parseval', suite_parseval),
    ('expsum-symmetry', suite_symmetry),
    ('interval-l1', suite_interval_l1),
    ('root-bound', suite_lemma1),
    ('reports', suite_reports),
]


def run_suites(level='quick', fault=None, seed=0, only=None):
    """
    Run the suites at the given level, yielding a SuiteResult per suite as
    it finishes.

    :param fault: name of a deliberate fault to inject; see FAULTS.
    :param only: restrict to these suite names.
    """
    if level not in LEVELS:
        raise DomainError(f"Unknown level '{level}'")
    if fault is not None and fault not in FAULTS:
        raise DomainError(f"Unknown fault '{fault}'")
    scale = LEVELS[level]
    for index, (name, suite) in enumerate(SUITES):
        if only is not None and name not in only:
            continue
        # Each suite gets its own stream so that subsets reproduce.
        tally = suite(scale, fault, np.random.default_rng([seed, index]))
        yield SuiteResult(name=name, checked=tally.checked, violations=tally.violations)
