"""
Counting solutions of x^x = lambda mod p.

This holds J(p; lambda), the full spectrum with I(p), order-stratified
sums, the gcd-class counters J'_d and their upper-bound counters J_d and
T_d (each by a scan, by a walk over a subgroup, or through exponential
sums), the splits of their sums into divisor ranges, and the counter for
the power congruence x^n = lambda with x <= M.

The x range is exactly 1 <= x <= p-1 everywhere.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, NamedTuple

import numpy as np
import pandas as pd

from selfpower.common import CapExceededError, IdentityViolation, require
from selfpower.expsum import dilated_interval_count, lemma1_curve
from selfpower.modmath import inv_mod, mul_mod_array, pow_mod, pow_mod_array, self_power_array
from selfpower.numtheory import discrete_log, multiplicative_orders, subgroup_elements

DEFAULT_CHUNK = 2**20


class Spectrum(NamedTuple):
    p: int
    counts: np.ndarray
    image_size: int
    I: int  # noqa: E741
    by_order: Dict[int, int]


class DecompositionTable(NamedTuple):
    p: int
    t: int
    # Columns d, primary_count, bound_count; sorted by d.
    rows: pd.DataFrame


class SplitPart(NamedTuple):
    total: int
    divisors: List[int]


class PowerCongruenceCount(NamedTuple):
    count: int
    curves: Dict[int, float]
    method: str


def _x_chunks(upper, chunk):
    """
    Blocks of consecutive integers covering [1, upper].
    """
    for start in range(1, upper + 1, chunk):
        yield np.arange(start, min(start + chunk, upper + 1), dtype=np.int64)


def _order_exactly(values, t, ctx):
    """
    Mask of the values whose multiplicative order is exactly t (t | p-1).
    """
    mask = pow_mod_array(values, t, ctx.p) == 1
    for q, _ in ctx.factors:
        if t % q == 0:
            mask &= pow_mod_array(values, t // q, ctx.p) != 1
    return mask


def _chunk_histogram(args):
    start, stop, p = args
    values = self_power_array(np.arange(start, stop, dtype=np.int64), p)
    return np.unique(values, return_counts=True)


def xx_spectrum(ctx, cap=10**7, chunk=DEFAULT_CHUNK, threads=1):
    """
    The full histogram lambda -> J(p; lambda) with its derived statistics.

    Each chunk of x values is histogrammed on its own and the histograms
    are added up in chunk order, so the worker count doesn't matter.
    """
    p = ctx.p
    if p > cap:
        raise CapExceededError('p =', p, cap, '--cap-spectrum')
    jobs = [(start, min(start + chunk, p), p) for start in range(1, p, chunk)]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            histograms = list(executor.map(_chunk_histogram, jobs))
    else:
        histograms = [_chunk_histogram(job) for job in jobs]

    counts = np.zeros(p, dtype=np.int64)
    for values, value_counts in histograms:
        np.add.at(counts, values, value_counts)

    attained = np.flatnonzero(counts)
    orders = multiplicative_orders(attained, ctx)
    by_order = {}
    for t, j in zip(orders.tolist(), counts[attained].tolist()):
        by_order[t] = by_order.get(t, 0) + j

    return Spectrum(
        p=p,
        counts=counts,
        image_size=len(attained),
        I=int(np.dot(counts, counts)),
        by_order=dict(sorted(by_order.items())))


def spectrum_frame(spectrum, ctx):
    """
    One row per lambda in [1, p-1] with columns p, lambda, J, ord_lambda.
    """
    lambdas = np.arange(1, ctx.p, dtype=np.int64)
    return pd.DataFrame({
        'p': ctx.p,
        'lambda': lambdas,
        'J': spectrum.counts[1:],
        'ord_lambda': multiplicative_orders(lambdas, ctx),
    })


def count_J(ctx, lam, chunk=DEFAULT_CHUNK):
    """
    J(p; lambda) by a streaming scan over x; no O(p) memory.
    """
    require(1 <= lam <= ctx.p - 1, f"lambda = {lam} is not a nonzero residue mod {ctx.p}")
    return sum(int(np.count_nonzero(self_power_array(xs, ctx.p) == lam)) for xs in _x_chunks(ctx.p - 1, chunk))


def pairwise_I(ctx, chunk=1024):
    """
    I(p) as the number of pairs (x, y) with x^x = y^y, counted pair by pair.
    Quadratic in p; an oracle for small p.
    """
    values = self_power_array(np.arange(1, ctx.p, dtype=np.int64), ctx.p)
    total = 0
    for start in range(0, len(values), chunk):
        block = values[start:start + chunk]
        total += int(np.count_nonzero(block[:, None] == values[None, :]))
    return total


def order_stratified_sum(ctx, t, algorithm='via_spectrum', spectrum=None, cap=10**7, chunk=DEFAULT_CHUNK):
    """
    The sum of J(p; lambda) over lambda of order exactly t.

    :param algorithm: 'via_spectrum' reads it off the spectrum (computed
        unless supplied); 'via_x_scan' counts the x whose self-power has order
        t, i.e. x^(tx) = 1 but no proper divisor of t works.
    """
    ctx.check_divisor(t)
    if algorithm == 'via_spectrum':
        if spectrum is None:
            spectrum = xx_spectrum(ctx, cap=cap, chunk=chunk)
        return spectrum.by_order.get(t, 0)
    if algorithm == 'via_x_scan':
        return sum(
            int(np.count_nonzero(_order_exactly(self_power_array(xs, ctx.p), t, ctx)))
            for xs in _x_chunks(ctx.p - 1, chunk))
    raise ValueError(f"Unknown algorithm '{algorithm}'")


def _scan_count(p, upper, exponent, target, chunk=DEFAULT_CHUNK):
    """
    The number of z in [1, upper] with z^exponent = target mod p.
    """
    return sum(
        int(np.count_nonzero(pow_mod_array(zs, exponent, p) == target)) for zs in _x_chunks(upper, chunk))


def count_Td(ctx, d, t, algorithm='direct_scan', subgroup_cap=10**8, work_cap=10**10):
    """
    T_d: the number of z <= (p-1)/d with z^(dt) = (d^(dt))^* mod p.

    :param algorithm: 'direct_scan' tests every z; 'subgroup_walk' uses that
        the condition says d z mod p lies in H_(dt), so z = h d^* for some h;
        'fourier' evaluates the same count as an exponential sum over every
        frequency, at a cost of p*d*t bounded by `work_cap`; 'auto' picks
        whichever of the first two touches fewer elements.
    """
    p = ctx.p
    ctx.check_divisor(t)
    ctx.check_divisor(d, of=ctx.n // t)
    upper = ctx.n // d
    if algorithm == 'auto':
        algorithm = 'subgroup_walk' if d * t <= upper else 'direct_scan'
    if algorithm == 'direct_scan':
        target = inv_mod(pow_mod(d, d * t, p), p)
        return _scan_count(p, upper, d * t, target)
    if algorithm == 'subgroup_walk':
        H = subgroup_elements(d * t, ctx, cap=subgroup_cap)
        return int(np.count_nonzero(mul_mod_array(H.elements, inv_mod(d, p), p) <= upper))
    if algorithm == 'fourier':
        H = subgroup_elements(d * t, ctx, cap=subgroup_cap)
        return int(round(dilated_interval_count(H, ctx, d, upper, work_cap=work_cap)))
    raise ValueError(f"Unknown algorithm '{algorithm}'")


def count_Jd(ctx, d, algorithm='direct_scan', subgroup_cap=10**8, work_cap=10**10):
    """
    J_d: the number of z <= (p-1)/d with z^d = (d^d)^* mod p, equivalently
    (d z)^d = 1.
    """
    ctx.check_divisor(d)
    return count_Td(ctx, d, 1, algorithm=algorithm, subgroup_cap=subgroup_cap, work_cap=work_cap)


def _gcd_class_histogram(ctx, t, modulus, chunk):
    """
    For the x whose self-power has order exactly t, count them by
    gcd(x, modulus).
    """
    classes = {}
    for xs in _x_chunks(ctx.p - 1, chunk):
        selected = xs[_order_exactly(self_power_array(xs, ctx.p), t, ctx)]
        for d, c in zip(*np.unique(np.gcd(selected, modulus), return_counts=True)):
            classes[int(d)] = classes.get(int(d), 0) + int(c)
    return classes


def gcd_class_counts(ctx, j1=None, chunk=DEFAULT_CHUNK, count_jd=None, check=True):
    """
    The decomposition J(p; 1) = sum_d J'_d, with J'_d counting solutions of
    x^x = 1 with gcd(x, p-1) = d, alongside the counters J_d >= J'_d.

    :param j1: J(p; 1) to check the sum against; counted independently
        when not given.
    :param count_jd: the J_d counter to use, for swapping in alternatives.
    :param check: raise IdentityViolation when an identity fails.
    """
    if count_jd is None:
        def count_jd(ctx, d):
            return count_Jd(ctx, d, algorithm='auto')

    classes = _gcd_class_histogram(ctx, 1, ctx.n, chunk)
    rows = pd.DataFrame({
        'd': list(ctx.divisors),
        'primary_count': [classes.get(d, 0) for d in ctx.divisors],
        'bound_count': [count_jd(ctx, d) for d in ctx.divisors],
    })

    if not check:
        return DecompositionTable(p=ctx.p, t=1, rows=rows)
    if j1 is None:
        j1 = count_J(ctx, 1, chunk=chunk)
    if rows['primary_count'].sum() != j1:
        raise IdentityViolation(ctx.p, 'sum over d', j1, int(rows['primary_count'].sum()), "sum J'_d = J(p;1)")
    _check_rowwise(ctx.p, rows, "J'_d <= J_d")
    return DecompositionTable(p=ctx.p, t=1, rows=rows)


def order_decomposition(ctx, t, expected=None, chunk=DEFAULT_CHUNK, count_td=None, check=True):
    """
    The order-t analogue of gcd_class_counts: over d | (p-1)/t, the number of
    x with ord(x^x) = t and gcd(x, (p-1)/t) = d, alongside T_d.

    :param expected: the order-stratified sum to check the rows against.
    """
    if count_td is None:
        def count_td(ctx, d, t):
            return count_Td(ctx, d, t, algorithm='auto')

    ctx.check_divisor(t)
    m = ctx.n // t
    divisors = [d for d in ctx.divisors if m % d == 0]
    classes = _gcd_class_histogram(ctx, t, m, chunk)
    rows = pd.DataFrame({
        'd': divisors,
        'primary_count': [classes.get(d, 0) for d in divisors],
        'bound_count': [count_td(ctx, d, t) for d in divisors],
    })
    if not check:
        return DecompositionTable(p=ctx.p, t=t, rows=rows)
    if expected is not None and rows['primary_count'].sum() != expected:
        raise IdentityViolation(
            ctx.p, f't={t}', expected, int(rows['primary_count'].sum()), "gcd classes sum to the stratified sum")
    _check_rowwise(ctx.p, rows, "order-t class count <= T_d")
    return DecompositionTable(p=ctx.p, t=t, rows=rows)


def _check_rowwise(p, rows, what):
    bad = rows[rows['primary_count'] > rows['bound_count']]
    if len(bad):
        row = bad.iloc[0]
        raise IdentityViolation(p, f"d={row['d']}", f"<= {row['bound_count']}", row['primary_count'], what)


def range_split(table, p):
    """
    Split sum_d J_d into the ranges used to bound it: R1 (d > p^(5/7)),
    R2 (p^(4/7) < d < p^(5/7)), R3 (p^(3/7) < d <= p^(4/7)) and R0 for the
    rest. Comparisons are on seventh powers, so they are exact.
    """
    parts = {'R0': 0, 'R1': 0, 'R2': 0, 'R3': 0}
    for d, bound in zip(table.rows['d'], table.rows['bound_count']):
        d7 = int(d)**7
        if d7 > p**5:
            parts['R1'] += int(bound)
        elif p**4 < d7 < p**5:
            parts['R2'] += int(bound)
        elif p**3 < d7 <= p**4:
            parts['R3'] += int(bound)
        else:
            parts['R0'] += int(bound)
    return parts


def order_range_split(table, p):
    """
    Split sum_d T_d of an order-t table into S1 (d > p^(2/3)), S2
    (p^(1/3) < d < p^(2/3)) and S0 (d < p^(1/3)), keeping the divisors in
    each part. Comparisons are on cubes; d^3 is never p or p^2.
    """
    parts = {'S0': [], 'S1': [], 'S2': []}
    for d in table.rows['d']:
        d3 = int(d)**3
        if d3 > p**2:
            parts['S1'].append(int(d))
        elif d3 > p:
            parts['S2'].append(int(d))
        else:
            parts['S0'].append(int(d))
    bounds = dict(zip(table.rows['d'].tolist(), table.rows['bound_count'].tolist()))
    return {
        name: SplitPart(total=sum(int(bounds[d]) for d in divisors), divisors=divisors)
        for name, divisors in parts.items()
    }


def order_max_fiber(ctx, t, chunk=DEFAULT_CHUNK):
    """
    max J(p; lambda) over the lambda of order exactly t, or 0 when no x^x
    has order t. One scan over x; at most t values of lambda are tracked.
    """
    ctx.check_divisor(t)
    fibers = {}
    for xs in _x_chunks(ctx.p - 1, chunk):
        values = self_power_array(xs, ctx.p)
        for lam, c in zip(*np.unique(values[_order_exactly(values, t, ctx)], return_counts=True)):
            fibers[int(lam)] = fibers.get(int(lam), 0) + int(c)
    return max(fibers.values(), default=0)


def _power_roots(ctx, n, lam, subgroup_cap):
    """
    All x in [1, p-1] with x^n = lam, as one root times H_gcd(n, p-1).
    """
    p = ctx.p
    g = math.gcd(n, ctx.n)
    if pow(lam, ctx.n // g, p) != 1:
        return np.array([], dtype=np.int64)
    m = ctx.n // g
    # Solve n y = ind(lam) mod p-1.
    y0 = 0 if m == 1 else (discrete_log(lam, ctx) // g) * inv_mod((n // g) % m, m) % m
    root = pow(ctx.g, y0, p)
    assert pow(root, n, p) == lam
    return mul_mod_array(subgroup_elements(g, ctx, cap=subgroup_cap).elements, root, p)


def count_power_congruence(ctx, n, lam, M, ks=(2, 3), method='auto', subgroup_cap=10**8, chunk=DEFAULT_CHUNK):
    """
    The number of x <= M with x^n = lam mod p, plus the curve
    (1 + M / p^(1/k)) n^(1/k) for each k in `ks`.

    :param method: 'scan' tests every x <= M; 'roots' enumerates all n-th
        roots of lam; 'auto' uses the roots when there are fewer of them
        than x values to scan.
    """
    p = ctx.p
    require(n >= 1, f"n = {n} must be positive")
    require(1 <= M <= p, f"M = {M} outside [1, {p}]")
    require(lam % p != 0, f"lambda = {lam} = 0 mod {p}")
    lam %= p
    if method == 'auto':
        g = math.gcd(n, ctx.n)
        method = 'roots' if g <= subgroup_cap and g < M else 'scan'
    if method == 'roots':
        count = int(np.count_nonzero(_power_roots(ctx, n, lam, subgroup_cap) <= M))
    elif method == 'scan':
        # x = p would be 0, which is never a root.
        count = _scan_count(p, min(M, p - 1), n, lam, chunk=chunk)
    else:
        raise ValueError(f"Unknown method '{method}'")
    return PowerCongruenceCount(count=count, curves={k: lemma1_curve(p, n, M, k) for k in ks}, method=method)
