"""
Exponential sums over multiplicative subgroups, S(a, H_d) = sum_{h in H_d}
e_p(a h), together with their maxima over a, the Parseval total, the
interval L1 sum and the comparison bound curves.

Angles are always taken from the reduced residue (a h mod p), so the
argument of cos/sin never grows beyond 2 pi.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from typing import NamedTuple

import numpy as np

from selfpower.common import EXPONENTS, CapExceededError, power, require
from selfpower.modmath import mul_mod_array

# Magnitudes are compared at this many decimals when picking the smallest
# maximizing frequency, so that equal sums computed in different orders tie.
TIE_DECIMALS = 9
FREQUENCY_CHUNK = 2**16


class ComplexSum(NamedTuple):
    re: float
    im: float
    magnitude: float


class SubgroupSumStat(NamedTuple):
    p: int
    d: int
    a_max: int
    max_magnitude: float
    curve_classical: float
    curve_shteinikov: float
    curve_shkredov: float
    exact: bool
    sample_size: int


class Curve(NamedTuple):
    name: str
    value: float
    in_range: bool


class IntervalL1(NamedTuple):
    value: float
    ratio_log_bound: float
    ratio_p: float


def _angles(residues, p):
    return 2 * np.pi * (np.asarray(residues, dtype=np.float64) / p)


def subgroup_sum(a, H, p):
    """
    S(a, H) with exactly rounded accumulation (math.fsum) in ascending h.
    """
    require(0 <= a < p, f"frequency {a} outside [0, {p})")
    angles = _angles(mul_mod_array(H.elements, a, p), p)
    re = math.fsum(np.cos(angles))
    im = math.fsum(np.sin(angles))
    return ComplexSum(re=re, im=im, magnitude=math.hypot(re, im))


def _neumaier_add(total, compensation, terms):
    """
    One vectorized step of Neumaier's compensated summation, in place.
    """
    updated = total + terms
    compensation += np.where(
        np.abs(total) >= np.abs(terms), (total - updated) + terms, (terms - updated) + total)
    total[:] = updated


def subgroup_sums(H, p, frequencies):
    """
    S(a, H) for every a in `frequencies`, one column per subgroup element in
    ascending order, with compensated accumulation.

    :return: (re, im) float arrays aligned with `frequencies`.
    """
    frequencies = np.asarray(frequencies, dtype=np.int64)
    re, re_c = np.zeros(len(frequencies)), np.zeros(len(frequencies))
    im, im_c = np.zeros(len(frequencies)), np.zeros(len(frequencies))
    for h in H.elements:
        angles = _angles(mul_mod_array(frequencies, int(h), p), p)
        _neumaier_add(re, re_c, np.cos(angles))
        _neumaier_add(im, im_c, np.sin(angles))
    return re + re_c, im + im_c


def _chunk_max(args):
    """
    The best (rounded magnitude, smallest a, magnitude) over one chunk of
    frequencies.
    """
    H, p, frequencies = args
    re, im = subgroup_sums(H, p, frequencies)
    magnitudes = np.hypot(re, im)
    keys = np.round(magnitudes, TIE_DECIMALS)
    best = int(np.argmax(keys))
    return keys[best], int(frequencies[best]), float(magnitudes[best])


def _reduce_chunks(results):
    """
    Deterministic reduction: largest key, ties broken by smallest a.
    """
    return min(results, key=lambda r: (-r[0], r[1]))


def max_subgroup_sum(H, ctx, mode='exhaustive', sample=1000, seed=0, work_cap=10**10, threads=1):
    """
    The maximum of |S(a, H)| over nonzero frequencies a.

    :param mode: 'exhaustive' scans every a in [1, p-1], which costs p*d and
        is refused above `work_cap`; 'sampled' scans a in [1, min(1000, p-1)]
        plus `sample` random a drawn with `seed`, giving a lower bound.
    :param threads: number of worker processes for the scan over a. The
        result doesn't depend on it.
    """
    p, d = ctx.p, H.d
    if mode == 'exhaustive':
        if p * d > work_cap:
            raise CapExceededError(
                'exhaustive work p*d =', p * d, work_cap, '--cap-expsum-work', hint=' or use sampled mode')
        frequencies = np.arange(1, p, dtype=np.int64)
    elif mode == 'sampled':
        rng = np.random.default_rng(seed)
        frequencies = np.unique(
            np.concatenate([
                np.arange(1, min(1000, p - 1) + 1, dtype=np.int64),
                rng.integers(1, p, size=sample, dtype=np.int64)]))
    else:
        raise ValueError(f"Unknown mode '{mode}'")

    jobs = [(H, p, frequencies[i:i + FREQUENCY_CHUNK]) for i in range(0, len(frequencies), FREQUENCY_CHUNK)]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(_chunk_max, jobs))
    else:
        results = [_chunk_max(job) for job in jobs]
    _, a_max, magnitude = _reduce_chunks(results)

    curves = bound_curves(p, d)
    return SubgroupSumStat(
        p=p,
        d=d,
        a_max=a_max,
        max_magnitude=magnitude,
        curve_classical=curves['classical'].value,
        curve_shteinikov=curves['shteinikov'].value,
        curve_shkredov=curves['shkredov'].value,
        exact=(mode == 'exhaustive'),
        sample_size=0 if mode == 'exhaustive' else len(frequencies))


def parseval_total(H, ctx):
    """
    sum_{a=0}^{p-1} |S(a, H)|^2, which should be p*d.
    """
    p = ctx.p
    partials = []
    for start in range(0, p, FREQUENCY_CHUNK):
        re, im = subgroup_sums(H, p, np.arange(start, min(start + FREQUENCY_CHUNK, p), dtype=np.int64))
        partials.extend(re * re + im * im)
    return math.fsum(partials)


def interval_l1_sum(U, V, p):
    """
    sum_{a=1}^{p-1} |sum_{z=U}^{V} e_p(a z)|, using the closed form
    |sin(pi a L / p) / sin(pi a / p)| with L = V - U + 1 for the inner sum.

    The numerator only depends on a L mod p, which is what we reduce to.
    """
    require(V >= U, f"need V >= U, got U={U}, V={V}")
    require(V - U < 2**31, "interval longer than 2^31")
    length = (V - U + 1) % p
    a = np.arange(1, p, dtype=np.int64)
    numerator = np.abs(np.sin(np.pi * (mul_mod_array(a, length, p) / p)))
    denominator = np.sin(np.pi * (a / p))
    value = math.fsum(numerator / denominator)
    return IntervalL1(value=value, ratio_log_bound=value / (p * (1 + math.log(p))), ratio_p=value / p)


def interval_sums(frequencies, U, V, p):
    """
    sum_{z=U}^{V} e_p(b z) for every b in `frequencies`, from the geometric
    series. A frequency b = 0 mod p gives V - U + 1.
    """
    require(0 <= U <= V, f"need 0 <= U <= V, got U={U}, V={V}")
    b = np.asarray(frequencies, dtype=np.int64) % p
    sums = np.full(len(b), V - U + 1, dtype=np.complex128)
    nonzero = b != 0
    bn = b[nonzero]
    first = np.exp(1j * _angles(mul_mod_array(bn, U % p, p), p))
    span = np.exp(1j * _angles(mul_mod_array(bn, (V - U + 1) % p, p), p))
    sums[nonzero] = first * (1 - span) / (1 - np.exp(1j * _angles(bn, p)))
    return sums


def dilated_interval_count(H, ctx, d, upper, work_cap=10**10):
    """
    The number of z in [1, upper] with d z mod p in H, evaluated through
    orthogonality as

        (1/p) sum_{a=0}^{p-1} (sum_{z=1}^{upper} e_p(a d z)) conj(S(a, H)).

    The a = 0 term is upper * |H|. Returns the unrounded real part; the
    imaginary part cancels.
    """
    p = ctx.p
    if p * H.d > work_cap:
        raise CapExceededError('Fourier work p*|H| =', p * H.d, work_cap, '--cap-expsum-work')
    partials = []
    for start in range(0, p, FREQUENCY_CHUNK):
        a = np.arange(start, min(start + FREQUENCY_CHUNK, p), dtype=np.int64)
        re, im = subgroup_sums(H, p, a)
        inner = interval_sums(mul_mod_array(a, d % p, p), 1, upper, p)
        partials.extend(inner.real * re + inner.imag * im)
    return math.fsum(partials) / p


def bound_curves(p, d=None, t=None):
    """
    The comparison curves at these parameters, each with a flag saying
    whether its hypothesis holds. Out-of-range curves are still returned.

    Range checks are done in integers: d < p^(1/2) iff d^2 < p, and
    d < p^(2/3) iff d^3 < p^2.
    """
    curves = {'classical': Curve('classical', power(p, EXPONENTS['classical']), True)}
    if d is not None:
        curves['shteinikov'] = Curve(
            'shteinikov',
            power(p, EXPONENTS['shteinikov_p']) * power(d, EXPONENTS['shteinikov_d']), d * d < p)
        curves['shkredov'] = Curve(
            'shkredov',
            power(p, EXPONENTS['shkredov_p']) * power(d, EXPONENTS['shkredov_d']), d**3 < p**2)
    if t is not None:
        curves['bbs_order_sum'] = Curve('bbs_order_sum', t + power(p, EXPONENTS['bbs_order_sum_p']), True)
        curves['bbs_fiber'] = Curve('bbs_fiber', p * power(t, EXPONENTS['bbs_fiber_t']), True)
    return curves


def lemma1_curve(p, n, M, k):
    """
    (1 + M / p^(1/k)) n^(1/k).
    """
    return (1 + M / power(p, 1 / k)) * power(n, 1 / k)


def lemma1_corollary(p, d, t, k):
    """
    The n = dt, M = p/d form: (d^(1/k) + (p/d)^(1 - 1/k)) t^(1/k).
    """
    return (power(d, 1 / k) + power(p / d, 1 - 1 / k)) * power(t, 1 / k)
