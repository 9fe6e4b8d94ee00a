"""
The structure of F_p^*: primality, factorization of p-1, divisors,
multiplicative orders, primitive roots, subgroups and discrete logarithms.

Everything here is keyed off a PrimeContext, which packages p with the
factorization of p-1, its divisors and the smallest primitive root.
"""

import functools
import math
from typing import NamedTuple, Tuple

import numpy as np

from selfpower.common import CapExceededError, DomainError, require
from selfpower.modmath import check_modulus, inv_mod, mul_mod_array, pow_mod_array

# Deterministic for every n < 3.3 * 10^24, which covers our 64-bit range.
MILLER_RABIN_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

SEGMENT_SIZE = 2**20

# ### Sieving ###


def simple_sieve(limit):
    """
    All primes <= limit as an int64 array.
    """
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for q in range(2, math.isqrt(limit) + 1):
        if is_prime[q]:
            is_prime[q * q::q] = False
    return np.flatnonzero(is_prime).astype(np.int64)


SMALL_PRIMES = tuple(int(q) for q in simple_sieve(1000))


def primes_in_range(lo, hi):
    """
    All primes in [lo, hi] by a segmented sieve, as an int64 array.
    """
    if hi < 2 or hi < lo:
        return np.array([], dtype=np.int64)
    lo = max(lo, 2)
    base = simple_sieve(math.isqrt(hi))
    found = []
    for low in range(lo, hi + 1, SEGMENT_SIZE):
        high = min(low + SEGMENT_SIZE, hi + 1)  # exclusive
        mask = np.ones(high - low, dtype=bool)
        for q in base:
            q = int(q)
            if q * q >= high:
                break
            start = max(q * q, ((low + q - 1) // q) * q)
            mask[start - low::q] = False
        found.append(low + np.flatnonzero(mask))
    return np.concatenate(found).astype(np.int64)


@functools.lru_cache(maxsize=8)
def _trial_primes(limit):
    return tuple(int(q) for q in simple_sieve(limit))


# ### Primality and factorization ###


def compositeness_witness(n):
    """
    Return None if n is prime, and otherwise a witness of compositeness: a
    small prime factor, or a Miller-Rabin base that n fails.
    """
    require(n >= 2, f"primality is undefined for {n}")
    for q in SMALL_PRIMES:
        if q * q > n:
            return None
        if n % q == 0:
            return None if n == q else q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in MILLER_RABIN_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return a
    return None


def is_prime(n):
    return n >= 2 and compositeness_witness(n) is None


def pollard_brent(n, rng):
    """
    Find a nontrivial factor of the odd composite n with Brent's variant of
    Pollard's rho, retrying with fresh parameters from `rng` on failure.
    """
    if n % 2 == 0:
        return 2
    batch = 128
    while True:
        y = int(rng.integers(1, n - 1))
        c = int(rng.integers(1, n - 1))
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(batch, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += batch
            r *= 2
        if g == n:
            # The batched product overshot; backtrack one step at a time.
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n, seed=0, trial_limit=2**16):
    """
    Factor n >= 1 as a list of (prime, multiplicity) with nondecreasing
    primes.

    Trial division takes out every prime below `trial_limit`; whatever is
    left is split by Pollard rho with a generator seeded by `seed` and every
    piece is checked prime before it is accepted.
    """
    require(n >= 1, f"cannot factor {n}")
    multiplicities = {}

    def add(q, e=1):
        multiplicities[q] = multiplicities.get(q, 0) + e

    m = n
    for q in _trial_primes(trial_limit):
        if q * q > m:
            break
        if m % q == 0:
            e = 0
            while m % q == 0:
                m //= q
                e += 1
            add(q, e)
    if m > 1:
        rng = np.random.default_rng(seed)
        stack = [m]
        while stack:
            k = stack.pop()
            if is_prime(k):
                add(k)
            else:
                f = pollard_brent(k, rng)
                stack.extend([f, k // f])
    factors = sorted(multiplicities.items())
    assert math.prod(q**e for q, e in factors) == n
    return factors


def divisors_of(factors):
    """
    All divisors of the number with the given factorization, sorted.
    """
    divisors = [1]
    for q, e in factors:
        divisors = [d * q**k for d in divisors for k in range(e + 1)]
    return sorted(divisors)


def primitive_root(p, factors):
    """
    The smallest g with g^((p-1)/q) != 1 for every prime q | p-1.
    """
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q, _ in factors):
            return g
    raise DomainError(f"no primitive root mod {p}")


# ### Prime contexts ###


class PrimeContext(NamedTuple):
    p: int
    factors: Tuple[Tuple[int, int], ...]
    divisors: Tuple[int, ...]
    g: int

    @property
    def n(self):
        """
        The order p-1 of the multiplicative group.
        """
        return self.p - 1

    def check_divisor(self, d, of=None):
        """
        Require that d divides `of` (by default p-1).
        """
        of = self.n if of is None else of
        require(d >= 1 and of % d == 0, f"{d} does not divide {of} (p={self.p})")


@functools.lru_cache(maxsize=4096)
def _build_context(p, seed, trial_limit):
    factors = tuple(factorize(p - 1, seed=seed, trial_limit=trial_limit))
    divisors = tuple(divisors_of(factors))
    assert len(divisors) == math.prod(e + 1 for _, e in factors)
    return PrimeContext(p=p, factors=factors, divisors=divisors, g=primitive_root(p, factors))


def make_context(p, seed=0, trial_limit=2**16):
    """
    Build the PrimeContext for an odd prime 3 <= p < 2^62.
    """
    p = int(p)
    require(p >= 3, f"p = {p} is excluded: we need an odd prime")
    check_modulus(p)
    witness = compositeness_witness(p)
    if witness is not None:
        raise DomainError(f"{p} is not prime (witness {witness})")
    return _build_context(p, seed, trial_limit)


# ### Orders and subgroups ###


def multiplicative_order(a, ctx):
    """
    The order of a in F_p^*, found by stripping prime factors from p-1.
    """
    require(1 <= a < ctx.p, f"{a} is not a nonzero residue mod {ctx.p}")
    t = ctx.n
    for q, e in ctx.factors:
        for _ in range(e):
            if pow(a, t // q, ctx.p) != 1:
                break
            t //= q
    return t


def multiplicative_orders(values, ctx):
    """
    Vectorized multiplicative_order over an array of nonzero residues.
    """
    values = np.asarray(values, dtype=np.int64)
    t = np.full(values.shape, ctx.n, dtype=np.int64)
    for q, e in ctx.factors:
        for _ in range(e):
            # Once a^(t/q) != 1 no further power of q can be stripped, so
            # carrying on is harmless.
            candidate = t // q
            ok = (t % q == 0) & (pow_mod_array(values, candidate, ctx.p) == 1)
            t = np.where(ok, candidate, t)
    return t


def geometric_sequence(h, count, p):
    """
    [1, h, h^2, ..., h^(count-1)] mod p, built by doubling.
    """
    seq = np.array([1 % p], dtype=np.int64)
    while len(seq) < count:
        step = pow(h, len(seq), p)
        seq = np.concatenate([seq, mul_mod_array(seq[:count - len(seq)], step, p)])
    return seq[:count]


class Subgroup(NamedTuple):
    d: int
    elements: np.ndarray


@functools.lru_cache(maxsize=256)
def _subgroup(d, ctx):
    elements = np.sort(geometric_sequence(pow(ctx.g, ctx.n // d, ctx.p), d, ctx.p))
    elements.flags.writeable = False
    return Subgroup(d=d, elements=elements)


def subgroup_elements(d, ctx, cap=10**8):
    """
    The unique subgroup H_d of order d, its elements sorted ascending.
    """
    ctx.check_divisor(d)
    if d > cap:
        raise CapExceededError('subgroup order', d, cap, '--cap-subgroup')
    return _subgroup(d, ctx)


def coset_representatives(d, ctx):
    """
    g^j for 0 <= j < (p-1)/d: one representative of each coset of H_d.
    """
    ctx.check_divisor(d)
    return geometric_sequence(ctx.g, ctx.n // d, ctx.p)


# ### Discrete logarithms ###


@functools.lru_cache(maxsize=64)
def _baby_steps(base, m, p):
    table = {}
    current = 1
    for j in range(m):
        table.setdefault(current, j)
        current = current * base % p
    return table


def baby_step_giant_step(base, target, order, p):
    """
    The k in [0, order) with base^k = target mod p, where base has the given
    order.
    """
    m = math.isqrt(order - 1) + 1
    table = _baby_steps(base, m, p)
    giant = inv_mod(pow(base, m, p), p)
    gamma = target
    for i in range(m + 1):
        if gamma in table:
            return i * m + table[gamma]
        gamma = gamma * giant % p
    raise DomainError(f"{target} is not a power of {base} mod {p}")


def crt(residues, moduli):
    """
    The unique x mod prod(moduli) with x = r_i mod m_i, for coprime moduli.
    """
    x, modulus = 0, 1
    for r, m in zip(residues, moduli):
        x += modulus * ((r - x) * inv_mod(modulus % m, m) % m)
        modulus *= m
    return x % modulus


def discrete_log(a, ctx):
    """
    ind(a): the k in [0, p-1) with g^k = a mod p.

    Pohlig-Hellman over the factorization of p-1, with baby-step giant-step
    inside each prime-power part.
    """
    require(1 <= a < ctx.p, f"{a} is not a nonzero residue mod {ctx.p}")
    p, n = ctx.p, ctx.n
    g_inv = inv_mod(ctx.g, p)
    residues, moduli = [], []
    for q, e in ctx.factors:
        gamma = pow(ctx.g, n // q, p)
        x = 0
        for k in range(e):
            h = pow(a * pow(g_inv, x, p) % p, n // q**(k + 1), p)
            x += baby_step_giant_step(gamma, h, q, p) * q**k
        residues.append(x)
        moduli.append(q**e)
    return crt(residues, moduli)
