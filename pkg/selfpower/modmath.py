"""
Exact modular arithmetic for odd primes p < 2^62, including the self-power
map x -> x^x mod p.

Scalar operations use Python integers, so products of two residues are
always exact. The array kernels run in int64 when p < 2^31, where (p-1)^2
fits, and fall back to Python integers element by element above that.
"""

import numpy as np

from selfpower.common import DomainError, require

MODULUS_CAP = 2**62
# Below this modulus the product of two residues fits in an int64.
VECTOR_CAP = 2**31


def check_modulus(p):
    """
    Every kernel here needs 2 <= p < 2^62.
    """
    require(2 <= p < MODULUS_CAP, f"modulus {p} outside [2, 2^62)")


def pow_mod(base, exponent, p):
    """
    base^exponent reduced into [0, p). An exponent of 0 gives 1.
    """
    check_modulus(p)
    require(exponent >= 0, f"negative exponent {exponent}")
    return pow(base % p, exponent, p)


def inv_mod(m, p):
    """
    The least positive m* with m * m* = 1 mod p, by the extended Euclidean
    algorithm. This doesn't need p to be prime, only gcd(m, p) = 1.
    """
    a = m % p
    if a == 0:
        raise DomainError(f"no inverse: {m} = 0 mod {p}")
    old_r, r = a, p
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    if old_r != 1:
        raise DomainError(f"no inverse: gcd({m}, {p}) = {old_r}")
    return old_s % p


def self_power(x, p):
    """
    x^x mod p for 1 <= x <= p-1.

    We deliberately don't reduce the exponent mod p-1 here: this is x^x
    literally.
    """
    require(1 <= x <= p - 1, f"x = {x} outside [1, {p - 1}]")
    return pow_mod(x, x, p)


def naive_pow(base, exponent, p):
    """
    base^exponent mod p by repeated multiplication; an oracle for testing.
    """
    result = 1 % p
    for _ in range(exponent):
        result = result * base % p
    return result


def _as_int64(a):
    return np.asarray(a, dtype=np.int64)


def mul_mod_array(a, b, p):
    """
    Elementwise a * b mod p for arrays (or an array and a scalar) of residues.
    """
    check_modulus(p)
    a = _as_int64(a)
    b = _as_int64(b)
    if p < VECTOR_CAP:
        return a * b % p
    a, b = np.broadcast_arrays(a, b)
    out = np.empty(a.shape, dtype=np.int64)
    for i, (x, y) in enumerate(zip(a.flat, b.flat)):
        out.flat[i] = int(x) * int(y) % p
    return out


def pow_mod_array(bases, exponents, p):
    """
    Elementwise bases^exponents mod p by square-and-multiply, where
    `exponents` may be a scalar or an array broadcastable against `bases`.

    :param bases: integer array of bases.
    :param exponents: nonnegative integer scalar or array.
    :param p: the modulus.
    :return: an int64 array of residues in [0, p).
    """
    check_modulus(p)
    bases = _as_int64(bases) % p
    exponents = _as_int64(exponents)
    require(not np.any(exponents < 0), "negative exponent")
    bases, exponents = np.broadcast_arrays(bases, exponents)
    if p >= VECTOR_CAP:
        out = np.empty(bases.shape, dtype=np.int64)
        for i, (b, e) in enumerate(zip(bases.flat, exponents.flat)):
            out.flat[i] = pow(int(b), int(e), p)
        return out
    result = np.full(bases.shape, 1 % p, dtype=np.int64)
    square = bases.copy()
    remaining = exponents.copy()
    while np.any(remaining):
        odd = (remaining & 1).astype(bool)
        result = np.where(odd, result * square % p, result)
        square = square * square % p
        remaining >>= 1
    return result


def self_power_array(xs, p):
    """
    Vectorized self-power map: x^x mod p for every x in `xs`.
    """
    xs = _as_int64(xs)
    if xs.size:
        require(xs.min() >= 1 and xs.max() <= p - 1, f"x outside [1, {p - 1}]")
    return pow_mod_array(xs, xs, p)
