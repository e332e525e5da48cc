"""Brent cycle detection for a rational map on P^1(F_p).

Points are projective pairs ``(X, Z)``; the map is evaluated through its
homogenised numerator/denominator, so no modular inverse is needed per step.
``brent_orbit`` is plain Python (any size of p); ``brent_batch`` is the
numba-compiled batch version for p < 2**31, where products fit in int64.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn

NATIVE_PRIME_LIMIT = 2 ** 31


class StepBudgetExceeded(RuntimeError):
    pass


def brent_orbit(x0, z0, p, num, den):
    """Return ``(tail, period, X, Z)`` for the orbit of ``[x0 : z0]``.

    ``num`` and ``den`` are coefficient sequences (low degree first, both of
    length ``deg + 1``) already reduced mod p; ``(X, Z)`` is the first point
    of the cycle.
    """
    r = len(num) - 1
    budget = 4 * (p + 2)

    def step(x, z):
        a = num[r]
        b = den[r]
        zp = 1
        for i in range(r - 1, -1, -1):
            zp = zp * z % p
            a = (a * x + num[i] * zp) % p
            b = (b * x + den[i] * zp) % p
        return a, b

    def same(x1, z1, x2, z2):
        return (x1 * z2 - x2 * z1) % p == 0

    power = 1
    lam = 1
    tx, tz = x0, z0
    hx, hz = step(x0, z0)
    steps = 1
    while not same(tx, tz, hx, hz):
        if power == lam:
            tx, tz = hx, hz
            power *= 2
            lam = 0
        hx, hz = step(hx, hz)
        lam += 1
        steps += 1
        if steps > budget:
            raise StepBudgetExceeded("orbit longer than P^1(F_p) allows")
    tx, tz = x0, z0
    hx, hz = x0, z0
    for _ in range(lam):
        hx, hz = step(hx, hz)
    mu = 0
    while not same(tx, tz, hx, hz):
        tx, tz = step(tx, tz)
        hx, hz = step(hx, hz)
        mu += 1
    return mu, lam, tx, tz


_brent_native = njit(cache=True, nogil=True)(brent_orbit)


@njit(cache=True, nogil=True)
def _batch(xs, zs, primes, nums, dens, out):
    for k in range(primes.shape[0]):
        mu, lam, x, z = _brent_native(xs[k], zs[k], primes[k], nums[k], dens[k])
        out[k, 0] = mu
        out[k, 1] = lam
        out[k, 2] = x
        out[k, 3] = z


def brent_batch(xs, zs, primes, nums, dens):
    """Vectorised ``brent_orbit`` over rows; all primes must be < 2**31.

    Returns an int64 array of shape ``(n, 4)`` holding tail, period, X, Z.
    """
    xs = np.ascontiguousarray(xs, dtype=np.int64)
    zs = np.ascontiguousarray(zs, dtype=np.int64)
    primes = np.ascontiguousarray(primes, dtype=np.int64)
    nums = np.ascontiguousarray(nums, dtype=np.int64)
    dens = np.ascontiguousarray(dens, dtype=np.int64)
    if primes.size and int(primes.max()) >= NATIVE_PRIME_LIMIT:
        raise ValueError("native kernel limited to p < 2**31")
    out = np.zeros((primes.shape[0], 4), dtype=np.int64)
    _batch(xs, zs, primes, nums, dens, out)
    return out
