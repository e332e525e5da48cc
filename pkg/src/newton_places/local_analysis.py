"""Newton iteration at a single rational prime p.

Good primes are decided on P^1(F_p): the sequence converges p-adically to a
root exactly when the reduced orbit lands on a simple-root residue.  Bad
primes are reported as such; :func:`probe_bad_prime` can try to settle them
with an exact p-adic certificate.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np
from sympy import factorint, isprime

from . import _kernel
from .exact_algebra import (
    FactorProfile,
    RationalPoly,
    discriminant,
    rational_roots,
    resultant,
    squarefree_profile,
)
from .newton_core import RationalMap, build_newton_map


class Reason(str, Enum):
    LEADING_COEFF = "DividesLeadingCoeff"
    COEFF_DENOMINATOR = "DividesCoeffDenominator"
    DISC_RADICAL = "DividesDiscriminantOfRadical"
    DEGREE = "DividesDegree"
    DEGREE_MINUS_ONE = "DividesDegreeMinusOne"
    MULTIPLICITY = "DividesRootMultiplicity"
    REDUCTION = "ReductionDegreeDrops"
    X0_DENOMINATOR = "DividesX0Denominator"


class _Infinity:
    __slots__ = ()

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"


INF = _Infinity()
ProjPoint = Union[int, _Infinity]


def ord_p(x: Union[int, Fraction], p: int) -> float:
    """p-adic valuation; ``math.inf`` for zero."""
    if isinstance(x, Fraction):
        return _ord_int(x.numerator, p) - _ord_int(x.denominator, p)
    return _ord_int(x, p)


def _ord_int(n: int, p: int) -> float:
    if n == 0:
        return math.inf
    k = 0
    # strip p^(2^j) blocks first so huge valuations stay cheap
    while n % p == 0:
        pk, e = p, 1
        while n % (pk * pk) == 0:
            pk, e = pk * pk, e * 2
        n //= pk
        k += e
    return k


def _primes_of(n: Union[int, Fraction]) -> set[int]:
    if isinstance(n, Fraction):
        return _primes_of(n.numerator) | _primes_of(n.denominator)
    n = abs(int(n))
    if n <= 1:
        return set()
    return set(factorint(n))


# ---------------------------------------------------------------------------
# integer model of f and N
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegerMap:
    """``N = P / Q`` with integer coefficients, jointly primitive.

    ``P`` and ``Q`` are padded to length ``degree + 1`` so that they are the
    coefficient lists of the homogenised forms.
    """

    P: tuple[int, ...]
    Q: tuple[int, ...]
    degree: int
    hom_resultant: int

    @classmethod
    def from_map(cls, N: RationalMap) -> "IntegerMap":
        num, den = N.numerator, N.denominator
        coeffs = num.coeffs + den.coeffs
        scale = reduce(math.lcm, (c.denominator for c in coeffs), 1)
        P = [int(c * scale) for c in num.coeffs]
        Q = [int(c * scale) for c in den.coeffs]
        cont = reduce(math.gcd, P + Q, 0)
        P = [c // cont for c in P]
        Q = [c // cont for c in Q]
        r = N.degree
        P += [0] * (r + 1 - len(P))
        Q += [0] * (r + 1 - len(Q))
        return cls(tuple(P), tuple(Q), r, _hom_resultant(P, Q, r))

    def evaluate(self, a: int, b: int) -> tuple[int, int]:
        """Homogeneous image of ``[a : b]`` before cancelling common factors."""
        return _hom_eval(self.P, a, b), _hom_eval(self.Q, a, b)


def _hom_eval(coeffs: Sequence[int], a: int, b: int) -> int:
    r = len(coeffs) - 1
    acc = coeffs[r]
    bp = 1
    for i in range(r - 1, -1, -1):
        bp *= b
        acc = acc * a + coeffs[i] * bp
    return acc


def _hom_resultant(P: list[int], Q: list[int], r: int) -> int:
    """Resultant of the degree-r forms homogenising P and Q (up to sign)."""
    p_, q_ = RationalPoly(P), RationalPoly(Q)
    if p_.degree == r and q_.degree == r:
        return int(resultant(p_, q_))
    if p_.degree == r:
        return int(resultant(p_, q_) * p_.lc ** (r - max(q_.degree, 0))) if q_ else 0
    if q_.degree == r:
        return int(resultant(q_, p_) * q_.lc ** (r - max(p_.degree, 0))) if p_ else 0
    return 0


@dataclass
class NewtonSystem:
    """Everything about ``f`` that does not depend on x0 or p."""

    f: RationalPoly
    N: RationalMap
    imap: IntegerMap
    profile: FactorProfile
    f_int: tuple[int, ...]
    simple_block: tuple[int, ...]
    rational_simple_roots: tuple[Fraction, ...]
    residual_blocks: tuple[tuple[RationalPoly, int], ...]
    base_bad: dict[int, set[Reason]]

    @property
    def fprime_int(self) -> tuple[int, ...]:
        return tuple(i * c for i, c in enumerate(self.f_int) if i)


@lru_cache(maxsize=64)
def newton_system(f: RationalPoly) -> NewtonSystem:
    if f.degree < 2:
        raise ValueError("local analysis needs deg f >= 2")
    N = build_newton_map(f)
    imap = IntegerMap.from_map(N)
    prof = squarefree_profile(f)
    _, f_int = f.integer_primitive()
    simple = RationalPoly((1,))
    rat_simple: list[Fraction] = []
    residual = []
    for g, m in prof.parts:
        qs = sorted(rational_roots(g))
        resid = g
        for q in qs:
            resid = resid.exact_div(RationalPoly((-q, 1)))
        if m == 1:
            simple = g
            rat_simple = qs
        if resid.degree > 0:
            residual.append((resid, m))
    _, simple_int = simple.integer_primitive()

    bad: dict[int, set[Reason]] = {}

    def mark(primes: Iterable[int], why: Reason) -> None:
        for q in primes:
            bad.setdefault(q, set()).add(why)

    d = f.degree
    mark(_primes_of(f_int[-1]), Reason.LEADING_COEFF)
    for c in f.monic().coeffs:
        mark(_primes_of(c.denominator), Reason.COEFF_DENOMINATOR)
    mark(_primes_of(discriminant(prof.radical)), Reason.DISC_RADICAL)
    mark(_primes_of(d), Reason.DEGREE)
    mark(_primes_of(d - 1), Reason.DEGREE_MINUS_ONE)
    for _, m in prof.parts:
        if m >= 2:
            mark(_primes_of(m) | _primes_of(m - 1), Reason.MULTIPLICITY)
    mark(_primes_of(imap.hom_resultant), Reason.REDUCTION)
    return NewtonSystem(
        f, N, imap, prof, tuple(f_int), tuple(simple_int), tuple(rat_simple),
        tuple(residual), bad,
    )


@dataclass(frozen=True)
class BadPrimeSet:
    primes: tuple[int, ...]
    reasons: dict

    def __contains__(self, p: int) -> bool:
        return p in self.reasons


def compute_bad_primes(f: RationalPoly, x0: Fraction) -> BadPrimeSet:
    """Finite set of primes where the mod-p analysis is not trusted."""
    sys_ = newton_system(f)
    reasons = {q: set(w) for q, w in sys_.base_bad.items()}
    for q in _primes_of(Fraction(x0).denominator):
        reasons.setdefault(q, set()).add(Reason.X0_DENOMINATOR)
    return BadPrimeSet(tuple(sorted(reasons)), {q: frozenset(w) for q, w in reasons.items()})


# ---------------------------------------------------------------------------
# reduction mod p
# ---------------------------------------------------------------------------

class BadReduction(ValueError):
    def __init__(self, p: int, reason: Reason = Reason.REDUCTION):
        super().__init__(f"Newton map has bad reduction at p={p}")
        self.p = p
        self.reason = reason


@dataclass(frozen=True)
class ReducedMap:
    """The reduction of N on P^1(F_p)."""

    p: int
    num: tuple[int, ...]
    den: tuple[int, ...]

    def projective(self, x: int, z: int) -> tuple[int, int]:
        p = self.p
        return _hom_eval(self.num, x, z) % p, _hom_eval(self.den, x, z) % p

    def __call__(self, point: ProjPoint) -> ProjPoint:
        x, z = (1, 0) if point is INF else (point % self.p, 1)
        a, b = self.projective(x, z)
        return _normalise(a, b, self.p)


def _normalise(x: int, z: int, p: int) -> ProjPoint:
    if z % p == 0:
        return INF
    return x * pow(z, -1, p) % p


def _reduce_imap(imap: IntegerMap, p: int) -> ReducedMap:
    if imap.hom_resultant % p == 0:
        raise BadReduction(p)
    return ReducedMap(p, tuple(c % p for c in imap.P), tuple(c % p for c in imap.Q))


def reduce_newton_mod_p(N: RationalMap, p: int) -> ReducedMap:
    """Reduce N mod p; raises BadReduction on a degree drop or common root."""
    return _reduce_imap(IntegerMap.from_map(N), p)


def _start_point(x0: Fraction, p: int) -> tuple[int, int]:
    x0 = Fraction(x0)
    if x0.denominator % p == 0:
        return 1, 0
    return x0.numerator % p, x0.denominator % p


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Block:
    """Root label for a limit that is not a rational root."""

    factor: RationalPoly

    def __str__(self) -> str:
        return f"block: {self.factor}"


RootLabel = Union[Fraction, Block]


@dataclass(frozen=True)
class ConvergesTo:
    residue: int
    root: RootLabel
    tail_length: int = 0
    kind = "converges"


@dataclass(frozen=True)
class Diverges:
    tail_length: int
    period: int
    cycle_point: ProjPoint = None
    kind = "diverges"


@dataclass(frozen=True)
class ProbeResult:
    verdict: str  # "converges" | "diverges" | "inconclusive"
    root: Optional[RootLabel] = None
    step: Optional[int] = None
    certificate: str = ""


@dataclass(frozen=True)
class Bad:
    reasons: frozenset
    probe: Optional[ProbeResult] = None
    kind = "bad"


PrimeClassification = Union[ConvergesTo, Diverges, Bad]


def _eval_mod(coeffs: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def _finish(sys_: NewtonSystem, p: int, mu: int, lam: int, x: int, z: int) -> PrimeClassification:
    point = _normalise(x, z, p)
    if lam == 1 and point is not INF and _eval_mod(sys_.simple_block, point, p) == 0:
        for q in sys_.rational_simple_roots:
            if (q.numerator - point * q.denominator) % p == 0:
                return ConvergesTo(point, q, mu)
        for g, m in sys_.residual_blocks:
            if m != 1:
                continue
            _, gi = g.integer_primitive()
            if _eval_mod(gi, point, p) == 0:
                return ConvergesTo(point, Block(g), mu)
        raise AssertionError("simple-root residue without a matching block")
    return Diverges(mu, lam, point)


def classify_prime(f: RationalPoly, x0: Fraction, p: int, probe: bool = False) -> PrimeClassification:
    """Fate of the Newton sequence from x0 in Q_p."""
    return classify_primes(f, x0, [p], probe=probe)[0]


def default_threads() -> int:
    env = os.environ.get("NEWTON_PLACES_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def classify_primes(
    f: RationalPoly,
    x0: Fraction,
    primes: Sequence[int],
    probe: bool = False,
    threads: Optional[int] = None,
) -> list[PrimeClassification]:
    """Data-parallel :func:`classify_prime` over a list of primes."""
    x0 = Fraction(x0)
    sys_ = newton_system(f)
    bad = compute_bad_primes(f, x0)
    out: list[Optional[PrimeClassification]] = [None] * len(primes)
    native: list[int] = []
    for k, p in enumerate(primes):
        if p in bad:
            pr = probe_bad_prime(f, x0, p) if probe else None
            out[k] = Bad(bad.reasons[p], pr)
        elif p < _kernel.NATIVE_PRIME_LIMIT:
            native.append(k)
        else:
            red = _reduce_imap(sys_.imap, p)
            sx, sz = _start_point(x0, p)
            mu, lam, x, z = _kernel.brent_orbit(sx, sz, p, red.num, red.den)
            out[k] = _finish(sys_, p, mu, lam, x, z)
    if native:
        ps = np.array([primes[k] for k in native], dtype=np.int64)
        P = np.array([[c % int(p) for c in sys_.imap.P] for p in ps], dtype=np.int64)
        Q = np.array([[c % int(p) for c in sys_.imap.Q] for p in ps], dtype=np.int64)
        starts = [_start_point(x0, int(p)) for p in ps]
        xs = np.array([s[0] for s in starts], dtype=np.int64)
        zs = np.array([s[1] for s in starts], dtype=np.int64)
        nthreads = threads or default_threads()
        if nthreads > 1 and len(ps) > 256:
            chunks = np.array_split(np.arange(len(ps)), nthreads * 4)
            with ThreadPoolExecutor(nthreads) as ex:
                parts = list(ex.map(
                    lambda ix: _kernel.brent_batch(xs[ix], zs[ix], ps[ix], P[ix], Q[ix]), chunks))
            res = np.concatenate(parts) if parts else np.zeros((0, 4), dtype=np.int64)
        else:
            res = _kernel.brent_batch(xs, zs, ps, P, Q)
        for k, row in zip(native, res.tolist()):
            out[k] = _finish(sys_, primes[k], *row)
    return out  # type: ignore[return-value]


def eventual_period(f: RationalPoly, x0: Fraction, p: int) -> Union[tuple[int, int], Bad]:
    """``(tail, period)`` of x0 mod p under the reduced map, or Bad."""
    c = classify_prime(f, x0, p)
    if isinstance(c, Bad):
        return c
    if isinstance(c, ConvergesTo):
        return c.tail_length, 1
    return c.tail_length, c.period


# ---------------------------------------------------------------------------
# exact orbits
# ---------------------------------------------------------------------------

class OrbitUndefined(ArithmeticError):
    pass


def _iterate_pairs(imap: IntegerMap, a: int, b: int) -> tuple[int, int]:
    """One exact step on coprime ``(a, b)``; ``b == 0`` encodes infinity.

    Common factors of the homogeneous images divide the resultant, so the
    cancellation never needs a gcd of two huge numbers.
    """
    A, B = imap.evaluate(a, b)
    R = imap.hom_resultant
    g = math.gcd(A % R, R) if R else math.gcd(A, B)
    if g > 1:
        g = math.gcd(g, B % g)
    if g > 1:
        A //= g
        B //= g
    if B < 0:
        A, B = -A, -B
    return A, B


@dataclass
class OrbitRecord:
    pairs: list[tuple[int, int]]
    periodic_flag: bool = False

    @property
    def entries(self) -> list[Fraction]:
        return [Fraction(a, b) for a, b in self.pairs]

    def __len__(self) -> int:
        return len(self.pairs)


def iterate_exact(f: RationalPoly, x0: Fraction) -> Iterator[tuple[int, int]]:
    """Yield coprime ``(numerator, denominator)`` of x0, x1, ... forever.

    A zero denominator means the iterate is infinity (the orbit then stays
    there).
    """
    imap = newton_system(f).imap
    x0 = Fraction(x0)
    a, b = x0.numerator, x0.denominator
    while True:
        yield a, b
        if b == 0:
            continue
        a, b = _iterate_pairs(imap, a, b)


def exact_orbit(f: RationalPoly, x0: Fraction, n_max: int) -> OrbitRecord:
    """x0, ..., x_{n_max} exactly; stops early if a value repeats."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    pairs: list[tuple[int, int]] = []
    seen = set()
    for n, (a, b) in enumerate(iterate_exact(f, x0)):
        if b == 0:
            raise OrbitUndefined(f"N is undefined at x_{n - 1} = {Fraction(*pairs[-1])}")
        if (a, b) in seen:
            pairs.append((a, b))
            return OrbitRecord(pairs, True)
        seen.add((a, b))
        pairs.append((a, b))
        if n >= n_max:
            return OrbitRecord(pairs, False)
    raise AssertionError("unreachable")


def is_eventually_periodic(f: RationalPoly, x0: Fraction, depth: int = 8) -> bool:
    """Cheap probe: does the exact orbit repeat (or hit infinity) within ``depth`` steps?"""
    try:
        return exact_orbit(f, x0, depth).periodic_flag
    except OrbitUndefined:
        return True


# ---------------------------------------------------------------------------
# bad primes: exact p-adic certificates
# ---------------------------------------------------------------------------

def _ord_hom(coeffs: Sequence[int], a: int, b: int, p: int) -> float:
    """ord_p of ``g(a/b)`` for an integer polynomial g (with b a p-adic unit or not)."""
    d = len(coeffs) - 1
    return _ord_int(_hom_eval(coeffs, a, b), p) - d * _ord_int(b, p)


def _pole_certificate(f_int: Sequence[int], v: int, p: int) -> Optional[str]:
    """Certify that ord_p(x) = v < 0 forces divergence, if the leading term dominates."""
    d = len(f_int) - 1
    lead = _ord_int(f_int[d], p) + d * v
    dlead = _ord_int(d * f_int[d], p) + (d - 1) * v
    gap_f = min((_ord_int(c, p) + i * v - lead for i, c in enumerate(f_int[:d]) if c), default=math.inf)
    gap_d = min(
        (_ord_int(i * c, p) + (i - 1) * v - dlead for i, c in enumerate(f_int[:d]) if i and c),
        default=math.inf,
    )
    gap = min(gap_f, gap_d)
    if gap <= 0:
        return None
    o_d, o_d1 = _ord_int(d, p), _ord_int(d - 1, p)
    if o_d1 >= gap:
        return None
    shift = o_d1 - o_d
    if shift < 0:
        return f"pole of order {-v}: leading term dominates and ord_p drops by {-shift} per step"
    if shift == 0:
        return f"pole of order {-v}: leading term dominates and ord_p is stationary"
    return None


def probe_bad_prime(
    f: RationalPoly,
    x0: Fraction,
    p: int,
    n_max: int = 20,
    max_bits: int = 1 << 22,
) -> ProbeResult:
    """Try to settle the p-adic fate at a bad prime from the exact orbit.

    Convergence is certified by Hensel's condition ord f(x) > 2 ord f'(x) at a
    p-integral iterate; divergence by a dominating pole whose order cannot
    recover.  Otherwise the answer is inconclusive.
    """
    sys_ = newton_system(f)
    f_int = sys_.f_int
    fp_int = sys_.fprime_int
    d = len(f_int) - 1
    seen = set()
    for n, (a, b) in enumerate(iterate_exact(f, x0)):
        if n > n_max or a.bit_length() + b.bit_length() > max_bits:
            break
        if b == 0:
            return ProbeResult("diverges", None, n, "orbit reaches infinity exactly")
        if (a, b) in seen:
            x = Fraction(a, b)
            if f(x) == 0:
                return ProbeResult("converges", _label_exact(sys_, x), n, "orbit fixed at a root")
            return ProbeResult("diverges", None, n, "orbit eventually periodic off the roots")
        seen.add((a, b))
        v = _ord_int(a, p) - _ord_int(b, p)
        if v < 0:
            cert = _pole_certificate(f_int, int(v), p)
            if cert:
                return ProbeResult("diverges", None, n, cert)
            continue
        of = _ord_hom(f_int, a, b, p)
        if of == math.inf:
            x = Fraction(a, b)
            return ProbeResult("converges", _label_exact(sys_, x), n, "iterate is a root")
        ofp = _ord_hom(fp_int, a, b, p)
        if of > 2 * ofp:
            label = _label_hensel(sys_, a, b, p, ofp)
            return ProbeResult(
                "converges", label, n, f"Hensel at x_{n}: ord f = {of} > 2 ord f' = {2 * ofp}")
    return ProbeResult("inconclusive", None, None, f"no certificate within {n_max} steps")


def _label_exact(sys_: NewtonSystem, x: Fraction) -> RootLabel:
    for g, _ in sys_.profile.parts:
        if g(x) == 0:
            if x in rational_roots(g):
                return x
    return x


def _label_hensel(sys_: NewtonSystem, a: int, b: int, p: int, ofp: float) -> RootLabel:
    # the limit is the unique root within |f'(x)| of x
    for q in sorted(rational_roots(sys_.f)):
        diff = Fraction(a, b) - q if a.bit_length() < 4096 else None
        if diff is None:
            dv = _ord_int(a * q.denominator - q.numerator * b, p) - _ord_int(b * q.denominator, p)
        else:
            dv = ord_p(diff, p)
        if dv > ofp:
            return q
    best, best_ord = None, -math.inf
    for g, m in sys_.residual_blocks:
        _, gi = g.integer_primitive()
        o = _ord_hom(gi, a, b, p)
        if o > best_ord:
            best, best_ord = g, o
    return Block(best) if best is not None else Block(sys_.profile.radical)


# ---------------------------------------------------------------------------
# primitive prime factors
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4)
def _small_primes(bound: int) -> tuple[int, ...]:
    sieve = bytearray([1]) * (bound + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(bound ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytes(len(range(i * i, bound + 1, i)))
    return tuple(i for i in range(bound + 1) if sieve[i])


@dataclass(frozen=True)
class PrimitiveFactors:
    """Primes of num(x_n - gamma) absent from every earlier numerator.

    ``cofactor`` is the part of the primitive component left unfactored
    (1 when ``primes`` is complete); when it is > 1 the primitive set is
    nonempty even though its members are not all listed.
    """

    n: int
    primes: frozenset
    cofactor: int = 1

    @property
    def nonempty(self) -> bool:
        return bool(self.primes) or self.cofactor > 1


def _strip_common(c: int, others: Sequence[int]) -> int:
    for m in others:
        g = math.gcd(c, m)
        while g > 1:
            c //= g
            g = math.gcd(c, g)
    return c


def _split_primitive(c: int, trial_bound: int) -> tuple[set[int], int]:
    primes: set[int] = set()
    for q in _small_primes(trial_bound):
        if c == 1 or q * q > c:
            break
        if c % q == 0:
            primes.add(q)
            while c % q == 0:
                c //= q
    if c > 1 and (c < trial_bound * trial_bound or isprime(c)):
        primes.add(c)
        c = 1
    return primes, c


def primitive_prime_factors(
    f: RationalPoly,
    x0: Fraction,
    gamma: Fraction,
    n_max: int,
    trial_bound: int = 100_000,
) -> list[PrimitiveFactors]:
    """Primitive prime divisors of the numerators of x_n - gamma, n = 0..n_max."""
    gamma = Fraction(gamma)
    gn, gd = gamma.numerator, gamma.denominator
    numerators: list[int] = []
    out: list[PrimitiveFactors] = []
    for n, (a, b) in enumerate(iterate_exact(f, x0)):
        if n > n_max:
            break
        if b == 0:
            raise OrbitUndefined(f"orbit reaches infinity at n={n}")
        num = a * gd - gn * b
        if num == 0:
            raise ValueError(f"orbit hits gamma at n={n}")
        # common factors with b * gd can only involve primes of gd
        for q in _primes_of(gd):
            e = min(_ord_int(num, q), _ord_int(b, q) + _ord_int(gd, q))
            num //= q ** int(e)
        num = abs(num)
        prim = _strip_common(num, numerators)
        primes, rest = _split_primitive(prim, trial_bound)
        out.append(PrimitiveFactors(n, frozenset(primes), rest))
        numerators.append(num)
    return out
