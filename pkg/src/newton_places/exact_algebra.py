"""Exact arithmetic over Q: dense univariate polynomials, gcds, squarefree
decomposition, resultants, rational roots and the quotient rings Q[x]/(m).

Coefficient lists are stored low degree first, so ``coeffs[i]`` is the
coefficient of ``t**i``.  Nothing in this module touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import product
from math import gcd, lcm
from typing import Iterable, Sequence, Union

from sympy import factorint

Rational = Union[int, Fraction]


class NotInvertibleError(ArithmeticError):
    """Raised when inverting a zero divisor of Q[x]/(m).

    ``factor`` is the nontrivial (monic) common factor of the element and the
    modulus that was discovered on the way.
    """

    def __init__(self, factor: "RationalPoly"):
        super().__init__(f"not invertible: shares the factor {factor} with the modulus")
        self.factor = factor


# ---------------------------------------------------------------------------
# ring-agnostic dense helpers (coefficients: Fraction or NFElement)
# ---------------------------------------------------------------------------

def _strip(coeffs: Sequence) -> tuple:
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


def _add(a: Sequence, b: Sequence) -> tuple:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = out[i] + c
    return _strip(out)


def _neg(a: Sequence) -> tuple:
    return tuple(-c for c in a)


def _mul(a: Sequence, b: Sequence) -> tuple:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _strip(out)


def _divmod(a: Sequence, b: Sequence) -> tuple[tuple, tuple]:
    """Long division over a field; ``b`` must be nonzero."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    db = len(b) - 1
    lead_inv = 1 / b[-1] if not isinstance(b[-1], int) else Fraction(1, b[-1])
    if len(rem) <= db:
        return (), _strip(rem)
    quo = [0] * (len(rem) - db)
    for k in range(len(rem) - 1, db - 1, -1):
        c = rem[k]
        if c == 0:
            continue
        q = c * lead_inv
        quo[k - db] = q
        for j in range(db + 1):
            rem[k - db + j] = rem[k - db + j] - q * b[j]
    return _strip(quo), _strip(rem[:db])


def synthetic_division(coeffs: Sequence, a) -> tuple[tuple, object]:
    """Divide by ``t - a``; returns ``(quotient, remainder)``."""
    if not coeffs:
        return (), 0
    quo = [0] * (len(coeffs) - 1)
    acc = coeffs[-1]
    for i in range(len(coeffs) - 2, -1, -1):
        quo[i] = acc
        acc = acc * a + coeffs[i]
    return _strip(quo), acc


def linear_power(a, k: int) -> tuple:
    """Coefficients of ``(t - a)**k``."""
    out: tuple = (Fraction(1),)
    for _ in range(k):
        out = _mul(out, (-a, Fraction(1)))
    return out


def horner(coeffs: Sequence, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------
# RationalPoly
# ---------------------------------------------------------------------------

def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"coefficient {c!r} is not an exact rational")


class RationalPoly:
    """Immutable dense polynomial in ``t`` with exact rational coefficients."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable[Rational] = ()):
        self.coeffs: tuple[Fraction, ...] = _strip([_as_fraction(c) for c in coeffs])
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def t(cls) -> "RationalPoly":
        return cls((0, 1))

    @classmethod
    def constant(cls, c: Rational) -> "RationalPoly":
        return cls((c,))

    @classmethod
    def from_roots(cls, roots: Iterable[Rational], lead: Rational = 1) -> "RationalPoly":
        out = cls((lead,))
        for a in roots:
            out = out * cls((-_as_fraction(a), 1))
        return out

    @classmethod
    def monomial(cls, k: int, c: Rational = 1) -> "RationalPoly":
        return cls([0] * k + [c])

    # basic properties -----------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __eq__(self, other) -> bool:
        if isinstance(other, RationalPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RationalPoly((other,)).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    # arithmetic -----------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "RationalPoly":
        if isinstance(other, RationalPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return RationalPoly((other,))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RationalPoly(_add(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly(_neg(self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RationalPoly(_add(self.coeffs, _neg(other.coeffs)))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RationalPoly(_mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative polynomial power")
        out, base = RationalPoly((1,)), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __divmod__(self, other):
        other = self._coerce(other)
        q, r = _divmod(self.coeffs, other.coeffs)
        return RationalPoly(q), RationalPoly(r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __truediv__(self, c):
        if isinstance(c, (int, Fraction)):
            c = _as_fraction(c)
            return RationalPoly(x / c for x in self.coeffs)
        return NotImplemented

    def exact_div(self, other: "RationalPoly") -> "RationalPoly":
        """Quotient of an exact division; raises ArithmeticError otherwise."""
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def __call__(self, x):
        return horner(self.coeffs, x)

    def derivative(self) -> "RationalPoly":
        return RationalPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def monic(self) -> "RationalPoly":
        if not self.coeffs:
            return self
        return self / self.lc

    def compose(self, inner: "RationalPoly") -> "RationalPoly":
        acc = RationalPoly()
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def taylor_shift(self, a: Rational) -> "RationalPoly":
        """Coefficients of ``self(t + a)``."""
        return self.compose(RationalPoly((a, 1)))

    def integer_primitive(self) -> tuple[Fraction, list[int]]:
        """Return ``(c, ints)`` with ``self == c * sum(ints[i] t^i)``.

        ``ints`` has content 1 and a positive leading coefficient.
        """
        if not self.coeffs:
            return Fraction(0), []
        den = reduce(lcm, (c.denominator for c in self.coeffs), 1)
        ints = [int(c * den) for c in self.coeffs]
        cont = reduce(gcd, ints, 0)
        if ints[-1] < 0:
            cont = -cont
        return Fraction(cont, den), [x // cont for x in ints]

    # display --------------------------------------------------------------
    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            if a.denominator == 1:
                num = str(a.numerator)
            else:
                num = f"({a.numerator}/{a.denominator})"
            if mono and a == 1:
                body = mono
            elif mono:
                body = f"{num}*{mono}"
            else:
                body = num
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"RationalPoly({self})"


T = RationalPoly.t()


# ---------------------------------------------------------------------------
# gcd, squarefree decomposition, resultants
# ---------------------------------------------------------------------------

def _int_content(a: list[int]) -> int:
    return reduce(gcd, a, 0)


def _int_prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of integer coefficient lists (lc(b)^k * a mod b)."""
    rem = list(a)
    db = len(b) - 1
    lb = b[-1]
    while len(rem) - 1 >= db and rem:
        c = rem[-1]
        shift = len(rem) - 1 - db
        rem = [x * lb for x in rem]
        for j in range(db + 1):
            rem[shift + j] -= c * b[j]
        while rem and rem[-1] == 0:
            rem.pop()
    return rem


def poly_gcd(a: RationalPoly, b: RationalPoly) -> RationalPoly:
    """Monic gcd by a primitive pseudo-remainder sequence over Z."""
    if a.is_zero() and b.is_zero():
        raise ValueError("undefined gcd: both polynomials are zero")
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    _, x = a.integer_primitive()
    _, y = b.integer_primitive()
    if len(x) < len(y):
        x, y = y, x
    while y:
        r = _int_prem(x, y)
        if r:
            c = _int_content(r)
            r = [v // c for v in r]
        x, y = y, r
    return RationalPoly(x).monic()


@dataclass(frozen=True)
class FactorProfile:
    """``unit * prod(factor**mult)``; factors monic, squarefree, pairwise coprime."""

    unit: Fraction
    parts: tuple[tuple[RationalPoly, int], ...]

    def expand(self) -> RationalPoly:
        out = RationalPoly((self.unit,))
        for g, m in self.parts:
            out = out * g ** m
        return out

    @property
    def radical(self) -> RationalPoly:
        out = RationalPoly((1,))
        for g, _ in self.parts:
            out = out * g
        return out

    @property
    def distinct_root_count(self) -> int:
        return sum(g.degree for g, _ in self.parts)

    @property
    def is_squarefree(self) -> bool:
        return all(m == 1 for _, m in self.parts)

    def multiplicity_of(self, a) -> int:
        """Multiplicity of ``a`` as a root (0 if not a root)."""
        for g, m in self.parts:
            if g(a) == 0:
                return m
        return 0


def squarefree_profile(f: RationalPoly) -> FactorProfile:
    """Yun's squarefree decomposition in characteristic zero."""
    if f.degree < 1:
        raise ValueError("constant polynomial has no squarefree profile")
    unit = f.lc
    g = f.monic()
    dg = g.derivative()
    a = poly_gcd(g, dg)
    b = g.exact_div(a)
    c = dg.exact_div(a)
    d = c - b.derivative()
    parts = []
    i = 1
    while b.degree > 0:
        h = poly_gcd(b, d)
        if h.degree > 0:
            parts.append((h, i))
        b = b.exact_div(h)
        c = d.exact_div(h)
        d = c - b.derivative()
        i += 1
    return FactorProfile(unit, tuple(parts))


def radical(f: RationalPoly) -> RationalPoly:
    """Monic squarefree polynomial with the same roots as ``f``."""
    if f.degree < 1:
        raise ValueError("constant polynomial has no radical")
    return f.monic().exact_div(poly_gcd(f, f.derivative()))


def resultant(a: RationalPoly, b: RationalPoly) -> Fraction:
    """Resultant via the Euclidean recurrence over Q."""
    if a.is_zero() or b.is_zero():
        return Fraction(0)
    sign = 1
    acc = Fraction(1)
    while True:
        da, db = a.degree, b.degree
        if db == 0:
            return sign * acc * b.lc ** da
        r = a % b
        if r.is_zero():
            return Fraction(0)
        if (da * db) % 2:
            sign = -sign
        acc *= b.lc ** (da - r.degree)
        a, b = b, r


def discriminant(f: RationalPoly) -> Fraction:
    """``(-1)^(d(d-1)/2) Res(f, f') / lc(f)``; zero iff ``f`` has a repeated root."""
    d = f.degree
    if d < 1:
        raise ValueError("discriminant of a constant polynomial")
    if d == 1:
        return Fraction(1)
    s = -1 if (d * (d - 1) // 2) % 2 else 1
    return s * resultant(f, f.derivative()) / f.lc


# ---------------------------------------------------------------------------
# rational roots
# ---------------------------------------------------------------------------

def _divisors(n: int) -> list[int]:
    n = abs(n)
    fac = factorint(n)
    divs = [1]
    for q, e in fac.items():
        divs = [d * q ** k for d in divs for k in range(e + 1)]
    return sorted(divs)


def rational_roots(f: RationalPoly) -> set[Fraction]:
    """All q in Q with f(q) = 0, from the divisors of the end coefficients."""
    if f.is_zero():
        raise ValueError("the zero polynomial vanishes everywhere")
    _, ints = f.integer_primitive()
    roots: set[Fraction] = set()
    k = 0
    while ints[k] == 0:
        k += 1
    if k:
        roots.add(Fraction(0))
    ints = ints[k:]
    if len(ints) == 1:
        return roots
    g = RationalPoly(ints)
    for p_, q_ in product(_divisors(ints[0]), _divisors(ints[-1])):
        for s in (1, -1):
            cand = Fraction(s * p_, q_)
            if cand not in roots and g(cand) == 0:
                roots.add(cand)
    return roots


# ---------------------------------------------------------------------------
# Q[x]/(m)
# ---------------------------------------------------------------------------

class NumberField:
    """The algebra Q[x]/(m) for a squarefree modulus ``m``.

    Irreducibility is not checked; a reducible modulus only shows up when an
    inversion hits a zero divisor.
    """

    def __init__(self, modulus: RationalPoly):
        if modulus.degree < 1:
            raise ValueError("modulus must have degree >= 1")
        m = modulus.monic()
        if poly_gcd(m, m.derivative()).degree > 0:
            raise ValueError(f"modulus {m} is not squarefree")
        self.modulus = m

    @property
    def degree(self) -> int:
        return self.modulus.degree

    def __eq__(self, other) -> bool:
        return isinstance(other, NumberField) and self.modulus == other.modulus

    def __hash__(self) -> int:
        return hash(self.modulus)

    def __repr__(self) -> str:
        return f"NumberField({self.modulus})"

    def element(self, rep) -> "NFElement":
        if isinstance(rep, (int, Fraction)):
            rep = RationalPoly((rep,))
        return NFElement(self, rep)

    @property
    def gen(self) -> "NFElement":
        """Class of ``x``."""
        return self.element(RationalPoly.t())

    @property
    def one(self) -> "NFElement":
        return self.element(1)

    @property
    def zero(self) -> "NFElement":
        return self.element(0)


class NFElement:
    """Element of Q[x]/(m), always stored reduced modulo ``m``."""

    __slots__ = ("field", "rep")

    def __init__(self, field: NumberField, rep: RationalPoly):
        self.field = field
        self.rep = rep % field.modulus if rep.degree >= field.degree else rep

    def _lift(self, other) -> "NFElement":
        if isinstance(other, NFElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return NFElement(self.field, RationalPoly((other,)))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return NFElement(self.field, self.rep + other.rep)

    __radd__ = __add__

    def __neg__(self):
        return NFElement(self.field, -self.rep)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return NFElement(self.field, self.rep - other.rep)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return NFElement(self.field, self.rep * other.rep)

    __rmul__ = __mul__

    def inverse(self) -> "NFElement":
        # extended Euclid on (rep, m)
        m = self.field.modulus
        r0, r1 = m, self.rep
        s0, s1 = RationalPoly(), RationalPoly((1,))
        while r1:
            q, r = divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
        if r0.degree != 0:
            raise NotInvertibleError(r0.monic() if r0 else m)
        return NFElement(self.field, s0 / r0.lc)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = self.field.one, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.rep == RationalPoly((other,))
        if isinstance(other, NFElement):
            return self.field == other.field and self.rep == other.rep
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field, self.rep))

    def is_zero(self) -> bool:
        return self.rep.is_zero()

    def __str__(self) -> str:
        return str(self.rep).replace("t", "x")

    def __repr__(self) -> str:
        return f"NFElement({self} mod {str(self.field.modulus).replace('t', 'x')})"


def nf_root_check(f: RationalPoly, field: NumberField, alpha: NFElement) -> bool:
    """True iff f(alpha) = 0 in Q[x]/(m)."""
    if alpha.field != field:
        raise ValueError("alpha does not belong to the given field")
    value = f(alpha)
    if isinstance(value, NFElement):
        return value.is_zero()
    return value == 0


class NFPoly:
    """Polynomial in ``t`` with coefficients in one Q[x]/(m)."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs: Iterable):
        self.field = field
        self.coeffs = _strip([c if isinstance(c, NFElement) else field.element(c) for c in coeffs])

    @classmethod
    def lift(cls, field: NumberField, f: RationalPoly) -> "NFPoly":
        return cls(field, f.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> NFElement:
        return self.coeffs[-1] if self.coeffs else self.field.zero

    def __sub__(self, other: "NFPoly") -> "NFPoly":
        return NFPoly(self.field, _add(self.coeffs, _neg(other.coeffs)))

    def __add__(self, other: "NFPoly") -> "NFPoly":
        return NFPoly(self.field, _add(self.coeffs, other.coeffs))

    def __mul__(self, other):
        if isinstance(other, NFPoly):
            return NFPoly(self.field, _mul(self.coeffs, other.coeffs))
        return NFPoly(self.field, [c * other for c in self.coeffs])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, NFPoly):
            return self.field == other.field and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def __call__(self, x):
        return horner(self.coeffs, x)

    def div_linear(self, a) -> tuple["NFPoly", NFElement]:
        q, r = synthetic_division(self.coeffs, a)
        return NFPoly(self.field, q), (r if isinstance(r, NFElement) else self.field.element(r))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c.is_zero():
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            terms.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(terms)

    def __repr__(self) -> str:
        return f"NFPoly({self})"
