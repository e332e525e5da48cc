"""The Newton map of a polynomial as a dynamical system on P^1.

Everything here is root-free: the root data of ``f`` is reached through
``rad(f)``, ``gcd(f, f')`` and, for algebraic roots, arithmetic inside a
caller-supplied ``Q[x]/(m)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .exact_algebra import (
    NFElement,
    NFPoly,
    NumberField,
    RationalPoly,
    discriminant,
    linear_power,
    poly_gcd,
    rational_roots,
    squarefree_profile,
)

Scalar = Union[Fraction, NFElement]


@dataclass(frozen=True)
class RationalMap:
    """``numerator / denominator`` in lowest terms with a monic denominator."""

    numerator: RationalPoly
    denominator: RationalPoly

    def __post_init__(self):
        if self.denominator.is_zero():
            raise ZeroDivisionError("rational map with zero denominator")

    @classmethod
    def reduced(cls, num: RationalPoly, den: RationalPoly) -> "RationalMap":
        g = poly_gcd(num, den) if num else den.monic()
        num, den = num.exact_div(g), den.exact_div(g)
        c = den.lc
        return cls(num / c, den / c)

    @property
    def degree(self) -> int:
        return max(self.numerator.degree, self.denominator.degree, 0)

    def __call__(self, x: Fraction) -> Fraction:
        den = self.denominator(x)
        if den == 0:
            raise ZeroDivisionError(f"map has a pole at {x}")
        return Fraction(self.numerator(x)) / den

    def same_map(self, num: RationalPoly, den: RationalPoly) -> bool:
        """True if ``num / den`` equals this map as a rational function."""
        return self.numerator * den == num * self.denominator

    def __str__(self) -> str:
        return f"({self.numerator}) / ({self.denominator})"


@dataclass(frozen=True)
class AffineMap:
    """``sigma(t) = B t + C``."""

    B: Fraction
    C: Fraction = Fraction(0)

    def __post_init__(self):
        if self.B == 0:
            raise ValueError("affine map needs B != 0")
        object.__setattr__(self, "B", Fraction(self.B))
        object.__setattr__(self, "C", Fraction(self.C))

    def __call__(self, x):
        return self.B * x + self.C

    def inverse(self) -> "AffineMap":
        return AffineMap(1 / self.B, -self.C / self.B)

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """``self o inner``."""
        return AffineMap(self.B * inner.B, self.B * inner.C + self.C)

    def as_poly(self) -> RationalPoly:
        return RationalPoly((self.C, self.B))


IDENTITY = AffineMap(Fraction(1), Fraction(0))


def _root_data(f: RationalPoly) -> tuple[RationalPoly, RationalPoly]:
    """``(D, rad)`` with ``f' = lc(f) * D * H`` and ``f = lc(f) * rad * H``."""
    h = poly_gcd(f, f.derivative())
    scale = h * f.lc
    D = f.derivative().exact_div(scale)
    rad = f.exact_div(scale)
    return D, rad


def build_newton_map(f: RationalPoly) -> RationalMap:
    """Reduced form of ``t - f/f'``, i.e. ``(t D - rad) / D`` normalised."""
    if f.degree < 1:
        raise ValueError("Newton map undefined for a constant polynomial")
    if f.degree == 1:
        return RationalMap(RationalPoly((-f[0] / f[1],)), RationalPoly((1,)))
    D, rad = _root_data(f)
    return RationalMap.reduced(RationalPoly.t() * D - rad, D)


def compute_D(f: RationalPoly) -> RationalPoly:
    if f.degree < 2:
        raise ValueError("D(t) needs deg f >= 2")
    return _root_data(f)[0]


def _lift(field_: NumberField, f: RationalPoly) -> NFPoly:
    return NFPoly.lift(field_, f)


def compute_E_alpha(f: RationalPoly, alpha: Scalar):
    """``E_alpha = (D - rad/(t - alpha)) / (t - alpha)``, both divisions exact.

    Returns a RationalPoly for rational ``alpha`` and an NFPoly when ``alpha``
    lives in some Q[x]/(m).
    """
    if f.degree < 2:
        raise ValueError("E_alpha needs deg f >= 2")
    D, rad = _root_data(f)
    h = poly_gcd(f, f.derivative())
    if isinstance(alpha, NFElement):
        fld = alpha.field
        q1, rem = _lift(fld, rad).div_linear(alpha)
        if not rem.is_zero():
            raise ValueError(f"{alpha} is not a root of {f}")
        if h(alpha) == 0:
            raise ValueError("E_alpha defined only at simple roots")
        E, rem = (_lift(fld, D) - q1).div_linear(alpha)
        if not rem.is_zero():
            raise ArithmeticError("inexact division computing E_alpha")
        return E
    alpha = Fraction(alpha)
    lin = RationalPoly((-alpha, 1))
    q1, rem = divmod(rad, lin)
    if rem:
        raise ValueError(f"{alpha} is not a root of {f}")
    if h(alpha) == 0:
        raise ValueError("E_alpha defined only at simple roots")
    E, rem = divmod(D - q1, lin)
    if rem:
        raise ArithmeticError("inexact division computing E_alpha")
    return E


def _target_E(f: RationalPoly, alpha: Scalar, r: int):
    """``(d-1) (t - alpha)^(r-2)`` in the ring of ``alpha``."""
    c = Fraction(f.degree - 1)
    if isinstance(alpha, NFElement):
        return NFPoly(alpha.field, linear_power(alpha, r - 2)) * c
    return RationalPoly(linear_power(Fraction(alpha), r - 2)) * c


@dataclass(frozen=True)
class FixedPoints:
    rational: frozenset
    residual: RationalPoly
    includes_infinity: bool = True


def fixed_points(f: RationalPoly) -> FixedPoints:
    if f.degree < 2:
        raise ValueError("fixed point set needs deg f >= 2")
    _, rad = _root_data(f)
    roots = rational_roots(rad)
    residual = rad
    for q in roots:
        residual = residual.exact_div(RationalPoly((-q, 1)))
    return FixedPoints(frozenset(roots), residual.monic(), True)


def _linear_multiplicity(g, alpha: Scalar) -> int:
    """Multiplicity of ``t - alpha`` in ``g`` (RationalPoly or NFPoly)."""
    k = 0
    if isinstance(alpha, NFElement):
        while g.degree >= 0:
            q, r = g.div_linear(alpha)
            if not r.is_zero():
                break
            g, k = q, k + 1
        return k
    lin = RationalPoly((-alpha, 1))
    while g:
        q, r = divmod(g, lin)
        if r:
            break
        g, k = q, k + 1
    return k


def ramification_at_fixed_point(f: RationalPoly, alpha: Scalar) -> int:
    """Local multiplicity of N at the fixed point alpha: ord of (t-alpha) in N - alpha."""
    N = build_newton_map(f)
    if isinstance(alpha, NFElement):
        g = _lift(alpha.field, N.numerator) - _lift(alpha.field, N.denominator) * alpha
    else:
        g = N.numerator - N.denominator * Fraction(alpha)
    return _linear_multiplicity(g, alpha)


def is_totally_ramified_at(f: RationalPoly, alpha: Scalar) -> bool:
    E = compute_E_alpha(f, alpha)
    r = squarefree_profile(f).distinct_root_count
    by_E = E == _target_E(f, alpha, r)
    by_mult = ramification_at_fixed_point(f, alpha) == build_newton_map(f).degree
    if by_E != by_mult:
        raise AssertionError("E_alpha criterion and local multiplicity disagree")
    return by_E


# ---------------------------------------------------------------------------
# exceptionality
# ---------------------------------------------------------------------------

class Verdict(str, Enum):
    EXCEPTIONAL = "Exceptional"
    NOT_EXCEPTIONAL = "NotExceptional"
    UNRESOLVED = "Unresolved"


class Reason(str, Enum):
    MULTIPLE_ROOT = "MultipleRoot"
    FEW_DISTINCT_ROOTS = "FewDistinctRoots"
    E_ALPHA = "EAlphaCriterion"
    NORMAL_FORM = "NormalForm"
    IRREDUCIBLE_DEG3 = "IrreducibleDegree3Plus"


@dataclass(frozen=True)
class NormalForm:
    """``f(t) = A (t - alpha)^d + B (t - alpha)``; zeta is any root of ``z^(d-1) = -B/A``."""

    A: Scalar
    B: Scalar
    alpha: Scalar
    degree: int

    @property
    def zeta_equation(self) -> str:
        return f"z^{self.degree - 1} = {-self.B / self.A}"

    def __str__(self) -> str:
        return f"A={self.A}, B={self.B}, alpha={self.alpha}; zeta: {self.zeta_equation}"


@dataclass(frozen=True)
class IrrationalBlockWitness:
    """Evidence that no root of ``factor`` is exceptional for a squarefree f.

    Such a root would have to be the rational centre of a normal form, so it
    is enough that ``factor`` has no rational root; ``normal_form`` records
    the outcome of the normal-form test for f.
    """

    factor: RationalPoly
    normal_form: Optional["NormalForm"]

    def __str__(self) -> str:
        nf = "none" if self.normal_form is None else f"alpha={self.normal_form.alpha}"
        return f"{self.factor} has no rational root; normal form: {nf}"


@dataclass(frozen=True)
class RootBlock:
    """One block of roots: a rational root, an NF root, or an unsplit factor."""

    root: Union[Fraction, NFElement, RationalPoly]
    multiplicity: int
    verdict: Verdict
    reason: Reason
    witness: object = None

    @property
    def label(self) -> str:
        if isinstance(self.root, RationalPoly):
            return f"roots of {self.root}"
        if isinstance(self.root, NFElement):
            return f"x mod {str(self.root.field.modulus).replace('t', 'x')}"
        return str(self.root)


@dataclass(frozen=True)
class ExceptionalityReport:
    f: RationalPoly
    blocks: tuple[RootBlock, ...]
    normal_form: Optional[NormalForm] = None

    def verdict_of(self, root) -> Verdict:
        for b in self.blocks:
            if not isinstance(b.root, RationalPoly) and b.root == root:
                return b.verdict
        raise KeyError(root)

    @property
    def exceptional(self) -> list[RootBlock]:
        return [b for b in self.blocks if b.verdict is Verdict.EXCEPTIONAL]


def _e_alpha_block(f: RationalPoly, alpha: Scalar, root_desc, r: int) -> RootBlock:
    E = compute_E_alpha(f, alpha)
    ok = E == _target_E(f, alpha, r)
    verdict = Verdict.EXCEPTIONAL if ok else Verdict.NOT_EXCEPTIONAL
    return RootBlock(root_desc, 1, verdict, Reason.E_ALPHA, E)


def classify_exceptional_roots(
    f: RationalPoly, moduli: Sequence[RationalPoly] = ()
) -> ExceptionalityReport:
    """Decide exceptionality for every distinct-root block of ``f``.

    ``moduli`` optionally supplies minimal polynomials of irrational simple
    roots; each must divide the corresponding simple-root block.  Without them
    such roots of a non-squarefree ``f`` are reported Unresolved.
    """
    if f.degree < 2:
        raise ValueError("exceptionality needs deg f >= 2")
    prof = squarefree_profile(f)
    r = prof.distinct_root_count
    d = f.degree
    blocks: list[RootBlock] = []
    nf_witness = None

    # split every multiplicity block into rational roots and a residual factor
    split = []
    for g, m in prof.parts:
        qs = sorted(rational_roots(g))
        resid = g
        for q in qs:
            resid = resid.exact_div(RationalPoly((-q, 1)))
        split.append((m, qs, resid))

    squarefree = prof.is_squarefree
    if squarefree and d >= 3:
        nf_witness = equiv_to_standard_form(f)

    for m, qs, resid in split:
        if m >= 2:
            for q in qs:
                blocks.append(RootBlock(q, m, Verdict.EXCEPTIONAL, Reason.MULTIPLE_ROOT, m))
            if resid.degree > 0:
                blocks.append(RootBlock(resid, m, Verdict.EXCEPTIONAL, Reason.MULTIPLE_ROOT, m))
            continue
        if r <= 2:
            for q in qs:
                blocks.append(RootBlock(q, 1, Verdict.EXCEPTIONAL, Reason.FEW_DISTINCT_ROOTS, r))
            if resid.degree > 0:
                blocks.append(RootBlock(resid, 1, Verdict.EXCEPTIONAL, Reason.FEW_DISTINCT_ROOTS, r))
            continue
        for q in qs:
            blk = _e_alpha_block(f, q, q, r)
            if nf_witness is not None and nf_witness.alpha == q:
                assert blk.verdict is Verdict.EXCEPTIONAL
                blk = RootBlock(q, 1, Verdict.EXCEPTIONAL, Reason.NORMAL_FORM, nf_witness)
            blocks.append(blk)
        if resid.degree <= 0:
            continue
        if squarefree:
            # an exceptional root of a squarefree f of degree >= 3 is rational
            reason = Reason.IRREDUCIBLE_DEG3 if (d == 3 and not qs) else Reason.NORMAL_FORM
            witness = IrrationalBlockWitness(resid, nf_witness)
            blocks.append(RootBlock(resid, 1, Verdict.NOT_EXCEPTIONAL, reason, witness))
            continue
        remaining = resid
        for mod in moduli:
            mod = mod.monic()
            q_, rem = divmod(remaining, mod)
            if rem or mod.degree < 1:
                continue
            fld = NumberField(mod)
            blocks.append(_e_alpha_block(f, fld.gen, fld.gen, r))
            remaining = q_
        if remaining.degree > 0:
            blocks.append(RootBlock(remaining, 1, Verdict.UNRESOLVED, Reason.E_ALPHA, None))
    return ExceptionalityReport(f, tuple(blocks), nf_witness)


# ---------------------------------------------------------------------------
# dynamical equivalence
# ---------------------------------------------------------------------------

def conjugate_polynomial(f: RationalPoly, A: Fraction, sigma: AffineMap) -> RationalPoly:
    """``g(t) = A * f(B t + C)``."""
    if A == 0:
        raise ValueError("dynamical equivalence needs A != 0")
    return f.compose(sigma.as_poly()) * Fraction(A)


def verify_conjugacy(f: RationalPoly, g: RationalPoly, sigma: AffineMap) -> bool:
    """Exact check of ``N_g = sigma^-1 o N_f o sigma`` as rational functions."""
    Nf, Ng = build_newton_map(f), build_newton_map(g)
    s = sigma.as_poly()
    P, Q = Nf.numerator.compose(s), Nf.denominator.compose(s)
    # sigma^-1(P/Q) = (P - C Q) / (B Q)
    return Ng.same_map(P - Q * sigma.C, Q * sigma.B)


def equiv_to_standard_form(f: RationalPoly) -> Optional[NormalForm]:
    """Witness that ``f`` is dynamically equivalent to ``t^d - t``, or None."""
    d = f.degree
    if d < 2:
        raise ValueError("normal form needs deg f >= 2")
    if discriminant(f) == 0:
        raise ValueError("normal form requires squarefree f")
    A = f.lc
    if d == 2:
        qs = sorted(rational_roots(f))
        if qs:
            alpha = qs[0]
            return NormalForm(A, f.derivative()(alpha), alpha, 2)
        fld = NumberField(f)
        alpha = fld.gen
        return NormalForm(A, f.derivative()(alpha), alpha, 2)
    alpha = -f[d - 1] / (d * A)
    shifted = f.taylor_shift(alpha)
    B = shifted[1]
    expected = RationalPoly.monomial(d, A) + RationalPoly.monomial(1, B)
    if B == 0 or shifted != expected:
        return None
    return NormalForm(A, B, alpha, d)
