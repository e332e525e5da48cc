"""Prime-range experiments: convergence densities, the +1/-1 race for
polynomials with both roots, lead changes, and eventual-period histograms.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal, localcontext, ROUND_HALF_EVEN
from fractions import Fraction
from typing import Iterable, Optional, Sequence, TextIO

from .exact_algebra import RationalPoly, rational_roots
from .local_analysis import (
    INF,
    Bad,
    Block,
    ConvergesTo,
    Diverges,
    PrimeClassification,
    classify_primes,
    is_eventually_periodic,
    newton_system,
)

BAD_POLICIES = ("excluded", "probe", "converged", "diverged")

DENSITY_HEADER = ["X", "pi_X", "converged", "diverged", "bad", "delta_percent"]
RACE_HEADER = [
    "X", "pi_X", "to_plus", "to_minus", "other", "diverged", "bad", "delta_plus", "delta_minus",
]


class EventuallyPeriodicStart(ValueError):
    def __init__(self, x0):
        super().__init__(
            f"x0 = {x0} has an eventually periodic Newton orbit; the density "
            "statistics assume the sequence is not eventually periodic"
        )
        self.x0 = x0


def sieve_primes(X: int) -> list[int]:
    """Primes <= X in ascending order (empty for X < 2)."""
    if X < 2:
        return []
    bs = bytearray(b"\x01") * (X + 1)
    bs[0:2] = b"\x00\x00"
    for p in range(2, int(X ** 0.5) + 1):
        if bs[p]:
            bs[p * p::p] = bytes(len(range(p * p, X + 1, p)))
    return [i for i, v in enumerate(bs) if v]


def four_significant(x: Fraction) -> str:
    """Round an exact rational to 4 significant digits, keeping trailing zeros."""
    if x == 0:
        return "0.000"
    with localcontext() as ctx:
        ctx.prec = 40
        d = Decimal(x.numerator) / Decimal(x.denominator)
        exp = d.adjusted() - 3
        q = d.quantize(Decimal(1).scaleb(exp), rounding=ROUND_HALF_EVEN)
    return f"{q:f}"


def _settle(c: PrimeClassification, policy: str) -> PrimeClassification:
    """Apply the bad-prime policy; returns the classification to count."""
    if not isinstance(c, Bad) or policy == "excluded":
        return c
    if policy == "converged":
        return ConvergesTo(-1, Block(RationalPoly((1,))))
    if policy == "diverged":
        return Diverges(0, 0)
    pr = c.probe
    if pr is None or pr.verdict == "inconclusive":
        return c
    if pr.verdict == "converges":
        return ConvergesTo(-1, pr.root)
    return Diverges(0, 0)


def _check_policy(policy: str) -> None:
    if policy not in BAD_POLICIES:
        raise ValueError(f"count-bad policy must be one of {BAD_POLICIES}, got {policy!r}")


def _check_start(f: RationalPoly, x0: Fraction) -> None:
    if is_eventually_periodic(f, x0):
        raise EventuallyPeriodicStart(x0)


def _classify(f, x0, primes, policy, threads):
    raw = classify_primes(f, x0, primes, probe=(policy == "probe"), threads=threads)
    return [_settle(c, policy) for c in raw]


def _grid(X_grid: Sequence[int]) -> list[int]:
    grid = list(X_grid)
    if grid != sorted(grid):
        raise ValueError("X grid must be ascending")
    return grid


@dataclass(frozen=True)
class DensityRow:
    X: int
    pi_X: int
    converged: int
    diverged: int
    bad: int

    def __post_init__(self):
        if self.converged + self.diverged + self.bad != self.pi_X:
            raise ValueError("density counts do not sum to pi(X)")

    @property
    def delta(self) -> Fraction:
        """100 * converged / pi(X), exactly."""
        return Fraction(100 * self.converged, self.pi_X) if self.pi_X else Fraction(0)

    @property
    def delta_percent(self) -> str:
        return four_significant(self.delta)

    def csv_row(self) -> list:
        return [self.X, self.pi_X, self.converged, self.diverged, self.bad, self.delta_percent]


@dataclass(frozen=True)
class RaceRow:
    X: int
    pi_X: int
    to_plus: int
    to_minus: int
    to_zero_or_other: int
    diverged: int
    bad: int

    def __post_init__(self):
        total = self.to_plus + self.to_minus + self.to_zero_or_other + self.diverged + self.bad
        if total != self.pi_X:
            raise ValueError("race counts do not sum to pi(X)")

    @property
    def delta_plus(self) -> Fraction:
        return Fraction(100 * self.to_plus, self.pi_X) if self.pi_X else Fraction(0)

    @property
    def delta_minus(self) -> Fraction:
        return Fraction(100 * self.to_minus, self.pi_X) if self.pi_X else Fraction(0)

    @property
    def delta_plus_percent(self) -> str:
        return four_significant(self.delta_plus)

    @property
    def delta_minus_percent(self) -> str:
        return four_significant(self.delta_minus)

    def csv_row(self) -> list:
        return [
            self.X, self.pi_X, self.to_plus, self.to_minus, self.to_zero_or_other,
            self.diverged, self.bad, self.delta_plus_percent, self.delta_minus_percent,
        ]


def density_table(
    f: RationalPoly,
    x0s: Sequence,
    X_grid: Sequence[int],
    count_bad: str = "excluded",
    threads: Optional[int] = None,
) -> dict[Fraction, list[DensityRow]]:
    """Rows of 100*delta(x0, X) for every x0 and every X of the grid."""
    _check_policy(count_bad)
    grid = _grid(X_grid)
    x0s = [Fraction(x) for x in x0s]
    for x0 in x0s:
        _check_start(f, x0)
    primes = sieve_primes(grid[-1]) if grid else []
    table = {}
    for x0 in x0s:
        outcomes = _classify(f, x0, primes, count_bad, threads)
        rows = []
        conv = div = bad = i = 0
        for X in grid:
            while i < len(primes) and primes[i] <= X:
                c = outcomes[i]
                if isinstance(c, ConvergesTo):
                    conv += 1
                elif isinstance(c, Diverges):
                    div += 1
                else:
                    bad += 1
                i += 1
            rows.append(DensityRow(X, i, conv, div, bad))
        table[x0] = rows
    return table


def _race_roots(g: RationalPoly) -> None:
    roots = rational_roots(g)
    if Fraction(1) not in roots or Fraction(-1) not in roots:
        raise ValueError("race requires labeled rational roots +1 and -1")


def _race_key(c: PrimeClassification) -> str:
    if isinstance(c, ConvergesTo):
        if c.root == 1:
            return "plus"
        if c.root == -1:
            return "minus"
        return "other"
    if isinstance(c, Diverges):
        return "diverged"
    return "bad"


def race_table(
    g: RationalPoly,
    x0s: Sequence,
    X_grid: Sequence[int],
    count_bad: str = "excluded",
    threads: Optional[int] = None,
) -> dict[Fraction, list[RaceRow]]:
    """Rows of 100*delta_+ and 100*delta_- for every x0 and X."""
    _check_policy(count_bad)
    _race_roots(g)
    grid = _grid(X_grid)
    x0s = [Fraction(x) for x in x0s]
    for x0 in x0s:
        _check_start(g, x0)
    primes = sieve_primes(grid[-1]) if grid else []
    table = {}
    for x0 in x0s:
        outcomes = _classify(g, x0, primes, count_bad, threads)
        counts: Counter = Counter()
        rows, i = [], 0
        for X in grid:
            while i < len(primes) and primes[i] <= X:
                counts[_race_key(outcomes[i])] += 1
                i += 1
            rows.append(RaceRow(
                X, i, counts["plus"], counts["minus"], counts["other"],
                counts["diverged"], counts["bad"],
            ))
        table[x0] = rows
    return table


@dataclass(frozen=True)
class Crossing:
    prime: int
    direction: str  # "minus_overtakes" or "plus_overtakes"
    to_plus: int
    to_minus: int


def lead_change_scan(
    g: RationalPoly,
    x0,
    X: int,
    count_bad: str = "excluded",
    threads: Optional[int] = None,
) -> list[Crossing]:
    """Primes at which the strict leader of the +1 / -1 race changes.

    Ties do not end a lead; a crossing is recorded when the side strictly in
    front differs from the last side that was strictly in front.  The running
    counts are accumulated over ascending primes.
    """
    _check_policy(count_bad)
    _race_roots(g)
    x0 = Fraction(x0)
    _check_start(g, x0)
    primes = sieve_primes(X)
    outcomes = _classify(g, x0, primes, count_bad, threads)
    plus = minus = 0
    leader = 0
    out = []
    for p, c in zip(primes, outcomes):
        key = _race_key(c)
        if key == "plus":
            plus += 1
        elif key == "minus":
            minus += 1
        else:
            continue
        sign = (minus > plus) - (minus < plus)
        if sign and sign != leader:
            if leader:
                out.append(Crossing(p, "minus_overtakes" if sign > 0 else "plus_overtakes", plus, minus))
            leader = sign
    return out


@dataclass(frozen=True)
class PeriodHistogram:
    counts: dict
    good_primes: int
    fixed_breakdown: dict

    @property
    def fixed_fraction(self) -> Fraction:
        """Fraction of good primes with eventual period 1."""
        return Fraction(self.counts.get(1, 0), self.good_primes) if self.good_primes else Fraction(0)

    @property
    def converged_fraction(self) -> Fraction:
        c = self.fixed_breakdown.get("simple_root", 0)
        return Fraction(c, self.good_primes) if self.good_primes else Fraction(0)


def period_histogram(
    f: RationalPoly, x0, X: int, threads: Optional[int] = None
) -> PeriodHistogram:
    """Histogram of the eventual period over good primes <= X.

    Period-1 orbits are split by where they settle: a simple-root residue
    (p-adic convergence), a multiple-root residue, or infinity.
    """
    x0 = Fraction(x0)
    _check_start(f, x0)
    primes = sieve_primes(X)
    outcomes = classify_primes(f, x0, primes, threads=threads)
    sys_ = newton_system(f)
    counts: Counter = Counter()
    fixed: Counter = Counter()
    good = 0
    for p, c in zip(primes, outcomes):
        if isinstance(c, Bad):
            continue
        good += 1
        if isinstance(c, ConvergesTo):
            counts[1] += 1
            fixed["simple_root"] += 1
            continue
        counts[c.period] += 1
        if c.period == 1:
            if c.cycle_point is INF:
                fixed["infinity"] += 1
            else:
                _, fi = sys_.f.integer_primitive()
                acc = 0
                for a in reversed(fi):
                    acc = (acc * c.cycle_point + a) % p
                fixed["multiple_root" if acc == 0 else "other"] += 1
    return PeriodHistogram(dict(sorted(counts.items())), good, dict(fixed))


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def write_density_csv(rows: Iterable[DensityRow], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(DENSITY_HEADER)
    for r in rows:
        w.writerow(r.csv_row())


def write_race_csv(rows: Iterable[RaceRow], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(RACE_HEADER)
    for r in rows:
        w.writerow(r.csv_row())


def density_csv(rows: Iterable[DensityRow]) -> str:
    buf = io.StringIO()
    write_density_csv(rows, buf)
    return buf.getvalue()


def race_csv(rows: Iterable[RaceRow]) -> str:
    buf = io.StringIO()
    write_race_csv(rows, buf)
    return buf.getvalue()


def _fmt_x(x: Fraction) -> str:
    return str(x)


def _fmt_X(X: int) -> str:
    return f"{X // 1000}K" if X % 1000 == 0 and X >= 1000 else str(X)


def density_markdown(table: dict) -> str:
    x0s = list(table)
    lines = ["| X \\ x0 | " + " | ".join(_fmt_x(x) for x in x0s) + " |",
             "|---|" + "---|" * len(x0s)]
    for k, row in enumerate(table[x0s[0]] if x0s else []):
        cells = [table[x][k].delta_percent for x in x0s]
        lines.append(f"| {_fmt_X(row.X)} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def race_markdown(table: dict) -> str:
    x0s = list(table)
    lines = ["| X \\ x0 | " + " | ".join(_fmt_x(x) for x in x0s) + " |",
             "|---|" + "---|" * len(x0s)]
    for k, row in enumerate(table[x0s[0]] if x0s else []):
        cells = [f"{table[x][k].delta_plus_percent} / {table[x][k].delta_minus_percent}" for x in x0s]
        lines.append(f"| {_fmt_X(row.X)} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
