from fractions import Fraction

import pytest
from sympy import isprime, primepi

from newton_places.density_lab import (
    DENSITY_HEADER, RACE_HEADER, DensityRow, EventuallyPeriodicStart, RaceRow,
    density_csv, density_markdown, density_table, four_significant, lead_change_scan,
    period_histogram, race_csv, race_markdown, race_table, sieve_primes,
)
from newton_places.exact_algebra import T
from newton_places.local_analysis import ConvergesTo, classify_primes

CUBE = T ** 3 - 1
G = T ** 3 - T


def test_sieve_examples():
    assert sieve_primes(10) == [2, 3, 5, 7]
    assert len(sieve_primes(100)) == 25
    ps = sieve_primes(20000)
    assert len(ps) == 2262
    assert ps == [n for n in range(20001) if isprime(n)]
    assert sieve_primes(1) == []


@pytest.mark.parametrize("x, s", [
    (Fraction(2431, 1000), "2.431"),
    (Fraction(9564, 10000), "0.9564"),
    (Fraction(1, 2), "0.5000"),
    (Fraction(12345, 1000), "12.34"),  # half-even
    (Fraction(0), "0.000"),
])
def test_four_significant(x, s):
    assert four_significant(x) == s


def test_small_density_split():
    (rows,) = density_table(CUBE, [2], [10]).values()
    assert rows == [DensityRow(10, 4, 2, 0, 2)]


def test_rows_reject_inconsistent_counts():
    with pytest.raises(ValueError):
        DensityRow(10, 4, 1, 1, 1)
    with pytest.raises(ValueError):
        RaceRow(10, 4, 1, 1, 0, 0, 1)


def test_density_rows_sum_and_recompute():
    table = density_table(CUBE, [2, 3], [1000, 5000, 10000])
    for rows in table.values():
        for r in rows:
            assert r.pi_X == primepi(r.X)
            assert r.converged + r.diverged + r.bad == r.pi_X
            assert r.delta == Fraction(100 * r.converged, r.pi_X)


def test_monotone_refinement():
    primes = sieve_primes(30000)
    cls = classify_primes(CUBE, Fraction(5), primes)
    conv = [p for p, c in zip(primes, cls) if isinstance(c, ConvergesTo)]
    prev = set()
    for X in (5000, 10000, 30000):
        cur = {p for p in conv if p <= X}
        assert prev <= cur
        prev = cur
    counts = [r.converged for r in density_table(CUBE, [5], [5000, 10000, 30000])[Fraction(5)]]
    assert counts == sorted(counts)


def test_cross_statistic_consistency():
    grid = [2000, 10000, 20000]
    dens = density_table(G, [2, 3], grid)
    race = race_table(G, [2, 3], grid)
    for x0 in dens:
        for d, r in zip(dens[x0], race[x0]):
            assert d.converged == r.to_plus + r.to_minus + r.to_zero_or_other
            assert d.diverged == r.diverged and d.bad == r.bad


def test_bad_prime_policies():
    base = density_table(CUBE, [2], [100])[Fraction(2)][0]
    conv = density_table(CUBE, [2], [100], count_bad="converged")[Fraction(2)][0]
    div = density_table(CUBE, [2], [100], count_bad="diverged")[Fraction(2)][0]
    probe = density_table(CUBE, [2], [100], count_bad="probe")[Fraction(2)][0]
    assert conv.converged == base.converged + base.bad and conv.bad == 0
    assert div.diverged == base.diverged + base.bad and div.bad == 0
    assert base.converged <= probe.converged <= conv.converged
    with pytest.raises(ValueError):
        density_table(CUBE, [2], [100], count_bad="sometimes")


def test_eventually_periodic_start_rejected():
    with pytest.raises(EventuallyPeriodicStart, match="not eventually periodic"):
        race_table(G, [1], [100])
    with pytest.raises(EventuallyPeriodicStart):
        density_table(CUBE, [1], [100])


def test_race_needs_plus_minus_one():
    with pytest.raises(ValueError, match="race requires labeled rational roots"):
        race_table(CUBE, [2], [100])


def test_lead_change_scan_trivial_range():
    assert lead_change_scan(G, 2, 2) == []


def test_lead_change_scan_is_deterministic():
    assert lead_change_scan(G, 3, 30000) == lead_change_scan(G, 3, 30000, threads=1)


def test_csv_is_byte_identical_across_runs():
    a = density_csv(density_table(CUBE, [2, 4], [1000, 2000])[Fraction(4)])
    b = density_csv(density_table(CUBE, [2, 4], [1000, 2000], threads=3)[Fraction(4)])
    assert a == b
    assert a.splitlines()[0] == ",".join(DENSITY_HEADER)
    assert "\r" not in a
    r = race_csv(race_table(G, [2], [1000])[Fraction(2)])
    assert r.splitlines()[0] == ",".join(RACE_HEADER)


def test_markdown_mirrors():
    md = density_markdown(density_table(CUBE, [2, 3], [20000]))
    assert md.splitlines()[2].startswith("| 20K |")
    md = race_markdown(race_table(G, [2], [20000]))
    assert " / " in md


def test_period_histogram_decomposition():
    h = period_histogram(CUBE, 2, 20000)
    assert sum(h.counts.values()) == h.good_primes
    assert h.counts.get(1, 0) == sum(h.fixed_breakdown.values())
    assert h.fixed_fraction - h.converged_fraction == Fraction(
        h.counts.get(1, 0) - h.fixed_breakdown.get("simple_root", 0), h.good_primes)


def test_period_histogram_small_contributions():
    h = period_histogram(CUBE, 2, 11)
    # p = 5 converges, 7 starts on a root residue, 11 has period 5
    assert h.counts == {1: 2, 5: 1}
