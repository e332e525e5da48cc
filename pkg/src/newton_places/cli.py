"""Command-line front end.

    newton-places analyze "t^3 - t"
    newton-places classify "t^3 - 1" --x0 2 --prime 11
    newton-places density "t^3 - 1" --x0 2,3,4,5 --Xmax 200000 --step 20000 --out t1.csv
    newton-places race "t^3 - t" --x0 2,3,4,5 --Xmax 100000 --step 20000 --lead-changes
    newton-places periods "t^3 - 1" --x0 2 --Xmax 200000
    newton-places orbit "t^3 - 1" --x0 2 --n 3
    newton-places factors "t^3 - 1" --x0 2 --gamma 1 --n 8

Exit status: 0 on success, 1 on a domain error, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

from sympy import isprime

from . import density_lab as lab
from . import local_analysis as local
from . import newton_core as core
from .exact_algebra import RationalPoly, NotInvertibleError
from .polyparse import PolynomialSyntaxError, parse_polynomial, parse_rational

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    polynomial: RationalPoly
    x0_list: list[Fraction] = field(default_factory=list)
    X_grid: list[int] = field(default_factory=list)
    n_max: int = 0
    prime: Optional[int] = None
    gamma: Optional[Fraction] = None
    count_bad: str = "excluded"
    out: Optional[Path] = None
    threads: Optional[int] = None
    moduli: list[RationalPoly] = field(default_factory=list)
    probe: bool = False
    lead_changes: bool = False


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="newton-places", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def poly_cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("polynomial", help='polynomial in t, e.g. "t^3 - 1"')
        return p

    p = poly_cmd("analyze", "Newton map, D, E_alpha, fixed points, exceptional roots")
    p.add_argument("--modulus", action="append", default=[],
                   help="minimal polynomial of irrational simple roots (repeatable)")

    p = poly_cmd("classify", "fate of the Newton sequence at one prime")
    p.add_argument("--x0", required=True)
    p.add_argument("--prime", required=True, type=int)
    p.add_argument("--probe", action="store_true", help="settle bad primes with an exact p-adic probe")

    for name, help_ in (("density", "convergence density table"),
                        ("race", "+1 / -1 race table")):
        p = poly_cmd(name, help_)
        p.add_argument("--x0", required=True, help="comma-separated starting points")
        p.add_argument("--Xmax", type=int)
        p.add_argument("--step", type=int, help="grid increment (default 20000)")
        p.add_argument("--grid", help="explicit comma-separated X values")
        p.add_argument("--count-bad-as", dest="count_bad", default="excluded",
                       choices=lab.BAD_POLICIES)
        p.add_argument("--out", type=Path, help="CSV output path")
        p.add_argument("--threads", type=int)
        if name == "race":
            p.add_argument("--lead-changes", action="store_true",
                           help="also scan for lead changes up to Xmax")

    p = poly_cmd("periods", "eventual-period histogram over good primes")
    p.add_argument("--x0", required=True)
    p.add_argument("--Xmax", type=int, required=True)
    p.add_argument("--out", type=Path)
    p.add_argument("--threads", type=int)

    p = poly_cmd("orbit", "exact Newton orbit")
    p.add_argument("--x0", required=True)
    p.add_argument("--n", type=int, default=5)

    p = poly_cmd("factors", "primitive prime factors of x_n - gamma")
    p.add_argument("--x0", required=True)
    p.add_argument("--gamma", required=True)
    p.add_argument("--n", type=int, default=6)
    return ap


def _rat(text: str, what: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"{what}: {exc}") from None


def _x0_list(text: str) -> list[Fraction]:
    items = [s for s in text.split(",") if s.strip()]
    if not items:
        raise UsageError("--x0 needs at least one value")
    return [_rat(s, "--x0") for s in items]


def build_config(ns: argparse.Namespace) -> ExperimentConfig:
    """Validate parsed arguments; raises UsageError."""
    try:
        poly = parse_polynomial(ns.polynomial)
    except PolynomialSyntaxError as exc:
        raise UsageError(str(exc)) from None
    cfg = ExperimentConfig(ns.command, poly)
    cmd = ns.command
    if cmd == "analyze":
        try:
            cfg.moduli = [parse_polynomial(m) for m in ns.modulus]
        except PolynomialSyntaxError as exc:
            raise UsageError(f"--modulus: {exc}") from None
        return cfg
    cfg.x0_list = _x0_list(ns.x0)
    if cmd in ("classify", "periods", "orbit", "factors") and len(cfg.x0_list) != 1:
        raise UsageError(f"{cmd} takes a single --x0")
    if cmd == "classify":
        if ns.prime < 2 or not isprime(ns.prime):
            raise UsageError(f"--prime {ns.prime} is not prime")
        cfg.prime, cfg.probe = ns.prime, ns.probe
    if cmd in ("density", "race"):
        if ns.grid:
            try:
                cfg.X_grid = [int(s) for s in ns.grid.split(",") if s.strip()]
            except ValueError:
                raise UsageError("--grid must list integers") from None
        else:
            if ns.Xmax is None:
                raise UsageError("give --Xmax (with optional --step) or --grid")
            step = ns.step or 20000
            if step <= 0:
                raise UsageError("--step must be positive")
            cfg.X_grid = list(range(step, ns.Xmax + 1, step)) or [ns.Xmax]
            if cfg.X_grid[-1] != ns.Xmax:
                cfg.X_grid.append(ns.Xmax)
        if not cfg.X_grid or cfg.X_grid != sorted(cfg.X_grid) or cfg.X_grid[0] < 2:
            raise UsageError("X grid must be ascending with values >= 2")
        cfg.count_bad = ns.count_bad
        cfg.lead_changes = getattr(ns, "lead_changes", False)
    if cmd in ("density", "race", "periods"):
        cfg.out, cfg.threads = ns.out, ns.threads
        if cfg.threads is not None and cfg.threads < 1:
            raise UsageError("--threads must be >= 1")
    if cmd == "periods":
        if ns.Xmax < 2:
            raise UsageError("--Xmax must be >= 2")
        cfg.X_grid = [ns.Xmax]
    if cmd in ("orbit", "factors"):
        if ns.n < 0:
            raise UsageError("--n must be >= 0")
        cfg.n_max = ns.n
    if cmd == "factors":
        cfg.gamma = _rat(ns.gamma, "--gamma")
    return cfg


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _x0_tag(x0: Fraction) -> str:
    return str(x0).replace("/", "over").replace("-", "m")


def csv_paths(out: Path, x0s: Sequence[Fraction]) -> dict[Fraction, Path]:
    """One CSV per starting point; a single x0 writes ``out`` itself."""
    if len(x0s) == 1:
        return {x0s[0]: Path(out)}
    out = Path(out)
    return {x: out.with_name(f"{out.stem}_x0_{_x0_tag(x)}{out.suffix or '.csv'}") for x in x0s}


def _write_all(files: dict[Path, str]) -> None:
    # render everything first so a failure never leaves partial output
    for path, text in files.items():
        _atomic_write(path, text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _run_analyze(cfg: ExperimentConfig, echo: Callable[[str], None]) -> None:
    f = cfg.polynomial
    echo(f"f(t) = {f}")
    N = core.build_newton_map(f)
    echo(f"N(t) = {N}    (degree {N.degree})")
    if f.degree < 2:
        return
    echo(f"D(t) = {core.compute_D(f)}")
    fp = core.fixed_points(f)
    rat = ", ".join(str(q) for q in sorted(fp.rational)) or "none"
    echo(f"fixed points: rational {{{rat}}}, residual factor {fp.residual}, infinity")
    report = core.classify_exceptional_roots(f, cfg.moduli)
    echo("")
    echo("| root | multiplicity | verdict | reason | witness |")
    echo("|---|---|---|---|---|")
    for b in report.blocks:
        w = "" if b.witness is None else str(b.witness)
        if b.reason is core.Reason.E_ALPHA and b.witness is not None:
            w = f"E_alpha = {b.witness}"
        echo(f"| {b.label} | {b.multiplicity} | {b.verdict.value} | {b.reason.value} | {w} |")
    if f.degree >= 2:
        try:
            nf = core.equiv_to_standard_form(f)
        except ValueError:
            nf = None
            echo("\nnormal form: not applicable (repeated roots)")
        else:
            if nf is None:
                echo(f"\nnormal form: not equivalent to t^{f.degree} - t")
            else:
                echo(f"\nnormal form: f = A(t - alpha)^{f.degree} + B(t - alpha) with {nf}")


def _describe(c: local.PrimeClassification) -> str:
    if isinstance(c, local.ConvergesTo):
        return f"ConvergesTo residue {c.residue}, root {c.root} (reached after {c.tail_length} steps)"
    if isinstance(c, local.Diverges):
        return f"Diverges: tail {c.tail_length}, period {c.period}, cycle through {c.cycle_point}"
    reasons = ", ".join(sorted(r.value for r in c.reasons))
    out = f"Bad ({reasons})"
    if c.probe is not None:
        root = f" to {c.probe.root}" if c.probe.root is not None else ""
        out += f"; probe: {c.probe.verdict}{root} [{c.probe.certificate}]"
    return out


def _run_classify(cfg, echo) -> None:
    c = local.classify_prime(cfg.polynomial, cfg.x0_list[0], cfg.prime, probe=cfg.probe)
    echo(f"p = {cfg.prime}: {_describe(c)}")


def _run_density(cfg, echo) -> None:
    table = lab.density_table(cfg.polynomial, cfg.x0_list, cfg.X_grid, cfg.count_bad, cfg.threads)
    if cfg.out:
        paths = csv_paths(cfg.out, cfg.x0_list)
        _write_all({paths[x]: lab.density_csv(rows) for x, rows in table.items()})
    echo(f"100*delta(x0, X) for f(t) = {cfg.polynomial}  (bad primes: {cfg.count_bad})")
    echo(lab.density_markdown(table))


def _run_race(cfg, echo) -> None:
    table = lab.race_table(cfg.polynomial, cfg.x0_list, cfg.X_grid, cfg.count_bad, cfg.threads)
    scans = {}
    if cfg.lead_changes:
        for x0 in cfg.x0_list:
            scans[x0] = lab.lead_change_scan(cfg.polynomial, x0, cfg.X_grid[-1], cfg.count_bad, cfg.threads)
    if cfg.out:
        paths = csv_paths(cfg.out, cfg.x0_list)
        _write_all({paths[x]: lab.race_csv(rows) for x, rows in table.items()})
    echo(f"100*delta_+ / 100*delta_- for g(t) = {cfg.polynomial}  (bad primes: {cfg.count_bad})")
    echo(lab.race_markdown(table))
    for x0, crossings in scans.items():
        echo(f"x0 = {x0}: {len(crossings)} lead change(s) up to {cfg.X_grid[-1]}")
        for c in crossings:
            echo(f"  p = {c.prime}: {c.direction} ({c.to_plus} vs {c.to_minus})")


def _run_periods(cfg, echo) -> None:
    h = lab.period_histogram(cfg.polynomial, cfg.x0_list[0], cfg.X_grid[0], cfg.threads)
    if cfg.out:
        lines = ["period,count"] + [f"{k},{v}" for k, v in h.counts.items()]
        _write_all({Path(cfg.out): "\n".join(lines) + "\n"})
    echo(f"eventual periods over {h.good_primes} good primes <= {cfg.X_grid[0]}")
    echo("| period | count |")
    echo("|---|---|")
    for k, v in h.counts.items():
        echo(f"| {k} | {v} |")
    echo(f"period-1 fraction {float(h.fixed_fraction):.6f}; breakdown {h.fixed_breakdown}")
    echo(f"converged fraction {float(h.converged_fraction):.6f}")


def _run_orbit(cfg, echo) -> None:
    rec = local.exact_orbit(cfg.polynomial, cfg.x0_list[0], cfg.n_max)
    for n, x in enumerate(rec.entries):
        echo(f"x_{n} = {x}")
    if rec.periodic_flag:
        echo("orbit repeats: eventually periodic")


def _run_factors(cfg, echo) -> None:
    rows = local.primitive_prime_factors(cfg.polynomial, cfg.x0_list[0], cfg.gamma, cfg.n_max)
    for r in rows:
        ps = ", ".join(str(q) for q in sorted(r.primes))
        extra = f" + unfactored cofactor ({len(str(r.cofactor))} digits)" if r.cofactor > 1 else ""
        echo(f"n = {r.n}: {{{ps}}}{extra}")


_COMMANDS = {
    "analyze": _run_analyze,
    "classify": _run_classify,
    "density": _run_density,
    "race": _run_race,
    "periods": _run_periods,
    "orbit": _run_orbit,
    "factors": _run_factors,
}


def dispatch(cfg: ExperimentConfig, echo: Callable[[str], None] = print) -> int:
    try:
        _COMMANDS[cfg.command](cfg, echo)
    except (ValueError, ArithmeticError, NotInvertibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = _parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = build_config(ns)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return dispatch(cfg)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
