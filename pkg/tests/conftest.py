from fractions import Fraction

import pytest
from hypothesis import settings

from newton_places.exact_algebra import RationalPoly

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

_CRITERIA: dict[int, list[bool]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    ok = rep.passed if rep.when == "call" else not rep.failed
    if rep.when == "setup" and ok:
        return
    _CRITERIA.setdefault(mark.args[0], []).append(ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status = "PASS" if all(_CRITERIA[n]) else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {status}")


def P(*coeffs) -> RationalPoly:
    """Polynomial from coefficients, highest degree first."""
    return RationalPoly([Fraction(c) for c in reversed(coeffs)])
