"""Acceptance criteria 1-10, one seeded suite per criterion.

Every test prints a single ``PASS``/``FAIL`` line summarising its checks; run
with ``pytest tests/test_acceptance.py -s`` to see them. The per-check values
and thresholds appear in the assertion message on failure.
"""

import pytest

from hatsiegel import verify

SEED = 7

CRITERIA = [
    (1, "distance formula and arc length", "distance"),
    (2, "invariance under the group", "invariance"),
    (3, "SL2 x SL2 splitting", "splitting"),
    (4, "geodesic endpoints and arc length", "geodesic"),
    (5, "section dimensions", "dimensions"),
    (6, "semi-character and cocycle", "semicharacter"),
    (7, "theta quasi-periodicity and bridge", "theta"),
    (8, "Picard group, K(F) and Hodge numbers", "picard"),
    (9, "Killing form", "killing"),
    (10, "kernel of the action", "kernel"),
]


def _report(number: int, title: str, result: verify.SuiteResult) -> str:
    tag = "PASS" if result.passed else "FAIL"
    worst = [c for c in result.checks if not c.passed]
    tail = "" if not worst else " | " + "; ".join(c.line() for c in worst)
    return f"{tag} criterion {number} ({title}): {len(result.checks) - len(worst)}/{len(result.checks)} checks{tail}"


@pytest.mark.parametrize("number,title,suite", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, suite):
    result = verify.SUITES[suite](SEED)
    print()
    print(_report(number, title, result))
    if suite == "killing":
        info = result.info
        print(f"  killing form: rank {info['rank']}, best-fit c = {info['constant']!r}, "
              f"fit residual {info['fit_residual']:.3e}, degenerate = {info['degenerate']}")
    assert result.passed, "\n".join(c.line() for c in result.checks)
