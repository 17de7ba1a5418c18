from __future__ import annotations

import time
from dataclasses import dataclass

import pytest

from anglat import zeroscan

SCAN_FAMILIES = (
    zeroscan.ZETA,
    zeroscan.BETA4,
    zeroscan.C01,
    zeroscan.c14_family(1),
    zeroscan.c14_family(2),
    zeroscan.c14_family(3),
)


@dataclass
class Scan:
    zeros: dict
    seconds: float
    workers: int


@pytest.fixture(scope="session")
def scan300() -> Scan:
    """Critical-line zeros of every scanned family on [0, 300] at step 0.02.

    One shared scan (the lattice families share a Bessel table per ordinate);
    several acceptance and property tests read from it.
    """
    workers = zeroscan.default_workers()
    t0 = time.perf_counter()
    zeros = zeroscan.scan_many(SCAN_FAMILIES, (0.0, 300.0), step=0.02, workers=workers)
    return Scan(zeros, time.perf_counter() - t0, workers)


@pytest.fixture(scope="session")
def zeros300(scan300):
    return scan300.zeros


# one verdict line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
