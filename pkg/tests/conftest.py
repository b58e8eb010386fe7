import math
import sys
from pathlib import Path

import pytest
from hypothesis import settings

from travwave import CoefficientSpec, DEFAULT_TOL, assemble_nvw, build_ch_profile
from travwave.nvw import ConstPiece, MonoPiece, NvwPlan

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

PI = math.pi
# integral of sqrt(sin x) over [0, pi/2], 30 digits (mpmath.quad at mp.dps = 40)
XI_BAR = 1.19814023473559220743992249228


def intro_plan(k=1.0):
    return NvwPlan((ConstPiece(PI), MonoPiece(k, "dec", PI, 0.0), ConstPiece(0.0)))


@pytest.fixture(scope="session")
def sqrt_sin():
    return CoefficientSpec.sqrt_sin(4.0)


@pytest.fixture(scope="session")
def intro(sqrt_sin):
    return assemble_nvw(sqrt_sin, 2.0, intro_plan())


@pytest.fixture(scope="session")
def nvw_cusp(sqrt_sin):
    # decreasing into the root w = 0 and back up: opposite infinite slopes
    plan = NvwPlan((MonoPiece(1.0, "dec", PI, 0.0), MonoPiece(1.0, "inc", 0.0, PI)))
    return assemble_nvw(sqrt_sin, 2.0, plan)


@pytest.fixture(scope="session")
def peakon():
    return build_ch_profile(1.0, 0.0, 0.0)


@pytest.fixture(scope="session")
def cuspon():
    return build_ch_profile(1.0, 0.875, 0.5)


@pytest.fixture(scope="session")
def periodic_peakon():
    return build_ch_profile(2.0, 0.5, -2.0, window=(-4.0, 4.0))


@pytest.fixture(scope="session")
def periodic_cuspon():
    return build_ch_profile(1.0, 1.0, 0.0, window=(-4.0, 4.0))


@pytest.fixture(scope="session")
def stumpon():
    return build_ch_profile(1.0, 0.5, -1.0)


@pytest.fixture(scope="session")
def tol():
    return DEFAULT_TOL


# one line per acceptance criterion, printed at the end of every run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("] ")[1].split(".")[0])):
            terminalreporter.write_line(line)
