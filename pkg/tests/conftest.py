import random
import zlib

import pytest

from iemlab.core import PermutationPair
from iemlab.induction import InductionTrace, golden_iem, self_similar_iem


@pytest.fixture
def rng(request):
    # deterministic per test and independent of execution order
    seed = zlib.crc32(request.node.nodeid.encode())
    return random.Random(seed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    # expose the call-phase outcome to fixture teardowns (acceptance recorder)
    outcome = yield
    rep = outcome.get_result()
    setattr(item, "rep_" + rep.when, rep)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for num in sorted(lines):
            terminalreporter.write_line(lines[num])


@pytest.fixture(scope="session")
def golden_trace():
    return InductionTrace(golden_iem(), mode="accelerated")


@pytest.fixture(scope="session")
def d3_trace():
    pair = PermutationPair.from_rows("ABC", "CBA")
    return InductionTrace(self_similar_iem(pair, (0, 0, 1, 0, 1)), mode="accelerated")


@pytest.fixture(scope="session")
def d4_trace():
    pair = PermutationPair.from_rows("ABCD", "DCBA")
    iem = self_similar_iem(pair, (0, 0, 1, 0, 1, 1, 0, 1))
    return InductionTrace(iem, mode="accelerated")
