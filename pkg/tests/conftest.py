import numpy as np
import pytest
from hypothesis import settings

from fibdistill.braids import BraidWord
from fibdistill.compiler.primitives import compile_injection_weave, compile_not_purebraid

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def b_result():
    return compile_not_purebraid(1e-3)


@pytest.fixture(scope="session")
def w_result():
    return compile_injection_weave(1e-3)


@pytest.fixture(scope="session")
def b_word(b_result) -> BraidWord:
    return b_result.word


@pytest.fixture(scope="session")
def w_word(w_result) -> BraidWord:
    return w_result.word


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(number: int, title: str, ok: bool, detail: str = ""):
        line = f"[criterion {number}] {'PASS' if ok else 'FAIL'} {title}"
        if detail:
            line += f" :: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip("]"))):
            terminalreporter.write_line(line)
