import numpy as np
import pytest

_ACCEPTANCE_LINES = []


class _Recorder:
    def record(self, number, passed, detail):
        flag = "PASS" if passed else "FAIL"
        _ACCEPTANCE_LINES.append((number, f"[{flag}] criterion {number}: {detail}"))


@pytest.fixture
def acceptance():
    return _Recorder()


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE_LINES, key=lambda item: item[0]):
        terminalreporter.write_line(line)
