from __future__ import annotations

import pytest

from learnsupport._kernels import get_backend

BACKENDS = ("numpy", "numba")


@pytest.fixture(params=BACKENDS)
def backend(request):
    return get_backend(request.param)


def pytest_terminal_summary(terminalreporter):
    import _report
    if _report.LINES:
        terminalreporter.section("acceptance criteria")
        for line in _report.LINES:
            terminalreporter.write_line(line)
