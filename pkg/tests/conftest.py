from __future__ import annotations

import os

import pytest

ACCEPTANCE_LINES: list[str] = []


def pytest_addoption(parser):
    parser.addoption(
        "--run-n7",
        action="store_true",
        default=False,
        help="include the n = 7 unicyclic scan (also enabled by KERNELGF_FULL=1)",
    )


@pytest.fixture(scope="session")
def run_n7(request):
    return request.config.getoption("--run-n7") or os.environ.get("KERNELGF_FULL") == "1"


@pytest.fixture
def criterion():
    """Record one pass/fail line, print it, then assert."""

    def record(label: str, ok: bool, detail: str = ""):
        line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
