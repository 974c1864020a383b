import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"

_CRITERIA: dict[str, tuple[str, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(label, passed, detail)."""

    def record(label: str, passed: bool | None, detail: str = "") -> None:
        status = {True: "PASS", False: "FAIL", None: "SKIP"}[passed]
        _CRITERIA[label] = (status, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA):
        status, detail = _CRITERIA[label]
        terminalreporter.write_line(f"{status}  {label}  {detail}")


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def reference_dir() -> Path | None:
    """Directory of user-supplied molecular Hamiltonians, if any."""
    env = os.environ.get("UNIPART_REFERENCE_DIR")
    return Path(env) if env else None
