import os
from pathlib import Path

import pytest

from lpface.synthetic import face_fixture, write_orl_tree

ORL_ENV = "LPFACE_ORL_DIR"

# criterion -> list of (check, passed, detail), filled by test_acceptance
ACCEPTANCE_RESULTS = {}


def orl_path():
    """Location of the AT&T/ORL database, or None when it is not available."""
    candidates = [os.environ.get(ORL_ENV), Path(__file__).parent / "data" / "orl"]
    for c in candidates:
        if c and (Path(c) / "s1" / "1.pgm").is_file():
            return Path(c)
    return None


@pytest.fixture(scope="session")
def orl_dir():
    return orl_path()


@pytest.fixture(scope="session")
def faces():
    """Five upright synthetic 92x112 faces."""
    return [face_fixture(seed) for seed in range(5)]


@pytest.fixture(scope="session")
def synthetic_orl(tmp_path_factory):
    """A 40-subject, 10-image ORL-shaped tree of synthetic faces."""
    return write_orl_tree(tmp_path_factory.mktemp("synthetic_orl"))


@pytest.fixture(scope="session")
def small_orl(tmp_path_factory):
    """A 6-subject, 6-image ORL-shaped tree of synthetic faces."""
    return write_orl_tree(tmp_path_factory.mktemp("small_orl"), subjects=6, images=6)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(ACCEPTANCE_RESULTS):
        checks = ACCEPTANCE_RESULTS[criterion]
        ok = all(passed for _, passed, _ in checks)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {criterion}")
        for name, passed, detail in checks:
            terminalreporter.write_line(f"    {'pass' if passed else 'FAIL'}  {name}: {detail}")
