from __future__ import annotations

from pathlib import Path

import pytest

from iacrepair.frontends import parse
from iacrepair.normalize import normalize_script

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
SAMPLES = ROOT / "samples"

ACCEPTANCE_LINES: list[str] = []


def norm(source: str, tech: str = "puppet"):
    return normalize_script(parse(source, tech))


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture
def samples_dir() -> Path:
    return SAMPLES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
