from __future__ import annotations

import csv
import gzip
import io
import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

DATA = Path(__file__).parent / "data"

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def load_polarity() -> tuple[list[str], list[str], str]:
    """Movie reviews as (texts, labels, source description).

    ``NEWSVOL_POLARITY_DIR`` may point at the full 1000+1000 corpus (the
    ``txt_sentoken`` directory with ``pos/`` and ``neg/``); otherwise the
    vendored 750+750 subset is used.
    """
    root = os.environ.get("NEWSVOL_POLARITY_DIR")
    if root:
        texts, labels = [], []
        for label in ("neg", "pos"):
            for path in sorted((Path(root) / label).glob("*.txt")):
                texts.append(path.read_text(encoding="utf-8", errors="replace"))
                labels.append(label)
        return texts, labels, f"{root} ({len(texts)} reviews)"
    raw = gzip.decompress((DATA / "polarity_subset.csv.gz").read_bytes()).decode("utf-8")
    rows = list(csv.DictReader(io.StringIO(raw)))
    return [r["text"] for r in rows], [r["label"] for r in rows], f"vendored subset ({len(rows)} reviews)"


@pytest.fixture(scope="session")
def polarity():
    return load_polarity()


ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(number: int, ok: bool, detail: str) -> None:
        ACCEPTANCE[number] = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        assert ok, ACCEPTANCE[number]

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
