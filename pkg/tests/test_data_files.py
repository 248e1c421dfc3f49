from __future__ import annotations

import hashlib

import pytest

from conftest import DATA, load_polarity


@pytest.mark.parametrize("name, digest", [
    ("polarity_subset.csv.gz", "602a2e99a31cf1733f9e99545ed4e0cd350ece3bdc3c8f439cbdcf9798a67bcd"),
    ("chunk_golden.tsv", "f5e888d66b5634e3758b075db45ae855b857ae9a3a2306b6617921a535a2de6f"),
])
def test_checksum(name, digest):
    assert hashlib.sha256((DATA / name).read_bytes()).hexdigest() == digest


def test_polarity_subset_balanced(monkeypatch):
    monkeypatch.delenv("NEWSVOL_POLARITY_DIR", raising=False)
    texts, labels, _ = load_polarity()
    assert len(texts) == 1500
    assert labels.count("pos") == labels.count("neg") == 750
