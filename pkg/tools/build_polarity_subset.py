"""Regenerate ``tests/data/polarity_subset.csv.gz``.

The source is ``test/corpora/polarity-en-pang&lee1.csv`` in the ``pattern3``
3.0.0 sdist on PyPI: 1500 movie reviews (750 positive, 750 negative) drawn
from the polarity dataset v2.0. Every row is kept; the label column is
rewritten from 1/-1 to pos/neg and the file is gzipped with a zero mtime
so the output is byte-stable.

Usage::

    python tools/build_polarity_subset.py /path/to/pattern3-3.0.0
"""

from __future__ import annotations

import csv
import gzip
import io
import sys
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "polarity_subset.csv.gz"


def main(root: str) -> None:
    src = Path(root) / "test" / "corpora" / "polarity-en-pang&lee1.csv"
    rows = list(csv.reader(src.open(encoding="utf-8-sig")))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "text"])
    for r in rows:
        w.writerow(["pos" if r[0].strip() == "1" else "neg", r[1]])
    with OUT.open("wb") as fh, gzip.GzipFile(fileobj=fh, mode="wb", mtime=0, filename="") as gz:
        gz.write(buf.getvalue().encode("utf-8"))
    print(f"wrote {len(rows)} reviews to {OUT}")


if __name__ == "__main__":
    main(sys.argv[1])
