"""Regenerate the data files shipped in ``src/newsvol/data``.

Sources (both BSD/permissive, bundled in the ``pattern3`` sdist on PyPI):

* ``pattern3/text/en/en-lexicon.txt`` -- Brill tagger lexicon (Penn tags)
* ``pattern3/text/en/wordnet/dict/index.noun`` -- WordNet 3.0 noun index

Usage::

    python tools/build_data.py /path/to/pattern3-3.0.0
"""

from __future__ import annotations

import gzip
import re
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from newsvol.textproc import PENN_TO_COARSE, suffix_tag  # noqa: E402

OUT = Path(__file__).resolve().parents[1] / "src" / "newsvol" / "data"
WORD = re.compile(r"[a-z]+(?:-[a-z]+)*")


def coarse(penn: str) -> str:
    return PENN_TO_COARSE.get(penn, "OTHER")


def build_lexicon(src: Path, stopwords: set[str]) -> list[tuple[str, str]]:
    entries = []
    for line in src.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith(";;;"):
            continue
        word, first_tag = line.split()[:2]
        if not WORD.fullmatch(word):
            continue
        tag = coarse(first_tag)
        # words the suffix rules already get right are left out
        if word in stopwords or suffix_tag(word) != tag:
            entries.append((word, tag))
    return sorted(entries)


def build_noun_lemmas(src: Path) -> list[str]:
    lemmas = set()
    for line in src.read_text(encoding="utf-8").splitlines():
        if line.startswith(" "):
            continue
        lemma = line.split(" ", 1)[0]
        if WORD.fullmatch(lemma):
            lemmas.add(lemma)
    return sorted(lemmas)


def main(root: str) -> None:
    base = Path(root) / "pattern3" / "text" / "en"
    stopwords = set((OUT / "stopwords.txt").read_text().split())
    lex = build_lexicon(base / "en-lexicon.txt", stopwords)
    with gzip.GzipFile(OUT / "lexicon.tsv.gz", "wb", mtime=0) as fh:
        fh.write("".join(f"{w}\t{t}\n" for w, t in lex).encode())
    nouns = build_noun_lemmas(base / "wordnet" / "dict" / "index.noun")
    with gzip.GzipFile(OUT / "noun_lemmas.txt.gz", "wb", mtime=0) as fh:
        fh.write("".join(f"{w}\n" for w in nouns).encode())
    print(f"lexicon: {len(lex)} entries, noun lemmas: {len(nouns)}")


if __name__ == "__main__":
    main(sys.argv[1])
