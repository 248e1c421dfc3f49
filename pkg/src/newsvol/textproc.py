"""Tokenizing, coarse POS tagging, noun-phrase chunking and normalization.

The keyphrase pipeline runs in this order::

    text -> chunk tokens -> pos_tag -> chunk -> normalize -> n-gram features

Two grammar rules drive the chunker (tags are coarse: NN, JJ, IN, ...)::

    NBAR    = (NN|JJ)* NN          # "effective algorithm"
    NBAR IN NBAR                   # "quality of service"

Stopwords are removed from the bag-of-words token stream, but they stay in
the chunking stream where they act as phrase boundaries. Without them a
preposition such as "of" could never link two noun bars.
"""

from __future__ import annotations

import enum
import gzip
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping, Sequence

from nltk.stem.porter import PorterStemmer

MIN_NGRAM = 2
MAX_NGRAM = 5
MIN_UNIGRAM_FREQ = 3

COARSE_TAGS = ("NN", "JJ", "IN", "RB", "VB", "OTHER")

PENN_TO_COARSE = {
    "NN": "NN", "NNS": "NN", "NNP": "NN", "NNPS": "NN",
    "JJ": "JJ", "JJR": "JJ", "JJS": "JJ",
    "IN": "IN",
    "RB": "RB", "RBR": "RB", "RBS": "RB",
    "VB": "VB", "VBD": "VB", "VBG": "VB", "VBN": "VB", "VBP": "VB", "VBZ": "VB",
}

# ordered: first match wins
SUFFIX_RULES = (
    ("ly", "RB"),
    ("ing", "VB"),
    ("ed", "VB"),
    ("ous", "JJ"),
    ("ful", "JJ"),
    ("ive", "JJ"),
)

# words, hyphen compounds and contractions, or runs of anything else
_SCAN = re.compile(r"[^\W_]+(?:[-'’][^\W_]+)*|[^\w\s]+|_+")
_WORD = re.compile(r"[a-z]+(?:-[a-z]+)*")

_NOUN_RULES = (
    ("s", ""), ("ses", "s"), ("xes", "x"), ("zes", "z"),
    ("ches", "ch"), ("shes", "sh"), ("men", "man"), ("ies", "y"),
)
_NOUN_IRREGULAR = {
    "children": "child", "mice": "mouse", "geese": "goose", "feet": "foot",
    "teeth": "tooth", "data": "datum", "criteria": "criterion",
    "phenomena": "phenomenon", "media": "medium", "indices": "index",
    "analyses": "analysis", "crises": "crisis", "theses": "thesis",
}


class Rule(str, enum.Enum):
    RULE1 = "Rule1"
    RULE2 = "Rule2"
    UNIGRAM = "Unigram"


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    tag: str


@dataclass(frozen=True)
class Keyphrase:
    words: tuple[str, ...]
    rule: Rule
    start: int = 0

    @property
    def text(self) -> str:
        return " ".join(self.words)

    def __len__(self) -> int:
        return len(self.words)


def _read_data(name: str) -> str:
    blob = resources.files("newsvol.data").joinpath(name).read_bytes()
    if name.endswith(".gz"):
        blob = gzip.decompress(blob)
    return blob.decode("utf-8")


@lru_cache(maxsize=None)
def stopwords() -> frozenset[str]:
    return frozenset(_read_data("stopwords.txt").split())


@lru_cache(maxsize=None)
def lexicon() -> dict[str, str]:
    """Word -> coarse tag for every word the suffix rules would mis-tag."""
    table = {}
    for line in _read_data("lexicon.tsv.gz").splitlines():
        word, tag = line.split("\t")
        table[word] = tag
    return table


@lru_cache(maxsize=None)
def noun_lemmas() -> frozenset[str]:
    return frozenset(_read_data("noun_lemmas.txt.gz").split())


def _scan(text: str) -> list[str]:
    return _SCAN.findall(text.lower())


def _split_word(raw: str) -> list[str]:
    """Split a scanned run into word pieces; non-words come back unchanged."""
    if any(ch.isdigit() for ch in raw):
        return [raw]
    return [p for p in re.split(r"['’]", raw) if p]


def _is_word(tok: str) -> bool:
    return _WORD.fullmatch(tok) is not None


def tokenize_and_filter(text: str) -> list[str]:
    """Lowercased word tokens with punctuation, numbers, stopwords and
    single characters removed."""
    stop = stopwords()
    out = []
    for raw in _scan(text):
        for tok in _split_word(raw):
            if _is_word(tok) and len(tok) > 1 and tok not in stop:
                out.append(tok)
    return out


def chunk_tokens(text: str) -> list[str]:
    """Token stream for the chunker.

    Stopwords are kept. Punctuation, numbers and single letters survive as
    boundary tokens that the tagger marks OTHER.
    """
    out = []
    for raw in _scan(text):
        out.extend(_split_word(raw))
    return out


def suffix_tag(word: str) -> str:
    for suffix, tag in SUFFIX_RULES:
        if len(word) > len(suffix) + 1 and word.endswith(suffix):
            return tag
    return "NN"


def tag_word(word: str) -> str:
    if not _is_word(word) or len(word) < 2:
        # "a", "i" and friends still get their lexicon tag
        return lexicon().get(word, "OTHER")
    tag = lexicon().get(word)
    return tag if tag is not None else suffix_tag(word)


def pos_tag(tokens: Sequence[str]) -> list[Token]:
    return [Token(t, normalize(t) if _is_word(t) else t, tag_word(t)) for t in tokens]


@lru_cache(maxsize=1)
def _stemmer() -> PorterStemmer:
    return PorterStemmer()


def lemmatize_noun(word: str) -> str:
    """WordNet-style noun lemma: the shortest known base form, else the word."""
    nouns = noun_lemmas()
    forms = [word]
    if word in _NOUN_IRREGULAR:
        forms.append(_NOUN_IRREGULAR[word])
    forms += [word[: -len(old)] + new for old, new in _NOUN_RULES if word.endswith(old)]
    known = [f for f in forms if f in nouns]
    return min(known, key=len) if known else word


@lru_cache(maxsize=200_000)
def normalize(word: str) -> str:
    """Porter stem, then map to a noun lemma; iterated to a fixed point.

    A single stem+lemma pass is not idempotent ("generalization" ->
    "gener" -> ...), so the pass repeats until nothing changes. Should a
    cycle ever occur, its lexicographically smallest member is used, which
    keeps the function idempotent.
    """
    seen = [word]
    cur = word
    while True:
        nxt = lemmatize_noun(_stemmer().stem(cur, to_lowercase=True))
        if nxt == cur:
            return cur
        if nxt in seen:
            return min(seen[seen.index(nxt):])
        seen.append(nxt)
        cur = nxt


def _is_nbar(tags: Sequence[str]) -> bool:
    return bool(tags) and tags[-1] == "NN" and all(t in ("NN", "JJ") for t in tags)


def _rule2_end(tags: Sequence[str], i: int, cap: int) -> int:
    """Longest NBAR IN NBAR starting at ``i`` with length <= cap; 0 if none."""
    best = 0
    limit = min(len(tags), i + cap)
    for k in range(i + 1, limit - 1):
        if tags[k] != "IN":
            if tags[k] not in ("NN", "JJ"):
                break
            continue
        if not _is_nbar(tags[i:k]):
            break
        for j in range(k + 2, limit + 1):
            if not all(t in ("NN", "JJ") for t in tags[k + 1 : j]):
                break
            if tags[j - 1] == "NN" and j - i > best:
                best = j - i
        break
    return best


def _rule1_end(tags: Sequence[str], i: int, cap: int) -> int:
    best = 0
    for j in range(i + 1, min(len(tags), i + cap) + 1):
        if tags[j - 1] not in ("NN", "JJ"):
            break
        if tags[j - 1] == "NN":
            best = j - i
    return best


def chunk(tagged: Sequence[Token], max_len: int = MAX_NGRAM) -> list[Keyphrase]:
    """Greedy left-to-right chunking with the two grammar rules.

    At each position the preposition rule is tried first, then the plain
    noun-bar rule, each taking its longest match of at most ``max_len``
    tokens. Nouns and adjectives not covered by a multi-word match come out
    as ``Rule.UNIGRAM``. Spans never overlap and follow document order.
    """
    tags = [t.tag for t in tagged]
    out: list[Keyphrase] = []
    i = 0
    while i < len(tags):
        n = _rule2_end(tags, i, max_len)
        rule = Rule.RULE2
        if n == 0:
            n = _rule1_end(tags, i, max_len)
            rule = Rule.RULE1
        if n >= 2:
            words = tuple(t.normalized for t in tagged[i : i + n])
            out.append(Keyphrase(words, rule, i))
            i += n
            continue
        if tags[i] in ("NN", "JJ"):
            out.append(Keyphrase((tagged[i].normalized,), Rule.UNIGRAM, i))
        i += 1
    return out


def keyphrases(text: str) -> list[Keyphrase]:
    """Multi-word grammar chunks (length 2..5) of a document."""
    spans = chunk(pos_tag(chunk_tokens(text)))
    return [kp for kp in spans if kp.rule is not Rule.UNIGRAM and MIN_NGRAM <= len(kp) <= MAX_NGRAM]


def normalized_unigrams(text: str) -> list[str]:
    return [normalize(t) for t in tokenize_and_filter(text)]


def unigram_frequencies(texts: Iterable[str]) -> Counter:
    """Corpus counts of normalized unigrams; feed it training documents only."""
    freq: Counter = Counter()
    for text in texts:
        freq.update(normalized_unigrams(text))
    return freq


def extract_keyphrase_features(
    text: str,
    unigram_freq: Mapping[str, int],
    min_freq: int = MIN_UNIGRAM_FREQ,
) -> list[str]:
    """Keyphrase terms plus sufficiently frequent unigrams, as a multiset.

    Multi-word chunks are kept whatever their frequency; unigrams need at
    least ``min_freq`` occurrences in ``unigram_freq``.
    """
    terms = [kp.text for kp in keyphrases(text)]
    terms += [u for u in normalized_unigrams(text) if unigram_freq.get(u, 0) >= min_freq]
    return terms


def prune_rare(docs: Sequence[Sequence[str]], min_count: int) -> list[list[str]]:
    """Drop terms whose total count across ``docs`` is below ``min_count``."""
    counts = Counter(t for d in docs for t in d)
    return [[t for t in d if counts[t] >= min_count] for d in docs]


def describe(text: str) -> str:
    """Human-readable tagging and chunking trace, used by the CLI."""
    tagged = pos_tag(chunk_tokens(text))
    lines = ["tokens: " + " ".join(f"{t.surface}/{t.tag}" for t in tagged)]
    for kp in chunk(tagged):
        end = kp.start + len(kp)
        surface = " ".join(t.surface for t in tagged[kp.start : end])
        lines.append(f"[{kp.start}:{end}] {kp.rule.value:<7} {surface!r} -> {kp.text!r}")
    return "\n".join(lines)
