"""
Keyphrases from a tag grammar
=============================

Tag words, chunk them with the two noun-phrase rules and normalize each
chunk, then build the n-gram feature list for a pair of headlines that
share most of their words.
"""

from __future__ import annotations

from newsvol.textproc import describe, extract_keyphrase_features, keyphrases, unigram_frequencies

# Rule1: adjectives/nouns ending in a noun. Rule2: two of those joined by a preposition.
for text in ("effective algorithm", "quality of service"):
    print(describe(text), "\n")

headlines = [
    "Quarterly revenue beat forecasted EPS estimates",
    "Quarterly earnings per share beat analyst estimates",
]
for h in headlines:
    print(h)
    print("  chunks:", [f"{k.rule.value}:{k.text}" for k in keyphrases(h)])

# Unigrams only count when they are frequent enough in the training text.
freq = unigram_frequencies(headlines * 3)
for h in headlines:
    print("  features:", extract_keyphrase_features(h, freq))
