"""Sentiment/emotion/affect features from scored lexicons.

For every lexicon subcategory the feature value is the arithmetic mean of
the scores of the sentence's matched word tokens; a sentence with no
match for a subcategory scores 0 there. Each lexicon additionally gets a
coverage feature: the fraction of word tokens with any entry in that
lexicon. Matching is case-insensitive, exact entries first, then the
longest wildcard prefix.
"""

from __future__ import annotations

from .resources import Lexicon


def sentiemo_vector(words_lower: list[str], lexicons: list[Lexicon]) -> list[float]:
    out: list[float] = []
    n = len(words_lower)
    for lx in lexicons:
        sums = dict.fromkeys(lx.subcategories, 0.0)
        counts = dict.fromkeys(lx.subcategories, 0)
        matched_tokens = 0
        for w in words_lower:
            hit = lx.lookup(w)
            if hit is None:
                continue
            matched_tokens += 1
            for sub, score in hit.items():
                sums[sub] += score
                counts[sub] += 1
        for sub in lx.subcategories:
            c = counts[sub]
            out.append(sums[sub] / c if c else 0.0)
        out.append(matched_tokens / n if n else 0.0)
    return out
