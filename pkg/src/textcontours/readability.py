"""Readability formulas over cumulative text-window statistics.

Every formula is computed from :class:`WindowStats`, the running counts
of the window from the first sentence of a document up to the current
one. Word-list-dependent formulas (Dale-Chall, Spache) use a bound
familiar-word list when the registry provides one and otherwise fall
back to "familiar = at most two syllables". Tokens without letters
count as familiar.

Counting conventions, fixed here once:

* word        = token containing at least one alphanumeric character
* letters     = alphanumeric characters of word tokens
* polysyllable = word of 3+ syllables (per :mod:`textcontours.syllables`)
* long word   = word of 7+ letters (shared by LIX and RIX)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .ingest import alnum_len
from .syllables import count_syllables

READABILITY_FEATURES = (
    "flesch_reading_ease",
    "flesch_kincaid_grade",
    "smog",
    "gunning_fog",
    "coleman_liau",
    "ari",
    "lix",
    "rix",
    "dale_chall",
    "forcast",
    "linsear_write",
    "fry_grade",
    "spache",
    "strain",
)

# Centers of the grade bands of the Fry graph, (grade, syllables per 100
# words, sentences per 100 words). The estimate is the grade of the
# nearest center under the scaling below; ties resolve to the lower grade.
FRY_ANCHORS = (
    (1, 116.0, 20.0),
    (2, 121.0, 14.5),
    (3, 126.0, 11.5),
    (4, 131.0, 9.5),
    (5, 136.0, 8.3),
    (6, 141.0, 7.3),
    (7, 146.0, 6.6),
    (8, 151.0, 6.0),
    (9, 156.0, 5.5),
    (10, 161.0, 5.1),
    (11, 166.0, 4.7),
    (12, 171.0, 4.4),
    (13, 176.0, 4.1),
    (14, 181.0, 3.8),
    (15, 186.0, 3.6),
    (16, 191.0, 3.4),
    (17, 196.0, 3.2),
)
_FRY_SYLL_SCALE = 6.0
_FRY_SENT_SCALE = 1.5


@dataclass
class WindowStats:
    """Running counts over a window of sentences."""

    sentences: int = 0
    words: int = 0
    letters: int = 0
    syllables: int = 0
    polysyllables: int = 0
    monosyllables: int = 0
    long_words: int = 0
    difficult_dc: int = 0
    unfamiliar_spache: int = 0
    familiar_dc: frozenset[str] | None = field(default=None, repr=False)
    familiar_spache: frozenset[str] | None = field(default=None, repr=False)

    def add_sentence(self, surfaces: list[str]) -> None:
        self.sentences += 1
        for surface in surfaces:
            letters = alnum_len(surface)
            if letters == 0:
                continue
            self.words += 1
            self.letters += letters
            syl = count_syllables(surface)
            self.syllables += syl
            if syl >= 3:
                self.polysyllables += 1
            if syl == 1:
                self.monosyllables += 1
            if letters >= 7:
                self.long_words += 1
            if not _is_familiar(surface, syl, self.familiar_dc):
                self.difficult_dc += 1
            if not _is_familiar(surface, syl, self.familiar_spache):
                self.unfamiliar_spache += 1


def _is_familiar(surface: str, syllables: int, wordlist: frozenset[str] | None) -> bool:
    if not any(c.isalpha() for c in surface):
        return True
    if wordlist is not None:
        return surface.lower() in wordlist
    return syllables <= 2


def flesch_reading_ease(s: WindowStats) -> float:
    w, n = max(s.words, 1), max(s.sentences, 1)
    return 206.835 - 1.015 * (w / n) - 84.6 * (s.syllables / w)


def flesch_kincaid_grade(s: WindowStats) -> float:
    w, n = max(s.words, 1), max(s.sentences, 1)
    return 0.39 * (w / n) + 11.8 * (s.syllables / w) - 15.59


def smog(s: WindowStats) -> float:
    n = max(s.sentences, 1)
    return 1.0430 * math.sqrt(s.polysyllables * 30.0 / n) + 3.1291


def gunning_fog(s: WindowStats) -> float:
    w, n = max(s.words, 1), max(s.sentences, 1)
    return 0.4 * (w / n + 100.0 * s.polysyllables / w)


def coleman_liau(s: WindowStats) -> float:
    w = max(s.words, 1)
    return 0.0588 * (100.0 * s.letters / w) - 0.296 * (100.0 * s.sentences / w) - 15.8


def ari(s: WindowStats) -> float:
    w, n = max(s.words, 1), max(s.sentences, 1)
    return 4.71 * (s.letters / w) + 0.5 * (w / n) - 21.43


def lix(s: WindowStats) -> float:
    w, n = max(s.words, 1), max(s.sentences, 1)
    return w / n + 100.0 * s.long_words / w


def rix(s: WindowStats) -> float:
    return s.long_words / max(s.sentences, 1)


def dale_chall(s: WindowStats) -> float:
    w, n = max(s.words, 1), max(s.sentences, 1)
    pct = 100.0 * s.difficult_dc / w
    score = 0.1579 * pct + 0.0496 * (w / n)
    if pct > 5.0:
        score += 3.6365
    return score


def forcast(s: WindowStats) -> float:
    w = max(s.words, 1)
    return 20.0 - (s.monosyllables * 150.0 / w) / 10.0


def linsear_write(s: WindowStats) -> float:
    n = max(s.sentences, 1)
    easy = s.words - s.polysyllables
    provisional = (easy + 3.0 * s.polysyllables) / n
    if provisional > 20.0:
        return provisional / 2.0
    return provisional / 2.0 - 1.0


def fry_grade(s: WindowStats) -> float:
    w = max(s.words, 1)
    syll_per_100 = 100.0 * s.syllables / w
    sent_per_100 = 100.0 * s.sentences / w
    best_grade, best_dist = FRY_ANCHORS[0][0], math.inf
    for grade, a_syll, a_sent in FRY_ANCHORS:
        dx = (syll_per_100 - a_syll) / _FRY_SYLL_SCALE
        dy = (sent_per_100 - a_sent) / _FRY_SENT_SCALE
        dist = dx * dx + dy * dy
        if dist < best_dist:
            best_grade, best_dist = grade, dist
    return float(best_grade)


def spache(s: WindowStats) -> float:
    w, n = max(s.words, 1), max(s.sentences, 1)
    return 0.141 * (w / n) + 0.086 * (100.0 * s.unfamiliar_spache / w) + 0.839


def strain(s: WindowStats) -> float:
    n = max(s.sentences, 1)
    return (s.syllables / n) * 3.0 / 10.0


_FORMULAS = (
    flesch_reading_ease,
    flesch_kincaid_grade,
    smog,
    gunning_fog,
    coleman_liau,
    ari,
    lix,
    rix,
    dale_chall,
    forcast,
    linsear_write,
    fry_grade,
    spache,
    strain,
)


def all_scores(s: WindowStats) -> list[float]:
    """All 14 formulas in :data:`READABILITY_FEATURES` order."""
    return [f(s) for f in _FORMULAS]
