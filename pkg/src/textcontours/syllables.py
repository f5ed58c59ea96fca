"""Heuristic English syllable counter.

Counts vowel groups, then applies silent-e and suffix corrections plus a
small exception dictionary. The rules are frozen: readability features
are defined in terms of exactly this counter.
"""

from __future__ import annotations

import re
from functools import lru_cache

_VOWEL_GROUP = re.compile(r"[aeiouy]+")

# Words the rules get wrong. Extend only together with the oracle tests.
_EXCEPTIONS = {
    "area": 3,
    "aria": 3,
    "being": 2,
    "business": 2,
    "cafe": 2,
    "chaos": 2,
    "colonel": 2,
    "create": 2,
    "diet": 2,
    "dioxide": 3,
    "every": 2,
    "evening": 2,
    "family": 3,
    "idea": 3,
    "interesting": 3,
    "people": 2,
    "poem": 2,
    "quiet": 2,
    "real": 2,
    "recipe": 3,
    "science": 2,
    "wednesday": 2,
}

_ADD_ONE_SUFFIXES = ("ia", "io", "ium")


@lru_cache(maxsize=65536)
def count_syllables(word: str) -> int:
    """Syllables in ``word``; at least 1 for anything containing a letter.

    Non-alphabetic characters are stripped first; tokens without letters
    count 0 syllables.
    """
    w = "".join(c for c in word.lower() if c.isalpha())
    if not w:
        return 0
    hit = _EXCEPTIONS.get(w)
    if hit is not None:
        return hit
    count = len(_VOWEL_GROUP.findall(w))
    if count == 0:
        return 1
    # silent final e: "make" -> 1, but "able" keeps its -le syllable
    if w.endswith("e") and not w.endswith(("le", "ee", "ye", "oe", "ae")) and count > 1:
        count -= 1
    # "makes", "liked": the e before the final s/d is usually silent
    elif w.endswith("es") and not w.endswith(("ses", "zes", "xes", "ches", "shes", "ges", "ces")) and count > 1:
        count -= 1
    elif w.endswith("ed") and not w.endswith(("ted", "ded")) and count > 1:
        count -= 1
    # hiatus the vowel-group scan merges into one: "ia" in "via", "social"
    for suffix in _ADD_ONE_SUFFIXES:
        if w.endswith(suffix):
            count += 1
            break
    return max(count, 1)
