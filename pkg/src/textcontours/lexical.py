"""Lexical richness, diversity, sophistication, norm, and frequency features.

Word tokens are tokens containing at least one alphanumeric character;
lookups are case-insensitive. Diversity measures run over the cumulative
lowercased word-token stream of the document: Carroll corrected TTR
T/sqrt(2N), root TTR T/sqrt(N), Herdan's C log T / log N, a moving-average
TTR over a fixed window, and the hapax proportion. Unmatched norm lookups
fall back to 0 with a paired coverage feature.
"""

from __future__ import annotations

import math
from collections import Counter, deque

from .ingest import alnum_len
from .resources import ResourceStore
from .syllables import count_syllables

_CONTENT_POS = frozenset({"NOUN", "VERB", "ADJ", "ADV", "PROPN"})


def word_tokens(sent) -> list[str]:
    return [t.surface for t in sent.tokens if alnum_len(t.surface)]


class DiversityState:
    """Cumulative type/token bookkeeping for one document."""

    def __init__(self, mattr_window: int = 50):
        self.mattr_window = mattr_window
        self.tokens = 0
        self.types: Counter[str] = Counter()
        self.window: deque[str] = deque()
        self.window_counts: Counter[str] = Counter()
        self.mattr_sum = 0.0
        self.mattr_n = 0

    def push(self, word: str) -> None:
        self.tokens += 1
        self.types[word] += 1
        self.window.append(word)
        self.window_counts[word] += 1
        if len(self.window) > self.mattr_window:
            old = self.window.popleft()
            self.window_counts[old] -= 1
            if self.window_counts[old] == 0:
                del self.window_counts[old]
        if len(self.window) == self.mattr_window:
            self.mattr_sum += len(self.window_counts) / self.mattr_window
            self.mattr_n += 1

    def cttr(self) -> float:
        if self.tokens == 0:
            return 0.0
        return len(self.types) / math.sqrt(2.0 * self.tokens)

    def rttr(self) -> float:
        if self.tokens == 0:
            return 0.0
        return len(self.types) / math.sqrt(self.tokens)

    def herdan(self) -> float:
        if self.tokens <= 1 or len(self.types) <= 1:
            return 0.0
        return math.log(len(self.types)) / math.log(self.tokens)

    def mattr(self) -> float:
        if self.mattr_n:
            return self.mattr_sum / self.mattr_n
        if self.tokens == 0:
            return 0.0
        return len(self.types) / self.tokens

    def hapax_proportion(self) -> float:
        if not self.types:
            return 0.0
        hapax = sum(1 for c in self.types.values() if c == 1)
        return hapax / len(self.types)


def static_lexical_vector(sent, diversity: DiversityState) -> list[float]:
    """The 14 resource-independent lexical features, in registry order.

    ``diversity`` must already include the sentence's tokens (the caller
    pushes them, so replaying context stays cheap).
    """
    words = word_tokens(sent)
    n = len(words)
    pos_counts = Counter(t.pos for t in sent.tokens if alnum_len(t.surface))
    content = sum(pos_counts[p] for p in _CONTENT_POS)
    function = n - content
    lowered = [w.lower() for w in words]
    if n == 0:
        head = [0.0] * 9
    else:
        head = [
            content / n,
            pos_counts["NOUN"] / n,
            pos_counts["VERB"] / n,
            pos_counts["ADJ"] / n,
            pos_counts["ADV"] / n,
            function / n,
            sum(alnum_len(w) for w in words) / n,
            sum(count_syllables(w) for w in words) / n,
            len(set(lowered)) / n,
        ]
    return head + [
        diversity.cttr(),
        diversity.rttr(),
        diversity.herdan(),
        diversity.mattr(),
        diversity.hapax_proportion(),
    ]


def sophistication_vector(words_lower: list[str], lists: list[frozenset[str]]) -> list[float]:
    """Per wordlist: fraction of word tokens NOT on the list."""
    n = len(words_lower)
    out = []
    for wl in lists:
        if n == 0:
            out.append(0.0)
        else:
            out.append(sum(1 for w in words_lower if w not in wl) / n)
    return out


def norm_vector(words_lower: list[str], tables) -> list[float]:
    """Per norm table: mean over matched tokens and match coverage."""
    out = []
    n = len(words_lower)
    for table in tables:
        total, hits = 0.0, 0
        for w in words_lower:
            v = table.entries.get(w)
            if v is not None:
                total += v
                hits += 1
        out.append(total / hits if hits else 0.0)
        out.append(hits / n if n else 0.0)
    return out


def ngram_vector(words_lower: list[str], tables) -> list[float]:
    """Per frequency table: mean log10 frequency of attested n-grams and
    the attested proportion over the sentence's n-grams."""
    out = []
    for table in tables:
        n = table.n
        total = len(words_lower) - n + 1
        if total <= 0:
            out.extend((0.0, 0.0))
            continue
        hits, logf_sum = 0, 0.0
        entries = table.entries
        for i in range(total):
            hit = entries.get(" ".join(words_lower[i: i + n]))
            if hit is not None:
                hits += 1
                logf_sum += hit[1]
        out.append(logf_sum / hits if hits else 0.0)
        out.append(hits / total)
    return out


def lexical_tables(store: ResourceStore, soph_names, norm_names_):
    """Resolve registry bindings once per extractor."""
    lists = [store.wordlist(n) for n in soph_names]
    norms = [store.norm(n) for n in norm_names_]
    return lists, norms
