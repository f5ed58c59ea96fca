"""Word-level resource loading: lexicons, norms, word lists, n-gram tables.

All resources arrive through one manifest file (``kind<TAB>name<TAB>path``
per line) and are parsed into an immutable :class:`ResourceStore`. Licensed
lexicons are never bundled; converting them into the universal file formats
below is an offline step documented in the README.

File formats (all UTF-8, ``#`` comment lines allowed):

* lexicon:  ``word<TAB>subcategory<TAB>score``; a trailing ``*`` on the
  word makes it a prefix pattern (checked after exact matches).
* norm:     ``word<TAB>value``
* wordlist: one word per line
* freq:     ``ngram<TAB>rank<TAB>log10freq``; the filename encodes register
  and n, e.g. ``coca_spoken.2.tsv``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

REGISTERS = ("spoken", "magazine", "fiction", "news", "academic")

ABSENT = None


class ResourceError(ValueError):
    """Malformed or missing resource input."""


@dataclass(frozen=True)
class Lexicon:
    """Scored word lists grouped into subcategories.

    ``entries`` maps lowercased words to ``{subcategory: score}``;
    ``prefixes`` holds wildcard patterns (``happ*``) keyed by the bare
    prefix. Exact entries always win over prefix matches; among prefix
    matches the longest prefix wins.
    """

    name: str
    subcategories: tuple[str, ...]
    entries: dict[str, dict[str, float]]
    prefixes: dict[str, dict[str, float]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.subcategories:
            raise ResourceError(f"lexicon {self.name!r} declares no subcategories")
        object.__setattr__(
            self, "_max_prefix", max((len(p) for p in self.prefixes), default=0)
        )

    def lookup(self, word: str) -> dict[str, float] | None:
        w = word.lower()
        hit = self.entries.get(w)
        if hit is not None:
            return hit
        for k in range(min(len(w), self._max_prefix), 0, -1):
            hit = self.prefixes.get(w[:k])
            if hit is not None:
                return hit
        return None


@dataclass(frozen=True)
class NormTable:
    """Per-word real-valued norm (age of acquisition, prevalence, ...)."""

    name: str
    entries: dict[str, float]

    def lookup(self, word: str) -> float | None:
        return self.entries.get(word.lower())


@dataclass(frozen=True)
class FrequencyTable:
    """Ranked n-gram frequencies for one register and one n."""

    name: str
    register: str
    n: int
    entries: dict[str, tuple[int, float]]

    def __post_init__(self):
        if self.register not in REGISTERS:
            raise ResourceError(
                f"frequency table {self.name!r}: unknown register {self.register!r}"
            )
        if not 1 <= self.n <= 5:
            raise ResourceError(f"frequency table {self.name!r}: n={self.n} outside [1, 5]")


def lookup_ngram(table: FrequencyTable, gram: list[str]) -> tuple[int, float] | None:
    """Exact lowercased lookup of ``gram``; returns (rank, log10 frequency)."""
    if len(gram) != table.n:
        raise ResourceError(
            f"gram of {len(gram)} tokens looked up in a {table.n}-gram table"
        )
    return table.entries.get(" ".join(t.lower() for t in gram))


@dataclass(frozen=True)
class ResourceStore:
    lexicons: tuple[Lexicon, ...] = ()
    norms: tuple[NormTable, ...] = ()
    wordlists: dict[str, frozenset[str]] = field(default_factory=dict)
    freq_tables: tuple[FrequencyTable, ...] = ()

    def norm(self, name: str) -> NormTable:
        for t in self.norms:
            if t.name == name:
                return t
        raise ResourceError(f"no norm table named {name!r}")

    def wordlist(self, name: str) -> frozenset[str]:
        try:
            return self.wordlists[name]
        except KeyError:
            raise ResourceError(f"no wordlist named {name!r}") from None

    def summary(self) -> dict:
        return {
            "lexicons": {
                lx.name: {
                    "subcategories": len(lx.subcategories),
                    "entries": len(lx.entries) + len(lx.prefixes),
                }
                for lx in self.lexicons
            },
            "norms": {t.name: len(t.entries) for t in self.norms},
            "wordlists": {k: len(v) for k, v in self.wordlists.items()},
            "freq_tables": {
                t.name: {"register": t.register, "n": t.n, "entries": len(t.entries)}
                for t in self.freq_tables
            },
        }


def _data_lines(path: str):
    try:
        fh = open(path, encoding="utf-8")
    except FileNotFoundError:
        raise ResourceError(f"resource file not found: {path}") from None
    with fh:
        for line_num, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield line_num, line


def load_lexicon(name: str, path: str) -> Lexicon:
    subcats: list[str] = []
    entries: dict[str, dict[str, float]] = {}
    prefixes: dict[str, dict[str, float]] = {}
    for line_num, line in _data_lines(path):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ResourceError(f"{path}:{line_num}: expected word<TAB>subcategory<TAB>score")
        word, subcat, raw = parts
        try:
            score = float(raw)
        except ValueError:
            raise ResourceError(f"{path}:{line_num}: score {raw!r} is not a number") from None
        if not math.isfinite(score):
            raise ResourceError(f"{path}:{line_num}: non-finite score")
        if subcat not in subcats:
            subcats.append(subcat)
        word = word.lower()
        target = prefixes if word.endswith("*") else entries
        key = word.rstrip("*")
        if not key:
            raise ResourceError(f"{path}:{line_num}: empty word")
        target.setdefault(key, {})[subcat] = score
    return Lexicon(name=name, subcategories=tuple(subcats), entries=entries, prefixes=prefixes)


def load_norm(name: str, path: str) -> NormTable:
    entries: dict[str, float] = {}
    for line_num, line in _data_lines(path):
        parts = line.split("\t")
        if len(parts) != 2:
            raise ResourceError(f"{path}:{line_num}: expected word<TAB>value")
        try:
            value = float(parts[1])
        except ValueError:
            raise ResourceError(f"{path}:{line_num}: value {parts[1]!r} is not a number") from None
        if not math.isfinite(value):
            raise ResourceError(f"{path}:{line_num}: non-finite value")
        entries[parts[0].lower()] = value
    return NormTable(name=name, entries=entries)


def load_wordlist(path: str) -> frozenset[str]:
    return frozenset(line.strip().lower() for _, line in _data_lines(path))


def _freq_meta_from_filename(path: str) -> tuple[str, int]:
    base = os.path.basename(path)
    stem = base[:-4] if base.endswith(".tsv") else base
    head, dot, n_part = stem.rpartition(".")
    if not dot:
        raise ResourceError(f"{path}: filename does not encode n (expected like coca_spoken.2.tsv)")
    try:
        n = int(n_part)
    except ValueError:
        raise ResourceError(f"{path}: filename n-part {n_part!r} is not an integer") from None
    register = head.rpartition("_")[2]
    return register, n


def load_freq_table(name: str, path: str) -> FrequencyTable:
    register, n = _freq_meta_from_filename(path)
    entries: dict[str, tuple[int, float]] = {}
    for line_num, line in _data_lines(path):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ResourceError(f"{path}:{line_num}: expected ngram<TAB>rank<TAB>log10freq")
        gram = parts[0].lower()
        if len(gram.split(" ")) != n:
            raise ResourceError(
                f"{path}:{line_num}: {parts[0]!r} has wrong token count for a {n}-gram table"
            )
        try:
            rank = int(parts[1])
            logf = float(parts[2])
        except ValueError:
            raise ResourceError(f"{path}:{line_num}: bad rank or frequency") from None
        if rank < 1:
            raise ResourceError(f"{path}:{line_num}: rank must be >= 1")
        if not math.isfinite(logf):
            raise ResourceError(f"{path}:{line_num}: non-finite log frequency")
        entries[gram] = (rank, logf)
    return FrequencyTable(name=name, register=register, n=n, entries=entries)


_LOADERS = {
    "lexicon": load_lexicon,
    "norm": load_norm,
    "freq": load_freq_table,
}


def load_store(manifest: str) -> ResourceStore:
    """Parse a manifest and load every resource it names.

    Lines are ``kind<TAB>name<TAB>path`` with kinds lexicon, norm,
    wordlist, freq. Relative paths resolve against the manifest location.
    Loading is order-independent: resources are sorted by (kind, name)
    before assembly.
    """
    base = os.path.dirname(os.path.abspath(manifest))
    rows: list[tuple[str, str, str]] = []
    seen: set[tuple[str, str]] = set()
    for line_num, line in _data_lines(manifest):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ResourceError(f"{manifest}:{line_num}: expected kind<TAB>name<TAB>path")
        kind, name, path = (p.strip() for p in parts)
        if kind not in ("lexicon", "norm", "wordlist", "freq"):
            raise ResourceError(f"{manifest}:{line_num}: unknown resource kind {kind!r}")
        if (kind, name) in seen:
            raise ResourceError(f"{manifest}:{line_num}: duplicate {kind} name {name!r}")
        seen.add((kind, name))
        if not os.path.isabs(path):
            path = os.path.join(base, path)
        rows.append((kind, name, path))
    rows.sort()

    lexicons, norms, freqs = [], [], []
    wordlists: dict[str, frozenset[str]] = {}
    for kind, name, path in rows:
        if kind == "wordlist":
            wordlists[name] = load_wordlist(path)
        else:
            loaded = _LOADERS[kind](name, path)
            {"lexicon": lexicons, "norm": norms, "freq": freqs}[kind].append(loaded)
    return ResourceStore(
        lexicons=tuple(lexicons),
        norms=tuple(norms),
        wordlists=wordlists,
        freq_tables=tuple(freqs),
    )
