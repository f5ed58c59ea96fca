"""Morpho-syntactic complexity features.

Production-unit counts (clauses, T-units, verb phrases, complex nominals,
coordinate phrases) come from one of two documented rule sets:

* without dependency annotations, a finite-verb heuristic: every verb
  group (maximal run of verb/auxiliary tokens, possibly interrupted by
  particles and adverbs) is a clause candidate; a group is finite unless
  it is a to-infinitive or a bare -ing form. Dependent clauses are counted
  from subordinator and relative-pronoun introducers; T-units split at
  coordinating conjunctions joining finite clauses. The complementizer
  "that" is not counted as an introducer (indistinguishable from the
  demonstrative without a parse).
* with annotations, deprel-based rules: advcl/ccomp/xcomp/acl/relcl/csubj
  are dependent clauses; conj between clausal heads opens a new T-unit.

The group also carries three information-theoretic measures: Deflate
compression ratios of the character, POS-tag, and morphology streams of
the cumulative window (tail-capped at 2048 bytes, compression level 6).
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from importlib import resources as importlib_resources

from .ingest import ROOT, Sentence, alnum_len

MORPHSYN_FEATURES = (
    "sentence_length_words",
    "sentence_length_chars",
    "mean_clause_length",
    "clauses_per_sentence",
    "clauses_per_tunit",
    "dependent_clauses_per_clause",
    "dependent_clauses_per_tunit",
    "tunits_per_sentence",
    "mean_tunit_length",
    "verb_phrases_per_sentence",
    "verb_phrases_per_tunit",
    "complex_nominals_per_clause",
    "complex_nominals_per_tunit",
    "coordinate_phrases_per_clause",
    "coordinate_phrases_per_tunit",
    "complex_tunit_ratio",
    "deflate_ratio_chars",
    "deflate_ratio_pos",
    "deflate_ratio_morph",
)

DEFLATE_WINDOW_BYTES = 2048
DEFLATE_LEVEL = 6

_REL_PRONOUNS = frozenset({"who", "whom", "whose", "which"})
_NOMINAL_POS = frozenset({"NOUN", "PROPN"})
_VERBISH = frozenset({"VERB", "AUX"})
_GROUP_FILLER = frozenset({"PART", "ADV"})

_DEP_CLAUSE_RELS = frozenset({"advcl", "ccomp", "xcomp", "acl", "acl:relcl", "relcl", "csubj"})
_NOMINAL_MOD_RELS = frozenset({"amod", "nmod", "nmod:poss", "acl", "acl:relcl", "nummod", "compound"})


def _load_verb_forms() -> frozenset[str]:
    data = importlib_resources.files("textcontours").joinpath("data", "verb_forms.txt")
    lines = data.read_text(encoding="utf-8").splitlines()
    return frozenset(ln.strip() for ln in lines if ln.strip() and not ln.startswith("#"))


VERB_FORMS = _load_verb_forms()


@dataclass
class UnitCounts:
    words: int = 0
    chars: int = 0
    clauses: int = 0
    dependent_clauses: int = 0
    tunits: int = 0
    complex_tunits: int = 0
    verb_phrases: int = 0
    complex_nominals: int = 0
    coordinate_phrases: int = 0


def _is_verbish(token) -> bool:
    if token.pos in _VERBISH:
        return True
    return token.surface.lower() in VERB_FORMS


def _verb_groups(tokens) -> list[tuple[int, bool]]:
    """(start index, is_finite) per verb group."""
    groups = []
    i = 0
    n = len(tokens)
    while i < n:
        if not _is_verbish(tokens[i]):
            i += 1
            continue
        start = i
        while i < n and (_is_verbish(tokens[i]) or tokens[i].pos in _GROUP_FILLER):
            i += 1
        # trim trailing filler so the group ends at its last verb
        end = i
        while end > start and not _is_verbish(tokens[end - 1]):
            end -= 1
        head = tokens[start]
        prev = tokens[start - 1].surface.lower() if start > 0 else ""
        finite = True
        if prev == "to":
            finite = False
        elif head.pos != "AUX" and head.surface.lower().endswith("ing"):
            finite = False
        groups.append((start, finite))
        i = max(i, end)
    return groups


def _heuristic_counts(sent: Sentence) -> UnitCounts:
    tokens = sent.tokens
    c = UnitCounts()
    for t in tokens:
        letters = alnum_len(t.surface)
        if letters:
            c.words += 1
            c.chars += letters

    groups = _verb_groups(tokens)
    finite_starts = [start for start, finite in groups if finite]
    c.verb_phrases = len(groups)
    c.clauses = len(finite_starts)

    introducers = 0
    clause_joining_cc = 0
    cc_total = 0
    for i, t in enumerate(tokens):
        low = t.surface.lower()
        if t.pos == "SCONJ" or low in _REL_PRONOUNS:
            introducers += 1
        if t.pos == "CCONJ":
            cc_total += 1
            before = any(s < i for s in finite_starts)
            after = any(s > i for s in finite_starts)
            if before and after:
                clause_joining_cc += 1
    c.dependent_clauses = min(introducers, max(c.clauses - 1, 0))
    c.tunits = 0 if c.clauses == 0 else min(1 + clause_joining_cc, c.clauses)
    c.complex_tunits = min(c.dependent_clauses, c.tunits)
    c.coordinate_phrases = cc_total - clause_joining_cc

    for i, t in enumerate(tokens):
        if t.pos not in _NOMINAL_POS:
            continue
        prev_pos = tokens[i - 1].pos if i > 0 else ""
        next_low = tokens[i + 1].surface.lower() if i + 1 < len(tokens) else ""
        if prev_pos == "ADJ" or prev_pos in _NOMINAL_POS or next_low == "of":
            c.complex_nominals += 1
    return c


def _parsed_counts(sent: Sentence) -> UnitCounts:
    tokens = sent.tokens
    c = UnitCounts()
    children: list[list[int]] = [[] for _ in tokens]
    for i, t in enumerate(tokens):
        letters = alnum_len(t.surface)
        if letters:
            c.words += 1
            c.chars += letters
        if t.head != ROOT and 0 <= t.head < len(tokens):
            children[t.head].append(i)

    def base_rel(rel: str) -> str:
        return rel.split(":")[0] if rel not in _DEP_CLAUSE_RELS else rel

    clausal = [False] * len(tokens)
    clause_conj = 0
    for i, t in enumerate(tokens):
        rel = t.deprel
        if rel == "root" or rel in _DEP_CLAUSE_RELS or base_rel(rel) in _DEP_CLAUSE_RELS:
            clausal[i] = True
        elif base_rel(rel) in ("conj", "parataxis") and (
            t.pos in _VERBISH or any(tokens[ch].deprel.split(":")[0] == "nsubj" for ch in children[i])
        ):
            clausal[i] = True
            clause_conj += 1

    c.clauses = sum(clausal)
    c.dependent_clauses = sum(
        1 for t in tokens if t.deprel in _DEP_CLAUSE_RELS or base_rel(t.deprel) in _DEP_CLAUSE_RELS
    )
    c.tunits = 0 if c.clauses == 0 else 1 + clause_conj
    c.complex_tunits = min(c.dependent_clauses, c.tunits)
    c.verb_phrases = sum(
        1
        for t in tokens
        if t.pos == "VERB" or (t.pos == "AUX" and t.deprel.split(":")[0] not in ("aux", "cop"))
    )
    c.coordinate_phrases = sum(
        1
        for i, t in enumerate(tokens)
        if t.deprel.split(":")[0] == "conj" and not clausal[i]
    )
    c.complex_nominals = sum(
        1
        for i, t in enumerate(tokens)
        if t.pos in _NOMINAL_POS
        and any(tokens[ch].deprel.split(":")[0] in {r.split(":")[0] for r in _NOMINAL_MOD_RELS}
                or tokens[ch].deprel in _NOMINAL_MOD_RELS
                for ch in children[i])
    )
    return c


def unit_counts(sent: Sentence, parsed: bool) -> UnitCounts:
    return _parsed_counts(sent) if parsed else _heuristic_counts(sent)


def deflate_ratio(data: bytes) -> float:
    """Compressed size over raw size; 1.0 for an empty stream."""
    if not data:
        return 1.0
    comp = zlib.compressobj(DEFLATE_LEVEL, zlib.DEFLATED, -15)
    compressed = comp.compress(data) + comp.flush()
    return len(compressed) / len(data)


class StreamWindow:
    """Tail-capped byte window over a growing stream."""

    def __init__(self, cap: int = DEFLATE_WINDOW_BYTES):
        self.cap = cap
        self.buf = bytearray()

    def append(self, text: str) -> None:
        if not text:
            return
        if self.buf:
            self.buf.extend(b" ")
        self.buf.extend(text.encode("utf-8"))
        if len(self.buf) > self.cap:
            del self.buf[: len(self.buf) - self.cap]

    def ratio(self) -> float:
        return deflate_ratio(bytes(self.buf))


def morphsyn_vector(counts: UnitCounts, ratios: tuple[float, float, float]) -> list[float]:
    """Assemble the 19 features in :data:`MORPHSYN_FEATURES` order."""
    w = counts.words
    cl = max(counts.clauses, 1)
    tu = max(counts.tunits, 1)
    return [
        float(w),
        float(counts.chars),
        w / cl,
        float(counts.clauses),
        counts.clauses / tu,
        counts.dependent_clauses / cl,
        counts.dependent_clauses / tu,
        float(counts.tunits),
        w / tu,
        float(counts.verb_phrases),
        counts.verb_phrases / tu,
        counts.complex_nominals / cl,
        counts.complex_nominals / tu,
        counts.coordinate_phrases / cl,
        counts.coordinate_phrases / tu,
        counts.complex_tunits / tu,
        ratios[0],
        ratios[1],
        ratios[2],
    ]
