"""Dataset ingestion: documents, tokenization, sentence splitting, CoNLL-U.

Raw dataset files become :class:`Document` values; each document is split
into :class:`Sentence` lists by a deterministic rule-based segmenter.
Part-of-speech and dependency annotations are optional and come either
from a CoNLL-U file or from a small closed-class lookup plus suffix
heuristics (see :func:`guess_pos`).
"""

from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources as importlib_resources

logger = logging.getLogger(__name__)

ROOT = -1  # head sentinel for the syntactic root
NONE = ""  # empty deprel / morph marker

BIG_FIVE_TRAITS = ("O", "C", "E", "A", "N")
MBTI_TRAITS = ("I/E", "N/S", "T/F", "P/J")

# Dimension -> (letter scored 1, letter scored 0). The first letter of each
# pair name is the positive label by convention.
_MBTI_LETTERS = {
    "I/E": ("I", "E"),
    "N/S": ("N", "S"),
    "T/F": ("T", "F"),
    "P/J": ("P", "J"),
}

_ESSAYS_COLUMNS = {
    "O": "cOPN",
    "C": "cCON",
    "E": "cEXT",
    "A": "cAGR",
    "N": "cNEU",
}


class IngestError(ValueError):
    """Malformed dataset or annotation input."""


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str = ""
    pos: str = "UNKNOWN"
    deprel: str = NONE
    head: int = ROOT
    morph: str = ""

    def __post_init__(self):
        if not self.surface:
            raise IngestError("token surface must be nonempty")
        if not self.lemma:
            object.__setattr__(self, "lemma", self.surface)


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    index: int

    def __post_init__(self):
        if not self.tokens:
            raise IngestError("sentence must contain at least one token")

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    labels: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise IngestError("document id must be nonempty")
        for trait, value in self.labels.items():
            if value not in (0, 1):
                raise IngestError(
                    f"label {trait!r} of document {self.id!r} is {value!r}, expected 0 or 1"
                )


def _load_wordfile(name: str) -> list[str]:
    data = importlib_resources.files("textcontours").joinpath("data", name)
    lines = data.read_text(encoding="utf-8").splitlines()
    return [ln.strip() for ln in lines if ln.strip() and not ln.startswith("#")]


def _load_abbreviations() -> frozenset[str]:
    return frozenset(_load_wordfile("abbreviations.txt"))


def _load_function_words() -> dict[str, str]:
    table = {}
    for line in _load_wordfile("function_words.txt"):
        word, _, tag = line.partition("\t")
        table[word] = tag or "UNKNOWN"
    return table


ABBREVIATIONS = _load_abbreviations()
FUNCTION_WORDS = _load_function_words()

# A word keeps internal apostrophes and hyphens; everything else at the
# edges is peeled into punctuation tokens.
_WORD_CORE = re.compile(r"[\w](?:[\w'’-]*[\w])?", re.UNICODE)

# Candidate sentence break: terminal punctuation, then whitespace, then an
# upper-case letter, an opening quote, or a digit.
_BREAK = re.compile(r"[.!?]+[\"'”’)\]]*(\s+)(?=[\"'“‘(\[]?[A-Z0-9])")


def tokenize(text: str) -> list[str]:
    """Split ``text`` into word and punctuation tokens.

    Whitespace-delimited chunks are peeled: leading/trailing punctuation
    becomes one token per character, the remaining core (which may contain
    apostrophes and hyphens) is one token. Every non-whitespace character
    of the input lands in exactly one token.
    """
    tokens = []
    for chunk in text.split():
        match = _WORD_CORE.search(chunk)
        if match is None:
            tokens.extend(chunk)  # pure punctuation, one token per char
            continue
        tokens.extend(chunk[: match.start()])
        tokens.append(match.group(0))
        rest = chunk[match.end():]
        # the remainder may contain further word cores ("end.Begin")
        if rest:
            tokens.extend(tokenize(rest))
    return tokens


def _last_word(text: str) -> str:
    """Word immediately preceding a break candidate, lowercased, no final dot."""
    tail = text.rstrip(".!?\"'”’)]")
    parts = tail.split()
    if not parts:
        return ""
    return parts[-1].lower().rstrip(".")


def split_sentences(text: str) -> list[str]:
    """Split raw text into sentence strings.

    Newlines are hard boundaries. Within a line, a break happens at
    terminal punctuation followed by whitespace and an upper-case letter,
    quote, or digit, unless the preceding word is a known abbreviation or
    a single letter (initials).
    """
    sentences = []
    for line in re.split(r"\n+", text):
        line = line.strip()
        if not line:
            continue
        start = 0
        for match in _BREAK.finditer(line):
            prev = _last_word(line[start: match.start() + 1])
            if prev in ABBREVIATIONS or len(prev) == 1:
                continue
            piece = line[start: match.end(1)].strip()
            if piece:
                sentences.append(piece)
            start = match.end(1)
        tail = line[start:].strip()
        if tail:
            sentences.append(tail)
    return sentences


@lru_cache(maxsize=65536)
def alnum_len(surface: str) -> int:
    """Alphanumeric character count, cached (word surfaces repeat a lot)."""
    return sum(1 for c in surface if c.isalnum())


@lru_cache(maxsize=65536)
def guess_pos(surface: str) -> str:
    """Coarse part of speech from a closed-class lookup plus suffix rules.

    Only used when no CoNLL-U annotations are supplied. Content classes
    returned: NOUN, VERB, ADJ, ADV, PROPN; closed classes come from the
    bundled table; anything else is NOUN (the safest open-class default).
    """
    low = surface.lower()
    tag = FUNCTION_WORDS.get(low)
    if tag is not None:
        return tag
    if not any(c.isalpha() for c in surface):
        return "PUNCT" if not any(c.isdigit() for c in surface) else "NUM"
    if low.endswith("ly") and len(low) > 4:
        return "ADV"
    if low.endswith(("ing", "ed")) and len(low) > 4:
        return "VERB"
    if low.endswith(("able", "ible")) and len(low) > 5:
        return "ADJ"
    if low.endswith(("ous", "ful", "ive", "ish", "less")) and len(low) > 4:
        return "ADJ"
    if low.endswith(("tion", "sion", "ment", "ness", "ity", "ship", "hood", "ism")):
        return "NOUN"
    if low.endswith("ize") or low.endswith("ise") or low.endswith("ify"):
        return "VERB"
    return "NOUN"


def segment(doc: Document) -> list[Sentence]:
    """Split a document into tokenized sentences.

    Pure function of ``doc.text``. Raises on effectively empty documents.
    """
    if not doc.text.strip():
        raise IngestError(f"empty document: {doc.id!r}")
    sentences = []
    for i, raw in enumerate(split_sentences(doc.text)):
        surfaces = tokenize(raw)
        if not surfaces:
            continue
        tokens = tuple(
            Token(surface=s, pos=guess_pos(s)) for s in surfaces
        )
        sentences.append(Sentence(tokens=tokens, index=len(sentences)))
    if not sentences:
        raise IngestError(f"document {doc.id!r} contains no tokens")
    return sentences


# ---------------------------------------------------------------------------
# dataset loaders
# ---------------------------------------------------------------------------

def _decompose_mbti(code: str, row_num: int) -> dict[str, int]:
    code = code.strip().upper()
    if len(code) != 4:
        raise IngestError(f"row {row_num}: MBTI type {code!r} is not 4 letters")
    labels = {}
    for letter, trait in zip(code, MBTI_TRAITS):
        pos, neg = _MBTI_LETTERS[trait]
        if letter == pos:
            labels[trait] = 1
        elif letter == neg:
            labels[trait] = 0
        else:
            raise IngestError(
                f"row {row_num}: unknown MBTI letter {letter!r} for dimension {trait}"
            )
    return labels


def _parse_flag(value: str, column: str, row_num: int) -> int:
    v = value.strip().lower()
    if v in ("y", "yes", "1"):
        return 1
    if v in ("n", "no", "0"):
        return 0
    raise IngestError(f"row {row_num}: column {column!r} has value {value!r}, expected y/n")


def load_dataset(
    path,
    schema: str,
    fmt: str,
    column_map: dict[str, str] | None = None,
) -> list[Document]:
    """Load a labeled corpus from a CSV file.

    ``schema`` is ``"BigFive"`` or ``"MBTI"``; ``fmt`` is ``"essays-csv"``
    (columns ``#AUTHID,TEXT,cEXT,cNEU,cAGR,cCON,cOPN``) or ``"mbti-csv"``
    (columns ``type,posts`` with ``|||`` separating posts). ``column_map``
    overrides the Big Five trait -> column binding.
    """
    if (schema, fmt) not in (("BigFive", "essays-csv"), ("MBTI", "mbti-csv")):
        raise IngestError(f"schema {schema!r} does not match format {fmt!r}")
    docs: list[Document] = []
    seen_ids: set[str] = set()
    with open(path, newline="", encoding="utf-8", errors="replace") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise IngestError(f"{path}: empty file, expected a header row")
        for row_num, row in enumerate(reader, start=2):
            try:
                if fmt == "essays-csv":
                    doc = _essays_row(row, row_num, column_map)
                else:
                    doc = _mbti_row(row, row_num)
            except KeyError as exc:
                raise IngestError(f"row {row_num}: missing column {exc}") from exc
            if doc.id in seen_ids:
                raise IngestError(f"row {row_num}: duplicate document id {doc.id!r}")
            seen_ids.add(doc.id)
            docs.append(doc)
    if not docs:
        raise IngestError(f"{path}: no data rows")
    return docs


def _essays_row(row: dict, row_num: int, column_map: dict[str, str] | None) -> Document:
    columns = dict(_ESSAYS_COLUMNS)
    if column_map:
        columns.update(column_map)
    doc_id = (row.get("#AUTHID") or row.get("AUTHID") or "").strip()
    if not doc_id:
        raise IngestError(f"row {row_num}: empty #AUTHID")
    labels = {
        trait: _parse_flag(row[col], col, row_num) for trait, col in columns.items()
    }
    return Document(id=doc_id, text=row["TEXT"], labels=labels)


def _mbti_row(row: dict, row_num: int) -> Document:
    labels = _decompose_mbti(row["type"], row_num)
    # ||| separates forum posts; force sentence boundaries between them
    text = row["posts"].replace("|||", "\n")
    return Document(id=f"mbti-{row_num - 1}", text=text, labels=labels)


# ---------------------------------------------------------------------------
# CoNLL-U ingestion
# ---------------------------------------------------------------------------

_NEWDOC = re.compile(r"#\s*newdoc\s+id\s*=\s*(\S+)")


def load_conllu(path) -> dict[str, list[Sentence]]:
    """Parse a CoNLL-U file into per-document sentence lists.

    ``# newdoc id = <id>`` comments bind sentence blocks to document ids.
    Multiword-token ranges and empty nodes are skipped. Head indices are
    converted to 0-based token positions (root becomes :data:`ROOT`).
    """
    result: dict[str, list[Sentence]] = {}
    current_id: str | None = None
    rows: list[tuple] = []

    def flush(line_num: int):
        if not rows:
            return
        if current_id is None:
            raise IngestError(f"line {line_num}: sentence block before any '# newdoc id'")
        sents = result.setdefault(current_id, [])
        tokens = _finish_block(rows, line_num)
        sents.append(Sentence(tokens=tokens, index=len(sents)))
        rows.clear()

    with open(path, encoding="utf-8") as fh:
        line_num = 0
        for line_num, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                flush(line_num)
                continue
            if line.startswith("#"):
                match = _NEWDOC.match(line)
                if match:
                    flush(line_num)
                    current_id = match.group(1)
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise IngestError(f"line {line_num}: expected 10 columns, got {len(cols)}")
            if "-" in cols[0] or "." in cols[0]:
                continue  # multiword-token range / empty node
            try:
                tok_id = int(cols[0])
                head = int(cols[6]) if cols[6] != "_" else 0
            except ValueError as exc:
                raise IngestError(f"line {line_num}: non-numeric id or head") from exc
            rows.append((tok_id, cols[1], cols[2], cols[3], cols[5], head, cols[7], line_num))
        flush(line_num + 1)
    return result


def _finish_block(rows: list[tuple], line_num: int) -> tuple[Token, ...]:
    ids = [r[0] for r in rows]
    if ids != list(range(1, len(rows) + 1)):
        raise IngestError(f"line {line_num}: token ids are not contiguous from 1")
    tokens = []
    for tok_id, form, lemma, upos, feats, head, deprel, ln in rows:
        if head < 0 or head > len(rows):
            raise IngestError(f"line {ln}: head {head} outside sentence of {len(rows)} tokens")
        tokens.append(
            Token(
                surface=form,
                lemma=lemma if lemma != "_" else form,
                pos=upos if upos != "_" else "UNKNOWN",
                deprel=deprel if deprel != "_" else NONE,
                head=ROOT if head == 0 else head - 1,
                morph=feats if feats != "_" else "",
            )
        )
    return tuple(tokens)


def apply_conllu(
    docs: list[Document], annotated: dict[str, list[Sentence]]
) -> dict[str, list[Sentence]]:
    """Segment ``docs``, preferring CoNLL-U sentences where available.

    Annotated entries whose id matches no document are kept but logged,
    so a partially matching file is usable.
    """
    known = {d.id for d in docs}
    for doc_id in annotated:
        if doc_id not in known:
            logger.warning("CoNLL-U document id %r matches no loaded document", doc_id)
    out = {}
    for doc in docs:
        out[doc.id] = annotated.get(doc.id) or segment(doc)
    return out


def has_parse(sentences: list[Sentence]) -> bool:
    """True when dependency annotations are present (any non-empty deprel)."""
    return any(t.deprel for s in sentences for t in s.tokens)
