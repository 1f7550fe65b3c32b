"""Paragraph and sentence segmentation with global sentence indexing.

A document side is split into paragraphs on the newline symbol, then into
sentences, and every sentence gets a global index 0..n-1 in reading order.
Alignment links refer to those global indices, so two input modes exist:

* PRESEGMENTED (default): one sentence per line, blank line = paragraph
  break.  No sentence splitting is performed, which keeps the indices
  identical to whatever upstream aligner produced them.
* RAW: paragraphs on single newlines, sentences found by a deliberately
  simple rule-based splitter.  The splitter is deterministic, frozen by
  golden tests, and makes no accuracy claims.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

MODE_RAW = "raw"
MODE_PRESEGMENTED = "presegmented"


@dataclass(frozen=True)
class Paragraph:
    """One paragraph: (global_sentence_index, text) in reading order."""

    para_index: int
    sentences: tuple[tuple[int, str], ...]


@dataclass(frozen=True)
class SegmentedDocument:
    """One document side with its sentence -> paragraph index map."""

    doc_id: str
    paragraphs: tuple[Paragraph, ...]
    sent_to_para: dict[int, int]

    @property
    def n_sentences(self) -> int:
        return len(self.sent_to_para)

    def sentence_text(self, global_index: int) -> str:
        para = self.paragraphs[self.sent_to_para[global_index]]
        for idx, text in para.sentences:
            if idx == global_index:
                return text
        raise KeyError(global_index)


def split_paragraphs(text: str) -> list[str]:
    """Split LF-normalized text on newlines, trimming and dropping empties."""
    return [piece.strip() for piece in text.split("\n") if piece.strip()]


# Sentence boundary: terminal punctuation (optionally followed by closing
# quotes/brackets), then whitespace, then a capital or opening quote.
_TERMINALS = ".!?…。！？"  # . ! ? … 。 ！ ？
_CLOSERS = "\"'”’»)\\]"
_OPENERS = "\"'“‘«(¿¡"
_BOUNDARY = re.compile(
    rf"(?P<end>[{_TERMINALS}]+[{_CLOSERS}]*)\s+(?=(?P<next>\S))"
)


def load_abbreviations(lang_code: str) -> frozenset[str]:
    """Load the shipped abbreviation list for a language ('' entries ignored).

    Unknown language codes yield an empty set, i.e. splitting on every
    terminal-punctuation boundary.
    """
    ref = resources.files("parapipe").joinpath(f"data/abbrev/{lang_code}.txt")
    if not ref.is_file():
        return frozenset()
    lines = ref.read_text(encoding="utf-8").splitlines()
    return frozenset(line.strip() for line in lines if line.strip())


def _is_abbreviation(text: str, punct_start: int, abbreviations: frozenset[str]) -> bool:
    """True when the token ending at punct_start is a non-breaking prefix."""
    if text[punct_start] != ".":
        return False
    token_start = punct_start
    while token_start > 0 and not text[token_start - 1].isspace():
        token_start -= 1
    token = text[token_start:punct_start]
    if len(token) == 1 and token.isalpha():
        return True  # initials: "J. Smith"
    return token in abbreviations


def split_sentences(
    paragraph_text: str, abbreviations: frozenset[str] = frozenset()
) -> list[str]:
    """Split one trimmed paragraph into sentences.

    Breaks only at terminal punctuation followed by whitespace and an
    uppercase or opening-quote start; a period after a listed abbreviation
    or a single-letter initial never breaks.  Never returns empty
    sentences; text without terminal punctuation comes back whole.
    """
    pieces: list[str] = []
    start = 0
    for m in _BOUNDARY.finditer(paragraph_text):
        nxt = m.group("next")
        if not (nxt.isupper() or nxt in _OPENERS):
            continue
        if _is_abbreviation(paragraph_text, m.start("end"), abbreviations):
            continue
        pieces.append(paragraph_text[start : m.end("end")])
        start = m.end()
    pieces.append(paragraph_text[start:])
    return [p.strip() for p in pieces if p.strip()]


def segment_document(
    doc_id: str,
    text: str,
    mode: str = MODE_PRESEGMENTED,
    abbreviations: frozenset[str] = frozenset(),
) -> SegmentedDocument:
    """Segment one LF-normalized document side and index its sentences."""
    if mode == MODE_RAW:
        para_sentences = [
            split_sentences(para, abbreviations) for para in split_paragraphs(text)
        ]
    elif mode == MODE_PRESEGMENTED:
        para_sentences = _group_presegmented(text)
    else:
        raise ValueError(f"unknown segmentation mode: {mode!r}")

    paragraphs: list[Paragraph] = []
    sent_to_para: dict[int, int] = {}
    next_index = 0
    for sentences in para_sentences:
        if not sentences:
            continue
        para_index = len(paragraphs)
        indexed = []
        for sentence in sentences:
            indexed.append((next_index, sentence))
            sent_to_para[next_index] = para_index
            next_index += 1
        paragraphs.append(Paragraph(para_index=para_index, sentences=tuple(indexed)))
    return SegmentedDocument(
        doc_id=doc_id, paragraphs=tuple(paragraphs), sent_to_para=sent_to_para
    )


def _group_presegmented(text: str) -> list[list[str]]:
    """One sentence per line, blank line = paragraph break."""
    groups: list[list[str]] = []
    current: list[str] = []
    for line in text.split("\n"):
        line = line.strip()
        if line:
            current.append(line)
        elif current:
            groups.append(current)
            current = []
    if current:
        groups.append(current)
    return groups
