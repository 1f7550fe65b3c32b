"""Parsers for the two on-disk input formats.

Document pairs arrive as a 5-field TSV, one aligned webpage pair per line:

    pair_id <TAB> src_url <TAB> tgt_url <TAB> base64(src_text) <TAB> base64(tgt_text)

Sentence alignments arrive in blocks bound to a document pair by a header
line, followed by one link per line in the usual aligner output style:

    #pair <pair_id>
    [0, 1]:[0]:0.24
    []:[2]:0.0

Both parsers are streaming and order-preserving.  The document-pair parser
supports a skip-and-count error policy for dirty crawl data; the alignment
parser is strict because a malformed alignment file is a structural
problem, not a data-quality one.
"""

from __future__ import annotations

import base64
import binascii
import gzip
import lzma
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator


class IngestError(ValueError):
    """A malformed input record or stream."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


@dataclass(frozen=True)
class RawDocPair:
    """One aligned webpage pair, texts decoded and LF-normalized."""

    pair_id: str
    src_url: str
    tgt_url: str
    src_text: str
    tgt_text: str


@dataclass(frozen=True)
class AlignmentLink:
    """One sentence-alignment record: index sets plus the aligner score."""

    src_indices: tuple[int, ...]
    tgt_indices: tuple[int, ...]
    score: float

    def __post_init__(self):
        if not self.src_indices and not self.tgt_indices:
            raise ValueError("alignment link with both index lists empty")
        for name, idx in (("src", self.src_indices), ("tgt", self.tgt_indices)):
            if any(i < 0 for i in idx):
                raise ValueError(f"negative {name} sentence index in {idx}")
            if any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"{name} indices not strictly increasing: {idx}")

    def is_one_to_one(self) -> bool:
        return len(self.src_indices) == 1 and len(self.tgt_indices) == 1


@dataclass
class SkipLog:
    """Accounting for records dropped under the skip-and-count policy."""

    skipped: int = 0
    reasons: list[str] = field(default_factory=list)

    def record(self, line_no: int, reason: str) -> None:
        self.skipped += 1
        self.reasons.append(f"line {line_no}: {reason}")


def open_stream(path: str | Path) -> BinaryIO:
    """Open a file for binary reading, decompressing by extension."""
    path = Path(path)
    if path.suffix == ".xz":
        return lzma.open(path, "rb")
    if path.suffix == ".gz":
        return gzip.open(path, "rb")
    return open(path, "rb")


def _normalize_newlines(text: str) -> str:
    return text.replace("\r\n", "\n").replace("\r", "\n")


def parse_document_pairs(
    stream: Iterable[bytes],
    on_error: str = "skip",
    skip_log: SkipLog | None = None,
) -> Iterator[RawDocPair]:
    """Yield document pairs from a line-oriented byte stream.

    ``on_error`` selects the policy for malformed records: ``"skip"``
    drops the record and counts it in ``skip_log``; ``"abort"`` raises
    IngestError at the first bad record.  Every input line is either
    yielded or accounted for in the skip log; nothing is dropped
    silently.
    """
    if on_error not in ("skip", "abort"):
        raise ValueError(f"unknown error policy: {on_error!r}")
    if skip_log is None:
        skip_log = SkipLog()
    seen_ids: set[str] = set()

    for line_no, raw in enumerate(stream, start=1):
        line = raw.rstrip(b"\r\n")
        if not line:
            continue
        fields = line.split(b"\t")
        try:
            if len(fields) != 5:
                raise IngestError(line_no, f"field count {len(fields)}, expected 5")
            pair_id = fields[0].decode("utf-8", errors="strict")
            if not pair_id:
                raise IngestError(line_no, "empty pair_id")
            if pair_id in seen_ids:
                raise IngestError(line_no, f"duplicate pair_id {pair_id!r}")
            try:
                src_url = fields[1].decode("utf-8")
                tgt_url = fields[2].decode("utf-8")
                src_text = base64.b64decode(fields[3], validate=True).decode("utf-8")
                tgt_text = base64.b64decode(fields[4], validate=True).decode("utf-8")
            except (binascii.Error, UnicodeDecodeError) as exc:
                raise IngestError(line_no, f"undecodable record: {exc}") from exc
        except IngestError as exc:
            if on_error == "abort":
                raise
            skip_log.record(exc.line_no, exc.reason)
            continue
        seen_ids.add(pair_id)
        yield RawDocPair(
            pair_id=pair_id,
            src_url=src_url,
            tgt_url=tgt_url,
            src_text=_normalize_newlines(src_text),
            tgt_text=_normalize_newlines(tgt_text),
        )


def format_document_pair(pair: RawDocPair) -> bytes:
    """Render a document pair back to its TSV record (LF-terminated)."""
    fields = [
        pair.pair_id.encode("utf-8"),
        pair.src_url.encode("utf-8"),
        pair.tgt_url.encode("utf-8"),
        base64.b64encode(pair.src_text.encode("utf-8")),
        base64.b64encode(pair.tgt_text.encode("utf-8")),
    ]
    return b"\t".join(fields) + b"\n"


_PAIR_HEADER = re.compile(r"^#pair\s+(\S+)\s*$")
_LINK_LINE = re.compile(r"^\[(?P<src>[^\]]*)\]:\[(?P<tgt>[^\]]*)\]:(?P<score>\S+)\s*$")


def _parse_index_list(text: str, line_no: int) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(part.strip()) for part in text.split(","))
    except ValueError as exc:
        raise IngestError(line_no, f"malformed index list [{text}]") from exc


def parse_alignments(stream: Iterable[bytes]) -> dict[str, list[AlignmentLink]]:
    """Parse an alignment file into per-pair link lists, file order kept."""
    links: dict[str, list[AlignmentLink]] = {}
    current: str | None = None

    for line_no, raw in enumerate(stream, start=1):
        line = raw.decode("utf-8").rstrip("\r\n")
        if not line.strip():
            continue
        header = _PAIR_HEADER.match(line)
        if header:
            pair_id = header.group(1)
            if pair_id in links:
                raise IngestError(line_no, f"duplicate #pair header for {pair_id!r}")
            links[pair_id] = []
            current = pair_id
            continue
        if current is None:
            raise IngestError(line_no, "link line before any #pair header")
        m = _LINK_LINE.match(line)
        if not m:
            raise IngestError(line_no, f"malformed alignment line: {line!r}")
        src = _parse_index_list(m.group("src"), line_no)
        tgt = _parse_index_list(m.group("tgt"), line_no)
        try:
            score = float(m.group("score"))
        except ValueError as exc:
            raise IngestError(line_no, f"score not a number: {m.group('score')!r}") from exc
        try:
            link = AlignmentLink(src_indices=src, tgt_indices=tgt, score=score)
        except ValueError as exc:
            raise IngestError(line_no, str(exc)) from exc
        links[current].append(link)
    return links
