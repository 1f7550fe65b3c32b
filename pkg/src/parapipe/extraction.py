"""Consolidate sentence alignment links into parallel paragraph pairs.

Two paragraphs are considered aligned when sentences in them are aligned
to each other and to no other paragraph (mutual exclusivity).  On top of
that the pipeline enforces, in a fixed order:

1. one-to-one links only (insertions, deletions and merges dropped),
2. mutual paragraph exclusivity (consolidation),
3. strictly monotonic sentence order inside a pair,
4. corpus-wide removal of repeated paragraph pairs,
5. removal of pairs left with a single sentence pair.

Sentences of an emitted paragraph pair that carry no link are dropped
from the pair, not held against it.  Every stage feeds a named funnel
counter so a run can report how much data each rule removed.

``oracle_extract`` re-implements the same definition by exhaustive
enumeration with direct set scans and exists purely to cross-check
``extract_pipeline`` on small instances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .ingest import AlignmentLink
from .segmentation import SegmentedDocument


class ExtractionError(ValueError):
    """A link referencing a sentence index outside its document."""


@dataclass(frozen=True)
class SentencePair:
    """One retained one-to-one link with its sentence texts."""

    src_idx: int
    tgt_idx: int
    src_text: str
    tgt_text: str


@dataclass(frozen=True)
class ParagraphPair:
    """An extracted parallel paragraph: ordered one-to-one sentence pairs.

    ``sentence_pairs`` is sorted by src_idx.  Final pipeline output
    additionally guarantees >=2 sentence pairs and strictly increasing
    indices on both sides; intermediate candidates may hold a single pair.
    """

    pair_id: str
    src_para: int
    tgt_para: int
    sentence_pairs: tuple[SentencePair, ...]

    @property
    def id(self) -> str:
        return f"{self.pair_id}:{self.src_para}:{self.tgt_para}"

    @property
    def sort_key(self) -> tuple[str, int, int]:
        return (self.pair_id, self.src_para, self.tgt_para)

    @property
    def src_texts(self) -> tuple[str, ...]:
        return tuple(sp.src_text for sp in self.sentence_pairs)

    @property
    def tgt_texts(self) -> tuple[str, ...]:
        return tuple(sp.tgt_text for sp in self.sentence_pairs)

    def to_json(self) -> str:
        """Render the stable one-line JSON record (deterministic field order)."""
        record = {
            "id": self.id,
            "src": list(self.src_texts),
            "tgt": list(self.tgt_texts),
            "src_para": self.src_para,
            "tgt_para": self.tgt_para,
            "pair_id": self.pair_id,
        }
        return json.dumps(record, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> "ParagraphPair":
        """Parse a JSONL record; sentence indices become positional."""
        record = json.loads(line)
        if len(record["src"]) != len(record["tgt"]):
            raise ValueError(f"record {record.get('id')!r}: src/tgt length mismatch")
        pairs = tuple(
            SentencePair(src_idx=i, tgt_idx=i, src_text=s, tgt_text=t)
            for i, (s, t) in enumerate(zip(record["src"], record["tgt"]))
        )
        return cls(
            pair_id=record["pair_id"],
            src_para=record["src_para"],
            tgt_para=record["tgt_para"],
            sentence_pairs=pairs,
        )


# Funnel stages in pipeline order.  The extraction stages are filled by
# extract_pipeline, the cleaning stages appended by cleaning.clean_pipeline.
EXTRACTION_STAGES = (
    "links_input",
    "links_one_to_one",
    "pairs_grouped",
    "pairs_candidate",
    "pairs_after_monotonic",
    "pairs_after_dedup",
    "pairs_after_singleton",
    "sentence_pairs_surviving",
)
CLEANING_STAGES = (
    "pairs_after_language",
    "pairs_after_length",
    "pairs_after_overlap",
    "sentence_pairs_after_cleaning",
)
ALL_STAGES = EXTRACTION_STAGES + CLEANING_STAGES


@dataclass
class FunnelCounters:
    """Monotone per-stage counters behind the funnel report."""

    counts: dict[str, int] = field(default_factory=lambda: {s: 0 for s in ALL_STAGES})

    def add(self, stage: str, n: int = 1) -> None:
        if stage not in self.counts:
            raise KeyError(f"unknown funnel stage: {stage!r}")
        self.counts[stage] += n

    def get(self, stage: str) -> int:
        return self.counts[stage]

    def merge(self, other: "FunnelCounters") -> None:
        for stage, value in other.counts.items():
            self.counts[stage] += value

    def items(self) -> list[tuple[str, int]]:
        return [(stage, self.counts[stage]) for stage in ALL_STAGES]

    def as_dict(self) -> dict[str, int]:
        return {stage: self.counts[stage] for stage in ALL_STAGES}


def filter_one_to_one(links: Iterable[AlignmentLink]) -> list[AlignmentLink]:
    """Keep exactly the links pairing one source with one target sentence."""
    return [link for link in links if link.is_one_to_one()]


def consolidate(
    src: SegmentedDocument,
    tgt: SegmentedDocument,
    links: Iterable[AlignmentLink],
    pair_id: str = "",
    counters: FunnelCounters | None = None,
) -> list[ParagraphPair]:
    """Group one-to-one links by paragraph and apply mutual exclusivity.

    A paragraph pair (P, Q) is emitted iff every link touching P lands in
    Q and every link touching Q comes from P.  Sentences of P and Q
    without a link are dropped from the emitted pair.  Candidates come
    out sorted by (src_para, tgt_para).
    """
    groups: dict[tuple[int, int], list[AlignmentLink]] = {}
    src_touch: dict[int, set[int]] = {}
    tgt_touch: dict[int, set[int]] = {}

    for link in links:
        s = link.src_indices[0]
        t = link.tgt_indices[0]
        if s not in src.sent_to_para:
            raise ExtractionError(
                f"pair {pair_id!r}: source sentence index {s} out of range"
            )
        if t not in tgt.sent_to_para:
            raise ExtractionError(
                f"pair {pair_id!r}: target sentence index {t} out of range"
            )
        sp = src.sent_to_para[s]
        tp = tgt.sent_to_para[t]
        groups.setdefault((sp, tp), []).append(link)
        src_touch.setdefault(sp, set()).add(tp)
        tgt_touch.setdefault(tp, set()).add(sp)

    if counters is not None:
        counters.add("pairs_grouped", len(groups))

    candidates: list[ParagraphPair] = []
    for (sp, tp), group in sorted(groups.items()):
        if src_touch[sp] != {tp} or tgt_touch[tp] != {sp}:
            continue
        pairs = tuple(
            SentencePair(
                src_idx=link.src_indices[0],
                tgt_idx=link.tgt_indices[0],
                src_text=src.sentence_text(link.src_indices[0]),
                tgt_text=tgt.sentence_text(link.tgt_indices[0]),
            )
            for link in sorted(group, key=lambda l: (l.src_indices[0], l.tgt_indices[0]))
        )
        candidates.append(
            ParagraphPair(pair_id=pair_id, src_para=sp, tgt_para=tp, sentence_pairs=pairs)
        )

    if counters is not None:
        counters.add("pairs_candidate", len(candidates))
    return candidates


def check_monotonic(pair: ParagraphPair) -> bool:
    """True iff both index sequences are strictly increasing (src-sorted)."""
    pairs = pair.sentence_pairs
    return all(
        a.src_idx < b.src_idx and a.tgt_idx < b.tgt_idx
        for a, b in zip(pairs, pairs[1:])
    )


def _collapse(text: str) -> str:
    return " ".join(text.lower().split())


def dedupe_key(pair: ParagraphPair) -> str:
    """Lowercased, whitespace-collapsed src texts + TAB + tgt texts."""
    return (
        _collapse(" ".join(pair.src_texts)) + "\t" + _collapse(" ".join(pair.tgt_texts))
    )


def dedupe(
    pairs: Iterable[ParagraphPair], seen: set[str] | None = None
) -> Iterator[ParagraphPair]:
    """Drop pairs whose normalization key was already admitted (first wins).

    ``seen`` carries the admission state across document pairs for a
    corpus-wide run; admission order is the input order, so the output is
    deterministic for a deterministic stream.
    """
    if seen is None:
        seen = set()
    for pair in pairs:
        key = dedupe_key(pair)
        if key in seen:
            continue
        seen.add(key)
        yield pair


def drop_singletons(pairs: Iterable[ParagraphPair]) -> list[ParagraphPair]:
    """Keep exactly the pairs with at least two sentence pairs."""
    return [pair for pair in pairs if len(pair.sentence_pairs) >= 2]


def extract_pipeline(
    src: SegmentedDocument,
    tgt: SegmentedDocument,
    links: list[AlignmentLink],
    counters: FunnelCounters | None = None,
    pair_id: str = "",
    seen_keys: set[str] | None = None,
) -> list[ParagraphPair]:
    """Run the extraction stages in order for one document pair.

    ``seen_keys`` is the corpus-wide dedup state; omit it for an isolated
    single-document run.
    """
    if counters is None:
        counters = FunnelCounters()
    counters.add("links_input", len(links))

    one_to_one = filter_one_to_one(links)
    counters.add("links_one_to_one", len(one_to_one))

    candidates = consolidate(src, tgt, one_to_one, pair_id=pair_id, counters=counters)

    monotonic = [pair for pair in candidates if check_monotonic(pair)]
    counters.add("pairs_after_monotonic", len(monotonic))

    deduped = list(dedupe(monotonic, seen=seen_keys))
    counters.add("pairs_after_dedup", len(deduped))

    final = drop_singletons(deduped)
    counters.add("pairs_after_singleton", len(final))
    counters.add(
        "sentence_pairs_surviving", sum(len(p.sentence_pairs) for p in final)
    )
    return final


ORACLE_MAX_SENTENCES = 64


def oracle_extract(
    src: SegmentedDocument,
    tgt: SegmentedDocument,
    links: list[AlignmentLink],
    pair_id: str = "",
) -> list[ParagraphPair]:
    """Reference extraction by exhaustive enumeration over paragraph pairs.

    Implements the rule definitions directly with set scans and no shared
    bookkeeping with extract_pipeline; guarded to small instances.  Output
    is in canonical (src_para, tgt_para) order.
    """
    if src.n_sentences > ORACLE_MAX_SENTENCES or tgt.n_sentences > ORACLE_MAX_SENTENCES:
        raise ValueError(
            f"oracle limited to {ORACLE_MAX_SENTENCES} sentences per side"
        )

    one_to_one = [
        link
        for link in links
        if len(link.src_indices) == 1 and len(link.tgt_indices) == 1
    ]
    for link in one_to_one:
        if link.src_indices[0] not in src.sent_to_para:
            raise ExtractionError(
                f"pair {pair_id!r}: source sentence index {link.src_indices[0]} out of range"
            )
        if link.tgt_indices[0] not in tgt.sent_to_para:
            raise ExtractionError(
                f"pair {pair_id!r}: target sentence index {link.tgt_indices[0]} out of range"
            )

    survivors: list[ParagraphPair] = []
    for p in src.paragraphs:
        p_sents = {idx for idx, _ in p.sentences}
        for q in tgt.paragraphs:
            q_sents = {idx for idx, _ in q.sentences}
            inside = [
                link
                for link in one_to_one
                if link.src_indices[0] in p_sents and link.tgt_indices[0] in q_sents
            ]
            if not inside:
                continue
            # exclusivity, checked against the full link set
            escapes_p = any(
                link.src_indices[0] in p_sents and link.tgt_indices[0] not in q_sents
                for link in one_to_one
            )
            escapes_q = any(
                link.tgt_indices[0] in q_sents and link.src_indices[0] not in p_sents
                for link in one_to_one
            )
            if escapes_p or escapes_q:
                continue
            ordered = sorted(inside, key=lambda l: (l.src_indices[0], l.tgt_indices[0]))
            monotonic = all(
                a.src_indices[0] < b.src_indices[0] and a.tgt_indices[0] < b.tgt_indices[0]
                for i, a in enumerate(ordered)
                for b in ordered[i + 1 :]
            )
            if not monotonic:
                continue
            survivors.append(
                ParagraphPair(
                    pair_id=pair_id,
                    src_para=p.para_index,
                    tgt_para=q.para_index,
                    sentence_pairs=tuple(
                        SentencePair(
                            src_idx=link.src_indices[0],
                            tgt_idx=link.tgt_indices[0],
                            src_text=src.sentence_text(link.src_indices[0]),
                            tgt_text=tgt.sentence_text(link.tgt_indices[0]),
                        )
                        for link in ordered
                    ),
                )
            )

    survivors.sort(key=lambda pair: (pair.src_para, pair.tgt_para))

    # repeated-paragraph rule: first occurrence in canonical order wins
    unique: list[ParagraphPair] = []
    for pair in survivors:
        key = (
            " ".join((" ".join(pair.src_texts)).lower().split())
            + "\t"
            + " ".join((" ".join(pair.tgt_texts)).lower().split())
        )
        duplicate = False
        for earlier in unique:
            earlier_key = (
                " ".join((" ".join(earlier.src_texts)).lower().split())
                + "\t"
                + " ".join((" ".join(earlier.tgt_texts)).lower().split())
            )
            if key == earlier_key:
                duplicate = True
                break
        if not duplicate:
            unique.append(pair)

    return [pair for pair in unique if len(pair.sentence_pairs) >= 2]


def write_pairs(pairs: Iterable[ParagraphPair], path) -> int:
    """Write paragraph pairs as UTF-8 JSONL; returns the number written."""
    n = 0
    with open(path, "w", encoding="utf-8") as handle:
        for pair in pairs:
            handle.write(pair.to_json())
            handle.write("\n")
            n += 1
    return n


def read_pairs(path) -> list[ParagraphPair]:
    """Read a paragraph-pair JSONL file."""
    pairs = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                pairs.append(ParagraphPair.from_json(line))
    return pairs


__all__ = [
    "ExtractionError",
    "SentencePair",
    "ParagraphPair",
    "FunnelCounters",
    "EXTRACTION_STAGES",
    "CLEANING_STAGES",
    "ALL_STAGES",
    "filter_one_to_one",
    "consolidate",
    "check_monotonic",
    "dedupe",
    "dedupe_key",
    "drop_singletons",
    "extract_pipeline",
    "oracle_extract",
    "write_pairs",
    "read_pairs",
]
