"""Character n-gram language identification (rank out-of-place method).

A language profile is the list of the 400 most frequent character n-grams
(n = 1..5) of a training sample, ranked by frequency.  A text is
classified by building its own ranked profile and summing, over its
n-grams, the rank displacement against each language profile (absent
n-grams cost the maximum displacement).  Lowest total distance wins.

Profiles are plain text files, one "<ngram><TAB><rank>" line each, so a
shipped profile can be inspected and regenerated from the shipped sample
texts at any time.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

PROFILE_SIZE = 400
NGRAM_MIN = 1
NGRAM_MAX = 5
MIN_SAMPLE_CHARS = 10_000
UNKNOWN = "unknown"


class InsufficientSampleError(ValueError):
    """Training sample below the minimum size for a stable profile."""


@dataclass(frozen=True)
class LanguageProfile:
    """Ranked n-gram profile for one language; rank 0 = most frequent."""

    lang_code: str
    ranked_ngrams: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.ranked_ngrams)) != len(self.ranked_ngrams):
            raise ValueError(f"profile {self.lang_code!r} has duplicate n-grams")

    def rank_map(self) -> dict[str, int]:
        return {ngram: rank for rank, ngram in enumerate(self.ranked_ngrams)}


def _normalize(text: str) -> str:
    # lowercase, collapse whitespace runs; pad so word boundaries count
    collapsed = " ".join(text.lower().split())
    return f" {collapsed} " if collapsed else ""


def ngram_counts(text: str) -> Counter:
    """Count all character n-grams (n = 1..5) of the normalized text."""
    normalized = _normalize(text)
    counts: Counter = Counter()
    length = len(normalized)
    for n in range(NGRAM_MIN, NGRAM_MAX + 1):
        for i in range(length - n + 1):
            counts[normalized[i : i + n]] += 1
    return counts


def ranked_ngrams(text: str, k: int = PROFILE_SIZE) -> tuple[str, ...]:
    """Top-k n-grams by frequency; ties broken lexicographically."""
    counts = ngram_counts(text)
    ordered = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return tuple(ngram for ngram, _ in ordered[:k])


def build_profile(lang_code: str, sample_text: str) -> LanguageProfile:
    """Build one language profile from at least 10k characters of sample."""
    if len(sample_text) < MIN_SAMPLE_CHARS:
        raise InsufficientSampleError(
            f"{lang_code!r}: sample has {len(sample_text)} chars, "
            f"need >= {MIN_SAMPLE_CHARS}"
        )
    return LanguageProfile(lang_code=lang_code, ranked_ngrams=ranked_ngrams(sample_text))


def langid_train(samples: dict[str, str]) -> list[LanguageProfile]:
    """Build profiles for every language sample, in sorted language order."""
    return [build_profile(code, samples[code]) for code in sorted(samples)]


def out_of_place_distance(text_ranks: tuple[str, ...], profile: LanguageProfile) -> int:
    """Sum of rank displacements of the text profile against a language profile."""
    ranks = profile.rank_map()
    distance = 0
    for rank, ngram in enumerate(text_ranks):
        distance += abs(ranks.get(ngram, PROFILE_SIZE) - rank)
    return distance


def langid_classify(
    text: str,
    profiles: list[LanguageProfile],
    min_chars: int = 20,
) -> tuple[str, float]:
    """Classify a text; returns (lang_code or UNKNOWN, distance margin).

    Texts shorter than ``min_chars`` come back UNKNOWN because n-gram
    statistics on short strings are unreliable.  The margin is the
    distance gap to the runner-up language.
    """
    if len(profiles) < 2:
        raise ValueError("classification requires profiles for >= 2 languages")
    if len(text.strip()) < min_chars:
        return UNKNOWN, 0.0
    text_ranks = ranked_ngrams(text)
    distances = sorted(
        (out_of_place_distance(text_ranks, profile), profile.lang_code)
        for profile in profiles
    )
    best_distance, best_lang = distances[0]
    margin = distances[1][0] - best_distance
    return best_lang, float(margin)


def save_profile(profile: LanguageProfile, path: str | Path) -> None:
    """Write a profile as '<ngram>\\t<rank>' lines."""
    with open(path, "w", encoding="utf-8") as handle:
        for rank, ngram in enumerate(profile.ranked_ngrams):
            handle.write(f"{ngram}\t{rank}\n")


def load_profile(path: str | Path, lang_code: str | None = None) -> LanguageProfile:
    """Read a profile file; the language code defaults to the file stem."""
    path = Path(path)
    code = lang_code or path.stem
    ngrams: list[str] = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                ngram, rank = line.rsplit("\t", 1)
            except ValueError:
                raise ValueError(f"{path}:{line_no}: malformed profile line") from None
            if int(rank) != len(ngrams):
                raise ValueError(f"{path}:{line_no}: ranks out of order")
            ngrams.append(ngram)
    return LanguageProfile(lang_code=code, ranked_ngrams=tuple(ngrams))


def load_packaged_profiles(lang_codes: list[str] | None = None) -> list[LanguageProfile]:
    """Load the profiles shipped with the package (all of them by default)."""
    root = resources.files("parapipe").joinpath("data/profiles")
    profiles = []
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if not entry.name.endswith(".profile"):
            continue
        code = entry.name.removesuffix(".profile")
        if lang_codes is not None and code not in lang_codes:
            continue
        ngrams = []
        for line in entry.read_text(encoding="utf-8").splitlines():
            if line:
                ngrams.append(line.rsplit("\t", 1)[0])
        profiles.append(LanguageProfile(lang_code=code, ranked_ngrams=tuple(ngrams)))
    return profiles
