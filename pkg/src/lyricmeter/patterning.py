"""Phrase splitting and stress-mark vector patterning for one song's lyrics.

The pipeline converts lyrics text into one stress-mark vector per phrase:
split into phrases, build a keyword vector (stopwords contribute zeros of
their syllable length, keywords their dictionary stress marks), then optimize
the marks (secondary-stress remap and suppression of a stressed syllable that
directly follows another stressed syllable).  Duplicate phrase vectors within
a song are tracked separately because repetition is itself a signal.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

from . import lexicon as lex
from .errors import UsageError
from .lexicon import (
    PronunciationLexicon,
    RemnantList,
    StopwordPolicy,
    strip_contraction_remnants,
)

PHRASE_DELIMITERS = ".,;:!?\n"
_SEGMENT_RE = re.compile(r"[^" + re.escape(PHRASE_DELIMITERS) + r"]+")
# surrounding punctuation is stripped from tokens; internal ' and - survive
_TOKEN_TRIM_RE = re.compile(r"^[^\w'-]+|[^\w'-]+$|^['-]+|['-]+$")

STRESS_BEAT_PATTERNS: dict[str, tuple[int, ...]] = {
    "10": (1, 0),
    "100": (1, 0, 0),
    "1000": (1, 0, 0, 0),
}


@dataclass(frozen=True)
class StressBeatPattern:
    name: str
    marks: tuple[int, ...]

    @classmethod
    def named(cls, name: str) -> "StressBeatPattern":
        try:
            return cls(name=name, marks=STRESS_BEAT_PATTERNS[name])
        except KeyError:
            raise UsageError(f"unknown stress beat pattern: {name!r}") from None


@dataclass(frozen=True)
class LyricsText:
    raw: str
    song_id: str = ""


@dataclass(frozen=True)
class Phrase:
    tokens: tuple[str, ...]
    source_span: tuple[int, int]


@dataclass(frozen=True)
class PhraseVector:
    """Stress marks across all syllables of one phrase, in word order.

    ``word_lengths`` records the per-word syllable counts so optimization can
    honor word boundaries; it is ``None`` for bare vectors.
    """

    marks: tuple[int, ...]
    word_lengths: tuple[int, ...] | None = None

    def __len__(self) -> int:
        return len(self.marks)


@dataclass(frozen=True)
class PatterningConfig:
    """Tunable knobs of the patterning pipeline.

    ``secondary_stress``: what a mark of 2 becomes before optimization
    ("zero", "one", or "keep").  ``suppression_scope``: whether the
    stressed-after-stressed suppression applies within words only ("word",
    the default, which matches how sung phrases keep back-to-back stressed
    words) or across the whole vector ("vector").
    """

    fallback: bool = True
    secondary_stress: str = "zero"
    suppression_scope: str = "word"

    def __post_init__(self):
        if self.secondary_stress not in ("zero", "one", "keep"):
            raise UsageError(f"bad secondary_stress: {self.secondary_stress!r}")
        if self.suppression_scope not in ("word", "vector"):
            raise UsageError(f"bad suppression_scope: {self.suppression_scope!r}")


@dataclass(frozen=True)
class SongPatternSet:
    """All phrase vectors of one song plus duplicate-vector bookkeeping."""

    vectors: tuple[PhraseVector, ...]
    duplicate_groups: dict
    raw_vectors: tuple[PhraseVector, ...] = ()
    phrases: tuple[Phrase, ...] = ()


def split_phrases(lyrics: LyricsText) -> list[Phrase]:
    """Split lyrics on newlines and sentence punctuation into token lists."""
    phrases = []
    for m in _SEGMENT_RE.finditer(lyrics.raw):
        tokens = []
        for raw_token in m.group(0).split():
            token = _TOKEN_TRIM_RE.sub("", raw_token).lower()
            while token and (token[0] in "'-" or token[-1] in "'-"):
                token = token.strip("'-")
            if token:
                tokens.append(token)
        if tokens:
            phrases.append(Phrase(tokens=tuple(tokens), source_span=m.span()))
    return phrases


def _resolve_word_marks(
    word: str,
    lexicon: PronunciationLexicon,
    remnants: RemnantList,
    fallback: bool,
) -> list[tuple[str, list[int]]]:
    """Map one token to (sub-word, stress marks) pairs.

    Whole-token lookup is tried first so dictionary contractions like HEAD'S
    stay intact; only on a miss is the token split at apostrophes/hyphens and
    its contraction remnants dropped.
    """
    if word in lexicon:
        return [(word, lex.stress_digits(lexicon.phonemes(word)))]
    parts = [p for p in re.split(r"[-']", word) if p]
    if len(parts) > 1:
        parts = strip_contraction_remnants(parts, remnants)
        out = []
        for part in parts:
            out.extend(_resolve_word_marks(part, lexicon, remnants, fallback))
        return out
    return [(word, lex.stress_pattern(lexicon, word, fallback=fallback))]


def keyword_vector(
    phrase: Phrase,
    lexicon: PronunciationLexicon,
    policy: StopwordPolicy,
    remnants: RemnantList | None = None,
    fallback: bool = True,
) -> PhraseVector:
    """Concatenated per-word stress marks; stopwords contribute zeros."""
    if not phrase.tokens:
        raise UsageError("keyword_vector: empty phrase")
    remnants = remnants if remnants is not None else lex.default_remnants()
    marks: list[int] = []
    word_lengths: list[int] = []
    for token in phrase.tokens:
        for sub_word, sub_marks in _resolve_word_marks(
            token, lexicon, remnants, fallback
        ):
            if not sub_marks:
                continue
            if lex.is_stopword(sub_word, policy):
                sub_marks = [0] * len(sub_marks)
            marks.extend(sub_marks)
            word_lengths.append(len(sub_marks))
    return PhraseVector(marks=tuple(marks), word_lengths=tuple(word_lengths))


def optimize_vector(
    v: PhraseVector, config: PatterningConfig | None = None
) -> PhraseVector:
    """Remap secondary stress, then suppress a 1 whose predecessor is a 1.

    The suppression pass is left-to-right over already-processed marks.  With
    ``suppression_scope="word"`` (and word boundaries available) a word-initial
    stressed syllable is never suppressed by the previous word.
    """
    config = config or PatterningConfig()
    remap = {"zero": 0, "one": 1, "keep": 2}[config.secondary_stress]
    marks = [remap if m == 2 else m for m in v.marks]

    word_starts: set[int] = set()
    if config.suppression_scope == "word" and v.word_lengths is not None:
        pos = 0
        for length in v.word_lengths:
            word_starts.add(pos)
            pos += length

    for i in range(1, len(marks)):
        if i in word_starts:
            continue
        if marks[i] == 1 and marks[i - 1] == 1:
            marks[i] = 0
    return PhraseVector(marks=tuple(marks), word_lengths=v.word_lengths)


def count_pattern(v: PhraseVector, pattern: StressBeatPattern) -> int:
    """Non-overlapping occurrences of the pattern, greedy left-to-right."""
    marks, target = v.marks, pattern.marks
    n, m = len(marks), len(target)
    count = i = 0
    while i + m <= n:
        if marks[i : i + m] == target:
            count += 1
            i += m
        else:
            i += 1
    return count


def find_repetitive_vectors(vectors: list[PhraseVector]) -> dict:
    """Exact-equality duplicate groups of size >= 2, keyed by mark tuple."""
    counts = Counter(v.marks for v in vectors)
    return {marks: n for marks, n in counts.items() if n >= 2}


def lyrics_patterning(
    lyrics: LyricsText,
    lexicon: PronunciationLexicon,
    policy: StopwordPolicy,
    remnants: RemnantList | None = None,
    config: PatterningConfig | None = None,
) -> SongPatternSet:
    """Full per-song pipeline: phrases -> keyword vectors -> optimized vectors."""
    config = config or PatterningConfig()
    remnants = remnants if remnants is not None else lex.default_remnants()
    phrases = split_phrases(lyrics)
    raw = [
        keyword_vector(p, lexicon, policy, remnants, fallback=config.fallback)
        for p in phrases
    ]
    vectors = [optimize_vector(v, config) for v in raw]
    return SongPatternSet(
        vectors=tuple(vectors),
        duplicate_groups=find_repetitive_vectors(vectors),
        raw_vectors=tuple(raw),
        phrases=tuple(phrases),
    )


def format_diagnostic(pattern_set: SongPatternSet) -> str:
    """Two lines per phrase, tokens tab-separated above their marks."""
    lines = []
    for phrase, vector in zip(pattern_set.phrases, pattern_set.vectors):
        lines.append("\t".join(phrase.tokens))
        lines.append("\t".join(str(m) for m in vector.marks))
    return "\n".join(lines)
