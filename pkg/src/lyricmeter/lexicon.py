"""Pronunciation lexicon, stress patterns, stopwords, and contraction remnants.

The lexicon file follows the CMU pronouncing dictionary plain-text format:
one entry per line (``WORD  PHONEME PHONEME ...``), vowel phonemes carrying a
trailing stress digit (0 = unstressed, 1 = primary stress, 2 = secondary
stress), comment lines starting with ``;;;`` and alternate pronunciations
keyed ``WORD(n)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from .errors import FormatError, InputOutputError, UsageError, WordNotFoundError

_VARIANT_RE = re.compile(r"^(?P<word>.+)\((?P<n>\d+)\)$")
_ENTRY_RE = re.compile(r"^(?P<word>\S+)\s+(?P<phones>\S.*)$")

# Vowel letters used by the out-of-vocabulary syllable heuristic.  A leading
# "y" acts as a consonant (yellow, you), elsewhere it can carry a syllable.
_VOWELS = set("aeiouy")

DEFAULT_RETAINED_PRONOUNS = frozenset(
    {"i", "we", "you", "he", "she", "they", "me", "us", "them"}
)


def _data_text(name: str) -> str:
    return resources.files("lyricmeter.data").joinpath(name).read_text("utf-8")


@dataclass(frozen=True)
class PronunciationLexicon:
    """Immutable word -> phoneme mapping with first-variant preference."""

    entries: dict
    source_path: str

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word.upper() in self.entries

    def phonemes(self, word: str) -> list[str]:
        """Phoneme tokens of the first listed pronunciation of ``word``."""
        try:
            return self.entries[word.upper()][0]
        except KeyError:
            raise WordNotFoundError(f"word not in lexicon: {word!r}") from None


def load_lexicon(path: str | None = None) -> PronunciationLexicon:
    """Parse a CMU-format dictionary file.

    ``path=None`` loads the small lexicon bundled with the package.
    Raises :class:`InputOutputError` for unreadable files and
    :class:`FormatError` (with line number) for malformed lines.
    """
    if path is None:
        text = _data_text("lexicon.dict")
        source = "<bundled>"
    else:
        try:
            with open(path, encoding="utf-8", errors="replace") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputOutputError(f"cannot read lexicon file: {exc}") from exc
        source = str(path)

    entries: dict[str, list[list[str]]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith(";;;"):
            continue
        m = _ENTRY_RE.match(line)
        if m is None:
            raise FormatError("malformed dictionary entry", line_number=lineno)
        word = m.group("word").upper()
        phones = m.group("phones").split()
        variant = _VARIANT_RE.match(word)
        if variant is not None:
            word = variant.group("word")
            if word not in entries:
                raise FormatError(
                    f"variant entry before base entry: {word}", line_number=lineno
                )
            entries[word].append(phones)
        elif word not in entries:
            entries[word] = [phones]
    return PronunciationLexicon(entries=entries, source_path=source)


def stress_digits(phonemes: list[str]) -> list[int]:
    """Stress digits of the vowel phonemes, in order."""
    return [int(p[-1]) for p in phonemes if p[-1].isdigit()]


def stress_pattern(
    lexicon: PronunciationLexicon, word: str, fallback: bool = True
) -> list[int]:
    """Per-syllable stress marks for ``word``.

    Uses the lexicon when possible; for out-of-vocabulary words the heuristic
    :func:`fallback_syllabify` is used unless ``fallback`` is off, in which
    case :class:`WordNotFoundError` is raised.
    """
    if not word:
        raise UsageError("stress_pattern: empty word")
    if word in lexicon:
        return stress_digits(lexicon.phonemes(word))
    if fallback:
        return fallback_syllabify(word)
    raise WordNotFoundError(f"word not in lexicon: {word!r}")


def fallback_syllabify(word: str) -> list[int]:
    """Heuristic stress pattern for an out-of-vocabulary word.

    Syllable count = number of maximal vowel-letter groups (at least one);
    the first syllable is stressed, the rest unstressed.
    """
    if not word:
        raise UsageError("fallback_syllabify: empty word")
    letters = word.lower()
    if letters.startswith("y"):
        letters = "#" + letters[1:]
    groups = len(re.findall("[aeiouy]+", letters))
    n = max(groups, 1)
    return [1] + [0] * (n - 1)


@dataclass(frozen=True)
class StopwordPolicy:
    """Customized stopword list: base list minus force-retained pronouns."""

    base_list: frozenset = field(default_factory=frozenset)
    retained_pronouns: frozenset = DEFAULT_RETAINED_PRONOUNS

    @property
    def effective(self) -> frozenset:
        return self.base_list - self.retained_pronouns


def is_stopword(word: str, policy: StopwordPolicy) -> bool:
    if not word:
        raise UsageError("is_stopword: empty word")
    return word.lower() in policy.effective


def load_wordlist(path: str) -> frozenset:
    """Read a one-word-per-line UTF-8 list; '#' lines are comments."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputOutputError(f"cannot read word list: {exc}") from exc
    return frozenset(
        w.strip().lower() for w in lines if w.strip() and not w.startswith("#")
    )


def default_stopword_policy() -> StopwordPolicy:
    base = frozenset(
        w for w in _data_text("stopwords.txt").splitlines()
        if w.strip() and not w.startswith("#")
    )
    return StopwordPolicy(base_list=base)


@dataclass(frozen=True)
class RemnantList:
    """Contraction fragments to drop after apostrophe splitting."""

    remnants: frozenset

    def __post_init__(self):
        for r in self.remnants:
            if not r or "'" in r or r != r.lower():
                raise UsageError(f"invalid contraction remnant: {r!r}")


def default_remnants() -> RemnantList:
    words = frozenset(
        w.strip() for w in _data_text("remnants.txt").splitlines()
        if w.strip() and not w.startswith("#")
    )
    return RemnantList(remnants=words)


def strip_contraction_remnants(tokens: list[str], remnants: RemnantList) -> list[str]:
    """Drop tokens that are known contraction tails, preserving order."""
    return [t for t in tokens if t.lower() not in remnants.remnants]
