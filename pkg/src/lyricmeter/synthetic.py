"""Seeded synthetic lyrics corpus for benchmarks and end-to-end tests.

Songs are assembled from word pools with known dictionary stress patterns so
the two classes carry the intended beat tendencies: 3/4 songs lean on words
whose stress runs 1-0-0 (waltz-like), 4/4 songs on 1-0 and 1-0-0-0 words.
Every song repeats a chorus line so repetition features are exercised.  All
words are present in the bundled lexicon.
"""

from __future__ import annotations

import numpy as np

from .corpus import CorpusRecord
from .features import FOUR_FOUR, THREE_FOUR

WORDS_ONE = (
    "bird", "sun", "moon", "heart", "dream", "light", "rain", "star",
    "sky", "home", "road", "wind", "sea", "gold", "soul", "time", "way",
    "night", "love",
)
WORDS_TEN = (
    "flying", "going", "singing", "dancing", "morning", "river", "golden",
    "shining", "music", "summer", "falling", "burning", "evening", "winter",
    "mountain", "ocean", "city", "thunder", "silver",
)
WORDS_HUNDRED = (
    "beautiful", "melody", "wonderful", "harmony", "memory", "symphony",
    "wandering", "glorious", "dangerous", "family", "heavenly", "lullaby",
    "tenderly",
)
WORDS_THOUSAND = (
    "everybody", "comfortable", "ordinary", "melancholy", "wonderfully",
)
WORDS_GLUE = ("the", "a", "and", "my", "to", "like", "of", "in", "on", "with")

_POOLS = {
    "one": WORDS_ONE,
    "ten": WORDS_TEN,
    "hundred": WORDS_HUNDRED,
    "thousand": WORDS_THOUSAND,
    "glue": WORDS_GLUE,
}

# word-pool mixing weights per style, in pool order (one/ten/hundred/thousand/glue)
# 3/4 songs are either densely 1-0-0 flavored or sparse ballads; 4/4 songs
# lean on 1-0 or 1-0-0-0 words.  The submodes keep single features from
# separating the classes on their own.
_STYLES = {
    "waltz_dense": (0.06, 0.06, 0.62, 0.03, 0.23),
    "waltz_sparse": (0.42, 0.08, 0.12, 0.02, 0.36),
    "duple": (0.10, 0.58, 0.10, 0.05, 0.17),
    "quadruple": (0.08, 0.16, 0.12, 0.44, 0.20),
}
_POOL_ORDER = ("one", "ten", "hundred", "thousand", "glue")


def _make_line(rng: np.random.Generator, weights: np.ndarray) -> str:
    n_words = int(rng.integers(2, 6))
    words = []
    for _ in range(n_words):
        pool = _POOL_ORDER[int(rng.choice(len(_POOL_ORDER), p=weights))]
        choices = _POOLS[pool]
        words.append(choices[int(rng.integers(len(choices)))])
    return " ".join(words)


def _make_song(rng: np.random.Generator, style: str, noise: float) -> str:
    base = np.array(_STYLES[style])
    # per-song jitter of the mixing weights keeps the classes overlapping
    jitter = rng.uniform(-noise, noise, size=len(base))
    weights = np.clip(base + jitter, 0.01, None)
    weights = weights / weights.sum()

    n_phrases = int(rng.integers(6, 40))
    chorus = _make_line(rng, weights)
    n_chorus = int(rng.integers(2, 5))
    lines = [_make_line(rng, weights) for _ in range(max(n_phrases - n_chorus, 1))]
    positions = sorted(int(rng.integers(len(lines) + 1)) for _ in range(n_chorus))
    for offset, pos in enumerate(positions):
        lines.insert(pos + offset, chorus)
    return "\n".join(lines)


def generate_benchmark_corpus(
    n_songs: int = 1000,
    minority_fraction: float = 0.10,
    seed: int = 0,
    noise: float = 0.10,
) -> list[CorpusRecord]:
    """Deterministic corpus with 3/4 as the minority class."""
    rng = np.random.default_rng(seed)
    n_minority = int(round(n_songs * minority_fraction))
    records = []
    for i in range(n_songs):
        if i < n_minority:
            label = THREE_FOUR
            style = "waltz_dense" if rng.random() < 0.65 else "waltz_sparse"
        else:
            label = FOUR_FOUR
            style = "duple" if rng.random() < 0.5 else "quadruple"
        lyrics = _make_song(rng, style, noise)
        records.append(
            CorpusRecord(
                id=f"song_{i:04d}",
                title=f"Synthetic #{i}",
                lyrics=lyrics,
                time_signature=label,
            )
        )
    return records
