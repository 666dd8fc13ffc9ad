"""Line-delimited song corpus: one JSON object per line.

Each record carries ``id``, ``title``, ``lyrics`` (newline-separated lines)
and ``time_signature`` ("3/4" or "4/4").  Ids must be unique within a file.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass

from .errors import FormatError, InputOutputError
from .features import LABELS


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    title: str
    lyrics: str
    time_signature: str


REQUIRED_FIELDS = ("id", "title", "lyrics", "time_signature")


def parse_corpus_lines(lines) -> tuple[list[CorpusRecord], list[tuple[int, str]]]:
    """Parse records, collecting (line number, reason) for rejected lines."""
    records: list[CorpusRecord] = []
    problems: list[tuple[int, str]] = []
    seen_ids: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            problems.append((lineno, f"invalid JSON: {exc.msg}"))
            continue
        if not isinstance(obj, dict):
            problems.append((lineno, "record must be a JSON object"))
            continue
        missing = [f for f in REQUIRED_FIELDS if f not in obj]
        if missing:
            problems.append((lineno, f"missing fields: {', '.join(missing)}"))
            continue
        sig = obj["time_signature"]
        if sig not in LABELS:
            problems.append((lineno, f"unknown time signature: {sig!r}"))
            continue
        lyrics = obj["lyrics"]
        if not isinstance(lyrics, str) or not lyrics.strip():
            problems.append((lineno, "lyrics must be nonempty text"))
            continue
        song_id = str(obj["id"])
        if song_id in seen_ids:
            problems.append((lineno, f"duplicate id: {song_id}"))
            continue
        seen_ids.add(song_id)
        records.append(
            CorpusRecord(
                id=song_id,
                title=str(obj["title"]),
                lyrics=lyrics,
                time_signature=sig,
            )
        )
    return records, problems


def read_corpus(path: str, strict: bool = True) -> list[CorpusRecord]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputOutputError(f"cannot read corpus: {exc}") from exc
    records, problems = parse_corpus_lines(lines)
    if strict and problems:
        lineno, reason = problems[0]
        raise FormatError(reason, line_number=lineno)
    return records


def write_corpus(records: list[CorpusRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(
                json.dumps(
                    {
                        "id": r.id,
                        "title": r.title,
                        "lyrics": r.lyrics,
                        "time_signature": r.time_signature,
                    },
                    sort_keys=True,
                )
            )
            fh.write("\n")


def class_counts(records: list[CorpusRecord]) -> dict:
    counts = Counter(r.time_signature for r in records)
    return {label: counts.get(label, 0) for label in LABELS}
