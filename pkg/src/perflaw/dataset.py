"""User interaction sequences and corpus-level statistics.

A corpus is a list of :class:`InteractionSequence`, one per user, with item
order taken as chronological. Two on-disk formats are supported:

* CSV with header ``user_id,items[,ratings]`` where ``items`` (and the
  optional ``ratings``) are space-separated integer lists;
* JSONL with one object per line: ``{"user_id": ..., "items": [...],
  "ratings": [...]}`` (``ratings`` optional).
"""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .errors import DataFormatError, DataIOError, ValidationError

__all__ = [
    "InteractionSequence",
    "DatasetStats",
    "load_sequences",
    "compute_stats",
    "truncate",
    "sequence_distribution_entropy",
]


@dataclass(frozen=True)
class InteractionSequence:
    """One user's ordered interaction history.

    Items are positive integer ids treated as opaque symbols. When ratings
    are present they align positionally with the items.
    """

    user_id: str
    items: tuple[int, ...]
    ratings: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if self.ratings is not None:
            object.__setattr__(self, "ratings", tuple(self.ratings))
        if not self.items:
            raise ValidationError(f"user {self.user_id!r}: empty item sequence")
        for it in self.items:
            if it <= 0:
                raise ValidationError(
                    f"user {self.user_id!r}: non-positive item id {it}"
                )
        if self.ratings is not None and len(self.ratings) != len(self.items):
            raise ValidationError(
                f"user {self.user_id!r}: {len(self.ratings)} ratings for "
                f"{len(self.items)} items"
            )

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class DatasetStats:
    """Corpus-level counts: users, length extremes, tokens, vocabulary."""

    num_users: int
    s_max: int
    s_mean: float
    tokens: int
    vocab: int

    def to_dict(self) -> dict:
        return {
            "num_users": self.num_users,
            "s_max": self.s_max,
            "s_mean": self.s_mean,
            "tokens": self.tokens,
            "vocab": self.vocab,
        }


def _parse_int_list(field: str, what: str, line_no: int) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in field.split())
    except ValueError:
        raise DataFormatError(f"{what} must be space-separated integers", line_no)


def _load_csv(path: Path) -> list[InteractionSequence]:
    seqs = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: no sequences (empty file)")
        header = [h.strip().lower() for h in header]
        if header[:2] != ["user_id", "items"]:
            raise DataFormatError(
                "expected header 'user_id,items[,ratings]'", line_number=1
            )
        has_ratings = len(header) > 2 and header[2] == "ratings"
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2:
                raise DataFormatError("expected at least 2 columns", line_no)
            items = _parse_int_list(row[1], "items", line_no)
            ratings = None
            if has_ratings and len(row) > 2 and row[2].strip():
                ratings = _parse_int_list(row[2], "ratings", line_no)
            try:
                seqs.append(InteractionSequence(row[0], items, ratings))
            except ValidationError as exc:
                raise DataFormatError(str(exc), line_no)
    return seqs


def _load_jsonl(path: Path) -> list[InteractionSequence]:
    seqs = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"invalid JSON ({exc.msg})", line_no)
            if not isinstance(obj, dict) or "user_id" not in obj or "items" not in obj:
                raise DataFormatError("object must have user_id and items", line_no)
            try:
                seqs.append(
                    InteractionSequence(
                        str(obj["user_id"]),
                        tuple(obj["items"]),
                        tuple(obj["ratings"]) if obj.get("ratings") else None,
                    )
                )
            except (TypeError, ValidationError) as exc:
                raise DataFormatError(str(exc), line_no)
    return seqs


def load_sequences(path, format: str = "csv") -> list[InteractionSequence]:
    """Load one InteractionSequence per user from ``path``.

    ``format`` is ``"csv"`` or ``"jsonl"``. Item order is preserved exactly
    as given in the file. Raises :class:`DataIOError` for a missing file,
    :class:`DataFormatError` (with line number) for malformed rows, and
    :class:`ValidationError` when the file holds no sequences.
    """
    path = Path(path)
    if not path.is_file():
        raise DataIOError(f"no such file: {path}")
    if format == "csv":
        seqs = _load_csv(path)
    elif format == "jsonl":
        seqs = _load_jsonl(path)
    else:
        raise ValidationError(f"unknown format {format!r} (expected csv or jsonl)")
    if not seqs:
        raise ValidationError(f"{path}: no sequences")
    return seqs


def compute_stats(seqs: list[InteractionSequence]) -> DatasetStats:
    """Compute user count, length extremes, token total, and vocabulary size."""
    if not seqs:
        raise ValidationError("no sequences")
    lengths = [len(s) for s in seqs]
    vocab = set()
    for s in seqs:
        vocab.update(s.items)
    return DatasetStats(
        num_users=len(seqs),
        s_max=max(lengths),
        s_mean=sum(lengths) / len(lengths),
        tokens=sum(lengths),
        vocab=len(vocab),
    )


def truncate(seqs: list[InteractionSequence], s_max: int) -> list[InteractionSequence]:
    """Cap every sequence at ``s_max`` items, keeping the most recent suffix."""
    if s_max < 1:
        raise ValidationError(f"s_max must be >= 1, got {s_max}")
    out = []
    for s in seqs:
        if len(s) <= s_max:
            out.append(s)
        else:
            ratings = s.ratings[-s_max:] if s.ratings is not None else None
            out.append(InteractionSequence(s.user_id, s.items[-s_max:], ratings))
    return out


def sequence_distribution_entropy(seqs: list[InteractionSequence]) -> float:
    """Entropy (nats) of the empirical distribution over whole item sequences.

    Each distinct item tuple is one outcome with probability
    multiplicity / num_users. Ranges from 0 (all users identical) to
    ln(num_users) (all users distinct).
    """
    if not seqs:
        raise ValidationError("no sequences")
    counts = Counter(s.items for s in seqs)
    n = len(seqs)
    return -sum(c / n * math.log(c / n) for c in counts.values())
