"""Parsing, validation and period filtering of newline-delimited dumps.

Posts and comments arrive one JSON object per line.  Parsing is stateless;
filtering needs the set of kept post ids before any comment can be judged,
so callers feed every post to a :class:`CorpusFilter` first.
"""
from __future__ import annotations

import bz2
import gzip
import io
import json
import lzma
import math
from collections import Counter
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field, fields
from pathlib import Path

DELETED = "[deleted]"
REMOVED = "[removed]"

# Period I as used for the 2008 dumps: 2008-01-01 .. 2009-01-01 (exclusive).
PERIOD_2008 = (1199145600, 1230768000)


class ParseError(ValueError):
    """A dump line that cannot become a record.  ``reason`` is a short tag."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason


def normalize_id(raw: str, strip_prefix: bool = True) -> str:
    """Drop a ``t1_``/``t3_`` style type prefix so names and link ids compare."""
    if strip_prefix and len(raw) > 3 and raw[0] == "t" and raw[1].isdigit() and raw[2] == "_":
        return raw[3:]
    return raw


@dataclass(frozen=True, slots=True)
class Period:
    start: float
    end: float

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError(f"period start {self.start} must precede end {self.end}")

    def __contains__(self, t: float) -> bool:
        return self.start <= t < self.end

    @classmethod
    def unbounded(cls) -> Period:
        return cls(0, math.inf)


@dataclass(frozen=True, slots=True)
class PostRecord:
    id: str
    author: str
    created_utc: float
    declared_num_comments: int = 0
    score: int | None = None
    body_or_title: str = ""

    @property
    def deleted_author(self) -> bool:
        return self.author == DELETED


@dataclass(frozen=True, slots=True)
class CommentRecord:
    id: str
    author: str
    created_utc: float
    link_id: str
    parent_id: str
    body: str = ""
    score: int | None = None

    @property
    def deleted_author(self) -> bool:
        return self.author == DELETED

    @property
    def removed(self) -> bool:
        return self.body == REMOVED


def same_author(a: str, b: str) -> bool:
    """Identity comparison in which the deleted sentinel never matches."""
    return a == b and a != DELETED


# ---------------------------------------------------------------------------
# line parsing

def _load_object(line: str | bytes) -> dict:
    try:
        obj = json.loads(line)
    except UnicodeDecodeError as exc:
        raise ParseError("bad-encoding", str(exc)) from None
    except ValueError as exc:
        raise ParseError("malformed-json", str(exc)) from None
    if not isinstance(obj, dict):
        raise ParseError("not-an-object")
    return obj


def _timestamp(obj: dict) -> float:
    raw = obj.get("created_utc")
    if raw is None:
        raise ParseError("missing-field", "created_utc")
    if isinstance(raw, bool):
        raise ParseError("bad-timestamp", repr(raw))
    try:
        t = float(raw)
    except (TypeError, ValueError):
        raise ParseError("bad-timestamp", repr(raw)) from None
    if not math.isfinite(t) or t <= 0:
        raise ParseError("bad-timestamp", repr(raw))
    return int(t) if t.is_integer() else t


def _optional_int(value) -> int | None:
    if value is None or isinstance(value, bool):
        return None
    try:
        f = float(value)
    except (TypeError, ValueError):
        return None
    return int(f) if math.isfinite(f) else None


def _text(value) -> str:
    return value if isinstance(value, str) else ""


def _record_id(obj: dict, prefix: str, strip_prefix: bool) -> str:
    # Older submission dumps carry only the bare "id", not the "name" fullname.
    name = obj.get("name")
    if not isinstance(name, str) or not name:
        bare = obj.get("id")
        if not isinstance(bare, str) or not bare:
            raise ParseError("missing-field", "name")
        name = prefix + bare
    return normalize_id(name, strip_prefix)


def _author(obj: dict) -> str:
    author = obj.get("author")
    return author if isinstance(author, str) and author else DELETED


def parse_post_line(line: str | bytes, strip_prefix: bool = True) -> PostRecord:
    obj = _load_object(line)
    post_id = _record_id(obj, "t3_", strip_prefix)
    created = _timestamp(obj)
    declared = _optional_int(obj.get("num_comments"))
    if declared is not None and declared < 0:
        raise ParseError("bad-field", f"num_comments={declared}")
    title = _text(obj.get("title")) or _text(obj.get("selftext")) or _text(obj.get("body"))
    return PostRecord(
        id=post_id,
        author=_author(obj),
        created_utc=created,
        declared_num_comments=declared or 0,
        score=_optional_int(obj.get("score")),
        body_or_title=title,
    )


def parse_comment_line(line: str | bytes, strip_prefix: bool = True) -> CommentRecord:
    obj = _load_object(line)
    comment_id = _record_id(obj, "t1_", strip_prefix)
    created = _timestamp(obj)
    link_id = obj.get("link_id")
    parent_id = obj.get("parent_id")
    if not isinstance(link_id, str) or not link_id:
        raise ParseError("missing-field", "link_id")
    if not isinstance(parent_id, str) or not parent_id:
        raise ParseError("missing-field", "parent_id")
    parent_id = normalize_id(parent_id, strip_prefix)
    if parent_id == comment_id:
        raise ParseError("self-parent", comment_id)
    return CommentRecord(
        id=comment_id,
        author=_author(obj),
        created_utc=created,
        link_id=normalize_id(link_id, strip_prefix),
        parent_id=parent_id,
        body=_text(obj.get("body")),
        score=_optional_int(obj.get("score")),
    )


# ---------------------------------------------------------------------------
# statistics

@dataclass
class IngestStats:
    """Mergeable ingest counters.  Every field is additive except the id set, which unions."""

    post_lines: int = 0
    comment_lines: int = 0
    malformed_post_lines: int = 0
    malformed_comment_lines: int = 0
    posts_kept: int = 0
    posts_dropped_out_of_period: int = 0
    duplicate_post_lines: int = 0
    comments_kept: int = 0
    comments_dropped_out_of_period: int = 0
    comments_dropped_missing_post: int = 0
    posts_with_deleted_author: int = 0
    comments_with_deleted_author: int = 0
    removed_comments: int = 0
    disconnected_post_ids: set = field(default_factory=set)
    malformed_reasons: Counter = field(default_factory=Counter)

    @property
    def total_lines(self) -> int:
        return self.post_lines + self.comment_lines

    @property
    def malformed_lines(self) -> int:
        return self.malformed_post_lines + self.malformed_comment_lines

    @property
    def disconnected_posts(self) -> int:
        return len(self.disconnected_post_ids)

    def merge(self, other: IngestStats) -> IngestStats:
        out = IngestStats()
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            setattr(out, f.name, a | b if isinstance(a, set) else a + b)
        return out

    def as_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["disconnected_post_ids"] = sorted(self.disconnected_post_ids)
        d["malformed_reasons"] = dict(sorted(self.malformed_reasons.items()))
        return d


# ---------------------------------------------------------------------------
# file reading

def open_dump(path: str | Path) -> io.BufferedIOBase:
    """Open a dump for binary line iteration; compression is chosen by extension."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".gz":
        return gzip.open(path, "rb")
    if suffix == ".bz2":
        return bz2.open(path, "rb")
    if suffix == ".xz":
        return lzma.open(path, "rb")
    if suffix in (".zst", ".zstd"):
        import zstandard

        raw = open(path, "rb")
        # Pushshift archives are written with a 2 GiB window.
        reader = zstandard.ZstdDecompressor(max_window_size=2**31).stream_reader(raw, closefd=True)
        return io.BufferedReader(reader)
    return open(path, "rb")


def iter_lines(paths: Iterable[str | Path]) -> Iterator[bytes]:
    for path in paths:
        with open_dump(path) as fh:
            for line in fh:
                if line.strip():
                    yield line


def read_posts(paths, stats: IngestStats, strip_prefix: bool = True) -> Iterator[PostRecord]:
    for line in iter_lines(paths):
        stats.post_lines += 1
        try:
            yield parse_post_line(line, strip_prefix)
        except ParseError as exc:
            stats.malformed_post_lines += 1
            stats.malformed_reasons[exc.reason] += 1


def read_comments(paths, stats: IngestStats, strip_prefix: bool = True) -> Iterator[CommentRecord]:
    for line in iter_lines(paths):
        stats.comment_lines += 1
        try:
            yield parse_comment_line(line, strip_prefix)
        except ParseError as exc:
            stats.malformed_comment_lines += 1
            stats.malformed_reasons[exc.reason] += 1


# ---------------------------------------------------------------------------
# filtering

class CorpusFilter:
    """Two-pass period filter.

    Feed every post through :meth:`add_post` before the first call to
    :meth:`add_comment`.  A comment survives when it falls inside the period
    and its post was kept.  Comments on posts that exist but fall outside the
    period are counted as out-of-period; comments whose post never appears are
    counted as missing and their link ids recorded as disconnected posts.
    """

    def __init__(self, period: Period, stats: IngestStats | None = None):
        self.period = period
        self.stats = stats if stats is not None else IngestStats()
        self.kept: dict[str, PostRecord] = {}
        self._outside: set[str] = set()

    def add_post(self, post: PostRecord) -> bool:
        if post.id in self.kept or post.id in self._outside:
            self.stats.duplicate_post_lines += 1
            return False
        if post.created_utc not in self.period:
            self._outside.add(post.id)
            self.stats.posts_dropped_out_of_period += 1
            return False
        self.kept[post.id] = post
        self.stats.posts_kept += 1
        if post.deleted_author:
            self.stats.posts_with_deleted_author += 1
        return True

    def add_comment(self, comment: CommentRecord) -> PostRecord | None:
        """Return the owning post if the comment is kept, else ``None``."""
        stats = self.stats
        if comment.created_utc not in self.period:
            stats.comments_dropped_out_of_period += 1
            return None
        post = self.kept.get(comment.link_id)
        if post is None:
            if comment.link_id in self._outside:
                stats.comments_dropped_out_of_period += 1
            else:
                stats.comments_dropped_missing_post += 1
                stats.disconnected_post_ids.add(comment.link_id)
            return None
        stats.comments_kept += 1
        if comment.deleted_author:
            stats.comments_with_deleted_author += 1
        if comment.removed:
            stats.removed_comments += 1
        return post


def filter_corpus(
    posts: Iterable[PostRecord],
    comments: Iterable[CommentRecord],
    period: Period,
    stats: IngestStats | None = None,
) -> tuple[list[PostRecord], list[CommentRecord], IngestStats]:
    flt = CorpusFilter(period, stats)
    kept_posts = [p for p in posts if flt.add_post(p)]
    kept_comments = [c for c in comments if flt.add_comment(c) is not None]
    return kept_posts, kept_comments, flt.stats
