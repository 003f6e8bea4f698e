"""Per-author activity, interaction scores and the author interaction graph.

By default an interaction edge runs from a commenter to the author of the
post they commented on; :func:`reply_edges` gives the reply-to-comment
alternative.  Self-loops and the deleted sentinel never form edges.
"""
from __future__ import annotations

import enum
from array import array
from collections.abc import Iterable, Mapping
from dataclasses import asdict, dataclass

import numpy as np

from .ingest import DELETED, CommentRecord, PostRecord, same_author
from .threads import ThreadTree


class AuthorCategory(str, enum.Enum):
    PRODUCER_ONLY = "producer_only"
    CONSUMER_ONLY = "consumer_only"
    BOTH = "both"


@dataclass
class AuthorMetrics:
    author: str
    posts_created: int = 0
    comments_made: int = 0
    effective_comments_received: int = 0
    comments_on_others: int = 0
    in_degree: int = 0
    out_degree: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class UnattributedActivity:
    """Activity that cannot be credited to an identity."""

    deleted_posts: int = 0
    deleted_comments: int = 0
    comments_on_deleted_posts: int = 0
    disconnected_comments: int = 0
    self_comments: int = 0


class AuthorAccumulator:
    """Streaming, mergeable accumulation of :class:`AuthorMetrics`.

    Authors are interned to integers so the edge list can live in a compact
    ``array('Q')``; duplicates are removed once, in :meth:`finalize`.
    """

    def __init__(self):
        self._index: dict[str, int] = {}
        self.names: list[str] = []
        self.posts = array("q")
        self.comments = array("q")
        self.received = array("q")
        self.on_others = array("q")
        self.edges = array("Q")
        self.other = UnattributedActivity()

    def _id(self, author: str) -> int:
        idx = self._index.get(author)
        if idx is None:
            idx = self._index[author] = len(self.names)
            self.names.append(author)
            for arr in (self.posts, self.comments, self.received, self.on_others):
                arr.append(0)
        return idx

    def add_post(self, author: str):
        if author == DELETED:
            self.other.deleted_posts += 1
            return
        self.posts[self._id(author)] += 1

    def add_comment(self, author: str, post_author: str | None):
        """Record one comment.  ``post_author`` is None when the post is unknown."""
        if post_author is None:
            self.other.disconnected_comments += 1
            if author == DELETED:
                self.other.deleted_comments += 1
            else:
                self.comments[self._id(author)] += 1
            return
        u = None
        if author == DELETED:
            self.other.deleted_comments += 1
        else:
            u = self._id(author)
            self.comments[u] += 1
        if post_author == DELETED:
            self.other.comments_on_deleted_posts += 1
            if u is not None:
                self.on_others[u] += 1
            return
        if author == post_author:
            self.other.self_comments += 1
            return
        v = self._id(post_author)
        self.received[v] += 1
        if u is not None:
            self.on_others[u] += 1
            self.edges.append((u << 32) | v)

    def merge(self, other: AuthorAccumulator) -> AuthorAccumulator:
        out = AuthorAccumulator()
        for acc in (self, other):
            remap = np.fromiter((out._id(name) for name in acc.names), dtype=np.uint64, count=len(acc.names))
            for src, dst in ((acc.posts, out.posts), (acc.comments, out.comments),
                             (acc.received, out.received), (acc.on_others, out.on_others)):
                for i, value in enumerate(src):
                    dst[int(remap[i])] += value
            if len(acc.edges):
                e = np.frombuffer(acc.edges, dtype=np.uint64)
                mapped = (remap[e >> np.uint64(32)] << np.uint64(32)) | remap[e & np.uint64(0xFFFFFFFF)]
                out.edges.extend(np.unique(mapped).tolist())
        for name in asdict(out.other):
            setattr(out.other, name, getattr(self.other, name) + getattr(other.other, name))
        return out

    def replace_edges(self, pairs: Iterable[tuple[str, str]]):
        """Swap the commenter-to-post-author edges for an explicit edge list."""
        self.edges = array("Q", ((self._id(u) << 32) | self._id(v) for u, v in pairs))

    def unique_edges(self) -> np.ndarray:
        return np.unique(np.frombuffer(self.edges, dtype=np.uint64)) if len(self.edges) else np.zeros(0, np.uint64)

    def finalize(self) -> dict[str, AuthorMetrics]:
        n = len(self.names)
        edges = self.unique_edges()
        out_deg = np.bincount((edges >> np.uint64(32)).astype(np.int64), minlength=n)
        in_deg = np.bincount((edges & np.uint64(0xFFFFFFFF)).astype(np.int64), minlength=n)
        result = {}
        for i, name in enumerate(self.names):
            result[name] = AuthorMetrics(
                author=name,
                posts_created=self.posts[i],
                comments_made=self.comments[i],
                effective_comments_received=self.received[i],
                comments_on_others=self.on_others[i],
                in_degree=int(in_deg[i]),
                out_degree=int(out_deg[i]),
            )
        return result


def accumulate_author_metrics(
    posts: Iterable[PostRecord],
    comments: Iterable[CommentRecord],
    post_author_index: Mapping[str, str] | None = None,
) -> tuple[dict[str, AuthorMetrics], UnattributedActivity]:
    posts = list(posts)
    if post_author_index is None:
        post_author_index = {p.id: p.author for p in posts}
    acc = AuthorAccumulator()
    for p in posts:
        acc.add_post(p.author)
    for c in comments:
        acc.add_comment(c.author, post_author_index.get(c.link_id))
    return acc.finalize(), acc.other


def reply_edges(tree: ThreadTree) -> set[tuple[str, str]]:
    """(commenter, author replied to) pairs: the parent comment's author, or the post's for first-level comments.

    Orphans have no known parent author and contribute nothing.
    """
    out = set()
    post = tree.post
    cut = set(tree.orphans)  # includes comments cut loose from a parent cycle
    for c in tree.comments:
        if c.parent_id == post.id:
            target = post.author
        elif c.id not in cut:
            target = tree.by_id[c.parent_id].author
        else:
            continue
        if c.author == DELETED or target == DELETED or same_author(c.author, target):
            continue
        out.add((c.author, target))
    return out


def interaction_score(received: int, given: int) -> float | None:
    """received / (received + given); None when the author has neither."""
    total = received + given
    if total == 0:
        return None
    return received / total


def categorize_author(m: AuthorMetrics) -> AuthorCategory:
    if m.posts_created > 0 and m.comments_made > 0:
        return AuthorCategory.BOTH
    if m.posts_created > 0:
        return AuthorCategory.PRODUCER_ONLY
    if m.comments_made > 0:
        return AuthorCategory.CONSUMER_ONLY
    raise ValueError(f"author {m.author!r} has no activity")


def category_counts(metrics: Mapping[str, AuthorMetrics]) -> dict[str, int]:
    counts = {c.value: 0 for c in AuthorCategory}
    active = 0
    for m in metrics.values():
        if m.posts_created == 0 and m.comments_made == 0:
            continue
        counts[categorize_author(m).value] += 1
        active += 1
    return {"total_active_authors": active, **counts}


INTERACTION_BINS = 50  # width 0.02


def interaction_histogram(metrics: Mapping[str, AuthorMetrics], bins: int = INTERACTION_BINS
                          ) -> tuple[np.ndarray, int]:
    """Counts per score bin over [0, 1] (top bin closed) and the number of undefined scores."""
    counts = np.zeros(bins, dtype=np.int64)
    undefined = 0
    for m in metrics.values():
        a, b = m.effective_comments_received, m.comments_on_others
        if a + b == 0:
            undefined += 1
            continue
        # integer arithmetic keeps 0.5 exactly on a bin edge
        counts[min(a * bins // (a + b), bins - 1)] += 1
    return counts, undefined


@dataclass
class CommentsPerPostCurve:
    ratios: np.ndarray
    cumulative: np.ndarray
    below: float
    at: float
    above: float
    n_authors: int


def comments_per_post_curve(metrics: Mapping[str, AuthorMetrics]) -> CommentsPerPostCurve:
    """Cumulative author fraction over effective comments received per post created."""
    producers = [m for m in metrics.values() if m.posts_created > 0]
    n = len(producers)
    if n == 0:
        empty = np.zeros(0)
        return CommentsPerPostCurve(empty, empty, 0.0, 0.0, 0.0, 0)
    below = sum(1 for m in producers if m.effective_comments_received < m.posts_created)
    at = sum(1 for m in producers if m.effective_comments_received == m.posts_created)
    ratios = np.sort(np.array([m.effective_comments_received / m.posts_created for m in producers]))
    uniq, counts = np.unique(ratios, return_counts=True)
    return CommentsPerPostCurve(uniq, np.cumsum(counts) / n, below / n, at / n, (n - below - at) / n, n)
