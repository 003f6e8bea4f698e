"""Discussion-tree reconstruction and per-post structural metrics."""
from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

from .ingest import CommentRecord, PostRecord, same_author


def _canonical(c: CommentRecord):
    return (c.created_utc, c.id)


@dataclass
class ThreadTree:
    """One post and its comments arranged by parent links.

    ``comments`` is in canonical order (creation time, then id).  ``orphans``
    are comments whose parent is neither the post nor a comment in the tree;
    they hang at post level but belong to no first-level branch.  Comments
    caught in a parent cycle are cut loose the same way and counted in
    ``cycle_breaks``.
    """

    post: PostRecord
    comments: list[CommentRecord]
    children: dict[str, list[str]]
    first_level: list[str]
    orphans: list[str]
    by_id: dict[str, CommentRecord] = field(repr=False)
    clamped: int = 0
    duplicates: int = 0
    cycle_breaks: int = 0

    @property
    def total_comments(self) -> int:
        return len(self.comments)

    def offset(self, c: CommentRecord) -> float:
        return max(0, c.created_utc - self.post.created_utc)


def build_thread(post: PostRecord, comments: Iterable[CommentRecord]) -> ThreadTree:
    ordered = sorted(comments, key=_canonical)
    by_id: dict[str, CommentRecord] = {}
    kept: list[CommentRecord] = []
    duplicates = 0
    for c in ordered:
        if c.link_id != post.id:
            raise ValueError(f"comment {c.id} belongs to {c.link_id}, not {post.id}")
        if c.id in by_id:
            duplicates += 1
            continue
        by_id[c.id] = c
        kept.append(c)

    children: dict[str, list[str]] = {}
    first_level: list[str] = []
    orphans: list[str] = []
    for c in kept:
        if c.parent_id == post.id:
            first_level.append(c.id)
        elif c.parent_id in by_id:
            children.setdefault(c.parent_id, []).append(c.id)
        else:
            orphans.append(c.id)

    reached = _reachable(first_level + orphans, children)
    cycle_breaks = 0
    if len(reached) < len(kept):
        # Whatever is left only reaches itself through a parent cycle.  Cut
        # the earliest unreached comment from its parent and retry.
        for c in kept:
            if c.id in reached:
                continue
            siblings = children[c.parent_id]
            siblings.remove(c.id)
            if not siblings:
                del children[c.parent_id]
            orphans.append(c.id)
            cycle_breaks += 1
            reached |= _reachable([c.id], children)

    clamped = sum(1 for c in kept if c.created_utc < post.created_utc)
    return ThreadTree(
        post=post,
        comments=kept,
        children=children,
        first_level=first_level,
        orphans=orphans,
        by_id=by_id,
        clamped=clamped,
        duplicates=duplicates,
        cycle_breaks=cycle_breaks,
    )


def _reachable(roots: list[str], children: dict[str, list[str]]) -> set[str]:
    seen = set()
    stack = list(roots)
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        stack.extend(children.get(node, ()))
    return seen


def _subtree_size(root: str, children: dict[str, list[str]]) -> int:
    size = 0
    stack = [root]
    while stack:
        node = stack.pop()
        size += 1
        stack.extend(children.get(node, ()))
    return size


def first_level_subtree_sizes(tree: ThreadTree) -> list[tuple[str, int]]:
    """Size of each first-level branch, counting the first-level comment itself."""
    return [(cid, _subtree_size(cid, tree.children)) for cid in tree.first_level]


def orphaned_comment_count(tree: ThreadTree) -> int:
    """Comments in orphan branches (the orphans plus everything below them)."""
    return sum(_subtree_size(cid, tree.children) for cid in tree.orphans)


def comment_time_series(tree: ThreadTree) -> list[float]:
    # Canonical order is by creation time, and clamping is monotone.
    return [tree.offset(c) for c in tree.comments]


@dataclass
class PostMetrics:
    post_id: str
    age_seconds: float | None
    total_comments: int
    effective_comments: int
    first_comment_latency_seconds: float | None
    first_comment_same_author: bool
    first_comment_char_len: int
    comment_offsets: list[float]
    first_comment_id: str | None = None


def post_metrics(tree: ThreadTree) -> PostMetrics:
    post = tree.post
    offsets = comment_time_series(tree)
    effective = sum(1 for c in tree.comments if not same_author(c.author, post.author))
    if not tree.comments:
        return PostMetrics(post.id, None, 0, 0, None, False, 0, [])
    first = tree.comments[0]
    return PostMetrics(
        post_id=post.id,
        age_seconds=offsets[-1],
        total_comments=len(offsets),
        effective_comments=effective,
        first_comment_latency_seconds=offsets[0],
        first_comment_same_author=same_author(first.author, post.author),
        first_comment_char_len=len(first.body),
        comment_offsets=offsets,
        first_comment_id=first.id,
    )
