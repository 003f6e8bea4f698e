"""Limelight score: the share of a post's discussion held by its largest first-level branch."""
from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .ingest import same_author
from .threads import ThreadTree, first_level_subtree_sizes


class NoFirstLevelComments(ValueError):
    pass


@dataclass(frozen=True)
class LimelightResult:
    post_id: str
    score: float
    hog_comment_id: str
    hog_author: str
    hog_author_is_post_author: bool
    n_first_level: int
    hog_size: int
    branch_total: int


def limelight_score(tree: ThreadTree) -> LimelightResult:
    sizes = first_level_subtree_sizes(tree)
    if not sizes:
        raise NoFirstLevelComments(f"post {tree.post.id} has no first-level comments")
    # first_level is in canonical order, so the first maximum is the earliest
    hog_id, hog_size = sizes[0]
    for cid, size in sizes[1:]:
        if size > hog_size:
            hog_id, hog_size = cid, size
    total = sum(size for _, size in sizes)
    hog_author = tree.by_id[hog_id].author
    return LimelightResult(
        post_id=tree.post.id,
        score=hog_size / total,
        hog_comment_id=hog_id,
        hog_author=hog_author,
        hog_author_is_post_author=same_author(hog_author, tree.post.author),
        n_first_level=len(sizes),
        hog_size=hog_size,
        branch_total=total,
    )


def hog_author_distinct_fraction(results: Iterable[LimelightResult]) -> float:
    results = list(results)
    if not results:
        raise ValueError("no limelight results")
    return sum(1 for r in results if not r.hog_author_is_post_author) / len(results)
