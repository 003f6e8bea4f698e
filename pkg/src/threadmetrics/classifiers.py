"""Per-post behavioral classes: Mayfly lifetime, cyborg-like authorship, success, evolution."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .threads import PostMetrics

DAY = 86_400


class CyborgClass(str, enum.Enum):
    CYBORG_LIKE = "cyborg_like"
    FAST_SAME_AUTHOR_SHORT = "fast_same_author_short"
    NOT_FAST_SAME_AUTHOR = "not_fast_same_author"


class EvolutionClass(str, enum.Enum):
    EARLY_BLOOMER = "early_bloomer"
    STEADY = "steady"
    LATE_BLOOMER = "late_bloomer"


class SuccessMode(str, enum.Enum):
    COMMENTS_ONLY = "comments-only"
    COMMENTS_OR_SCORE = "comments-or-score"


@dataclass(frozen=True)
class ClassifierConfig:
    mayfly_threshold_s: float = DAY
    cyborg_latency_s: float = 6
    cyborg_latency_inclusive: bool = True
    cyborg_min_chars: int = 100
    bloomer_fraction: float = 0.75
    early_cutoff_s: float = DAY
    late_cutoff_s: float = 30 * DAY
    popular_min_comments: int = 500
    success_mode: SuccessMode = SuccessMode.COMMENTS_OR_SCORE
    baseline_score: int = 1

    def __post_init__(self):
        for name in ("mayfly_threshold_s", "cyborg_latency_s", "early_cutoff_s", "late_cutoff_s"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.cyborg_min_chars < 0 or self.popular_min_comments < 0:
            raise ValueError("count thresholds must be nonnegative")
        if not self.early_cutoff_s < self.late_cutoff_s:
            raise ValueError("early_cutoff_s must be below late_cutoff_s")
        if not 0 < self.bloomer_fraction < 1:
            raise ValueError("bloomer_fraction must lie in (0, 1)")
        object.__setattr__(self, "success_mode", SuccessMode(self.success_mode))


DEFAULT_CONFIG = ClassifierConfig()


def classify_mayfly(m: PostMetrics, cfg: ClassifierConfig = DEFAULT_CONFIG) -> bool | None:
    """True when the post went quiet within a day; None for posts without comments."""
    if m.age_seconds is None:
        return None
    return m.age_seconds < cfg.mayfly_threshold_s


def is_fast(latency: float | None, cfg: ClassifierConfig = DEFAULT_CONFIG) -> bool:
    if latency is None:
        return False
    if cfg.cyborg_latency_inclusive:
        return latency <= cfg.cyborg_latency_s
    return latency < cfg.cyborg_latency_s


def classify_cyborg(m: PostMetrics, cfg: ClassifierConfig = DEFAULT_CONFIG) -> CyborgClass:
    if not (is_fast(m.first_comment_latency_seconds, cfg) and m.first_comment_same_author):
        return CyborgClass.NOT_FAST_SAME_AUTHOR
    if m.first_comment_char_len > cfg.cyborg_min_chars:
        return CyborgClass.CYBORG_LIKE
    return CyborgClass.FAST_SAME_AUTHOR_SHORT


def is_successful(m: PostMetrics, post_score: int | None, cfg: ClassifierConfig = DEFAULT_CONFIG) -> bool:
    """Any reaction from someone else: an effective comment, or a vote beyond the submitter's own."""
    if m.effective_comments >= 1:
        return True
    if cfg.success_mode is SuccessMode.COMMENTS_OR_SCORE:
        return post_score is not None and post_score != cfg.baseline_score
    return False


def target_count(fraction: float, total: int) -> int:
    # round() first so 0.7 * 10 does not become 8 through float noise
    return max(1, math.ceil(round(fraction * total, 9)))


def t_fraction(offsets: list[float], fraction: float) -> float:
    """Earliest offset by which ``fraction`` of all comments have arrived."""
    return offsets[target_count(fraction, len(offsets)) - 1]


def classify_evolution(offsets: list[float], cfg: ClassifierConfig = DEFAULT_CONFIG
                       ) -> tuple[EvolutionClass, float] | None:
    """Class and t75 for a popular post; None below the popularity threshold.

    ``offsets`` must be sorted ascending.
    """
    if len(offsets) <= cfg.popular_min_comments:
        return None
    t75 = t_fraction(offsets, cfg.bloomer_fraction)
    if t75 <= cfg.early_cutoff_s:
        return EvolutionClass.EARLY_BLOOMER, t75
    if t75 > cfg.late_cutoff_s:
        return EvolutionClass.LATE_BLOOMER, t75
    return EvolutionClass.STEADY, t75
