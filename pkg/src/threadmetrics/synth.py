"""Synthetic dumps with planted ground truth.

Labels are drawn first and the comment data is then built to satisfy them,
so every classifier should recover its planted label exactly under default
thresholds.  Output uses the same NDJSON layout the ingest code reads.
"""
from __future__ import annotations

import gzip
import json
import random
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .classifiers import DAY, CyborgClass, EvolutionClass, target_count
from .ingest import DELETED, PERIOD_2008, REMOVED


class SpecError(ValueError):
    pass


@dataclass
class CorpusSpec:
    seed: int = 0
    n_posts: int = 1000
    # comment-count law for regular posts: "pareto" (discrete) or "fixed"
    comment_law: str = "pareto"
    pareto_alpha: float = 2.5
    pareto_xmin: int = 1
    fixed_comments: int = 3
    max_regular_comments: int = 499
    zero_comment_posts: int = 0
    n_popular: int = 0
    popular_min_comments: int = 501
    popular_max_comments: int = 800
    fraction_mayfly: float = 0.8
    fraction_cyborg: float = 0.1
    fraction_fast_short: float = 0.02
    fraction_unsuccessful: float = 0.05
    fraction_early: float = 0.5
    fraction_steady: float = 0.3
    fraction_late: float = 0.2
    limelight_min: float = 0.05
    limelight_max: float = 1.0
    fraction_hog_distinct: float = 0.97
    n_authors: int = 500
    fraction_producers_only: float = 0.3
    fraction_consumers_only: float = 0.3
    self_comment_rate: float = 0.1
    fraction_deleted_post_authors: float = 0.0
    deleted_comment_rate: float = 0.0
    removed_comment_rate: float = 0.0
    orphan_rate: float = 0.0
    top_level_rate: float = 0.4
    include_scores: bool = True
    disconnected_comments: int = 0
    late_comments: int = 0
    period_start: int = PERIOD_2008[0]
    period_end: int = PERIOD_2008[1]
    compress: str = "none"

    @property
    def n_regular(self) -> int:
        return self.n_posts - self.n_popular - self.zero_comment_posts

    def count(self, fraction: float, of: int | None = None) -> int:
        return int(round(fraction * (self.n_posts if of is None else of)))

    def validate(self):
        def frac(name):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise SpecError(f"{name}={v} is not a fraction")

        for f in fields(self):
            if f.name.startswith("fraction_") or f.name.endswith("_rate"):
                frac(f.name)
        if self.n_posts < 1 or self.n_regular < 0:
            raise SpecError("n_posts must cover popular and zero-comment posts")
        if self.comment_law not in ("pareto", "fixed"):
            raise SpecError(f"unknown comment_law {self.comment_law!r}")
        if self.comment_law == "pareto" and (self.pareto_alpha <= 1 or self.pareto_xmin < 1):
            raise SpecError("pareto law needs alpha > 1 and xmin >= 1")
        if self.comment_law == "fixed" and self.fixed_comments < 1:
            raise SpecError("fixed_comments must be at least 1")
        if self.max_regular_comments < max(1, self.pareto_xmin if self.comment_law == "pareto" else self.fixed_comments):
            raise SpecError("max_regular_comments is below the law's minimum")
        if not 0 < self.popular_min_comments <= self.popular_max_comments:
            raise SpecError("bad popular comment range")
        if self.n_popular and self.popular_min_comments <= self.max_regular_comments:
            raise SpecError("popular posts must out-number every regular post")
        if self.n_popular:
            evo = self.fraction_early + self.fraction_steady + self.fraction_late
            if abs(evo - 1) > 1e-9:
                raise SpecError("evolution fractions must sum to 1")
        if not 0 < self.limelight_min <= self.limelight_max <= 1:
            raise SpecError("limelight range must lie in (0, 1]")
        if self.fraction_producers_only + self.fraction_consumers_only >= 1:
            raise SpecError("author pool needs some authors who both post and comment")
        if self.n_authors < 4:
            raise SpecError("n_authors too small")
        if self.period_end - self.period_start <= 120 * DAY:
            raise SpecError("period must span more than 120 days")
        if self.compress not in ("none", "gz"):
            raise SpecError("compress must be none or gz")
        need = self.count(self.fraction_mayfly)
        if need > self.n_regular:
            raise SpecError(f"{need} mayfly posts requested but only {self.n_regular} regular posts")
        fast = self.count(self.fraction_cyborg) + self.count(self.fraction_fast_short)
        if fast > self.n_regular:
            raise SpecError("more fast-first-comment posts than regular posts")
        if self.count(self.fraction_unsuccessful) + self.count(self.fraction_deleted_post_authors) > self.n_regular:
            raise SpecError("unsuccessful and deleted-author posts exceed regular posts")


def read_spec_file(path: str | Path) -> CorpusSpec:
    """Parse a plain ``key = value`` file; ``#`` starts a comment."""
    spec = CorpusSpec()
    types = {f.name: type(getattr(spec, f.name)) for f in fields(spec)}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise SpecError(f"line {lineno}: unknown key {key!r}")
        kind = types[key]
        if kind is bool:
            parsed = value.lower() in ("1", "true", "yes", "on")
        elif kind is int:
            parsed = int(float(value))
        else:
            parsed = kind(value)
        setattr(spec, key, parsed)
    return spec


def write_spec_file(spec: CorpusSpec, path: str | Path):
    lines = [f"{f.name} = {getattr(spec, f.name)}" for f in fields(spec)]
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# samplers

def pareto_from_uniform(u, alpha: float, xmin: float):
    """Inverse CDF of the continuous power law: xmin * u**(-1/(alpha-1))."""
    return xmin * np.power(u, -1.0 / (alpha - 1.0))


def sample_pareto(alpha: float, xmin: float, n: int, seed: int) -> np.ndarray:
    if alpha <= 1 or xmin <= 0 or n < 1:
        raise ValueError("need alpha > 1, xmin > 0, n >= 1")
    rng = np.random.default_rng(seed)
    u = 1.0 - rng.random(n)  # (0, 1]
    return pareto_from_uniform(u, alpha, xmin)


def sample_discrete_powerlaw(alpha: float, xmin: int, n: int, seed_or_rng) -> np.ndarray:
    """Integer power-law draws via the rounded continuous approximation."""
    rng = np.random.default_rng(seed_or_rng)
    u = 1.0 - rng.random(n)
    return np.floor((xmin - 0.5) * np.power(u, -1.0 / (alpha - 1.0)) + 0.5).astype(np.int64)


# ---------------------------------------------------------------------------
# generation

_FILLER = "lorem ipsum dolor sit amet café naïve déjà vu "


def _body(length: int) -> str:
    reps = length // len(_FILLER) + 1
    return (_FILLER * reps)[:length]


def _b36(n: int, width: int) -> str:
    digits = "0123456789abcdefghijklmnopqrstuvwxyz"
    out = []
    while n:
        n, r = divmod(n, 36)
        out.append(digits[r])
    return "".join(reversed(out)).rjust(width, "0")


class _Writer:
    def __init__(self, path: Path, compress: str):
        if compress == "gz":
            self.path = path.with_name(path.name + ".gz")
            self._raw = open(self.path, "wb")
            self.fh = gzip.GzipFile(fileobj=self._raw, mode="wb", mtime=0, filename="")
        else:
            self.path = path
            self._raw = None
            self.fh = open(path, "wb")
        self.buf: list[str] = []

    def write(self, obj: dict):
        self.buf.append(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))
        if len(self.buf) >= 4096:
            self.flush()

    def flush(self):
        if self.buf:
            self.fh.write(("\n".join(self.buf) + "\n").encode("utf-8"))
            self.buf.clear()

    def close(self):
        self.flush()
        self.fh.close()
        if self._raw is not None:
            self._raw.close()


@dataclass
class CorpusFiles:
    posts: Path
    comments: Path
    ground_truth: Path
    spec: Path


class _Labels:
    """Per-post planted labels, decided before any data is built."""

    def __init__(self, spec: CorpusSpec, rng: random.Random, counts: list[int]):
        n_reg = spec.n_regular
        reg = list(range(n_reg))
        self.mayfly = set(rng.sample(reg, spec.count(spec.fraction_mayfly)))
        eligible = [i for i in reg if i in self.mayfly or counts[i] >= 2]
        n_cyb = spec.count(spec.fraction_cyborg)
        n_short = spec.count(spec.fraction_fast_short)
        if n_cyb + n_short > len(eligible):
            raise SpecError("too few posts can carry a fast first comment with the requested mayfly split")
        fast = rng.sample(eligible, n_cyb + n_short)
        self.cyborg = {i: CyborgClass.NOT_FAST_SAME_AUTHOR for i in reg}
        for i in fast[:n_cyb]:
            self.cyborg[i] = CyborgClass.CYBORG_LIKE
        for i in fast[n_cyb:]:
            self.cyborg[i] = CyborgClass.FAST_SAME_AUTHOR_SHORT

        n_unsucc = spec.count(spec.fraction_unsuccessful)
        forced = []
        if not spec.include_scores:
            # without scores a lone self-comment cannot be a success
            forced = [i for i in fast if counts[i] == 1]
            if len(forced) > n_unsucc:
                raise SpecError("without scores, single-comment fast posts must all be unsuccessful")
        forced_set = set(forced)
        rest = [i for i in reg if i not in forced_set]
        self.unsuccessful = forced_set | set(rng.sample(rest, n_unsucc - len(forced)))

        candidates = [i for i in reg if self.cyborg[i] is CyborgClass.NOT_FAST_SAME_AUTHOR
                      and i not in self.unsuccessful]
        n_del = spec.count(spec.fraction_deleted_post_authors)
        if n_del > len(candidates):
            raise SpecError("too few posts available for deleted authors")
        self.deleted_author = set(rng.sample(candidates, n_del))

        n_pop = spec.n_popular
        n_early = spec.count(spec.fraction_early, n_pop)
        n_steady = spec.count(spec.fraction_steady, n_pop)
        n_late = n_pop - n_early - n_steady
        if n_late < 0 or abs(n_late - spec.fraction_late * n_pop) >= 1:
            raise SpecError("evolution fractions do not split n_popular into whole posts")
        evo = ([EvolutionClass.EARLY_BLOOMER] * n_early + [EvolutionClass.STEADY] * n_steady
               + [EvolutionClass.LATE_BLOOMER] * n_late)
        rng.shuffle(evo)
        self.evolution = evo
        n_distinct = spec.count(spec.fraction_hog_distinct, n_pop)
        distinct = [True] * n_distinct + [False] * (n_pop - n_distinct)
        rng.shuffle(distinct)
        self.hog_distinct = distinct


class _Authors:
    def __init__(self, spec: CorpusSpec, rng: random.Random):
        names = [f"user_{i:06d}" for i in range(spec.n_authors)]
        n_prod = int(round(spec.fraction_producers_only * spec.n_authors))
        n_cons = int(round(spec.fraction_consumers_only * spec.n_authors))
        self.posters = names[:n_prod] + names[n_prod + n_cons:]
        self.commenters = names[n_prod:]
        self.rng = rng
        self.posts: dict[str, int] = {}
        self.comments: dict[str, int] = {}
        self.received: dict[str, int] = {}
        self.on_others: dict[str, int] = {}

    def poster(self) -> str:
        return self.rng.choice(self.posters)

    def commenter(self, avoid: str) -> str:
        while True:
            name = self.rng.choice(self.commenters)
            if name != avoid:
                return name

    def book_post(self, author: str):
        if author != DELETED:
            self.posts[author] = self.posts.get(author, 0) + 1

    def book_comment(self, author: str, post_author: str):
        if author != DELETED:
            self.comments[author] = self.comments.get(author, 0) + 1
        if author == post_author and author != DELETED:
            return
        if post_author != DELETED:
            self.received[post_author] = self.received.get(post_author, 0) + 1
        if author != DELETED:
            self.on_others[author] = self.on_others.get(author, 0) + 1


def _regular_offsets(rng: random.Random, n: int, mayfly: bool, fast: bool, self_first_slow: bool
                     ) -> list[int]:
    """Sorted integer offsets; the first is the first-comment latency, the last the age."""
    lat_lo, lat_hi = (0, 6) if fast else ((7, None) if self_first_slow else (0, None))
    age_lo, age_hi = (0, DAY - 1) if mayfly else (DAY, 60 * DAY)
    if n == 1:
        if fast:
            # labels guarantee single-comment fast posts are mayfly posts
            return [rng.randint(lat_lo, lat_hi)]
        return [rng.randint(max(age_lo, lat_lo), age_hi)]
    age = rng.randint(max(age_lo, lat_lo), age_hi)
    latency = rng.randint(lat_lo, min(age, lat_hi) if lat_hi is not None else age)
    middle = sorted(rng.randint(latency, age) for _ in range(n - 2))
    return [latency, *middle, age]


def _popular_offsets(rng: random.Random, n: int, cls: EvolutionClass) -> list[int]:
    k = target_count(0.75, n)  # t75 is offsets[k - 1]
    if cls is EvolutionClass.EARLY_BLOOMER:
        head = [rng.randint(7, DAY) for _ in range(k)]
        tail = [rng.randint(DAY + 1, 20 * DAY) for _ in range(n - k)]
    elif cls is EvolutionClass.STEADY:
        t = rng.randint(2 * DAY, 29 * DAY)
        head = [rng.randint(7, t) for _ in range(k - 1)] + [t]
        tail = [rng.randint(t, t + 10 * DAY) for _ in range(n - k)]
    else:
        t = rng.randint(31 * DAY, 60 * DAY)
        head = [rng.randint(7, 30 * DAY) if rng.random() < 0.3 else rng.randint(t - 3 * DAY, t)
                for _ in range(k - 1)] + [t]
        tail = [rng.randint(t, t + 5 * DAY) for _ in range(n - k)]
    return sorted(head) + sorted(tail)


def _branch_sizes(rng: random.Random, n: int, score: float) -> list[int]:
    hog = max(1, min(n, int(round(score * n))))
    if hog == 1 and n > 1:
        hog = 2
    sizes = [hog]
    left = n - hog
    while left:
        s = rng.randint(1, min(hog - 1, left))
        sizes.append(s)
        left -= s
    return sizes


def generate_corpus(spec: CorpusSpec, out_dir: str | Path) -> CorpusFiles:
    """Write posts, comments and ground truth NDJSON into ``out_dir``."""
    spec.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(spec.seed)
    nprng = np.random.default_rng(spec.seed)

    n_reg = spec.n_regular
    if spec.comment_law == "pareto":
        counts = sample_discrete_powerlaw(spec.pareto_alpha, spec.pareto_xmin, n_reg, nprng)
        counts = np.minimum(counts, spec.max_regular_comments).tolist()
    else:
        counts = [spec.fixed_comments] * n_reg
    labels = _Labels(spec, rng, counts)
    authors = _Authors(spec, rng)

    # post slots: regular, popular, zero-comment; then a random creation order
    kinds = [("regular", i) for i in range(n_reg)] + [("popular", j) for j in range(spec.n_popular)] \
        + [("zero", 0)] * spec.zero_comment_posts
    rng.shuffle(kinds)

    posts_w = _Writer(out / "posts.ndjson", spec.compress)
    comments_w = _Writer(out / "comments.ndjson", spec.compress)
    truth_w = _Writer(out / "ground_truth.ndjson", "none")
    comment_seq = 0
    horizon = 70 * DAY  # no planted offset exceeds this
    last_created = spec.period_end - 1 - horizon
    real_posts: list[tuple[str, int]] = []

    for post_seq, (kind, idx) in enumerate(kinds):
        post_name = "t3_" + _b36(post_seq, 6)
        created = rng.randint(spec.period_start, last_created)
        truth: dict = {"kind": "post", "id": post_name[3:]}

        if kind == "regular":
            cls = labels.cyborg[idx]
            fast = cls is not CyborgClass.NOT_FAST_SAME_AUTHOR
            unsuccessful = idx in labels.unsuccessful
            author = DELETED if idx in labels.deleted_author else authors.poster()
            n = counts[idx]
            offsets = _regular_offsets(rng, n, idx in labels.mayfly, fast,
                                       self_first_slow=unsuccessful and not fast)
            comments = _regular_comments(spec, rng, authors, author, offsets, cls, unsuccessful)
            successful = not unsuccessful
            if successful and spec.include_scores and not any(a != author or a == DELETED for a, *_ in comments):
                score = rng.randint(2, 60)
            elif unsuccessful:
                score = 1
            else:
                score = rng.randint(0, 60)
            truth.update(n_comments=n, age=offsets[-1], mayfly=offsets[-1] < DAY,
                         cyborg_class=cls.value, successful=successful)
        elif kind == "popular":
            cls_evo = labels.evolution[idx]
            author = authors.poster()
            n = rng.randint(spec.popular_min_comments, spec.popular_max_comments)
            offsets = _popular_offsets(rng, n, cls_evo)
            target = rng.uniform(spec.limelight_min, spec.limelight_max)
            sizes = _branch_sizes(rng, n, target)
            comments = _popular_comments(spec, rng, authors, author, offsets, sizes,
                                                     labels.hog_distinct[idx])
            score = rng.randint(0, 5000)
            k = target_count(0.75, n)
            truth.update(n_comments=n, age=offsets[-1], mayfly=False,
                         cyborg_class=CyborgClass.NOT_FAST_SAME_AUTHOR.value, successful=True,
                         evolution_class=cls_evo.value, t75=offsets[k - 1],
                         limelight_score=sizes[0] / n, hog_distinct=labels.hog_distinct[idx])
        else:
            author = authors.poster()
            n, comments, offsets = 0, [], []
            score = 1 if spec.include_scores else None
            truth.update(n_comments=0, age=None, mayfly=None,
                         cyborg_class=CyborgClass.NOT_FAST_SAME_AUTHOR.value,
                         successful=False)

        authors.book_post(author)
        post_obj = {"author": author, "created_utc": created, "id": post_name[3:], "name": post_name,
                    "num_comments": n, "title": _body(rng.randint(10, 80)), "subreddit": "synthetic"}
        if spec.include_scores:
            post_obj["score"] = score
        posts_w.write(post_obj)
        real_posts.append((post_name, created))

        # ids follow canonical (time) order so tie-breaks match the planted first comment
        names = []
        for c_author, offset, parent_ref, body in comments:
            comment_seq += 1
            names.append("t1_" + _b36(comment_seq, 7))
        for (c_author, offset, parent_ref, body), name in zip(comments, names):
            if parent_ref is None:
                parent = post_name
            elif isinstance(parent_ref, int):
                parent = names[parent_ref]
            else:
                parent = parent_ref
            obj = {"author": c_author, "body": body, "created_utc": created + offset, "id": name[3:],
                   "link_id": post_name, "name": name, "parent_id": parent, "subreddit": "synthetic"}
            if spec.include_scores:
                obj["score"] = rng.randint(-3, 30)
            comments_w.write(obj)
            authors.book_comment(c_author, author)
        truth_w.write(truth)

    noise = _noise_comments(spec, rng, real_posts, comment_seq)
    for obj in noise:
        comments_w.write(obj)
    for name in sorted(set(authors.posts) | set(authors.comments)):
        p = authors.posts.get(name, 0)
        c = authors.comments.get(name, 0)
        a = authors.received.get(name, 0)
        row = {"kind": "author", "author": name, "posts_created": p, "comments_made": c,
               "effective_comments_received": a, "comments_on_others": authors.on_others.get(name, 0),
               "category": "both" if p and c else ("producer_only" if p else "consumer_only")}
        if p:
            row["comments_per_post"] = a / p
        truth_w.write(row)
    truth_w.write({"kind": "noise", "disconnected_comments": spec.disconnected_comments,
                   "late_comments": spec.late_comments,
                   "disconnected_post_ids": sorted({o["link_id"][3:] for o in noise
                                                    if o["created_utc"] < spec.period_end})})
    for w in (posts_w, comments_w, truth_w):
        w.close()
    spec_path = out / "corpus_spec.txt"
    write_spec_file(spec, spec_path)
    return CorpusFiles(posts_w.path, comments_w.path, truth_w.path, spec_path)


def _comment_body(spec: CorpusSpec, rng: random.Random) -> str:
    if spec.removed_comment_rate and rng.random() < spec.removed_comment_rate:
        return REMOVED
    return _body(rng.randint(1, 60))


def _regular_comments(spec, rng, authors: _Authors, post_author: str, offsets: list[int],
                      cls: CyborgClass, unsuccessful: bool):
    """(author, offset, parent, body) tuples in time order; parent is None, an index or a dangling id."""
    out = []
    for k, offset in enumerate(offsets):
        if k == 0:
            if cls is CyborgClass.CYBORG_LIKE:
                author, body = post_author, _body(rng.randint(101, 400))
            elif cls is CyborgClass.FAST_SAME_AUTHOR_SHORT:
                author, body = post_author, _body(rng.randint(1, 100))
            elif unsuccessful:
                author, body = post_author, _body(rng.randint(1, 200))
            else:
                author, body = authors.commenter(post_author), _body(rng.randint(1, 200))
            out.append((author, offset, None, body))
            continue
        if unsuccessful:
            author = post_author
        elif k == 1 and cls is not CyborgClass.NOT_FAST_SAME_AUTHOR:
            # a fast self-comment post needs one outside reaction to count as a success
            author = authors.commenter(post_author)
        elif spec.deleted_comment_rate and rng.random() < spec.deleted_comment_rate:
            author = DELETED
        elif post_author != DELETED and rng.random() < spec.self_comment_rate:
            author = post_author
        else:
            author = authors.commenter(post_author)
        if spec.orphan_rate and rng.random() < spec.orphan_rate:
            parent = "t1_zz" + _b36(rng.getrandbits(40), 8)
        elif rng.random() < spec.top_level_rate:
            parent = None
        else:
            parent = rng.randrange(k)
        out.append((author, offset, parent, _comment_body(spec, rng)))
    return out


def _popular_comments(spec, rng, authors: _Authors, post_author: str, offsets: list[int],
                      sizes: list[int], hog_distinct: bool):
    labels = [b for b, s in enumerate(sizes) for _ in range(s)]
    rng.shuffle(labels)
    members: dict[int, list[int]] = {}
    out = []
    for k, (offset, branch) in enumerate(zip(offsets, labels)):
        seen = members.setdefault(branch, [])
        if not seen:
            parent = None
            if branch == 0:
                author = authors.commenter(post_author) if hog_distinct else post_author
            else:
                author = authors.commenter(post_author)
        else:
            parent = rng.choice(seen)
            if rng.random() < spec.self_comment_rate:
                author = post_author
            else:
                author = authors.commenter(post_author)
        seen.append(k)
        out.append((author, offset, parent, _comment_body(spec, rng)))
    return out


def _noise_comments(spec: CorpusSpec, rng: random.Random, real_posts, seq: int) -> list[dict]:
    out = []
    for i in range(spec.disconnected_comments):
        seq += 1
        link = "t3_zz" + _b36(i % 7, 4)
        out.append({"author": "noise_author", "body": "noise", "created_utc": spec.period_start + 1 + i,
                    "id": _b36(seq, 7), "link_id": link, "name": "t1_" + _b36(seq, 7),
                    "parent_id": link, "subreddit": "synthetic"})
    for i in range(spec.late_comments):
        seq += 1
        link, _ = real_posts[rng.randrange(len(real_posts))]
        out.append({"author": "noise_author", "body": "late", "created_utc": spec.period_end + 10 + i,
                    "id": _b36(seq, 7), "link_id": link, "name": "t1_" + _b36(seq, 7),
                    "parent_id": link, "subreddit": "synthetic"})
    return out
