"""End-to-end analysis: stream dumps, partition by post, analyze, write the report bundle.

Pass 1 reads posts and keeps the in-period ones.  Pass 2 streams comments
through the period filter, credits authors, and spills each kept comment to
the partition of its post.  Pass 3 analyzes partitions independently, in a
process pool when ``threads > 1``.  Partition results are merged in
partition order, so the bundle does not depend on the worker count.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import multiprocessing
import pickle
import shutil
import tempfile
import zlib
from collections import Counter
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import distributions as dist
from .authors import (
    AuthorAccumulator,
    categorize_author,
    category_counts,
    comments_per_post_curve,
    interaction_histogram,
    interaction_score,
    reply_edges,
)
from .classifiers import (
    ClassifierConfig,
    CyborgClass,
    classify_cyborg,
    classify_evolution,
    classify_mayfly,
    is_fast,
    is_successful,
)
from .ingest import CommentRecord, CorpusFilter, IngestStats, Period, PostRecord, read_comments, read_posts
from .limelight import limelight_score
from .threads import build_thread, orphaned_comment_count, post_metrics

log = logging.getLogger(__name__)

EDGE_MODES = ("post-author", "parent-author")
SECTIONS = ("ingest", "distributions", "lifetimes", "cyborg", "evolution", "limelight", "authors")
_FLUSH_EVERY = 8192


class InputError(RuntimeError):
    """Fatal problem with the inputs; nothing was analyzed."""


@dataclass
class AnalysisConfig:
    posts: list[Path]
    comments: list[Path]
    out_dir: Path
    period: Period = field(default_factory=Period.unbounded)
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    fmt: str = "csv"
    threads: int = 1
    partitions: int = 32
    sections: tuple[str, ...] = SECTIONS
    strip_prefixes: bool = True
    limelight_min_comments: int = 500
    exclude_authors: tuple[str, ...] = ()
    discrete_fit: bool = False
    age_bin_ratio: float = 1.3
    emit_post_metrics: Path | None = None
    emit_author_metrics: Path | None = None
    emit_limelight: Path | None = None
    work_dir: Path | None = None
    edge_target: str = "post-author"

    def __post_init__(self):
        if self.fmt not in ("csv", "ndjson"):
            raise ValueError(f"unknown format {self.fmt!r}")
        unknown = set(self.sections) - set(SECTIONS)
        if unknown:
            raise ValueError(f"unknown sections: {sorted(unknown)}")
        if self.edge_target not in EDGE_MODES:
            raise ValueError(f"unknown edge target {self.edge_target!r}")
        if self.threads < 1 or self.partitions < 1:
            raise ValueError("threads and partitions must be positive")


# ---------------------------------------------------------------------------
# partition spill files

def partition_of(post_id: str, k: int) -> int:
    return zlib.crc32(post_id.encode("utf-8")) % k


class _Spill:
    def __init__(self, path: Path):
        self.path = path
        self.fh = open(path, "wb")
        self.buf: list[tuple] = []

    def add(self, row: tuple):
        self.buf.append(row)
        if len(self.buf) >= _FLUSH_EVERY:
            self.flush()

    def flush(self):
        if self.buf:
            pickle.dump(self.buf, self.fh, protocol=pickle.HIGHEST_PROTOCOL)
            self.buf = []

    def close(self):
        self.flush()
        self.fh.close()


def _read_spill(path: Path):
    with open(path, "rb") as fh:
        while True:
            try:
                yield from pickle.load(fh)
            except EOFError:
                return


# ---------------------------------------------------------------------------
# per-partition analysis

@dataclass
class PartitionResult:
    comment_counts: list = field(default_factory=list)
    ages: list = field(default_factory=list)
    age_totals: list = field(default_factory=list)
    one_comment_ages: list = field(default_factory=list)
    first_latencies: list = field(default_factory=list)
    fast_posts: list = field(default_factory=list)       # (age, cyborg class, successful)
    evolution: list = field(default_factory=list)        # (post_id, n, t75, class)
    evolution_curves: list = field(default_factory=list)
    limelight: list = field(default_factory=list)        # (LimelightResult, cyborg class)
    reply_edges: list = field(default_factory=list)      # (commenter, replied-to author), parent-author mode
    counters: Counter = field(default_factory=Counter)

    def absorb(self, other: PartitionResult):
        for f in fields(self):
            mine = getattr(self, f.name)
            if isinstance(mine, Counter):
                mine.update(getattr(other, f.name))
            else:
                mine.extend(getattr(other, f.name))

    def merge(self, other: PartitionResult) -> PartitionResult:
        out = PartitionResult()
        out.absorb(self)
        out.absorb(other)
        return out


CURVE_GRID = np.unique(np.round(np.logspace(0, math.log10(365 * 86_400), 60)))


def _analyze_partition(task) -> PartitionResult:
    post_path, comment_path, cfg, limelight_min, emit_path, want_reply_edges = task
    groups: dict[str, list[CommentRecord]] = {}
    for row in _read_spill(comment_path):
        c = CommentRecord(*row)
        groups.setdefault(c.link_id, []).append(c)
    posts = sorted((PostRecord(*row) for row in _read_spill(post_path)), key=lambda p: p.id)

    res = PartitionResult()
    cnt = res.counters
    emit = open(emit_path, "w", encoding="utf-8") if emit_path else None
    try:
        for post in posts:
            tree = build_thread(post, groups.pop(post.id, ()))
            m = post_metrics(tree)
            if want_reply_edges:
                res.reply_edges.extend(sorted(reply_edges(tree)))
            n = m.total_comments
            cnt["posts"] += 1
            cnt["timestamps_clamped"] += tree.clamped
            cnt["duplicate_comment_ids"] += tree.duplicates
            cnt["parent_cycles_broken"] += tree.cycle_breaks
            cnt["orphan_comments"] += len(tree.orphans)
            if tree.orphans:
                cnt["orphaned_branch_comments"] += orphaned_comment_count(tree)
            cnt["effective_comments"] += m.effective_comments
            res.comment_counts.append(n)

            mayfly = classify_mayfly(m, cfg)
            cyborg = classify_cyborg(m, cfg)
            success = is_successful(m, post.score, cfg)
            cnt[f"cyborg|{cyborg.value}|{success}"] += 1
            cnt[f"success|{success}"] += 1
            if n == 0:
                cnt["posts_zero_comments"] += 1
                cnt["mayfly|excluded"] += 1
            else:
                res.ages.append(m.age_seconds)
                res.age_totals.append(n)
                res.first_latencies.append(m.first_comment_latency_seconds)
                cnt["mayfly|yes" if mayfly else "mayfly|no"] += 1
                if n == 1:
                    cnt["posts_one_comment"] += 1
                    res.one_comment_ages.append(m.age_seconds)
                if is_fast(m.first_comment_latency_seconds, cfg):
                    res.fast_posts.append((m.age_seconds, cyborg.value, success))

            evo = classify_evolution(m.comment_offsets, cfg) if n else None
            if evo is not None:
                cls, t75 = evo
                res.evolution.append((post.id, n, t75, cls.value))
                offsets = np.asarray(m.comment_offsets)
                frac = np.searchsorted(offsets, CURVE_GRID, side="right") / n
                res.evolution_curves.extend((post.id, float(t), float(f)) for t, f in zip(CURVE_GRID, frac))
            elif n:
                cnt["evolution|excluded"] += 1

            ll = None
            if n >= limelight_min and tree.first_level:
                ll = limelight_score(tree)
                res.limelight.append((ll, cyborg.value))

            if emit is not None:
                row = asdict(m)
                row.update(
                    mayfly=mayfly,
                    cyborg_class=cyborg.value,
                    successful=success,
                    evolution_class=evo[0].value if evo else None,
                    t75_seconds=evo[1] if evo else None,
                    limelight_score=ll.score if ll else None,
                    orphan_comments=len(tree.orphans),
                )
                emit.write(json.dumps(row, separators=(",", ":")) + "\n")
    finally:
        if emit is not None:
            emit.close()
    return res


# ---------------------------------------------------------------------------
# bundle writing

def _clean(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return None if math.isnan(v) else v
    return v


class BundleWriter:
    def __init__(self, out_dir: Path, fmt: str):
        self.out_dir = out_dir
        self.fmt = fmt
        self.sections: dict[str, dict] = {}
        self._current: dict | None = None

    def begin(self, section: str):
        self._current = self.sections.setdefault(section, {"status": "ok", "files": []})

    def fail(self, section: str, exc: BaseException):
        entry = self.sections.setdefault(section, {"status": "ok", "files": []})
        entry["status"] = "error"
        entry["error"] = f"{type(exc).__name__}: {exc}"

    def table(self, name: str, columns: list[str], rows) -> Path:
        path = self.out_dir / f"{name}.{self.fmt}"
        n = 0
        with open(path, "w", encoding="utf-8", newline="") as fh:
            if self.fmt == "csv":
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(columns)
                for row in rows:
                    w.writerow(["" if v is None else v for v in map(_clean, row)])
                    n += 1
            else:
                for row in rows:
                    fh.write(json.dumps(dict(zip(columns, map(_clean, row))), separators=(",", ":")) + "\n")
                    n += 1
        self._current["files"].append({"path": path.name, "rows": n})
        return path

    def manifest(self, extra: dict) -> dict:
        doc = {**extra, "format": self.fmt, "sections": self.sections}
        (self.out_dir / "manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return doc


def _hist_rows(summary: dist.DistributionSummary):
    return list(summary.rows())


def _fit_row(quantity: str, fitter, values):
    try:
        f = fitter(values)
    except (dist.FitError, ValueError) as exc:
        return [quantity, None, None, None, None, None, None, None, None, None, f"error: {exc}"]
    return [quantity, f.family, f.exponent_or_mu, f.ccdf_exponent, f.sigma, f.xmin, f.stderr,
            f.ks_stat, f.n_tail, f.label(), "ok"]


@dataclass
class RunResult:
    exit_code: int
    manifest: dict
    stats: IngestStats


def run_analysis(config: AnalysisConfig) -> RunResult:
    for p in [*config.posts, *config.comments]:
        if not Path(p).is_file():
            raise InputError(f"input file not found: {p}")
    if not config.posts:
        raise InputError("no post dumps given")
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with tempfile.TemporaryDirectory(prefix="threadmetrics-", dir=config.work_dir) as tmp:
        tmp = Path(tmp)
        k = config.partitions
        stats = IngestStats()
        flt = CorpusFilter(config.period, stats)
        authors = AuthorAccumulator()

        post_spills = [_Spill(tmp / f"posts-{i:04d}.pkl") for i in range(k)]
        for post in read_posts(config.posts, stats, config.strip_prefixes):
            if flt.add_post(post):
                authors.add_post(post.author)
                post_spills[partition_of(post.id, k)].add(
                    (post.id, post.author, post.created_utc, post.declared_num_comments, post.score, ""))
        for s in post_spills:
            s.close()
        log.info("pass 1: %d posts kept of %d lines", stats.posts_kept, stats.post_lines)

        comment_spills = [_Spill(tmp / f"comments-{i:04d}.pkl") for i in range(k)]
        for c in read_comments(config.comments, stats, config.strip_prefixes):
            post = flt.add_comment(c)
            if post is None:
                continue
            authors.add_comment(c.author, post.author)
            comment_spills[partition_of(c.link_id, k)].add(
                (c.id, c.author, c.created_utc, c.link_id, c.parent_id, c.body, c.score))
        for s in comment_spills:
            s.close()
        del flt
        log.info("pass 2: %d comments kept of %d lines", stats.comments_kept, stats.comment_lines)

        tasks = [
            (post_spills[i].path, comment_spills[i].path, config.classifier, config.limelight_min_comments,
             tmp / f"postmetrics-{i:04d}.ndjson" if config.emit_post_metrics else None,
             config.edge_target == "parent-author")
            for i in range(k)
        ]
        result = PartitionResult()
        if config.threads > 1:
            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(config.threads) as pool:
                for part in pool.imap(_analyze_partition, tasks):
                    result.absorb(part)
        else:
            for task in tasks:
                result.absorb(_analyze_partition(task))
        log.info("pass 3: analyzed %d posts", result.counters["posts"])

        if config.emit_post_metrics:
            with open(config.emit_post_metrics, "wb") as dst:
                for task in tasks:
                    with open(task[4], "rb") as src:
                        shutil.copyfileobj(src, dst)

    if config.edge_target == "parent-author":
        authors.replace_edges(result.reply_edges)
    author_metrics = authors.finalize()
    writer = BundleWriter(out, config.fmt)
    report = _Report(config, stats, result, authors, author_metrics, writer)
    for section in config.sections:
        writer.begin(section)
        try:
            getattr(report, section)()
        except Exception as exc:  # one broken section must not sink the others
            log.exception("section %s failed", section)
            writer.fail(section, exc)

    if config.emit_author_metrics:
        with open(config.emit_author_metrics, "w", encoding="utf-8") as fh:
            for name in sorted(author_metrics):
                m = author_metrics[name]
                row = m.as_dict()
                row["category"] = categorize_author(m).value
                row["interaction_score"] = interaction_score(m.effective_comments_received, m.comments_on_others)
                fh.write(json.dumps(row, separators=(",", ":")) + "\n")
    if config.emit_limelight:
        with open(config.emit_limelight, "w", encoding="utf-8") as fh:
            for ll, cyborg in sorted(result.limelight, key=lambda t: t[0].post_id):
                fh.write(json.dumps({**asdict(ll), "cyborg_class": cyborg}, separators=(",", ":")) + "\n")

    cfg = config.classifier
    manifest = writer.manifest({
        "period": {"start": config.period.start if math.isfinite(config.period.start) else None,
                   "end": config.period.end if math.isfinite(config.period.end) else None},
        "classifier": {f.name: getattr(cfg, f.name) if not hasattr(getattr(cfg, f.name), "value")
                       else getattr(cfg, f.name).value for f in fields(cfg)},
        "limelight_min_comments": config.limelight_min_comments,
        "edge_target": config.edge_target,
        "exclude_authors": sorted(config.exclude_authors),
    })
    failed = any(s["status"] != "ok" for s in manifest["sections"].values())
    return RunResult(2 if failed else 0, manifest, stats)


class _Report:
    """Section writers; each method emits the tables for one section."""

    def __init__(self, config, stats, result, authors, author_metrics, writer):
        self.config = config
        self.stats = stats
        self.r = result
        self.acc = authors
        self.author_metrics = author_metrics
        self.w = writer

    def _kv(self, name, pairs):
        self.w.table(name, ["metric", "value"], pairs)

    def ingest(self):
        s, c = self.stats, self.r.counters
        posts = s.posts_kept
        counts = self.r.comment_counts
        commented = [n for n in counts if n > 0]
        pct = lambda a, b: 100.0 * a / b if b else None  # noqa: E731
        pairs = [
            ("posts", posts),
            ("posts_with_deleted_authors", s.posts_with_deleted_author),
            ("posts_with_deleted_authors_pct", pct(s.posts_with_deleted_author, posts)),
            ("posts_with_zero_comments", c["posts_zero_comments"]),
            ("posts_with_one_comment", c["posts_one_comment"]),
            ("comments_total", s.comment_lines - s.malformed_comment_lines),
            ("comments_on_period_posts", s.comments_kept),
            ("disconnected_posts_inferred", s.disconnected_posts),
            ("disconnected_posts_inferred_pct", pct(s.disconnected_posts, posts)),
            ("removed_comments", s.removed_comments),
            ("removed_comments_pct", pct(s.removed_comments, s.comments_kept)),
            ("mean_comments_per_post_all", sum(counts) / len(counts) if counts else None),
            ("mean_comments_per_post_commented", sum(commented) / len(commented) if commented else None),
            ("total_lines", s.total_lines),
            ("post_lines", s.post_lines),
            ("comment_lines", s.comment_lines),
            ("malformed_lines", s.malformed_lines),
            ("malformed_post_lines", s.malformed_post_lines),
            ("malformed_comment_lines", s.malformed_comment_lines),
            ("posts_dropped_out_of_period", s.posts_dropped_out_of_period),
            ("duplicate_post_lines", s.duplicate_post_lines),
            ("comments_dropped_out_of_period", s.comments_dropped_out_of_period),
            ("comments_dropped_missing_post", s.comments_dropped_missing_post),
            ("comments_with_deleted_author", s.comments_with_deleted_author),
            ("timestamps_clamped", c["timestamps_clamped"]),
            ("orphan_comments", c["orphan_comments"]),
            ("orphaned_branch_comments", c["orphaned_branch_comments"]),
            ("duplicate_comment_ids", c["duplicate_comment_ids"]),
            ("parent_cycles_broken", c["parent_cycles_broken"]),
        ]
        pairs += [(f"malformed_reason:{k}", v) for k, v in sorted(s.malformed_reasons.items())]
        self._kv("ingest_summary", pairs)
        self.w.table("disconnected_post_ids", ["post_id"], ([i] for i in sorted(s.disconnected_post_ids)))

    def _author_values(self, attr):
        skip = set(self.config.exclude_authors)
        return [getattr(m, attr) for name, m in sorted(self.author_metrics.items())
                if name not in skip and getattr(m, attr) > 0]

    def distributions(self):
        r = self.r
        per_post = [n for n in r.comment_counts if n > 0]
        posts_per_author = self._author_values("posts_created")
        comments_per_author = self._author_values("comments_made")
        for name, values in (("ccdf_comments_per_post", per_post),
                             ("ccdf_posts_per_author", posts_per_author),
                             ("ccdf_comments_per_author", comments_per_author)):
            rows = dist.ccdf(values).points if values else []
            self.w.table(name, ["value", "fraction"], rows)

        scan = lambda v: dist.scan_xmin_ks(v, discrete=self.config.discrete_fit)  # noqa: E731
        fits = [
            _fit_row("comments_per_post", scan, per_post),
            _fit_row("posts_per_author", scan, posts_per_author),
            _fit_row("comments_per_author", scan, comments_per_author),
            _fit_row("comments_per_author", dist.fit_lognormal_mle, comments_per_author),
        ]
        self.w.table("tail_fits", ["quantity", "family", "exponent_or_mu", "ccdf_exponent", "sigma", "xmin",
                                   "stderr", "ks_stat", "n_tail", "label", "status"], fits)

        hist_cols = ["bin_lo", "bin_hi", "count", "density"]
        ratio = self.config.age_bin_ratio
        self.w.table("pdf_age", hist_cols, _hist_rows(dist.log_binned(r.ages, ratio)))
        self.w.table("pdf_age_small", hist_cols, _hist_rows(dist.linear_binned(r.ages, 1.0, 0.0, 60.0)))
        self.w.table("pdf_age_one_comment", hist_cols, _hist_rows(dist.log_binned(r.one_comment_ages, ratio)))
        self.w.table("pdf_age_one_comment_small", hist_cols,
                     _hist_rows(dist.linear_binned(r.one_comment_ages, 1.0, 0.0, 600.0)))

        small = dist.linear_binned(r.ages, 1.0, 0.0, 60.0)
        one = np.asarray(r.one_comment_ages, dtype=float)
        mode_small = float(small.bin_edges[int(np.argmax(small.counts))]) if small.total_n else None
        pairs = [
            ("posts_with_comments", len(per_post)),
            ("mean_comments_per_post_all", float(np.mean(r.comment_counts)) if r.comment_counts else None),
            ("mean_comments_per_post_commented", float(np.mean(per_post)) if per_post else None),
            ("mean_posts_per_author", float(np.mean(posts_per_author)) if posts_per_author else None),
            ("mean_comments_per_author", float(np.mean(comments_per_author)) if comments_per_author else None),
            ("most_probable_age_below_60s", mode_small),
            ("one_comment_posts", int(one.size)),
            ("one_comment_age_at_most_600s_fraction", float(np.mean(one <= 600)) if one.size else None),
        ]
        self._kv("distribution_summary", pairs)

    def lifetimes(self):
        c = self.r.counters
        yes, no = c["mayfly|yes"], c["mayfly|no"]
        self._kv("mayfly_summary", [
            ("threshold_seconds", self.config.classifier.mayfly_threshold_s),
            ("posts_with_age", yes + no),
            ("mayfly", yes),
            ("not_mayfly", no),
            ("excluded_zero_comments", c["mayfly|excluded"]),
            ("mayfly_fraction", yes / (yes + no) if yes + no else None),
        ])

    def cyborg(self):
        c = self.r.counters
        get = lambda cls, ok: c[f"cyborg|{cls.value}|{ok}"]  # noqa: E731
        fast_posts = self.r.fast_posts
        cyb, short = CyborgClass.CYBORG_LIKE, CyborgClass.FAST_SAME_AUTHOR_SHORT
        notf = CyborgClass.NOT_FAST_SAME_AUTHOR
        self._kv("cyborg_table", [
            ("fast_first_comment_posts", len(fast_posts)),
            ("fast_same_author_posts", sum(get(x, ok) for x in (cyb, short) for ok in (True, False))),
            ("cyborg_like_posts", get(cyb, True) + get(cyb, False)),
            ("successful_cyborg_like_posts", get(cyb, True)),
            ("successful_non_cyborg_like_posts", get(short, True)),
            ("unsuccessful_cyborg_like_posts", get(cyb, False)),
            ("unsuccessful_non_cyborg_like_posts", get(short, False)),
            ("successful_not_fast_same_author_posts", get(notf, True)),
            ("unsuccessful_not_fast_same_author_posts", get(notf, False)),
            ("successful_posts", c["success|True"]),
            ("unsuccessful_posts", c["success|False"]),
        ])
        self.w.table("first_comment_latency_hist", ["bin_lo", "bin_hi", "count", "density"],
                     _hist_rows(dist.linear_binned(self.r.first_latencies, 1.0, 0.0, 60.0)))
        # age histogram of fast-first-comment posts with per-bin success fraction
        ages = np.asarray([a for a, _, _ in fast_posts], dtype=float)
        ok = np.asarray([s for _, _, s in fast_posts], dtype=bool)
        rows = []
        if ages.size:
            edges = dist.log_edges(float(ages.min()), float(ages.max()), self.config.age_bin_ratio)
            total = dist.histogram(ages, edges)
            good = dist.histogram(ages[ok], edges) if ok.any() else np.zeros_like(total)
            for lo, hi, t, g in zip(edges[:-1], edges[1:], total, good):
                rows.append((lo, hi, t, g, g / t if t else None))
        self.w.table("fast_post_age_success", ["bin_lo", "bin_hi", "count", "successful", "success_rate"], rows)

    def evolution(self):
        r = self.r
        counts = Counter(cls for _, _, _, cls in r.evolution)
        rows = [(cls, counts.get(cls, 0)) for cls in ("early_bloomer", "steady", "late_bloomer")]
        rows.append(("excluded_below_threshold", r.counters["evolution|excluded"]))
        self.w.table("evolution_counts", ["class", "count"], rows)
        self.w.table("evolution_posts", ["post_id", "n_comments", "t75_seconds", "class"], sorted(r.evolution))
        self.w.table("evolution_curves", ["post_id", "t_seconds", "fraction"],
                     sorted(r.evolution_curves, key=lambda t: (t[0], t[1])))
        grid_rows, avg_rows = [], []
        if r.ages:
            g = dist.density_grid_2d(list(zip(r.ages, r.age_totals)), ratio=self.config.age_bin_ratio)
            for i in range(len(g.x_edges) - 1):
                for j in range(len(g.y_edges) - 1):
                    if g.counts[i, j]:
                        grid_rows.append((i, j, g.x_edges[i], g.x_edges[i + 1], g.y_edges[j], g.y_edges[j + 1],
                                          g.counts[i, j]))
                avg_rows.append((g.x_edges[i], g.x_edges[i + 1], g.column_n[i], g.column_mean_y[i]))
        self.w.table("age_comments_grid", ["x_bin", "y_bin", "x_lo", "x_hi", "y_lo", "y_hi", "count"], grid_rows)
        self.w.table("age_comments_binned_avg", ["x_lo", "x_hi", "count", "mean_comments"], avg_rows)

    def limelight(self):
        results = sorted(self.r.limelight, key=lambda t: t[0].post_id)
        scores = np.asarray([ll.score for ll, _ in results], dtype=float)
        bins = 20
        hist = np.zeros(bins, dtype=int)
        for s in scores:
            hist[min(int(s * bins), bins - 1)] += 1
        self.w.table("limelight_hist", ["bin_lo", "bin_hi", "count"],
                     [(i / bins, (i + 1) / bins, hist[i]) for i in range(bins)])
        cdf_rows = []
        if scores.size:
            uniq, cnt = np.unique(scores, return_counts=True)
            cdf_rows = list(zip(uniq, np.cumsum(cnt) / scores.size))
        self.w.table("limelight_cdf", ["value", "fraction_at_most"], cdf_rows)
        n = len(results)
        pairs = [
            ("min_comments", self.config.limelight_min_comments),
            ("posts", n),
            ("fraction_score_at_least_0.25", float(np.mean(scores >= 0.25)) if n else None),
            ("hog_author_distinct_fraction",
             sum(1 for ll, _ in results if not ll.hog_author_is_post_author) / n if n else None),
        ]
        for cls in CyborgClass:
            sub = [ll for ll, c in results if c == cls.value]
            pairs.append((f"posts|{cls.value}", len(sub)))
            pairs.append((f"score_at_least_0.25|{cls.value}", sum(1 for ll in sub if ll.score >= 0.25)))
        self._kv("limelight_summary", pairs)

    def authors(self):
        metrics = self.author_metrics
        cats = category_counts(metrics)
        other = self.acc.other
        self._kv("author_table", [
            *cats.items(),
            ("deleted_author_posts", other.deleted_posts),
            ("deleted_author_comments", other.deleted_comments),
            ("comments_on_deleted_author_posts", other.comments_on_deleted_posts),
            ("self_comments", other.self_comments),
        ])
        hist, undefined = interaction_histogram(metrics)
        bins = len(hist)
        self.w.table("interaction_hist", ["bin_lo", "bin_hi", "count"],
                     [(i / bins, (i + 1) / bins, hist[i]) for i in range(bins)])
        scores = [interaction_score(m.effective_comments_received, m.comments_on_others) for m in metrics.values()]
        defined = [s for s in scores if s is not None]
        self._kv("interaction_summary", [
            ("defined", len(defined)),
            ("undefined", undefined),
            ("score_zero", sum(1 for s in defined if s == 0)),
            ("score_half", sum(1 for s in defined if s == 0.5)),
            ("score_one", sum(1 for s in defined if s == 1)),
        ])
        curve = comments_per_post_curve(metrics)
        self.w.table("comments_per_post_curve", ["ratio", "cumulative_fraction"],
                     list(zip(curve.ratios, curve.cumulative)))
        self._kv("comments_per_post_split", [
            ("authors_with_posts", curve.n_authors),
            ("below_unity", curve.below),
            ("at_unity", curve.at),
            ("above_unity", curve.above),
        ])
        rows = []
        for kind in ("in_degree", "out_degree"):
            values = [getattr(m, kind) for m in metrics.values() if getattr(m, kind) > 0]
            if values:
                rows.extend((kind, v, f) for v, f in dist.ccdf(values).points)
        self.w.table("degree_ccdf", ["kind", "value", "fraction"], rows)
