"""Write the 1,000-line public-schema fixture used by the format-conformance tests.

300 submission rows and 700 comment rows laid out like the monthly RS_/RC_
archives from early 2008: string timestamps in comments, submissions that
carry only ``id`` (no ``name``), deleted/removed sentinels, ``edited`` as
either false or an epoch, and the usual extra fields the reader ignores.

    python3 scripts/make_fixture.py tests/fixtures
"""
import json
import random
import sys
from pathlib import Path

SUBREDDITS = [("reddit.com", "t5_6"), ("programming", "t5_2fwo"), ("science", "t5_mouw"),
              ("politics", "t5_2cneq"), ("pics", "t5_2qh0u")]
WORDS = ("the of and to in is that it for on was with as be at this have from or one had by word but not what "
         "all were we when your can said there use an each which she do how their if will up other about out many "
         "then them these so some her would make like him into time has look two more write go see number no way "
         "could people my than first water been call who oil its now find long down day did get come made may part "
         "naïve café ünïcödé — “quoted” 日本語 emoji 😀 tab\there back\\slash").split(" ")


def text(rng, lo, hi):
    return " ".join(rng.choice(WORDS) for _ in range(rng.randint(lo, hi)))


def main(out_dir: str):
    rng = random.Random(2008)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = 1199145600
    authors = [f"{rng.choice(['alpha', 'kn0thing', 'spez', 'qgyh2', 'nix', 'Bo_'])}{i}" for i in range(60)]
    subs, comments = [], []
    for i in range(300):
        sub, sub_id = rng.choice(SUBREDDITS)
        sid = format(0x64a00 + i * 7, "x")
        created = start + rng.randint(0, 30 * 86400)
        is_self = rng.random() < 0.2
        row = {
            "archived": True, "author": rng.choice(authors + ["[deleted]"] * 3),
            "author_flair_css_class": None, "author_flair_text": None, "created": created + 28800,
            "created_utc": created, "domain": f"self.{sub}" if is_self else rng.choice(["nytimes.com", "bbc.co.uk",
                                                                                          "youtube.com"]),
            "downs": 0, "edited": False, "gilded": 0, "hide_score": False, "id": sid, "is_self": is_self,
            "media": None, "media_embed": {}, "num_comments": 0, "over_18": rng.random() < 0.05,
            "permalink": f"/r/{sub}/comments/{sid}/x/", "quarantine": False, "retrieved_on": 1440000000 + i,
            "saved": False, "score": rng.choice([1, 1, 0, 2, 5, 17, 230]), "secure_media": None,
            "secure_media_embed": {}, "selftext": text(rng, 0, 30) if is_self else "", "stickied": False,
            "subreddit": sub, "subreddit_id": sub_id, "thumbnail": "default", "title": text(rng, 2, 14),
            "ups": 1, "url": f"http://www.reddit.com/r/{sub}/comments/{sid}/x/",
        }
        if i % 3 == 0:
            row["name"] = "t3_" + sid  # newer re-dumps add the fullname
        subs.append(row)

    cseq = 0x1000
    per_post = {}
    for j in range(700):
        if j < 690:
            post = rng.choice(subs)
            link = "t3_" + post["id"]
            post_created = post["created_utc"]
        else:
            link = "t3_" + format(0x10000 + j, "x")  # post outside this sample
            post_created = start
        cseq += rng.randint(1, 9)
        cid = "c" + format(cseq, "x")
        siblings = per_post.setdefault(link, [])
        parent = link if not siblings or rng.random() < 0.4 else "t1_" + rng.choice(siblings)
        created = post_created + rng.choice([rng.randint(1, 120), rng.randint(60, 86400), rng.randint(0, 9 * 86400)])
        body = rng.choice([text(rng, 1, 60)] * 8 + ["[removed]", "[deleted]"])
        author = "[deleted]" if body == "[deleted]" else rng.choice(authors + ["[deleted]"])
        comments.append({
            "archived": True, "author": author, "author_flair_css_class": None, "author_flair_text": None,
            "body": body, "controversiality": 0, "created_utc": str(created), "distinguished": None,
            "downs": 0, "edited": rng.choice([False] * 9 + [created + 300]), "gilded": 0, "id": cid,
            "link_id": link, "name": "t1_" + cid, "parent_id": parent,
            "retrieved_on": 1425000000 + j, "score": rng.randint(-4, 40), "score_hidden": False,
            "subreddit": "reddit.com", "subreddit_id": "t5_6", "ups": 1,
        })
        siblings.append(cid)
    counts = {}
    for c in comments:
        counts[c["link_id"]] = counts.get(c["link_id"], 0) + 1
    for s in subs:
        s["num_comments"] = counts.get("t3_" + s["id"], 0)
    rng.shuffle(comments)

    with open(out / "RS_2008-01_sample.ndjson", "w", encoding="utf-8") as fh:
        for row in subs:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    with open(out / "RC_2008-01_sample.ndjson", "w", encoding="utf-8") as fh:
        for row in comments:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures")
