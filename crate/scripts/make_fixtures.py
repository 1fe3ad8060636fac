#!/usr/bin/env python3
"""Regenerates the synthetic test fixtures checked into the repository.

sentiment_2000.csv  polarity-labeled tweets in the six-column
                    (polarity,id,date,query,user,text) corpus layout
trolls.csv          troll-tweet rows with the dataset's header columns

Both are synthetic: vocabulary-driven templates with label noise, seeded so
that reruns are byte-identical.
"""
import csv
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

POSITIVE = """love great happy awesome thanks good best amazing fun excited beautiful
nice glad enjoy wonderful lovely cool yay congrats welcome pleased smile laugh perfect
sweet proud blessed fantastic hope win vip nominated brilliant delicious sunshine hug
cheers grateful party""".split()
NEGATIVE = """sad hate bad awful sick tired miss sorry worst hurt cry ugh terrible angry
lost broken fail boring lonely pain crashing upset annoyed stupid headache bored wrong
late alone sucks disappointed poor died fever stuck worried horrible cancelled""".split()
NEUTRAL = """work today going home time day night morning school friend movie watch twitter
phone lunch dinner weekend week house car music song game class office bed coffee
tomorrow tonight back still got new want think know really see people life city train
bus book show video blog email exam shopping mom dad sister brother dog cat weather
summer monday friday birthday trip beach tea""".split()

DAYS = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"]


def tweet(rng, own, other):
    words = rng.sample(NEUTRAL, rng.randint(3, 8))
    words += rng.sample(own, rng.randint(1, 2))
    if rng.random() < 0.3:
        words.append(rng.choice(other))
    rng.shuffle(words)
    text = " ".join(words)
    if rng.random() < 0.3:
        text = "@user%d %s" % (rng.randint(1, 999), text)
    if rng.random() < 0.4:
        text += rng.choice(["!", "!!", ".", " :)", " :(", "..."])
    return text


def sentiment(path, n_per_class=1000, noise=0.08, seed=20090406):
    rng = random.Random(seed)
    rows = []
    for i in range(2 * n_per_class):
        positive = i % 2 == 0
        own, other = (POSITIVE, NEGATIVE) if positive else (NEGATIVE, POSITIVE)
        text = tweet(rng, own, other)
        label = positive if rng.random() >= noise else not positive
        date = "%s Apr %02d %02d:%02d:%02d PDT 2009" % (
            rng.choice(DAYS), rng.randint(1, 30), rng.randint(0, 23), rng.randint(0, 59), rng.randint(0, 59))
        rows.append(["4" if label else "0", str(1467810000 + i), date, "NO_QUERY", "user%d" % i, text])
    with open(path, "w", newline="") as f:
        csv.writer(f, quoting=csv.QUOTE_ALL, lineterminator="\n").writerows(rows)


RIGHT = """trump maga america great again border wall jobs military obama hillary crooked
islam terrorism gun vote patriot conservative country americans economy""".split()
LEFT = """blacklivesmatter police shooting racism women rights equality justice protest
music hiphop cop racist civil hillary bernie students community black""".split()
SHARED = """news today people watch video breaking report says world state city live
time week first new""".split()


def trolls(path, n=400, seed=2018):
    rng = random.Random(seed)
    header = ["external_author_id", "author", "content", "region", "language",
              "publish_date", "harvested_date", "following", "followers",
              "updates", "post_type", "account_type", "retweet", "account_category"]
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for i in range(n):
            r = rng.random()
            if r < 0.45:
                cat, own = "RightTroll", RIGHT
            elif r < 0.85:
                cat, own = "LeftTroll", LEFT
            else:
                cat, own = rng.choice(["NewsFeed", "HashtagGamer", "Fearmonger"]), SHARED
            lang = "English" if rng.random() < 0.9 else rng.choice(["Russian", "German"])
            words = rng.sample(own, rng.randint(4, 7)) + rng.sample(SHARED, rng.randint(1, 3))
            rng.shuffle(words)
            text = " ".join(words)
            if rng.random() < 0.3:
                text = "#" + text
            if rng.random() < 0.2:
                text += ", via @someone"
            year = rng.choice([2015, 2016, 2016, 2017])
            date = "%d/%d/%d %d:%02d" % (rng.randint(1, 12), rng.randint(1, 28), year,
                                         rng.randint(0, 23), rng.randint(0, 59))
            w.writerow([str(1000 + i), "acct%d" % (i % 37), text, "United States", lang,
                        date, date, "100", "200", "10", "", "Right" if cat == "RightTroll" else "Left",
                        "0", cat])


if __name__ == "__main__":
    sentiment(ROOT / "crates/core/tests/fixtures/sentiment_2000.csv")
    trolls(ROOT / "crates/cli/tests/fixtures/trolls.csv")
