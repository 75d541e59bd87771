import os
import unicodedata

ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
DATA = os.path.join(ROOT, "data")
FIXTURES = os.path.join(ROOT, "tests", "fixtures")


def normalize(line):
    return "".join(c for c in line if not c.isspace() and not unicodedata.category(c).startswith("P"))


def read_corpus(name):
    with open(os.path.join(DATA, "corpus", name), encoding="utf-8") as f:
        return [n for n in (normalize(l) for l in f) if n]


def primary_readings():
    best = {}
    with open(os.path.join(DATA, "lexicon.tsv"), encoding="utf-8") as f:
        for line in f:
            if not line.strip() or line.startswith("#"):
                continue
            ch, syl, w = line.rstrip("\n").split("\t")
            key = (-int(w), syl)
            if ch not in best or key < best[ch]:
                best[ch] = key
    return {ch: k[1] for ch, k in best.items()}
