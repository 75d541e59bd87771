#!/usr/bin/env python3
"""Regenerates the bundled pinyin inventory and pronunciation lexicon.

Reading frequencies come from the jieba word-frequency dictionary, with each
word romanized by pypinyin (phrase-aware). Only needed when refreshing data/;
the C++ build never runs this.

    pip install pypinyin jieba
    python3 tools/make_assets.py data
"""
import argparse
import collections
import os
import sys

import jieba
from pypinyin import Style, lazy_pinyin, pinyin_dict

INITIALS = ["zh", "ch", "sh", "b", "p", "m", "f", "d", "t", "n", "l", "g",
            "k", "h", "j", "q", "x", "r", "z", "c", "s", "y", "w"]
FINALS = {"a", "o", "e", "i", "u", "v", "ai", "ei", "ao", "ou", "an", "en",
          "ang", "eng", "ong", "er", "ia", "ie", "iao", "iu", "ian", "in",
          "iang", "ing", "iong", "ua", "uo", "uai", "ui", "uan", "un", "uang",
          "ue", "ve"}

TOP_CHARS = 1000       # always in the lexicon
INVENTORY_CHARS = 6000  # characters whose readings define the inventory
MIN_SHARE = 0.05       # secondary readings below this share are dropped


def is_hanzi(ch):
    return 0x4E00 <= ord(ch) <= 0x9FFF


def valid(syl):
    if len(syl) < 2 or syl[-1] not in "12345":
        return False
    body = syl[:-1]
    for ini in INITIALS:
        if body.startswith(ini):
            return body[len(ini):] in FINALS
    return body in FINALS


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out", help="data directory")
    ap.add_argument("--words", type=int, default=150000)
    args = ap.parse_args()

    dict_path = os.path.join(os.path.dirname(jieba.__file__), "dict.txt")
    words = []
    with open(dict_path, encoding="utf-8") as f:
        for line in f:
            parts = line.split()
            if len(parts) >= 2 and all(is_hanzi(c) for c in parts[0]):
                words.append((parts[0], int(parts[1])))
    words.sort(key=lambda w: (-w[1], w[0]))
    words = words[: args.words]

    char_freq = collections.Counter()
    reading = collections.defaultdict(collections.Counter)
    for word, freq in words:
        sylls = lazy_pinyin(word, style=Style.TONE3, neutral_tone_with_five=True)
        if len(sylls) != len(word):
            continue
        for ch, syl in zip(word, sylls):
            char_freq[ch] += freq
            if valid(syl):
                reading[ch][syl] += freq

    def readings_of(ch):
        counts = reading.get(ch)
        if not counts:
            return []
        total = sum(counts.values())
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        return [(s, w) for i, (s, w) in enumerate(ranked)
                if i == 0 or w >= MIN_SHARE * total]

    by_freq = [c for c, _ in sorted(char_freq.items(), key=lambda kv: (-kv[1], kv[0]))
               if readings_of(c)]

    inventory = set()
    best_char = {}
    for ch in by_freq[:INVENTORY_CHARS]:
        for syl, _ in readings_of(ch):
            inventory.add(syl)
            best_char.setdefault(syl, ch)

    corpus_chars = set()
    corpus_dir = os.path.join(args.out, "corpus")
    for name in sorted(os.listdir(corpus_dir)):
        with open(os.path.join(corpus_dir, name), encoding="utf-8") as f:
            corpus_chars.update(c for c in f.read() if is_hanzi(c))
    missing = sorted(c for c in corpus_chars if not readings_of(c))
    if missing:
        sys.exit("corpus characters without readings: " + "".join(missing))

    chosen = set(by_freq[:TOP_CHARS]) | corpus_chars | set(best_char.values())
    for ch in chosen:
        inventory.update(s for s, _ in readings_of(ch))

    with open(os.path.join(args.out, "inventory.txt"), "w", encoding="utf-8") as f:
        f.write("# tonal pinyin syllables, tone 5 = neutral, v = u-umlaut\n")
        f.write("# derived from readings of the %d most frequent characters\n"
                % INVENTORY_CHARS)
        for syl in sorted(inventory):
            f.write(syl + "\n")

    rows = 0
    with open(os.path.join(args.out, "lexicon.tsv"), "w", encoding="utf-8") as f:
        for ch in sorted(chosen):
            for syl, w in readings_of(ch):
                f.write("%s\t%s\t%d\n" % (ch, syl, w))
                rows += 1
    print("inventory %d tonal units, lexicon %d characters / %d readings"
          % (len(inventory), len(chosen), rows))


if __name__ == "__main__":
    main()
