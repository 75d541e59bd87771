"""Checks the hand tallies in cer_suite.tsv with a memoized recursive edit distance."""
import os
import sys
from functools import lru_cache

from common import FIXTURES


def distance(r, h):
    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0 or j == 0:
            return i + j
        return min(d(i - 1, j - 1) + (r[i - 1] != h[j - 1]), d(i - 1, j) + 1, d(i, j - 1) + 1)
    return d(len(r), len(h))


ok = True
errors = ref_len = 0
with open(os.path.join(FIXTURES, "cer_suite.tsv"), encoding="utf-8") as f:
    for line in f:
        if line.startswith("#"):
            continue
        ref, hyp, s, i, dl = line.rstrip("\n").split("\t")
        hyp = "" if hyp == "-" else hyp
        s, i, dl = int(s), int(i), int(dl)
        dist = distance(ref, hyp)
        if dist != s + i + dl or len(hyp) - len(ref) != i - dl:
            print("tally mismatch:", ref, hyp, dist, s, i, dl)
            ok = False
        errors += dist
        ref_len += len(ref)
print(f"errors={errors} ref_len={ref_len} cer={errors / ref_len!r}")
sys.exit(0 if ok else 1)
