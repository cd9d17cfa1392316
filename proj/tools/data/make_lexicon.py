#!/usr/bin/env python3
"""Write an English frequency lexicon (lemma<TAB>Zipf score) from wordfreq.

The wordfreq data is CC-BY-SA 4.0; the generated file carries the notice.
"""
import argparse
import re

import wordfreq

WORD = re.compile(r"^[a-z][a-z'-]*$")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True)
    ap.add_argument("--size", type=int, default=40000)
    args = ap.parse_args()

    rows = []
    for word in wordfreq.top_n_list("en", args.size):
        if WORD.match(word):
            rows.append((word, wordfreq.zipf_frequency(word, "en")))
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        f.write("# English word frequencies on the Zipf scale (log10 per billion words + 9).\n")
        f.write(f"# Generated by tools/data/make_lexicon.py from the wordfreq top {args.size} list.\n")
        f.write("# Data: wordfreq (Robyn Speer), CC-BY-SA 4.0, https://github.com/rspeer/wordfreq\n")
        for word, score in rows:
            f.write(f"{word}\t{score:.2f}\n")


if __name__ == "__main__":
    main()
