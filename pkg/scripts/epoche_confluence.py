"""How often do randomly scheduled rewrites reach the same normal form?"""
import argparse
import random
from dataclasses import dataclass

from braidleg.epoche import confluence_report, random_word
from braidleg.qcoeff import Context


@dataclass
class Config:
    s: int = 2
    words: int = 30
    schedules: int = 3
    leafcap: int = 6
    etacap: int = 4
    seed: int = 20240607


def main(cfg: Config):
    rng = random.Random(cfg.seed)
    words = [random_word(rng, cfg.s, 5, 3) for _ in range(cfg.words)]
    for label, ctx in (("generic q", Context.symbolic(cfg.s)), ("q=1", Context.classical(cfg.s))):
        rep = confluence_report(ctx, words, cfg.leafcap, cfg.etacap, cfg.schedules, cfg.seed)
        print(f"{label}: {rep['agree']}/{rep['runs']} schedules agree with the leftmost-first normal form")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--words", type=int, default=30)
    ap.add_argument("--schedules", type=int, default=3)
    ap.add_argument("--etacap", type=int, default=4)
    a = ap.parse_args()
    main(Config(words=a.words, schedules=a.schedules, etacap=a.etacap))
