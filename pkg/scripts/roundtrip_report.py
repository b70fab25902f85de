"""Compose the inverse map with the forward map on A-caps and report what comes back."""
import argparse
import random
from dataclasses import dataclass
from fractions import Fraction

from braidleg.algebra import ABar, ACap, BBar, Element, H, format_element
from braidleg.classical import mat_inverse
from braidleg.errors import DegenerateHessianError
from braidleg.legendre import LegendreContext, cap_lists, reduce_hessian_s1, roundtrip
from braidleg.qcoeff import Context


@dataclass
class Config:
    r_max: int = 2
    points: int = 3
    seed: int = 20240607


def variety_point(rng, s):
    """Random h, b-bar and the a-bar forced by the Hessian relation."""
    while True:
        hm = [[Fraction(rng.randint(-3, 3)) for _ in range(s)] for _ in range(s)]
        b = [[Fraction(rng.randint(-3, 3)) for _ in range(s)] for _ in range(s)]
        for i in range(s):
            for j in range(i):
                b[i][j] = b[j][i]
        M = [[sum(hm[i][a] * b[a][k] * hm[j][k] for a in range(s) for k in range(s)) for j in range(s)]
             for i in range(s)]
        try:
            Mi = mat_inverse(M)
        except DegenerateHessianError:
            continue
        vals = {H(a, i): hm[i - 1][a - 1] for a in range(1, s + 1) for i in range(1, s + 1)}
        for i in range(1, s + 1):
            for j in range(i, s + 1):
                vals[ABar(i, j)] = -Mi[i - 1][j - 1]
                vals[BBar(i, j)] = b[i - 1][j - 1]
        return vals


def main(cfg: Config):
    for label, ctx in (("q=1", Context.classical(1)), ("generic q", Context.symbolic(1))):
        print(f"s=1, {label}, everything symbolic")
        for ls, e in roundtrip(cap_lists(1, cfg.r_max), LegendreContext(ctx, cfg.r_max)).items():
            red = reduce_hessian_s1(e)
            ok = red == Element.gen(ACap(ls), ctx)
            print(f"  {list(ls)}: {len(e)} raw terms -> {format_element(red)} {'ok' if ok else 'MISMATCH'}")
    rng = random.Random(cfg.seed)
    ctx = Context.classical(2)
    for k in range(cfg.points):
        rt = roundtrip(cap_lists(2, cfg.r_max), LegendreContext(ctx, cfg.r_max, "classical", variety_point(rng, 2)))
        bad = [ls for ls, e in rt.items() if e != Element.gen(ACap(ls), ctx)]
        print(f"s=2, q=1, numeric point {k}: {len(rt) - len(bad)}/{len(rt)} identities")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--r-max", type=int, default=2)
    ap.add_argument("--points", type=int, default=3)
    ap.add_argument("--seed", type=int, default=20240607)
    a = ap.parse_args()
    main(Config(a.r_max, a.points, a.seed))
