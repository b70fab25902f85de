"""Build A-sharp for every cap list at generic q and check units and braiding."""
import argparse
import time
from dataclasses import dataclass

from braidleg.algebra import RANK, specialize_all_q
from braidleg.legendre import LegendreContext, LegendreWork, cap_lists, covariance_report
from braidleg.qcoeff import Context


@dataclass
class Config:
    s: int = 2
    r_max: int = 2
    compare_at_one: bool = True


def main(cfg: Config):
    start = time.perf_counter()
    work = LegendreWork(LegendreContext(Context.symbolic(cfg.s), cfg.r_max))
    lists = cap_lists(cfg.s, cfg.r_max)
    units = {RANK["Kappa"], RANK["Theta"]}
    for ls in lists:
        A = work.compute_A_hash(ls)
        left = any(g.rank in units for m in A.terms for g, _ in m)
        print(f"A#{list(ls)}: {len(A)} terms, units {'LEFT' if left else 'cancelled'}")
    bad = covariance_report(work, lists)
    print(f"covariance failures: {len(bad)}")
    for item in bad:
        print("  ", item)
    if cfg.compare_at_one:
        plain = LegendreWork(LegendreContext(Context.classical(cfg.s), cfg.r_max, units=False))
        diff = [ls for ls in lists if specialize_all_q(work.compute_A_hash(ls)) != plain.compute_A_hash(ls)]
        print(f"q=1 specialisation differs from the unit-free recursion on {len(diff)} lists")
    print(f"done in {time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--s", type=int, default=2)
    ap.add_argument("--r-max", type=int, default=2)
    ap.add_argument("--skip-q-one", action="store_true")
    a = ap.parse_args()
    main(Config(a.s, a.r_max, not a.skip_q_one))
