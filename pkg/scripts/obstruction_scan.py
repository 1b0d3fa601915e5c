"""Decide the 2-disjoint obstruction and the {2,3} pair on growing Z^2 boxes.

For every D in the range the box [-D, D]^2 is searched with radii (2, 2), and
with (2, 3) up to ``--pair-max`` (the direct (2, 3) search at D = 4 needs more
memory than a small machine has; the (2, 2) verdict already settles it).
Each row records the verdict, node count and wall time.

    python scripts/obstruction_scan.py --diam-max 4 --out results/obstruction.csv
"""

import argparse
import csv
import sys
import time
from dataclasses import dataclass, field

from trasdim.solver import DEFAULT_BUDGET, DecisionInstance, ResultCache, decide_cover
from trasdim.spaces import WindowSpec, make_window


@dataclass
class ScanConfig:
    diam_min: int = 0
    diam_max: int = 4
    radii_sets: list = field(default_factory=lambda: [(2, 2), (2, 3)])
    pair_max: int = 3
    budget: int = DEFAULT_BUDGET
    cache_dir: str | None = None
    out: str | None = None


def run(cfg: ScanConfig):
    cache = ResultCache(cfg.cache_dir) if cfg.cache_dir else None
    rows = []
    for D in range(cfg.diam_min, cfg.diam_max + 1):
        W = make_window(WindowSpec("zn", max(D, 1), dims=2))
        for radii in cfg.radii_sets:
            if radii != (2, 2) and D > cfg.pair_max:
                continue
            t = time.perf_counter()
            cert = decide_cover(DecisionInstance(W, radii, D), cfg.budget, cache)
            rows.append({"D": D, "side": max(D, 1), "points": len(W), "radii": " ".join(map(str, radii)),
                         "verdict": cert.verdict.value, "nodes": cert.nodes,
                         "seconds": round(time.perf_counter() - t, 2)})
            print(rows[-1], file=sys.stderr, flush=True)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--diam-min", type=int, default=0)
    ap.add_argument("--diam-max", type=int, default=4)
    ap.add_argument("--pair-max", type=int, default=3)
    ap.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    ap.add_argument("--cache-dir")
    ap.add_argument("--out")
    cfg = ScanConfig(**vars(ap.parse_args()))
    rows = run(cfg)
    fh = open(cfg.out, "w", newline="") if cfg.out else sys.stdout
    w = csv.DictWriter(fh, list(rows[0]))
    w.writeheader()
    w.writerows(rows)


if __name__ == "__main__":
    main()
