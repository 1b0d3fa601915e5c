"""Ord of the solver-backed truncated A for a few windows.

Undecided memberships (budget exhausted) turn the value into an interval;
the JSON output lists every verdict so the bracket can be audited.

    python scripts/truncated_ord.py --budget 2000000 --out results/truncated_ord.json
"""

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

from trasdim.borst import TruncatedA, ord_truncated_A
from trasdim.solver import DEFAULT_BUDGET
from trasdim.spaces import WindowSpec, make_window


@dataclass
class Case:
    spec: WindowSpec
    diameter: int
    r_max: int


@dataclass
class OrdConfig:
    cases: list = field(default_factory=lambda: [
        Case(WindowSpec("zn", 8, dims=2), 3, 3),
        Case(WindowSpec("lomega", 8, level_cap=2), 3, 3),
        Case(WindowSpec("zn", 8, dims=2), 3, 4),
    ])
    budget: int = DEFAULT_BUDGET


def run(cfg: OrdConfig):
    out = []
    for case in cfg.cases:
        t = time.perf_counter()
        tA = TruncatedA(make_window(case.spec), case.diameter, case.r_max, budget=cfg.budget)
        value = ord_truncated_A(tA)
        out.append({"window": case.spec.to_json(), "diameter": case.diameter, "r_max": case.r_max,
                    "ordinal": str(value),
                    "verdicts": {" ".join(map(str, sorted(s))): v.value
                                 for s, v in sorted(tA.verdicts.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))},
                    "seconds": round(time.perf_counter() - t, 1)})
        print(json.dumps(out[-1]), file=sys.stderr, flush=True)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    ap.add_argument("--out")
    args = ap.parse_args()
    text = json.dumps(run(OrdConfig(budget=args.budget)), indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
