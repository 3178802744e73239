#!/usr/bin/env python3
"""Engine vs. reference-semantics sweep over seeded random logs.

Prints per-template activation / fulfillment / violation counts so a green
run can be seen to exercise every outcome; stops at the first disagreement
and writes its reproduction dump.

    python3 scripts/cross_validate.py --cases 2000 --seed 7
"""
from __future__ import annotations

import argparse
import sys
import time
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from mpdeclare.crossval import compare, random_cases
from mpdeclare.engine import check_trace_conformance
from mpdeclare.model import Template


@dataclass
class SweepConfig:
    cases: int = 500
    seed: int = 0
    dump: Path = Path("disagreement.json")


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--cases", type=int, default=SweepConfig.cases)
    p.add_argument("--seed", type=int, default=SweepConfig.seed)
    p.add_argument("--dump", type=Path, default=SweepConfig.dump)
    ns = p.parse_args(argv)
    cfg = SweepConfig(ns.cases, ns.seed, ns.dump)

    counts = {t: Counter() for t in Template}
    pairs = 0
    t0 = time.perf_counter()
    for log, model in random_cases(cfg.cases, cfg.seed):
        for d in compare(log, model):
            cfg.dump.write_text(d.dump())
            print(f"disagreement on {d.constraint.template.value}, events {d.events}; dump in {cfg.dump}")
            return 1
        for trace in log.traces:
            for c in model.constraints:
                r = check_trace_conformance(trace, c)
                counts[c.template].update(activations=len(r.activations), fulfillments=len(r.fulfillments),
                                          violations=len(r.violations))
        pairs += len(log) * len(model)

    print(f"{cfg.cases} logs, {pairs} trace/constraint pairs, no disagreement ({time.perf_counter() - t0:.1f} s)")
    print(f"{'template':26}{'activations':>12}{'fulfilled':>11}{'violated':>10}")
    for t, c in counts.items():
        print(f"{t.value:26}{c['activations']:>12}{c['fulfillments']:>11}{c['violations']:>10}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
