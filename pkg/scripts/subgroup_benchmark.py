"""Refine groups on registrar-shaped generated instances and time each run.

    python scripts/subgroup_benchmark.py --seeds 0-19
"""

import argparse
import time
from dataclasses import dataclass

from timetabling.gen import generate, registrar_shape
from timetabling.subgroup import run_subgroup


@dataclass
class Config:
    first: int = 0
    last: int = 19
    max_iter: int = 200


def seed_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("-")
    return int(lo), int(hi or lo)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=seed_range, default=(0, 19))
    ap.add_argument("--max-iter", type=int, default=200)
    args = ap.parse_args()
    cfg = Config(*args.seeds, max_iter=args.max_iter)

    print("seed,groups,sections,iterations,final_groups,z0,seconds")
    total = 0.0
    for seed in range(cfg.first, cfg.last + 1):
        inst = generate(registrar_shape(seed))
        t0 = time.perf_counter()
        res = run_subgroup(inst, max_iter=cfg.max_iter)
        secs = time.perf_counter() - t0
        total += secs
        print(f"{seed},{len(inst.groups)},{len(inst.sections)},{res.iterations},"
              f"{len(res.final_groups)},{res.z_trace[0]},{secs:.2f}", flush=True)
    print(f"# total {total:.1f}s")


if __name__ == "__main__":
    main()
