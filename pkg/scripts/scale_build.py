"""Build (not solve) a model at registrar scale and compare with the count formulas.

    python scripts/scale_build.py --seed 0 --out /tmp/scale.lp
"""

import argparse
import time
from dataclasses import dataclass
from pathlib import Path

from timetabling.gen import generate, scale_shape
from timetabling.mipcore import write_lp
from timetabling.subgroup import run_subgroup
from timetabling.tip import build_tip, tip_counts

REFERENCE = {"rows": 23294, "columns": 28926, "nonzeros": 268350}


@dataclass
class Config:
    seed: int = 0
    out: Path | None = None


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()
    cfg = Config(args.seed, args.out)

    inst = generate(scale_shape(cfg.seed))
    sg = run_subgroup(inst)
    refined = inst.with_groups(sg.final_groups)
    print(f"{len(inst.groups)} groups -> {len(refined.groups)}, {len(inst.sections)} sections, "
          f"{len(inst.professors)} professors, {len(inst.rooms)} rooms")
    t0 = time.perf_counter()
    model, _ = build_tip(refined)
    text = write_lp(model)
    secs = time.perf_counter() - t0
    want = tip_counts(refined)
    got = {"rows": len(model.constraints), "columns": len(model.variables),
           "nonzeros": model.num_nonzeros}
    for key, value in got.items():
        print(f"{key:>9}: {value:>8}  formula {getattr(want, key):>8}  "
              f"reference {REFERENCE[key]:>8}")
    print(f"built and written in {secs:.1f}s, {len(text) / 1e6:.1f} MB")
    if cfg.out:
        cfg.out.write_text(text)


if __name__ == "__main__":
    main()
