"""Mean identification runtime versus graph size for the full and local greedy searches.

    python3 scripts/runtime_scaling.py --seed 0 --out-dir runs/runtime_scaling [--sigma-x2 0.1] [--samples 100000]

The default keeps sigma_x2 = 1; pass --sigma-x2 0.1 for the alternative setting.
"""

import argparse
from dataclasses import replace

from gsp_disconnect.harness import PRESETS, ExperimentConfig, run_runtime, write_outputs


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--out-dir", default="runs/runtime_scaling")
    ap.add_argument("--trials", type=int)
    ap.add_argument("--samples", type=int)
    ap.add_argument("--sigma-x2", type=float, default=1.0)
    args = ap.parse_args()

    cfg = ExperimentConfig.from_dict(PRESETS["runtime_scaling"])
    cfg = replace(cfg, seed=args.seed, trials=args.trials or cfg.trials, samples=args.samples or cfg.samples,
                  sigma_x2=args.sigma_x2)
    timing, work = run_runtime(cfg)
    write_outputs(cfg, "runtime", {"runtime": timing, "runtime_work": work}, args.out_dir)
    evals = {(r["n"], r["method"]): r["mean_evaluations"] for r in work.rows}
    for row in timing.rows:
        print(f"N={row['n']:4d} {row['method']:12s} {row['mean_s'] * 1e3:9.1f} ms  "
              f"({evals[(row['n'], row['method'])]:.0f} candidate evaluations)")


if __name__ == "__main__":
    main()
