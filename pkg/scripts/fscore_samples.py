"""F-score of the greedy identifiers versus the number of samples at sigma_w2=0.1.

    python3 scripts/fscore_samples.py --seed 0 --out-dir runs/fscore_samples
"""

import argparse
from dataclasses import replace

from gsp_disconnect.harness import PRESETS, ExperimentConfig, run_fscore, write_outputs


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--out-dir", default="runs/fscore_samples")
    ap.add_argument("--trials", type=int)
    args = ap.parse_args()

    base = ExperimentConfig.from_dict(PRESETS["fscore_samples"])
    base = replace(base, seed=args.seed, trials=args.trials or base.trials)
    for kind in ("gmrf", "tikhonov", "heat"):
        cfg = replace(base, filter=kind)
        table = run_fscore(cfg)
        write_outputs(cfg, f"fscore_{kind}", {f"fscore_{kind}": table}, args.out_dir)
        for row in table.rows:
            print(f"{kind:9s} {row['method']:12s} {row['value']:>8g}  F = {row['f_score']:.3f} +/- {row['se']:.3f}")


if __name__ == "__main__":
    main()
