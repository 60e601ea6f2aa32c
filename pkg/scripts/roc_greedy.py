"""ROC curves of detectors built from the greedy identifiers, against naive smoothness and BMSD.

    python3 scripts/roc_greedy.py --seed 0 --out-dir runs/roc_greedy
"""

import argparse
from dataclasses import replace

from gsp_disconnect.harness import PRESETS, ExperimentConfig, pd_at_pfa, run_roc, write_outputs


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--out-dir", default="runs/roc_greedy")
    ap.add_argument("--trials", type=int, default=200)
    args = ap.parse_args()

    base = replace(ExperimentConfig.from_dict(PRESETS["roc_greedy"]), seed=args.seed, trials=args.trials)
    for kind in ("gmrf", "tikhonov", "heat"):
        cfg = replace(base, filter=kind)
        table = run_roc(cfg)
        write_outputs(cfg, f"greedy_roc_{kind}", {f"greedy_roc_{kind}": table}, args.out_dir)
        for det in cfg.detectors:
            pfa, pd = table.column("pfa", detector=det), table.column("pd", detector=det)
            print(f"{kind:9s} {det:12s} Pd@0.1 = {pd_at_pfa(pfa, pd, 0.1):.3f}")


if __name__ == "__main__":
    main()
