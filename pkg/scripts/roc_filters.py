"""ROC curves of the LRT family against the smoothness baselines, one table per filter.

    python3 scripts/roc_filters.py --seed 0 --out-dir runs/roc_filters [--full]
"""

import argparse
from dataclasses import replace

from gsp_disconnect.harness import PRESETS, ExperimentConfig, pd_at_pfa, run_roc, write_outputs


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--out-dir", default="runs/roc_filters")
    ap.add_argument("--trials", type=int)
    ap.add_argument("--full", action="store_true", help="N=50 and 1000 trials instead of the desk defaults")
    args = ap.parse_args()

    base = ExperimentConfig.from_dict({**PRESETS["roc_filters"], **(PRESETS["full"] if args.full else {})})
    base = replace(base, seed=args.seed, trials=args.trials or base.trials,
                   detectors=["lrt", "local_lrt_b0", "local_lrt_b1", "naive", "smsd"])
    for kind in ("gmrf", "tikhonov", "heat"):
        cfg = replace(base, filter=kind)
        table = run_roc(cfg)
        write_outputs(cfg, f"roc_{kind}", {f"roc_{kind}": table}, args.out_dir)
        for det in cfg.detectors:
            pfa, pd = table.column("pfa", detector=det), table.column("pd", detector=det)
            print(f"{kind:9s} {det:13s} Pd@0.1 = {pd_at_pfa(pfa, pd, 0.1):.3f}")


if __name__ == "__main__":
    main()
