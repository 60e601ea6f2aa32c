"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 unknown detector/filter/method name,
4 hypothesis cap exceeded, 5 unreadable or malformed input file, 6 invalid
configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .detectors import (
    HypothesisCapError,
    enumerate_hypotheses,
    ml_scores,
)
from .graph import GraphError, apply_hypothesis, laplacian, load_graph, norm_edge, watts_strogatz
from .greedy import GreedyConfig, identify
from .harness import (
    DETECTORS,
    PRESETS,
    ConfigError,
    ExperimentConfig,
    Instance,
    UnknownNameError,
    detector_score,
    draw_instance,
    parse_name,
    run_fscore,
    run_roc,
    run_runtime,
    trial_seed,
    write_outputs,
)
from .signals import SignalBatch, SignalModel, generate, sample_covariance
from .spectral import FILTER_KINDS

EXIT_UNKNOWN_NAME = 3
EXIT_CAP = 4
EXIT_BAD_FILE = 5
EXIT_CONFIG = 6


class BadFileError(Exception):
    pass


def _csv_list(kind):
    def parse(text: str):
        return [kind(x) for x in text.split(",") if x.strip()]

    return parse


def _edge_list(text: str):
    out = []
    for item in text.split(","):
        if item.strip():
            i, j = item.split("-")
            out.append(norm_edge(int(i), int(j)))
    return out


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--preset", choices=sorted(PRESETS), help="named config preset applied before --config")
    p.add_argument("--seed", type=int)
    p.add_argument("--filter", dest="filter", help="|".join(FILTER_KINDS))
    p.add_argument("--alpha", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--sigma-x2", dest="sigma_x2", type=float)
    p.add_argument("--sigma-w2", dest="sigma_w2", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--n", dest="n_vertices", type=int, help="number of vertices of generated graphs")
    p.add_argument("--k-per-side", dest="k_per_side", type=int)
    p.add_argument("--p-rewire", dest="p_rewire", type=float)
    p.add_argument("--r", dest="r", type=int, help="number of truly disconnected edges")
    p.add_argument("--r-max", dest="r_max", type=int)
    p.add_argument("--graph", dest="graph_file", help="JSON graph file instead of a generated graph")


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    _add_model_flags(p)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--trials", type=int)
    p.add_argument("--beta", type=_csv_list(int), help="comma list; expands local_lrt/greedy to per-beta names")
    p.add_argument("--detectors", type=_csv_list(str))
    p.add_argument("--methods", type=_csv_list(str))
    p.add_argument("--threshold-grid", dest="threshold_grid", type=_csv_list(float))
    p.add_argument("--sweep", choices=["samples", "snr"])
    p.add_argument("--sweep-values", dest="sweep_values", type=_csv_list(float))
    p.add_argument("--n-sweep", dest="n_sweep", type=_csv_list(int))


_CONFIG_KEYS = (
    "seed", "filter", "alpha", "tau", "sigma_x2", "sigma_w2", "samples", "n_vertices", "k_per_side",
    "p_rewire", "r", "r_max", "graph_file", "trials", "detectors", "methods", "threshold_grid",
    "sweep", "sweep_values", "n_sweep",
)


def _expand_betas(names: list[str], betas: list[int] | None) -> list[str]:
    out = []
    for name in names:
        if name in ("local_lrt", "greedy"):
            for b in betas or [1]:
                out.append(f"{name}_b{b}")
        else:
            out.append(name)
    return out


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    data: dict = {}
    if getattr(args, "preset", None):
        data.update(PRESETS[args.preset])
    if getattr(args, "config", None):
        data.update(_read_json(args.config))
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    cfg = ExperimentConfig.from_dict(data)
    betas = getattr(args, "beta", None)
    cfg.detectors = _expand_betas(cfg.detectors, betas)
    cfg.methods = _expand_betas(cfg.methods, betas)
    if cfg.graph_file:
        _load_graph(cfg.graph_file)
    return cfg.validate()


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise BadFileError(f"cannot read {path}: {exc}") from exc


def _load_graph(path: str):
    try:
        return load_graph(path)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise BadFileError(f"cannot read graph {path}: {exc}") from exc


def _load_signals(path: str, n: int) -> SignalBatch:
    try:
        batch = SignalBatch.load_csv(path)
    except (OSError, ValueError) as exc:
        raise BadFileError(f"cannot read signals {path}: {exc}") from exc
    if batch.n != n:
        raise BadFileError(f"{path} has {batch.n} rows, graph has {n} vertices")
    return batch


def _require_seed(cfg: ExperimentConfig, args) -> None:
    if args.seed is None:
        raise ConfigError("--seed is required for this command")


def _instance(cfg: ExperimentConfig, args) -> Instance:
    """Graph and true removal: explicit ``--remove`` if given, else a seeded draw."""
    if getattr(args, "remove", None) is not None:
        g = _load_graph(cfg.graph_file) if cfg.graph_file else watts_strogatz(
            cfg.n_vertices, cfg.k_per_side, cfg.p_rewire, cfg.weight_lo, cfg.weight_hi,
            seed=trial_seed(cfg.seed, 0, 0))
        L0 = laplacian(g)
        try:
            Lk, hyp = apply_hypothesis(L0, args.remove)
        except (GraphError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        return Instance(L0, Lk, hyp)
    return draw_instance(cfg, 0)


def _data(cfg: ExperimentConfig, args, inst: Instance, truth_alt: bool) -> SignalBatch:
    if getattr(args, "signals", None):
        return _load_signals(args.signals, inst.L0.n)
    L = inst.Lk if truth_alt else inst.L0
    return generate(SignalModel(L, cfg.graph_filter(), cfg.sigma_x2, cfg.sigma_w2), cfg.samples,
                    trial_seed(cfg.seed, 0, 2, int(truth_alt)))


def _print(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def cmd_generate(args) -> int:
    cfg = build_config(args)
    _require_seed(cfg, args)
    inst = _instance(cfg, args)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    inst.L0.graph.save(out)
    summary = {"graph": str(out), "n": inst.L0.n, "edges": len(inst.L0.graph.edges),
               "removed": [list(e) for e in inst.hyp.removed_edges]}
    if args.signals_out:
        batch = _data(cfg, args, inst, truth_alt=not args.null)
        batch.save_csv(args.signals_out)
        summary["signals"] = args.signals_out
    _print(summary)
    return 0


def cmd_detect(args) -> int:
    cfg = build_config(args)
    parse_name(args.detector, DETECTORS)
    if not args.signals:
        _require_seed(cfg, args)
    inst = _instance(cfg, args)
    batch = _data(cfg, args, inst, truth_alt=not args.null)
    cfg.detectors = [args.detector]
    score = detector_score(args.detector, cfg, inst, batch, sample_covariance(batch))
    _print({"detector": args.detector, "hypothesis": [list(e) for e in inst.hyp.removed_edges],
            "statistic": score, "threshold": args.threshold, "decision": "H1" if score > args.threshold else "H0"})
    return 0


def cmd_identify(args) -> int:
    cfg = build_config(args)
    if not args.signals:
        _require_seed(cfg, args)
    inst = _instance(cfg, args)
    batch = _data(cfg, args, inst, truth_alt=True)
    betas = args.beta or []
    gcfg = GreedyConfig(r_max=cfg.r_max, mode="full") if not betas else GreedyConfig(
        r_max=cfg.r_max, mode="local", beta=betas[0])
    res = identify(sample_covariance(batch).matrix, inst.L0, cfg.graph_filter(), cfg.sigma_x2, cfg.sigma_w2, gcfg)
    _print({
        "method": "greedy_full" if not betas else f"greedy_b{betas[0]}",
        "edges": [list(e) for e in res.edges],
        "true_edges": [list(e) for e in inst.hyp.removed_edges] if not args.signals else None,
        "evaluations": res.evaluations,
        "trace": [r.to_dict() for r in res.trace],
    })
    return 0


def cmd_oracle_ml(args) -> int:
    cfg = build_config(args)
    if not args.signals:
        _require_seed(cfg, args)
    inst = _instance(cfg, args)
    batch = _data(cfg, args, inst, truth_alt=True)
    r_max = cfg.r_max or max(cfg.r, 1)
    hyps = enumerate_hypotheses(inst.L0.graph, r_max, cap=args.cap)
    res = ml_scores(sample_covariance(batch), hyps, inst.L0, cfg.graph_filter(), cfg.sigma_x2, cfg.sigma_w2)
    _print({"edges": [list(e) for e in hyps[res.index].removed_edges], "score": float(res.scores[res.index]),
            "hypotheses": len(hyps), "true_edges": [list(e) for e in inst.hyp.removed_edges]})
    return 0


def _experiment(args, name: str) -> int:
    cfg = build_config(args)
    _require_seed(cfg, args)
    if name == "roc":
        tables = {"roc": run_roc(cfg)}
    elif name == "fscore":
        tables = {"fscore": run_fscore(cfg)}
    else:
        timing, work = run_runtime(cfg)
        tables = {"runtime": timing, "runtime_work": work}
    for p in write_outputs(cfg, name, tables, args.out_dir):
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gsp-disconnect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a Watts-Strogatz graph (and optionally signals)")
    _add_model_flags(p)
    p.add_argument("--out", required=True, help="graph JSON path")
    p.add_argument("--signals-out", help="also write generated signals as CSV (rows = vertices)")
    p.add_argument("--remove", type=_edge_list, help="edges disconnected in the signals, e.g. 0-1,2-5")
    p.add_argument("--null", action="store_true", help="generate signals under the intact graph")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("detect", help="score one hypothesis with a named detector")
    _add_model_flags(p)
    p.add_argument("--detector", default="lrt")
    p.add_argument("--signals", help="CSV signal file; otherwise data are generated")
    p.add_argument("--remove", type=_edge_list, help="hypothesized removed edges, e.g. 0-1,2-5")
    p.add_argument("--null", action="store_true", help="generate data under the intact graph")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--beta", type=_csv_list(int))
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("identify", help="greedy identification (full, or local with --beta)")
    _add_model_flags(p)
    p.add_argument("--signals")
    p.add_argument("--remove", type=_edge_list)
    p.add_argument("--beta", type=_csv_list(int))
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("oracle-ml", help="exhaustive ML over all removal sets up to --r-max")
    _add_model_flags(p)
    p.add_argument("--signals")
    p.add_argument("--remove", type=_edge_list)
    p.add_argument("--cap", type=int, default=100_000)
    p.set_defaults(func=cmd_oracle_ml)

    for name, helptext in (("roc", "ROC table per detector"), ("fscore", "F-score sweep per method"),
                           ("runtime", "runtime versus N per method")):
        p = sub.add_parser(name, help=helptext)
        _add_experiment_flags(p)
        p.set_defaults(func=lambda a, n=name: _experiment(a, n))
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnknownNameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_NAME
    except HypothesisCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except BadFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_FILE
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
