"""Seeded Monte-Carlo experiments: ROC curves, F-score sweeps and runtimes.

Trial ``t`` draws its graph, its true disconnection set and its data from
independent streams keyed by ``(seed, t, purpose, ...)``, so tables do not
depend on evaluation order and re-runs with the same seed are identical.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
import platform
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .detectors import bmsd, local_lrt, lrt_statistic, naive_smoothness, smsd
from .graph import (
    DisconnectionHypothesis,
    Edge,
    LaplacianView,
    apply_hypothesis,
    laplacian,
    load_graph,
    watts_strogatz,
)
from .greedy import GreedyConfig, identify
from .scoring import penalized_score
from .signals import SignalModel, generate, sample_covariance
from .spectral import FILTER_KINDS, GraphFilter

DETECTORS = ("lrt", "local_lrt", "naive", "smsd", "bmsd", "constant", "greedy_full", "greedy")
METHODS = ("greedy_full", "greedy")


class ConfigError(ValueError):
    pass


class UnknownNameError(ConfigError):
    pass


@dataclass
class ExperimentConfig:
    n_vertices: int = 20
    k_per_side: int = 2
    p_rewire: float = 0.1
    weight_lo: float = 0.1
    weight_hi: float = 5.0
    graph_file: str | None = None
    filter: str = "heat"
    alpha: float = 0.5
    tau: float = 0.2
    sigma_x2: float = 1.0
    sigma_w2: float = 0.5
    samples: int = 100
    r: int = 5
    trials: int = 500
    seed: int = 0
    detectors: list[str] = field(
        default_factory=lambda: ["lrt", "local_lrt_b0", "local_lrt_b1", "naive", "smsd", "bmsd"]
    )
    methods: list[str] = field(default_factory=lambda: ["greedy_full", "greedy_b0", "greedy_b1"])
    r_max: int | None = None
    threshold_grid: list[float] | None = None
    band_b: int | None = None
    sweep: str = "samples"
    sweep_values: list[float] = field(default_factory=lambda: [100, 1000, 10000])
    n_sweep: list[int] = field(default_factory=lambda: [20, 50, 100])

    def validate(self) -> "ExperimentConfig":
        if self.filter not in FILTER_KINDS:
            raise UnknownNameError(f"unknown filter {self.filter!r}")
        for name in self.detectors:
            parse_name(name, DETECTORS)
        for name in self.methods:
            parse_name(name, METHODS)
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if self.r < 0:
            raise ConfigError("r must be >= 0")
        if self.sigma_x2 <= 0 or self.sigma_w2 < 0:
            raise ConfigError("need sigma_x2 > 0 and sigma_w2 >= 0")
        if self.sweep not in ("samples", "snr"):
            raise ConfigError(f"sweep must be 'samples' or 'snr', got {self.sweep!r}")
        if not self.sweep_values or not self.n_sweep or not self.detectors or not self.methods:
            raise ConfigError("sweeps and name lists must be nonempty")
        if self.r_max is not None and self.r_max < 1:
            raise ConfigError("r_max must be >= 1")
        return self

    def graph_filter(self) -> GraphFilter:
        return GraphFilter(self.filter, alpha=self.alpha, tau=self.tau)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        return cls(**data)

    def sha256(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


PRESETS: dict[str, dict] = {
    "desk": {},
    "full": {"n_vertices": 50, "trials": 1000},
    "roc_filters": {"sigma_w2": 2.0, "samples": 100, "r": 5},
    "roc_greedy": {"sigma_w2": 0.5, "samples": 100, "r": 5,
                   "detectors": ["greedy_full", "greedy_b0", "greedy_b1", "naive", "bmsd"]},
    "fscore_snr": {"sweep": "snr", "sweep_values": [1, 10, 100], "samples": 1000, "r": 5, "trials": 100},
    "fscore_samples": {"sweep": "samples", "sweep_values": [100, 1000, 10000], "sigma_w2": 0.1, "r": 5, "trials": 100},
    "runtime_scaling": {"n_sweep": [20, 50, 100], "samples": 10000, "r": 2, "trials": 5, "sigma_w2": 0.1,
                        "methods": ["greedy_full", "greedy_b0", "greedy_b1"]},
}


def parse_name(name: str, allowed: Sequence[str]) -> tuple[str, int | None]:
    """``'local_lrt_b1'`` -> ``('local_lrt', 1)``; plain names carry no beta."""
    m = re.fullmatch(r"(local_lrt|greedy)_b(\d+)", name)
    if m and m.group(1) in allowed:
        return m.group(1), int(m.group(2))
    if name in allowed and name not in ("local_lrt", "greedy"):
        return name, None
    raise UnknownNameError(f"unknown detector/method {name!r}")


def trial_seed(seed: int, *keys: int) -> int:
    """64-bit seed for the stream identified by ``keys`` under ``seed``."""
    state = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in keys)).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


@dataclass(eq=False)
class Instance:
    L0: LaplacianView
    Lk: LaplacianView
    hyp: DisconnectionHypothesis

    @property
    def true_edges(self) -> set[Edge]:
        return set(self.hyp.removed_edges)


def draw_removal(L0: LaplacianView, r: int, seed: int, max_tries: int = 1000) -> list[Edge]:
    """Uniform size-``r`` edge subset whose removal keeps the graph connected."""
    pairs = L0.graph.edge_pairs
    if r > len(pairs):
        raise ConfigError(f"cannot remove {r} of {len(pairs)} edges")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        pick = sorted(rng.choice(len(pairs), size=r, replace=False).tolist())
        chosen = [pairs[p] for p in pick]
        Lk, _ = apply_hypothesis(L0, chosen)
        if Lk.connected:
            return chosen
    raise ConfigError(f"no connected removal of {r} edges after {max_tries} draws")


def draw_instance(cfg: ExperimentConfig, trial: int, n_vertices: int | None = None) -> Instance:
    if cfg.graph_file:
        g = load_graph(cfg.graph_file)
    else:
        g = watts_strogatz(
            n_vertices or cfg.n_vertices, cfg.k_per_side, cfg.p_rewire,
            cfg.weight_lo, cfg.weight_hi, seed=trial_seed(cfg.seed, trial, 0),
        )
    L0 = laplacian(g)
    removed = draw_removal(L0, cfg.r, trial_seed(cfg.seed, trial, 1))
    Lk, hyp = apply_hypothesis(L0, removed)
    return Instance(L0, Lk, hyp)


def draw_data(cfg, L: LaplacianView, samples: int, sigma_w2: float, seed: int):
    batch = generate(SignalModel(L, cfg.graph_filter(), cfg.sigma_x2, sigma_w2), samples, seed)
    return batch, sample_covariance(batch)


def _identify(name: str, beta: int | None, s_y, L0, cfg, sigma_w2) -> list[Edge]:
    gcfg = GreedyConfig(r_max=cfg.r_max, mode="full") if beta is None else GreedyConfig(
        r_max=cfg.r_max, mode="local", beta=beta
    )
    return identify(s_y, L0, cfg.graph_filter(), cfg.sigma_x2, sigma_w2, gcfg).edges


def detector_score(name: str, cfg: ExperimentConfig, inst: Instance, batch, s_cov) -> float:
    kind, beta = parse_name(name, DETECTORS)
    filt, sx2, sw2 = cfg.graph_filter(), cfg.sigma_x2, cfg.sigma_w2
    L0, Lk, hyp = inst.L0, inst.Lk, inst.hyp
    if kind == "lrt":
        return lrt_statistic(s_cov, L0, Lk, filt, sx2, sw2).penalized
    if kind == "local_lrt":
        rho = lrt_statistic(np.zeros_like(s_cov.matrix), L0, Lk, filt, sx2, sw2).penalty
        return local_lrt(s_cov, L0, hyp, beta, filt, sx2, sw2) - rho
    if kind == "naive":
        return naive_smoothness(batch, L0)
    if kind == "smsd":
        return smsd(batch, L0, Lk, cfg.band_b)
    if kind == "bmsd":
        return bmsd(batch, L0, cfg.band_b)
    if kind == "constant":
        return 0.0
    found = _identify(kind, beta, s_cov.matrix, L0, cfg, sw2)
    L_hat, _ = apply_hypothesis(L0, found)
    return penalized_score(s_cov.matrix, L0, L_hat, filt, sx2, sw2)


@dataclass
class Table:
    columns: list[str]
    rows: list[dict]
    extra: dict = field(default_factory=dict)

    def column(self, name: str, **where) -> list:
        return [r[name] for r in self.rows if all(r[k] == v for k, v in where.items())]

    def to_csv(self, header: str | None = None) -> str:
        buf = io.StringIO()
        if header:
            buf.write(f"# {header}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(row[c]) for c in self.columns])
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def roc_table(scores_h0: np.ndarray, scores_h1: np.ndarray, grid: Sequence[float] | None = None):
    """Empirical ``(threshold, pfa, pd)`` for the rule ``score > threshold``.

    Without a grid, thresholds are ``-inf`` followed by every distinct score.
    """
    s0, s1 = np.sort(scores_h0), np.sort(scores_h1)
    if grid is None:
        grid = np.concatenate([[-np.inf], np.unique(np.concatenate([s0, s1]))])
    grid = np.asarray(sorted(grid), dtype=float)
    pfa = 1.0 - np.searchsorted(s0, grid, side="right") / s0.size
    pd = 1.0 - np.searchsorted(s1, grid, side="right") / s1.size
    return grid, pfa, pd


def pd_at_pfa(pfa: Sequence[float], pd: Sequence[float], target: float) -> float:
    """Best detection rate among operating points with false-alarm rate <= target."""
    ok = [d for f, d in zip(pfa, pd) if f <= target + 1e-12]
    return max(ok) if ok else 0.0


def run_roc(cfg: ExperimentConfig) -> Table:
    cfg.validate()
    names = list(cfg.detectors)
    h0 = np.zeros((len(names), cfg.trials))
    h1 = np.zeros((len(names), cfg.trials))
    for t in range(cfg.trials):
        inst = draw_instance(cfg, t)
        for h, L, store in ((0, inst.L0, h0), (1, inst.Lk, h1)):
            batch, s_cov = draw_data(cfg, L, cfg.samples, cfg.sigma_w2, trial_seed(cfg.seed, t, 2, h))
            for d, name in enumerate(names):
                store[d, t] = detector_score(name, cfg, inst, batch, s_cov)
    rows = []
    for d, name in enumerate(names):
        grid, pfa, pd = roc_table(h0[d], h1[d], cfg.threshold_grid)
        for thr, f, p in zip(grid, pfa, pd):
            rows.append({"detector": name, "threshold": float(thr), "pfa": float(f), "pd": float(p), "trials": cfg.trials})
    return Table(["detector", "threshold", "pfa", "pd", "trials"], rows, {"h0": h0, "h1": h1, "names": names})


@dataclass(frozen=True)
class MetricRecord:
    trial: int
    method: str
    value: float
    tp: int
    fp: int
    fn: int
    seconds: float = 0.0
    evaluations: int = 0


def f_score(records: Sequence[MetricRecord]) -> tuple[float, float]:
    """Micro-averaged F-score and its delta-method standard error across trials."""
    a = np.array([2 * r.tp for r in records], dtype=float)
    b = np.array([2 * r.tp + r.fn + r.fp for r in records], dtype=float)
    if b.sum() == 0:
        return 1.0, 0.0
    f = a.sum() / b.sum()
    n = len(records)
    if n < 2:
        return float(f), 0.0
    resid = a - f * b
    se = math.sqrt(np.var(resid, ddof=1) / n) / b.mean()
    return float(f), float(se)


def _counts(found: Sequence[Edge], truth: set[Edge]) -> tuple[int, int, int]:
    found = set(found)
    tp = len(found & truth)
    return tp, len(found) - tp, len(truth) - tp


def run_fscore(cfg: ExperimentConfig) -> Table:
    """F-score per method along ``sweep_values`` (sample counts or ``1/sigma_w2``)."""
    cfg.validate()
    parsed = [(m, *parse_name(m, METHODS)) for m in cfg.methods]
    records: list[MetricRecord] = []
    for t in range(cfg.trials):
        inst = draw_instance(cfg, t)
        for v_idx, value in enumerate(cfg.sweep_values):
            samples = int(value) if cfg.sweep == "samples" else cfg.samples
            sw2 = cfg.sigma_w2 if cfg.sweep == "samples" else 1.0 / float(value)
            _, s_cov = draw_data(cfg, inst.Lk, samples, sw2, trial_seed(cfg.seed, t, 3, v_idx))
            for label, kind, beta in parsed:
                found = _identify(kind, beta, s_cov.matrix, inst.L0, cfg, sw2)
                records.append(MetricRecord(t, label, float(value), *_counts(found, inst.true_edges)))
    rows = []
    for value in cfg.sweep_values:
        for label, _, _ in parsed:
            recs = [r for r in records if r.method == label and r.value == float(value)]
            f, se = f_score(recs)
            rows.append({
                "sweep": cfg.sweep, "value": float(value), "method": label, "f_score": f, "se": se,
                "tp": sum(r.tp for r in recs), "fp": sum(r.fp for r in recs),
                "fn": sum(r.fn for r in recs), "trials": len(recs),
            })
    cols = ["sweep", "value", "method", "f_score", "se", "tp", "fp", "fn", "trials"]
    return Table(cols, rows, {"records": records})


def run_runtime(cfg: ExperimentConfig, clock: Callable[[], float] = time.perf_counter) -> tuple[Table, Table]:
    """Wall-clock table and a deterministic work table (candidate evaluations, F-score).

    Timing covers only the identification call; graph and data generation and
    the initial decomposition of ``L0`` are excluded.
    """
    cfg.validate()
    parsed = [(m, *parse_name(m, METHODS)) for m in cfg.methods]
    filt = cfg.graph_filter()
    records: list[MetricRecord] = []
    for n in cfg.n_sweep:
        for t in range(cfg.trials):
            inst = draw_instance(cfg, t, n_vertices=int(n))
            _, s_cov = draw_data(cfg, inst.Lk, cfg.samples, cfg.sigma_w2, trial_seed(cfg.seed, t, 4, int(n)))
            for label, kind, beta in parsed:
                gcfg = GreedyConfig(r_max=cfg.r_max, mode="full") if beta is None else GreedyConfig(
                    r_max=cfg.r_max, mode="local", beta=beta)
                start = clock()
                res = identify(s_cov.matrix, inst.L0, filt, cfg.sigma_x2, cfg.sigma_w2, gcfg)
                elapsed = clock() - start
                records.append(MetricRecord(t, label, float(n), *_counts(res.edges, inst.true_edges),
                                            seconds=elapsed, evaluations=res.evaluations))
    timing, work = [], []
    for n in cfg.n_sweep:
        for label, _, _ in parsed:
            recs = [r for r in records if r.method == label and r.value == float(n)]
            secs = np.array([r.seconds for r in recs])
            timing.append({"n": int(n), "method": label, "trials": len(recs),
                           "mean_s": float(secs.mean()), "std_s": float(secs.std(ddof=1)) if len(secs) > 1 else 0.0})
            work.append({"n": int(n), "method": label, "trials": len(recs),
                         "mean_evaluations": float(np.mean([r.evaluations for r in recs])),
                         "f_score": f_score(recs)[0]})
    return (
        Table(["n", "method", "trials", "mean_s", "std_s"], timing, {"records": records}),
        Table(["n", "method", "trials", "mean_evaluations", "f_score"], work),
    )


def manifest(cfg: ExperimentConfig, command: str, outputs: Sequence[str]) -> dict:
    return {
        "command": command,
        "config": cfg.to_dict(),
        "config_sha256": cfg.sha256(),
        "seed": cfg.seed,
        "outputs": list(outputs),
        "versions": {
            "gsp_disconnect": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
    }


def write_outputs(cfg: ExperimentConfig, command: str, tables: dict[str, Table], out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = f"config_sha256={cfg.sha256()} seed={cfg.seed}"
    paths = []
    for name, table in tables.items():
        p = out / f"{name}.csv"
        p.write_text(table.to_csv(header))
        paths.append(p)
    m = out / f"{command}_manifest.json"
    m.write_text(json.dumps(manifest(cfg, command, [p.name for p in paths]), indent=2, sort_keys=True))
    return paths + [m]
