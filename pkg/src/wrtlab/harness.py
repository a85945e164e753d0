"""Reproducible replicate experiments.

Every replicate gets its own generator derived from ``(master seed, index)``
so results do not depend on execution order or on the number of threads.
An experiment grows one tree per replicate and schedule size, evaluates the
requested statistics, writes one CSV row per replicate and size, and writes
a JSON summary with means, standard errors and optional tolerance checks.
"""
from __future__ import annotations

import csv
import json
import math
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from . import __version__
from .errors import ParameterError
from .sequences import FitnessSequence, WeightSequence, sequence_from_json
from .stats import M_n, normalized_N
from .trees import PlaneTree, extend_pat, extend_wrt, grow_pat, grow_wrt

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentResult",
    "replicate_rng",
    "build_id",
    "load_config",
    "run_experiment",
    "STATISTICS",
]


class ConfigError(ParameterError):
    """Invalid experiment configuration."""


def replicate_rng(master_seed: int, index: int) -> np.random.Generator:
    """Generator for replicate ``index``, independent of every other index."""
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), int(index)]))


def build_id() -> str:
    """``git describe`` of the source tree, or the package version outside git."""
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"],
                             cwd=Path(__file__).resolve().parent, capture_output=True,
                             text=True, timeout=5)
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def _stat_height(tree, ctx):
    return float(tree.height)


def _stat_height_ratio(tree, ctx):
    return tree.height / math.log(tree.n)


def _stat_root_degree(tree, ctx):
    return float(tree.degrees[0])


def _stat_scaled_root_degree(tree, ctx):
    gamma = ctx.get("gamma")
    if gamma is None:
        raise ConfigError("scaled_root_degree needs 'gamma' in params")
    return tree.degrees[0] * tree.n ** -(1 - gamma)


def _stat_normalized_N(tree, ctx):
    return normalized_N(tree, ctx.get("gamma", 1.0), ctx.get("z", 0.5))


def _stat_M(tree, ctx):
    w = ctx["sequence"]
    if not isinstance(w, WeightSequence):
        raise ConfigError("M_n needs a weighted recursive tree")
    return M_n(tree, w, ctx.get("z", 0.5))


STATISTICS: dict[str, Callable] = {
    "height": _stat_height,
    "height_ratio": _stat_height_ratio,
    "root_degree": _stat_root_degree,
    "scaled_root_degree": _stat_scaled_root_degree,
    "normalized_N": _stat_normalized_N,
    "M_n": _stat_M,
}


@dataclass
class ExperimentConfig:
    """What to grow, how often and what to measure.

    Attributes
    ----------
    model : dict
        ``{"tree": "wrt" | "pat", "seq": <sequence JSON>}``.
    n : list of int
        Sizes at which statistics are read (one growing tree per replicate).
    replicates : int
    seed : int
        Master seed.
    out : str
        CSV path; the summary goes next to it with suffix ``.json``.
    statistics : list of str
        Names from :data:`STATISTICS`.
    params : dict
        Extra inputs for statistics (``gamma``, ``z``).
    tolerances : dict
        ``{stat: [target, relative tolerance]}`` checked on the mean at the
        largest size.
    threads : int
    """

    model: dict
    n: list
    replicates: int
    seed: int
    out: str
    statistics: list
    params: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    threads: int = 1

    def validate(self) -> None:
        if self.model.get("tree") not in ("wrt", "pat"):
            raise ConfigError("model.tree must be 'wrt' or 'pat'")
        if "seq" not in self.model:
            raise ConfigError("model.seq is required")
        if not self.n or any(int(x) < 2 for x in self.n):
            raise ConfigError("n must be a nonempty list of sizes >= 2")
        if self.replicates < 0:
            raise ConfigError("replicates must be nonnegative")
        for s in self.statistics:
            if s not in STATISTICS:
                raise ConfigError(f"unknown statistic {s!r}; known: {sorted(STATISTICS)}")
        for s in self.tolerances:
            if s not in self.statistics:
                raise ConfigError(f"tolerance given for unrequested statistic {s!r}")


def load_config(obj: Mapping | str | Path) -> ExperimentConfig:
    """Build a config from a mapping, a JSON string or a JSON file."""
    if isinstance(obj, Path) or (isinstance(obj, str) and not obj.lstrip().startswith("{")):
        obj = Path(obj).read_text()
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
    try:
        cfg = ExperimentConfig(**obj)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    cfg.validate()
    return cfg


@dataclass
class ExperimentResult:
    rows: list
    summary: dict


def _one_replicate(cfg: ExperimentConfig, seq, index: int) -> list:
    rng = replicate_rng(cfg.seed, index)
    sizes = sorted(int(x) for x in cfg.n)
    ctx = dict(cfg.params, sequence=seq)
    rows = []
    tree = None
    for n in sizes:
        if cfg.model["tree"] == "wrt":
            tree = grow_wrt(seq, n, rng)[0] if tree is None else extend_wrt(tree, seq, n, rng)[0]
        else:
            tree = grow_pat(seq, n, rng)[0] if tree is None else extend_pat(tree, seq, n, rng)[0]
        rows.append([index, n] + [STATISTICS[s](tree, ctx) for s in cfg.statistics])
    return rows


def run_experiment(config: ExperimentConfig | Mapping | str) -> ExperimentResult:
    """Run every replicate, write the CSV and the JSON summary.

    Replicate ``i`` always uses :func:`replicate_rng` ``(seed, i)``, so the
    output is identical for any thread count.
    """
    cfg = config if isinstance(config, ExperimentConfig) else load_config(config)
    cfg.validate()
    n_max = max(int(x) for x in cfg.n)
    seq = sequence_from_json(cfg.model["seq"], n_max)
    if cfg.model["tree"] == "wrt" and not isinstance(seq, WeightSequence):
        raise ConfigError("a weighted recursive tree needs a weight sequence")
    if cfg.model["tree"] == "pat" and not isinstance(seq, FitnessSequence):
        raise ConfigError("a preferential attachment tree needs a fitness sequence")
    indices = range(cfg.replicates)
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            chunks = list(pool.map(lambda i: _one_replicate(cfg, seq, i), indices))
    else:
        chunks = [_one_replicate(cfg, seq, i) for i in indices]
    rows = [r for chunk in chunks for r in chunk]

    out = Path(cfg.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["replicate", "n"] + list(cfg.statistics))
        for r in rows:
            writer.writerow([r[0], r[1]] + [repr(float(x)) for x in r[2:]])

    summary = {"build": build_id(), "config": asdict(cfg), "replicates": cfg.replicates,
               "statistics": {}, "checks": {}, "pass": True}
    data = np.array([r[2:] for r in rows], dtype=np.float64).reshape(len(rows), len(cfg.statistics))
    sizes = np.array([r[1] for r in rows], dtype=np.int64)
    for j, s in enumerate(cfg.statistics):
        per_n = {}
        for n in sorted(int(x) for x in cfg.n):
            vals = data[sizes == n, j]
            mean = float(vals.mean()) if len(vals) else math.nan
            se = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else math.nan
            per_n[str(n)] = {"mean": mean, "se": se}
        summary["statistics"][s] = per_n
    for s, (target, rtol) in cfg.tolerances.items():
        mean = summary["statistics"][s][str(n_max)]["mean"]
        ok = bool(abs(mean - target) <= rtol * abs(target))
        summary["checks"][s] = {"observed": mean, "target": target, "rtol": rtol, "pass": ok}
        summary["pass"] = summary["pass"] and ok
    out.with_suffix(".json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    return ExperimentResult(rows, summary)
