"""Multi-seed experiment runner and its CSV/JSON reports.

Checkpoint costs are read off each run's convergence trace (last feasible
cost at or before the checkpoint), so tables can be recomputed from the
trace files alone.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .instance_io import BksRegistry, canonical_name, gap_percent, read_instance
from .model import Instance
from .tabu import ConvergenceTrace, SearchConfig, normalize_variant, search

CHECKPOINTS = (1.0, 2.0, 5.0, 15.0, 30.0, 60.0)
TRACE_COLUMNS = ("instance", "variant", "seed", "elapsed_ms", "best_cost", "feasible")


@dataclass(frozen=True)
class VariantSpec:
    """A variant key plus optional construction/window toggles, e.g. ``ts32+ch+tw``."""

    key: str
    ch: bool = False
    tw: bool = False

    @classmethod
    def parse(cls, text: str) -> "VariantSpec":
        head, *flags = [p.strip().lower() for p in text.split("+")]
        bad = [f for f in flags if f not in ("ch", "tw")]
        if bad:
            raise ValueError(f"unknown variant flag(s) {bad} in {text!r}; allowed: ch, tw")
        return cls(normalize_variant(head), "ch" in flags, "tw" in flags)

    def config(self, **kwargs) -> SearchConfig:
        return SearchConfig.for_variant(self.key, self.ch, self.tw, **kwargs)

    @property
    def label(self) -> str:
        return self.config().label


@dataclass
class RunReport:
    instance: str
    variant: str
    seed: int
    checkpoints: Dict[float, Optional[float]]
    first_feasible: Optional[Tuple[float, float]]  # (cost, elapsed_ms)
    final_best: Optional[float]
    bks: Optional[float] = None
    iterations: int = 0
    evaluations: int = 0
    trace: ConvergenceTrace = field(default_factory=ConvergenceTrace, repr=False)

    @property
    def gaps(self) -> Dict[float, Optional[float]]:
        return {t: _gap(c, self.bks) for t, c in self.checkpoints.items()}


def _gap(cost: Optional[float], bks: Optional[float]) -> Optional[float]:
    if cost is None or bks is None:
        return None
    return gap_percent(cost, bks)


def checkpoint_times(time_limit: float) -> List[float]:
    times = [t for t in CHECKPOINTS if t <= time_limit + 1e-9]
    return times or [float(time_limit)]


def median_cost(values: Iterable[Optional[float]]) -> Optional[float]:
    """Median where a missing value ranks above every cost; ``None`` if the median is missing."""
    vals = [math.inf if v is None else v for v in values]
    if not vals:
        return None
    med = statistics.median(vals)
    return None if math.isinf(med) else med


def _run_one(job) -> RunReport:
    name, instance, spec, seed, kwargs, bks = job
    config = spec.config(seed=seed, **kwargs)
    result = search(instance, config)
    trace = result.trace
    cps = {t: trace.best_at(t * 1000.0) for t in checkpoint_times(config.time_limit)}
    return RunReport(name, config.label, seed, cps, trace.first_feasible, trace.final_best,
                     bks, result.iterations, result.evaluations, trace)


def _load(item) -> Tuple[str, Instance]:
    if isinstance(item, Instance):
        return canonical_name(item.name), item
    inst = read_instance(item)
    return canonical_name(inst.name), inst


def run_experiment(
    instances: Sequence[Union[str, Path, Instance]],
    variants: Sequence[Union[str, VariantSpec]],
    replicates: int,
    time_limit: float,
    seeds: int = 0,
    workers: int = 1,
    registry: Optional[BksRegistry] = None,
    **config_kwargs,
) -> List[RunReport]:
    """Run every (instance, variant, replicate); replicate ``r`` uses seed ``seeds + r``.

    Reports come back in submission order whatever the worker count.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    specs = [v if isinstance(v, VariantSpec) else VariantSpec.parse(v) for v in variants]
    registry = registry if registry is not None else BksRegistry.load()
    loaded = [_load(item) for item in instances]
    jobs = []
    for name, inst in loaded:
        bks = registry.get(name)
        for spec in specs:
            for r in range(replicates):
                jobs.append((name, inst, spec, seeds + r, dict(time_limit=time_limit, **config_kwargs), bks))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_one, jobs))
    return [_run_one(job) for job in jobs]


# -- aggregation -----------------------------------------------------------


@dataclass
class AggregateRow:
    instance: str
    variant: str
    bks: Optional[float]
    checkpoints: Dict[float, Optional[float]]
    first_feasible_cost: Optional[float]
    first_feasible_ms: Optional[float]
    runs: int

    @property
    def gaps(self) -> Dict[float, Optional[float]]:
        return {t: _gap(c, self.bks) for t, c in self.checkpoints.items()}


def aggregate(reports: Sequence[RunReport]) -> List[AggregateRow]:
    """Median per checkpoint over the replicates of each (instance, variant), in first-seen order."""
    groups: Dict[Tuple[str, str], List[RunReport]] = {}
    for rep in reports:
        groups.setdefault((rep.instance, rep.variant), []).append(rep)
    rows = []
    for (inst, var), reps in groups.items():
        times = list(reps[0].checkpoints)
        cps = {t: median_cost(r.checkpoints.get(t) for r in reps) for t in times}
        ff_cost = median_cost(r.first_feasible[0] if r.first_feasible else None for r in reps)
        ff_ms = median_cost(r.first_feasible[1] if r.first_feasible else None for r in reps)
        rows.append(AggregateRow(inst, var, reps[0].bks, cps, ff_cost, ff_ms, len(reps)))
    return rows


# -- output ----------------------------------------------------------------


def _fmt(x: Optional[float], digits: int = 2) -> str:
    return "-" if x is None else f"{x:.{digits}f}"


def _slug(text: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in text)


def _tag(t: float) -> str:
    return f"{t:g}s"


def write_trace(report: RunReport, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for ev in report.trace.events:
            w.writerow([report.instance, report.variant, report.seed, f"{ev.elapsed_ms:.3f}",
                        "" if ev.best_cost is None else f"{ev.best_cost:.6f}", int(ev.feasible)])


def emit_reports(reports: Sequence[RunReport], out_dir: Union[str, Path],
                 config: Optional[dict] = None) -> Dict[str, Path]:
    """Write traces, the checkpoint table, the first-feasible table, per-run rows and a summary."""
    if not reports:
        raise ValueError("no reports to write")
    out = Path(out_dir)
    traces = out / "traces"
    traces.mkdir(parents=True, exist_ok=True)
    written = {}
    for rep in reports:
        p = traces / f"{_slug(rep.instance)}__{_slug(rep.variant)}__s{rep.seed}.csv"
        write_trace(rep, p)
    written["traces"] = traces

    rows = aggregate(reports)
    times = sorted({t for r in rows for t in r.checkpoints})
    p = out / "checkpoints.csv"
    with open(p, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["instance", "variant", "bks", "runs"]
                   + [f"cost@{_tag(t)}" for t in times] + [f"gap@{_tag(t)}" for t in times])
        for r in rows:
            gaps = r.gaps
            w.writerow([r.instance, r.variant, _fmt(r.bks), r.runs]
                       + [_fmt(r.checkpoints.get(t)) for t in times]
                       + [_fmt(gaps.get(t)) for t in times])
    written["checkpoints"] = p

    p = out / "first_feasible.csv"
    with open(p, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["instance", "variant", "bks", "runs", "cost", "gap", "time_ms"])
        for r in rows:
            w.writerow([r.instance, r.variant, _fmt(r.bks), r.runs, _fmt(r.first_feasible_cost),
                        _fmt(_gap(r.first_feasible_cost, r.bks)), _fmt(r.first_feasible_ms, 1)])
    written["first_feasible"] = p

    p = out / "runs.csv"
    with open(p, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["instance", "variant", "seed", "final_best", "first_feasible_cost",
                    "first_feasible_ms", "iterations", "evaluations"]
                   + [f"cost@{_tag(t)}" for t in times])
        for rep in reports:
            ff = rep.first_feasible
            w.writerow([rep.instance, rep.variant, rep.seed, _fmt(rep.final_best, 6),
                        _fmt(ff[0] if ff else None, 6), _fmt(ff[1] if ff else None, 3),
                        rep.iterations, rep.evaluations]
                       + [_fmt(rep.checkpoints.get(t), 6) for t in times])
    written["runs"] = p

    summary = {
        "config": config or {},
        "runs": len(reports),
        "instances": sorted({r.instance for r in reports}),
        "variants": list(dict.fromkeys(r.variant for r in reports)),
        "seeds": sorted({r.seed for r in reports}),
        "checkpoints_s": times,
    }
    p = out / "summary.json"
    p.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    written["summary"] = p
    return written


def instance_paths(directory: Union[str, Path]) -> List[Path]:
    """Instance files in ``directory`` (``*.txt``, ``*.dat`` or extension-less ``pr*``), sorted by name."""
    d = Path(directory)
    if not d.is_dir():
        raise FileNotFoundError(f"instance directory not found: {d}")
    found = [p for p in d.iterdir()
             if p.is_file() and (p.suffix in (".txt", ".dat") or (not p.suffix and p.name.lower().startswith("pr")))]
    if not found:
        raise FileNotFoundError(f"no instance files in {d}")
    return sorted(found, key=lambda p: canonical_name(p.stem))
