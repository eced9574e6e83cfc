"""Experiment harness: ablation and grid suites, JSONL run logs, aggregate reports.

An experiment config is the flat parameter dict of :class:`CrossLingualMapper`
(``get_params()``). Each run is logged as one JSON line. Wall-clock fields are
kept out of the main log and written to a ``.timing.jsonl`` sidecar, so that
the main log is byte-identical across repeated invocations with the same seeds.
"""

import csv
import io
import json
import logging
import math
import os
import re
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from scipy import stats
from threadpoolctl import threadpool_limits

from .embeddings import EmbeddingSet, load_embeddings
from .evaluation import evaluate_p1, is_success, load_gold
from .estimator import CrossLingualMapper

logger = logging.getLogger(__name__)

THREADS_ENV = "XLINGMAP_NUM_THREADS"
FULL_SYSTEM = "Full System"

_INIT_ALIASES = {
    "unsup": "unsupervised",
    "rand": "random_complete",
    "rand-cutoff": "random_cutoff",
}


def default_config():
    """Parameters of the full system."""
    return CrossLingualMapper().get_params()


def default_threads():
    value = os.environ.get(THREADS_ENV)
    return int(value) if value else 1


def resolve_init(mode):
    return _INIT_ALIASES.get(mode, mode)


def ablation_suite(base=None):
    """The full system and its single-component ablations.

    Returns
    -------
    list of (name, config) tuples
    """
    base = default_config() if base is None else dict(base)
    changes = [
        (FULL_SYSTEM, {}),
        ("- Unsup. Init. (Rand. Compl.)", {"init": "random_complete"}),
        ("- Unsup. Init. (Rand. Cut.)", {"init": "random_cutoff"}),
        ("- Stochastic", {"stochastic": False}),
        ("- Cutoff (n=100k)", {"vocab_cutoff": 100000}),
        ("- CSLS", {"use_csls": False}),
        ("- Bidirectional", {"bidirectional": False}),
        ("- Re-weighting", {"reweight": False}),
    ]
    return [(name, {**base, **change}) for name, change in changes]


GRID_KINDS = ("csls", "cutoff", "stochastic")


def grid_suite(kind, base=None):
    """One-parameter (or two for ``stochastic``) sweeps around the full system."""
    base = default_config() if base is None else dict(base)
    if kind in ("csls", "csls_k"):
        return [(f"csls_k={k}", {**base, "csls_k": k}) for k in range(1, 21)]
    if kind in ("cutoff", "cutoff_n"):
        return [(f"vocab_cutoff={n}", {**base, "vocab_cutoff": n})
                for n in range(10000, 30001, 1000)]
    if kind == "stochastic":
        return [
            (f"p0={p0:g},p_factor={pf:g}", {**base, "p0": float(p0), "p_factor": float(pf)})
            for p0 in np.linspace(0.05, 0.3, 5)
            for pf in np.linspace(1.5, 3.0, 4)
        ]
    raise ValueError(f"unknown grid kind {kind!r}, expected one of {GRID_KINDS}")


@dataclass
class RunRecord:
    experiment: str
    config: dict
    init: str
    seed: int
    accuracy: float
    coverage: float
    success: bool
    iterations: int
    status: str
    error: str = None
    seconds: float = None
    timestamp: str = None

    TIMING_FIELDS = ("seconds", "timestamp")

    def key(self):
        return (self.experiment, self.seed)

    def log_line(self):
        data = {k: v for k, v in asdict(self).items() if k not in self.TIMING_FIELDS}
        return json.dumps(data, sort_keys=True) + "\n"

    def timing_line(self):
        return json.dumps({"experiment": self.experiment, "seed": self.seed,
                           "seconds": self.seconds, "timestamp": self.timestamp},
                          sort_keys=True) + "\n"


def timing_path(log_path):
    log_path = Path(log_path)
    return log_path.with_name(log_path.name + ".timing.jsonl")


class RunLog:
    """Append-only writer for a run log and its timing sidecar."""

    def __init__(self, path, append=True):
        self.path = Path(path)
        if not append:
            for p in (self.path, timing_path(self.path)):
                if p.exists():
                    p.unlink()
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def write(self, record):
        for path, line in ((self.path, record.log_line()),
                           (timing_path(self.path), record.timing_line())):
            with open(path, "a", encoding="utf-8") as f:
                f.write(line)
                f.flush()
                os.fsync(f.fileno())


def _read_jsonl(path):
    with open(path, encoding="utf-8") as f:
        lines = f.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    out = []
    for i, line in enumerate(lines):
        try:
            out.append(json.loads(line))
        except json.JSONDecodeError:
            if i == len(lines) - 1:
                warnings.warn(f"{path}: skipping truncated final line", stacklevel=3)
                break
            raise ValueError(f"{path}:{i + 1}: corrupt log line") from None
    return out


def read_log(path):
    """Load the records of a run log, merging the timing sidecar when present."""
    records = [RunRecord(**row) for row in _read_jsonl(path)]
    tpath = timing_path(path)
    if tpath.exists():
        timing = {(t["experiment"], t["seed"]): t for t in _read_jsonl(tpath)}
        for r in records:
            t = timing.get(r.key())
            if t is not None:
                r.seconds, r.timestamp = t["seconds"], t["timestamp"]
    return records


# Per-process data, set by the pool initializer (or directly when serial).
_DATA = {}


def _init_worker(source, target, gold, threads):
    _DATA.update(source=source, target=target, gold=gold, threads=threads)


def _run_one(name, config, seed):
    source, target, gold = _DATA["source"], _DATA["target"], _DATA["gold"]
    config = {**config, "random_state": seed}
    start = time.perf_counter()
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    try:
        with threadpool_limits(limits=_DATA["threads"]):
            est = CrossLingualMapper(**config).fit(source.matrix, target.matrix)
            result = evaluate_p1(source, target, (est.source_mapped_, est.target_mapped_),
                                 gold, k=est.csls_k,
                                 use_csls=est.use_csls, block_size=est.block_size)
        record = RunRecord(
            experiment=name, config=config, init=config["init"], seed=seed,
            accuracy=result.accuracy, coverage=result.coverage,
            success=is_success(result.accuracy), iterations=est.n_iter_,
            status=est.trace_.status,
        )
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        logger.warning("%s seed %d failed: %s", name, seed, exc)
        record = RunRecord(
            experiment=name, config=config, init=config["init"], seed=seed,
            accuracy=0.0, coverage=0.0, success=False, iterations=0,
            status="failed", error=f"{type(exc).__name__}: {exc}",
        )
    record.seconds = max(time.perf_counter() - start, 1e-9)
    record.timestamp = stamp
    return record


def run_experiment(name, source, target, gold, config=None, init=None, n_runs=25,
                   base_seed=0, log_path=None, jobs=1, threads=None, max_vocab=None):
    """Run the pipeline ``n_runs`` times with seeds ``base_seed, base_seed + 1, ...``.

    ``source``, ``target`` and ``gold`` are file paths or already-loaded
    objects. Every finished run is appended to ``log_path`` before the next one
    is reported; with ``jobs > 1`` runs execute in parallel processes but are
    still logged in seed order.

    Returns
    -------
    list of RunRecord
    """
    config = {**default_config(), **(config or {})}
    if init is not None:
        config["init"] = resolve_init(init)
    if not isinstance(source, EmbeddingSet):
        source = load_embeddings(source, max_vocab)
    if not isinstance(target, EmbeddingSet):
        target = load_embeddings(target, max_vocab)
    if isinstance(gold, (str, os.PathLike)):
        gold = load_gold(gold)
    threads = default_threads() if threads is None else threads
    log = RunLog(log_path) if log_path is not None else None
    seeds = [base_seed + i for i in range(n_runs)]
    records = []

    def _emit(record):
        records.append(record)
        if log is not None:
            log.write(record)
        logger.info("%s seed %d: accuracy %.4f (%s, %d iterations)", name, record.seed,
                    record.accuracy, record.status, record.iterations)

    if jobs <= 1:
        _init_worker(source, target, gold, threads)
        for seed in seeds:
            _emit(_run_one(name, config, seed))
        return records

    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                             initargs=(source, target, gold, threads)) as pool:
        futures = [pool.submit(_run_one, name, config, seed) for seed in seeds]
        # submission order == seed order, so waiting in order logs deterministically
        for fut in futures:
            _emit(fut.result())
    return records


def run_suite(suite, source, target, gold, n_runs, base_seed=0, log_path=None,
              jobs=1, threads=None, max_vocab=None):
    """Run every ``(name, config)`` of ``suite`` into one fresh log."""
    if log_path is not None:
        RunLog(log_path, append=False)
    if not isinstance(source, EmbeddingSet):
        source = load_embeddings(source, max_vocab)
    if not isinstance(target, EmbeddingSet):
        target = load_embeddings(target, max_vocab)
    if isinstance(gold, (str, os.PathLike)):
        gold = load_gold(gold)
    records = []
    for name, config in suite:
        records += run_experiment(name, source, target, gold, config, n_runs=n_runs,
                                  base_seed=base_seed, log_path=log_path, jobs=jobs,
                                  threads=threads)
    return records


@dataclass(frozen=True)
class ExperimentSummary:
    experiment: str
    best: float
    mean: float
    ci95: float
    success_rate: float
    minutes: float
    n_runs: int


@dataclass(frozen=True)
class AggregateReport:
    rows: tuple = field(default_factory=tuple)

    def __getitem__(self, experiment):
        for row in self.rows:
            if row.experiment == experiment:
                return row
        raise KeyError(experiment)

    def experiments(self):
        return [r.experiment for r in self.rows]


_KNOWN_ORDER = [name for name, _ in ablation_suite()]


def _natural_key(name):
    return [int(tok) if tok.isdigit() else tok for tok in re.split(r"(\d+)", name)]


def _row_order(name):
    rank = _KNOWN_ORDER.index(name) if name in _KNOWN_ORDER else len(_KNOWN_ORDER)
    return (rank, _natural_key(name))


def _summarize(name, records):
    acc = np.array(sorted(r.accuracy for r in records))
    n = acc.size
    mean = float(acc.mean())
    ci = None
    if n > 1:
        sem = float(acc.std(ddof=1)) / math.sqrt(n)
        ci = float(stats.t.ppf(0.975, n - 1) * sem)
    secs = sorted(r.seconds for r in records if r.seconds is not None)
    minutes = float(np.mean(secs)) / 60.0 if secs else None
    return ExperimentSummary(
        experiment=name, best=float(acc.max()), mean=mean, ci95=ci,
        success_rate=sum(is_success(r.accuracy) for r in records) / n,
        minutes=minutes, n_runs=n,
    )


def aggregate(records):
    """Per-experiment best / mean / 95% CI / success rate / runtime.

    Failed runs enter the mean with their accuracy of 0. The CI half-width is
    ``None`` for a single run, and runtime is ``None`` without timing data.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to aggregate")
    groups = {}
    for r in records:
        groups.setdefault(r.experiment, []).append(r)
    rows = [_summarize(name, groups[name]) for name in sorted(groups, key=_row_order)]
    return AggregateReport(tuple(rows))


REPORT_COLUMNS = ("experiment", "best", "avg", "ci95", "s", "t", "n_runs")


def _cells(row):
    def pct(x):
        return "-" if x is None else f"{100 * x:.2f}"
    return [
        row.experiment, pct(row.best), pct(row.mean), pct(row.ci95),
        f"{row.success_rate:.2f}",
        "-" if row.minutes is None else f"{row.minutes:.2f}",
        str(row.n_runs),
    ]


def emit_report(report, fmt="md", path=None):
    """Render ``report`` as CSV or a markdown table; write it when ``path`` is given.

    Accuracies are percentages, ``s`` is the success rate and ``t`` the mean
    runtime in minutes.
    """
    if fmt in ("md", "markdown"):
        lines = ["| " + " | ".join(REPORT_COLUMNS) + " |",
                 "|" + "|".join(["---"] + ["---:"] * (len(REPORT_COLUMNS) - 1)) + "|"]
        lines += ["| " + " | ".join(_cells(r)) + " |" for r in report.rows]
        text = "\n".join(lines) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        writer.writerows(_cells(r) for r in report.rows)
        text = buf.getvalue()
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    return text
