"""Command line interface: ``xlingmap {map,ablation,grid,report,synth}``."""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import harness
from .embeddings import generate_isometric_pair, write_embeddings
from .evaluation import write_gold

logger = logging.getLogger("xlingmap")

_BOOL_PARAMS = ("use_csls", "bidirectional", "stochastic", "reweight")
_INT_PARAMS = ("init_cutoff", "vocab_cutoff", "csls_k", "window", "max_iterations", "block_size")
_FLOAT_PARAMS = ("p0", "p_factor", "epsilon")


def _add_config_flags(parser):
    group = parser.add_argument_group("pipeline configuration (overrides --config)")
    group.add_argument("--config", type=Path, help="JSON file with a flat parameter document")
    for name in _INT_PARAMS:
        group.add_argument("--" + name.replace("_", "-"), dest=name, type=int)
    for name in _FLOAT_PARAMS:
        group.add_argument("--" + name.replace("_", "-"), dest=name, type=float)
    for name in _BOOL_PARAMS:
        group.add_argument("--" + name.replace("_", "-"), dest=name,
                           action=argparse.BooleanOptionalAction, default=None)


def _add_data_flags(parser):
    parser.add_argument("--src", required=True, type=Path, help="source embeddings (word2vec text)")
    parser.add_argument("--trg", required=True, type=Path, help="target embeddings (word2vec text)")
    parser.add_argument("--gold", required=True, type=Path, help="gold dictionary, one pair per line")
    parser.add_argument("--max-vocab", type=int, help="read at most this many words per language")
    parser.add_argument("--jobs", type=int, default=1, help="parallel runs (processes)")
    parser.add_argument("--threads", type=int,
                        help=f"BLAS threads per run (default: ${harness.THREADS_ENV} or 1)")


def _config_from_args(args):
    config = harness.default_config()
    if args.config is not None:
        with open(args.config, encoding="utf-8") as f:
            overrides = json.load(f)
        if not isinstance(overrides, dict):
            raise ValueError(f"{args.config}: expected a flat JSON object")
        unknown = set(overrides) - set(config)
        if unknown:
            raise ValueError(f"{args.config}: unknown keys {sorted(unknown)}")
        config.update(overrides)
    for name in _BOOL_PARAMS + _INT_PARAMS + _FLOAT_PARAMS:
        value = getattr(args, name, None)
        if value is not None:
            config[name] = value
    if getattr(args, "init", None) is not None:
        config["init"] = harness.resolve_init(args.init)
    return config


def cmd_map(args):
    config = _config_from_args(args)
    records = harness.run_experiment(
        args.name, args.src, args.trg, args.gold, config, n_runs=1, base_seed=args.seed,
        log_path=args.log, jobs=1, threads=args.threads, max_vocab=args.max_vocab,
    )
    rec = records[0]
    print(json.dumps({"accuracy": rec.accuracy, "coverage": rec.coverage,
                      "success": rec.success, "iterations": rec.iterations,
                      "status": rec.status, "seconds": round(rec.seconds, 3)}))
    return 0 if rec.status != "failed" else 1


def _run_suite(args, suite):
    harness.run_suite(suite, args.src, args.trg, args.gold, n_runs=args.runs,
                      base_seed=args.seed, log_path=args.out, jobs=args.jobs,
                      threads=args.threads, max_vocab=args.max_vocab)
    report = harness.aggregate(harness.read_log(args.out))
    sys.stdout.write(harness.emit_report(report, "md"))
    return 0


def cmd_ablation(args):
    return _run_suite(args, harness.ablation_suite(_config_from_args(args)))


def cmd_grid(args):
    return _run_suite(args, harness.grid_suite(args.kind, _config_from_args(args)))


def cmd_report(args):
    report = harness.aggregate(harness.read_log(args.log))
    text = harness.emit_report(report, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0


def cmd_synth(args):
    src, trg, gold = generate_isometric_pair(args.vocab, args.dim, args.seed, args.noise)
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    write_embeddings(src, out / "src.vec")
    write_embeddings(trg, out / "trg.vec")
    write_gold([(f"s{i}", f"t{i}") for i in range(args.vocab)], out / "gold.txt")
    print(f"wrote {out / 'src.vec'}, {out / 'trg.vec'}, {out / 'gold.txt'}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="xlingmap",
        description="Unsupervised cross-lingual word embedding mapping and experiment harness.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("map", help="single pipeline run with evaluation")
    _add_data_flags(p)
    _add_config_flags(p)
    p.add_argument("--init", choices=["unsup", "rand", "rand-cutoff"], default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--name", default=harness.FULL_SYSTEM, help="experiment name in the log")
    p.add_argument("--log", type=Path, help="append the run record to this JSONL log")
    p.set_defaults(func=cmd_map)

    for name, func, help_text in (("ablation", cmd_ablation, "run the ablation suite"),
                                  ("grid", cmd_grid, "run a hyperparameter grid")):
        p = sub.add_parser(name, help=help_text)
        _add_data_flags(p)
        _add_config_flags(p)
        p.add_argument("--runs", type=int, default=25, help="runs per configuration")
        p.add_argument("--seed", type=int, default=0, help="base seed")
        p.add_argument("--out", type=Path, required=True, help="JSONL log (overwritten)")
        if name == "grid":
            p.add_argument("--kind", choices=harness.GRID_KINDS, required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("report", help="aggregate a run log")
    p.add_argument("--log", type=Path, required=True)
    p.add_argument("--format", choices=["csv", "md"], default="md")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("synth", help="write a synthetic isometric fixture")
    p.add_argument("--vocab", type=int, default=2000)
    p.add_argument("--dim", type=int, default=50)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", type=Path, required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"xlingmap: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
