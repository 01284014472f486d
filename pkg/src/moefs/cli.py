"""Command-line entry point: ``moefs {run,baseline,sweep,evaluate}``.

Exit codes: 0 success, 1 runtime failure, 2 config or schema error,
3 data error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import report
from .baselines import sweep_weights
from .classify import holdout_accuracy
from .config import RunConfig, load_config, with_overrides
from .core import BitChromosome
from .dataset import Dataset, SplitIndices, load_csv, preprocess, split
from .engine import knee_select, run
from .errors import ConfigError, ContractViolation, DataError, MoefsError
from .neurocost import evaluate_subset

log = logging.getLogger("moefs")

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG, EXIT_DATA = 0, 1, 2, 3


def prepare_data(cfg: RunConfig) -> tuple[Dataset, SplitIndices]:
    d = cfg.data
    if not d.path:
        raise ConfigError("data.path is required")
    label_spec = d.label_spec
    labels_path = cfg.resolve(label_spec["file"]) if "file" in label_spec else None
    raw = load_csv(
        cfg.resolve(d.path),
        label_column=label_spec.get("column"),
        missing_tokens=d.missing_tokens,
        label_mapping=d.label_mapping,
        header=d.header,
        labels_path=labels_path,
        delimiter=d.delimiter,
    )
    idx = split(raw, d.split_ratio, d.split_seed)
    return preprocess(raw, idx), idx


def _out_dir(cfg: RunConfig) -> Path:
    return cfg.resolve(cfg.output.directory)


def cmd_run(cfg: RunConfig, jobs: int) -> int:
    ds, idx = prepare_data(cfg)
    rep = run(cfg.evolution(), ds, idx, cfg.train_spec(), jobs=jobs)
    rep.knee, rep.accuracies = knee_select(rep.archive, ds, idx, cfg.svm_spec())
    paths = report.write_run(rep, cfg.to_dict(), ds.d, _out_dir(cfg))
    k = rep.knee
    print(f"knee: k={int(k.obj.f2)} f1={k.obj.f1:.6f} "
          f"accuracy={rep.accuracies[k.chrom.to_hex()]:.4f} bits={k.chrom.to_hex()}")
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def cmd_baseline(cfg: RunConfig, jobs: int, weights=None, reference=None) -> int:
    weights = list(cfg.baseline.weights if weights is None else weights)
    for w in weights:
        if not 0.0 <= w <= 1.0:
            raise ConfigError(f"weight {w} outside [0, 1]")
    ref = None
    if reference is not None:
        try:
            ref = report.load_reference(reference)
        except (OSError, KeyError, ValueError) as exc:
            raise DataError(f"cannot read reference archive {reference}: {exc}") from exc
    ds, idx = prepare_data(cfg)
    results = sweep_weights(weights, cfg.decomposition(), ds, idx, cfg.train_spec(),
                            reference=ref, jobs=jobs)
    echo = {**cfg.to_dict(), "baseline": {**cfg.to_dict()["baseline"], "weights": weights}}
    for p in report.write_baseline(results, echo, _out_dir(cfg)):
        print(f"wrote {p}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, jobs: int) -> int:
    ds, idx = prepare_data(cfg)
    s = cfg.sweep
    rows, failures = [], 0
    for rate, pop, neurons in itertools.product(s.offspring_rates, s.pop_sizes, s.neuron_counts):
        t0 = time.perf_counter()
        try:
            best = None
            for j in range(s.seeds_per_cell):
                engine = replace(cfg.engine, offspring_rate=rate, pop_size=pop,
                                 hidden_neurons=neurons, master_seed=cfg.engine.master_seed + j)
                cell = replace(cfg, engine=engine)
                rep = run(cell.evolution(), ds, idx, cell.train_spec(), jobs=jobs)
                top = min(rep.archive, key=lambda m: (m.obj.f1, m.obj.f2))
                if best is None or (top.obj.f1, top.obj.f2) < (best[0].obj.f1, best[0].obj.f2):
                    best = (top, cell)
            top, cell = best
            acc = holdout_accuracy(ds, idx, top.chrom, cell.svm_spec())
        except Exception as exc:  # one bad cell must not end the sweep
            failures += 1
            log.error("sweep cell (offspring_rate=%s, population=%s, neurons=%s) failed: %s",
                      rate, pop, neurons, exc)
            continue
        rows.append((rate, pop, neurons, top.obj.f1, int(top.obj.f2), acc,
                     time.perf_counter() - t0))
    out = _out_dir(cfg)
    out.mkdir(parents=True, exist_ok=True)
    path = report.write_csv(out / "sweep.csv", report.SWEEP_COLUMNS, rows)
    print(f"wrote {path} ({len(rows)} cells, {failures} failed)")
    if not rows:
        log.error("every sweep cell failed")
        return EXIT_RUNTIME
    best = min(rows, key=lambda r: (r[3], r[4]))
    print("lowest cost: " + ", ".join(f"{c}={v}" for c, v in zip(report.SWEEP_COLUMNS, best)))
    return EXIT_OK


def cmd_evaluate(cfg: RunConfig, bits: str) -> int:
    ds, idx = prepare_data(cfg)
    try:
        chrom = BitChromosome.from_hex(bits, ds.d)
    except ContractViolation as exc:
        raise ConfigError(f"bad --bits: {exc}") from exc
    if chrom.k == 0:
        raise ConfigError("--bits selects no features")
    doc = {
        "bits": chrom.to_hex(),
        "k": chrom.k,
        "f1": evaluate_subset(ds, idx, chrom, cfg.train_spec()),
        "test_accuracy": holdout_accuracy(ds, idx, chrom, cfg.svm_spec()),
    }
    print(json.dumps(doc, sort_keys=True))
    return EXIT_OK


def _weights(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad weight list {text!r}")


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS lets the flags sit before or after the subcommand
    common.add_argument("--config", type=Path, default=argparse.SUPPRESS, help="JSON run config")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="override master_seed")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="evaluation threads")
    common.add_argument("--out", default=argparse.SUPPRESS, help="override output.directory")
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="moefs", parents=[common],
                                     description="Multi-objective evolutionary feature selection.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="evolve a Pareto archive and pick the knee")
    b = sub.add_parser("baseline", parents=[common], help="weighted-sum decomposition runs")
    b.add_argument("--weights", type=_weights, default=None, help="comma-separated, e.g. 0.1,0.5,0.9")
    b.add_argument("--reference", type=Path, default=None,
                   help="engine archive.csv or report.json to annotate against")
    s = sub.add_parser("sweep", parents=[common], help="grid of engine runs")
    s.add_argument("--offspring-rates", type=_weights, default=None)
    s.add_argument("--pop-sizes", type=_ints, default=None)
    s.add_argument("--neurons", type=_ints, default=None)
    s.add_argument("--seeds-per-cell", type=int, default=None)
    e = sub.add_parser("evaluate", parents=[common], help="score a stored bit pattern")
    e.add_argument("--bits", required=True, help="hex pattern, feature 0 = most significant bit")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    verbose = getattr(args, "verbose", 0)
    logging.basicConfig(level=logging.DEBUG if verbose > 1 else logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if getattr(args, "config", None) is None:
            raise ConfigError("--config is required")
        jobs = getattr(args, "jobs", 1)
        if jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        # --out is relative to the working directory, output.directory to the config file
        out = getattr(args, "out", None)
        cfg = with_overrides(load_config(args.config), getattr(args, "seed", None),
                             str(Path(out).resolve()) if out is not None else None)
        if args.command == "run":
            return cmd_run(cfg, jobs)
        if args.command == "baseline":
            return cmd_baseline(cfg, jobs, args.weights, args.reference)
        if args.command == "sweep":
            grid = {k: v for k, v in (("offspring_rates", args.offspring_rates),
                                      ("pop_sizes", args.pop_sizes),
                                      ("neuron_counts", args.neurons),
                                      ("seeds_per_cell", args.seeds_per_cell)) if v is not None}
            cfg = replace(cfg, sweep=replace(cfg.sweep, **grid)).validate()
            return cmd_sweep(cfg, jobs)
        return cmd_evaluate(cfg, args.bits)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except MoefsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:
        log.debug("unhandled failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
