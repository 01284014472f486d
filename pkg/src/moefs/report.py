"""Serialization of run results to JSON and CSV."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

from .baselines import DecompositionResult
from .engine import RunReport

ARCHIVE_COLUMNS = ("bits", "k", "f1", "test_accuracy")
HISTORY_COLUMNS = ("generation", "bits", "k", "f1")
BASELINE_COLUMNS = ("method", "weight", "bits", "k", "f1", "scalar_cost",
                    "covered_by_reference", "dominated_by_reference")
SWEEP_COLUMNS = ("offspring_rate", "population", "neurons", "best_f1", "best_k",
                 "test_accuracy", "seconds")


def _num(x):
    # repr round-trips floats exactly
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else str(x)
    return x


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(columns)
    for row in rows:
        w.writerow([_num(v) for v in row])
    path = Path(path)
    path.write_text(buf.getvalue(), encoding="utf-8", newline="")
    return path


def read_csv(path: Path) -> list[dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _ind(m, accs=None) -> dict:
    out = {"bits": m.chrom.to_hex(), "k": int(m.obj.f2), "f1": m.obj.f1}
    if accs is not None and m.chrom.to_hex() in accs:
        out["test_accuracy"] = accs[m.chrom.to_hex()]
    return out


def run_document(rep: RunReport, config_echo: dict, d: int) -> dict:
    """JSON-ready view of a run. Everything outside ``timing`` is deterministic."""
    return {
        "objectives": {"f1": "neural validation cost (mean per-epoch MSE)",
                       "f2": "number of selected features"},
        "config": config_echo,
        "master_seed": rep.master_seed,
        "n_features": d,
        "generations_run": rep.generations_run,
        "stopped_early": rep.stopped_early,
        "distinct_evaluations": rep.distinct_evaluations,
        "reference_point": list(rep.reference_point),
        "archive": [_ind(m, rep.accuracies) for m in rep.archive],
        "knee": _ind(rep.knee, rep.accuracies) if rep.knee is not None else None,
        "history": [
            {
                "generation": r.generation,
                "front1": [_ind(m) for m in r.front1],
                "new_evaluations": r.new_evaluations,
                "hypervolume": r.hypervolume,
            }
            for r in rep.history
        ],
        "timing": {"wall_seconds": rep.wall_time},
    }


def dump_json(doc: dict, path: Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="")
    return path


def without_timing(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k != "timing"}


def write_run(rep: RunReport, config_echo: dict, d: int, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [dump_json(run_document(rep, config_echo, d), out_dir / "report.json")]
    paths.append(write_csv(
        out_dir / "archive.csv", ARCHIVE_COLUMNS,
        ((m.chrom.to_hex(), int(m.obj.f2), m.obj.f1, rep.accuracies.get(m.chrom.to_hex()))
         for m in rep.archive),
    ))
    paths.append(write_csv(
        out_dir / "front_history.csv", HISTORY_COLUMNS,
        ((r.generation, m.chrom.to_hex(), int(m.obj.f2), m.obj.f1)
         for r in rep.history for m in r.front1),
    ))
    return paths


def baseline_rows(results: Sequence[DecompositionResult]):
    for r in results:
        yield ("decomposition", r.weight, r.best.chrom.to_hex(), int(r.best.obj.f2), r.best.obj.f1,
               r.scalar_cost, r.covered_by_reference, r.dominated_by_reference)


def write_baseline(results: Sequence[DecompositionResult], config_echo: dict, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    doc = {
        "config": config_echo,
        "results": [dict(zip(BASELINE_COLUMNS, row)) for row in baseline_rows(results)],
    }
    return [dump_json(doc, out_dir / "baseline.json"),
            write_csv(out_dir / "baseline.csv", BASELINE_COLUMNS, baseline_rows(results))]


def load_reference(path: Path):
    """Objective vectors from an ``archive.csv`` or a ``report.json``."""
    from .core import ObjectiveVector

    path = Path(path)
    if path.suffix.lower() == ".json":
        doc = json.loads(path.read_text(encoding="utf-8"))
        rows = doc["archive"]
    else:
        rows = read_csv(path)
    return [ObjectiveVector(float(r["f1"]), float(r["k"])).check() for r in rows]
