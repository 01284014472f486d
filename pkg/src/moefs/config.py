"""JSON run configuration: parsing, defaults and validation."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from .baselines import DEFAULT_WEIGHTS, DecompositionConfig
from .classify import SvmSpec
from .dataset import DEFAULT_MISSING_TOKENS
from .engine import EvolutionConfig
from .errors import ConfigError
from .neurocost import TrainSpec


@dataclass
class DataSection:
    path: str = ""
    label_spec: dict = field(default_factory=lambda: {"column": -1})
    missing_tokens: list = field(default_factory=lambda: list(DEFAULT_MISSING_TOKENS))
    label_mapping: dict = field(default_factory=lambda: {"0": 0, "1": 1})
    split_ratio: float = 0.7
    split_seed: int = 0
    header: bool = True
    delimiter: str = ","


@dataclass
class EngineSection:
    pop_size: int = 800
    offspring_rate: float = 0.7
    generations: int = 100
    mutation_start: float = 0.05
    mutation_end: float = 0.005
    hidden_neurons: int = 15
    master_seed: int = 0
    stagnation_window: int = 25


@dataclass
class EvaluatorSection:
    learning_rate: float = 0.001
    momentum: float = 0.9
    epochs: int = 10
    batch_size: int = 32
    val_fraction: float = 0.2


@dataclass
class ClassifierSection:
    # "lambda" in JSON
    lam: float = 1e-4
    epochs: int = 100


@dataclass
class OutputSection:
    directory: str = "out"


@dataclass
class BaselineSection:
    weights: list = field(default_factory=lambda: list(DEFAULT_WEIGHTS))
    crossover_rate: float = 0.8
    mutation_rate: float = 0.3
    pop_size: int = 700
    generations: int = 100


@dataclass
class SweepSection:
    offspring_rates: list = field(default_factory=lambda: [0.6, 0.7, 0.8, 0.9])
    pop_sizes: list = field(default_factory=lambda: [600, 700, 800, 900])
    neuron_counts: list = field(default_factory=lambda: [10, 15, 20])
    seeds_per_cell: int = 1


_SECTIONS = {
    "data": DataSection,
    "engine": EngineSection,
    "evaluator": EvaluatorSection,
    "classifier": ClassifierSection,
    "output": OutputSection,
    "baseline": BaselineSection,
    "sweep": SweepSection,
}
_JSON_ALIASES = {("classifier", "lambda"): "lam"}


@dataclass
class RunConfig:
    data: DataSection = field(default_factory=DataSection)
    engine: EngineSection = field(default_factory=EngineSection)
    evaluator: EvaluatorSection = field(default_factory=EvaluatorSection)
    classifier: ClassifierSection = field(default_factory=ClassifierSection)
    output: OutputSection = field(default_factory=OutputSection)
    baseline: BaselineSection = field(default_factory=BaselineSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    base_dir: Path = field(default=Path("."), compare=False, repr=False)

    def evolution(self) -> EvolutionConfig:
        return EvolutionConfig(**asdict(self.engine)).validate()

    def train_spec(self) -> TrainSpec:
        return TrainSpec(
            **asdict(self.evaluator), hidden=self.engine.hidden_neurons, seed=self.engine.master_seed
        )

    def svm_spec(self) -> SvmSpec:
        return SvmSpec(lam=self.classifier.lam, epochs=self.classifier.epochs,
                       seed=self.engine.master_seed)

    def decomposition(self) -> DecompositionConfig:
        b = self.baseline
        return DecompositionConfig(
            crossover_rate=b.crossover_rate, mutation_rate=b.mutation_rate,
            pop_size=b.pop_size, generations=b.generations, seed=self.engine.master_seed,
        )

    def resolve(self, path: str | None) -> Path | None:
        if path is None:
            return None
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p

    def to_dict(self) -> dict[str, Any]:
        out = {}
        for name in _SECTIONS:
            sec = asdict(getattr(self, name))
            if name == "classifier":
                sec = {"lambda": sec.pop("lam"), **sec}
            out[name] = sec
        return out

    def validate(self) -> "RunConfig":
        self.evolution()
        self.train_spec()
        self.svm_spec()
        d = self.data
        if not 0.0 < d.split_ratio < 1.0:
            raise ConfigError("data.split_ratio must be in (0, 1)")
        spec = d.label_spec
        if not isinstance(spec, dict) or set(spec) - {"column", "file"} or len(spec) != 1:
            raise ConfigError('data.label_spec must be {"column": name-or-index} or {"file": path}')
        for key, target in d.label_mapping.items():
            if target not in (0, 1):
                raise ConfigError(f"data.label_mapping[{key!r}] must be 0 or 1")
        for w in self.baseline.weights:
            if not isinstance(w, (int, float)) or not 0.0 <= w <= 1.0:
                raise ConfigError(f"baseline weight {w!r} outside [0, 1]")
        s = self.sweep
        if not (s.offspring_rates and s.pop_sizes and s.neuron_counts):
            raise ConfigError("sweep grid lists must be nonempty")
        if s.seeds_per_cell < 1:
            raise ConfigError("sweep.seeds_per_cell must be >= 1")
        return self


def _build_section(name: str, raw: Any):
    cls = _SECTIONS[name]
    if not isinstance(raw, dict):
        raise ConfigError(f"section {name!r} must be an object")
    # JSON key -> attribute; aliased attributes are only reachable via their JSON name
    hidden = {a for (s, _), a in _JSON_ALIASES.items() if s == name}
    allowed = {f.name: f.name for f in fields(cls) if f.name not in hidden}
    allowed.update({k: a for (s, k), a in _JSON_ALIASES.items() if s == name})
    kwargs = {}
    for key, value in raw.items():
        if key not in allowed:
            raise ConfigError(f"unknown key {name}.{key}")
        attr = allowed[key]
        default = getattr(cls(), attr)
        if isinstance(default, bool) and not isinstance(value, bool):
            raise ConfigError(f"{name}.{key} must be a boolean")
        if isinstance(default, (int, float)) and not isinstance(default, bool):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{name}.{key} must be a number")
            if isinstance(default, int) and not isinstance(default, bool) and value != int(value):
                raise ConfigError(f"{name}.{key} must be an integer")
            value = type(default)(value)
        elif isinstance(default, str) and not isinstance(value, str):
            raise ConfigError(f"{name}.{key} must be a string")
        elif isinstance(default, list) and not isinstance(value, list):
            raise ConfigError(f"{name}.{key} must be a list")
        elif isinstance(default, dict) and not isinstance(value, dict):
            raise ConfigError(f"{name}.{key} must be an object")
        kwargs[attr] = value
    return cls(**kwargs)


def parse_config(doc: Any, base_dir: Path = Path(".")) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(doc) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(sorted(unknown))}")
    sections = {name: _build_section(name, raw) for name, raw in doc.items()}
    return RunConfig(**sections, base_dir=base_dir).validate()


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    return parse_config(doc, base_dir=path.parent)


def with_overrides(cfg: RunConfig, seed: int | None = None, out: str | None = None) -> RunConfig:
    if seed is not None:
        cfg = replace(cfg, engine=replace(cfg.engine, master_seed=int(seed)))
    if out is not None:
        cfg = replace(cfg, output=replace(cfg.output, directory=str(out)))
    return cfg.validate()
