"""Experiment configuration and its flat ``section.key = value`` file format.

Sections and keys::

    run.seed, run.test_size, run.test_repeats, run.out_dir, run.self_check
    encoder.{grid_side, disc_diameter, ring_thickness, n_bits, illumination_waist}
    optics.{modes, fiber_path, imaging_path}
    reservoir.{n_nodes, gain, coupling, diffusion_radius, noise_sigma,
               relax_alpha, tol, max_iters}
    trainer.{batch_size, target_eps, max_epochs, resample_batch,
             frozen_noise, stop_on_stall}
    task.{kind, digit}
    seeds.{fiber, imaging, coupling, init_weights, train_batch, test_batch, noise}

Blank lines and ``#`` comments are ignored. ``none`` clears an optional
value. Seeds left unset are derived from ``run.seed`` by name.
"""
import dataclasses
import typing
from dataclasses import dataclass, field
from typing import Optional

from .encoder import EncoderGeometry
from .errors import ConfigError
from .pipeline import OpticsConfig
from .reservoir import ReservoirParams
from .rng import derive_seed
from .tasks import TaskSpec
from .trainer import TrainerConfig

SEED_NAMES = ("fiber", "imaging", "coupling", "init_weights", "train_batch", "test_batch", "noise")


@dataclass(frozen=True)
class SeedPlan:
    fiber: Optional[int] = None
    imaging: Optional[int] = None
    coupling: Optional[int] = None
    init_weights: Optional[int] = None
    train_batch: Optional[int] = None
    test_batch: Optional[int] = None
    noise: Optional[int] = None

    def resolve(self, master: int) -> dict:
        return {name: derive_seed(master, name) if getattr(self, name) is None else getattr(self, name)
                for name in SEED_NAMES}


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    test_size: int = 1000
    test_repeats: int = 10
    out_dir: str = "results"
    self_check: bool = True
    encoder: EncoderGeometry = field(default_factory=EncoderGeometry)
    optics: OpticsConfig = field(default_factory=OpticsConfig)
    reservoir: ReservoirParams = field(default_factory=ReservoirParams)
    trainer: TrainerConfig = field(default_factory=TrainerConfig)
    task: TaskSpec = field(default_factory=TaskSpec)
    seeds: SeedPlan = field(default_factory=SeedPlan)

    def __post_init__(self):
        if self.test_size < 1 or self.test_repeats < 0:
            raise ConfigError("test_size must be >= 1 and test_repeats >= 0")
        if self.task.n_bits != self.encoder.n_bits:
            raise ConfigError("task.n_bits must match encoder.n_bits")

    def resolved_seeds(self) -> dict:
        return self.seeds.resolve(self.seed)

    def with_value(self, key: str, value) -> "ExperimentConfig":
        """Copy with one dotted key replaced; strings are coerced."""
        return from_dict({**to_dict(self), key: value})


# section name -> config attribute holding that sub-config ("run" = top level)
_SECTIONS = {"encoder": "encoder", "optics": "optics", "reservoir": "reservoir",
             "trainer": "trainer", "task": "task", "seeds": "seeds"}
_HIDDEN = {("reservoir", "seed"), ("trainer", "seed"), ("task", "n_bits")}


def _fields(cls):
    hints = typing.get_type_hints(cls)
    return [(f.name, hints[f.name]) for f in dataclasses.fields(cls)]


def _coerce(value, tp, key):
    if not isinstance(value, str):
        return value
    text = value.strip()
    args = typing.get_args(tp)
    if type(None) in args:
        if text.lower() in ("none", "null", ""):
            return None
        tp = next(a for a in args if a is not type(None))
    try:
        if tp is bool:
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if tp is int:
            f = float(text)
            if not f.is_integer():
                raise ValueError(text)
            return int(f)
        if tp is float:
            return float(text)
        return text
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {value!r} as {getattr(tp, '__name__', tp)}") from None


def _keys():
    for name, tp in _fields(ExperimentConfig):
        if name in _SECTIONS:
            sub_cls = typing.get_type_hints(ExperimentConfig)[name]
            for sub, stp in _fields(sub_cls):
                if (name, sub) not in _HIDDEN:
                    yield f"{name}.{sub}", stp
        else:
            yield f"run.{name}", tp


KEYS = dict(_keys())


def from_dict(values: dict) -> ExperimentConfig:
    """Build a config from dotted keys; unknown keys raise ``ConfigError``."""
    unknown = set(values) - set(KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    top, subs = {}, {s: {} for s in _SECTIONS}
    for key, raw in values.items():
        section, name = key.split(".", 1)
        val = _coerce(raw, KEYS[key], key)
        (top if section == "run" else subs[section])[name] = val
    try:
        encoder = EncoderGeometry(**subs["encoder"])
        built = {s: typing.get_type_hints(ExperimentConfig)[s](**v)
                 for s, v in subs.items() if s not in ("encoder", "task")}
        task = TaskSpec(n_bits=encoder.n_bits, **subs["task"])
        return ExperimentConfig(encoder=encoder, task=task, **built, **top)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def to_dict(config: ExperimentConfig) -> dict:
    out = {}
    for key in KEYS:
        section, name = key.split(".", 1)
        obj = config if section == "run" else getattr(config, _SECTIONS[section])
        out[key] = getattr(obj, name)
    return out


def parse_config(text: str) -> ExperimentConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = value
    return from_dict(values)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


def format_config(config: ExperimentConfig) -> str:
    lines = []
    for key, value in to_dict(config).items():
        lines.append(f"{key} = {'none' if value is None else value}")
    return "\n".join(lines) + "\n"
