"""Pipeline configuration: one flat dataclass, file- and flag-settable.

The file format is `key = value` lines with `#` comments. Optional
numeric fields accept `auto` (meaning: decide at run time), which is
also how None serializes back out.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Optional, Union

from .errors import ConfigError, IoFailure

PathLike = Union[str, Path]

_KERNELS = ("tophat", "gaussian")
_POOLINGS = ("weighted", "mean")
_METRICS = ("margin", "cosine")
_DENSITY_SOURCES = ("debiased", "raw")


@dataclass(frozen=True)
class PipelineConfig:
    rank: Optional[int] = None  # None = sweep candidate ranks
    rank_threshold: float = 0.55
    kernel: str = "tophat"
    folds: int = 5
    d_reduced: int = 16
    bandwidth: Optional[float] = None  # None = cross-validate
    density_on: str = "debiased"
    pooling: str = "weighted"
    metric: str = "margin"
    k: int = 4
    n_candidates: int = 16
    normalize: bool = True
    split: float = 0.8
    seed: int = 0
    threads: int = 0  # 0 = LAWDR_THREADS env, else cpu count

    def __post_init__(self) -> None:
        if self.kernel not in _KERNELS:
            raise ConfigError(f"kernel must be one of {_KERNELS}, got {self.kernel!r}")
        if self.pooling not in _POOLINGS:
            raise ConfigError(f"pooling must be one of {_POOLINGS}, got {self.pooling!r}")
        if self.metric not in _METRICS:
            raise ConfigError(f"metric must be one of {_METRICS}, got {self.metric!r}")
        if self.density_on not in _DENSITY_SOURCES:
            raise ConfigError(
                f"density_on must be one of {_DENSITY_SOURCES}, got {self.density_on!r}"
            )
        if self.rank is not None and self.rank < 1:
            raise ConfigError(f"rank must be >= 1, got {self.rank}")
        if self.rank_threshold <= 0.0:
            raise ConfigError(f"rank_threshold must be > 0, got {self.rank_threshold}")
        if self.folds < 2:
            raise ConfigError(f"folds must be >= 2, got {self.folds}")
        if self.d_reduced < 1:
            raise ConfigError(f"d_reduced must be >= 1, got {self.d_reduced}")
        if self.bandwidth is not None and self.bandwidth <= 0.0:
            raise ConfigError(f"bandwidth must be > 0, got {self.bandwidth}")
        if self.k < 1 or self.n_candidates < 1:
            raise ConfigError("k and n_candidates must be >= 1")
        if not 0.0 < self.split < 1.0:
            raise ConfigError(f"split must be in (0, 1), got {self.split}")
        if self.threads < 0:
            raise ConfigError(f"threads must be >= 0, got {self.threads}")

    def as_dict(self) -> dict:
        return asdict(self)

    def with_overrides(self, **overrides) -> "PipelineConfig":
        return replace(self, **overrides)

    def effective_threads(self) -> int:
        if self.threads > 0:
            return self.threads
        env = os.environ.get("LAWDR_THREADS", "")
        if env.strip().isdigit() and int(env) > 0:
            return int(env)
        return os.cpu_count() or 1


_OPTIONAL_INT = {"rank"}
_OPTIONAL_FLOAT = {"bandwidth"}


def _parse_value(name: str, text: str):
    text = text.strip()
    if name in _OPTIONAL_INT or name in _OPTIONAL_FLOAT:
        if text.lower() in ("auto", "none", ""):
            return None
        caster = int if name in _OPTIONAL_INT else float
        try:
            return caster(text)
        except ValueError as exc:
            raise ConfigError(f"bad value for {name}: {text!r}") from exc
    proto = PipelineConfig.__dataclass_fields__[name].default
    if isinstance(proto, bool):
        low = text.lower()
        if low in ("true", "1", "yes", "on"):
            return True
        if low in ("false", "0", "no", "off"):
            return False
        raise ConfigError(f"bad boolean for {name}: {text!r}")
    try:
        return type(proto)(text)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {name}: {text!r}") from exc


def load_config(path: PathLike) -> PipelineConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc
    known = {f.name for f in fields(PipelineConfig)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _parse_value(key, value)
    return PipelineConfig(**values)


def save_config(config: PipelineConfig, path: PathLike) -> None:
    lines = []
    for f in fields(PipelineConfig):
        value = getattr(config, f.name)
        if value is None:
            value = "auto"
        elif isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{f.name} = {value}")
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write config {path}: {exc}") from exc
