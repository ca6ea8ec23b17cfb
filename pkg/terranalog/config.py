"""
Run configuration.

A run is described by one JSON document whose top level holds the funnel
settings and one object per stage::

    {
      "seed": 0,
      "twc_keep": 5000,
      "mtm_keep": 1000,
      "ssc": {"blk": 33, "c": 50.0},
      "graph": {"contour_interval": 100.0},
      "reference_graph": {"contour_interval": 200.0},
      "train": {"learning_rate": 0.0001}
    }

Omitted keys take their defaults; unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Tuple, Union

from terranalog.exception import ConfigError


@dataclass
class SscConfig:
    """Coarse screening: deficit binarization, thinning and line acceptance."""

    blk: int = 33
    c: float = 50.0
    err: float = 2.0
    s_l: float = 167.0
    s_u: float = 1333.0
    margin: int = 15
    dedup_iou: float = 0.8

    def validate(self) -> None:
        if self.blk < 3 or self.blk % 2 == 0:
            raise ConfigError(f"ssc.blk must be odd and >= 3, got {self.blk}.")
        _positive("ssc.c", self.c)
        _positive("ssc.err", self.err)
        if not 0 < self.s_l <= self.s_u:
            raise ConfigError(f"ssc length bounds invalid: {self.s_l}, {self.s_u}.")
        if self.margin < 0:
            raise ConfigError(f"ssc.margin must be >= 0, got {self.margin}.")
        if not 0 < self.dedup_iou <= 1:
            raise ConfigError(f"ssc.dedup_iou must be in (0, 1], got {self.dedup_iou}.")


@dataclass
class TwcConfig:
    """Waveform comparison: slicing and DDTW ranking."""

    width: int = 38
    spacing: Optional[float] = None
    reference_spacing: Optional[float] = None

    def validate(self) -> None:
        if self.width < 3:
            raise ConfigError(f"twc.width must be >= 3, got {self.width}.")
        for name in ("spacing", "reference_spacing"):
            value = getattr(self, name)
            if value is not None:
                _positive(f"twc.{name}", value)


@dataclass
class MtmConfig:
    """Texture matching: resampling bound, eigenshape truncation."""

    bound: float = 0.015
    variance_keep: float = 0.80
    k_pc: Optional[int] = None

    def validate(self) -> None:
        if not 0 <= self.bound < 1:
            raise ConfigError(f"mtm.bound must be in [0, 1), got {self.bound}.")
        if not 0 < self.variance_keep <= 1:
            raise ConfigError(
                f"mtm.variance_keep must be in (0, 1], got {self.variance_keep}."
            )
        if self.k_pc is not None and self.k_pc < 1:
            raise ConfigError(f"mtm.k_pc must be >= 1, got {self.k_pc}.")


@dataclass
class GraphConfig:
    """Terrain graph construction."""

    contour_interval: float = 100.0
    node_spacing: float = 250.0
    radius: float = 500.0
    bins: int = 36
    vrm_window: int = 3
    acr_patch: int = 5

    def validate(self) -> None:
        _positive("graph.contour_interval", self.contour_interval)
        _positive("graph.node_spacing", self.node_spacing)
        _positive("graph.radius", self.radius)
        if self.bins < 2:
            raise ConfigError(f"graph.bins must be >= 2, got {self.bins}.")
        if self.vrm_window < 3 or self.vrm_window % 2 == 0:
            raise ConfigError("graph.vrm_window must be odd and >= 3.")
        if self.acr_patch < 2:
            raise ConfigError(f"graph.acr_patch must be >= 2, got {self.acr_patch}.")


@dataclass
class ModelConfig:
    """Siamese graph network shape."""

    in_features: int = 5
    hidden: int = 128
    layers: int = 3
    pool_ratio: float = 0.1
    gcn_dropout: float = 0.3
    mlp_hidden: Tuple[int, ...] = (256, 64)
    mlp_dropout: float = 0.5
    bn_momentum: float = 0.1
    bn_eps: float = 1e-5

    def validate(self) -> None:
        for name in ("in_features", "hidden", "layers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"model.{name} must be >= 1.")
        if not 0 < self.pool_ratio <= 1:
            raise ConfigError("model.pool_ratio must be in (0, 1].")
        for name in ("gcn_dropout", "mlp_dropout"):
            if not 0 <= getattr(self, name) < 1:
                raise ConfigError(f"model.{name} must be in [0, 1).")
        if any(width < 1 for width in self.mlp_hidden):
            raise ConfigError("model.mlp_hidden widths must be >= 1.")


@dataclass
class TrainConfig:
    """Optimizer and schedule."""

    learning_rate: float = 1e-4
    weight_decay: float = 1e-3
    batch_size: int = 32
    clip_norm: float = 2.0
    patience: int = 20
    max_epochs: int = 500
    seed: int = 0
    folds: int = 5
    validation_fraction: float = 0.15

    def validate(self) -> None:
        _positive("train.learning_rate", self.learning_rate)
        if self.weight_decay < 0:
            raise ConfigError("train.weight_decay must be >= 0.")
        if self.batch_size < 2:
            raise ConfigError("train.batch_size must be >= 2.")
        for name in ("max_epochs", "folds"):
            if getattr(self, name) < 1:
                raise ConfigError(f"train.{name} must be >= 1.")
        _positive("train.clip_norm", self.clip_norm)
        if self.patience < 0:
            raise ConfigError("train.patience must be >= 0.")
        if not 0 < self.validation_fraction < 1:
            raise ConfigError("train.validation_fraction must be in (0, 1).")


@dataclass
class PipelineConfig:
    """Everything one funnel run needs."""

    seed: int = 0
    workers: int = 1
    twc_keep: int = 5000
    mtm_keep: int = 1000
    output_dir: str = "terranalog-run"
    checkpoint: Optional[str] = None
    score_discarded: bool = False
    histogram_bin_width: float = 0.05
    histogram_threshold: float = 0.2
    ssc: SscConfig = field(default_factory=SscConfig)
    twc: TwcConfig = field(default_factory=TwcConfig)
    mtm: MtmConfig = field(default_factory=MtmConfig)
    graph: GraphConfig = field(default_factory=GraphConfig)
    reference_graph: GraphConfig = field(
        default_factory=lambda: GraphConfig(contour_interval=200.0)
    )
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)

    def validate(self) -> PipelineConfig:
        if not self.twc_keep >= self.mtm_keep >= 1:
            raise ConfigError(
                f"Funnel sizes must satisfy twc_keep >= mtm_keep >= 1, "
                f"got {self.twc_keep} and {self.mtm_keep}."
            )
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}.")
        _positive("histogram_bin_width", self.histogram_bin_width)
        for section in _SECTIONS:
            getattr(self, section).validate()
        return self

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> PipelineConfig:
        if not isinstance(data, dict):
            raise ConfigError("Configuration must be a JSON object.")
        top = {}
        sections = {}
        known = {f.name for f in dataclasses.fields(cls)}
        for key, value in data.items():
            if key not in known:
                raise ConfigError(f"Unknown configuration key: {key}")
            if key in _SECTIONS:
                sections[key] = _section(_SECTIONS[key], key, value)
            else:
                top[key] = value
        try:
            config = cls(**top, **sections)
        except TypeError as e:
            raise ConfigError(str(e)) from e
        return config.validate()


_SECTIONS = {
    "ssc": SscConfig,
    "twc": TwcConfig,
    "mtm": MtmConfig,
    "graph": GraphConfig,
    "reference_graph": GraphConfig,
    "model": ModelConfig,
    "train": TrainConfig,
}


def _positive(name: str, value: float) -> None:
    if not value > 0:
        raise ConfigError(f"{name} must be positive, got {value}.")


def _section(kind: type, name: str, value: Any):
    if not isinstance(value, dict):
        raise ConfigError(f"Section {name} must be an object.")
    known = {f.name for f in dataclasses.fields(kind)}
    for key in value:
        if key not in known:
            raise ConfigError(f"Unknown configuration key: {name}.{key}")
    data = dict(value)
    if "mlp_hidden" in data:
        data["mlp_hidden"] = tuple(data["mlp_hidden"])
    if name == "reference_graph":
        data = {"contour_interval": 200.0, **data}
    return kind(**data)


def _parse_literal(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(data: Dict[str, Any], overrides: Iterable[str]) -> Dict[str, Any]:
    """
    Apply ``key=value`` or ``section.key=value`` overrides to a config document.

    Values are read as JSON literals, falling back to plain strings.

    Examples
    --------
    >>> apply_overrides({}, ["ssc.blk=21", "twc_keep=100"])
    {'ssc': {'blk': 21}, 'twc_keep': 100}
    """
    merged = json.loads(json.dumps(data))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"Override must look like key=value, got {item!r}.")
        path, raw = item.split("=", 1)
        keys = path.strip().split(".")
        if len(keys) > 2 or not all(keys):
            raise ConfigError(f"Override key too deep or empty: {path!r}.")
        target = merged
        if len(keys) == 2:
            target = merged.setdefault(keys[0], {})
            if not isinstance(target, dict):
                raise ConfigError(f"Cannot override inside non-section {keys[0]!r}.")
        target[keys[-1]] = _parse_literal(raw.strip())
    return merged


def load_config(
    path: Optional[Union[str, os.PathLike]] = None,
    overrides: Iterable[str] = (),
) -> PipelineConfig:
    """
    Read a configuration file and apply overrides.

    Raises
    ------
    ConfigError
        When the file is missing, is not valid JSON, or holds unknown keys or
        invalid values.
    """
    data: Dict[str, Any] = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"Configuration file not found: {path}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(
                f"Configuration file {path} is not valid JSON: {e}"
            ) from e
    return PipelineConfig.from_dict(apply_overrides(data, overrides))
