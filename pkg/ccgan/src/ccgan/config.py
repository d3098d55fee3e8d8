"""Training configuration: a frozen dataclass plus file and dict loaders.

Configs come from YAML or JSON files and may be partially overridden from
the command line, so everything funnels through ``config_from_dict`` which
validates the merged result once.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, fields

import numpy as np
import yaml

from .errors import ConfigError


class Architecture(enum.Enum):
    PIX2PIX = "pix2pix"
    CYCLEGAN = "cyclegan"
    STARGAN = "stargan"


@dataclass(frozen=True)
class DomainSpec:
    """A named target illuminant for multi-domain training.

    Components live in (0, 1] so that relighting a white-balanced image
    never pushes values above the representable range.
    """

    name: str
    illuminant: tuple[float, float, float]


@dataclass(frozen=True)
class GanConfig:
    architecture: Architecture
    image_size: int = 64
    epochs: int = 30
    batch_size: int = 4
    learning_rate: float = 2e-4
    # Eq-style fixed weighting: total = adversarial + cycle_weight * cycle.
    cycle_weight: float = 10.0
    # No established value for the classification term at this scale; it is
    # an ordinary tunable with a neutral default.
    cls_weight: float = 1.0
    base_channels: int = 16
    resnet_blocks: int = 2
    domains: tuple[DomainSpec, ...] = field(default_factory=tuple)
    seed: int = 0
    split_seed: int = 0
    split_ratio: float = 0.8


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def validate_config(cfg: GanConfig) -> GanConfig:
    arch = cfg.architecture
    _check(isinstance(arch, Architecture),
           f"architecture must be one of {[a.value for a in Architecture]}")
    _check(cfg.image_size >= 16 and cfg.image_size % 4 == 0,
           "image_size must be >= 16 and divisible by 4 (two 2x downsamplings)")
    _check(cfg.epochs >= 1, "epochs must be >= 1")
    _check(cfg.batch_size >= 1, "batch_size must be >= 1")
    _check(np.isfinite(cfg.learning_rate) and cfg.learning_rate > 0,
           "learning_rate must be positive and finite")
    _check(cfg.base_channels >= 4, "base_channels must be >= 4")
    _check(cfg.resnet_blocks >= 1, "resnet_blocks must be >= 1")
    _check(0.0 < cfg.split_ratio < 1.0, "split_ratio must sit strictly between 0 and 1")

    if arch in (Architecture.CYCLEGAN, Architecture.STARGAN):
        _check(np.isfinite(cfg.cycle_weight) and cfg.cycle_weight > 0,
               f"{arch.value} needs cycle_weight > 0; an unconstrained cycle collapses")
    if arch is Architecture.STARGAN:
        _check(len(cfg.domains) >= 2,
               "stargan needs at least 2 target domains; with one it degenerates to cyclegan")
        _check(np.isfinite(cfg.cls_weight) and cfg.cls_weight >= 0,
               "cls_weight must be finite and >= 0")
    else:
        _check(len(cfg.domains) == 0,
               f"{arch.value} is a fixed-direction mapper and takes no domain list")

    seen = set()
    for dom in cfg.domains:
        _check(isinstance(dom.name, str) and dom.name.strip() != "",
               "domain names must be non-empty strings")
        _check(dom.name not in seen, f"duplicate domain name {dom.name!r}")
        seen.add(dom.name)
        _check(dom.name != "input",
               "'input' is reserved for the source domain of the training images")
        ill = np.asarray(dom.illuminant, dtype=np.float64)
        _check(ill.shape == (3,), f"domain {dom.name!r}: illuminant must be an RGB triple")
        _check(bool(np.all(np.isfinite(ill)) and np.all(ill > 0) and np.all(ill <= 1.0)),
               f"domain {dom.name!r}: illuminant components must sit in (0, 1]")
    return cfg


_SCALARS = {
    "image_size": int,
    "epochs": int,
    "batch_size": int,
    "learning_rate": float,
    "cycle_weight": float,
    "cls_weight": float,
    "base_channels": int,
    "resnet_blocks": int,
    "seed": int,
    "split_seed": int,
    "split_ratio": float,
}


def config_from_dict(raw: dict) -> GanConfig:
    """Build and validate a config from plain dict data (file or CLI merge)."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    known = {f.name for f in fields(GanConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
    if "architecture" not in raw:
        raise ConfigError("config needs an 'architecture' key")

    kwargs: dict = {}
    try:
        kwargs["architecture"] = Architecture(str(raw["architecture"]).lower())
    except ValueError:
        raise ConfigError(
            f"unknown architecture {raw['architecture']!r}; "
            f"expected one of {[a.value for a in Architecture]}") from None

    for key, cast in _SCALARS.items():
        if key in raw:
            try:
                kwargs[key] = cast(raw[key])
            except (TypeError, ValueError):
                raise ConfigError(f"config key {key!r} must be a {cast.__name__}") from None

    if "domains" in raw:
        doms = raw["domains"]
        if not isinstance(doms, (list, tuple)):
            raise ConfigError("domains must be a list of {name, illuminant} entries")
        parsed = []
        for entry in doms:
            if not isinstance(entry, dict) or set(entry) != {"name", "illuminant"}:
                raise ConfigError("each domain entry needs exactly 'name' and 'illuminant'")
            ill = entry["illuminant"]
            if not isinstance(ill, (list, tuple)) or len(ill) != 3:
                raise ConfigError(f"domain {entry.get('name')!r}: illuminant must be 3 numbers")
            parsed.append(DomainSpec(str(entry["name"]), tuple(float(v) for v in ill)))
        kwargs["domains"] = tuple(parsed)

    return validate_config(GanConfig(**kwargs))


def load_config(path: str, overrides: dict | None = None) -> GanConfig:
    """Read a YAML or JSON config file, apply overrides, validate."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if path.endswith(".json"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    else:
        # YAML is the default; it also accepts JSON, but an explicit .json
        # extension gets the stricter parser above for clearer errors.
        try:
            raw = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path} is not valid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config root must be a mapping")
    if overrides:
        raw = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
    return config_from_dict(raw)


def config_to_dict(cfg: GanConfig) -> dict:
    """Plain-data form, round-trippable through config_from_dict."""
    out: dict = {
        "architecture": cfg.architecture.value,
        "domains": [{"name": d.name, "illuminant": list(d.illuminant)} for d in cfg.domains],
    }
    for key in _SCALARS:
        out[key] = getattr(cfg, key)
    return out
