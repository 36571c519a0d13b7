"""
Model configuration files (TOML).

Example::

    [[layers]]
    name = "air"
    sld = 0.0

    [[layers]]
    name = "film"
    thickness = 100.0
    sld = 3.5e-6
    roughness = 3.0

    [[layers]]
    name = "Si"
    sld = 2.074e-6
    roughness = 3.0

    [[fit]]
    layer = "film"
    field = "thickness"
    lower = 10.0
    upper = 300.0

    [de]
    k_m = 0.5
    k_r = 0.5

    [mcmc]
    n_samples = 10000
    burn_in = 2500
"""

from __future__ import annotations

import re
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from refl.de import DEConfig
from refl.inference import ParameterSpace, structure_binder
from refl.kernel import Layer, LayeredStructure
from refl.mcmc import MCMCConfig

TOP_KEYS = {"layers", "fit", "de", "mcmc"}
LAYER_KEYS = {"name", "thickness", "sld", "roughness"}
FIT_KEYS = {"layer", "field", "lower", "upper"}
DE_KEYS = {"k_m", "k_r", "population_size", "max_iterations", "tol"}
MCMC_KEYS = {"n_samples", "burn_in", "n_chains", "step_scale", "tune"}
FIELDS = ("thickness", "sld", "roughness")


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


class ConfigSyntaxError(ConfigError):
    pass


class UnknownKeyError(ConfigError):
    pass


class MissingSectionError(ConfigError):
    pass


class InvalidBoundsError(ConfigError):
    pass


class UnresolvedReferenceError(ConfigError):
    pass


class InvalidValueError(ConfigError):
    pass


@dataclass
class FitEntry:
    layer: str
    field: str
    lower: float
    upper: float

    @property
    def name(self) -> str:
        return f"{self.layer}.{self.field}"


@dataclass
class ModelConfig:
    structure: LayeredStructure
    fit: list = field(default_factory=list)
    de: dict = field(default_factory=dict)
    mcmc: dict = field(default_factory=dict)

    @property
    def layer_names(self) -> list:
        return [layer.name for layer in self.structure.layers]

    @property
    def parameter_names(self) -> list:
        return [f.name for f in self.fit]

    def parameter_space(self) -> ParameterSpace:
        index = {n: i for i, n in enumerate(self.layer_names)}
        slots = [(index[f.layer], f.field) for f in self.fit]
        return ParameterSpace(
            self.parameter_names,
            [f.lower for f in self.fit],
            [f.upper for f in self.fit],
            binder=structure_binder(self.structure, slots),
        )

    def de_config(self, seed: int) -> DEConfig:
        return DEConfig(seed=seed, **self.de)

    def mcmc_config(self, seed: int) -> MCMCConfig:
        return MCMCConfig(seed=seed, **self.mcmc)

    def to_dict(self) -> dict:
        """Plain-data echo, suitable for JSON reports."""
        return {
            "layers": [
                {"name": l.name, "thickness": l.thickness, "sld": l.sld, "roughness": l.roughness}
                for l in self.structure.layers
            ],
            "fit": [asdict(f) for f in self.fit],
            "de": asdict(DEConfig(**self.de)) | {"seed": None},
            "mcmc": _mcmc_echo(self.mcmc),
        }


def _mcmc_echo(mcmc: dict) -> dict:
    cfg = MCMCConfig(**mcmc)
    out = asdict(cfg)
    out["seed"] = None
    if cfg.step_scale is not None:
        out["step_scale"] = [float(v) for v in cfg.step_scale]
    return out


class _LineIndex:
    """Best-effort map from (table, index, key) to source line numbers; TOML
    parsers do not report positions for semantic errors."""

    _header = re.compile(r"^\s*(\[\[?)\s*([A-Za-z0-9_.-]+)\s*\]\]?")
    _key = re.compile(r"^\s*([A-Za-z0-9_-]+)\s*=")

    def __init__(self, text: str):
        self.headers: dict = {}
        self.keys: dict = {}
        counts: dict = {}
        current = (None, None)
        for lineno, line in enumerate(text.splitlines(), start=1):
            m = self._header.match(line)
            if m:
                name = m.group(2)
                if m.group(1) == "[[":
                    idx = counts.get(name, 0)
                    counts[name] = idx + 1
                else:
                    idx = None
                current = (name, idx)
                self.headers.setdefault(current, lineno)
                continue
            m = self._key.match(line)
            if m:
                self.keys.setdefault((*current, m.group(1)), lineno)

    def header(self, table, index=None):
        return self.headers.get((table, index))

    def key(self, table, index, key):
        return self.keys.get((table, index, key)) or self.header(table, index)


def _number(value, what: str, line) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidValueError(f"{what} must be a number, got {value!r}", line)
    if not np.isfinite(value):
        raise InvalidValueError(f"{what} must be finite", line)
    return float(value)


def parse_model_config(text: str) -> ModelConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigSyntaxError(f"invalid TOML: {exc}") from None
    lines = _LineIndex(text)

    for key in doc:
        if key not in TOP_KEYS:
            raise UnknownKeyError(f"unknown top-level key {key!r}", lines.header(key) or lines.key(None, None, key))

    if "layers" not in doc:
        raise MissingSectionError("missing [[layers]] section")
    raw_layers = doc["layers"]
    if not isinstance(raw_layers, list) or len(raw_layers) < 2:
        raise MissingSectionError(
            "[[layers]] needs at least two entries (ambient and substrate)", lines.header("layers", 0)
        )

    layers = []
    seen = set()
    for i, entry in enumerate(raw_layers):
        line = lines.header("layers", i)
        for key in entry:
            if key not in LAYER_KEYS:
                raise UnknownKeyError(f"unknown key {key!r} in layer {i}", lines.key("layers", i, key))
        name = str(entry.get("name", f"layer{i}"))
        if name in seen:
            raise InvalidValueError(f"duplicate layer name {name!r}", line)
        seen.add(name)
        vals = {k: _number(entry.get(k, 0.0), f"layer {name!r} {k}", lines.key("layers", i, k)) for k in FIELDS}
        try:
            layers.append(Layer(vals["thickness"], vals["sld"], vals["roughness"], name))
        except ValueError as exc:
            raise InvalidValueError(str(exc), line) from None
    structure = LayeredStructure(tuple(layers))
    names = [l.name for l in layers]

    fit = []
    raw_fit = doc.get("fit", [])
    if not isinstance(raw_fit, list):
        raise InvalidValueError("fit entries must be given as [[fit]] tables", lines.header("fit"))
    for i, entry in enumerate(raw_fit):
        line = lines.header("fit", i)
        for key in entry:
            if key not in FIT_KEYS:
                raise UnknownKeyError(f"unknown key {key!r} in fit entry {i}", lines.key("fit", i, key))
        missing = FIT_KEYS - set(entry)
        if missing:
            raise InvalidValueError(f"fit entry {i} is missing {sorted(missing)}", line)
        layer, fld = str(entry["layer"]), str(entry["field"])
        desc = f"fit entry {i} ({layer}.{fld})"
        if layer not in names:
            raise UnresolvedReferenceError(f"{desc}: no layer named {layer!r}", lines.key("fit", i, "layer"))
        if fld not in FIELDS:
            raise UnresolvedReferenceError(
                f"{desc}: field must be one of {FIELDS}", lines.key("fit", i, "field")
            )
        pos = names.index(layer)
        if fld == "thickness" and pos in (0, len(names) - 1):
            raise UnresolvedReferenceError(f"{desc}: semi-infinite media have no thickness", line)
        if fld == "roughness" and pos == 0:
            raise UnresolvedReferenceError(f"{desc}: the ambient has no upper interface", line)
        lo = _number(entry["lower"], f"{desc} lower", lines.key("fit", i, "lower"))
        hi = _number(entry["upper"], f"{desc} upper", lines.key("fit", i, "upper"))
        if not lo < hi:
            raise InvalidBoundsError(f"{desc}: lower ({lo}) must be < upper ({hi})", line)
        if fld in ("thickness", "roughness") and lo < 0:
            raise InvalidBoundsError(f"{desc}: {fld} bounds must be >= 0", line)
        if any(f.layer == layer and f.field == fld for f in fit):
            raise InvalidValueError(f"{desc}: parameter listed twice", line)
        fit.append(FitEntry(layer, fld, lo, hi))

    de = _table(doc, "de", DE_KEYS, lines)
    try:
        DEConfig(**de)
    except (TypeError, ValueError) as exc:
        raise InvalidValueError(f"[de]: {exc}", lines.header("de")) from None

    mcmc = _table(doc, "mcmc", MCMC_KEYS, lines)
    try:
        cfg = MCMCConfig(**mcmc)
    except (TypeError, ValueError) as exc:
        raise InvalidValueError(f"[mcmc]: {exc}", lines.header("mcmc")) from None
    if cfg.step_scale is not None and cfg.step_scale.size not in (1, len(fit)):
        raise InvalidValueError(
            f"[mcmc]: step_scale needs 1 or {len(fit)} entries", lines.key("mcmc", None, "step_scale")
        )

    return ModelConfig(structure, fit, de, mcmc)


def _table(doc, name, allowed, lines) -> dict:
    raw = doc.get(name, {})
    if not isinstance(raw, dict):
        raise InvalidValueError(f"[{name}] must be a table", lines.header(name))
    for key in raw:
        if key not in allowed:
            raise UnknownKeyError(f"unknown key {key!r} in [{name}]", lines.key(name, None, key))
    return dict(raw)


def read_model_config(path) -> ModelConfig:
    return parse_model_config(Path(path).read_text(encoding="utf-8"))
