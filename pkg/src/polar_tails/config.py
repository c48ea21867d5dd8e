"""Flat ``key = value`` configuration files and model construction.

Recognized model keys::

    rho = 0.5
    radial.family = chi2 | kotz          (kotz takes radial.K, radial.N, radial.r, radial.kappa)
    angular.family = uniform | dirichlet (dirichlet takes angular.a, angular.b, angular.eps)

Grids are comma lists (``2, 4, 6``) or ``start:stop:count`` ranges.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .angular import DirichletAngular, UniformAngular
from .errors import ConfigError
from .polar_exact import PolarModel
from .radial import KotzRadial


class Config:
    def __init__(self, values: Optional[Dict[str, str]] = None, source: str = "<memory>"):
        self.values = dict(values or {})
        self.source = source

    @classmethod
    def parse(cls, text: str, source: str = "<memory>") -> "Config":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or not key:
                raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            if key in values:
                raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
            values[key] = value
        return cls(values, source)

    @classmethod
    def load(cls, path) -> "Config":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        return cls.parse(text, str(path))

    def __contains__(self, key: str) -> bool:
        return key in self.values

    def get_str(self, key: str, default: Optional[str] = None) -> str:
        if key in self.values:
            return self.values[key]
        if default is None:
            raise ConfigError(f"{self.source}: missing required key {key!r}")
        return default

    def get_float(self, key: str, default: Optional[float] = None) -> float:
        if key not in self.values:
            if default is None:
                raise ConfigError(f"{self.source}: missing required key {key!r}")
            return default
        try:
            value = float(self.values[key])
        except ValueError:
            raise ConfigError(f"{self.source}: {key} = {self.values[key]!r} is not a number") from None
        if math.isnan(value):
            raise ConfigError(f"{self.source}: {key} is nan")
        return value

    def get_int(self, key: str, default: Optional[int] = None) -> int:
        if key not in self.values:
            if default is None:
                raise ConfigError(f"{self.source}: missing required key {key!r}")
            return default
        try:
            return int(self.values[key])
        except ValueError:
            raise ConfigError(f"{self.source}: {key} = {self.values[key]!r} is not an integer") from None

    def get_grid(self, key: str, default: Optional[List[float]] = None) -> List[float]:
        if key not in self.values:
            if default is None:
                raise ConfigError(f"{self.source}: missing required key {key!r}")
            grid = list(default)
        else:
            grid = parse_grid(self.values[key], key, self.source)
        if not grid:
            raise ConfigError(f"{self.source}: {key} is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError(f"{self.source}: {key} must be strictly increasing")
        return grid


def parse_grid(text: str, key: str = "grid", source: str = "<memory>") -> List[float]:
    text = text.strip()
    if not text:
        return []
    try:
        if ":" in text:
            start, stop, count = (p.strip() for p in text.split(":"))
            n = int(count)
            if n < 1:
                raise ValueError
            return [float(v) for v in np.linspace(float(start), float(stop), n)]
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"{source}: cannot parse grid {key} = {text!r}") from None


def build_radial(cfg: Config):
    family = cfg.get_str("radial.family", "chi2").lower()
    try:
        if family == "chi2":
            return KotzRadial.chi2df()
        if family == "kotz":
            return KotzRadial(
                K=cfg.get_float("radial.K", 1.0),
                N=cfg.get_float("radial.N", 0.0),
                r=cfg.get_float("radial.r", 1.0),
                kappa=cfg.get_float("radial.kappa", 1.0),
            )
    except ValueError as exc:
        raise ConfigError(f"{cfg.source}: invalid radial parameters: {exc}") from None
    if family == "custom":
        raise ConfigError(f"{cfg.source}: custom radial laws are only available through the library API")
    raise ConfigError(f"{cfg.source}: unknown radial.family {family!r}")


def build_angular(cfg: Config):
    family = cfg.get_str("angular.family", "uniform").lower()
    try:
        if family == "uniform":
            return UniformAngular()
        if family == "dirichlet":
            return DirichletAngular(
                a=cfg.get_float("angular.a", 0.5),
                b=cfg.get_float("angular.b", 0.5),
                eps=cfg.get_float("angular.eps", math.pi),
            )
    except ValueError as exc:
        raise ConfigError(f"{cfg.source}: invalid angular parameters: {exc}") from None
    if family == "custom":
        raise ConfigError(f"{cfg.source}: custom angular densities are only available through the library API")
    raise ConfigError(f"{cfg.source}: unknown angular.family {family!r}")


def build_model(cfg: Config) -> PolarModel:
    rho = cfg.get_float("rho", 0.0)
    if not -1 < rho < 1:
        raise ConfigError(f"{cfg.source}: rho must lie in (-1, 1), got {rho}")
    return PolarModel(build_radial(cfg), build_angular(cfg), rho)
