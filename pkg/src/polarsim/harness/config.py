"""
Simulation settings.

Values are layered: built-in defaults, then a TOML file, then ``POLARSIM_*``
environment variables (a ``.env`` file in the working directory is read
first), then command-line overrides.
"""

from __future__ import annotations

import dataclasses
import logging
import tomllib
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import environ

from ..algorithms import ALGORITHMS, preset_for_rate
from ..codebook import PolarCode, construct_code, load_frozen_mask
from ..errors import ConfigError, PolarSimError
from ..numerics import QuantScheme

logger = logging.getLogger(__name__)

ENV_KEYS = {
    "workers": "POLARSIM_WORKERS",
    "batch_size": "POLARSIM_BATCH_SIZE",
    "seed": "POLARSIM_SEED",
    "max_frames": "POLARSIM_MAX_FRAMES",
}

env = environ.Env(
    POLARSIM_WORKERS=(int, None),
    POLARSIM_BATCH_SIZE=(int, None),
    POLARSIM_SEED=(int, None),
    POLARSIM_MAX_FRAMES=(int, None),
)


@dataclass(frozen=True)
class SimulationSettings:
    n: int = 10
    k: int = 512
    p: int = 64
    qi: Optional[int] = None
    qic: Optional[int] = None
    qf: Optional[int] = None
    ebn0_list: Tuple[float, ...] = (1.5, 2.0, 2.5)
    seed: int = 0
    min_frame_errors: int = 100
    max_frames: int = 10**7
    algo: str = "msa-fixed"
    design_param: float = 0.5
    frozen_mask: Optional[str] = None
    batch_size: int = 64
    workers: int = 1
    output: Optional[str] = None

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ConfigError(
                f"unknown algo {self.algo!r}; available: {', '.join(ALGORITHMS)}"
            )
        for name in ("min_frame_errors", "max_frames", "batch_size", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        parts = (self.qi, self.qic, self.qf)
        if any(v is not None for v in parts) and None in parts:
            raise ConfigError("qi, qic and qf must be given together")
        if not 0 < self.k <= (1 << self.n):
            raise ConfigError(f"k must be in [1, {1 << self.n}], got {self.k}")
        if self.qi is not None:
            try:
                QuantScheme(self.qi, self.qic, self.qf)
            except PolarSimError as exc:
                raise ConfigError(str(exc)) from exc

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.N)

    @property
    def scheme(self) -> QuantScheme:
        """Explicit (qi, qic, qf), or the preset of the nearest tabulated rate."""
        if self.qi is None:
            return preset_for_rate(float(self.rate))
        return QuantScheme(self.qi, self.qic, self.qf)

    def build_code(self) -> PolarCode:
        if self.frozen_mask:
            try:
                text = Path(self.frozen_mask).read_text(encoding="utf-8")
            except OSError as exc:
                raise ConfigError(f"cannot read frozen mask {self.frozen_mask}: {exc}") from exc
            code = load_frozen_mask(text)
            if (code.n, code.K) != (self.n, self.k):
                raise ConfigError(
                    f"frozen mask is for n={code.n} K={code.K}, settings say n={self.n} k={self.k}"
                )
            return code
        return construct_code(self.n, self.k, self.design_param)

    def replace(self, **changes) -> "SimulationSettings":
        return dataclasses.replace(self, **changes)


def _known_keys():
    return {f.name for f in dataclasses.fields(SimulationSettings)}


def _coerce(values: Dict[str, Any]) -> Dict[str, Any]:
    unknown = set(values) - _known_keys()
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
    out = dict(values)
    if "ebn0_list" in out:
        ebn0 = out["ebn0_list"]
        if isinstance(ebn0, (int, float)):
            ebn0 = [ebn0]
        try:
            out["ebn0_list"] = tuple(float(x) for x in ebn0)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"ebn0_list must be a list of numbers, got {ebn0!r}") from exc
    return out


def read_toml(path) -> Dict[str, Any]:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"configuration file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return _coerce(data)


def read_environment(env_file: Optional[Path] = None) -> Dict[str, Any]:
    env_file = Path(".env") if env_file is None else Path(env_file)
    if env_file.is_file():
        environ.Env.read_env(str(env_file))
    values = {}
    for key, var in ENV_KEYS.items():
        try:
            value = env(var)
        except ValueError as exc:
            raise ConfigError(f"invalid {var}: {exc}") from exc
        if value is not None:
            values[key] = value
    return values


def load_settings(
    config_path=None,
    overrides: Optional[Dict[str, Any]] = None,
    env_file=None,
) -> SimulationSettings:
    """Resolve defaults < TOML < environment < ``overrides`` (None values skipped)."""
    values: Dict[str, Any] = {}
    if config_path is not None:
        values.update(read_toml(config_path))
    values.update(read_environment(env_file))
    if overrides:
        values.update(_coerce({k: v for k, v in overrides.items() if v is not None}))
    try:
        settings = SimulationSettings(**values)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    logger.debug("resolved settings %s", settings)
    return settings
