"""Flat ``key = value`` run configuration.

Values are SI without unit suffixes; ``#`` starts a comment.  ``dz0``/``dp0``
(and ``dq``/``dp`` for the shutter) accept ``auto``, meaning the configured
bound divided by the other spread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from scipy import constants as _codata

from .core import (
    HUP_BOUNDS,
    BoxConfig,
    PhysicalConstants,
    UncertaintySpec,
    derive_box_config,
    hup_bound,
)
from .errors import ConfigError
from .experiments import ShutterConfig
from .relativity import ORDERS, PhotonBounce

AUTO = "auto"


def _float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("not finite")
    return value


def _int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError("not an integer")
    return int(value)


def _auto_float(text: str) -> float | str:
    return AUTO if text.strip().lower() == AUTO else _float(text)


def _optional_float(text: str) -> float | None:
    return None if text.strip().lower() in ("none", "derive") else _float(text)


def _choice(options):
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return parse


# key -> (parser, default); a default of ... marks a required key
KEYS: dict[str, tuple] = {
    "M": (_float, ...),
    "m": (_float, ...),
    "k_spring": (_float, ...),
    "M_g": (_float, ...),
    "r0": (_float, ...),
    "ensemble_size": (_int, ...),
    "seed": (_int, ...),
    "dz0": (_auto_float, ...),
    "dp0": (_auto_float, ...),
    "c": (_float, _codata.c),
    "G": (_float, _codata.G),
    "h": (_float, _codata.h),
    "hbar": (_optional_float, None),
    "g": (_optional_float, None),
    "hup_bound": (_choice(HUP_BOUNDS), "h"),
    "order": (_choice(ORDERS), "grav_plus_sr"),
    "quadrature_tol": (_float, 1e-12),
    "workers": (_int, 1),
    "mu": (_float, 1e-3),
    "eps": (_float, 1e-3),
    "L": (_float, 1e-4),
    "dq": (_auto_float, 1e-16),
    "dp": (_auto_float, AUTO),
    "omega_slab": (_float, 2.0 * math.pi * 100.0),
    "Omega0": (_float, 3e15),
    "B": (_float, 1.0),
    "n_bounce": (_int, 1000),
    "mt_dim": (_int, 8),
    "mt_trials": (_int, 100),
    "mt_energy": (_float, 1e-24),
}

NUMERIC_KEYS = tuple(k for k, (parser, _) in KEYS.items() if parser in (_float, _int, _auto_float, _optional_float))


def default_config_path() -> Path:
    return Path(str(resources.files("photonbox") / "data" / "default.cfg"))


def parse_text(text: str, source: str = "<config>") -> dict:
    """Parse config text into raw typed values; errors carry line numbers."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = KEYS[key][0](value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {value!r} ({exc})") from None
    return values


def parse_override(item: str) -> tuple[str, object]:
    key, sep, value = item.partition("=")
    key, value = key.strip(), value.strip()
    if not sep:
        raise ConfigError(f"override {item!r} is not KEY=VALUE")
    if key not in KEYS:
        raise ConfigError(f"override: unknown key {key!r}")
    try:
        return key, KEYS[key][0](value)
    except ValueError as exc:
        raise ConfigError(f"override: bad value for {key!r}: {value!r} ({exc})") from None


@dataclass(frozen=True)
class RunConfig:
    """Typed view of a parsed configuration."""

    values: dict

    def __getitem__(self, key: str):
        return self.values[key]

    def constants(self) -> PhysicalConstants:
        v = self.values
        return PhysicalConstants(c=v["c"], G=v["G"], h=v["h"], M_g=v["M_g"], r0=v["r0"], hbar=v["hbar"])

    def bound(self, constants: PhysicalConstants | None = None) -> float:
        return hup_bound(constants or self.constants(), self.values["hup_bound"])

    def box(self, constants: PhysicalConstants | None = None) -> BoxConfig:
        v = self.values
        return derive_box_config(v["M"], v["m"], v["k_spring"], constants or self.constants(), g=v["g"])

    def spec(self, constants: PhysicalConstants | None = None) -> UncertaintySpec:
        return _spread_pair("dz0", "dp0", self.values, self.bound(constants))

    def shutter(self, constants: PhysicalConstants | None = None) -> ShutterConfig:
        v = self.values
        spec = _spread_pair("dq", "dp", v, self.bound(constants))
        return ShutterConfig(mu=v["mu"], eps=v["eps"], L=v["L"], dq=spec.dz, dp=spec.dp, omega=v["omega_slab"])

    def bounce(self) -> PhotonBounce:
        v = self.values
        return PhotonBounce(Omega0=v["Omega0"], B=v["B"], r0=v["r0"])

    def with_overrides(self, overrides: dict) -> RunConfig:
        return RunConfig({**self.values, **overrides})


def _spread_pair(kz: str, kp: str, values: dict, bound: float) -> UncertaintySpec:
    dz, dp = values[kz], values[kp]
    if dz == AUTO and dp == AUTO:
        raise ConfigError(f"at most one of {kz!r}, {kp!r} may be 'auto'")
    if dz == AUTO:
        return UncertaintySpec.saturating(bound, dp=dp)
    if dp == AUTO:
        return UncertaintySpec.saturating(bound, dz=dz)
    return UncertaintySpec(dz, dp)


def load_config(path: str | Path | None = None, overrides: list[str] | tuple[str, ...] = ()) -> RunConfig:
    """Read a config file (the shipped default if ``path`` is None)."""
    path = default_config_path() if path is None else Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    values = parse_text(text, str(path))
    for item in overrides:
        key, value = parse_override(item)
        values[key] = value
    missing = [k for k, (_, default) in KEYS.items() if default is ... and k not in values]
    if missing:
        raise ConfigError(f"{path}: missing required key(s): {', '.join(missing)}")
    for key, (_, default) in KEYS.items():
        values.setdefault(key, default)
    return RunConfig(values)
