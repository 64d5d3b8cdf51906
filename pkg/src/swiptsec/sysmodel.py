"""System configuration, unit conversions, scenario geometry and seeding.

All powers are in watts, times in seconds and harvested energies in
watt-seconds.  Config files are TOML; any power key may instead be given in
dBm with a ``_dbm`` suffix (``sigma2_dbm = -90``).
"""
from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    """Raised for parameter combinations outside the model's domain."""


def dbm_to_watts(x):
    """Convert dBm to watts (scalar or array)."""
    if np.ndim(x):
        return 10.0 ** ((np.asarray(x, dtype=float) - 30.0) / 10.0)
    return 10.0 ** ((x - 30.0) / 10.0)


def watts_to_dbm(p):
    """Inverse of :func:`dbm_to_watts`."""
    if np.ndim(p):
        return 10.0 * np.log10(np.asarray(p, dtype=float)) + 30.0
    return 10.0 * math.log10(p) + 30.0


def pathloss(d):
    """Large-scale fading ``1e-3 * d**-3`` for a distance in meters."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr <= 0) or not np.all(np.isfinite(d_arr)):
        raise ConfigError(f"distance must be positive and finite, got {d!r}")
    out = 1e-3 * d_arr ** -3.0
    return float(out) if out.ndim == 0 else out


# Stream roles for substream derivation.  Appending new roles is safe; never
# renumber existing ones or seeded results change.
ROLE_SCENARIO = 0
ROLE_CHANNEL = 1
ROLE_PILOT = 2
ROLE_UPLINK_NOISE = 3
ROLE_SYMBOLS = 4
ROLE_DOWNLINK_NOISE = 5
ROLE_PROCESSING_NOISE = 6
ROLE_MC_CHUNK = 7


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, *key)``.

    Derivation is a pure function of its arguments, so any assignment of
    keys to workers reproduces the same draws.
    """
    if seed < 0 or seed >= 2 ** 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class EhParams:
    """Logistic energy-harvester constants."""

    a: float = 150.0
    b: float = 0.014
    P_s_user: float = 1e-7
    P_s_eve: float = 1e-7
    P_sen: float = 2.4e-5

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ConfigError("EH constants a and b must be positive")
        if not (self.P_s_user > 0 and self.P_s_eve > 0):
            raise ConfigError("saturation powers must be positive")
        if self.P_sen < 0:
            raise ConfigError("sensitivity P_sen must be nonnegative")


@dataclass(frozen=True)
class Geometry:
    d_user: tuple[float, ...] = (11.0, 13.0, 16.0, 18.0)
    d_eve: float = 15.0

    def __post_init__(self):
        object.__setattr__(self, "d_user", tuple(float(d) for d in self.d_user))
        if any(not (d > 0) for d in self.d_user) or not (self.d_eve > 0):
            raise ConfigError("all distances must be strictly positive")


@dataclass(frozen=True)
class SystemConfig:
    """Immutable system parameters; validated on construction.

    ``Q_budget_user`` / ``Q_budget_eve`` are the previous-frame energies that
    fund the uplink pilots when ``funding == "budget"``; with
    ``funding == "steady"`` the pilots are funded by the self-consistent
    harvested energy instead (see :mod:`swiptsec.optimize`).
    """

    M: int = 200
    K: int = 4
    eta: int = 4
    T: float = 5e-3
    tau: float = 4e-5
    sigma2: float = 1e-12
    sigma2_ant: float = 1e-10
    sigma2_s: float = 1e-8
    W_E: float = 1.0
    rho_eve: float = 0.5
    zeta: float = 0.5
    eh: EhParams = field(default_factory=EhParams)
    geometry: Geometry = field(default_factory=Geometry)
    Q_budget_user: float = 1e-5
    Q_budget_eve: float = 1e-5
    funding: str = "budget"

    def __post_init__(self):
        for name in ("M", "K", "eta"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.eta < self.K:
            raise ConfigError(f"pilot length eta={self.eta} < K={self.K}: orthogonal pilots impossible")
        if not (0 < self.tau < self.T):
            raise ConfigError("need 0 < tau < T")
        for name in ("sigma2", "sigma2_ant", "sigma2_s"):
            if not (getattr(self, name) > 0):
                raise ConfigError(f"{name} must be strictly positive")
        if self.W_E < 0:
            raise ConfigError("W_E must be nonnegative")
        if not (0 < self.rho_eve < 1):
            raise ConfigError("rho_eve must lie in (0, 1)")
        if not (0 <= self.zeta <= 1):
            raise ConfigError("zeta must lie in [0, 1]")
        if self.Q_budget_user < 0 or self.Q_budget_eve < 0:
            raise ConfigError("pilot energy budgets must be nonnegative")
        if self.funding not in ("budget", "steady"):
            raise ConfigError("funding must be 'budget' or 'steady'")
        if len(self.geometry.d_user) != self.K:
            raise ConfigError(f"geometry has {len(self.geometry.d_user)} user distances, K={self.K}")

    @property
    def betas(self) -> np.ndarray:
        return np.atleast_1d(pathloss(np.array(self.geometry.d_user)))

    @property
    def beta_w(self) -> float:
        return pathloss(self.geometry.d_eve)

    @property
    def harvest_time(self) -> float:
        return self.T - self.tau

    @property
    def prelog(self) -> float:
        return (self.T - self.tau) / self.T

    def replace(self, **changes) -> "SystemConfig":
        """Copy with changes; EH and geometry fields may be passed flat."""
        eh_keys = {f.name for f in dataclasses.fields(EhParams)}
        eh_changes = {k: changes.pop(k) for k in list(changes) if k in eh_keys}
        geo = {k: changes.pop(k) for k in ("d_user", "d_eve") if k in changes}
        if eh_changes:
            changes["eh"] = dataclasses.replace(self.eh, **eh_changes)
        if geo:
            changes["geometry"] = dataclasses.replace(self.geometry, **geo)
        if "K" in changes and "geometry" not in changes and changes["K"] != self.K:
            d = self.geometry.d_user
            changes["geometry"] = Geometry(tuple((d * changes["K"])[: changes["K"]]), self.geometry.d_eve)
        return dataclasses.replace(self, **changes)

    def as_flat_dict(self) -> dict[str, Any]:
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, (EhParams, Geometry)):
                out.update(dataclasses.asdict(v))
            else:
                out[f.name] = v
        out["d_user"] = list(out["d_user"])
        return out


def table1_config(**changes) -> SystemConfig:
    """Baseline scenario; unspecified values use the package defaults."""
    return SystemConfig().replace(**changes) if changes else SystemConfig()


def draw_scenario(seed: int, K: int, distance_range: Sequence[float] = (10.0, 20.0),
                  index: int = 0) -> Geometry:
    """K user distances and one eavesdropper distance, i.i.d. uniform; ``index`` selects the draw."""
    lo, hi = map(float, distance_range)
    if hi < lo:
        raise ConfigError("distance range must satisfy lo <= hi")
    if lo <= 0:
        raise ConfigError("distances must be positive")
    rng = substream(seed, ROLE_SCENARIO, index)
    d = rng.uniform(lo, hi, size=K + 1) if hi > lo else np.full(K + 1, lo)
    return Geometry(tuple(d[:K]), float(d[K]))


_EH_KEYS = {f.name for f in dataclasses.fields(EhParams)}
_TOP_KEYS = {f.name for f in dataclasses.fields(SystemConfig)} - {"eh", "geometry"}
_POWER_KEYS = {"sigma2", "sigma2_ant", "sigma2_s", "P_s_user", "P_s_eve", "P_sen"}


def config_from_mapping(data: Mapping[str, Any], base: SystemConfig | None = None) -> SystemConfig:
    """Build a config from a flat or sectioned mapping (``[eh]``, ``[geometry]``)."""
    flat: dict[str, Any] = {}
    for k, v in data.items():
        if k in ("eh", "geometry") and isinstance(v, Mapping):
            flat.update(v)
        else:
            flat[k] = v
    resolved: dict[str, Any] = {}
    for k, v in flat.items():
        if k.endswith("_dbm"):
            name = k[: -len("_dbm")]
            if name not in _POWER_KEYS:
                raise ConfigError(f"unknown dBm key {k!r}")
            if name in flat:
                raise ConfigError(f"both {name!r} and {k!r} given")
            resolved[name] = dbm_to_watts(float(v))
        elif k in _TOP_KEYS or k in _EH_KEYS or k in ("d_user", "d_eve"):
            resolved[k] = v
        else:
            raise ConfigError(f"unknown config key {k!r}")
    if "d_user" in resolved:
        resolved["d_user"] = tuple(resolved["d_user"])
        resolved.setdefault("K", len(resolved["d_user"]))
    return (base or SystemConfig()).replace(**resolved)


def load_config(path: str | Path, base: SystemConfig | None = None) -> SystemConfig:
    with open(path, "rb") as fh:
        return config_from_mapping(tomllib.load(fh), base)
