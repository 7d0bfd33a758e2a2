"""Run configuration: schema, file loading, environment overrides.

Config files are YAML (JSON parses through the same loader). Every key can be
overridden from the environment with the NRV2XSIM_ prefix and __ as the
nesting separator, e.g. NRV2XSIM_MAC__N_SELECTED=3.
"""

import dataclasses
import os
from dataclasses import dataclass, field

import yaml

from .mode2 import Mode2Config
from .phy import RadioConfig
from .pool import InfeasibleWindowError, SensingWindowSpec, T2Policy
from .scenario import InvalidLayoutError, ScenarioConfig
from .timeline import SUPPORTED_MUS, SidelinkPattern

ENV_PREFIX = "NRV2XSIM_"


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class TimelineConfig:
    tdd_pattern: str = "DDDSUUUUUU"
    sl_bitmap: str = "111111000111"

    def pattern(self) -> SidelinkPattern:
        return SidelinkPattern(self.tdd_pattern, self.sl_bitmap)


@dataclass(frozen=True)
class PoolSettings:
    bandwidth_rbs_per_mu: dict = field(
        default_factory=lambda: {0: 216, 1: 106, 2: 51})
    subchannel_size_rbs: int = 50
    pscch_symbols: int = 1
    pssch_symbols: int = 12
    t2_policy: T2Policy = field(default_factory=T2Policy)
    t0_ms: int = 100
    tproc0_slots: int = 2

    def bandwidth_rbs(self, mu: int) -> int:
        try:
            return self.bandwidth_rbs_per_mu[mu]
        except KeyError:
            raise ConfigError(f"no bandwidth configured for mu={mu}") from None


@dataclass(frozen=True)
class KpiConfig:
    simultaneous_scope: str = "slot"

    def __post_init__(self):
        if self.simultaneous_scope not in ("slot", "resource"):
            raise ConfigError(f"bad simultaneous_scope {self.simultaneous_scope!r}")


@dataclass(frozen=True)
class RunConfig:
    mu: int = 0
    seed: int = 1
    duration_s: float = 10.0
    n_drops: int = 50
    timeline: TimelineConfig = field(default_factory=TimelineConfig)
    pool: PoolSettings = field(default_factory=PoolSettings)
    mac: Mode2Config = field(default_factory=Mode2Config)
    phy: RadioConfig = field(default_factory=RadioConfig)
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    kpi: KpiConfig = field(default_factory=KpiConfig)

    def validate(self) -> "RunConfig":
        if self.mu not in SUPPORTED_MUS:
            raise ConfigError(f"unsupported mu={self.mu}")
        if self.duration_s <= 0 or self.n_drops < 1:
            raise ConfigError("duration_s must be > 0 and n_drops >= 1")
        if self.duration_s * 1000 <= self.pool.t0_ms:
            raise ConfigError(
                f"duration {self.duration_s}s does not outlast the "
                f"{self.pool.t0_ms} ms sensing warm-up"
            )
        try:
            self.timeline.pattern()
        except ValueError as e:
            raise ConfigError(str(e)) from None
        if self.pool.bandwidth_rbs(self.mu) < self.pool.subchannel_size_rbs:
            raise ConfigError("bandwidth smaller than one subchannel")
        return self

    def duration_slots(self) -> int:
        return int(self.duration_s * 1000) * (1 << self.mu)


# -- construction from plain dicts -------------------------------------------

def _build(cls, data, path):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected mapping, got {type(data).__name__}")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(fields)
    if unknown:
        raise ConfigError(f"{path or 'config'}: unknown keys {sorted(unknown)}")
    kwargs = {}
    for name, value in data.items():
        f = fields[name]
        sub = f"{path}.{name}" if path else name
        ftype = _NESTED.get(f.type) if isinstance(f.type, str) else f.type
        if isinstance(ftype, type) and dataclasses.is_dataclass(ftype):
            kwargs[name] = _build(ftype, value, sub)
        elif name == "bandwidth_rbs_per_mu":
            kwargs[name] = {int(k): int(v) for k, v in value.items()}
        elif name == "tx_indices" and value is not None:
            kwargs[name] = tuple(int(v) for v in value)
        else:
            kwargs[name] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError, InvalidLayoutError, InfeasibleWindowError) as e:
        raise ConfigError(f"{path or 'config'}: {e}") from None


_NESTED = {
    "TimelineConfig": TimelineConfig,
    "PoolSettings": PoolSettings,
    "Mode2Config": Mode2Config,
    "RadioConfig": RadioConfig,
    "ScenarioConfig": ScenarioConfig,
    "KpiConfig": KpiConfig,
    "T2Policy": T2Policy,
}


def config_from_dict(data: dict) -> RunConfig:
    return _build(RunConfig, data, "").validate()


def _coerce(raw: str, current):
    if isinstance(current, bool):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"cannot parse boolean from {raw!r}")
    if isinstance(current, int) and not isinstance(current, bool):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    return raw


def apply_env_overrides(data: dict, environ=None) -> dict:
    """Fold NRV2XSIM_SECTION__KEY=value entries into a config dict."""
    environ = os.environ if environ is None else environ
    defaults = dataclasses.asdict(RunConfig())
    for var, raw in sorted(environ.items()):
        if not var.startswith(ENV_PREFIX):
            continue
        keys = [k.lower() for k in var[len(ENV_PREFIX):].split("__")]
        node, ref = data, defaults
        for k in keys[:-1]:
            if not isinstance(ref, dict) or k not in ref:
                raise ConfigError(f"{var}: no such config section {k!r}")
            node = node.setdefault(k, {})
            ref = ref[k]
        leaf = keys[-1]
        if not isinstance(ref, dict) or leaf not in ref:
            raise ConfigError(f"{var}: no such config key {leaf!r}")
        node[leaf] = _coerce(raw, ref[leaf])
    return data


def load_config(path, environ=None, overrides: dict | None = None) -> RunConfig:
    try:
        with open(path) as f:
            data = yaml.safe_load(f) or {}
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse {path}: {e}") from None
    data = apply_env_overrides(data, environ)
    if overrides:
        for dotted, value in overrides.items():
            node = data
            *head, leaf = dotted.split(".")
            for k in head:
                node = node.setdefault(k, {})
            node[leaf] = value
    return config_from_dict(data)
