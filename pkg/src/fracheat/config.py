"""Run configuration read from INI files, one section per command.

Every key has a default; unknown sections or keys are rejected. The only
environment override is ``OUTPUT_DIR``.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Literal

from .errors import ConfigError

Format = Literal["csv", "json", "both"]


@dataclass(frozen=True)
class ConstantsConfig:
    s_values: tuple[float, ...] = (0.25, 0.5, 0.75)
    eta_values: tuple[float, ...] = (0.3, 0.6, 0.9, 1.3, 1.7, 2.2)
    dims: tuple[int, ...] = (1,)
    n_values: tuple[int, ...] = (3,)
    prelimit_ns: tuple[int, ...] = (100, 1000, 10000)


@dataclass(frozen=True)
class XcheckConfig:
    space_functions: tuple[str, ...] = ("gauss-a1", "pair-a1", "bump-R2")
    space_time_functions: tuple[str, ...] = ("gauss-a1-b1-t4", "egauss-a1-b1")
    s_values: tuple[float, ...] = (0.25, 0.5, 0.75)
    methods: tuple[str, ...] = ("fourier", "subordination", "pv")
    probes: int = 20
    probe_half_width: float = 3.0
    time_max: float = 6.0
    seed: int = 0
    tolerance: float = 1e-3


@dataclass(frozen=True)
class LiftConvergeConfig:
    function: str = "gauss-a1-b1-t4"
    s: float = 0.5
    ns: tuple[int, ...] = (8, 32, 128, 512)
    probes: tuple[tuple[float, float], ...] = ((0.0, 1.0), (0.5, 2.0), (-1.0, 3.0), (0.3, 4.0), (1.2, 5.0))
    final_tolerance: float = 1e-2
    noise: float = 1e-6


@dataclass(frozen=True)
class CarlemanConfig:
    variants: tuple[str, ...] = ("thm1_L2", "thm2_Lp")
    thm1_function: str = "gauss-a1-b1-t4"
    thm2_function: str = "bump-R2-tc2-tw1"
    dims: tuple[int, ...] = (1, 2)
    s_values: tuple[float, ...] = (0.25, 0.5, 0.75)
    thm1_eta_values: tuple[float, ...] = (0.3, 0.6, 0.9, 1.3, 1.7, 2.2)
    thm2_eta_values_d1: tuple[float, ...] = (-0.3, -0.15, 0.1, 0.2, 0.3, 0.4)
    thm2_eta_values_d2: tuple[float, ...] = (-0.3, 0.1, 0.3, 0.5, 0.7, 0.9)
    p_values: tuple[float, ...] = (1.5, 2.0, 3.0)


@dataclass(frozen=True)
class RunConfig:
    out_dir: str = "out"
    format: Format = "csv"
    strict: bool = False
    jobs: int = 1
    constants: ConstantsConfig = field(default_factory=ConstantsConfig)
    xcheck: XcheckConfig = field(default_factory=XcheckConfig)
    lift_converge: LiftConvergeConfig = field(default_factory=LiftConvergeConfig)
    verify_carleman: CarlemanConfig = field(default_factory=CarlemanConfig)

    def digest(self) -> str:
        """Stable hash of every field except the output location."""
        data = asdict(self)
        data.pop("out_dir")
        return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()[:16]


_SECTIONS = {
    "run": None,
    "constants": ("constants", ConstantsConfig),
    "xcheck": ("xcheck", XcheckConfig),
    "lift-converge": ("lift_converge", LiftConvergeConfig),
    "verify-carleman": ("verify_carleman", CarlemanConfig),
}
_RUN_KEYS = {"out_dir", "format", "strict", "jobs"}


def _parse_value(raw: str, default, key: str):
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if isinstance(default, tuple):
            if default and isinstance(default[0], tuple):
                pairs = [p for p in raw.replace("\n", ";").split(";") if p.strip()]
                return tuple(tuple(float(v) for v in p.split(",")) for p in pairs)
            items = [v for v in raw.replace("\n", ",").split(",") if v.strip()]
            kind = type(default[0]) if default else str
            return tuple(kind(v.strip()) for v in items)
        return type(default)(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc


def _apply(obj, items: dict[str, str], section: str):
    known = {f.name: getattr(obj, f.name) for f in fields(obj)}
    updates = {}
    for key, raw in items.items():
        name = key.replace("-", "_")
        if name not in known:
            raise ConfigError(f"unknown key {key!r} in [{section}]")
        updates[name] = _parse_value(raw, known[name], key)
    return replace(obj, **updates)


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, default_section="__unused__")
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    cfg = RunConfig()
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        items = dict(parser.items(section))
        if section == "run":
            if set(k.replace("-", "_") for k in items) - _RUN_KEYS:
                bad = sorted(set(k.replace("-", "_") for k in items) - _RUN_KEYS)
                raise ConfigError(f"unknown key(s) {bad} in [run]")
            cfg = _apply(cfg, items, section)
        else:
            attr, _ = _SECTIONS[section]
            cfg = replace(cfg, **{attr: _apply(getattr(cfg, attr), items, section)})
    return validate(cfg)


def validate(cfg: RunConfig) -> RunConfig:
    if cfg.format not in ("csv", "json", "both"):
        raise ConfigError(f"format must be csv, json or both, got {cfg.format!r}")
    if cfg.jobs < 1:
        raise ConfigError("jobs must be at least 1")
    unknown = set(cfg.xcheck.methods) - {"fourier", "subordination", "pv"}
    if unknown:
        raise ConfigError(f"unknown xcheck methods {sorted(unknown)}")
    if cfg.xcheck.tolerance < 0:
        raise ConfigError("xcheck tolerance must be non-negative")
    unknown = set(cfg.verify_carleman.variants) - {"thm1_L2", "thm2_Lp"}
    if unknown:
        raise ConfigError(f"unknown inequality variants {sorted(unknown)}")
    if any(len(p) != 2 for p in cfg.lift_converge.probes):
        raise ConfigError("lift-converge probes are x,t pairs separated by ';'")
    return cfg


def load_config(path: str | None) -> RunConfig:
    """Defaults, overridden by the file at ``path`` and then by ``OUTPUT_DIR``."""
    cfg = RunConfig()
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                cfg = parse_config(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    env = os.environ.get("OUTPUT_DIR")
    if env:
        cfg = replace(cfg, out_dir=env)
    return cfg


def default_ini() -> str:
    """The default configuration rendered as INI text."""
    cfg = RunConfig()
    parser = configparser.ConfigParser(interpolation=None)

    def render(v) -> str:
        if isinstance(v, tuple):
            if v and isinstance(v[0], tuple):
                return "; ".join(",".join(repr(x) for x in p) for p in v)
            return ", ".join(str(x) for x in v)
        return str(v).lower() if isinstance(v, bool) else str(v)

    parser["run"] = {k: render(getattr(cfg, k)) for k in sorted(_RUN_KEYS)}
    for section, spec in _SECTIONS.items():
        if spec is None:
            continue
        obj = getattr(cfg, spec[0])
        parser[section] = {f.name: render(getattr(obj, f.name)) for f in fields(obj)}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()
