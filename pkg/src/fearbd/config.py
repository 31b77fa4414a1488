"""INI run configurations and sweep manifests.

A run config has sections [model], [grid], [solver], [initial], [output] and
an optional [analysis].  Every value is re-emitted in a canonical text form;
its sha256 is the config hash written into each artifact.
"""

from __future__ import annotations

import configparser
import hashlib
import math
import re
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from fearbd.model import PARAM_NAMES, DomainError, ModelParams
from fearbd.solver import Field, Grid1D, SolverConfig


class ConfigError(ValueError):
    pass


SECTION_KEYS = {
    "model": PARAM_NAMES,
    "grid": ("L", "n"),
    "solver": ("dt", "t_end", "scheme", "snapshot_stride", "steady_tol", "positivity_mode"),
    "initial": ("kind", "amp_u", "freq_u", "amp_v", "freq_v", "u", "v", "path"),
    "output": ("dir",),
    "analysis": ("n_modes", "mu_lower", "C_p"),
}
REQUIRED = {"model": PARAM_NAMES, "initial": ("kind",)}
INITIAL_KINDS = ("equilibrium-cosine", "constant", "file")


@dataclass(frozen=True)
class InitialSpec:
    kind: str = "equilibrium-cosine"
    amp_u: float = 0.0
    freq_u: float = 0.0
    amp_v: float = 0.0
    freq_v: float = 0.0
    u: float = 0.0
    v: float = 0.0
    path: str = ""


@dataclass(frozen=True)
class AnalysisSpec:
    n_modes: int = 20
    mu_lower: float | None = None
    C_p: float | None = None  # None means (L/pi)^2


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    grid: Grid1D = field(default_factory=Grid1D)
    solver: SolverConfig = field(default_factory=SolverConfig)
    initial: InitialSpec = field(default_factory=InitialSpec)
    output_dir: str = "run"
    analysis: AnalysisSpec = field(default_factory=AnalysisSpec)
    base_dir: Path = field(default=Path("."), compare=False)

    def to_mapping(self) -> dict[str, dict[str, str]]:
        out = {"model": {k: _fmt(v) for k, v in self.params.as_dict().items()},
               "grid": {"L": _fmt(self.grid.L), "n": str(self.grid.n)}}
        out["solver"] = {f.name: _fmt(getattr(self.solver, f.name))
                         for f in fields(SolverConfig) if f.name != "dt_min"}
        ini = self.initial
        keys = {"equilibrium-cosine": ("amp_u", "freq_u", "amp_v", "freq_v"),
                "constant": ("u", "v", "amp_u", "freq_u", "amp_v", "freq_v"),
                "file": ("path",)}[ini.kind]
        out["initial"] = {"kind": ini.kind, **{k: _fmt(getattr(ini, k)) for k in keys}}
        out["output"] = {"dir": self.output_dir}
        an = {"n_modes": str(self.analysis.n_modes)}
        if self.analysis.mu_lower is not None:
            an["mu_lower"] = _fmt(self.analysis.mu_lower)
        if self.analysis.C_p is not None:
            an["C_p"] = _fmt(self.analysis.C_p)
        out["analysis"] = an
        return out

    def to_text(self) -> str:
        lines = []
        for section, items in self.to_mapping().items():
            lines.append(f"[{section}]")
            lines.extend(f"{k} = {v}" for k, v in items.items())
            lines.append("")
        return "\n".join(lines)

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()

    def with_value(self, dotted: str, value) -> "RunConfig":
        """Copy with one field changed; a bare name refers to [model]."""
        section, _, key = dotted.rpartition(".")
        section = section or "model"
        mapping = self.to_mapping()
        if section not in SECTION_KEYS or key not in SECTION_KEYS[section]:
            raise ConfigError(f"unknown field {dotted!r}")
        mapping.setdefault(section, {})[key] = value if isinstance(value, str) else _fmt(value)
        return from_mapping(mapping, self.base_dir)

    @property
    def C_p(self) -> float:
        if self.analysis.C_p is not None:
            return self.analysis.C_p
        return (self.grid.L / math.pi) ** 2


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _line_of(text: str | None, section: str, key: str | None = None) -> str:
    if not text:
        return ""
    current = None
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        head = re.fullmatch(r"\[(.+)\]", s)
        if head:
            current = head.group(1).strip()
            if key is None and current == section:
                return f"line {lineno}: "
        elif current == section and key is not None and re.match(rf"{re.escape(key)}\s*[=:]", s):
            return f"line {lineno}: "
    return ""


def _get(mapping, section, key, conv, default=None, text=None):
    raw = mapping.get(section, {}).get(key)
    if raw is None:
        if default is None:
            raise ConfigError(f"{_line_of(text, section)}[{section}] missing required field {key!r}")
        return default
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"{_line_of(text, section, key)}[{section}] {key} = {raw!r}: {exc}") from None


def _int(raw: str) -> int:
    return int(raw)


def from_mapping(mapping: dict[str, dict[str, str]], base_dir: Path = Path("."),
                 text: str | None = None) -> RunConfig:
    for section, items in mapping.items():
        if section not in SECTION_KEYS:
            raise ConfigError(f"{_line_of(text, section)}unknown section [{section}]")
        for key in items:
            if key not in SECTION_KEYS[section]:
                raise ConfigError(f"{_line_of(text, section, key)}[{section}] unknown field {key!r}")
    for section, keys in REQUIRED.items():
        if section not in mapping:
            raise ConfigError(f"missing section [{section}]")
        for key in keys:
            if key not in mapping[section]:
                raise ConfigError(f"{_line_of(text, section)}[{section}] missing required field {key!r}")

    def build(ctor, section, **kw):
        try:
            return ctor(**kw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{_line_of(text, section)}[{section}] {exc}") from None

    params = build(ModelParams, "model",
                   **{k: _get(mapping, "model", k, float, text=text) for k in PARAM_NAMES})
    grid = build(Grid1D, "grid", L=_get(mapping, "grid", "L", float, math.pi, text),
                 n=_get(mapping, "grid", "n", _int, 256, text))
    d = SolverConfig()
    solver = build(SolverConfig, "solver",
                   dt=_get(mapping, "solver", "dt", float, d.dt, text),
                   t_end=_get(mapping, "solver", "t_end", float, d.t_end, text),
                   scheme=_get(mapping, "solver", "scheme", str, d.scheme, text),
                   snapshot_stride=_get(mapping, "solver", "snapshot_stride", _int, d.snapshot_stride, text),
                   steady_tol=_get(mapping, "solver", "steady_tol", float, d.steady_tol, text),
                   positivity_mode=_get(mapping, "solver", "positivity_mode", str, d.positivity_mode, text))
    try:
        solver.check_explicit(grid, params)
    except ValueError as exc:
        raise ConfigError(f"{_line_of(text, 'solver', 'dt')}[solver] {exc}") from None

    kind = mapping["initial"]["kind"]
    if kind not in INITIAL_KINDS:
        raise ConfigError(f"{_line_of(text, 'initial', 'kind')}[initial] kind must be one of {INITIAL_KINDS}, got {kind!r}")
    required = {"equilibrium-cosine": (), "constant": ("u", "v"), "file": ("path",)}[kind]
    kw = {}
    for key in ("amp_u", "freq_u", "amp_v", "freq_v", "u", "v"):
        kw[key] = _get(mapping, "initial", key, float, None if key in required else 0.0, text)
    kw["path"] = _get(mapping, "initial", "path", str, None if "path" in required else "", text)
    initial = InitialSpec(kind=kind, **kw)
    if kind == "constant" and (initial.u < abs(initial.amp_u) or initial.v < abs(initial.amp_v)
                               or initial.u + initial.v == 0):
        raise ConfigError("[initial] constant data must be nonnegative and not identically zero")

    mu_lower = mapping.get("analysis", {}).get("mu_lower")
    C_p = mapping.get("analysis", {}).get("C_p")
    analysis = AnalysisSpec(
        n_modes=_get(mapping, "analysis", "n_modes", _int, 20, text),
        mu_lower=None if mu_lower is None else _get(mapping, "analysis", "mu_lower", float, text=text),
        C_p=None if C_p is None else _get(mapping, "analysis", "C_p", float, text=text),
    )
    output_dir = _get(mapping, "output", "dir", str, "run", text)
    return RunConfig(params, grid, solver, initial, output_dir, analysis, Path(base_dir))


def _read_ini(text: str, source: str) -> dict[str, dict[str, str]]:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc).replace("\n", " ")) from None
    return {s: dict(parser[s]) for s in parser.sections()}


def parse_config(text: str, base_dir: Path = Path("."), source: str = "<string>") -> RunConfig:
    try:
        return from_mapping(_read_ini(text, source), base_dir, text)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, path.parent, str(path))


def initial_field(cfg: RunConfig, equilibrium=None) -> Field:
    """Build the t = 0 field; equilibrium-cosine needs the coexistence state."""
    x = cfg.grid.x
    ini = cfg.initial
    if ini.kind == "equilibrium-cosine":
        if equilibrium is None:
            raise ValueError("equilibrium-cosine initial data needs the coexistence state")
        u = equilibrium.u_star + ini.amp_u * np.cos(ini.freq_u * x)
        v = equilibrium.v_star + ini.amp_v * np.cos(ini.freq_v * x)
    elif ini.kind == "constant":
        u = ini.u + ini.amp_u * np.cos(ini.freq_u * x)
        v = ini.v + ini.amp_v * np.cos(ini.freq_v * x)
    else:
        path = cfg.base_dir / ini.path
        try:
            data = np.genfromtxt(path, delimiter=",", names=True)
        except OSError as exc:
            raise ConfigError(f"[initial] cannot read {path}: {exc}") from None
        if data.dtype.names is None or not {"u", "v"} <= set(data.dtype.names):
            raise ConfigError(f"[initial] {path} needs columns u and v")
        u, v = np.atleast_1d(data["u"]), np.atleast_1d(data["v"])
        if len(u) != cfg.grid.n:
            raise ConfigError(f"[initial] {path} has {len(u)} rows, grid has {cfg.grid.n} nodes")
    if np.min(u) < 0 or np.min(v) < 0:
        raise ConfigError("[initial] initial data must be nonnegative")
    return Field(u, v, 0.0)


@dataclass(frozen=True)
class SweepManifest:
    base: RunConfig
    parameter: str
    values: tuple[float, ...]
    aggregate: str = "aggregate.csv"
    output_dir: str = "sweep"

    def run_dir(self, index: int) -> str:
        return f"run_{index:02d}_{self.parameter}={_fmt(self.values[index])}"

    def run_configs(self) -> list[RunConfig]:
        return [self.base.with_value(self.parameter, v) for v in self.values]


def load_manifest(path) -> SweepManifest:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    mapping = _read_ini(text, str(path))
    sweep = mapping.get("sweep")
    if sweep is None:
        raise ConfigError(f"{path}: missing section [sweep]")
    allowed = {"base", "parameter", "values", "aggregate", "dir"}
    for key in sweep:
        if key not in allowed:
            raise ConfigError(f"{path}: {_line_of(text, 'sweep', key)}[sweep] unknown field {key!r}")
    for key in ("base", "parameter", "values"):
        if key not in sweep:
            raise ConfigError(f"{path}: [sweep] missing required field {key!r}")
    base = load_config(path.parent / sweep["base"])
    for key, value in mapping.get("override", {}).items():
        base = base.with_value(key, value)
    try:
        values = tuple(float(s) for s in sweep["values"].replace(",", " ").split())
    except ValueError as exc:
        raise ConfigError(f"{path}: {_line_of(text, 'sweep', 'values')}[sweep] values: {exc}") from None
    if not values:
        raise ConfigError(f"{path}: [sweep] values must be nonempty")
    if len(set(values)) != len(values):
        raise ConfigError(f"{path}: [sweep] values must be distinct")
    parameter = sweep["parameter"]
    base.with_value(parameter, values[0])  # validates the name
    return SweepManifest(base, parameter, values, sweep.get("aggregate", "aggregate.csv"),
                         sweep.get("dir", path.stem))


__all__ = [
    "ConfigError", "DomainError", "InitialSpec", "AnalysisSpec", "RunConfig", "SweepManifest",
    "parse_config", "load_config", "load_manifest", "from_mapping", "initial_field",
]
