"""Run configuration: an INI-style ``key = value`` file with ``[section]`` headers.

Sections and keys (all optional; defaults shown by ``RunConfig()``):

    [fene]        k, n_r, m_max
    [grid]        nx, ny, L            (L accepts "2pi", "128*pi", "pi", or a float)
    [time]        dt, t_end, sample_every
    [model]       drag (corotation | full), nu
    [init]        u_preset (zero | taylor_green | low_freq_random | gaussian | file),
                  amplitude, seed, xi_cut, wavenumber, u_file,
                  g_preset (zero | m2_bump | file), g_amplitude, envelope_scale, g_file
    [diagnostics] p_entropy_p (0 disables), lyapunov_lambda_search_max, besov (on | off)
    [scheme]      propagator (exact | cn)
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, fields

from ..coupling import DRAG_MODES


class ConfigError(ValueError):
    pass


U_PRESETS = ("zero", "taylor_green", "low_freq_random", "gaussian", "file")
G_PRESETS = ("zero", "m2_bump", "file")
PROPAGATORS = ("exact", "cn")

# key -> (section, type)
SCHEMA = {
    "k": ("fene", float), "n_r": ("fene", int), "m_max": ("fene", int),
    "nx": ("grid", int), "ny": ("grid", int), "L": ("grid", "length"),
    "dt": ("time", float), "t_end": ("time", float), "sample_every": ("time", int),
    "drag": ("model", str), "nu": ("model", float),
    "u_preset": ("init", str), "amplitude": ("init", float), "seed": ("init", int),
    "xi_cut": ("init", float), "wavenumber": ("init", int), "u_file": ("init", str),
    "g_preset": ("init", str), "g_amplitude": ("init", float), "envelope_scale": ("init", float),
    "g_file": ("init", str),
    "p_entropy_p": ("diagnostics", int), "lyapunov_lambda_search_max": ("diagnostics", int),
    "besov": ("diagnostics", "bool"),
    "propagator": ("scheme", str),
}
SECTIONS = ("fene", "grid", "time", "model", "init", "diagnostics", "scheme")

_PI = re.compile(r"^\s*([0-9.eE+-]*)\s*\*?\s*pi\s*$")


def parse_length(text: str) -> float:
    m = _PI.match(text)
    if m:
        coef = m.group(1)
        return (float(coef) if coef else 1.0) * math.pi
    return float(text)


def format_length(L: float) -> str:
    text = f"{L / math.pi:g}pi"
    return text if parse_length(text) == L else repr(L)


@dataclass(frozen=True)
class RunConfig:
    k: float = 1.0
    n_r: int = 8
    m_max: int = 2
    nx: int = 64
    ny: int = 64
    L: float = 2.0 * math.pi
    dt: float = 1e-3
    t_end: float = 1.0
    sample_every: int = 10
    drag: str = "corotation"
    nu: float = 1.0
    u_preset: str = "taylor_green"
    amplitude: float = 1.0
    seed: int = 0
    xi_cut: float = 1.0
    wavenumber: int = 1
    u_file: str = ""
    g_preset: str = "zero"
    g_amplitude: float = 0.1
    envelope_scale: float = 1.0
    g_file: str = ""
    p_entropy_p: int = 0
    lyapunov_lambda_search_max: int = 10
    besov: bool = True
    propagator: str = "exact"

    def __post_init__(self):
        validate(self)

    def to_text(self) -> str:
        """Canonical text; ``parse_config(c.to_text()) == c``."""
        out = []
        for sec in SECTIONS:
            out.append(f"[{sec}]")
            for f in fields(self):
                if SCHEMA[f.name][0] != sec:
                    continue
                v = getattr(self, f.name)
                if f.name == "L":
                    s = format_length(v)
                elif isinstance(v, bool):
                    s = "on" if v else "off"
                elif isinstance(v, float):
                    s = repr(v)
                else:
                    s = str(v)
                out.append(f"{f.name} = {s}")
            out.append("")
        return "\n".join(out)


def _need(cond, key, msg):
    if not cond:
        raise ConfigError(f"{key}: {msg}")


def validate(c: RunConfig):
    fin = math.isfinite
    _need(fin(c.k) and c.k > 0, "k", "must be positive")
    _need(c.n_r >= 2, "n_r", "must be >= 2")
    _need(c.m_max >= 2, "m_max", "must be >= 2 (the stress lives on m = +-2)")
    for key in ("nx", "ny"):
        n = getattr(c, key)
        _need(n >= 8 and n & (n - 1) == 0, key, "must be a power of two >= 8")
    _need(fin(c.L) and c.L > 0, "L", "must be positive")
    _need(fin(c.dt) and c.dt > 0, "dt", "must be positive")
    _need(fin(c.t_end) and c.t_end >= 0, "t_end", "must be >= 0")
    _need(c.sample_every >= 1, "sample_every", "must be >= 1")
    _need(c.drag in DRAG_MODES, "drag", f"must be one of {DRAG_MODES}")
    _need(fin(c.nu) and c.nu > 0, "nu", "must be positive")
    _need(c.u_preset in U_PRESETS, "u_preset", f"must be one of {U_PRESETS}")
    _need(c.u_preset != "file" or c.u_file, "u_file", "required when u_preset = file")
    _need(c.g_preset in G_PRESETS, "g_preset", f"must be one of {G_PRESETS}")
    _need(c.g_preset != "file" or c.g_file, "g_file", "required when g_preset = file")
    _need(fin(c.amplitude), "amplitude", "must be finite")
    _need(fin(c.g_amplitude), "g_amplitude", "must be finite")
    _need(c.envelope_scale > 0, "envelope_scale", "must be positive")
    _need(c.xi_cut > 0, "xi_cut", "must be positive")
    _need(c.wavenumber >= 1, "wavenumber", "must be >= 1")
    _need(c.seed >= 0, "seed", "must be >= 0")
    p = c.p_entropy_p
    if p:
        _need(p >= 2 and p % 2 == 0, "p_entropy_p", "must be 0 (off) or an even integer >= 2")
        _need(p * c.k > 1, "p_entropy_p",
              f"p*k = {p * c.k:g} violates pk > 1 (required by the L1 stress bound)")
    _need(0 <= c.lyapunov_lambda_search_max <= 60, "lyapunov_lambda_search_max", "must be in [0, 60]")
    _need(c.propagator in PROPAGATORS, "propagator", f"must be one of {PROPAGATORS}")


def _convert(key, kind, raw):
    try:
        if kind == "length":
            return parse_length(raw)
        if kind == "bool":
            low = raw.strip().lower()
            if low in ("on", "true", "yes", "1"):
                return True
            if low in ("off", "false", "no", "0"):
                return False
            raise ValueError(raw)
        if kind is int:
            v = float(raw)
            if v != int(v):
                raise ValueError(raw)
            return int(v)
        return kind(raw.strip())
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from None


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None,
                                   default_section="__none__")
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as e:
        raise ConfigError(f"line {e.lineno}: key outside a [section]: {e.line.strip()!r}") from None
    except configparser.ParsingError as e:
        lineno, line = e.errors[0]
        raise ConfigError(f"line {lineno}: syntax error: {line.strip()!r}") from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as e:
        raise ConfigError(f"line {e.lineno}: {e.message if hasattr(e, 'message') else e}") from None
    values = {}
    for sec in cp.sections():
        if sec not in SECTIONS:
            raise ConfigError(f"unknown section: {sec}")
        for key, raw in cp.items(sec):
            if key not in SCHEMA:
                raise ConfigError(f"unknown key: {key}")
            if SCHEMA[key][0] != sec:
                raise ConfigError(f"{key}: belongs in [{SCHEMA[key][0]}], found in [{sec}]")
            values[key] = _convert(key, SCHEMA[key][1], raw)
    return RunConfig(**values)


def load_config(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
