"""INI-style run configuration. Lengths in um, modulus in GPa, force in uN."""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass

from .analysis import SWEEP_PARAMETERS
from .errors import ValidationError
from .geometry import UM, RssParams
from .suspension import LayoutKind

SCHEMA = {
    "spring": ("N", "l1", "l2", "l3", "l4", "l5", "w_o", "w_p", "w_pc"),
    "device": ("thickness_um", "youngs_modulus_gpa", "reflector_side_um"),
    "suspension": ("layout", "l_m_um", "l_rss_um"),
    "sweep": ("parameter", "values"),
    "load": ("fx_max_un", "samples"),
}

DEFAULT_SPRING_UM = {"l1": 40.0, "l2": 46.0, "l3": 6.0, "l4": 6.0, "l5": 12.0,
                     "w_o": 30.0, "w_p": 3.0, "w_pc": 3.0}


class ConfigError(ValidationError):
    def __init__(self, field, message, line=None):
        where = f" (line {line})" if line else ""
        super().__init__(field, message + where)
        self.line = line


@dataclass(frozen=True)
class Config:
    params: RssParams
    reflector_side: float = 400 * UM
    layout: LayoutKind = LayoutKind.CENTROSYMMETRIC
    l_m_override: float | None = None
    l_rss_override: float | None = None
    sweep_parameter: str = "N"
    sweep_values: tuple | None = None
    fx_max: float = 10e-6
    samples: int = 11

    @property
    def reflector_half_len(self):
        return 0.5 * self.reflector_side


def _line_of(text, section, key=None):
    sec = None
    for i, raw in enumerate(text.splitlines(), start=1):
        line = re.split(r"\s[;#]", raw, maxsplit=1)[0].strip()
        m = re.match(r"\[(.+)\]$", line)
        if m:
            sec = m.group(1).strip().lower()
            if key is None and sec == section:
                return i
        elif key is not None and sec == section and re.match(rf"{re.escape(key)}\s*[=:]", line, re.IGNORECASE):
            return i
    return None


def parse_config(text: str = "") -> Config:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("config", str(exc).splitlines()[0], getattr(exc, "lineno", None)) from None

    vals: dict[tuple[str, str], str] = {}
    for sec in cp.sections():
        s = sec.strip().lower()
        if s not in SCHEMA:
            raise ConfigError(sec, "unknown section", _line_of(text, s))
        allowed = {k.lower(): k for k in SCHEMA[s]}
        for key, raw in cp.items(sec):
            if key.lower() not in allowed:
                raise ConfigError(f"{s}.{key}", "unknown key", _line_of(text, s, key))
            vals[(s, allowed[key.lower()])] = raw.strip()

    def number(sec, key, default, cast=float):
        if (sec, key) not in vals:
            return default
        raw = vals[(sec, key)]
        try:
            return cast(raw)
        except ValueError:
            raise ConfigError(key, f"cannot parse {raw!r} as {cast.__name__}", _line_of(text, sec, key)) from None

    lengths = {k: number("spring", k, v) for k, v in DEFAULT_SPRING_UM.items()}
    try:
        params = RssParams.from_um(
            number("spring", "N", 1, int),
            thickness_um=number("device", "thickness_um", 30.0),
            youngs_modulus_gpa=number("device", "youngs_modulus_gpa", 169.0),
            **lengths,
        )
    except ConfigError:
        raise
    except ValidationError as exc:
        sec = "device" if exc.field in ("thickness", "youngs_modulus") else "spring"
        cfg_key = {"thickness": "thickness_um", "youngs_modulus": "youngs_modulus_gpa"}.get(exc.field, exc.field)
        raise ConfigError(cfg_key, str(exc).split(": ", 1)[-1], _line_of(text, sec, cfg_key)) from None

    side = number("device", "reflector_side_um", 400.0)
    layout_raw = vals.get(("suspension", "layout"), "centrosymmetric").lower()
    try:
        layout = LayoutKind(layout_raw)
    except ValueError:
        raise ConfigError("layout", f"expected centrosymmetric or axisymmetric, got {layout_raw!r}",
                          _line_of(text, "suspension", "layout")) from None
    l_m = number("suspension", "l_m_um", None)
    l_rss = number("suspension", "l_rss_um", None)

    param = vals.get(("sweep", "parameter"), "N")
    sweep_values = None
    if ("sweep", "values") in vals:
        items = [v.strip() for v in vals[("sweep", "values")].split(",") if v.strip()]
        try:
            sweep_values = tuple(int(v) if param == "N" else float(v) * UM for v in items)
        except ValueError:
            raise ConfigError("values", "expected a comma-separated list of numbers",
                              _line_of(text, "sweep", "values")) from None

    fx_max = number("load", "fx_max_un", 10.0)
    samples = number("load", "samples", 11, int)
    checks = [
        ("reflector_side_um", "device", side),
        ("l_m_um", "suspension", l_m),
        ("l_rss_um", "suspension", l_rss),
        ("fx_max_un", "load", fx_max),
    ]
    for key, sec, v in checks:
        if v is not None and not v > 0:
            raise ConfigError(key, f"must be > 0, got {v!r}", _line_of(text, sec, key))
    if samples < 2:
        raise ConfigError("samples", "need at least 2 samples", _line_of(text, "load", "samples"))

    if param not in SWEEP_PARAMETERS:
        raise ConfigError("parameter", f"unknown sweep parameter {param!r}", _line_of(text, "sweep", "parameter"))

    return Config(
        params=params,
        reflector_side=side * UM,
        layout=layout,
        l_m_override=None if l_m is None else l_m * UM,
        l_rss_override=None if l_rss is None else l_rss * UM,
        sweep_parameter=param,
        sweep_values=sweep_values,
        fx_max=fx_max * 1e-6,
        samples=samples,
    )


def load_config(path=None) -> Config:
    if path is None:
        return parse_config("")
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
