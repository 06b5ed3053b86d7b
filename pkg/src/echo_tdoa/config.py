"""INI-style run configuration.

Four sections, every key optional::

    [scene]
    v = 343
    anchors = -1,0; 0,0; 1,0        # x,y[,z] per anchor; ids are 1..N in order
    boresight = 0,1,0
    reference_id = 1

    [signal]
    f0 = 38000
    f1 = 42000
    Tc = 0.015
    amplitude = 1
    fs = 250000

    [channel]
    A0 = 0.08
    alpha = 1.3                      # dB/m
    directivity = 0:0, 40:-6, 90:-20, 180:-30
    sigma = 0.01
    jitter = 0                       # per-anchor trigger jitter std, s

    [experiment]
    mode = pos3                      # pos3 | tdoa2
    area = -2, 2, -2, 2              # x_min, x_max, y_min, y_max
    pitch = 0.02
    latencies = 0:0.0005:0.015       # start:step:stop inclusive, or a comma list
    heuristic = on
    d_M = 0.1
    error_threshold_m = 0.01
    tdoa_error_threshold_s = 30e-6
    seed = 0
"""

from __future__ import annotations

import configparser
from pathlib import Path
from typing import Any, Callable

from .channel import AttenuationModel
from .experiment import ExperimentConfig, Mode, latency_sweep
from .geometry import Anchor, Point3
from .signal import ChirpSpec


class ConfigError(ValueError):
    pass


MODE_ALIASES = {
    "pos3": Mode.POSITION_3ANCHOR, "position_3anchor": Mode.POSITION_3ANCHOR,
    "tdoa2": Mode.TDOA_2ANCHOR, "tdoa_2anchor": Mode.TDOA_2ANCHOR,
}


def _floats(text: str, sep: str = ",") -> list[float]:
    return [float(p) for p in text.split(sep) if p.strip()]


def _switch(text: str) -> bool:
    t = text.strip().lower()
    if t in ("on", "true", "yes", "1"):
        return True
    if t in ("off", "false", "no", "0"):
        return False
    raise ValueError(f"expected on/off, got {text!r}")


def _mode(text: str) -> Mode:
    try:
        return MODE_ALIASES[text.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown mode {text!r} (pos3 or tdoa2)") from None


def _points(text: str) -> list[tuple[float, ...]]:
    pts = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        xyz = _floats(chunk)
        if len(xyz) not in (2, 3):
            raise ValueError(f"anchor {chunk.strip()!r} needs 2 or 3 coordinates")
        pts.append(tuple(xyz))
    return pts


def _table(text: str) -> tuple[tuple[float, float], ...]:
    out = []
    for item in text.split(","):
        if not item.strip():
            continue
        angle, gain = item.split(":")
        out.append((float(angle), float(gain)))
    return tuple(out)


def _latencies(text: str) -> tuple[float, ...]:
    if ":" in text:
        parts = _floats(text, ":")
        if len(parts) != 3:
            raise ValueError("latency range must be start:step:stop")
        start, step, stop = parts
        return latency_sweep(start, stop, step)
    return tuple(_floats(text))


def _area(text: str) -> tuple[float, float, float, float]:
    vals = _floats(text)
    if len(vals) != 4:
        raise ValueError("area needs x_min, x_max, y_min, y_max")
    return tuple(vals)


SCHEMA: dict[str, dict[str, Callable[[str], Any]]] = {
    "scene": {"v": float, "anchors": _points, "boresight": _floats, "reference_id": int},
    "signal": {"f0": float, "f1": float, "tc": float, "amplitude": float, "fs": float},
    "channel": {"a0": float, "alpha": float, "directivity": _table, "sigma": float,
                "jitter": float},
    "experiment": {"mode": _mode, "area": _area, "pitch": float, "latencies": _latencies,
                   "heuristic": _switch, "d_m": float, "error_threshold_m": float,
                   "tdoa_error_threshold_s": float, "seed": int},
}


def read_config_file(path: str | Path) -> dict[tuple[str, str], Any]:
    """Parse and type-convert a config file into {(section, key): value}."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}: expected a [section] header") from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"{path}: line {lineno}: cannot parse {line.strip()!r}") from None
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}".replace("\n", " ")) from None
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None

    values = {}
    for section in parser.sections():
        keys = SCHEMA.get(section.lower())
        if keys is None:
            raise ConfigError(f"{path}: unknown section [{section}]")
        for key, raw in parser.items(section):
            conv = keys.get(key.lower())
            if conv is None:
                raise ConfigError(f"{path}: unknown key '{key}' in [{section}]")
            try:
                values[(section.lower(), key.lower())] = conv(raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"{path}: [{section}] {key} = {raw!r}: {exc}") from None
    return values


def build_config(values: dict[tuple[str, str], Any]) -> ExperimentConfig:
    """Resolve parsed values against defaults and validate."""
    def get(section, key, default):
        return values.get((section, key), default)

    try:
        d = ExperimentConfig.__dataclass_fields__
        chirp = ChirpSpec(get("signal", "f0", 38e3), get("signal", "f1", 42e3),
                          get("signal", "tc", 15e-3), get("signal", "amplitude", 1.0))
        att_default = AttenuationModel()
        attenuation = AttenuationModel(get("channel", "a0", att_default.A0),
                                       get("channel", "alpha", att_default.alpha),
                                       get("channel", "directivity", att_default.directivity_table))
        anchors = None
        if ("scene", "anchors") in values:
            bore = tuple(get("scene", "boresight", [0.0, 1.0, 0.0]))
            if len(bore) != 3:
                raise ValueError("boresight needs three components")
            anchors = tuple(Anchor(k + 1, Point3(*p), bore)
                            for k, p in enumerate(values[("scene", "anchors")]))
        latencies = get("experiment", "latencies", None)
        if latencies is None:
            latencies = latency_sweep(0.0, chirp.Tc, 0.5e-3)
        return ExperimentConfig(
            area=get("experiment", "area", d["area"].default),
            pitch=get("experiment", "pitch", d["pitch"].default),
            latencies=latencies,
            sigma=get("channel", "sigma", d["sigma"].default),
            heuristic_on=get("experiment", "heuristic", True),
            mode=get("experiment", "mode", Mode.POSITION_3ANCHOR),
            error_threshold_m=get("experiment", "error_threshold_m", 0.01),
            tdoa_error_threshold_s=get("experiment", "tdoa_error_threshold_s", 30e-6),
            master_seed=get("experiment", "seed", 0),
            anchors=anchors,
            v=get("scene", "v", 343.0),
            chirp=chirp,
            attenuation=attenuation,
            fs=get("signal", "fs", 250e3),
            d_M=get("experiment", "d_m", 0.1),
            per_anchor_jitter=get("channel", "jitter", 0.0),
            reference_id=get("scene", "reference_id", None),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None


def parse_config(path: str | Path | None = None,
                 overrides: dict[tuple[str, str], Any] | None = None) -> ExperimentConfig:
    """Defaults < config file < command-line overrides."""
    values = read_config_file(path) if path is not None else {}
    values.update(overrides or {})
    return build_config(values)
