"""Run configuration, schema validation and deterministic file output."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Optional

import jsonschema
import numpy as np
import yaml

from .errors import ConfigError
from .model import (PotentialSpec, SmoothTestFunction, SpectralWindow, algebraic_well, default_cutoff_M, gaussian_well,
                    load_sampled_radial, make_test_function, power_tail)

SIG_DIGITS = 12

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_pair = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}
_list_pos = {"type": "array", "items": _pos, "minItems": 1}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["potential", "window"],
    "properties": {
        "potential": {
            "oneOf": [
                {"type": "object", "additionalProperties": False, "required": ["family"],
                 "properties": {"family": {"const": "gaussian-well"}, "depth": _num, "width": _pos}},
                {"type": "object", "additionalProperties": False, "required": ["family"],
                 "properties": {"family": {"const": "algebraic"}, "amplitude": _num, "width": _pos, "delta": _pos}},
                {"type": "object", "additionalProperties": False, "required": ["family", "omega0", "delta"],
                 "properties": {"family": {"const": "power-tail"},
                                "omega0": {"oneOf": [_pos, {"type": "array", "items": _num, "minItems": 1}]},
                                "delta": _pos, "M": _pos}},
                {"type": "object", "additionalProperties": False, "required": ["family", "path"],
                 "properties": {"family": {"const": "sampled-radial"}, "path": {"type": "string"}}},
            ]
        },
        "window": {"type": "object", "additionalProperties": False, "required": ["a", "b"],
                   "properties": {"a": _num, "b": _num}},
        "regime": {"type": "object", "additionalProperties": False,
                   "properties": {"mode": {"enum": ["semiclassical", "coupling"]},
                                  "h": _pos, "lambda": _pos, "delta": _pos,
                                  "h_list": _list_pos, "lambda_list": _list_pos}},
        "method": {"enum": ["band", "radial", "feshbach", "all"]},
        "output": {"type": "object", "additionalProperties": False,
                   "properties": {"format": {"enum": ["json", "csv"]}, "path": {"type": "string"}}},
        "numerics": {"type": "object", "additionalProperties": False,
                     "properties": {"L": _pos, "N": {"type": "integer", "minimum": 2},
                                    "n_max": {"type": "integer", "minimum": 0}, "R": _pos,
                                    "N_r": {"type": "integer", "minimum": 10}, "C": {"type": "number", "minimum": 1}}},
        "test_function": {"type": "object", "additionalProperties": False, "required": ["support"],
                          "properties": {"support": _pair, "plateau": _pair}},
        "t_grid": {"type": "object", "additionalProperties": False, "required": ["start", "stop", "num"],
                   "properties": {"start": _num, "stop": _num, "num": {"type": "integer", "minimum": 1}}},
    },
}


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML/JSON: {exc}") from exc
    if cfg is None:
        cfg = {}
    validate_config(cfg)
    cfg.setdefault("_base", str(Path(path).resolve().parent))
    return cfg


def validate_config(cfg: dict):
    body = {k: v for k, v in cfg.items() if not k.startswith("_")}
    try:
        jsonschema.validate(body, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config error at {where}: {exc.message}") from exc


def build_window(cfg: dict) -> SpectralWindow:
    w = cfg["window"]
    return SpectralWindow(float(w["a"]), float(w["b"]))


def build_potential(cfg: dict, window: Optional[SpectralWindow] = None) -> PotentialSpec:
    p = dict(cfg["potential"])
    fam = p.pop("family")
    if fam == "gaussian-well":
        return gaussian_well(p.get("depth", -2.0), p.get("width", 1.0))
    if fam == "algebraic":
        return algebraic_well(p.get("amplitude", 1.0), p.get("width", 1.0), p.get("delta", 2.0))
    if fam == "power-tail":
        M = p.get("M")
        if M is None:
            if window is None:
                raise ConfigError("power tail needs M or a window to derive it")
            M = default_cutoff_M(window)
        return power_tail(p["omega0"], p["delta"], M)
    if fam == "sampled-radial":
        path = Path(p["path"])
        if not path.is_absolute() and "_base" in cfg:
            path = Path(cfg["_base"]) / path
        return load_sampled_radial(path)
    raise ConfigError(f"unknown potential family {fam!r}")


def build_test_function(cfg: dict) -> Optional[SmoothTestFunction]:
    tf = cfg.get("test_function")
    if tf is None:
        return None
    return make_test_function(tf["support"], tf.get("plateau"))


def build_t_grid(cfg: dict):
    tg = cfg.get("t_grid")
    if tg is None:
        return None
    return np.linspace(tg["start"], tg["stop"], tg["num"])


# serialisation


def fmt(x) -> str:
    """Fixed 12-significant-digit rendering used in every output file."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.{SIG_DIGITS}g}"
    return str(x)


def rounded(obj):
    """Recursively round floats to 12 significant digits for JSON output."""
    if isinstance(obj, dict):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [rounded(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not np.isfinite(v):
            return None
        return float(f"{v:.{SIG_DIGITS}g}")
    return obj


def config_echo(cfg: dict) -> str:
    body = {k: v for k, v in cfg.items() if not k.startswith("_")}
    return json.dumps(rounded(body), sort_keys=True, separators=(",", ":"))


def render_json(cfg: dict, result) -> str:
    body = {k: v for k, v in cfg.items() if not k.startswith("_")}
    return json.dumps({"config": rounded(body), "result": rounded(result)}, sort_keys=True, indent=2) + "\n"


def render_csv(cfg: dict, header: list, rows: Iterable, footer: Iterable = ()) -> str:
    buf = io.StringIO()
    buf.write(f"# config={config_echo(cfg)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    for row in footer:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _match_umask(path):
    # mkstemp creates 0600; give the final file ordinary permissions
    mask = os.umask(0)
    os.umask(mask)
    os.chmod(path, 0o666 & ~mask)


def atomic_write(path, text: str):
    """Write through a temporary file in the same directory and rename into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        _match_umask(tmp)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_bytes(path, data: bytes):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        _match_umask(tmp)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
