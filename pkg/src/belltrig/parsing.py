"""Text and JSON input formats.

* vectors: comma-separated scalars, complex entries written ``re+imi``
  (``"0.5-0.5i"``);
* matrices: rows separated by ``;`` and entries by ``,``, or a JSON array of
  arrays;
* angles: plain numbers or simple multiples of pi (``pi/4``, ``-3pi/4``,
  ``2*pi/3``);
* config files: JSON objects as documented on each loader.
"""

from __future__ import annotations

import json
import math
import re
from pathlib import Path

import numpy as np

from .config import DomainError
from .geometry import StateVector
from .hvsim import DomainDistribution
from .inequalities import ChshConfig, Convention, WignerConfig

_PI_RE = re.compile(r"^([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\*?pi(?:/((?:\d+(?:\.\d*)?|\.\d+)))?$")


def parse_scalar(text: str) -> complex | float:
    t = text.strip().replace(" ", "")
    if not t:
        raise DomainError("empty scalar")
    try:
        if t.endswith("i") or t.endswith("j"):
            return complex(t[:-1] + "j")
        return float(t)
    except ValueError:
        raise DomainError(f"cannot parse scalar {text!r}") from None


def parse_vector(text: str) -> StateVector:
    parts = [p for p in text.split(",")]
    if not text.strip() or any(not p.strip() for p in parts):
        raise DomainError(f"cannot parse vector {text!r}")
    values = [parse_scalar(p) for p in parts]
    if any(isinstance(v, complex) for v in values):
        return StateVector(np.array(values, dtype=np.complex128))
    return StateVector(np.array(values, dtype=float))


def parse_reals(text: str) -> list[float]:
    values = [parse_scalar(p) for p in text.split(",")]
    if any(isinstance(v, complex) for v in values):
        raise DomainError(f"expected real numbers, got {text!r}")
    return [float(v) for v in values]


def parse_matrix(text: str) -> np.ndarray:
    t = text.strip()
    try:
        if t.startswith("["):
            rows = json.loads(t)
        else:
            rows = [[float(x) for x in row.split(",")] for row in t.split(";") if row.strip()]
        arr = np.array(rows, dtype=float)
    except (ValueError, TypeError):
        raise DomainError(f"cannot parse matrix {text!r}") from None
    if arr.ndim != 2:
        raise DomainError(f"matrix rows must have equal length, got {text!r}")
    return arr


def parse_angle(text: str, degrees: bool = False) -> float:
    """Parse an angle in radians (or degrees when ``degrees`` is set)."""
    t = text.strip().replace(" ", "").lower()
    m = _PI_RE.match(t)
    if m:
        coef, denom = m.group(1), m.group(2)
        c = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
        value = c * math.pi / (float(denom) if denom else 1.0)
        return value
    try:
        value = float(t)
    except ValueError:
        raise DomainError(f"cannot parse angle {text!r}") from None
    if not math.isfinite(value):
        raise DomainError(f"angle {text!r} is not finite")
    return math.radians(value) if degrees else value


def load_json(path: str | Path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: invalid JSON ({exc.msg})") from None


def chsh_config_from_json(obj: dict) -> ChshConfig:
    """``{"a": [...], "b": [...], "c": [...], "d": [...]}``."""
    try:
        return ChshConfig(*(np.array(obj[k], dtype=float) for k in "abcd"))
    except KeyError as exc:
        raise DomainError(f"CHSH config is missing key {exc.args[0]!r}") from None


def wigner_config_from_json(obj: dict) -> WignerConfig:
    """``{"theta_12": r, "theta_23": r, "theta_13": r, "convention": "spin"}`` in radians."""
    try:
        return WignerConfig(
            float(obj["theta_12"]), float(obj["theta_23"]), float(obj["theta_13"]),
            Convention.parse(obj["convention"]),
        )
    except KeyError as exc:
        raise DomainError(f"Wigner config is missing key {exc.args[0]!r}") from None


def distribution_from_json(obj) -> DomainDistribution:
    """A JSON array of 64 weights in canonical domain order."""
    if not isinstance(obj, list):
        raise DomainError("a distribution must be a JSON array of 64 weights")
    return DomainDistribution(np.array(obj, dtype=float))
