"""Run configuration: embedded defaults, an optional key=value file and flag overrides."""
from __future__ import annotations

import configparser
import os
from dataclasses import asdict, dataclass, field, replace

from .errors import SchemaError
from .matrix import C_GRID, DEFAULT_GRID
from .seqcore import DEFAULT_N
from .verdict import TOL_TREND
from .weightfn import TOL_CONJ
from .witness import T_GRID

ENV_VAR = "WEIGHTLAB_CONFIG"
SECTION = "weightlab"


@dataclass(frozen=True)
class Config:
    n: int = DEFAULT_N
    lambda_grid: tuple = DEFAULT_GRID
    t_grid: tuple = T_GRID
    c_grid: tuple = C_GRID
    tol_trend: float = TOL_TREND
    tol_conj: float = TOL_CONJ
    source: str = field(default="defaults", compare=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("lambda_grid", "t_grid", "c_grid"):
            d[k] = [float(v) for v in d[k]]
        return d

    def override(self, **kw) -> "Config":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def parse_grid(text: str) -> tuple:
    """``"1,2,4"`` or a geometric range ``"2^-4..6"``."""
    text = text.strip()
    try:
        if "^" in text and ".." in text:
            base, rng = text.split("^", 1)
            lo, hi = rng.split("..")
            return tuple(float(base) ** i for i in range(int(lo), int(hi) + 1))
        vals = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise SchemaError(f"cannot parse grid {text!r}") from None
    if not vals:
        raise SchemaError("empty grid")
    return vals


_PARSERS = {
    "n": int,
    "lambda_grid": parse_grid,
    "t_grid": parse_grid,
    "c_grid": parse_grid,
    "tol_trend": float,
    "tol_conj": float,
}


def load_config(path: str | None = None) -> Config:
    """Read ``path`` (or ``$WEIGHTLAB_CONFIG``); section headers are optional."""
    path = path or os.environ.get(ENV_VAR)
    if not path:
        return Config()
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(f"cannot read config {path}: {exc}") from None
    if not text.lstrip().startswith("["):
        text = f"[{SECTION}]\n" + text
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise SchemaError(f"bad config {path}: {exc}") from None
    values = {}
    for key, raw in cp.items(SECTION) if cp.has_section(SECTION) else []:
        key = key.replace("-", "_")
        if key not in _PARSERS:
            raise SchemaError(f"unknown config key {key!r}")
        try:
            values[key] = _PARSERS[key](raw)
        except ValueError:
            raise SchemaError(f"bad value for {key}: {raw!r}") from None
    return Config(source=str(path), **values)
