"""Serializable run reports (JSON and flat CSV)."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from .errors import SchemaError

SCHEMA_VERSION = 1


def plain(obj):
    """Recursively convert to JSON-safe builtins; non-finite floats become strings."""
    if hasattr(obj, "to_dict"):
        return plain(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if hasattr(obj, "tolist"):
        return plain(obj.tolist())
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if hasattr(obj, "value"):  # enums
        return obj.value
    return float(obj)


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    results: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def add(self, name: str, kind: str, value, context: dict | None = None):
        """Append a result; ``context`` defaults to the run's truncation and grids."""
        ctx = context if context is not None else {
            k: self.config[k] for k in ("n", "lambda_grid") if k in self.config}
        self.results.append({"name": name, "kind": kind, "value": plain(value), "context": plain(ctx)})

    @property
    def trends(self) -> list[str]:
        out = []

        def walk(v):
            if isinstance(v, dict):
                if isinstance(v.get("trend"), str):
                    out.append(v["trend"])
                for x in v.values():
                    walk(x)
            elif isinstance(v, list):
                for x in v:
                    walk(x)
        for r in self.results:
            walk(r["value"])
        return out

    @property
    def passed(self) -> bool:
        return all(r["value"].get("passed", True) for r in self.results if isinstance(r["value"], dict))

    def to_dict(self) -> dict:
        return {"schema_version": self.schema_version, "command": self.command,
                "inputs": plain(self.inputs), "config": plain(self.config), "results": self.results}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d) -> "Report":
        try:
            return cls(d["command"], d.get("inputs", {}), list(d.get("results", [])),
                       d.get("config", {}), int(d.get("schema_version", SCHEMA_VERSION)))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"not a report: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "Report":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from None

    def __eq__(self, other):
        return isinstance(other, Report) and self.to_dict() == other.to_dict()

    def to_csv(self) -> str:
        """One row per verdict found in the results."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "condition", "at_truncation", "trend", "constant", "witness"])
        for r in self.results:
            for cond, v in _verdicts(r["value"], ""):
                wit = v.get("witness")
                w.writerow([r["name"], cond, v.get("at_truncation", ""), v["trend"],
                            "" if v.get("constant") is None else v["constant"],
                            "" if wit is None else " ".join(str(x) for x in _flat(wit))])
        return buf.getvalue()


def _flat(w):
    for x in w:
        if isinstance(x, list):
            yield from _flat(x)
        else:
            yield x


def _verdicts(v, path):
    if isinstance(v, dict):
        if isinstance(v.get("trend"), str):
            yield path or "-", v
            if "per_x" not in v:
                return
        for k, x in sorted(v.items()):
            if isinstance(x, (dict, list)):
                yield from _verdicts(x, f"{path}.{k}" if path else k)
    elif isinstance(v, list):
        for i, x in enumerate(v):
            yield from _verdicts(x, f"{path}[{i}]")
