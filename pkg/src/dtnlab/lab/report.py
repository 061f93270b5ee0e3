from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any


@dataclass
class Check:
    name: str
    value: float
    threshold: Any
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "value": _jsonable(self.value), "threshold": _jsonable(self.threshold),
                "passed": bool(self.passed)}


@dataclass
class ExperimentReport:
    name: str
    metrics: dict = field(default_factory=dict)
    rows: list[dict] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, value: float, threshold, passed: bool) -> bool:
        self.checks.append(Check(name, value, threshold, bool(passed)))
        return bool(passed)

    def at_most(self, name: str, value: float, bound: float) -> bool:
        return self.check(name, value, f"<= {bound:g}", math.isfinite(value) and value <= bound)

    def at_least(self, name: str, value: float, bound: float) -> bool:
        return self.check(name, value, f">= {bound:g}", math.isfinite(value) and value >= bound)

    def summary(self) -> dict:
        return {
            "experiment": self.name,
            "passed": self.passed,
            "metrics": {k: _jsonable(v) for k, v in self.metrics.items()},
            "checks": [c.to_dict() for c in self.checks],
            "provenance": self.provenance,
        }

    def write(self, out_dir: str | Path, fmt: str = "csv") -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        summary_path = out / f"{self.name}.summary.json"
        summary_path.write_text(json.dumps(self.summary(), indent=2))
        paths = [summary_path]
        if fmt == "json":
            rows_path = out / f"{self.name}.rows.json"
            rows_path.write_text(json.dumps([{k: _jsonable(v) for k, v in r.items()} for r in self.rows], indent=1))
        else:
            rows_path = out / f"{self.name}.rows.csv"
            write_rows_csv(self.rows, rows_path)
        paths.append(rows_path)
        return paths

    def lines(self) -> list[str]:
        return [f"{'PASS' if c.passed else 'FAIL'}  {self.name}: {c.name} = {_fmt(c.value)} ({c.threshold})"
                for c in self.checks]


def write_rows_csv(rows: list[dict], path: str | Path) -> None:
    keys: list[str] = []
    for r in rows:
        keys.extend(k for k in r if k not in keys)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=keys)
        writer.writeheader()
        for r in rows:
            writer.writerow({k: _csv_value(r.get(k)) for k in keys})


def _csv_value(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else v


def _jsonable(v):
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _fmt(v) -> str:
    return f"{v:.3e}" if isinstance(v, float) else str(v)
