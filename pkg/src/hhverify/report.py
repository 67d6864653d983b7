"""SuiteReport, canonical JSON and the CSV view derived from it."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional

from .bounds import BoundResult, HolderParams, Status, TheoremId
from .segment import PhiSegment

CSV_COLUMNS = ("index", "corpus_id", "theorem", "a", "b", "phi", "p", "q",
               "lhs", "rhs", "sharpness", "status")


def canonical_json(obj) -> str:
    """Sorted keys, no whitespace, floats with 17 significant digits, non-finite floats as null."""
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format(obj, ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ",".join(f"{json.dumps(k)}:{canonical_json(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass
class Record:
    """One theorem instance in a run: the bound result, or the failure that replaced it."""

    index: int
    corpus_id: str
    expr: str
    theorem: TheoremId
    segment: PhiSegment
    params: HolderParams
    status: Status
    result: Optional[BoundResult] = None
    error: Optional[str] = None

    @property
    def sort_key(self) -> tuple:
        return (self.corpus_id, self.theorem.value, self.index)

    def to_dict(self) -> dict:
        d = {
            "index": self.index,
            "corpus_id": self.corpus_id,
            "expr": self.expr,
            "theorem": self.theorem.value,
            "segment": self.segment.to_dict(),
            "params": self.params.to_dict(),
            "status": self.status.value,
            "error": self.error,
            "result": None,
        }
        if self.result is not None:
            r = self.result.to_dict()
            for k in ("theorem", "status", "segment", "params"):
                r.pop(k)
            d["result"] = r
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Record":
        result = None
        if d.get("result") is not None:
            rd = dict(d["result"], theorem=d["theorem"], status=d["status"],
                      segment=d["segment"], params=d["params"])
            result = BoundResult.from_dict(rd)
        return cls(int(d["index"]), d["corpus_id"], d["expr"], TheoremId(d["theorem"]),
                   PhiSegment.from_dict(d["segment"]), HolderParams(**d["params"]),
                   Status(d["status"]), result, d.get("error"))


def status_counts(records) -> dict:
    counts = {s.value: 0 for s in Status}
    for r in records:
        counts[r.status.value] += 1
    return counts


def worst_sharpness(records) -> dict:
    worst = {}
    for r in records:
        if r.status is Status.HOLDS and r.result is not None and r.result.sharpness is not None:
            key = r.theorem.value
            worst[key] = max(worst.get(key, 0.0), r.result.sharpness)
    return worst


@dataclass
class SuiteReport:
    metadata: dict
    records: list = field(default_factory=list)
    # falsification runs keep only matching records; these count every draw
    draw_counts: Optional[dict] = None

    @property
    def counts(self) -> dict:
        return status_counts(self.records)

    @property
    def worst_sharpness(self) -> dict:
        return worst_sharpness(self.records)

    @property
    def violations(self) -> int:
        counts = self.draw_counts if self.draw_counts is not None else self.counts
        return counts.get(Status.VIOLATED_WITH_HYPOTHESIS.value, 0)

    def to_dict(self) -> dict:
        return {
            "metadata": self.metadata,
            "results": [r.to_dict() for r in self.records],
            "summary": {"counts": self.counts, "worst_sharpness": self.worst_sharpness,
                        "draw_counts": self.draw_counts},
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "SuiteReport":
        return cls(d["metadata"], [Record.from_dict(r) for r in d["results"]],
                   d["summary"].get("draw_counts"))

    @classmethod
    def from_json(cls, text: str) -> "SuiteReport":
        return cls.from_dict(json.loads(text))


def csv_from_json(text: str) -> str:
    """Plot-ready CSV, one row per result, built from the canonical JSON."""
    data = json.loads(text)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in data["results"]:
        res = r.get("result") or {}
        writer.writerow([
            r["index"], r["corpus_id"], r["theorem"],
            r["segment"]["a"], r["segment"]["b"], r["segment"]["phi"],
            r["params"].get("p"), r["params"].get("q"),
            res.get("lhs"), res.get("rhs"), res.get("sharpness"), r["status"],
        ])
    return buf.getvalue()
