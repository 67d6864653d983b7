"""Suite execution and randomized falsification over the corpus."""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .bounds import HolderParams, Status, TheoremId, evaluate
from .convexity import DEFAULT_GRID, NonRealError
from .corpus import CORPUS, CORPUS_BY_ID, PHI_FIXED, CorpusEntry, SegmentSampler, hits_singularity
from .expr import DomainError
from .quadrature import DEFAULT_TOL, QuadratureError
from .report import Record, SuiteReport

log = logging.getLogger(__name__)

TARGETS = ("violate-with-hypothesis", "hypothesis-gap")


class ConfigError(ValueError):
    pass


@dataclass
class SuiteConfig:
    corpus: list = field(default_factory=lambda: [e.id for e in CORPUS])
    extra_corpus: list = field(default_factory=list)
    theorems: list = field(default_factory=lambda: list(TheoremId))
    sampler: SegmentSampler = field(default_factory=SegmentSampler)
    p_range: tuple = (1.0, 10.0)
    q_range: tuple = (1.0, 10.0)
    count: int = 10
    seed: int = 0
    tol: float = DEFAULT_TOL
    grid: int = DEFAULT_GRID
    workers: int = 1

    def entries(self) -> list:
        extra = {e.id: e for e in self.extra_corpus}
        return [extra[i] if i in extra else CORPUS_BY_ID[i] for i in self.corpus]

    @classmethod
    def from_dict(cls, d: dict) -> "SuiteConfig":
        known = {"corpus", "extra_corpus", "theorems", "segments", "params", "count", "draws",
                 "seed", "tol", "grid", "workers"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(sorted(unknown))}")
        try:
            extra = [CorpusEntry.from_dict(e) for e in d.get("extra_corpus", [])]
        except Exception as exc:
            raise ConfigError(f"bad extra_corpus entry: {exc}") from exc
        ids = d.get("corpus", "all")
        if ids == "all":
            ids = [e.id for e in CORPUS] + [e.id for e in extra]
        known_ids = set(CORPUS_BY_ID) | {e.id for e in extra}
        missing = [i for i in ids if i not in known_ids]
        if missing:
            raise ConfigError(f"unknown corpus ids: {', '.join(missing)}")
        th = d.get("theorems", "all")
        try:
            theorems = list(TheoremId) if th == "all" else [TheoremId(t) for t in th]
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        seg = d.get("segments", {})
        try:
            sampler = SegmentSampler(
                a_range=tuple(seg.get("a", (-2.0, 2.0))),
                length_range=tuple(seg.get("length", (0.1, 3.0))),
                phi_fixed=tuple(seg.get("phi_fixed", PHI_FIXED)),
                phi_uniform_fraction=float(seg.get("phi_uniform_fraction", 0.5)),
                phi_range=tuple(seg.get("phi_range", (0.0, math.pi / 2))),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad segments section: {exc}") from exc
        if sampler.length_range[0] <= 0:
            raise ConfigError("segment lengths must be positive")
        params = d.get("params", {})
        p_range = tuple(params.get("p", (1.0, 10.0)))
        q_range = tuple(params.get("q", (1.0, 10.0)))
        if p_range[0] < 1 or q_range[0] < 1:
            raise ConfigError("p must be drawn from (1, ...] and q from [1, ...]")
        cfg = cls(corpus=list(ids), extra_corpus=extra, theorems=theorems, sampler=sampler,
                  p_range=p_range, q_range=q_range,
                  count=int(d.get("count", d.get("draws", 10))), seed=int(d.get("seed", 0)),
                  tol=float(d.get("tol", DEFAULT_TOL)), grid=int(d.get("grid", DEFAULT_GRID)),
                  workers=int(d.get("workers", 1)))
        if cfg.count < 0 or cfg.grid < 3 or cfg.tol <= 0 or cfg.workers < 1:
            raise ConfigError("count >= 0, grid >= 3, tol > 0 and workers >= 1 are required")
        return cfg

    @classmethod
    def load(cls, path) -> "SuiteConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def metadata(self) -> dict:
        return {
            "seed": self.seed, "tol": self.tol, "grid": self.grid, "count": self.count,
            "corpus": list(self.corpus), "theorems": [t.value for t in self.theorems],
            "segments": self.sampler.to_dict(),
            "params": {"p": list(self.p_range), "q": list(self.q_range)},
            "versions": {"hhverify": __version__, "numpy": np.__version__},
        }


def _draw_params(rng: np.random.Generator, cfg: SuiteConfig) -> HolderParams:
    u = rng.random(2)
    lo, hi = cfg.p_range
    # p in (lo, hi]: 1 - u lies in (0, 1]
    p = lo + (hi - lo) * (1.0 - u[0])
    lo, hi = cfg.q_range
    q = lo + (hi - lo) * u[1]
    return HolderParams(p=float(p), q=float(q))


@dataclass(frozen=True)
class Task:
    index: int
    entry: CorpusEntry
    theorem: TheoremId
    segment: object
    params: HolderParams
    tol: float
    grid: int


def run_task(task: Task) -> Record:
    """Evaluate one instance; every failure becomes a status, never an exception."""
    base = dict(index=task.index, corpus_id=task.entry.id, expr=task.entry.expr,
                theorem=task.theorem, segment=task.segment, params=task.params)
    if hits_singularity(task.entry, task.segment):
        return Record(**base, status=Status.DOMAIN_ERROR, error="recorded singularity on segment")
    try:
        res = evaluate(task.theorem, task.entry.parsed, task.segment, task.params, task.tol,
                       task.grid)
    except DomainError as exc:
        return Record(**base, status=Status.DOMAIN_ERROR, error=str(exc))
    except QuadratureError as exc:
        return Record(**base, status=Status.CONVERGENCE_ERROR, error=str(exc))
    except NonRealError as exc:
        return Record(**base, status=Status.NON_REAL, error=str(exc))
    except (ArithmeticError, ValueError) as exc:
        return Record(**base, status=Status.ERROR, error=f"{type(exc).__name__}: {exc}")
    return Record(**base, status=res.status, result=res)


def _run(tasks: list, workers: int) -> list:
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    return [run_task(t) for t in tasks]


def run_suite(cfg: SuiteConfig) -> SuiteReport:
    """corpus x count segments x theorems, deterministic in ``cfg.seed``."""
    rng = np.random.default_rng(cfg.seed)
    tasks = []
    for entry in cfg.entries():
        for i in range(cfg.count):
            seg = cfg.sampler.draw(rng, entry)
            for th in cfg.theorems:
                tasks.append(Task(i, entry, th, seg, _draw_params(rng, cfg), cfg.tol, cfg.grid))
    records = sorted(_run(tasks, cfg.workers), key=lambda r: r.sort_key)
    return SuiteReport(dict(cfg.metadata(), mode="suite"), records)


def _matches(rec: Record, target: str) -> bool:
    if target == "violate-with-hypothesis":
        return rec.status is Status.VIOLATED_WITH_HYPOTHESIS
    r = rec.result
    return (rec.status is Status.HYPOTHESIS_FALSIFIED and r is not None
            and r.lhs <= r.rhs + 1e-8 * (1.0 + r.rhs))


def falsify_tasks(cfg: SuiteConfig) -> list:
    """The random draws of a falsification run, in draw order."""
    entries = cfg.entries()
    rng = np.random.default_rng(cfg.seed)
    tasks = []
    if entries and cfg.theorems:
        for i in range(cfg.count):
            entry = entries[int(rng.integers(len(entries)))]
            th = cfg.theorems[int(rng.integers(len(cfg.theorems)))]
            seg = cfg.sampler.draw(rng, entry)
            tasks.append(Task(i, entry, th, seg, _draw_params(rng, cfg), cfg.tol, cfg.grid))
    return tasks


def falsify(cfg: SuiteConfig, target: str = "violate-with-hypothesis") -> SuiteReport:
    """Random search over corpus x theorems x segments x parameters.

    ``cfg.count`` is the number of draws. Only records matching ``target``
    are kept; ``draw_counts`` tallies the status of every draw.
    """
    if target not in TARGETS:
        raise ConfigError(f"unknown target {target!r}; expected one of {', '.join(TARGETS)}")
    records = _run(falsify_tasks(cfg), cfg.workers)
    draw_counts = {s.value: 0 for s in Status}
    for r in records:
        draw_counts[r.status.value] += 1
    found = sorted((r for r in records if _matches(r, target)), key=lambda r: r.sort_key)
    log.info("falsify %s: %d draws, %d findings", target, len(records), len(found))
    meta = dict(cfg.metadata(), mode="falsify", target=target, draws=len(records))
    return SuiteReport(meta, found, draw_counts)
