"""Seeded C_alpha sweeps: recall and sample fraction over repeated trials."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .algorithm import RunConfig, run
from .core import Dataset, Query, SamplingMode, Variant
from .datagen import SubspaceSpec, generate_coherent, generate_subspace, read_matrix
from .oracle import brute_force, recall

GENERATORS = ("subspace", "coherent", "csv")
CSV_COLUMNS = (
    "c_alpha",
    "trial",
    "seed",
    "recall",
    "sample_fraction",
    "iterations",
    "total_coordinate_evals",
    "wall_time_ms",
)


class SweepError(RuntimeError):
    def __init__(self, c_alpha: float, trial: int, seed: int, cause: BaseException):
        super().__init__(f"trial failed (c_alpha={c_alpha!r}, trial={trial}, seed={seed}): {cause!r}")
        self.c_alpha, self.trial, self.seed = c_alpha, trial, seed


@dataclass(frozen=True)
class ExperimentSpec:
    c_alphas: tuple[float, ...] = (1.0,)
    trials: int = 20
    generator: str = "subspace"
    n: int = 1000
    m: int = 12288
    p: int = 10
    data: str | None = None
    normalize: bool = False
    k: int = 10
    h: int = 10
    delta: float = 0.001
    variant: Variant = Variant.EXPERIMENTAL
    sampling_mode: SamplingMode = SamplingMode.WITH_REPLACEMENT
    seed: int = 0
    threads: int = 1
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        object.__setattr__(self, "c_alphas", tuple(float(c) for c in self.c_alphas))
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "sampling_mode", SamplingMode(self.sampling_mode))
        if not self.c_alphas:
            raise ValueError("the C_alpha grid is empty")
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}; choose from {GENERATORS}")
        if self.generator == "csv" and not self.data:
            raise ValueError("the csv generator needs a data path")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    @classmethod
    def from_json(cls, path) -> "ExperimentSpec":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["variant"] = self.variant.value
        d["sampling_mode"] = self.sampling_mode.value
        d["c_alphas"] = list(self.c_alphas)
        return d


@dataclass
class TrialRecord:
    c_alpha: float
    trial: int
    seed: int
    recall: float
    sample_fraction: float
    iterations: int
    total_coordinate_evals: int
    wall_time_ms: float


@dataclass
class Summary:
    c_alpha: float
    recall_median: float
    recall_q25: float
    recall_q75: float
    fraction_median: float
    fraction_q25: float
    fraction_q75: float
    iterations_median: float


@dataclass
class SweepResult:
    spec: ExperimentSpec
    records: list[TrialRecord]
    summaries: list[Summary] = field(default_factory=list)


def trial_seed(master: int, grid_index: int, trial: int) -> int:
    return int(np.random.SeedSequence([int(master), grid_index, trial]).generate_state(1, np.uint64)[0])


def make_instance(spec: ExperimentSpec, seed: int, matrix: np.ndarray | None = None) -> tuple[Dataset, Query]:
    if spec.generator == "subspace":
        return generate_subspace(SubspaceSpec(spec.n, spec.m, spec.p, seed))
    if spec.generator == "coherent":
        return generate_coherent(spec.n, spec.m, seed)
    if matrix is None:
        matrix = load_matrix(spec)
    n = min(spec.n, matrix.shape[0] - 1)
    rows = np.random.default_rng(seed).choice(matrix.shape[0], size=n + 1, replace=False)
    return Dataset(matrix[rows[:-1]]), Query(matrix[rows[-1]])


def load_matrix(spec: ExperimentSpec) -> np.ndarray:
    X = read_matrix(spec.data)
    if spec.normalize:
        lo, hi = X.min(), X.max()
        X = (X - lo) / (hi - lo) - 0.5 if hi > lo else np.zeros_like(X)
    return X


def run_trial(spec: ExperimentSpec, grid_index: int, trial: int, matrix=None) -> TrialRecord:
    c_alpha = spec.c_alphas[grid_index]
    seed = trial_seed(spec.seed, grid_index, trial)
    try:
        data, query = make_instance(spec, seed, matrix)
        cfg = RunConfig(k=spec.k, h=spec.h, delta=spec.delta, variant=spec.variant, c_alpha=c_alpha,
                        sampling_mode=spec.sampling_mode, seed=seed)
        t0 = time.perf_counter()
        report = run(data, query, cfg)
        elapsed = time.perf_counter() - t0
        truth = brute_force(data, query, spec.k)
    except Exception as exc:
        raise SweepError(c_alpha, trial, seed, exc) from exc
    return TrialRecord(
        c_alpha=c_alpha,
        trial=trial,
        seed=seed,
        recall=recall(report.result_set, truth.k_set),
        sample_fraction=report.sample_fraction,
        iterations=report.iterations,
        total_coordinate_evals=report.total_coordinate_evals,
        wall_time_ms=1000.0 * elapsed,
    )


def summarize(records: list[TrialRecord], c_alphas) -> list[Summary]:
    out = []
    for c in c_alphas:
        rs = [r for r in records if r.c_alpha == c]
        rec = np.array([r.recall for r in rs])
        frac = np.array([r.sample_fraction for r in rs])
        it = np.array([r.iterations for r in rs], dtype=float)
        rq = np.percentile(rec, [25, 50, 75])
        fq = np.percentile(frac, [25, 50, 75])
        out.append(Summary(c, float(rq[1]), float(rq[0]), float(rq[2]),
                           float(fq[1]), float(fq[0]), float(fq[2]), float(np.median(it))))
    return out


def run_sweep(spec: ExperimentSpec) -> SweepResult:
    matrix = load_matrix(spec) if spec.generator == "csv" else None
    tasks = [(ci, t) for ci in range(len(spec.c_alphas)) for t in range(spec.trials)]
    if spec.threads == 1:
        records = [run_trial(spec, ci, t, matrix) for ci, t in tasks]
    else:
        # the compiled kernel releases the GIL, so threads overlap real work
        with ThreadPoolExecutor(max_workers=spec.threads) as pool:
            records = list(pool.map(lambda task: run_trial(spec, *task, matrix), tasks))
    records.sort(key=lambda r: (spec.c_alphas.index(r.c_alpha), r.trial))
    return SweepResult(spec, records, summarize(records, spec.c_alphas))


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def to_csv(result: SweepResult, timing: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in result.records:
        row = asdict(r)
        if not timing:
            row["wall_time_ms"] = ""
        w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def to_json(result: SweepResult, timing: bool = False) -> str:
    records = []
    for r in result.records:
        row = asdict(r)
        if not timing:
            row["wall_time_ms"] = None
        records.append(row)
    doc = {
        "spec": result.spec.to_dict(),
        "records": records,
        "summaries": [asdict(s) for s in result.summaries],
    }
    return json.dumps(doc, indent=2) + "\n"


def emit(result: SweepResult, path, format: str = "csv", timing: bool = False) -> Path:
    """Write sweep results. Wall-clock columns are left empty unless ``timing``
    is set, so repeated runs with the same seed produce identical files."""
    text = to_csv(result, timing) if format == "csv" else to_json(result, timing)
    path = Path(path)
    path.write_text(text, encoding="utf-8")
    return path
