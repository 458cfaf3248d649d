"""Clustering-stability estimation: matching distance, configurations, and the three protocols."""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import _accel
from . import kmeans
from .datasets import MixtureModel
from .errors import DomainError, InsufficientCandidatesError
from .gmm1d import GaussianMixture1D
from .seeding import InitScheme

Mode = Literal["randomization_only", "resampling_only", "both"]
MODES: tuple[str, ...] = ("randomization_only", "resampling_only", "both")
EVAL_SIZE = 2000


def minimal_matching_distance(a, b, k: int) -> float:
    """Fraction of points on which two labelings disagree under the best relabeling."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape != b.shape or a.ndim != 1:
        raise DomainError("labelings must be 1-D and of equal length")
    if a.size == 0:
        return 0.0
    if a.min() < 0 or b.min() < 0 or a.max() >= k or b.max() >= k:
        raise DomainError(f"labels must lie in [0, {k})")
    conf = _accel.confusion(a, b, k)
    rows, cols = linear_sum_assignment(conf, maximize=True)
    return float(a.size - conf[rows, cols].sum()) / a.size


def configuration(centers, true_means) -> np.ndarray:
    """How many centers have each true mean as their nearest one."""
    C = kmeans.as_points(centers)
    M = kmeans.as_points(true_means)
    labels, _ = _accel.assign(C, M)
    return np.bincount(labels, minlength=M.shape[0])


def count_border_crossings(trajectory: Sequence, true_means) -> int:
    """Number of (step, center) pairs whose nearest true mean changes along the trajectory."""
    if len(trajectory) == 0:
        raise DomainError("empty trajectory")
    M = kmeans.as_points(true_means)
    nearest = [_accel.assign(kmeans.as_points(c), M)[0] for c in trajectory]
    return int(sum(np.count_nonzero(p != q) for p, q in zip(nearest, nearest[1:])))


@dataclass(frozen=True)
class ProtocolSpec:
    mode: Mode
    repetitions: int
    n: int
    k_prime_range: tuple[int, ...]
    scheme: InitScheme
    restarts: int = 1
    seed: int = 0
    normalize: bool = False
    eval_size: int = EVAL_SIZE
    max_iter: int = 300

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"unknown mode {self.mode!r}")
        if self.repetitions < 2 or self.restarts < 1 or self.n < 1:
            raise DomainError("need repetitions >= 2, restarts >= 1, n >= 1")
        if not self.k_prime_range or min(self.k_prime_range) < 1:
            raise DomainError("k_prime_range must hold positive counts")


@dataclass
class RepRecord:
    rep: int
    failed: bool
    error: str = ""
    cost: float = float("nan")
    good_init: bool = False
    crossings: int = 0
    init_config: list = field(default_factory=list)
    final_config: list = field(default_factory=list)
    final_centers: list = field(default_factory=list)


@dataclass
class KResult:
    k_prime: int
    instability: float
    good_init_fraction: float
    mean_crossings: float
    failures: int
    normalizer: float = 1.0
    records: list = field(default_factory=list)


@dataclass
class StabilityReport:
    mode: str
    model: dict
    scheme: str
    seed: int
    results: list

    def by_k(self) -> dict[int, KResult]:
        return {r.k_prime: r for r in self.results}

    def curve(self) -> dict[int, float]:
        return {r.k_prime: r.instability for r in self.results}

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    CSV_COLUMNS = ("mode", "k_prime", "instability", "good_init_fraction", "mean_crossings", "failures")

    def csv_rows(self) -> list[list]:
        return [
            [self.mode, r.k_prime, repr(r.instability), repr(r.good_init_fraction), repr(r.mean_crossings), r.failures]
            for r in self.results
        ]

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if header:
            w.writerow(self.CSV_COLUMNS)
        w.writerows(self.csv_rows())
        return buf.getvalue()


def _as_model(model) -> MixtureModel:
    if isinstance(model, GaussianMixture1D):
        return MixtureModel.from_gmm1d(model)
    return model


def _best_run(X, scheme: InitScheme, k: int, rng, restarts: int, max_iter: int):
    best = None
    for _ in range(restarts):
        c0 = scheme.initialize(X, k, rng)
        res = kmeans.run(X, c0, max_iter=max_iter)
        if best is None or res.cost < best[1].cost:
            best = (c0, res)
    return best


def _random_label_baseline(n: int, k: int, rng: np.random.Generator, pairs: int = 20) -> float:
    vals = [minimal_matching_distance(rng.integers(k, size=n), rng.integers(k, size=n), k) for _ in range(pairs)]
    return float(np.mean(vals))


def run_protocol(model, spec: ProtocolSpec) -> StabilityReport:
    """Estimate instability for every K' in ``spec.k_prime_range``.

    All repetitions of one K' are compared on a shared evaluation sample drawn
    once from the model: each final clustering labels it by nearest final
    center, and instability is the mean matching distance over all unordered
    pairs of successful repetitions. Seeds are split from ``spec.seed`` so the
    report is a pure function of (model, spec).
    """
    model = _as_model(model)
    root = np.random.SeedSequence(spec.seed)
    eval_ss, data_ss, det_ss, rep_ss, norm_ss = root.spawn(5)
    X_eval, _ = model.sample(spec.eval_size, np.random.default_rng(eval_ss))
    X_fixed, _ = model.sample(spec.n, np.random.default_rng(data_ss))
    true_means = model.means

    results = []
    for k, (k_det, k_rep, k_norm) in zip(
        spec.k_prime_range,
        zip(det_ss.spawn(len(spec.k_prime_range)), rep_ss.spawn(len(spec.k_prime_range)), norm_ss.spawn(len(spec.k_prime_range))),
    ):
        scheme = spec.scheme
        if spec.mode == "resampling_only" or (scheme.kind == "deterministic" and scheme.points is None):
            pts, _ = model.sample(k, np.random.default_rng(k_det))
            scheme = InitScheme("deterministic", points=tuple(map(tuple, pts)))
        records, eval_labels = [], []
        for rep, ss in enumerate(k_rep.spawn(spec.repetitions)):
            rng = np.random.default_rng(ss)
            X = X_fixed if spec.mode == "randomization_only" else model.sample(spec.n, rng)[0]
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    c0, res = _best_run(X, scheme, k, rng, spec.restarts, spec.max_iter)
            except InsufficientCandidatesError as exc:
                records.append(RepRecord(rep, True, str(exc)))
                continue
            init_cfg = configuration(c0, true_means)
            records.append(
                RepRecord(
                    rep,
                    False,
                    cost=res.cost,
                    good_init=bool(np.all(init_cfg >= 1)),
                    crossings=count_border_crossings(res.trajectory, true_means),
                    init_config=init_cfg.tolist(),
                    final_config=configuration(res.centers, true_means).tolist(),
                    final_centers=res.centers.tolist(),
                )
            )
            eval_labels.append(_accel.assign(X_eval, res.centers)[0])
        ok = [r for r in records if not r.failed]
        dists = [minimal_matching_distance(a, b, k) for a, b in combinations(eval_labels, 2)]
        inst = float(np.mean(dists)) if dists else float("nan")
        norm = 1.0
        if spec.normalize and k > 1:
            norm = _random_label_baseline(spec.eval_size, k, np.random.default_rng(k_norm))
            inst = inst / norm
        results.append(
            KResult(
                k,
                inst,
                float(np.mean([r.good_init for r in ok])) if ok else float("nan"),
                float(np.mean([r.crossings for r in ok])) if ok else float("nan"),
                len(records) - len(ok),
                norm,
                records,
            )
        )
    return StabilityReport(spec.mode, model.to_dict(), spec.scheme.kind, spec.seed, results)


def write_reports(reports: Sequence[StabilityReport], csv_path=None, json_path=None) -> None:
    """Write several reports as one flat CSV and/or one JSON list."""
    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(StabilityReport.CSV_COLUMNS)
            for rep in reports:
                w.writerows(rep.csv_rows())
    if json_path is not None:
        with open(json_path, "w") as fh:
            json.dump([r.to_dict() for r in reports], fh, indent=1)
