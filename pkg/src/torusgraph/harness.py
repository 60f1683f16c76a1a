"""Experiment orchestration: sweeps, replicates, CSV/JSON reporting.

A plan is a list of sweep points (N, c, weight law) with a replicate
count, an estimator (C/N^2 or C/log N^2), and a root seed.  Replicate
seeds are derived from (root, point, replicate) through a counter-based
scheme, so results are reproducible bit-for-bit regardless of how the
replicates are scheduled across workers.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .components import largest_component
from .geometry import TorusConfig
from .model import ModelConfig, WeightSpec, c_of_lambda, lambda_N, lambda_of_c, sample_graph
from .theory import TheoryReport, build_report
from .branching import binomial_poisson_tv

ESTIMATORS = ("C_over_N2", "C_over_logN2")


# ---------------------------------------------------------------------------
# weight spec <-> config dict
# ---------------------------------------------------------------------------

def weights_from_dict(d: dict | None) -> WeightSpec:
    if d is None:
        return WeightSpec.constant(1.0)
    kind = d.get("kind", "constant")
    if kind == "constant":
        return WeightSpec.constant(float(d.get("value", 1.0)))
    if kind == "discrete":
        return WeightSpec.discrete(d["values"], d["probs"])
    if kind == "truncated_exponential":
        return WeightSpec.truncated_exponential(
            rate=float(d.get("rate", 1.0)), upper=float(d.get("upper", 8.0))
        )
    raise ValueError(f"unknown weight kind in config: {kind!r}")


def weights_to_dict(w: WeightSpec) -> dict:
    if w.kind == "constant":
        return {"kind": "constant", "value": w._data["value"]}
    if w.kind == "discrete":
        return {
            "kind": "discrete",
            "values": list(map(float, w._data["values"])),
            "probs": list(map(float, w._data["probs"])),
        }
    return {"kind": "continuous", "lo": w._data["lo"], "hi": w._data["hi"]}


# ---------------------------------------------------------------------------
# plan
# ---------------------------------------------------------------------------

@dataclass
class SweepPoint:
    N: int
    c: float
    weights: dict = field(default_factory=lambda: {"kind": "constant", "value": 1.0})

    @property
    def lam(self) -> float:
        return lambda_of_c(self.c)

    def weight_spec(self) -> WeightSpec:
        return weights_from_dict(self.weights)


@dataclass
class ExperimentPlan:
    sweep: list[SweepPoint]
    replicates: int = 1
    estimator: str = "C_over_N2"
    seed: int = 0
    output: str | None = None

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"estimator must be one of {ESTIMATORS}")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentPlan":
        weights = d.get("weights")
        if "sweep" in d:
            sweep = [
                SweepPoint(
                    N=int(p["N"]),
                    c=_point_c(p),
                    weights=p.get("weights", weights) or {"kind": "constant", "value": 1.0},
                )
                for p in d["sweep"]
            ]
        else:
            sweep = [SweepPoint(N=int(d["N"]), c=_point_c(d),
                                weights=weights or {"kind": "constant", "value": 1.0})]
        return cls(
            sweep=sweep,
            replicates=int(d.get("replicates", 1)),
            estimator=d.get("estimator", "C_over_N2"),
            seed=int(d.get("seed", 0)),
            output=d.get("output"),
        )

    @classmethod
    def load(cls, path) -> "ExperimentPlan":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _point_c(p: dict) -> float:
    if ("c" in p) == ("lambda" in p):
        raise ValueError("give exactly one of 'c' or 'lambda' per sweep point")
    return float(p["c"]) if "c" in p else c_of_lambda(float(p["lambda"]))


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

def replicate_seed(root: int, point_index: int, rep: int) -> int:
    """Stable 64-bit seed for one replicate of one sweep point."""
    ss = np.random.SeedSequence(entropy=(int(root), int(point_index), int(rep)))
    return int(ss.generate_state(1, np.uint64)[0])


def _replicate_task(args) -> tuple[int, int, int]:
    N, c, weights_dict, seed = args
    m = ModelConfig(TorusConfig(N), c, weights_from_dict(weights_dict), seed)
    g = sample_graph(m)
    return largest_component(g).largest, g.edge_count, seed


@dataclass
class PointResult:
    point: SweepPoint
    replicate_rows: list[dict]
    mean: float
    std: float
    stderr: float
    target: float | None
    z: float | None
    warnings: list[str]


@dataclass
class ExperimentResult:
    plan: ExperimentPlan
    points: list[PointResult]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["row", "N", "c", "lambda", "estimator", "replicate", "seed",
             "C", "edges", "value", "mean", "std", "stderr", "target", "z", "warnings"]
        )
        for pr in self.points:
            p = pr.point
            for row in pr.replicate_rows:
                writer.writerow(
                    ["replicate", p.N, repr(p.c), repr(p.lam), self.plan.estimator,
                     row["replicate"], row["seed"], row["C"], row["edges"],
                     repr(row["value"]), "", "", "", "", "", ""]
                )
            writer.writerow(
                ["summary", p.N, repr(p.c), repr(p.lam), self.plan.estimator, "", "", "", "",
                 "", repr(pr.mean), repr(pr.std), repr(pr.stderr),
                 "" if pr.target is None else repr(pr.target),
                 "" if pr.z is None else repr(pr.z),
                 ";".join(pr.warnings)]
            )
        return buf.getvalue()

    def write(self, path, fmt: str = "csv") -> None:
        if fmt == "csv":
            with open(path, "w") as fh:
                fh.write(self.to_csv())
        elif fmt == "json":
            payload = {
                "estimator": self.plan.estimator,
                "seed": self.plan.seed,
                "points": [
                    {
                        "N": pr.point.N,
                        "c": pr.point.c,
                        "lambda": pr.point.lam,
                        "weights": pr.point.weights,
                        "replicates": pr.replicate_rows,
                        "mean": pr.mean,
                        "std": pr.std,
                        "stderr": pr.stderr,
                        "target": pr.target,
                        "z": pr.z,
                        "warnings": pr.warnings,
                    }
                    for pr in self.points
                ],
            }
            with open(path, "w") as fh:
                json.dump(payload, fh, indent=2)
        else:
            raise ValueError(f"unknown format {fmt!r}")


def estimator_value(estimator: str, C: int, N: int) -> float:
    if estimator == "C_over_N2":
        return C / (N * N)
    return C / math.log(N * N)


def theory_target(estimator: str, report: TheoryReport) -> float | None:
    if estimator == "C_over_N2" and report.regime == "supercritical":
        return report.beta_hat
    if estimator == "C_over_logN2" and report.regime == "subcritical":
        return report.sub_const_weighted
    return None


def run_experiment(plan: ExperimentPlan, threads: int = 1) -> ExperimentResult:
    """Run every sweep point; deterministic given the plan and root seed.

    Replicates fan out over `threads` worker processes; rows are reduced
    in replicate order regardless of completion order (executor.map
    preserves input order).
    """
    points: list[PointResult] = []
    for pi, p in enumerate(plan.sweep):
        spec = p.weight_spec()
        report = build_report(p.lam, spec)
        warnings: list[str] = []
        bound = spec.support_bound
        if bound is not None and p.c * bound * bound / p.N >= 1.0:
            warnings.append("edge probability capped at distance 1; theory assumes p_r < 1")
        tasks = [
            (p.N, p.c, p.weights, replicate_seed(plan.seed, pi, rep))
            for rep in range(plan.replicates)
        ]
        if threads > 1:
            with ProcessPoolExecutor(max_workers=threads) as ex:
                raw = list(ex.map(_replicate_task, tasks))
        else:
            raw = [_replicate_task(t) for t in tasks]
        rows = []
        for rep, (C, edges, seed) in enumerate(raw):
            rows.append(
                {"replicate": rep, "seed": seed, "C": C, "edges": edges,
                 "value": estimator_value(plan.estimator, C, p.N)}
            )
        values = np.array([r["value"] for r in rows])
        mean = float(values.mean())
        std = float(values.std(ddof=1)) if len(values) > 1 else 0.0
        se = std / math.sqrt(len(values)) if len(values) > 1 else 0.0
        target = theory_target(plan.estimator, report)
        z = (mean - target) / se if (target is not None and se > 0) else None
        points.append(PointResult(p, rows, mean, std, se, target, z, warnings))
    return ExperimentResult(plan, points)


# ---------------------------------------------------------------------------
# verification front-ends
# ---------------------------------------------------------------------------

def verify_theory(lam: float | None = None, c: float | None = None,
                  weights: dict | WeightSpec | None = None) -> TheoryReport:
    """Front-end to the constants module: one report per (lambda, W)."""
    if (lam is None) == (c is None):
        raise ValueError("give exactly one of lambda or c")
    if lam is None:
        lam = lambda_of_c(c)
    spec = weights if isinstance(weights, WeightSpec) else weights_from_dict(weights)
    return build_report(lam, spec)


DEFAULT_TV_GRID = tuple(
    (n, lam) for n in (10, 100, 1000) for lam in (0.5, 1.0, 2.0) if lam <= n
)
DEFAULT_LAMBDA_N_SWEEP = (250, 500, 1000, 2000)


def verify_coupling(tv_grid=DEFAULT_TV_GRID, lambda_n_sweep=DEFAULT_LAMBDA_N_SWEEP,
                    c: float = 1.0) -> list[dict]:
    """Pass/fail table for the Binomial-Poisson TV bound and the
    finite-N intensity expansion lambda_N = lambda - 2c/N + o(1/N)."""
    rows: list[dict] = []
    for n, lam in tv_grid:
        tv = binomial_poisson_tv(n, lam)
        bound = lam * lam / n
        rows.append(
            {"check": "tv_bound", "n": n, "lambda": lam,
             "value": tv, "bound": bound, "passed": tv <= bound}
        )
    if lambda_n_sweep:
        lam = lambda_of_c(c)
        errs = []
        for N in lambda_n_sweep:
            lN = lambda_N(c, TorusConfig(N))
            err = N * abs(lN - lam + 2 * c / N)
            errs.append(err)
            rows.append(
                {"check": "lambda_N_expansion", "N": N, "lambda_N": lN,
                 "value": err, "bound": None, "passed": True}
            )
        decreasing = all(a > b for a, b in zip(errs, errs[1:]))
        rows.append(
            {"check": "lambda_N_trend", "value": errs, "bound": "strictly decreasing",
             "passed": decreasing}
        )
    return rows
