"""Experiment orchestration: replicate fan-out, aggregation and artifacts.

Each replicate draws from its own seeded streams (see
:mod:`swaptest.seeding`) and returns integer counts, so the aggregate is the
same for any number of workers. Artifacts are a CSV per rejection matrix and
one ``summary.json`` that embeds the full config.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import ValidationError, all_pairs
from .engine import TestConfig, decision_threshold, p_value, pair_counts
from .multiplicity import fdr_replicate
from .scores import ScoreFunction
from .seeding import int_seed, rng_for
from .simgen import (
    draw_theta_hat,
    gen_gmm,
    gen_linear,
    gen_quadratic_null,
    gen_subset_binary,
    normalized_ramp,
)

SIZE_QUADRATIC = "size-quadratic"
POWER_LINEAR_GRID = "power-linear-grid"
POWER_GMM = "power-gmm"
DATAMODEL_SYNTHETIC = "datamodel-synthetic"
PVALUE_UNIFORMITY = "pvalue-uniformity"
FDR_CHECK = "fdr-check"
EXPERIMENTS = (
    SIZE_QUADRATIC,
    POWER_LINEAR_GRID,
    POWER_GMM,
    DATAMODEL_SYNTHETIC,
    PVALUE_UNIFORMITY,
    FDR_CHECK,
)

WORKERS_ENV = "SWAPTEST_WORKERS"

DEFAULT_PARAMS = {
    SIZE_QUADRATIC: {"d": 10, "theta_hat_scale": 1.0},
    POWER_LINEAR_GRID: {
        "theta_star": [1, 1, 2, 2, 3, 3, 4, 4, 5, 5],
        "noise_sigma": 1.0,
        "sigmas": [1.0, 2.0, 3.0],
    },
    POWER_GMM: {"d": 10, "q": 0.5, "ns": [5000, 20000, 50000], "theta_hat_scale": 1.0},
    DATAMODEL_SYNTHETIC: {
        "d": 10,
        "m": 5,
        "w": [1, 1, 2, 2, 3, 3, 4, 4, 5, 5],
        "noise_sigma": 1.0,
        "theta_hat_sigma": 0.5,
    },
    PVALUE_UNIFORMITY: {"d": 10, "pair": [1, 2], "theta_hat_scale": 1.0},
    FDR_CHECK: {"null_fractions": [1.0, 0.9], "m": 100, "q": 0.2, "n_per_test": 400},
}


def mc_slack(alpha: float, replicates: int) -> float:
    """Three binomial standard errors at rate ``alpha``."""
    return 3.0 * math.sqrt(alpha * (1.0 - alpha) / replicates)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    replicates: int
    n: int = 1000
    alphas: tuple = (0.1,)
    params: dict = field(default_factory=dict)
    root_seed: int = 0
    output: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValidationError(
                f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}"
            )
        if int(self.replicates) != self.replicates or self.replicates < 1:
            raise ValidationError(f"replicates must be a positive integer, got {self.replicates}")
        if int(self.n) != self.n or self.n < 2:
            raise ValidationError(f"n must be an integer >= 2, got {self.n}")
        alphas = tuple(float(a) for a in self.alphas)
        if not alphas or not all(0 < a < 1 for a in alphas):
            raise ValidationError(f"alphas must be a non-empty list in (0, 1), got {self.alphas}")
        params = {**DEFAULT_PARAMS[self.experiment], **(self.params or {})}
        object.__setattr__(self, "replicates", int(self.replicates))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "root_seed", int(self.root_seed))
        self._check_params()

    def _check_params(self):
        p = self.params
        if self.experiment == POWER_LINEAR_GRID:
            if len(p["theta_star"]) < 2 or not p["sigmas"]:
                raise ValidationError("power-linear-grid needs theta_star (d >= 2) and sigmas")
        elif self.experiment == POWER_GMM:
            if not p["ns"] or any(int(v) < 2 for v in p["ns"]):
                raise ValidationError("power-gmm needs a list ns of sample sizes >= 2")
            if not 0 < p["q"] < 1:
                raise ValidationError("q must lie in (0, 1)")
        elif self.experiment == DATAMODEL_SYNTHETIC:
            if not 0 < p["m"] < p["d"] or len(p["w"]) != p["d"]:
                raise ValidationError("datamodel-synthetic needs 0 < m < d and len(w) == d")
        elif self.experiment == PVALUE_UNIFORMITY:
            i, j = p["pair"]
            if not (1 <= i <= p["d"] and 1 <= j <= p["d"]):
                raise ValidationError("pair must be 1-based indices within d")
        elif self.experiment == FDR_CHECK:
            if not 0 <= p["q"] <= 1 or int(p["m"]) < 1:
                raise ValidationError("fdr-check needs q in [0, 1] and m >= 1")
        elif int(p.get("d", 2)) < 2:
            raise ValidationError("d must be >= 2")

    @classmethod
    def from_dict(cls, obj) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise ValidationError("experiment config must be a JSON object")
        known = {"experiment", "replicates", "n", "alphas", "alpha", "params", "root_seed", "output"}
        unknown = set(obj) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        if "experiment" not in obj or "replicates" not in obj:
            raise ValidationError('config needs "experiment" and "replicates"')
        obj = dict(obj)
        if "alpha" in obj:
            obj.setdefault("alphas", [obj.pop("alpha")])
        if "alphas" in obj:
            obj["alphas"] = tuple(obj["alphas"])
        return cls(**obj)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                obj = json.load(fh)
            except ValueError as exc:
                raise ValidationError(f"{path}: invalid JSON: {exc}") from None
        return cls.from_dict(obj)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["alphas"] = list(self.alphas)
        return out

    @property
    def settings(self) -> list:
        """The swept parameter: one entry per rejection-matrix family."""
        p = self.params
        if self.experiment == POWER_LINEAR_GRID:
            return [float(s) for s in p["sigmas"]]
        if self.experiment == POWER_GMM:
            return [int(v) for v in p["ns"]]
        if self.experiment == FDR_CHECK:
            return [float(v) for v in p["null_fractions"]]
        return [None]

    @property
    def d(self) -> int:
        if self.experiment == POWER_LINEAR_GRID:
            return len(self.params["theta_star"])
        if self.experiment == POWER_GMM and "mu" in self.params:
            return len(self.params["mu"])
        return int(self.params.get("d", 2))


@dataclass(frozen=True, eq=False)
class RejectionMatrix:
    """Rejection rates for every pair. The diagonal holds the degenerate
    ``i = i`` tests, whose null is true by construction."""

    rates: np.ndarray
    alpha: float
    n: int
    replicates: int
    seed: int
    setting: object = None

    def __post_init__(self):
        r = np.asarray(self.rates, dtype=np.float64)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValidationError("rates must be a square matrix")
        if not np.array_equal(r, r.T):
            raise ValidationError("rejection matrix must be symmetric")
        if np.any((r < 0) | (r > 1)):
            raise ValidationError("rejection rates must lie in [0, 1]")
        object.__setattr__(self, "rates", r)

    @property
    def d(self) -> int:
        return self.rates.shape[0]

    def rate(self, i: int, j: int) -> float:
        """Rate for 1-based features ``i`` and ``j``."""
        return float(self.rates[i - 1, j - 1])

    def off_diagonal(self) -> np.ndarray:
        iu = np.triu_indices(self.d, k=1)
        return self.rates[iu]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["feature"] + [str(k) for k in range(1, self.d + 1)])
        for k, row in enumerate(self.rates, start=1):
            w.writerow([str(k)] + [repr(float(v)) for v in row])
        return buf.getvalue()

    def metadata(self) -> dict:
        return {
            "alpha": self.alpha,
            "n": self.n,
            "replicates": self.replicates,
            "seed": self.seed,
            "setting": self.setting,
            "mc_slack": mc_slack(self.alpha, self.replicates),
            "diagonal": "degenerate",
        }


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    matrices: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    pvalues: np.ndarray | None = None

    def matrix(self, setting=None, alpha=None) -> RejectionMatrix:
        alpha = self.config.alphas[0] if alpha is None else alpha
        setting = self.config.settings[0] if setting is None else setting
        return self.matrices[_label(setting, alpha)]


def _label(setting, alpha) -> str:
    return f"alpha{alpha:g}" if setting is None else f"setting{setting:g}_alpha{alpha:g}"


# ---------------------------------------------------------------- replicates


def _pair_index(d):
    pairs = all_pairs(d, include_diagonal=True)
    return pairs, np.array([p.i for p in pairs]), np.array([p.j for p in pairs])


def _decide(wins, half, alphas):
    """Reject flags, shape ``(len(alphas), len(wins))``."""
    u = wins / half
    gap = np.abs(u - 0.5)
    thr = np.array([decision_threshold(2 * half, TestConfig(alpha=a)) for a in alphas])
    return gap[None, :] >= thr[:, None]


def _replicate(args):
    cfg_dict, r = args
    cfg = ExperimentConfig.from_dict(cfg_dict)
    exp, root, p = cfg.experiment, cfg.root_seed, cfg.params

    if exp == FDR_CHECK:
        return np.array(
            [
                fdr_replicate(
                    nf, int(p["m"]), float(p["q"]), r, int_seed(root, exp, r, s),
                    n=int(p["n_per_test"]),
                )
                for s, nf in enumerate(cfg.settings)
            ]
        )

    if exp == PVALUE_UNIFORMITY:
        d = int(p["d"])
        data = gen_quadratic_null(cfg.n, d, rng_for(root, exp, r, 0, 0))
        theta = draw_theta_hat(np.zeros(d), float(p["theta_hat_scale"]), rng_for(root, exp, r, 1))
        i, j = p["pair"]
        wins, _, half = pair_counts(
            data, ScoreFunction.linear_residual(theta), [(i - 1, j - 1)], int_seed(root, exp, r, 0, 2)
        )
        return np.array([p_value(wins[0] / half, 2 * half)])

    d = cfg.d
    pairs, _, _ = _pair_index(d)
    counts = []
    for s, setting in enumerate(cfg.settings):
        data_rng = rng_for(root, exp, r, s, 0)
        theta_rng = rng_for(root, exp, r, 1)  # shared across settings
        tie_seed = int_seed(root, exp, r, s, 2)
        if exp == SIZE_QUADRATIC:
            data = gen_quadratic_null(cfg.n, d, data_rng)
            theta = draw_theta_hat(np.zeros(d), float(p["theta_hat_scale"]), theta_rng)
            score = ScoreFunction.linear_residual(theta)
        elif exp == POWER_LINEAR_GRID:
            theta_star = np.asarray(p["theta_star"], dtype=np.float64)
            data = gen_linear(cfg.n, theta_star, float(p["noise_sigma"]), data_rng)
            theta = draw_theta_hat(theta_star, setting, theta_rng)
            score = ScoreFunction.linear_residual(theta)
        elif exp == POWER_GMM:
            mu = np.asarray(p["mu"], dtype=np.float64) if "mu" in p else normalized_ramp(d)
            data = gen_gmm(setting, mu, float(p["q"]), data_rng)
            theta = draw_theta_hat(np.zeros(d), float(p["theta_hat_scale"]), theta_rng)
            score = ScoreFunction.classification_margin(theta)
        else:  # DATAMODEL_SYNTHETIC
            w = np.asarray(p["w"], dtype=np.float64)
            data = gen_subset_binary(
                cfg.n, d, int(p["m"]), w, float(p["noise_sigma"]), data_rng
            )
            theta = draw_theta_hat(w, float(p["theta_hat_sigma"]), theta_rng)
            score = ScoreFunction.squared_residual(theta)
        wins, _, half = pair_counts(data, score, pairs, tie_seed)
        counts.append(_decide(wins, half, cfg.alphas))
    return np.stack(counts).astype(np.int64)


def _map(cfg: ExperimentConfig, workers: int):
    jobs = [(cfg.to_dict(), r) for r in range(cfg.replicates)]
    if workers <= 1:
        return [_replicate(j) for j in jobs]
    chunk = max(1, len(jobs) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_replicate, jobs, chunksize=chunk))


def run_experiment(cfg: ExperimentConfig, workers: int | None = None, write: bool = True) -> ExperimentResult:
    """Run all replicates, aggregate in replicate order, optionally write artifacts."""
    workers = default_workers() if workers is None else max(1, int(workers))
    results = _map(cfg, workers)
    res = ExperimentResult(cfg)
    R = cfg.replicates
    # the output directory is left out so artifacts do not depend on where they land
    config = {k: v for k, v in cfg.to_dict().items() if k != "output"}
    summary = {"config": config, "experiment": cfg.experiment}

    if cfg.experiment == FDR_CHECK:
        fdp = np.stack(results)
        summary["fdr"] = {
            repr(nf): float(fdp[:, s].mean()) for s, nf in enumerate(cfg.settings)
        }
        summary["fdr_std_error"] = {
            repr(nf): float(fdp[:, s].std(ddof=1) / math.sqrt(R)) if R > 1 else 0.0
            for s, nf in enumerate(cfg.settings)
        }
    elif cfg.experiment == PVALUE_UNIFORMITY:
        pv = np.concatenate(results)
        res.pvalues = pv
        summary["rejection_fraction"] = {repr(a): float(np.mean(pv <= a)) for a in cfg.alphas}
        summary["mc_slack"] = {repr(a): mc_slack(a, R) for a in cfg.alphas}
    else:
        total = np.sum(results, axis=0)  # (settings, alphas, pairs)
        pairs, ii, jj = _pair_index(cfg.d)
        summary["matrices"] = {}
        for s, setting in enumerate(cfg.settings):
            for a_idx, alpha in enumerate(cfg.alphas):
                rates = np.zeros((cfg.d, cfg.d))
                rates[ii, jj] = total[s, a_idx] / R
                rates[jj, ii] = total[s, a_idx] / R
                n_used = setting if cfg.experiment == POWER_GMM else cfg.n
                mat = RejectionMatrix(rates, alpha, int(n_used), R, cfg.root_seed, setting)
                label = _label(setting, alpha)
                res.matrices[label] = mat
                summary["matrices"][label] = {**mat.metadata(), "csv": f"rejection_{label}.csv"}
    res.summary = summary
    if write and cfg.output:
        write_artifacts(res, cfg.output)
    return res


def write_artifacts(res: ExperimentResult, outdir) -> list:
    os.makedirs(outdir, exist_ok=True)
    written = []
    for label, mat in res.matrices.items():
        path = os.path.join(outdir, f"rejection_{label}.csv")
        with open(path, "w", newline="") as fh:
            fh.write(mat.to_csv())
        written.append(path)
    if res.pvalues is not None:
        path = os.path.join(outdir, "pvalues.csv")
        with open(path, "w", newline="") as fh:
            fh.write("replicate,p_value\n")
            for r, v in enumerate(res.pvalues):
                fh.write(f"{r},{float(v)!r}\n")
        written.append(path)
    path = os.path.join(outdir, "summary.json")
    with open(path, "w") as fh:
        json.dump(res.summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(path)
    return written
