"""Empirical task similarity, transfer efficiency, and replications.

Empirical task similarity (ETS) is the agreement fraction between a
model trained on target data and a source-trained model whose voter and
decider were refit on the same target training data.  It is estimated on
a held-out target split by default; the in-sample variant (agreement
measured on the training data itself) is available behind a flag.

All randomness flows through numpy Generators seeded as
``base_seed + replication_index``, so every harness here is reproducible
and safe to parallelize across replications.
"""

from __future__ import annotations

import functools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .distributions import PartitionDistribution, SampleSet, sample
from .learners import (
    DEFAULT_MIN_GAIN,
    ComposeableDecisionFunction,
    FittedModel,
    LearnerError,
    adapt_to_target,
    empirical_risk,
    fit_histogram,
    fit_tree,
)

# 90% two-sided normal quantile used for all confidence intervals.
Z90 = 1.645


class EmpiricalError(ValueError):
    pass


@dataclass(frozen=True)
class LearnerConfig:
    """Hyperparameters shared by every model fit inside a harness."""

    kind: str = "tree"  # "tree" or "histogram"
    depth: int = 2
    bins: int = 2
    min_leaf: int = 1
    min_gain: float = DEFAULT_MIN_GAIN

    def fit(self, samples: SampleSet, domain=None, num_classes: Optional[int] = None) -> FittedModel:
        if self.kind == "tree":
            return fit_tree(
                samples,
                max_depth=self.depth,
                min_leaf=self.min_leaf,
                domain=domain,
                min_gain=self.min_gain,
                num_classes=num_classes,
            )
        if self.kind == "histogram":
            return fit_histogram(samples, self.bins, domain=domain, num_classes=num_classes)
        raise EmpiricalError(f"unknown learner kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "depth": self.depth,
            "bins": self.bins,
            "min_leaf": self.min_leaf,
            "min_gain": self.min_gain,
        }


@dataclass(frozen=True)
class EtsEstimate:
    value: float
    n_target_eval: int
    detail: dict = field(default_factory=dict)


def ets(target_model, adapted_source, eval_samples: SampleSet) -> EtsEstimate:
    """Agreement fraction between two decision functions on target patterns.

    The second argument must already be adapted to the target task (its
    voter refit on target training data disjoint from eval_samples).
    """
    if len(eval_samples) == 0:
        raise EmpiricalError("ETS needs a nonempty evaluation set")
    if not (eval_samples.t == 1).all():
        raise EmpiricalError("ETS evaluation samples must all carry target flag t=1")
    a = target_model.predict(eval_samples.X)
    b = adapted_source.predict(eval_samples.X)
    agree = int(np.sum(a == b))
    detail = {
        "agreements": agree,
        "target_model": dict(getattr(target_model, "meta", {})),
        "source_model": dict(getattr(adapted_source, "meta", {})),
    }
    return EtsEstimate(agree / len(eval_samples), len(eval_samples), detail)


@dataclass(frozen=True)
class ReplicationReport:
    """Per-replication values of one statistic with a 90% normal CI."""

    statistic: str
    values: tuple[float, ...]
    seeds: tuple[int, ...]

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def std(self) -> float:
        return float(np.std(self.values, ddof=1))

    @property
    def ci_halfwidth(self) -> float:
        return Z90 * self.std / np.sqrt(len(self.values))

    @property
    def ci(self) -> tuple[float, float]:
        h = self.ci_halfwidth
        return (self.mean - h, self.mean + h)

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "mean": self.mean,
            "ci90_halfwidth": self.ci_halfwidth,
            "replications": len(self.values),
            "seeds": list(self.seeds),
            "values": list(self.values),
        }


def run_replications(
    experiment: Callable[[int], float | dict],
    replications: int,
    base_seed: int,
    workers: int = 1,
    statistic: str = "statistic",
):
    """Run ``experiment(seed)`` for seeds base_seed..base_seed+R-1.

    Returns a ReplicationReport, or a dict of them when the experiment
    returns a dict of named statistics.  With workers > 1 the experiment
    must be picklable; results are order-stable either way.
    """
    if replications < 2:
        raise EmpiricalError("need at least 2 replications for a confidence interval")
    seeds = [base_seed + i for i in range(replications)]
    results = list(_map(experiment, seeds, workers))
    if isinstance(results[0], dict):
        keys = results[0].keys()
        return {
            k: ReplicationReport(k, tuple(float(r[k]) for r in results), tuple(seeds))
            for k in keys
        }
    return ReplicationReport(statistic, tuple(float(r) for r in results), tuple(seeds))


def _map(fn, args, workers: int):
    if workers is None or workers <= 1 or len(args) <= 1:
        return [fn(a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, args))


def transfer_efficiency(adapted_risk_mean: float, scratch_risk_mean: float) -> float:
    """Ratio of mean risks, transfer learner over target-only baseline.

    Values below 1 mean the source representation helped.  The reciprocal
    orientation (scratch over adapted) is reported alongside by the
    harnesses since both conventions appear in practice.
    """
    if scratch_risk_mean <= 0:
        raise EmpiricalError("scratch risk mean must be positive to form a ratio")
    return adapted_risk_mean / scratch_risk_mean


# ---------------------------------------------------------------------------
# ETS matrix harness


@dataclass(frozen=True)
class EtsMatrixReport:
    names: tuple[str, ...]
    means: np.ndarray
    ci_halfwidth: np.ndarray
    per_replication: np.ndarray  # (R, m, m)
    seeds: tuple[int, ...]
    config: dict

    def report(self, target: str, source: str) -> ReplicationReport:
        i = self.names.index(target)
        j = self.names.index(source)
        return ReplicationReport(
            f"ets[{target};{source}]",
            tuple(self.per_replication[:, i, j].tolist()),
            self.seeds,
        )


def _matrix_one_replication(
    seed: int,
    distributions: Sequence[PartitionDistribution],
    learner: LearnerConfig,
    n_train: int,
    n_eval: int,
    in_sample: bool,
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    m = len(distributions)
    target_train, target_eval, target_models, source_models = [], [], [], []
    for dist in distributions:
        pool = sample(dist, n_train + n_eval, rng)
        train, evalset = pool[:n_train], pool[n_train:]
        if in_sample:
            evalset = train
        target_train.append(train)
        target_eval.append(evalset)
        target_models.append(
            learner.fit(train, domain=dist.partition.domain, num_classes=dist.num_classes)
        )
        src = sample(dist, n_train, rng)
        source_models.append(
            learner.fit(src, domain=dist.partition.domain, num_classes=dist.num_classes)
        )
    out = np.zeros((m, m))
    for i, tgt in enumerate(distributions):
        for j in range(m):
            adapted = adapt_to_target(
                source_models[j], target_train[i], num_classes=tgt.num_classes
            )
            out[i, j] = ets(target_models[i], adapted, target_eval[i]).value
    return out


def empirical_matrix(
    distributions: Sequence[PartitionDistribution],
    learner: LearnerConfig,
    n_train: int,
    n_eval: int,
    replications: int,
    base_seed: int,
    in_sample: bool = False,
    workers: int = 1,
) -> EtsMatrixReport:
    """Directed ETS matrix (rows targets, columns sources) with 90% CIs.

    Every replication draws fresh training, evaluation and source data
    for each task; each (target, source) entry adapts that source's model
    to the target's training split and scores agreement on the target's
    evaluation split.
    """
    if n_train < 1 or n_eval < 1:
        raise EmpiricalError("sample counts must be positive")
    if replications < 2:
        raise EmpiricalError("need at least 2 replications for a confidence interval")
    seeds = [base_seed + i for i in range(replications)]
    fn = functools.partial(
        _matrix_one_replication,
        distributions=tuple(distributions),
        learner=learner,
        n_train=n_train,
        n_eval=n_eval,
        in_sample=in_sample,
    )
    stack = np.stack(_map(fn, seeds, workers))
    means = stack.mean(axis=0)
    ci = Z90 * stack.std(axis=0, ddof=1) / np.sqrt(replications)
    config = {
        "learner": learner.to_dict(),
        "n_train": n_train,
        "n_eval": n_eval,
        "replications": replications,
        "base_seed": base_seed,
        "in_sample": in_sample,
    }
    return EtsMatrixReport(
        tuple(d.name for d in distributions), means, ci, stack, tuple(seeds), config
    )


# ---------------------------------------------------------------------------
# transfer-efficiency harness


@dataclass(frozen=True)
class TransferReport:
    source: str
    target: str
    n_target: int
    n_source: int
    scratch: ReplicationReport
    adapted: ReplicationReport
    config: dict

    @property
    def te_ratio(self) -> float:
        """Adapted over scratch mean risk; < 1 means transfer helped."""
        return transfer_efficiency(self.adapted.mean, self.scratch.mean)

    @property
    def te_reciprocal(self) -> float:
        if self.adapted.mean <= 0:
            raise EmpiricalError("adapted risk mean must be positive to form a ratio")
        return self.scratch.mean / self.adapted.mean

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "n_target": self.n_target,
            "n_source": self.n_source,
            "scratch_risk": self.scratch.to_dict(),
            "adapted_risk": self.adapted.to_dict(),
            "te_adapted_over_scratch": self.te_ratio,
            "te_scratch_over_adapted": self.te_reciprocal,
            "config": self.config,
        }


def _transfer_one_replication(
    seed: int,
    source: PartitionDistribution,
    target: PartitionDistribution,
    learner: LearnerConfig,
    n_target: int,
    n_source: int,
    n_eval: int,
) -> dict:
    rng = np.random.default_rng(seed)
    target_train = sample(target, n_target, rng)
    evalset = sample(target, n_eval, rng)
    source_train = sample(source, n_source, rng)
    dom = target.partition.domain
    scratch_model = learner.fit(target_train, domain=dom, num_classes=target.num_classes)
    source_model = learner.fit(source_train, domain=dom, num_classes=source.num_classes)
    adapted = adapt_to_target(source_model, target_train, num_classes=target.num_classes)
    return {
        "scratch_risk": empirical_risk(scratch_model, evalset),
        "adapted_risk": empirical_risk(adapted, evalset),
    }


def transfer_experiment(
    source: PartitionDistribution,
    target: PartitionDistribution,
    learner: LearnerConfig,
    n_target: int,
    n_source: int,
    n_eval: int,
    replications: int,
    base_seed: int,
    workers: int = 1,
) -> TransferReport:
    """Mean adapted vs from-scratch target risk over seeded replications.

    The scratch model sees only the n_target target samples; the adapted
    model freezes the transformer fit on n_source source samples and
    refits its voter on the same n_target target samples.  Risks are
    measured on a fresh evaluation draw each replication.
    """
    if replications < 2:
        raise EmpiricalError("need at least 2 replications for a confidence interval")
    seeds = [base_seed + i for i in range(replications)]
    fn = functools.partial(
        _transfer_one_replication,
        source=source,
        target=target,
        learner=learner,
        n_target=n_target,
        n_source=n_source,
        n_eval=n_eval,
    )
    rows = _map(fn, seeds, workers)
    scratch = ReplicationReport(
        "scratch_risk", tuple(r["scratch_risk"] for r in rows), tuple(seeds)
    )
    adapted = ReplicationReport(
        "adapted_risk", tuple(r["adapted_risk"] for r in rows), tuple(seeds)
    )
    config = {
        "learner": learner.to_dict(),
        "n_eval": n_eval,
        "replications": replications,
        "base_seed": base_seed,
    }
    return TransferReport(
        source.name, target.name, n_target, n_source, scratch, adapted, config
    )


# ---------------------------------------------------------------------------
# convergence harness (analytic curve vs histogram-learner ETS)


@dataclass(frozen=True)
class ConvergencePoint:
    n_bins: int
    analytic_ts: float
    ets_report: ReplicationReport


def _convergence_one_replication(
    seed: int,
    target: PartitionDistribution,
    source: PartitionDistribution,
    target_learner: LearnerConfig,
    bins: int,
    n_train: int,
    n_eval: int,
) -> float:
    rng = np.random.default_rng(seed)
    pool = sample(target, n_train + n_eval, rng)
    train, evalset = pool[:n_train], pool[n_train:]
    source_train = sample(source, n_train, rng)
    dom = target.partition.domain
    target_model = target_learner.fit(train, domain=dom, num_classes=target.num_classes)
    source_model = fit_histogram(source_train, bins, domain=dom,
                                 num_classes=source.num_classes)
    adapted = adapt_to_target(source_model, train, num_classes=target.num_classes)
    return ets(target_model, adapted, evalset).value


def convergence_study(
    target: PartitionDistribution,
    grid_sizes: Sequence[int],
    target_learner: LearnerConfig,
    n_train: int,
    n_eval: int,
    replications: int,
    base_seed: int,
    workers: int = 1,
) -> list[ConvergencePoint]:
    """Analytic similarity and histogram-learner ETS along a grid refinement.

    For each n the source task labels the n x n grid with one class per
    cell and the source learner is a histogram with n bins per dimension,
    so its regions coincide with the source's optimal partition.  The
    target model keeps a fixed configuration across the sweep.
    """
    from .distributions import grid_distribution
    from .similarity import ts

    points = []
    for idx, n in enumerate(grid_sizes):
        src = grid_distribution(n, domain=target.partition.domain)
        analytic = ts(target, src).value
        fn = functools.partial(
            _convergence_one_replication,
            target=target,
            source=src,
            target_learner=target_learner,
            bins=n,
            n_train=n_train,
            n_eval=n_eval,
        )
        seeds = [base_seed + 1000 * idx + i for i in range(replications)]
        values = _map(fn, seeds, workers)
        points.append(
            ConvergencePoint(
                n,
                analytic,
                ReplicationReport(f"ets[bins={n}]", tuple(map(float, values)), tuple(seeds)),
            )
        )
    return points
