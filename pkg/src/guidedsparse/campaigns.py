"""Seeded randomized campaigns: rank-safety, cross-algorithm agreement and the
three relevance guarantees, each tallied separately.

Trial ``i`` of a campaign with seed ``s`` draws everything from
``default_rng([s, i])``, so any failure is reproducible from (seed, trial).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .oracle import Verdict, check_prop1, check_prop2, check_prop3, full_ranking
from .scoring import MixCoefficients
from .synthetic import random_instance
from .traversal import Algorithm, TraversalConfig, run_query

RANK_SAFE_XS = (0.0, 0.3, 0.5, 1.0)
PROP1_CONFIGS = [MixCoefficients(1.0, b, g) for b in (0.0, 0.3, 1.0) for g in (0.05, 0.5)]
PROP2_CONFIGS = [
    MixCoefficients(1.0, 1.0, 0.05),
    MixCoefficients(1.0, 1.0, 0.5),
    MixCoefficients(1.0, 0.05, 0.05),
    MixCoefficients(1.0, 0.5, 0.5),
    MixCoefficients(0.3, 0.3, 0.0),
    MixCoefficients(0.5, 0.0, 0.0),
]
PROP3_CONFIGS = [
    MixCoefficients(1.0, 0.3, 0.05),
    MixCoefficients(1.0, 1.0, 0.05),
    MixCoefficients(1.0, 0.5, 0.5),
    MixCoefficients(1.0, 0.0, 0.05),
]
ALGORITHMS = (Algorithm.MAXSCORE, Algorithm.BMW)
SCORE_RTOL = 1e-9


@dataclass
class Tally:
    name: str
    trials: int = 0
    checks: int = 0
    violations: int = 0
    skipped: int = 0
    # trials (instances) with at least one check whose assumption held
    evaluated: int = 0
    # checks where the guided output differs from the baseline it is compared to
    nontrivial: int = 0
    first_failure: dict | None = None
    seconds: float = 0.0

    def record(self, ok: bool, info: dict) -> None:
        self.checks += 1
        if not ok:
            self.violations += 1
            if self.first_failure is None:
                self.first_failure = info

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        out = (f"{status} {self.name:<22} trials={self.trials} evaluated={self.evaluated} "
               f"checks={self.checks} skipped={self.skipped} nontrivial={self.nontrivial} "
               f"violations={self.violations} ({self.seconds:.1f}s)")
        if self.first_failure:
            out += f"\n     first failure: {self.first_failure}"
        return out


@dataclass
class CampaignSettings:
    seed: int = 0
    max_docs: int = 2000
    max_terms: int = 50
    max_query_len: int = 8
    algorithms: tuple[Algorithm, ...] = ALGORITHMS
    # F > 1 makes traversal unsafe on purpose; used to show the campaign can fail
    factor_f: float = 1.0

    def __post_init__(self):
        if self.max_docs < 1:
            raise ValueError(f"max_docs must be >= 1, got {self.max_docs}")


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def _instance(settings: CampaignSettings, trial: int, stream: int):
    rng = _trial_rng(settings.seed + stream, trial)
    inst = random_instance(rng, settings.max_docs, settings.max_terms, settings.max_query_len)
    return rng, inst, inst.queries[0]


def _same_results(got, want) -> bool:
    if got.docs != want.docs:
        return False
    a = np.asarray(got.scores)
    b = np.asarray(want.scores)
    return bool(np.all(np.abs(a - b) <= SCORE_RTOL * np.maximum(np.abs(b), 1e-300)))


def rank_safety(trials: int, settings: CampaignSettings = CampaignSettings()) -> tuple[Tally, Tally]:
    """Guided traversals with alpha = beta = gamma = x against the exhaustive top-k,
    plus MaxScore/BMW agreement on the same runs."""
    safe = Tally("rank_safety")
    agree = Tally("bmw_maxscore_agree")
    start = time.perf_counter()
    for trial in range(trials):
        rng, inst, q = _instance(settings, trial, 0)
        index = inst.index
        k = int(rng.choice([1, 5, 10, max(index.num_docs, 1)]))
        safe.trials += 1
        agree.trials += 1
        safe.evaluated += 1
        agree.evaluated += 1
        for x in RANK_SAFE_XS:
            full = full_ranking(q, index, x)
            want = full.top(k)
            # with fewer matches than k nothing can be pruned
            pruning_possible = k < len(full.docs)
            got = {}
            for alg in settings.algorithms:
                cfg = TraversalConfig(MixCoefficients.uniform(x), k, settings.factor_f, alg)
                got[alg] = run_query(q, index, cfg).results
                safe.record(_same_results(got[alg], want),
                            {"seed": settings.seed, "trial": trial, "x": x, "k": k, "algorithm": alg.value})
                safe.nontrivial += pruning_possible
            if len(got) == 2:
                a, b = got.values()
                agree.record(_same_results(a, b), {"seed": settings.seed, "trial": trial, "x": x, "k": k})
                agree.nontrivial += pruning_possible
    safe.seconds = agree.seconds = time.perf_counter() - start
    return safe, agree


def _trials(trials: int, tally: Tally, min_evaluated: int):
    """Trial numbers: at least ``trials`` of them, continuing until ``min_evaluated``
    trials met the assumptions (capped at 20x ``trials`` + 20x ``min_evaluated``)."""
    cap = 20 * (trials + min_evaluated)
    trial = 0
    while (trial < trials or tally.evaluated < min_evaluated) and trial < cap:
        yield trial
        trial += 1


def _tally_check(tally: Tally, result, info: dict) -> bool:
    """Record one check; returns whether it was evaluated."""
    if result.verdict in (Verdict.ASSUMPTION_UNMET, Verdict.NOT_APPLICABLE):
        tally.skipped += 1
        return False
    tally.record(result.verdict is Verdict.HOLDS, {**info, **result.detail})
    tally.nontrivial += bool(result.detail.get("nontrivial"))
    return True


def proposition1(trials: int, settings: CampaignSettings = CampaignSettings(), min_evaluated: int = 0) -> Tally:
    tally = Tally("prop1_intersection")
    start = time.perf_counter()
    for trial in _trials(trials, tally, min_evaluated):
        rng, inst, q = _instance(settings, trial, 1)
        k = int(rng.choice([1, 5, 10, 20]))
        cache: dict = {}
        tally.trials += 1
        evaluated = False
        for coeffs in PROP1_CONFIGS:
            for alg in settings.algorithms:
                res = check_prop1(q, inst.index, coeffs, k, alg, cache)
                evaluated |= _tally_check(tally, res, {"seed": settings.seed, "trial": trial, "k": k,
                                                       "coeffs": coeffs, "algorithm": alg.value})
        tally.evaluated += evaluated
    tally.seconds = time.perf_counter() - start
    return tally


def proposition2(trials: int, settings: CampaignSettings = CampaignSettings(), min_evaluated: int = 0) -> Tally:
    tally = Tally("prop2_mean_score")
    start = time.perf_counter()
    for trial in _trials(trials, tally, min_evaluated):
        rng, inst, q = _instance(settings, trial, 2)
        k = int(rng.choice([1, 5, 10, 20]))
        cache: dict = {}
        tally.trials += 1
        evaluated = False
        for coeffs in PROP2_CONFIGS:
            for alg in settings.algorithms:
                res = check_prop2(q, inst.index, coeffs, k, alg, cache)
                evaluated |= _tally_check(tally, res, {"seed": settings.seed, "trial": trial, "k": k,
                                                       "coeffs": coeffs, "algorithm": alg.value})
        tally.evaluated += evaluated
    tally.seconds = time.perf_counter() - start
    return tally


def random_labels(rng: np.random.Generator, ranking_learned) -> set[int]:
    """Binary labels for one query.

    Mostly the top documents of the learned-only ranking (which makes the
    outmatch chain likely for gamma <= beta <= alpha), sometimes uniformly
    random documents.
    """
    docs = ranking_learned.docs
    if len(docs) == 0:
        return set()
    m = int(rng.integers(1, max(2, len(docs) // 4) + 1))
    if rng.random() < 0.75:
        return set(docs[:m].tolist())
    return set(rng.choice(docs, size=min(m, len(docs)), replace=False).tolist())


def proposition3(trials: int, settings: CampaignSettings = CampaignSettings(), min_evaluated: int = 0) -> Tally:
    tally = Tally("prop3_relevant_count")
    start = time.perf_counter()
    for trial in _trials(trials, tally, min_evaluated):
        rng, inst, q = _instance(settings, trial, 3)
        k = int(rng.choice([1, 5, 10, 20]))
        cache: dict = {0.0: full_ranking(q, inst.index, 0.0)}
        relevant = random_labels(rng, cache[0.0])
        tally.trials += 1
        evaluated = False
        for coeffs in PROP3_CONFIGS:
            for alg in settings.algorithms:
                res = check_prop3(q, inst.index, coeffs, k, relevant, alg, cache)
                evaluated |= _tally_check(tally, res, {"seed": settings.seed, "trial": trial, "k": k,
                                                       "coeffs": coeffs, "algorithm": alg.value})
        tally.evaluated += evaluated
    tally.seconds = time.perf_counter() - start
    return tally


@dataclass
class CampaignReport:
    tallies: list[Tally] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(t.passed for t in self.tallies)

    def text(self) -> str:
        return "\n".join(t.line() for t in self.tallies)


def run_all(trials: int, settings: CampaignSettings = CampaignSettings()) -> CampaignReport:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    safe, agree = rank_safety(trials, settings)
    return CampaignReport([
        safe,
        agree,
        proposition1(trials, settings),
        proposition2(trials, settings),
        proposition3(trials, settings),
    ])
