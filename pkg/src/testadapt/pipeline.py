"""End-to-end adaptation: search, reduction and oracle injection."""

from __future__ import annotations

from dataclasses import dataclass

from .appmodel import AppModel, TestCase
from .evolve import _REDUCE, SearchConfig, SearchResult, run_search
from .fitness import FitnessReport
from .postprocess import inject_oracles, reduce_test
from .textsem import EmbeddingStore


@dataclass
class Adaptation:
    search: SearchResult
    reduced_test: TestCase
    reduced_report: FitnessReport
    adapted_test: TestCase

    @property
    def fitness(self) -> float:
        return self.reduced_report.score


def adapt(
    cfg: SearchConfig,
    app_d: AppModel,
    t_d: TestCase,
    app_r: AppModel,
    store: EmbeddingStore,
    **search_kwargs,
) -> Adaptation:
    result = run_search(cfg, app_d, t_d, app_r, store, **search_kwargs)
    sc = result.context
    calls = iter(range(1 << 30))

    def evaluator(t: TestCase) -> FitnessReport:
        return sc.evaluate(t, sc.rng(_REDUCE, next(calls)))

    reduced, rep = reduce_test(result.best_test, result.best_report, evaluator)
    adapted = inject_oracles(reduced, rep, result.profile)
    return Adaptation(result, reduced, rep, adapted)
